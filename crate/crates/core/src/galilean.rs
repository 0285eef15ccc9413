//! The Galilean symmetry of the KdV hierarchy as executable maps:
//! the time substitution t_n -> sum_k q^k/k! t_{n+k}, the quadratic
//! correction entering log tau, the induced action on correlator
//! tables, and the two n-point-function transforms.
//!
//! The parameter q is realized three ways (`GalileanMap`): as the
//! formal variable tracked in `Monomial::qexp`, as an exact rational
//! constant, or as c*y^e (the specialization q = x^2/4 used by the
//! free-energy correspondence).
//!
//! Exactness contract: substitution raises time indices, so the
//! output coefficient of a monomial with indices K only reads input
//! coefficients at indices <= K componentwise. Outputs are therefore
//! exact for all stored indices (<= index cap); the headroom >= qmax
//! requirement for formal q reserves index slack so that downstream
//! q-order comparisons stay exact up to kmax.

use std::collections::BTreeMap;

use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::multiset::{boxed_tuples, canonical};
use crate::rational::{binomial_rat, factorial, odd_double_factorial, rat, Rat};
use crate::series::{Family, GradedSeries, Monomial, TruncationSpec};

/// How the Galilean parameter q is realized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GalileanMap {
    /// formal q, truncated at the series' qmax
    Formal,
    /// q = an exact rational constant
    Const(Rat),
    /// q = c * y^e
    YPow(Rat, i64),
}

impl GalileanMap {
    pub fn is_formal(&self) -> bool {
        matches!(self, GalileanMap::Formal)
    }

    /// (coefficient, q-exponent, y-exponent) of q^k under this map.
    fn qpow(&self, k: u32) -> (Rat, u32, i64) {
        match self {
            GalileanMap::Formal => (Rat::one(), k, 0),
            GalileanMap::Const(c) => (c.clone().pow(k as i32), 0, 0),
            GalileanMap::YPow(c, e) => (c.clone().pow(k as i32), 0, e * k as i64),
        }
    }

}

fn check_headroom(m: &GalileanMap, trunc: &TruncationSpec) -> Result<()> {
    if m.is_formal() && trunc.headroom < trunc.qmax {
        return Err(Error::Config(format!(
            "formal Galilean substitution needs headroom >= qmax (have {}, need {})",
            trunc.headroom, trunc.qmax
        )));
    }
    Ok(())
}

/// The linear substitution t_n -> sum_{k>=0} q^k/k! t_{n+k} applied to
/// every monomial of `s`. Shifts are cut at the index cap (for formal
/// q additionally at qmax); the dropped tails only touch monomials
/// outside the stored window.
pub fn galilean_times(s: &GradedSeries, m: &GalileanMap) -> Result<GradedSeries> {
    let trunc = s.trunc;
    check_headroom(m, &trunc)?;
    let cap = trunc.index_cap();
    let family = s.family;

    // substitution image of each time variable, built on demand
    let mut images: BTreeMap<u32, GradedSeries> = BTreeMap::new();
    let mut image = |n: u32| -> GradedSeries {
        images
            .entry(n)
            .or_insert_with(|| {
                let mut sub = GradedSeries::zero(trunc, family);
                for k in 0..=(cap - n) {
                    if m.is_formal() && k > trunc.qmax {
                        break;
                    }
                    let (c, qe, ye) = m.qpow(k);
                    let c = c / Rat::from_integer(factorial(k as u64));
                    sub.add_term(Monomial::var(n + k).with_qexp(qe).with_yexp(ye), c);
                }
                sub
            })
            .clone()
    };

    let mut out = GradedSeries::zero(trunc, family);
    for (mono, coeff) in s.iter() {
        let mut base = mono.clone();
        let texp = std::mem::take(&mut base.texp);
        let mut acc = GradedSeries::zero(trunc, family);
        acc.add_term(base, coeff.clone());
        for (&n, &e) in &texp {
            let img = image(n);
            for _ in 0..e {
                acc = acc.mul(&img)?;
            }
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// The correction g(t;q) = 1/2 sum_{i,j} q^{i+j+1}/(i+j+1) t_i t_j /
/// (i! j!), emitted at genus grade 0 (it enters log tau divided by
/// eps^2).
pub fn quadratic_correction(
    m: &GalileanMap,
    trunc: TruncationSpec,
    family: Family,
) -> GradedSeries {
    let mut out = GradedSeries::zero(trunc, family);
    let cap = trunc.index_cap();
    for i in 0..=cap {
        for j in i..=cap {
            let ord = i + j + 1;
            if m.is_formal() && ord > trunc.qmax {
                continue;
            }
            let (c, qe, ye) = m.qpow(ord);
            let sym = if i == j { rat(1, 2) } else { Rat::one() };
            let denom = Rat::from_integer(
                factorial(i as u64) * factorial(j as u64) * (ord as u64),
            );
            out.add_term(
                Monomial::from_indices(&[i, j]).with_qexp(qe).with_yexp(ye),
                sym * c / denom,
            );
        }
    }
    out
}

/// log tau transform: F(t^G(t;q)) + g(t;q) at genus grade 0. Any
/// constant-ledger part of F is unaffected and passes through outside
/// this function.
pub fn transform_log_tau(f: &GradedSeries, m: &GalileanMap) -> Result<GradedSeries> {
    let substituted = galilean_times(f, m)?;
    substituted.add(&quadratic_correction(m, f.trunc, f.family))
}

/// Solution transform: u(t^G(t;q)) + q.
pub fn transform_solution(u: &GradedSeries, m: &GalileanMap) -> Result<GradedSeries> {
    let mut out = galilean_times(u, m)?;
    let (c, qe, ye) = m.qpow(1);
    out.add_term(Monomial::unit().with_qexp(qe).with_yexp(ye), c);
    Ok(out)
}

/// Restriction of a free energy to t_1 = t_2 = ... = 0: for each
/// (g, sorted ks) a polynomial in X = t_0 with a q-order tag,
/// entry[(g,ks)][(xexp, qexp)] = coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorView {
    pub entries: BTreeMap<(u32, Vec<u32>), BTreeMap<(u32, u32), Rat>>,
    /// X-polynomials are exact through degree xmax
    pub xmax: u32,
}

impl CorrelatorView {
    /// Builds a view from a correlator evaluator: the X^m coefficient
    /// of entry (g, ks) is f(g, ks with m extra zeros) / m!.
    /// Every (g <= gmax, 1 <= n <= nmax, indices <= kmax) slot is
    /// materialized, zero polynomials included.
    pub fn from_correlators<F>(gmax: u32, nmax: u32, kmax: u32, xmax: u32, f: F) -> Self
    where
        F: Fn(u32, &[u32]) -> Rat,
    {
        let mut entries = BTreeMap::new();
        for g in 0..=gmax {
            for n in 1..=nmax {
                for s in 0..=(n as u64 * kmax as u64) {
                    for ks in crate::multiset::multisets_with_sum(n, s, kmax) {
                        let mut poly = BTreeMap::new();
                        for x in 0..=xmax {
                            let mut full = ks.clone();
                            for _ in 0..x {
                                full.insert(0, 0);
                            }
                            let v = f(g, &full) / Rat::from_integer(factorial(x as u64));
                            if !v.is_zero() {
                                poly.insert((x, 0u32), v);
                            }
                        }
                        entries.insert((g, ks), poly);
                    }
                }
            }
        }
        CorrelatorView { entries, xmax }
    }

    pub fn get(&self, g: u32, ks: &[u32]) -> Option<&BTreeMap<(u32, u32), Rat>> {
        self.entries.get(&(g, canonical(ks)))
    }
}

/// The induced map on partial correlation functions:
/// new(g,k) = sum_{j<=k} q^{|k|-|j|}/prod (k_i-j_i)! old(g,j)
///          + d_{n,1} q^{k+1} X/(k+1)!          (genus 0)
///          + d_{n,2} q^{k1+k2+1}/((k1+k2+1) k1! k2!)  (genus 0).
/// Formal and constant q only (a y-power q has no slot in the view).
pub fn transform_correlators(
    view: &CorrelatorView,
    m: &GalileanMap,
    qmax: u32,
) -> Result<CorrelatorView> {
    if matches!(m, GalileanMap::YPow(..)) {
        return Err(Error::Config(
            "correlator-view transform supports formal or constant q".into(),
        ));
    }
    let mut entries = BTreeMap::new();
    for ((g, ks), _) in &view.entries {
        let mut poly: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
        let total: u64 = ks.iter().map(|&k| k as u64).sum();
        for j in boxed_tuples(ks) {
            let jtotal: u64 = j.iter().map(|&v| v as u64).sum();
            let drop = (total - jtotal) as u32;
            if m.is_formal() && drop > qmax {
                continue;
            }
            let mut denom = Rat::one();
            for (ki, ji) in ks.iter().zip(j.iter()) {
                denom *= Rat::from_integer(factorial((ki - ji) as u64));
            }
            let old = view
                .entries
                .get(&(*g, canonical(&j)))
                .ok_or_else(|| {
                    Error::Domain(format!("view lacks entry g={g} ks={j:?}"))
                })?;
            let (c, qe, _) = m.qpow(drop);
            let scale = c / denom;
            for (&(x, q0), v) in old {
                let q = q0 + qe;
                if m.is_formal() && q > qmax {
                    continue;
                }
                let e = poly.entry((x, q)).or_insert_with(Rat::zero);
                *e += v * &scale;
                if e.is_zero() {
                    poly.remove(&(x, q));
                }
            }
        }
        if *g == 0 {
            if ks.len() == 1 {
                let k = ks[0];
                if !(m.is_formal() && k + 1 > qmax) {
                    let (c, qe, _) = m.qpow(k + 1);
                    let v = c / Rat::from_integer(factorial(k as u64 + 1));
                    if !v.is_zero() && 1 <= view.xmax {
                        *poly.entry((1, qe)).or_insert_with(Rat::zero) += v;
                    }
                }
            }
            if ks.len() == 2 {
                let (k1, k2) = (ks[0], ks[1]);
                let ord = k1 + k2 + 1;
                if !(m.is_formal() && ord > qmax) {
                    let (c, qe, _) = m.qpow(ord);
                    let v = c
                        / Rat::from_integer(
                            factorial(k1 as u64)
                                * factorial(k2 as u64)
                                * (ord as u64),
                        );
                    if !v.is_zero() {
                        *poly.entry((0, qe)).or_insert_with(Rat::zero) += v;
                    }
                }
            }
            poly.retain(|_, v| !v.is_zero());
        }
        entries.insert((*g, ks.clone()), poly);
    }
    Ok(CorrelatorView { entries, xmax: view.xmax })
}

/// One term of an n-point function: per-slot variable exponents
/// (x_i for the C-form, z_i for the W-form), a power of X = t_0, a
/// power of epsilon, and a q-order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NPointKey {
    pub vexps: Vec<i64>,
    pub xexp: u32,
    pub epsexp: i32,
    pub qexp: u32,
}

/// Sparse n-point function data with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NPointSeries {
    pub n: usize,
    pub terms: BTreeMap<NPointKey, Rat>,
}

impl NPointSeries {
    pub fn new(n: usize) -> Self {
        NPointSeries { n, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: NPointKey, c: Rat) {
        assert_eq!(key.vexps.len(), self.n, "slot count mismatch");
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, key: &NPointKey) -> Rat {
        self.terms.get(key).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// All exponent increment vectors d (len n) with d_i <= cap_i and
/// sum d <= budget.
fn increments(caps: &[u32], budget: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    fn rec(caps: &[u32], budget: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == caps.len() {
            out.push(cur.clone());
            return;
        }
        for d in 0..=caps[pos].min(budget) {
            cur[pos] = d;
            rec(caps, budget - d, pos + 1, cur, out);
        }
        cur[pos] = 0;
    }
    rec(caps, budget, 0, &mut cur, &mut out);
    out
}

/// Exponential-variable n-point transform:
/// C~ = e^{q sum x_i} C + d_{n,1} (X/eps) (e^{q x_1}-1)/x_1
///    + d_{n,2} (e^{q(x_1+x_2)}-1)/(x_1+x_2),
/// the divided differences expanded termwise (never by division).
/// Results are exact for x-degrees <= xdeg and q-orders <= qmax.
pub fn npoint_c_transform(
    c: &NPointSeries,
    m: &GalileanMap,
    qmax: u32,
    xdeg: u32,
) -> Result<NPointSeries> {
    if matches!(m, GalileanMap::YPow(..)) {
        return Err(Error::Config("n-point transforms support formal or constant q".into()));
    }
    let n = c.n;
    let mut out = NPointSeries::new(n);
    for (key, v) in &c.terms {
        let caps: Vec<u32> = key
            .vexps
            .iter()
            .map(|&e| (xdeg as i64 - e).max(0) as u32)
            .collect();
        let budget = if m.is_formal() { qmax.saturating_sub(key.qexp) } else { u32::MAX.min(n as u32 * xdeg) };
        for d in increments(&caps, budget) {
            let total: u32 = d.iter().sum();
            let (qc, qe, _) = m.qpow(total);
            let mut coeff = v * qc;
            for &di in &d {
                coeff /= Rat::from_integer(factorial(di as u64));
            }
            let vexps: Vec<i64> =
                key.vexps.iter().zip(d.iter()).map(|(&e, &di)| e + di as i64).collect();
            out.add_term(
                NPointKey { vexps, xexp: key.xexp, epsexp: key.epsexp, qexp: key.qexp + qe },
                coeff,
            );
        }
    }
    if n == 1 {
        // (X/eps) sum_{k>=0} q^{k+1} x^k / (k+1)!
        for k in 0..=xdeg {
            if m.is_formal() && k + 1 > qmax {
                break;
            }
            let (qc, qe, _) = m.qpow(k + 1);
            let coeff = qc / Rat::from_integer(factorial(k as u64 + 1));
            out.add_term(
                NPointKey { vexps: vec![k as i64], xexp: 1, epsexp: -1, qexp: qe },
                coeff,
            );
        }
    }
    if n == 2 {
        // sum_{a,b>=0} q^{a+b+1} x_1^a x_2^b / ((a+b+1) a! b!)
        for a in 0..=xdeg {
            for b in 0..=xdeg {
                let ord = a + b + 1;
                if m.is_formal() && ord > qmax {
                    continue;
                }
                let (qc, qe, _) = m.qpow(ord);
                let coeff = qc
                    / Rat::from_integer(
                        factorial(a as u64) * factorial(b as u64) * (ord as u64),
                    );
                out.add_term(
                    NPointKey { vexps: vec![a as i64, b as i64], xexp: 0, epsexp: 0, qexp: qe },
                    coeff,
                );
            }
        }
    }
    Ok(out)
}

/// Laurent polynomials in two variables A = z_1^2, B = z_2^2.
type BiLaurent = BTreeMap<(i64, i64), Rat>;

fn bil_add(p: &mut BiLaurent, key: (i64, i64), c: Rat) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(key).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&key);
    }
}

/// Exact division by (A - B), treating the input as a polynomial in A
/// with Laurent-in-B coefficients (negative A-powers must be cleared
/// by the caller). Errors if the remainder is nonzero.
fn bil_divide_a_minus_b(p: &BiLaurent) -> Result<BiLaurent> {
    let mut rest = p.clone();
    let mut quot = BiLaurent::new();
    while let Some((&(a, b), _)) = rest.iter().next_back() {
        // BTreeMap orders by (a, b); next_back has the largest a
        if a == 0 {
            return Err(Error::Internal(format!(
                "Laurent division by (z1^2 - z2^2) leaves remainder at A^{a} B^{b}"
            )));
        }
        let c = rest.get(&(a, b)).unwrap().clone();
        bil_add(&mut quot, (a - 1, b), c.clone());
        bil_add(&mut rest, (a, b), -c.clone());
        bil_add(&mut rest, (a - 1, b + 1), c);
    }
    Ok(quot)
}

/// Exact division by (A - B)^2 for a Laurent polynomial.
fn bil_divide_a_minus_b_squared(p: &BiLaurent) -> Result<BiLaurent> {
    if p.is_empty() {
        return Ok(BiLaurent::new());
    }
    let shift = p.keys().map(|&(a, _)| a).min().unwrap().min(0);
    let mut cleared = BiLaurent::new();
    for (&(a, b), c) in p {
        cleared.insert((a - shift, b), c.clone());
    }
    let once = bil_divide_a_minus_b(&cleared)?;
    let twice = bil_divide_a_minus_b(&once)?;
    let mut out = BiLaurent::new();
    for (&(a, b), c) in &twice {
        out.insert((a + shift, b), c.clone());
    }
    Ok(out)
}

/// q-expansion of (1 - 2q/z^2)^{e/2}: coefficient of q^k is
/// binom(e/2, k) (-2)^k at z-exponent e - 2k.
fn half_power_coeff(e: i64, k: u32) -> Rat {
    let half_e = Rat::new(e.into(), 2.into());
    let mut c = binomial_rat(&half_e, k as u64) * Rat::from_integer(num_bigint::BigInt::from(2).pow(k));
    if k % 2 == 1 {
        c = -c;
    }
    c
}

/// Resolvent-variable n-point transform (formal q only):
/// W~ = W(sqrt(z_1^2-2q), ...) + d_{n,1}(X/eps)(1/sqrt(z_1^2-2q) - 1/z_1)
///    + d_{n,2} (s_1/s_2 + s_2/s_1 - z_1/z_2 - z_2/z_1)/(z_1^2-z_2^2)^2,
/// every sqrt expanded as a binomial q-series and the n = 2 bracket
/// divided exactly by (z_1^2 - z_2^2)^2 order by order in q (a
/// nonzero remainder is an internal error).
pub fn npoint_w_transform(w: &NPointSeries, m: &GalileanMap, qmax: u32) -> Result<NPointSeries> {
    if !m.is_formal() {
        return Err(Error::Config("resolvent-variable transform needs formal q".into()));
    }
    let n = w.n;
    let mut out = NPointSeries::new(n);

    // substitution z_i -> sqrt(z_i^2 - 2q) slot by slot
    for (key, v) in &w.terms {
        let mut partial: Vec<(Vec<i64>, u32, Rat)> =
            vec![(Vec::new(), key.qexp, v.clone())];
        for &e in &key.vexps {
            let mut next = Vec::new();
            for (exps, q0, c0) in &partial {
                for k in 0..=(qmax - q0) {
                    let hc = half_power_coeff(e, k);
                    if hc.is_zero() {
                        continue;
                    }
                    let mut exps2 = exps.clone();
                    exps2.push(e - 2 * k as i64);
                    next.push((exps2, q0 + k, c0 * hc));
                }
            }
            partial = next;
        }
        for (vexps, q, c) in partial {
            out.add_term(
                NPointKey { vexps, xexp: key.xexp, epsexp: key.epsexp, qexp: q },
                c,
            );
        }
    }

    if n == 1 {
        // (X/eps) sum_{j>=1} (2j-1)!! q^j / j! z^{-2j-1}
        for j in 1..=qmax {
            let c = Rat::new(
                odd_double_factorial(2 * j as i64 - 1),
                factorial(j as u64),
            );
            out.add_term(
                NPointKey { vexps: vec![-(2 * j as i64) - 1], xexp: 1, epsexp: -1, qexp: j },
                c,
            );
        }
    }
    if n == 2 {
        // bracket s1/s2 + s2/s1 - z1/z2 - z2/z1 as z1 z2 * P(A, B)
        // with A = z1^2, B = z2^2, per q-order
        for qord in 1..=qmax {
            let mut bracket = BiLaurent::new();
            for (ea, eb) in [(1i64, -1i64), (-1, 1)] {
                for ka in 0..=qord {
                    let kb = qord - ka;
                    let c = half_power_coeff(ea, ka) * half_power_coeff(eb, kb);
                    if c.is_zero() {
                        continue;
                    }
                    // z1^{ea-2ka} z2^{eb-2kb} = z1 z2 A^{(ea-1)/2-ka} B^{(eb-1)/2-kb}
                    bil_add(
                        &mut bracket,
                        ((ea - 1) / 2 - ka as i64, (eb - 1) / 2 - kb as i64),
                        c,
                    );
                }
            }
            let quot = bil_divide_a_minus_b_squared(&bracket)?;
            for (&(a, b), c) in &quot {
                out.add_term(
                    NPointKey {
                        vexps: vec![2 * a + 1, 2 * b + 1],
                        xexp: 0,
                        epsexp: 0,
                        qexp: qord,
                    },
                    c.clone(),
                );
            }
        }
    }
    Ok(out)
}

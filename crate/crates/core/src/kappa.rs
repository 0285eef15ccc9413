//! Mixed psi-kappa intersection numbers through the time-shift route,
//! the Schur-type shift data s^NBI / p_j, and the kappa-route NBI free
//! energy.
//!
//! The shift route: kappa insertions are produced by Taylor-expanding
//! the psi generating function in the shifts t_m -> t_m - p_{m-1}(s)
//! for m >= 2. Each inserted index m consumes m-1 from the bounded
//! excess 3g-3+n-|k|, so the expansion over insertion multisets M
//! (indices >= 2 with sum of (m-1) equal to the excess) is finite:
//!
//!   d^n F / dt_K (shifted, at 0) =
//!     sum_M prod_m (-p_{m-1}(s))^{mult_m} / mult_m! * <tau_{K u M}>_g.
//!
//! Specializing s to s^NBI (so p_j = (-1)^j (2j+1)!!) gives the
//! K-class integrals; keeping s symbolic and reading off an s-monomial
//! gives individual kappa-monomial integrals.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiset::{insertion_multisets, multiplicity_factorial, multisets_with_sum, runs, union};
use crate::rational::{factorial, odd_double_factorial, Rat};
use crate::series::{Family, GradedSeries, Monomial, TruncationSpec};
use crate::table::CorrelatorTable;
use crate::wk::WkEngine;

/// Shift data: s_1..s_J and p_0..p_J linked by
/// e^{-sum s_j z^j} = sum p_j z^j (to order J), p_0 = 1.
#[derive(Clone, Debug)]
pub struct SchurShift {
    /// s_j for j = 1..=J (svals[j-1])
    pub svals: Vec<Rat>,
    /// p_j for j = 0..=J
    pub pvals: Vec<Rat>,
}

/// A psi-kappa integral query over the genus-g moduli space with n
/// marked points: psi exponents `ks` (length n), kappa indices `js`
/// (multiset, each >= 1).
#[derive(Clone, Debug)]
pub struct KappaQuery {
    pub g: u32,
    pub ks: Vec<u32>,
    pub js: Vec<u32>,
}

/// s^NBI shift data of order J: defined by truncated log of
/// h(z) = sum_k (-1)^k (2k+1)!! z^k, i.e. p_j(s^NBI) = (-1)^j(2j+1)!!.
pub fn snbi_coefficients(jord: usize) -> SchurShift {
    assert!(jord >= 1);
    // h coefficients
    let mut p = Vec::with_capacity(jord + 1);
    for k in 0..=jord {
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        p.push(sign * Rat::from_integer(odd_double_factorial(2 * k as i64 + 1)));
    }
    // s_j = -[z^j] log h(z); log(1+w) = sum (-1)^{m+1} w^m / m with
    // w = h - 1 (no constant term), truncated at order J.
    let mut logh = vec![Rat::zero(); jord + 1];
    let mut wpow = vec![Rat::zero(); jord + 1]; // current power of w
    wpow[0] = Rat::one();
    for m in 1..=jord {
        // wpow <- wpow * w
        let mut next = vec![Rat::zero(); jord + 1];
        for a in 0..=jord {
            if wpow[a].is_zero() {
                continue;
            }
            for b in 1..=(jord - a) {
                let hc = &p[b]; // w_b = h_b for b >= 1
                if !hc.is_zero() {
                    let add = &wpow[a] * hc;
                    next[a + b] += add;
                }
            }
        }
        wpow = next;
        let sign = if m % 2 == 1 { Rat::one() } else { -Rat::one() };
        let minv = Rat::new(1.into(), (m as u64).into());
        for a in 0..=jord {
            if !wpow[a].is_zero() {
                logh[a] += sign.clone() * minv.clone() * wpow[a].clone();
            }
        }
    }
    let svals: Vec<Rat> = (1..=jord).map(|j| -logh[j].clone()).collect();

    let shift = SchurShift { svals, pvals: p };
    debug_assert!(shift.consistent());
    shift
}

impl SchurShift {
    pub fn order(&self) -> usize {
        self.svals.len()
    }

    /// Re-expands e^{-sum s_j z^j} and compares with pvals.
    pub fn consistent(&self) -> bool {
        let jord = self.order();
        let expanded = exp_of_minus_s_numeric(&self.svals, jord);
        expanded == self.pvals
    }
}

/// Coefficients of e^{-sum_{i>=1} s_i z^i} to order `jord` for numeric s.
fn exp_of_minus_s_numeric(svals: &[Rat], jord: usize) -> Vec<Rat> {
    // j E_j = sum_i (-i s_i) E_{j-i}
    let mut e = vec![Rat::zero(); jord + 1];
    e[0] = Rat::one();
    for j in 1..=jord {
        let mut acc = Rat::zero();
        for i in 1..=j.min(svals.len()) {
            if !svals[i - 1].is_zero() {
                acc += Rat::from_integer((-(i as i64)).into()) * &svals[i - 1] * &e[j - i];
            }
        }
        e[j] = acc / Rat::from_integer((j as u64).into());
    }
    e
}

/// Sparse polynomial in the symbols s_1..s_J: exponent vector -> coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct SPoly {
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl SPoly {
    fn constant(c: Rat, jord: usize) -> Self {
        let mut p = SPoly::default();
        if !c.is_zero() {
            p.terms.insert(vec![0; jord], c);
        }
        p
    }

    fn add_term(&mut self, m: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add(&self, other: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul(&self, other: &SPoly) -> SPoly {
        let mut out = SPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    fn scale(&self, c: &Rat) -> SPoly {
        let mut out = SPoly::default();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    fn coeff(&self, m: &[u32]) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }
}

/// Symbolic p_j(s) to order jord: coefficients of e^{-sum s_i z^i}.
fn p_symbolic(jord: usize) -> Vec<SPoly> {
    let mut e = vec![SPoly::constant(Rat::one(), jord)];
    for j in 1..=jord {
        // j E_j = sum_{i=1..j} (-i) s_i E_{j-i}
        let mut acc = SPoly::default();
        for i in 1..=j {
            let mut svar = SPoly::default();
            let mut exps = vec![0u32; jord];
            exps[i - 1] = 1;
            svar.add_term(exps, Rat::from_integer((-(i as i64)).into()));
            acc = acc.add(&svar.mul(&e[j - i]));
        }
        e.push(acc.scale(&Rat::new(1.into(), (j as u64).into())));
    }
    e
}

#[derive(Clone)]
pub struct KappaEngine {
    wk: WkEngine,
}

impl KappaEngine {
    pub fn new(table: Arc<CorrelatorTable>) -> Self {
        KappaEngine { wk: WkEngine::new(table) }
    }

    /// int_{M_{g,n}} kappa_{j_1}...kappa_{j_s} psi^{k_1}...psi^{k_n}.
    /// Zero on dimension mismatch |k| + |j| != 3g-3+n.
    pub fn kappa_psi_integral(&self, q: &KappaQuery) -> Rat {
        let n = q.ks.len() as i64;
        let ksum: i64 = q.ks.iter().map(|&k| k as i64).sum();
        let jsum: i64 = q.js.iter().map(|&j| j as i64).sum();
        let dim = 3 * q.g as i64 - 3 + n;
        if ksum + jsum != dim || dim < ksum {
            return Rat::zero();
        }
        let excess = (dim - ksum) as u64; // = jsum
        let jord = q.js.iter().copied().max().unwrap_or(1) as usize;
        let ps = p_symbolic(jord.max(excess as usize));
        let jord = ps.len() - 1;

        let mut total = SPoly::default();
        for m_ins in insertion_multisets(excess) {
            let corr = self.wk.correlator(q.g, &union(&q.ks, &m_ins));
            if corr.is_zero() {
                continue;
            }
            let mut weight = SPoly::constant(corr, jord);
            for (m, mult) in runs(&m_ins) {
                // (-p_{m-1}(s))^{mult} / mult!
                let neg_p = ps[(m - 1) as usize].scale(&-Rat::one());
                let mut pw = SPoly::constant(Rat::one(), jord);
                for _ in 0..mult {
                    pw = pw.mul(&neg_p);
                }
                weight = weight
                    .mul(&pw)
                    .scale(&Rat::new(1.into(), factorial(mult as u64)));
            }
            total = total.add(&weight);
        }

        // coefficient of prod s_j^{mult_j}, times prod mult_j!
        let mut exps = vec![0u32; jord];
        let mut symfac = Rat::one();
        for (j, mult) in runs(&q.js) {
            exps[(j - 1) as usize] = mult;
            symfac *= Rat::from_integer(factorial(mult as u64));
        }
        total.coeff(&exps) * symfac
    }

    /// int_{M_{g,n}} K_{3g-3+n-|k|} psi^{k_1}...psi^{k_n}: the finite
    /// evaluation of the shifted psi generating function at
    /// p_j = (-1)^j (2j+1)!!. Zero when |k| > 3g-3+n.
    pub fn kn_psi_integral(&self, g: u32, ks: &[u32]) -> Result<Rat> {
        let n = ks.len() as i64;
        if 2 * g as i64 - 2 + n <= 0 {
            return Err(Error::Domain(format!("unstable (g,n) = ({g},{n})")));
        }
        let excess = 3 * g as i64 - 3 + n - ks.iter().map(|&k| k as i64).sum::<i64>();
        if excess < 0 {
            return Ok(Rat::zero());
        }
        let mut total = Rat::zero();
        for m_ins in insertion_multisets(excess as u64) {
            let corr = self.wk.correlator(g, &union(ks, &m_ins));
            if corr.is_zero() {
                continue;
            }
            let mut weight = Rat::one();
            for (m, mult) in runs(&m_ins) {
                // -p_{m-1}(s^NBI) = (-1)^m (2m-1)!!
                let base = Rat::from_integer(odd_double_factorial(2 * m as i64 - 1));
                let base = if m % 2 == 0 { base } else { -base };
                for _ in 0..mult {
                    weight *= &base;
                }
                weight /= Rat::from_integer(factorial(mult as u64));
            }
            total += weight * corr;
        }
        Ok(total)
    }

    /// NBI free energy via the kappa route (family R): the genus-g
    /// coefficient of prod r^{e} is (2y)^{|k|+1-g} kn(g,ks) / prod e!.
    /// Constant (n = 0) parts are omitted (they belong to the ledger).
    pub fn nbi_free_energy(&self, trunc: TruncationSpec) -> GradedSeries {
        let mut out = GradedSeries::zero(trunc, Family::R);
        let cap = trunc.index_cap();
        for g in 0..=trunc.gmax {
            for n in 1..=trunc.nmax {
                if 2 * g as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                let smax = 3 * g as i64 - 3 + n as i64;
                if smax < 0 {
                    continue;
                }
                for s in 0..=smax as u64 {
                    for ks in multisets_with_sum(n, s, cap) {
                        let v = self.kn_psi_integral(g, &ks).expect("stable by construction");
                        if v.is_zero() {
                            continue;
                        }
                        let yexp = s as i64 + 1 - g as i64;
                        let two_pow = if yexp >= 0 {
                            Rat::from_integer(num_bigint::BigInt::from(2).pow(yexp as u32))
                        } else {
                            Rat::new(1.into(), num_bigint::BigInt::from(2).pow((-yexp) as u32))
                        };
                        let c = two_pow * v / Rat::from_integer(multiplicity_factorial(&ks));
                        out.add_term(Monomial::from_indices(&ks).with_genus(g).with_yexp(yexp), c);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn engine() -> KappaEngine {
        KappaEngine::new(Arc::new(CorrelatorTable::new()))
    }

    #[test]
    fn snbi_values() {
        let sh = snbi_coefficients(5);
        assert!(sh.consistent());
        assert_eq!(sh.svals[0], rat_int(3));
        assert_eq!(sh.pvals[2], rat_int(15));
        // renormalized magnitudes |j s_j|/3 (A226270); the sign
        // prefactor that makes them positive is (-1)^{j-1}, pinned by
        // the K_1 integral below.
        let renorm: Vec<Rat> = (1..=5)
            .map(|j| {
                let sign = if (j - 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
                sign * rat_int(j as i64) * sh.svals[j - 1].clone() / rat_int(3)
            })
            .collect();
        assert_eq!(
            renorm,
            vec![rat_int(1), rat_int(7), rat_int(69), rat_int(843), rat_int(12081)]
        );
    }

    #[test]
    fn kappa_psi_small_cases() {
        let e = engine();
        // int_{M_{1,1}} kappa_1 = 1/24 (off-by-one guard for the shift)
        assert_eq!(
            e.kappa_psi_integral(&KappaQuery { g: 1, ks: vec![0], js: vec![1] }),
            rat(1, 24)
        );
        // int_{M_{0,4}} kappa_1 = 1
        assert_eq!(
            e.kappa_psi_integral(&KappaQuery { g: 0, ks: vec![0, 0, 0, 0], js: vec![1] }),
            rat_int(1)
        );
        // pure psi reduces to the WK correlator
        assert_eq!(
            e.kappa_psi_integral(&KappaQuery { g: 1, ks: vec![1], js: vec![] }),
            rat(1, 24)
        );
        // dimension mismatch
        assert_eq!(
            e.kappa_psi_integral(&KappaQuery { g: 1, ks: vec![0], js: vec![2] }),
            Rat::zero()
        );
    }

    #[test]
    fn kn_small_cases() {
        let e = engine();
        assert_eq!(e.kn_psi_integral(0, &[0, 0, 0]).unwrap(), rat_int(1));
        assert_eq!(e.kn_psi_integral(1, &[0]).unwrap(), rat(1, 8));
        assert_eq!(e.kn_psi_integral(2, &[0]).unwrap(), Rat::zero()); // |k| < g-1
        assert_eq!(e.kn_psi_integral(1, &[2]).unwrap(), Rat::zero()); // |k| > 3g-3+n
        assert!(e.kn_psi_integral(0, &[0]).is_err()); // unstable
    }

    #[test]
    fn bernoulli_zero_point() {
        // int_{M_{2,0}} K_3 = B_4/8 = -1/240
        let e = engine();
        assert_eq!(e.kn_psi_integral(2, &[]).unwrap(), rat(-1, 240));
        assert_eq!(
            e.kn_psi_integral(2, &[]).unwrap(),
            crate::rational::bernoulli(4) / rat_int(8)
        );
    }

    #[test]
    fn kappa_route_matches_kn() {
        // K_m is the degree-m part of exp(sum s_j^NBI kappa_j):
        // summing kappa_psi_integral over kappa-multisets weighted by
        // prod s_j^{mult}/mult! must reproduce kn_psi_integral.
        let e = engine();
        let sh = snbi_coefficients(8);
        for (g, ks) in [
            (1u32, vec![0u32]),
            (1, vec![0, 1]),
            (2, vec![1]),
            (2, vec![0, 0]),
            (2, vec![2, 1]),
        ] {
            let n = ks.len() as i64;
            let m = 3 * g as i64 - 3 + n - ks.iter().map(|&k| k as i64).sum::<i64>();
            assert!(m >= 0);
            // kappa-multisets js with |js| = m
            let mut acc = Rat::zero();
            for js in kappa_partitions(m as u64) {
                let mut w = Rat::one();
                for (j, mult) in runs(&js) {
                    for _ in 0..mult {
                        w *= &sh.svals[(j - 1) as usize];
                    }
                    w /= Rat::from_integer(factorial(mult as u64));
                }
                acc += w * e.kappa_psi_integral(&KappaQuery { g, ks: ks.clone(), js });
            }
            assert_eq!(acc, e.kn_psi_integral(g, &ks).unwrap(), "g={g} ks={ks:?}");
        }
    }

    /// Multisets of indices >= 1 with given sum (partitions).
    fn kappa_partitions(total: u64) -> Vec<Vec<u32>> {
        fn rec(total: u64, minval: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if total == 0 {
                out.push(cur.clone());
                return;
            }
            let mut j = minval;
            while j as u64 <= total {
                cur.push(j);
                rec(total - j as u64, j, cur, out);
                cur.pop();
                j += 1;
            }
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        rec(total, 1, &mut cur, &mut out);
        out
    }

    #[test]
    fn nbi_free_energy_low_terms() {
        let e = engine();
        let f = e.nbi_free_energy(TruncationSpec::new(1, 3, 2, 0, 0));
        use crate::series::Monomial;
        // r_0 at genus 0: unstable -> 0
        assert_eq!(f.coeff(&Monomial::var(0)), Rat::zero());
        // r_0 at genus 1: 1/8 (yexp 0)
        assert_eq!(f.coeff(&Monomial::var(0).with_genus(1)), rat(1, 8));
        // r_0^3 at genus 0: (1/3!) (2y) -> y/3
        assert_eq!(f.coeff(&Monomial::from_indices(&[0, 0, 0]).with_yexp(1)), rat(1, 3));
    }
}

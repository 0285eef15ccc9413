//! Witten-Kontsevich intersection numbers by Virasoro recursion, the
//! truncated WK free energy / solution series, and the genus-0/1
//! closed-form evaluators (Euler-Lagrange fixed point and the
//! (1/24) log dv/dt_0 formula).
//!
//! The recursion unpacks L_k Z = 0 (k >= -1) at t = 0. With
//! b(k,i) = (2k+2i+1)!!/(2^{k+1}(2i-1)!!) and
//! a(k,i,j) = (2i+1)!!(2j+1)!!/2^{k+1} (i+j = k-1):
//!
//!   b(k,1) <tau_{k+1} tau_K>_g =
//!       sum_{v in K} b(k,v) <tau_{v+k} tau_{K\v}>_g        (skip v=0 at k=-1)
//!     + 1/2 sum_{i+j=k-1} a(k,i,j) [ <tau_i tau_j tau_K>_{g-1}
//!         + sum_{I+J=K, g1+g2=g} <tau_i tau_I>_{g1} <tau_j tau_J>_{g2} ]
//!     + (1/16) [k=0, K empty, g=1]  +  [k=-1, K={0,0}, g=0].
//!
//! For a target <tau_D>_g we peel k = max(D) - 1 (the string direction
//! k = -1 when max(D) = 0); every term on the right is strictly
//! smaller in the order (index sum, n), so the recursion terminates.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ledger::{ConstantLedger, LedgerTerm};
use crate::multiset::{
    canonical, insert_one, multiplicity_factorial, multisets_with_sum, remove_one, runs, splits,
    sum, union,
};
use crate::rational::{rat, virasoro_a, virasoro_b, Rat};
use crate::series::{Family, GradedSeries, Monomial, TruncationSpec};
use crate::table::{CorrelatorKey, CorrelatorTable, Provenance};

#[derive(Clone)]
pub struct WkEngine {
    table: Arc<CorrelatorTable>,
}

impl WkEngine {
    pub fn new(table: Arc<CorrelatorTable>) -> Self {
        WkEngine { table }
    }

    /// <tau_{k_1} ... tau_{k_n}>_g. Zero off the dimension constraint
    /// |k| = 3g-3+n and for unstable (g,n).
    pub fn correlator(&self, g: u32, ks: &[u32]) -> Rat {
        let ks = canonical(ks);
        let n = ks.len() as i64;
        if 2 * g as i64 - 2 + n <= 0 {
            return Rat::zero();
        }
        if sum(&ks) as i64 != 3 * g as i64 - 3 + n {
            return Rat::zero();
        }
        let key = CorrelatorKey { g, ks: ks.clone() };
        self.table
            .get_or_compute(Provenance::Wk, key, || self.compute(g, &ks))
    }

    fn compute(&self, g: u32, ks: &[u32]) -> Rat {
        let d = *ks.last().unwrap();
        let k: i64 = d as i64 - 1;
        let rest = remove_one(ks, d);

        let mut rhs = Rat::zero();

        // linear terms: sum_v b(k,v) <tau_{v+k} tau_{K\v}>
        for (v, mult) in runs(&rest) {
            if k == -1 && v == 0 {
                continue;
            }
            let target = insert_one(&remove_one(&rest, v), (v as i64 + k) as u32);
            let term = self.correlator(g, &target);
            if !term.is_zero() {
                rhs += virasoro_b(k, v) * term * rat(mult as i64, 1);
            }
        }

        // quadratic terms (k >= 1 only)
        if k >= 1 {
            let half = rat(1, 2);
            for i in 0..=(k - 1) as u32 {
                let j = ((k - 1) as u32) - i;
                let a = virasoro_a(k, i, j);
                let mut inner = Rat::zero();
                if g >= 1 {
                    inner += self.correlator(g - 1, &union(&rest, &[i, j]));
                }
                for (ip, jp, w) in splits(&rest) {
                    for g1 in 0..=g {
                        let f1 = self.correlator(g1, &insert_one(&ip, i));
                        if f1.is_zero() {
                            continue;
                        }
                        let f2 = self.correlator(g - g1, &insert_one(&jp, j));
                        if f2.is_zero() {
                            continue;
                        }
                        inner += f1 * f2 * Rat::from_integer(w.clone());
                    }
                }
                rhs += half.clone() * a * inner;
            }
        }

        // anomalies of L_0 and L_{-1}
        if k == 0 && rest.is_empty() && g == 1 {
            rhs += rat(1, 16);
        }
        if k == -1 && rest == [0, 0] && g == 0 {
            rhs += Rat::one();
        }

        rhs / virasoro_b(k, 1)
    }

    /// Truncated WK free energy: coefficient of prod t_{k}^{e_k} at
    /// genus grade g (reading eps^{2g-2}) is <tau_K>_g / prod e_k!.
    /// Targets fan out in parallel; the shared memo table makes the
    /// result independent of scheduling.
    pub fn free_energy(&self, trunc: TruncationSpec) -> GradedSeries {
        let cap = trunc.index_cap();
        let mut targets: Vec<(u32, Vec<u32>)> = Vec::new();
        for g in 0..=trunc.gmax {
            for n in 1..=trunc.nmax {
                if 2 * g as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                let s = 3 * g as i64 - 3 + n as i64;
                if s < 0 {
                    continue;
                }
                for ks in multisets_with_sum(n, s as u64, cap) {
                    targets.push((g, ks));
                }
            }
        }
        let computed: Vec<(u32, Vec<u32>, Rat)> = targets
            .into_par_iter()
            .map(|(g, ks)| {
                let v = self.correlator(g, &ks);
                (g, ks, v)
            })
            .collect();
        let mut out = GradedSeries::zero(trunc, Family::T);
        for (g, ks, v) in computed {
            if v.is_zero() {
                continue;
            }
            let c = v / Rat::from_integer(multiplicity_factorial(&ks));
            out.add_term(Monomial::from_indices(&ks).with_genus(g), c);
        }
        out
    }

    /// The WK solution u = eps^2 d^2F/dt_0^2 as a series whose genus
    /// grade g reads eps^{2g} (multiplicative grading): coefficient of
    /// prod t^{e} at grade g is <tau_0 tau_0 tau_K>_g / prod e!.
    pub fn solution(&self, trunc: TruncationSpec) -> GradedSeries {
        let mut out = GradedSeries::zero(trunc, Family::T);
        let cap = trunc.index_cap();
        for g in 0..=trunc.gmax {
            for n in 0..=trunc.nmax {
                let s = 3 * g as i64 - 3 + (n as i64 + 2);
                if s < 0 {
                    continue;
                }
                for ks in multisets_with_sum(n, s as u64, cap) {
                    let v = self.correlator(g, &union(&ks, &[0, 0]));
                    if v.is_zero() {
                        continue;
                    }
                    let c = v / Rat::from_integer(multiplicity_factorial(&ks));
                    out.add_term(Monomial::from_indices(&ks).with_genus(g), c);
                }
            }
        }
        out
    }
}

/// Fixed point of the genus-0 Euler-Lagrange equation
/// v = sum_k a_k v^k / k! for an assignment k -> a_k of time series
/// with no constant term. Iteration stabilizes because each pass
/// settles one more total degree.
pub fn solve_el(assignment: &BTreeMap<u32, GradedSeries>) -> Result<GradedSeries> {
    let (&first_idx, sample) = assignment
        .iter()
        .next()
        .ok_or_else(|| Error::Domain("empty assignment".into()))?;
    let _ = first_idx;
    let trunc = sample.trunc;
    let family = sample.family;
    for a in assignment.values() {
        if !a.coeff(&Monomial::unit()).is_zero() {
            return Err(Error::Domain("assignment series must have no constant term".into()));
        }
    }
    let mut v = GradedSeries::zero(trunc, family);
    for _ in 0..=(trunc.nmax + 2) {
        // powers of the current iterate
        let kmax = assignment.keys().copied().max().unwrap_or(0);
        let mut powers: Vec<GradedSeries> = Vec::with_capacity(kmax as usize + 1);
        powers.push(GradedSeries::one(trunc, family));
        for _ in 1..=kmax {
            let next = powers.last().unwrap().mul(&v)?;
            powers.push(next);
        }
        let mut vnew = GradedSeries::zero(trunc, family);
        for (&k, a) in assignment {
            let kfac = Rat::from_integer(crate::rational::factorial(k as u64));
            vnew = vnew.add(&a.mul(&powers[k as usize])?.scale(&(Rat::one() / kfac)))?;
        }
        if vnew == v {
            return Ok(v);
        }
        v = vnew;
    }
    Err(Error::Internal("Euler-Lagrange iteration failed to stabilize".into()))
}

/// Genus-0 free energy from the Euler-Lagrange solution:
/// F_0 = 1/2 sum_{k,l} (a_k - d_{k,1})(a_l - d_{l,1})
///       v^{k+l+1} / (k! l! (k+l+1)).
pub fn genus0_free_energy(
    v: &GradedSeries,
    assignment: &BTreeMap<u32, GradedSeries>,
) -> Result<GradedSeries> {
    let trunc = v.trunc;
    let family = v.family;
    let top = assignment.keys().copied().max().unwrap_or(0).max(1);
    let mut powers: Vec<GradedSeries> = vec![GradedSeries::one(trunc, family)];
    for _ in 1..=(2 * top + 1) {
        let next = powers.last().unwrap().mul(v)?;
        powers.push(next);
    }
    let shifted = |k: u32| -> GradedSeries {
        let base = assignment
            .get(&k)
            .cloned()
            .unwrap_or_else(|| GradedSeries::zero(trunc, family));
        if k == 1 {
            base.sub(&GradedSeries::one(trunc, family)).unwrap()
        } else {
            base
        }
    };
    let mut out = GradedSeries::zero(trunc, family);
    for k in 0..=top {
        let sk = shifted(k);
        if sk.is_zero() {
            continue;
        }
        for l in 0..=top {
            let sl = shifted(l);
            if sl.is_zero() {
                continue;
            }
            let denom = Rat::from_integer(
                crate::rational::factorial(k as u64)
                    * crate::rational::factorial(l as u64)
                    * (k as u64 + l as u64 + 1),
            );
            let term = sk
                .mul(&sl)?
                .mul(&powers[(k + l + 1) as usize])?
                .scale(&(rat(1, 2) / denom));
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

/// Genus-1 free energy F_1 = (1/24) log dv/dt_0. The constant factor
/// c of dv/dt_0 = c (1 + w) goes to the ledger as (1/24) log c.
pub fn genus1_free_energy(v: &GradedSeries) -> Result<(GradedSeries, ConstantLedger)> {
    let d0v = v.derive(0)?;
    let c = d0v.coeff(&Monomial::unit());
    if c.is_zero() {
        return Err(Error::Domain("dv/dt_0 has zero constant part".into()));
    }
    let normalized = d0v.scale(&(Rat::one() / c.clone()));
    let f1 = normalized.log()?.scale(&rat(1, 24));
    let mut ledger = ConstantLedger::new();
    if !c.is_one() {
        ledger.push(1, LedgerTerm::LogRational { coeff: rat(1, 24), arg: c });
    }
    Ok((f1, ledger))
}

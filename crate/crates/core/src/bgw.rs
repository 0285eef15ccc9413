//! Correlators of the generalized Brezin-Gross-Witten (cBGW) and
//! non-abelian Born-Infeld (NBI) tau-functions by Virasoro recursion.
//!
//! Both tau-functions satisfy L_m Z = 0 (m >= 0 for cBGW, m >= -1 for
//! NBI) with the same structure coefficients b(m,i) and a(m,i,j) as
//! the Witten-Kontsevich constraints, but different dilaton shifts:
//!
//!   cBGW:  times enter as t_i - d_{i,0}; every coefficient of
//!          prod t_{k_i} at genus g is x^{2(|k|-g+1)} c_g(k) with
//!          c_g(k) a plain rational, so the recursion runs on the
//!          scalars c_g(k) directly. Peeling m = min(k) against the
//!          unknown -b(m,0) c_g(k) term descends in (|k|, n).
//!
//!   NBI:   times enter as r_i + (2i-1)!!(-1/(2y))^i y^{-0} - d_{i,0}
//!          with y = x^2/4; the shift tail makes intermediate values
//!          genuine Laurent polynomials in y, so the recursion runs on
//!          `YPoly` values. Peeling the unknown from the i = 1 shift
//!          term (coefficient -1/(2y) times b(k,1)) descends in the
//!          order (2g-2+n, excess) where excess = 3g-3+n-|k|. Every
//!          finished correlator collapses to a single power
//!          N_g(k) (2y)^{|k|+1-g}; only the scalar N_g(k) is memoized,
//!          and a multi-term result aborts as an internal
//!          inconsistency.
//!
//! Imposed vanishing: both recursions return 0 for n = 0; NBI
//! additionally for unstable (g,n) and for |k| > 3g-3+n. The support
//! bound |k| >= g-1 of cBGW is *not* imposed; it comes out of the
//! recursion and is pinned by tests.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::multiset::{
    canonical, insert_one, multiplicity_factorial, multisets_with_sum, remove_one, runs, splits,
    sum, union,
};
use crate::rational::{int_pow, odd_double_factorial, rat, rat_int, virasoro_a, virasoro_b, Rat};
use crate::series::{Family, GradedSeries, Monomial, TruncationSpec};
use crate::table::{CorrelatorKey, CorrelatorTable, Provenance};
use crate::ypoly::YPoly;

/// Full cBGW coefficient `value * (x^2)^yexp` (x^2 = 4y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BgwCoefficient {
    pub value: Rat,
    pub yexp: i64,
}

/// Full NBI coefficient `value * (x^2/2)^yexp` (x^2/2 = 2y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NbiCoefficient {
    pub value: Rat,
    pub yexp: i64,
}

/// Imposed-zero predicate of the NBI correlator, decidable without
/// recursion: empty index set, unstable (g,n), or |k| > 3g-3+n.
/// Filtering split terms through this *before* recursing is what
/// keeps the recursion well-founded: a split factor that is only
/// multiplied by zero may sit higher in the recursion order.
fn nbi_imposed_zero(g: u32, n: usize, s: u64) -> bool {
    let n = n as i64;
    n == 0 || 2 * g as i64 - 2 + n <= 0 || s as i64 > 3 * g as i64 - 3 + n
}

/// Shift-tail coefficient of the NBI times: r_i picks up
/// (2i-1)!! (-1/2)^i y^{-i} for i >= 1 (the i = 0 shift cancels
/// against the dilaton direction).
fn nbi_shift(i: u32) -> Rat {
    let mag = Rat::new(odd_double_factorial(2 * i as i64 - 1), num_bigint::BigInt::from(2).pow(i));
    if i % 2 == 0 {
        mag
    } else {
        -mag
    }
}

#[derive(Clone)]
pub struct BgwEngine {
    table: Arc<CorrelatorTable>,
}

impl BgwEngine {
    pub fn new(table: Arc<CorrelatorTable>) -> Self {
        BgwEngine { table }
    }

    /// Scalar part c_g(k) of the cBGW correlator
    /// x^{2(|k|-g+1)} c_g(k). Zero for n = 0; otherwise no dimension
    /// constraint (all index multisets contribute).
    pub fn cbgw_correlator(&self, g: u32, ks: &[u32]) -> Rat {
        let ks = canonical(ks);
        if ks.is_empty() {
            return Rat::zero();
        }
        let key = CorrelatorKey { g, ks: ks.clone() };
        self.table
            .get_or_compute(Provenance::Cbgw, key, || self.cbgw_compute(g, &ks))
    }

    /// cBGW correlator with its x-power: value * (x^2)^{|k|-g+1}.
    pub fn cbgw_coefficient(&self, g: u32, ks: &[u32]) -> BgwCoefficient {
        BgwCoefficient {
            value: self.cbgw_correlator(g, ks),
            yexp: sum(ks) as i64 - g as i64 + 1,
        }
    }

    fn cbgw_compute(&self, g: u32, ks: &[u32]) -> Rat {
        let m = ks[0] as i64;
        let rest = remove_one(ks, ks[0]);

        let mut rhs = Rat::zero();

        // linear terms: sum_v b(m,v) c_g((K\v) u {v+m})
        for (v, mult) in runs(&rest) {
            let target = insert_one(&remove_one(&rest, v), (v as i64 + m) as u32);
            let term = self.cbgw_correlator(g, &target);
            if !term.is_zero() {
                rhs += virasoro_b(m, v) * term * rat_int(mult as i64);
            }
        }

        // quadratic terms (m >= 1 only)
        if m >= 1 {
            let half = rat(1, 2);
            for i in 0..=(m - 1) as u32 {
                let j = ((m - 1) as u32) - i;
                let a = virasoro_a(m, i, j);
                let mut inner = Rat::zero();
                if g >= 1 {
                    inner += self.cbgw_correlator(g - 1, &union(&rest, &[i, j]));
                }
                for (ip, jp, w) in splits(&rest) {
                    for g1 in 0..=g {
                        let f1 = self.cbgw_correlator(g1, &insert_one(&ip, i));
                        if f1.is_zero() {
                            continue;
                        }
                        let f2 = self.cbgw_correlator(g - g1, &insert_one(&jp, j));
                        if f2.is_zero() {
                            continue;
                        }
                        inner += f1 * f2 * Rat::from_integer(w.clone());
                    }
                }
                rhs += half.clone() * a * inner;
            }
        }

        // anomalies of L_0: 1/16 at genus 1, 1/8 at genus 0
        if m == 0 && rest.is_empty() {
            if g == 1 {
                rhs += rat(1, 16);
            }
            if g == 0 {
                rhs += rat(1, 8);
            }
        }

        rhs / virasoro_b(m, 0)
    }

    /// Scalar part N_g(k) of the NBI correlator
    /// N_g(k) (2y)^{|k|+1-g}. Zero for n = 0, unstable (g,n), and
    /// |k| > 3g-3+n.
    pub fn nbi_scalar(&self, g: u32, ks: &[u32]) -> Rat {
        let ks = canonical(ks);
        let n = ks.len() as i64;
        if n == 0 || 2 * g as i64 - 2 + n <= 0 {
            return Rat::zero();
        }
        let excess = 3 * g as i64 - 3 + n - sum(&ks) as i64;
        if excess < 0 {
            return Rat::zero();
        }
        let key = CorrelatorKey { g, ks: ks.clone() };
        self.table
            .get_or_compute(Provenance::Nbi, key, || self.nbi_compute(g, &ks, excess))
    }

    /// NBI correlator with its power of x^2/2 = 2y.
    pub fn nbi_correlator(&self, g: u32, ks: &[u32]) -> NbiCoefficient {
        NbiCoefficient {
            value: self.nbi_scalar(g, ks),
            yexp: sum(ks) as i64 + 1 - g as i64,
        }
    }

    /// Full NBI correlator as a Laurent polynomial in y.
    fn nbi_value(&self, g: u32, ks: &[u32]) -> YPoly {
        let n = self.nbi_scalar(g, ks);
        if n.is_zero() {
            return YPoly::zero();
        }
        let e = sum(ks) as i64 + 1 - g as i64;
        YPoly::monomial(n * int_pow(2, e), e)
    }

    fn nbi_compute(&self, g: u32, ks: &[u32], excess: i64) -> Rat {
        let mut rhs = YPoly::zero();
        let value: YPoly;
        if ks[0] == 0 {
            // string direction L_{-1}; unknown from the i = 1 shift
            // term with coefficient -1/(2y), and b(-1,i) = 1 for all i
            let rest = remove_one(ks, 0);
            for (v, mult) in runs(&rest) {
                if v == 0 {
                    continue;
                }
                let target = insert_one(&remove_one(&rest, v), v - 1);
                rhs = rhs.add(&self.nbi_value(g, &target).scale(&rat_int(mult as i64)));
            }
            for i in 2..=(excess + 1).max(1) as u32 {
                let target = insert_one(&rest, i - 1);
                let term = self.nbi_value(g, &target);
                rhs = rhs.add(&term.shift(&nbi_shift(i), -(i as i64)));
            }
            if g == 0 && rest == [0, 0] {
                rhs = rhs.add(&YPoly::constant(Rat::one()));
            }
            value = rhs.shift(&rat_int(2), 1);
        } else {
            let d = *ks.last().unwrap();
            let k = d as i64 - 1; // >= 0
            let rest = remove_one(ks, d);
            for (v, mult) in runs(&rest) {
                let target = insert_one(&remove_one(&rest, v), (v as i64 + k) as u32);
                let term = self.nbi_value(g, &target);
                rhs = rhs.add(&term.scale(&(virasoro_b(k, v) * rat_int(mult as i64))));
            }
            for i in 2..=(excess + 1).max(1) as u32 {
                let target = insert_one(&rest, (i as i64 + k) as u32);
                let term = self.nbi_value(g, &target);
                rhs = rhs.add(&term.shift(&(nbi_shift(i) * virasoro_b(k, i)), -(i as i64)));
            }
            if k >= 1 {
                let half = rat(1, 2);
                for i in 0..=(k - 1) as u32 {
                    let j = ((k - 1) as u32) - i;
                    let a = virasoro_a(k, i, j);
                    let mut inner = YPoly::zero();
                    if g >= 1 {
                        inner = inner.add(&self.nbi_value(g - 1, &union(&rest, &[i, j])));
                    }
                    for (ip, jp, w) in splits(&rest) {
                        for g1 in 0..=g {
                            if nbi_imposed_zero(g1, ip.len() + 1, sum(&ip) + i as u64)
                                || nbi_imposed_zero(g - g1, jp.len() + 1, sum(&jp) + j as u64)
                            {
                                continue;
                            }
                            let f1 = self.nbi_value(g1, &insert_one(&ip, i));
                            if f1.is_zero() {
                                continue;
                            }
                            let f2 = self.nbi_value(g - g1, &insert_one(&jp, j));
                            if f2.is_zero() {
                                continue;
                            }
                            inner = inner.add(&f1.mul(&f2).scale(&Rat::from_integer(w.clone())));
                        }
                    }
                    rhs = rhs.add(&inner.scale(&(half.clone() * a)));
                }
            }
            if k == 0 && rest.is_empty() && g == 1 {
                rhs = rhs.add(&YPoly::constant(rat(1, 16)));
            }
            value = rhs.shift(&(rat_int(2) / virasoro_b(k, 1)), 1);
        }

        if value.is_zero() {
            return Rat::zero();
        }
        let e = sum(ks) as i64 + 1 - g as i64;
        match value.single_term() {
            Some((c, ee)) if ee == e => c / int_pow(2, e),
            _ => panic!(
                "internal consistency: NBI correlator g={g} ks={ks:?} is not a single \
                 power of 2y: {}",
                value.render()
            ),
        }
    }

    /// Truncated cBGW free energy (family T, y-graded): the genus-g
    /// coefficient of prod t^{e} is (4y)^{|k|-g+1} c_g(k) / prod e!.
    pub fn cbgw_free_energy(&self, trunc: TruncationSpec) -> GradedSeries {
        let mut out = GradedSeries::zero(trunc, Family::T);
        let cap = trunc.index_cap();
        for g in 0..=trunc.gmax {
            for n in 1..=trunc.nmax {
                for s in 0..=(n as u64 * cap as u64) {
                    for ks in multisets_with_sum(n, s, cap) {
                        let v = self.cbgw_correlator(g, &ks);
                        if v.is_zero() {
                            continue;
                        }
                        let yexp = s as i64 - g as i64 + 1;
                        let c = int_pow(4, yexp) * v
                            / Rat::from_integer(multiplicity_factorial(&ks));
                        out.add_term(Monomial::from_indices(&ks).with_genus(g).with_yexp(yexp), c);
                    }
                }
            }
        }
        out
    }

    /// Truncated NBI free energy via the Virasoro recursion (family R,
    /// y-graded): the genus-g coefficient of prod r^{e} is
    /// (2y)^{|k|+1-g} N_g(k) / prod e!. Same convention as the kappa
    /// route, so the two series are comparable term by term.
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
                        let v = self.nbi_scalar(g, &ks);
                        if v.is_zero() {
                            continue;
                        }
                        let yexp = s as i64 + 1 - g as i64;
                        let c = int_pow(2, yexp) * v
                            / Rat::from_integer(multiplicity_factorial(&ks));
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
    use crate::kappa::KappaEngine;
    use crate::rational::factorial;

    fn engine() -> BgwEngine {
        BgwEngine::new(Arc::new(CorrelatorTable::new()))
    }

    #[test]
    fn cbgw_base_values() {
        let e = engine();
        assert_eq!(e.cbgw_correlator(0, &[]), Rat::zero());
        assert_eq!(e.cbgw_correlator(0, &[0]), rat(1, 4));
        assert_eq!(e.cbgw_correlator(1, &[0]), rat(1, 8));
        assert_eq!(e.cbgw_correlator(1, &[0, 0, 0]), rat(1, 4));
        assert_eq!(e.cbgw_correlator(1, &[1]), rat(5, 96));
        let c = e.cbgw_coefficient(1, &[1]);
        assert_eq!(c.yexp, 1);
    }

    #[test]
    fn cbgw_log_towers() {
        // c_0(0^n) = (n-1)!/4 and c_1(0^n) = (n-1)!/8: the t_0-only
        // restrictions are -(x^2/4) log(1-t_0) and -(1/8) log(1-t_0).
        let e = engine();
        for n in 1..=6u32 {
            let ks = vec![0u32; n as usize];
            let f = Rat::from_integer(factorial(n as u64 - 1));
            assert_eq!(e.cbgw_correlator(0, &ks), f.clone() / rat_int(4), "g=0 n={n}");
            assert_eq!(e.cbgw_correlator(1, &ks), f / rat_int(8), "g=1 n={n}");
        }
    }

    #[test]
    fn cbgw_support_bound_discovered() {
        // c_g vanishes for |k| < g-1; nothing in the recursion imposes
        // this, it has to come out of the arithmetic.
        let e = engine();
        assert_eq!(e.cbgw_correlator(2, &[0]), Rat::zero());
        assert_eq!(e.cbgw_correlator(2, &[0, 0]), Rat::zero());
        assert_eq!(e.cbgw_correlator(3, &[1]), Rat::zero());
        assert_eq!(e.cbgw_correlator(3, &[0, 1]), Rat::zero());
        assert!(!e.cbgw_correlator(2, &[1]).is_zero());
    }

    #[test]
    fn nbi_base_values() {
        let e = engine();
        assert_eq!(e.nbi_scalar(0, &[0, 0, 0]), Rat::one());
        assert_eq!(e.nbi_scalar(1, &[0]), rat(1, 8));
        assert_eq!(e.nbi_scalar(1, &[1]), rat(1, 24));
        // imposed zeros
        assert_eq!(e.nbi_scalar(0, &[0]), Rat::zero()); // unstable
        assert_eq!(e.nbi_scalar(0, &[1, 1, 1]), Rat::zero()); // excess < 0
        assert_eq!(e.nbi_scalar(0, &[]), Rat::zero());
        // discovered zero: excess is 4, the value still vanishes
        assert_eq!(e.nbi_scalar(2, &[0]), Rat::zero());
        let c = e.nbi_correlator(1, &[1]);
        assert_eq!((c.value, c.yexp), (rat(1, 24), 1));
    }

    #[test]
    fn nbi_matches_kappa_route() {
        // The recursion and the kappa-shift evaluation are logically
        // independent; they must agree coefficient by coefficient.
        let table = Arc::new(CorrelatorTable::new());
        let e = BgwEngine::new(table.clone());
        let k = KappaEngine::new(table);
        for g in 0..=2u32 {
            for n in 1..=3u32 {
                if 2 * g as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                let smax = 3 * g as i64 - 3 + n as i64;
                for s in 0..=smax as u64 {
                    for ks in multisets_with_sum(n, s, 4) {
                        assert_eq!(
                            e.nbi_scalar(g, &ks),
                            k.kn_psi_integral(g, &ks).unwrap(),
                            "g={g} ks={ks:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nbi_free_energy_routes_agree() {
        let table = Arc::new(CorrelatorTable::new());
        let e = BgwEngine::new(table.clone());
        let k = KappaEngine::new(table);
        let trunc = TruncationSpec::new(2, 3, 3, 0, 0);
        assert_eq!(e.nbi_free_energy(trunc), k.nbi_free_energy(trunc));
    }

    #[test]
    fn cbgw_free_energy_low_terms() {
        let e = engine();
        let f = e.cbgw_free_energy(TruncationSpec::new(1, 3, 2, 0, 0));
        // (x^2/4) t_0 at genus 0: stored as 4^1 * 1/4 = 1 at yexp 1
        assert_eq!(f.coeff(&Monomial::var(0).with_yexp(1)), Rat::one());
        // (1/8) t_0 at genus 1 (yexp 0)
        assert_eq!(f.coeff(&Monomial::var(0).with_genus(1)), rat(1, 8));
        // (1/8) t_0^2 at genus 1: c_1(0,0)/2! = 1/16
        assert_eq!(
            f.coeff(&Monomial::from_indices(&[0, 0]).with_genus(1)),
            rat(1, 16)
        );
    }
}

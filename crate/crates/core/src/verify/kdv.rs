//! The KdV equation as a windowed residual check:
//!
//!   du/dt_1 = u du/dt_0 + (eps^2/12) d^3u/dt_0^3,
//!
//! where the eps^2 factor is a genus-grade shift by +1 (solutions are
//! graded by eps^{2g}).
//!
//! Exactness window: with the input exact inside its truncation
//! (gmax, nmax, kmax, qmax), each t_0-derivative costs one unit of
//! guaranteed degree, so the residual is asserted only for time-degree
//! <= nmax - 3; genus, index and q-order windows are inherited
//! unchanged (the grade-shifted term at genus G draws on the source at
//! G - 1, which is always available for G <= gmax).


use crate::error::{Error, Result};
use crate::rational::rat;
use crate::report::VerificationReport;
use crate::series::{GradedSeries, Monomial};

pub fn check_kdv(u: &GradedSeries) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let trunc = u.trunc;
    if trunc.nmax < 3 {
        return Err(Error::Config(format!(
            "KdV residual needs degree depth >= 3, got nmax={}",
            trunc.nmax
        )));
    }
    if trunc.index_cap() < 1 {
        return Err(Error::Config("KdV residual needs the t_1 flow (index cap >= 1)".into()));
    }

    let du1 = u.derive(1)?;
    let du0 = u.derive(0)?;
    let d3 = du0.derive(0)?.derive(0)?;
    let dispersion = d3.mul_monomial(&Monomial::unit().with_genus(1), &rat(1, 12));
    let residual = du1.sub(&u.mul(&du0)?)?.sub(&dispersion)?;

    let mut rep = VerificationReport::new(
        "kdv",
        format!(
            "gmax={} nmax={} kmax={} qmax={}",
            trunc.gmax, trunc.nmax, trunc.kmax, trunc.qmax
        ),
    );
    rep.header.push(format!(
        "window: time-degree <= {}, genus <= {}, indices <= {}, q-order <= {}",
        trunc.nmax - 3,
        trunc.gmax,
        trunc.kmax,
        trunc.qmax
    ));

    // bucket the in-window residual by (genus, q-order); every bucket
    // must be identically zero
    let mut buckets: std::collections::BTreeMap<(u32, u32), GradedSeries> =
        std::collections::BTreeMap::new();
    for g in 0..=trunc.gmax {
        for q in 0..=trunc.qmax {
            buckets.insert((g, q), GradedSeries::zero(trunc, u.family));
        }
    }
    for (m, c) in residual.iter() {
        let in_window = m.degree() <= trunc.nmax - 3
            && m.genus <= trunc.gmax
            && m.qexp <= trunc.qmax
            && m.max_index().map_or(true, |k| k <= trunc.kmax);
        if in_window {
            buckets
                .get_mut(&(m.genus, m.qexp))
                .expect("bucket materialized above")
                .add_term(m.clone(), c.clone());
        }
    }
    for ((g, q), slice) in buckets {
        rep.check(
            format!("genus={g} q={q}"),
            slice.to_canonical_string(),
            "0".into(),
        );
    }

    rep.wall_ms = start.elapsed().as_millis();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rat;
    use num_traits::{One, Zero};
    use crate::galilean::{transform_solution, GalileanMap};
    use crate::series::{Family, TruncationSpec};
    use crate::table::CorrelatorTable;
    use crate::wk::WkEngine;
    use std::sync::Arc;

    fn wk() -> WkEngine {
        WkEngine::new(Arc::new(CorrelatorTable::new()))
    }

    #[test]
    fn wk_solution_satisfies_kdv() {
        let u = wk().solution(TruncationSpec::new(2, 6, 2, 0, 0));
        let rep = check_kdv(&u).unwrap();
        assert!(rep.all_ok(), "first failure: {:?}", rep.first_failure());
        assert_eq!(rep.records.len(), 3);
    }

    #[test]
    fn transformed_solution_satisfies_kdv() {
        let trunc = TruncationSpec::new(1, 5, 2, 2, 2);
        let u = wk().solution(trunc);
        let ut = transform_solution(&u, &GalileanMap::Formal).unwrap();
        let rep = check_kdv(&ut).unwrap();
        assert!(rep.all_ok(), "first failure: {:?}", rep.first_failure());
        // q = 0 transformed solution gives the identical report
        let u0 = transform_solution(&u, &GalileanMap::Const(Rat::zero())).unwrap();
        let rep0 = check_kdv(&u0).unwrap();
        let base = check_kdv(&u).unwrap();
        assert_eq!(rep0.render_lines(), base.render_lines());
    }

    #[test]
    fn residual_detects_wrong_solution() {
        // v = t_0/(1-t_1) solves the dispersionless flow; spoiling the
        // t_0 t_1 coefficient must surface as a nonzero bucket
        let trunc = TruncationSpec::new(0, 5, 1, 0, 0);
        let mut v = GradedSeries::zero(trunc, Family::T);
        for e in 0..=4u32 {
            let mut ks = vec![0u32];
            ks.extend(std::iter::repeat(1).take(e as usize));
            v.add_term(Monomial::from_indices(&ks), Rat::one());
        }
        let rep = check_kdv(&v).unwrap();
        assert!(rep.all_ok(), "first failure: {:?}", rep.first_failure());

        let mut bad = v.clone();
        bad.add_term(Monomial::from_indices(&[0, 1]), rat(1, 7));
        let rep = check_kdv(&bad).unwrap();
        assert!(!rep.all_ok());
    }

    #[test]
    fn depth_guard() {
        let u = wk().solution(TruncationSpec::new(0, 2, 1, 0, 0));
        assert!(check_kdv(&u).is_err());
        let shallow = GradedSeries::zero(TruncationSpec::new(0, 4, 0, 0, 0), Family::T);
        assert!(check_kdv(&shallow).is_err());
    }
}

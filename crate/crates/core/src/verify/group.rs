//! Group-theoretic properties of the Galilean symmetry itself:
//! infinitesimal generators, the one-parameter group law of the
//! quadratic correction, invertibility, and consistency of the
//! correlator-view transform with the series-level transform.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::galilean::{
    galilean_times, quadratic_correction, transform_correlators, transform_log_tau,
    transform_solution, CorrelatorView, GalileanMap,
};
use crate::multiset::multiplicity_factorial;
use crate::rational::{fmt_rat, rat, Rat};
use crate::report::VerificationReport;
use crate::series::{GradedSeries, Monomial, TruncationSpec};
use crate::table::CorrelatorTable;
use crate::wk::WkEngine;

/// d/dq as the first-order flow: on free energies
/// dF~/dq = sum_k t_{k+1} dF~/dt_k + t_0^2/2, on solutions
/// du~/dq = sum_k t_{k+1} du~/dt_k + 1. Asserted per coefficient
/// inside (gmax, nmax, kmax, qmax-1): the q-derivative of a series
/// exact to qmax is exact one order lower.
fn generator_residual(s: &GradedSeries, free_energy: bool) -> Result<GradedSeries> {
    let trunc = s.trunc;
    let mut rhs = GradedSeries::zero(trunc, s.family);
    for k in 0..trunc.index_cap() {
        let d = s.derive(k)?;
        rhs = rhs.add(&d.mul_monomial(&Monomial::var(k + 1), &Rat::one()))?;
    }
    if free_energy {
        rhs.add_term(Monomial::from_indices(&[0, 0]), rat(1, 2));
    } else {
        rhs.add_term(Monomial::unit(), Rat::one());
    }
    let window = TruncationSpec::new(trunc.gmax, trunc.nmax, trunc.kmax, trunc.qmax - 1, 0);
    Ok(s.derive_q().sub(&rhs)?.restrict(window))
}

pub fn check_galilean_group(
    table: Arc<CorrelatorTable>,
    trunc: TruncationSpec,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if trunc.qmax == 0 || trunc.headroom < trunc.qmax {
        return Err(crate::error::Error::Config(
            "group checks need qmax >= 1 and headroom >= qmax".into(),
        ));
    }
    let wk = WkEngine::new(table.clone());
    let mut rep = VerificationReport::new(
        "galilean-group",
        format!(
            "gmax={} nmax={} kmax={} qmax={}",
            trunc.gmax, trunc.nmax, trunc.kmax, trunc.qmax
        ),
    );
    rep.header
        .push("generator residuals asserted to q-order qmax - 1".into());

    let f = wk.free_energy(trunc);
    let u = wk.solution(trunc);
    let ft = transform_log_tau(&f, &GalileanMap::Formal)?;
    let ut = transform_solution(&u, &GalileanMap::Formal)?;

    // (a) infinitesimal generators
    let r = generator_residual(&ft, true)?;
    rep.check("generator free-energy", r.to_canonical_string(), "0".into());
    let r = generator_residual(&ut, false)?;
    rep.check("generator solution", r.to_canonical_string(), "0".into());

    // (b) group law of the quadratic correction:
    // g(t; q1+q2) = g(t^G(t; q2); q1) + g(t; q2), at exact rational
    // parameters
    let q1 = rat(1, 2);
    let q2 = rat(1, 3);
    let window = TruncationSpec::new(trunc.gmax, trunc.nmax, trunc.kmax, trunc.qmax, 0);
    let lhs = quadratic_correction(&GalileanMap::Const(q1.clone() + q2.clone()), trunc, f.family);
    let composed = galilean_times(
        &quadratic_correction(&GalileanMap::Const(q1.clone()), trunc, f.family),
        &GalileanMap::Const(q2.clone()),
    )?
    .add(&quadratic_correction(&GalileanMap::Const(q2.clone()), trunc, f.family))?;
    rep.check(
        "group-law correction",
        lhs.restrict(window).to_canonical_string(),
        composed.restrict(window).to_canonical_string(),
    );

    // additivity of the time substitution itself
    let twice = galilean_times(&galilean_times(&f, &GalileanMap::Const(q2.clone()))?,
        &GalileanMap::Const(q1.clone()))?;
    let once = galilean_times(&f, &GalileanMap::Const(q1.clone() + q2.clone()))?;
    rep.check(
        "group-law substitution",
        twice.restrict(window).to_canonical_string(),
        once.restrict(window).to_canonical_string(),
    );

    // invertibility of the full log-tau transform
    let round = transform_log_tau(
        &transform_log_tau(&f, &GalileanMap::Const(q1.clone()))?,
        &GalileanMap::Const(-q1),
    )?;
    rep.check(
        "invertibility",
        round.restrict(window).to_canonical_string(),
        f.restrict(window).to_canonical_string(),
    );

    // (c) correlator-view transform vs the series-level transform:
    // for entries without zero indices, the transformed view's
    // (X^m, q^c) coefficient times prod mult!(ks) is the coefficient
    // of q^c t_0^m prod t_{ks} in the transformed free energy
    let view = CorrelatorView::from_correlators(
        trunc.gmax,
        trunc.nmax.saturating_sub(1).max(1),
        trunc.index_cap(),
        trunc.nmax.saturating_sub(1),
        |g, ks| wk.correlator(g, ks),
    );
    let tview = transform_correlators(&view, &GalileanMap::Formal, trunc.qmax)?;
    let mut compared = 0usize;
    for ((g, ks), poly) in &tview.entries {
        if ks.iter().any(|&k| k == 0) || ks.iter().any(|&k| k > trunc.kmax) {
            continue;
        }
        let symfac = Rat::from_integer(multiplicity_factorial(ks));
        for x in 0..=(trunc.nmax.saturating_sub(ks.len() as u32)) {
            for q in 0..=trunc.qmax {
                let view_val = poly.get(&(x, q)).cloned().unwrap_or_else(Rat::zero);
                let mut full = vec![0u32; x as usize];
                full.extend_from_slice(ks);
                full.sort_unstable();
                let series_val = ft.coeff(
                    &Monomial::from_indices(&full).with_genus(*g).with_qexp(q),
                ) * &symfac;
                rep.check(
                    format!("view g={g} ks={ks:?} x={x} q={q}"),
                    fmt_rat(&view_val),
                    fmt_rat(&series_val),
                );
                compared += 1;
            }
        }
    }
    debug_assert!(compared > 0);

    rep.wall_ms = start.elapsed().as_millis();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_suite_passes() {
        let rep = check_galilean_group(
            Arc::new(CorrelatorTable::new()),
            TruncationSpec::new(1, 4, 2, 2, 2),
        )
        .unwrap();
        assert!(rep.all_ok(), "first failure: {:?}", rep.first_failure());
        assert!(rep.records.len() > 10);
    }
}

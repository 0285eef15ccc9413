//! kdvtau: exact-arithmetic coefficient engine for KdV tau-functions
//! (Witten-Kontsevich, generalized Brezin-Gross-Witten, non-abelian
//! Born-Infeld), the Galilean symmetry acting on them, and machine
//! verification of the correspondence identities between them.

pub mod error;
pub mod rational;
pub mod multiset;
pub mod series;
pub mod ypoly;
pub mod ledger;
pub mod table;
pub mod wk;
pub mod kappa;
pub mod bgw;
pub mod galilean;
pub mod report;
pub mod verify;

pub use bgw::{BgwCoefficient, BgwEngine, NbiCoefficient};
pub use error::{Error, Result};
pub use galilean::{
    galilean_times, npoint_c_transform, npoint_w_transform, quadratic_correction,
    transform_correlators, transform_log_tau, transform_solution, CorrelatorView, GalileanMap,
    NPointKey, NPointSeries,
};
pub use kappa::{KappaEngine, KappaQuery, SchurShift};
pub use report::{CheckRecord, VerificationReport};
pub use ledger::{ConstantLedger, LedgerTerm};
pub use rational::{fmt_rat, parse_rat, rat, rat_int, Rat};
pub use series::{Family, GradedSeries, Monomial, TruncationSpec};
pub use table::{CorrelatorKey, CorrelatorTable, Provenance};
pub use verify::{
    check_cor41, check_cor42, check_galilean_group, check_hirota, check_initial_values,
    check_kdv, check_theorem18, HirotaWindow,
};
pub use wk::WkEngine;
pub use ypoly::YPoly;

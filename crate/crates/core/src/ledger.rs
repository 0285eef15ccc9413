//! Constant ledger: time-independent constant parts of free energies,
//! kept outside the series ring because they can involve logarithms
//! (including the opaque log(-x/2)-type symbols) that have no place in
//! Q[y, y^-1][[t; q]].

use std::collections::BTreeMap;

use crate::rational::{fmt_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerTerm {
    /// plain rational constant
    Rational(Rat),
    /// coeff * log(arg) with a positive rational argument
    LogRational { coeff: Rat, arg: Rat },
    /// coeff * log(-x/2), kept opaque
    LogNegHalfX { coeff: Rat },
}

impl LedgerTerm {
    pub fn render(&self) -> String {
        match self {
            LedgerTerm::Rational(r) => fmt_rat(r),
            LedgerTerm::LogRational { coeff, arg } => {
                format!("{}*log({})", fmt_rat(coeff), fmt_rat(arg))
            }
            LedgerTerm::LogNegHalfX { coeff } => format!("{}*log(-x/2)", fmt_rat(coeff)),
        }
    }
}

/// Per-genus constant terms of one free energy.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstantLedger {
    entries: BTreeMap<u32, Vec<LedgerTerm>>,
}

impl ConstantLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, genus: u32, term: LedgerTerm) {
        self.entries.entry(genus).or_default().push(term);
    }

    pub fn get(&self, genus: u32) -> &[LedgerTerm] {
        self.entries.get(&genus).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

//! Sparse truncated series in the graded ring Q[y, y^-1][[t_0..t_K; q]].
//!
//! A `Monomial` carries four grades besides its time exponents:
//! - `genus`: an additive grade standing in for a power of epsilon
//!   (for free energies read epsilon^{2g-2}, for solutions epsilon^{2g});
//! - `yexp`: a Laurent exponent of y = x^2/4;
//! - `qexp`: the order in the formal Galilean parameter q.
//!
//! Invariants:
//! - stored time exponents are strictly positive;
//! - no term maps to a zero coefficient;
//! - every stored monomial respects the `TruncationSpec`; terms that
//!   would exceed a bound are dropped deterministically on insertion.
//!
//! All operations are pure; values are immutable after construction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};

/// Which family of time variables a series lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// t-family (WK / cBGW times)
    T,
    /// r-family (NBI times)
    R,
}

impl Family {
    pub fn var_name(self) -> &'static str {
        match self {
            Family::T => "t",
            Family::R => "r",
        }
    }
}

/// Truncation bounds. Coefficients of monomials inside the bounds are
/// exact provided the inputs were; everything outside is dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    /// max genus grade
    pub gmax: u32,
    /// max total time-degree
    pub nmax: u32,
    /// max exposed time index (guarantees are stated for indices <= kmax)
    pub kmax: u32,
    /// max q-order
    pub qmax: u32,
    /// extra internal index budget above kmax
    pub headroom: u32,
}

impl TruncationSpec {
    pub fn new(gmax: u32, nmax: u32, kmax: u32, qmax: u32, headroom: u32) -> Self {
        Self { gmax, nmax, kmax, qmax, headroom }
    }

    /// Highest time index a stored monomial may use.
    pub fn index_cap(&self) -> u32 {
        self.kmax + self.headroom
    }
}

/// One term of a `GradedSeries`. Ordering is the canonical term
/// order: (genus, yexp, qexp, lexicographic time exponents).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub genus: u32,
    pub yexp: i64,
    pub qexp: u32,
    /// time index -> exponent (> 0)
    pub texp: BTreeMap<u32, u32>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial { genus: 0, yexp: 0, qexp: 0, texp: BTreeMap::new() }
    }

    pub fn var(index: u32) -> Self {
        let mut texp = BTreeMap::new();
        texp.insert(index, 1);
        Monomial { genus: 0, yexp: 0, qexp: 0, texp }
    }

    /// Monomial from a sorted multiset of time indices.
    pub fn from_indices(ks: &[u32]) -> Self {
        let mut texp: BTreeMap<u32, u32> = BTreeMap::new();
        for &k in ks {
            *texp.entry(k).or_insert(0) += 1;
        }
        Monomial { genus: 0, yexp: 0, qexp: 0, texp }
    }

    pub fn with_genus(mut self, g: u32) -> Self {
        self.genus = g;
        self
    }

    pub fn with_yexp(mut self, e: i64) -> Self {
        self.yexp = e;
        self
    }

    pub fn with_qexp(mut self, q: u32) -> Self {
        self.qexp = q;
        self
    }

    /// Total time-degree.
    pub fn degree(&self) -> u32 {
        self.texp.values().sum()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.texp.keys().next_back().copied()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut texp = self.texp.clone();
        for (&k, &e) in &other.texp {
            *texp.entry(k).or_insert(0) += e;
        }
        Monomial {
            genus: self.genus + other.genus,
            yexp: self.yexp + other.yexp,
            qexp: self.qexp + other.qexp,
            texp,
        }
    }

    fn render(&self, family: Family) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.genus > 0 {
            parts.push(format!("eps[{}]", self.genus));
        }
        if self.yexp != 0 {
            parts.push(if self.yexp == 1 { "y".into() } else { format!("y^{}", self.yexp) });
        }
        if self.qexp > 0 {
            parts.push(if self.qexp == 1 { "q".into() } else { format!("q^{}", self.qexp) });
        }
        for (&k, &e) in &self.texp {
            let v = family.var_name();
            parts.push(if e == 1 { format!("{v}{k}") } else { format!("{v}{k}^{e}") });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    terms: BTreeMap<Monomial, Rat>,
    pub trunc: TruncationSpec,
    pub family: Family,
}

impl GradedSeries {
    pub fn zero(trunc: TruncationSpec, family: Family) -> Self {
        GradedSeries { terms: BTreeMap::new(), trunc, family }
    }

    pub fn one(trunc: TruncationSpec, family: Family) -> Self {
        let mut s = Self::zero(trunc, family);
        s.add_term(Monomial::unit(), Rat::one());
        s
    }

    /// The generator t_index (or r_index).
    pub fn var(index: u32, trunc: TruncationSpec, family: Family) -> Self {
        let mut s = Self::zero(trunc, family);
        s.add_term(Monomial::var(index), Rat::one());
        s
    }

    pub fn constant(c: Rat, trunc: TruncationSpec, family: Family) -> Self {
        let mut s = Self::zero(trunc, family);
        s.add_term(Monomial::unit(), c);
        s
    }

    /// Whether a monomial fits inside the truncation bounds.
    pub fn admits(&self, m: &Monomial) -> bool {
        m.genus <= self.trunc.gmax
            && m.degree() <= self.trunc.nmax
            && m.qexp <= self.trunc.qmax
            && m.max_index().map_or(true, |k| k <= self.trunc.index_cap())
    }

    /// Adds `c` to the coefficient of `m`, dropping the term if it
    /// falls outside the truncation or cancels to zero.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() || !self.admits(&m) {
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

    fn check_compat(&self, other: &GradedSeries) -> Result<()> {
        if self.family != other.family {
            return Err(Error::Config("family mismatch".into()));
        }
        if self.trunc != other.trunc {
            return Err(Error::Config("truncation mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedSeries {
        let mut out = GradedSeries::zero(self.trunc, self.family);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> GradedSeries {
        let mut out = GradedSeries::zero(self.trunc, self.family);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// Multiply by a bare monomial (grade shift).
    pub fn mul_monomial(&self, shift: &Monomial, c: &Rat) -> GradedSeries {
        let mut out = GradedSeries::zero(self.trunc, self.family);
        for (m, v) in &self.terms {
            out.add_term(m.mul(shift), v * c);
        }
        out
    }

    pub fn mul(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_compat(other)?;
        let mut out = GradedSeries::zero(self.trunc, self.family);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to t_index / r_index.
    pub fn derive(&self, index: u32) -> Result<GradedSeries> {
        if index > self.trunc.index_cap() {
            return Err(Error::IndexRange { index, cap: self.trunc.index_cap() });
        }
        let mut out = GradedSeries::zero(self.trunc, self.family);
        for (m, c) in &self.terms {
            if let Some(&e) = m.texp.get(&index) {
                let mut nm = m.clone();
                if e == 1 {
                    nm.texp.remove(&index);
                } else {
                    nm.texp.insert(index, e - 1);
                }
                out.add_term(nm, c * Rat::from_integer(e.into()));
            }
        }
        Ok(out)
    }

    /// Formal derivative with respect to the Galilean parameter q.
    /// Exact only to q-order qmax - 1 (the qmax coefficient of the
    /// source has no successor to draw from).
    pub fn derive_q(&self) -> GradedSeries {
        let mut out = GradedSeries::zero(self.trunc, self.family);
        for (m, c) in &self.terms {
            if m.qexp > 0 {
                let mut nm = m.clone();
                nm.qexp -= 1;
                out.add_term(nm, c * Rat::from_integer(m.qexp.into()));
            }
        }
        out
    }

    /// Coefficient of a monomial (0 when absent).
    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// True when the monomial is invertible-"constant" for the
    /// truncation grading, i.e. nothing about it is nilpotent.
    fn is_unit_grade(m: &Monomial) -> bool {
        m.degree() == 0 && m.qexp == 0 && m.genus == 0
    }

    /// Truncated exponential. Requires every term to be nilpotent
    /// under the truncation grading (no constant-grade term).
    pub fn exp(&self) -> Result<GradedSeries> {
        for (m, _) in &self.terms {
            if Self::is_unit_grade(m) {
                return Err(Error::Domain("exp of a series with a constant-grade term".into()));
            }
        }
        let bound = self.trunc.nmax + self.trunc.qmax + self.trunc.gmax + 1;
        let mut out = GradedSeries::one(self.trunc, self.family);
        let mut power = GradedSeries::one(self.trunc, self.family);
        for m in 1..=bound {
            power = power.mul(self)?.scale(&Rat::new(1.into(), m.into()));
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Truncated logarithm. Requires constant part exactly 1.
    pub fn log(&self) -> Result<GradedSeries> {
        let unit = Monomial::unit();
        if !self.coeff(&unit).is_one() {
            return Err(Error::Domain("log requires constant term 1".into()));
        }
        let mut w = self.clone();
        w.add_term(unit, -Rat::one());
        for (m, _) in &w.terms {
            if Self::is_unit_grade(m) {
                return Err(Error::Domain("log of a series with a non-unit constant-grade term".into()));
            }
        }
        let bound = self.trunc.nmax + self.trunc.qmax + self.trunc.gmax + 1;
        let mut out = GradedSeries::zero(self.trunc, self.family);
        let mut power = GradedSeries::one(self.trunc, self.family);
        for m in 1..=bound {
            power = power.mul(&w)?;
            if power.is_zero() {
                break;
            }
            let sign = if m % 2 == 1 { Rat::one() } else { -Rat::one() };
            out = out.add(&power.scale(&(sign / Rat::from_integer(m.into()))))?;
        }
        Ok(out)
    }

    /// Re-truncates to a (typically tighter) spec, dropping terms.
    pub fn restrict(&self, trunc: TruncationSpec) -> GradedSeries {
        let mut out = GradedSeries::zero(trunc, self.family);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Deterministic canonical rendering, suitable for golden files.
    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "{}*{}", fmt_rat(c), m.render(self.family));
        }
        out
    }
}

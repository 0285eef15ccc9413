//! Laurent polynomials in y = x^2/4 with exact rational coefficients.
//!
//! Used as the value space of the NBI Virasoro recursion (whose shift
//! coefficients carry transient negative y-powers) and of the
//! free-energy coefficient identities, where both sides are finite
//! Laurent polynomials in y.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::{fmt_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct YPoly {
    terms: BTreeMap<i64, Rat>,
}

impl YPoly {
    pub fn zero() -> Self {
        YPoly::default()
    }

    /// c * y^e
    pub fn monomial(c: Rat, e: i64) -> Self {
        let mut p = YPoly::zero();
        p.add_term(e, c);
        p
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn add_term(&mut self, e: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &YPoly) -> YPoly {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &YPoly) -> YPoly {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &YPoly) -> YPoly {
        let mut out = YPoly::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> YPoly {
        let mut out = YPoly::zero();
        if c.is_zero() {
            return out;
        }
        for (&e, v) in &self.terms {
            out.terms.insert(e, v * c);
        }
        out
    }

    /// Multiply by c * y^e.
    pub fn shift(&self, c: &Rat, e: i64) -> YPoly {
        let mut out = YPoly::zero();
        if c.is_zero() {
            return out;
        }
        for (&ea, v) in &self.terms {
            out.terms.insert(ea + e, v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Some((c, e)) when the polynomial is a single term c*y^e.
    pub fn single_term(&self) -> Option<(Rat, i64)> {
        if self.terms.len() == 1 {
            let (&e, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), e))
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(&e, c)| match e {
                0 => fmt_rat(c),
                1 => format!("{}*y", fmt_rat(c)),
                _ => format!("{}*y^{}", fmt_rat(c), e),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn arithmetic_and_cancellation() {
        let a = YPoly::monomial(rat(1, 2), -1);
        let b = YPoly::monomial(rat(-1, 2), -1);
        assert!(a.add(&b).is_zero());
        let p = a.mul(&YPoly::monomial(rat_int(4), 3));
        assert_eq!(p, YPoly::monomial(rat_int(2), 2));
        assert_eq!(p.single_term(), Some((rat_int(2), 2)));
        let q = p.add(&YPoly::constant(rat_int(1)));
        assert_eq!(q.single_term(), None);
        assert_eq!(q.render(), "1 + 2*y^2");
    }
}

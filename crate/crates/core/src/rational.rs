//! Exact rational scalars plus the small combinatorial helpers
//! (factorials, double factorials, binomials, Bernoulli numbers)
//! used by the coefficient recursions.
//!
//! `Rat` is the only scalar type in the crate: there is no floating
//! point anywhere. `num_rational::BigRational` keeps fractions
//! normalized (gcd 1, positive denominator) by construction.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rat = num_rational::BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// n/d as a normalized rational. Panics on d = 0 (programming error).
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: "p/q", or just "p" when the denominator is 1.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse "p" or "p/q". Returns None on malformed input or zero
/// denominator; the result is always normalized.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Double factorial of an odd integer m >= -1, with (-1)!! = 1.
pub fn odd_double_factorial(m: i64) -> BigInt {
    assert!(m >= -1 && m % 2 != 0, "odd_double_factorial needs odd m >= -1, got {m}");
    let mut acc = BigInt::one();
    let mut i = 1i64;
    while i <= m {
        acc *= i;
        i += 2;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Binomial coefficient with an arbitrary rational top:
/// C(a, k) = a(a-1)...(a-k+1)/k!.
pub fn binomial_rat(a: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= a - rat_int(i as i64);
    }
    acc / Rat::from_integer(factorial(k))
}

/// base^e as a rational, with negative exponents allowed.
pub fn int_pow(base: u32, e: i64) -> Rat {
    assert!(base != 0 || e >= 0, "negative power of zero");
    let p = BigInt::from(base).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

/// Bernoulli number B_n in the convention with B_1 = -1/2
/// (so B_2 = 1/6, B_4 = -1/30, B_6 = 1/42).
pub fn bernoulli(n: u32) -> Rat {
    let mut b: Vec<Rat> = Vec::with_capacity(n as usize + 1);
    for m in 0..=n as u64 {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rat::from_integer(binomial(m + 1, j as u64)) * bj;
        }
        b.push(-acc / Rat::from_integer(BigInt::from(m + 1)));
    }
    b.pop().unwrap()
}

/// Virasoro linear coefficient (2k+2i+1)!! / (2^{k+1} (2i-1)!!), k >= -1.
pub fn virasoro_b(k: i64, i: u32) -> Rat {
    let num = odd_double_factorial(2 * k + 2 * i as i64 + 1);
    let den = odd_double_factorial(2 * i as i64 - 1) * BigInt::from(2).pow((k + 1) as u32);
    Rat::new(num, den)
}

/// Virasoro quadratic coefficient (2i+1)!!(2j+1)!! / 2^{k+1}, i+j = k-1.
pub fn virasoro_a(k: i64, i: u32, j: u32) -> Rat {
    let num = odd_double_factorial(2 * i as i64 + 1) * odd_double_factorial(2 * j as i64 + 1);
    Rat::new(num, BigInt::from(2).pow((k + 1) as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        assert_eq!(odd_double_factorial(-1), BigInt::from(1));
        assert_eq!(odd_double_factorial(1), BigInt::from(1));
        assert_eq!(odd_double_factorial(5), BigInt::from(15));
        assert_eq!(odd_double_factorial(7), BigInt::from(105));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(3), Rat::zero());
    }

    #[test]
    fn rational_round_trip() {
        let r = rat(-6, 4);
        assert_eq!(fmt_rat(&r), "-3/2");
        assert_eq!(parse_rat("-3/2"), Some(r));
        assert_eq!(parse_rat("7"), Some(rat_int(7)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x/2"), None);
        // parsing normalizes
        assert_eq!(parse_rat("2/4"), Some(rat(1, 2)));
    }

    #[test]
    fn virasoro_coefficients() {
        // b(0,1) = 3!!/2 = 3/2; b(3,1) = 9!!/16 = 945/16; b(-1,i) = 1
        assert_eq!(virasoro_b(0, 1), rat(3, 2));
        assert_eq!(virasoro_b(3, 1), rat(945, 16));
        assert_eq!(virasoro_b(-1, 2), rat_int(1));
        assert_eq!(virasoro_a(1, 0, 0), rat(1, 4));
        assert_eq!(virasoro_a(3, 1, 1), rat(9, 16));
    }

    #[test]
    fn rational_binomial() {
        // C(-1/2, 2) = (-1/2)(-3/2)/2 = 3/8
        assert_eq!(binomial_rat(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }
}

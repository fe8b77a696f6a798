//! Exact rationals and the few number-theoretic helpers the rest of the
//! crate needs (rational n-th roots, square classes).

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact n-th root of a rational, if it exists in ℚ. For even `n` the
/// positive root is returned.
pub fn nth_root_exact(value: &Rational, n: u32) -> Option<Rational> {
    assert!(n > 0, "root degree must be positive");
    if n == 1 || value.is_zero() {
        return Some(value.clone());
    }
    if value.is_negative() && n.is_multiple_of(2) {
        return None;
    }
    let num = int_nth_root_exact(value.numer(), n)?;
    let den = int_nth_root_exact(value.denom(), n)?;
    Some(Rational::new(num, den))
}

fn int_nth_root_exact(v: &BigInt, n: u32) -> Option<BigInt> {
    let r = v.abs().nth_root(n);
    let r = if v.is_negative() { -r } else { r };
    if num_traits::pow(r.clone(), n as usize) == *v {
        Some(r)
    } else {
        None
    }
}

const SMALL_PRIME_BOUND: u64 = 1 << 21;

/// Squarefree part (with sign) of a nonzero integer below 2⁶³ in absolute
/// value. Trial division up to the cube root; whatever remains has at most
/// two prime factors, so it is either a perfect square or squarefree.
pub fn squarefree_part_i64(n: i64) -> i64 {
    assert!(n != 0, "square class of zero is undefined");
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut out: u64 = 1;
    let mut p: u64 = 2;
    while p <= SMALL_PRIME_BOUND && p * p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let s = m.sqrt();
        if s * s != m {
            out *= m;
        }
    }
    sign * out as i64
}

/// Square class of a nonzero rational as a squarefree integer:
/// the squarefree part of numerator · denominator.
pub fn square_class(value: &Rational) -> Result<i64> {
    if value.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let prod = value.numer() * value.denom();
    let small = prod
        .to_i64()
        .filter(|v| v.unsigned_abs() < (1u64 << 63))
        .ok_or_else(|| Error::Overflow(prod.to_string()))?;
    Ok(squarefree_part_i64(small))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut small: u64 = 1;
    let mut iter = values.into_iter();
    for v in iter.by_ref() {
        let d = match v.denom().to_u64() {
            Some(d) => d,
            None => {
                let acc = BigInt::from(small).lcm(v.denom());
                return iter.fold(acc, |acc, v| acc.lcm(v.denom()));
            }
        };
        if d == 1 || small.is_multiple_of(d) {
            continue;
        }
        match (small / small.gcd(&d)).checked_mul(d) {
            Some(l) => small = l,
            None => {
                let acc = BigInt::from(small).lcm(v.denom());
                return iter.fold(acc, |acc, v| acc.lcm(v.denom()));
            }
        }
    }
    BigInt::from(small)
}

fn small_parts(r: &Rational) -> Option<(i64, i64)> {
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}

/// `n / d` for `d > 0`, reduced with machine-word gcd.
pub(crate) fn ratio_i128(n: i128, d: i128) -> Rational {
    debug_assert!(d > 0);
    if n == 0 {
        return Rational::zero();
    }
    let g = n.gcd(&d);
    Rational::new_raw(BigInt::from(n / g), BigInt::from(d / g))
}

/// Sum with a machine-word fast path.
pub(crate) fn add_fast(a: &Rational, b: &Rational) -> Rational {
    match (small_parts(a), small_parts(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            if ad == bd {
                ratio_i128(an as i128 + bn as i128, ad as i128)
            } else {
                let n = an as i128 * bd as i128 + bn as i128 * ad as i128;
                ratio_i128(n, ad as i128 * bd as i128)
            }
        }
        _ => a + b,
    }
}

/// Product with a machine-word fast path.
pub(crate) fn mul_fast(a: &Rational, b: &Rational) -> Rational {
    match (small_parts(a), small_parts(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            ratio_i128(an as i128 * bn as i128, ad as i128 * bd as i128)
        }
        _ => a * b,
    }
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn sign_of(value: &Rational) -> Sign {
    value.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(nth_root_exact(&rat(9, 4), 2), Some(rat(3, 2)));
        assert_eq!(nth_root_exact(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(nth_root_exact(&int(-4), 2), None);
        assert_eq!(nth_root_exact(&int(2), 2), None);
        assert_eq!(nth_root_exact(&int(1), 4), Some(int(1)));
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part_i64(12), 3);
        assert_eq!(squarefree_part_i64(-1), -1);
        assert_eq!(squarefree_part_i64(6), 6);
        assert_eq!(squarefree_part_i64(-50), -2);
        // product of two large primes squared
        let p: i64 = 1_000_003;
        assert_eq!(squarefree_part_i64(p * p * 7), 7);
        assert_eq!(squarefree_part_i64(p * 999_983), p * 999_983);
        assert_eq!(square_class(&rat(3, 2)).unwrap(), 6);
        assert_eq!(square_class(&rat(-1, 4)).unwrap(), -1);
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rational("-6/4"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::Monomial;
use crate::rational::{add_fast, common_denominator, mul_fast, nth_root_exact, ratio_i128, Rational};

/// Coefficient ring of a truncated series: ℚ itself, or ℚ[t] for
/// one-parameter families.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn from_rational(r: Rational) -> Self;

    /// Multiplicative inverse, if this element is a unit.
    fn inverse(&self) -> Option<Self>;

    /// An n-th root inside the ring, if one exists (positive for even n).
    fn nth_root(&self, n: u32) -> Option<Self>;

    /// Whether a square matrix over this ring is invertible.
    fn matrix_invertible(rows: &[Vec<Self>]) -> bool;

    /// Truncated product of two sorted term lists: all products of degree
    /// at most `max_degree`, unsorted, zeros allowed.
    fn mul_terms(
        a: &[(Monomial, Self)],
        b: &[(Monomial, Self)],
        max_degree: u32,
    ) -> Vec<(Monomial, Self)> {
        let mut acc: FxHashMap<Monomial, Self> = FxHashMap::default();
        for_each_pair(a, b, max_degree, |m, x, y| {
            let p = x.mul(y);
            acc.entry(m)
                .and_modify(|c| *c = c.add(&p))
                .or_insert(p);
        });
        acc.into_iter().collect()
    }
}

#[inline]
pub(crate) fn for_each_pair<A, B>(
    a: &[(Monomial, A)],
    b: &[(Monomial, B)],
    max_degree: u32,
    mut f: impl FnMut(Monomial, &A, &B),
) {
    let b_deg: Vec<u32> = b.iter().map(|(m, _)| m.degree()).collect();
    for (ma, ca) in a {
        let da = ma.degree();
        if da > max_degree {
            break;
        }
        let room = max_degree - da;
        for ((mb, cb), &db) in b.iter().zip(&b_deg) {
            if db > room {
                break;
            }
            f(ma.mul(*mb), ca, cb);
        }
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        add_fast(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        add_fast(self, &-other)
    }
    fn mul(&self, other: &Self) -> Self {
        mul_fast(self, other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        mul_fast(self, r)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        nth_root_exact(self, n)
    }
    fn matrix_invertible(rows: &[Vec<Self>]) -> bool {
        let n = rows.len();
        let m = crate::linalg::RatMatrix::from_rows(rows.to_vec());
        crate::linalg::rank(&m) == n
    }

    /// Products are formed on integer images (common denominator pulled out
    /// per operand) with an `i128` accumulator, falling back to `BigInt`
    /// when anything overflows. Only one rational normalization per output
    /// term.
    fn mul_terms(
        a: &[(Monomial, Self)],
        b: &[(Monomial, Self)],
        max_degree: u32,
    ) -> Vec<(Monomial, Self)> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let da = common_denominator(a.iter().map(|t| &t.1));
        let db = common_denominator(b.iter().map(|t| &t.1));
        let ia = integer_image(a, &da);
        let ib = integer_image(b, &db);
        let denom = da * db;

        if let (Some(sa), Some(sb)) = (small_image(&ia), small_image(&ib)) {
            let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
            let mut overflow = false;
            for_each_pair(&sa, &sb, max_degree, |m, x, y| {
                if overflow {
                    return;
                }
                let p = (*x as i128) * (*y as i128);
                let slot = acc.entry(m).or_insert(0);
                match slot.checked_add(p) {
                    Some(v) => *slot = v,
                    None => overflow = true,
                }
            });
            if !overflow {
                if let Some(d) = denom.to_i128() {
                    return acc
                        .into_iter()
                        .filter(|(_, v)| *v != 0)
                        .map(|(m, v)| (m, ratio_i128(v, d)))
                        .collect();
                }
                return acc
                    .into_iter()
                    .map(|(m, v)| (m, Rational::new(BigInt::from(v), denom.clone())))
                    .collect();
            }
        }

        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for_each_pair(&ia, &ib, max_degree, |m, x, y| {
            *acc.entry(m).or_insert_with(BigInt::zero) += x * y;
        });
        acc.into_iter()
            .map(|(m, v)| (m, Rational::new(v, denom.clone())))
            .collect()
    }
}

fn integer_image(terms: &[(Monomial, Rational)], denom: &BigInt) -> Vec<(Monomial, BigInt)> {
    if denom.is_one() {
        return terms.iter().map(|(m, c)| (*m, c.numer().clone())).collect();
    }
    terms
        .iter()
        .map(|(m, c)| (*m, c.numer() * (denom / c.denom())))
        .collect()
}

fn small_image(terms: &[(Monomial, BigInt)]) -> Option<Vec<(Monomial, i64)>> {
    terms
        .iter()
        .map(|(m, c)| {
            let v = c.to_i64()?;
            // keep products well inside i128 so long sums rarely overflow
            (v.unsigned_abs() < (1u64 << 62)).then_some((*m, v))
        })
        .collect()
}

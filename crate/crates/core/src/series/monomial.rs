use std::cmp::Ordering;
use std::fmt;

use super::MAX_VARS;

const ONES: u128 = u128::from_le_bytes([1; 16]);

/// Exponent vector packed one byte per variable, variable 0 in the most
/// significant byte.
///
/// Ordering is graded: total degree first, then within a degree the
/// monomial with the larger exponent on the earliest variable comes first
/// (`x² < xy < y²` in iteration order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    #[inline]
    fn shift(var: usize) -> u32 {
        debug_assert!(var < MAX_VARS);
        ((MAX_VARS - 1 - var) * 8) as u32
    }

    /// Builds a monomial from an exponent slice. Panics if a single exponent
    /// exceeds 255 or there are more than `MAX_VARS` entries; callers check
    /// degree bounds before packing.
    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut bits = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 256, "exponent {e} out of range");
            bits |= (e as u128) << Self::shift(i);
        }
        Monomial(bits)
    }

    #[inline]
    pub fn var(var: usize) -> Self {
        Monomial(1u128 << Self::shift(var))
    }

    #[inline]
    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> Self::shift(var)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    #[inline]
    pub fn degree(self) -> u32 {
        // Horizontal byte sum; exact because total degree stays below 256.
        (self.0.wrapping_mul(ONES) >> 120) as u32
    }

    /// Product. Caller guarantees the result degree stays below 256.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }

    #[inline]
    pub fn divides(self, other: Monomial) -> bool {
        let mut a = self.0;
        let mut b = other.0;
        while a != 0 {
            if (a & 0xff) > (b & 0xff) {
                return false;
            }
            a >>= 8;
            b >>= 8;
        }
        true
    }

    /// Quotient `self / divisor`, assuming `divisor` divides `self`.
    #[inline]
    pub fn div(self, divisor: Monomial) -> Monomial {
        Monomial(self.0 - divisor.0)
    }

    /// Drops one power of `var`; `None` when the exponent is zero.
    #[inline]
    pub fn lower(self, var: usize) -> Option<Monomial> {
        if self.exponent(var) == 0 {
            None
        } else {
            Some(Monomial(self.0 - (1u128 << Self::shift(var))))
        }
    }

    /// Total degree in the listed variables.
    pub fn degree_in(self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.exponent(v)).sum()
    }

    /// Splits into the part supported on `vars` and the rest.
    pub fn split(self, vars: &[usize]) -> (Monomial, Monomial) {
        let mut inside = 0u128;
        for &v in vars {
            inside |= self.0 & (0xffu128 << Self::shift(v));
        }
        (Monomial(inside), Monomial(self.0 - inside))
    }

    pub fn raw(self) -> u128 {
        self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<u32> = (0..MAX_VARS).map(|i| self.exponent(i)).collect();
        let last = exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "Monomial{:?}", &exps[..last])
    }
}

/// All monomials in `nvars` variables of exactly `degree`, in `Monomial`
/// order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(var: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let n = exps.len();
        if var + 1 == n {
            exps[var] = left;
            out.push(Monomial::from_exponents(exps));
            return;
        }
        for e in (0..=left).rev() {
            exps[var] = e;
            rec(var + 1, left - e, exps, out);
        }
        exps[var] = 0;
    }
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::ONE);
        }
        return out;
    }
    rec(0, degree, &mut exps, &mut out);
    out
}

/// All monomials of degree ≤ `max_degree`, in `Monomial` order.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
    (0..=max_degree)
        .flat_map(|d| monomials_of_degree(nvars, d))
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

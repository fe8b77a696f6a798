//! Invariants of an isolated critical point at the origin.
//!
//! μ is computed as a jet quotient dimension and only reported together
//! with a Nakayama certificate: if every monomial of degree `D+1` lies in
//! `J + m^{D+2}` then `m^{D+1} ⊆ J`, and `dim ℚ[[x]]/J` equals the number
//! of standard monomials of degree ≤ D.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, JetIdeal, JetLimits, RatMatrix};
use crate::rational::Rational;
use crate::series::{Monomial, Series};

/// Default largest certificate degree tried.
pub const DEFAULT_CAP: u32 = 64;

/// Certificate degrees tried in turn; each attempt echelonizes once.
const SCHEDULE: [u32; 11] = [2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];

/// A germ `f` with `f(0) = 0` and `df(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LgPair {
    f: Series,
}

impl LgPair {
    pub fn new(f: Series) -> Result<Self> {
        if !f.constant_term().is_zero() {
            return Err(Error::NotLgPair("nonzero value at the origin".into()));
        }
        if f.terms().iter().any(|(m, _)| m.degree() == 1) {
            return Err(Error::NotLgPair("nonzero differential at the origin".into()));
        }
        Ok(LgPair { f })
    }

    /// The pair on the zero-dimensional space.
    pub fn point(order: u32) -> Self {
        LgPair { f: Series::zero(0, order) }
    }

    pub fn f(&self) -> &Series {
        &self.f
    }

    pub fn into_series(self) -> Series {
        self.f
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn order(&self) -> u32 {
        self.f.order()
    }

    pub fn jacobian(&self) -> Vec<Series> {
        self.f.gradient()
    }
}

impl fmt::Display for LgPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f)
    }
}

/// Why no certificate was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconclusive {
    /// No certificate at any degree up to `checked_to`; the critical point
    /// may be non-isolated.
    NoCertificate { checked_to: u32 },
    /// The series is not known to enough order to search up to the cap.
    Precision { checked_to: u32, needed_order: u32 },
    /// The jet elimination would exceed the configured size limit.
    ResourceLimit { checked_to: u32, message: String },
}

impl Inconclusive {
    pub fn checked_to(&self) -> u32 {
        match self {
            Inconclusive::NoCertificate { checked_to }
            | Inconclusive::Precision { checked_to, .. }
            | Inconclusive::ResourceLimit { checked_to, .. } => *checked_to,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Inconclusive::NoCertificate { .. } => "no_certificate",
            Inconclusive::Precision { .. } => "insufficient_precision",
            Inconclusive::ResourceLimit { .. } => "resource_limit",
        }
    }
}

impl fmt::Display for Inconclusive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconclusive::NoCertificate { checked_to } => {
                write!(f, "no determinacy certificate up to degree {checked_to}")
            }
            Inconclusive::Precision { checked_to, needed_order } => write!(
                f,
                "searched to degree {checked_to}; the cap needs the series to order {needed_order}"
            ),
            Inconclusive::ResourceLimit { checked_to, message } => {
                write!(f, "searched to degree {checked_to}; {message}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorReport {
    pub nvars: usize,
    pub cap: u32,
    /// `None` when inconclusive.
    pub mu: Option<usize>,
    /// Degree `D` of the certificate `m^{D+1} ⊆ J`.
    pub certified_at: Option<u32>,
    /// Milnor algebra dimension per degree; sums to μ.
    pub hilbert: Vec<usize>,
    pub tjurina: Option<usize>,
    pub inconclusive: Option<Inconclusive>,
}

impl MilnorReport {
    pub fn is_isolated(&self) -> bool {
        self.mu.is_some()
    }
}

/// A certified Milnor algebra: the echelonized Jacobian jets and the
/// certificate degree.
#[derive(Clone, Debug)]
pub struct MilnorAlgebra {
    ideal: Option<JetIdeal>,
    nvars: usize,
    degree: u32,
}

impl MilnorAlgebra {
    /// Searches for a certificate up to degree `cap`.
    pub fn compute(p: &LgPair, cap: u32) -> std::result::Result<Self, Inconclusive> {
        Self::compute_with(p, cap, &JetLimits::default())
    }

    pub fn compute_with(
        p: &LgPair,
        cap: u32,
        limits: &JetLimits,
    ) -> std::result::Result<Self, Inconclusive> {
        let n = p.nvars();
        if n == 0 {
            return Ok(MilnorAlgebra { ideal: None, nvars: 0, degree: 0 });
        }
        let gens = p.jacobian();
        // Certifying degree D needs jets of the partials to degree D + 1.
        let reachable = p.order().saturating_sub(2);
        let top = cap.min(reachable);
        let mut checked = 0;
        let steps = SCHEDULE.iter().copied().filter(|&d| d < top).chain(std::iter::once(top));
        for d_max in steps {
            if d_max < checked {
                continue;
            }
            let ideal = match JetIdeal::new(&gens, d_max + 1, limits) {
                Ok(j) => j,
                Err(Error::Resource(message)) => {
                    return Err(Inconclusive::ResourceLimit { checked_to: checked, message })
                }
                Err(e) => unreachable!("jet ideal of partials: {e}"),
            };
            if let Some(d) = (0..=d_max).find(|&d| ideal.covers_degree(d + 1)) {
                return Ok(MilnorAlgebra { ideal: Some(ideal), nvars: n, degree: d });
            }
            checked = d_max;
        }
        if top < cap {
            Err(Inconclusive::Precision { checked_to: checked, needed_order: cap + 2 })
        } else {
            Err(Inconclusive::NoCertificate { checked_to: checked })
        }
    }

    pub fn certified_at(&self) -> u32 {
        self.degree
    }

    pub fn mu(&self) -> usize {
        match &self.ideal {
            Some(j) => j.quotient_dim(self.degree),
            None => 1,
        }
    }

    pub fn hilbert(&self) -> Vec<usize> {
        match &self.ideal {
            Some(j) => j.hilbert(self.degree),
            None => vec![1],
        }
    }

    /// Monomial basis of the algebra.
    pub fn basis(&self) -> Vec<Monomial> {
        match &self.ideal {
            Some(j) => j.standard_monomials(self.degree),
            None => vec![Monomial::ONE],
        }
    }

    /// Reduction of `s` onto the monomial basis. Since `m^{D+1} ⊆ J`, only
    /// the jet of degree ≤ D matters.
    pub fn reduce(&self, s: &Series) -> Result<Vec<(Monomial, Rational)>> {
        match &self.ideal {
            Some(j) => j.normal_form(&s.truncate(self.degree), self.degree),
            None => {
                let c = s.constant_term();
                Ok(if c.is_zero() { vec![] } else { vec![(Monomial::ONE, c)] })
            }
        }
    }

    /// Matrix of multiplication by `g` on the basis (columns: inputs).
    pub fn multiplication_matrix(&self, g: &Series) -> Result<RatMatrix> {
        let basis = self.basis();
        let pos = |m: Monomial| basis.iter().position(|&b| b == m);
        let mut mat = RatMatrix::zeros(basis.len(), basis.len());
        for (col, &b) in basis.iter().enumerate() {
            let prod = g * &Series::monomial(self.nvars, g.order(), b, Rational::from_integer(1.into()));
            for (m, c) in self.reduce(&prod)? {
                let row = pos(m).ok_or_else(|| Error::Contract("normal form left the basis".into()))?;
                mat.set(row, col, c);
            }
        }
        Ok(mat)
    }

    pub fn tjurina(&self, p: &LgPair) -> Result<usize> {
        let Some(_) = &self.ideal else {
            return Ok(1);
        };
        let mut gens = p.jacobian();
        gens.push(p.f().truncate(self.degree + 1));
        let j = JetIdeal::new(&gens, self.degree + 1, &JetLimits { max_cells: u64::MAX })?;
        Ok(j.quotient_dim(self.degree))
    }
}

/// Milnor number with certificate, Hilbert function, and Tjurina number.
pub fn milnor_number(p: &LgPair, cap: u32) -> MilnorReport {
    match MilnorAlgebra::compute(p, cap) {
        Ok(alg) => MilnorReport {
            nvars: p.nvars(),
            cap,
            mu: Some(alg.mu()),
            certified_at: Some(alg.certified_at()),
            hilbert: alg.hilbert(),
            tjurina: alg.tjurina(p).ok(),
            inconclusive: None,
        },
        Err(why) => MilnorReport {
            nvars: p.nvars(),
            cap,
            mu: None,
            certified_at: None,
            hilbert: Vec::new(),
            tjurina: None,
            inconclusive: Some(why),
        },
    }
}

/// `dim ℚ[[x]]/((f) + J)`; `(f) + J ⊇ J` so μ's certificate applies.
pub fn tjurina_number(p: &LgPair, cap: u32) -> Option<usize> {
    milnor_number(p, cap).tjurina
}

fn isolated_mu(p: &LgPair, cap: u32) -> Result<usize> {
    let r = milnor_number(p, cap);
    r.mu.ok_or_else(|| Error::NonIsolated(r.inconclusive.map_or(cap, |i| i.checked_to())))
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Euler characteristic of the Milnor fiber, `1 + (−1)^{n−1} μ`.
pub fn euler_char_milnor_fiber(p: &LgPair, cap: u32) -> Result<i64> {
    let mu = isolated_mu(p, cap)? as i64;
    Ok(1 + sign(p.nvars() as i64 - 1) * mu)
}

/// `ν = (−1)^n (1 − χ(F))`, which equals μ at an isolated point.
pub fn behrend_value(p: &LgPair, cap: u32) -> Result<i64> {
    let mu = isolated_mu(p, cap)? as i64;
    let chi = 1 + sign(p.nvars() as i64 - 1) * mu;
    let nu = sign(p.nvars() as i64) * (1 - chi);
    if nu != mu {
        return Err(Error::Contract(format!("Behrend value {nu} differs from Milnor number {mu}")));
    }
    Ok(nu)
}

/// The second formula `(−1)^{n−1} χ(φ_f)` under two readings of the
/// vanishing-cycle complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehrendComparison {
    /// `(−1)^n (1 − χ(F))`.
    pub canonical: i64,
    /// Stalk of unshifted vanishing cycles: `χ(φ_f) = χ(F) − 1`.
    pub alt_unshifted: i64,
    /// Perverse normalization `φ_f[n−1]`, which multiplies `χ` by `(−1)^{n−1}`.
    pub alt_perverse: i64,
}

pub fn behrend_comparison(p: &LgPair, cap: u32) -> Result<BehrendComparison> {
    let canonical = behrend_value(p, cap)?;
    let chi = euler_char_milnor_fiber(p, cap)?;
    let s = sign(p.nvars() as i64 - 1);
    let reduced = chi - 1;
    Ok(BehrendComparison {
        canonical,
        alt_unshifted: s * reduced,
        alt_perverse: s * s * reduced,
    })
}

/// `(dim ker, dim coker)` of the Hessian acting on `A^n`, `A` the Milnor
/// algebra.
pub fn tangent_complex_dims(p: &LgPair, cap: u32) -> Result<(usize, usize)> {
    let alg = match MilnorAlgebra::compute(p, cap) {
        Ok(a) => a,
        Err(why) => return Err(Error::NonIsolated(why.checked_to())),
    };
    let n = p.nvars();
    if n == 0 {
        return Ok((0, 0));
    }
    let mu = alg.mu();
    let size = mu * n;
    if size > linalg::MAX_DENSE_COLS {
        return Err(Error::Resource(format!("Hessian operator of size {size}")));
    }
    let grad = p.jacobian();
    let mut big = RatMatrix::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            let hij = grad[i].partial(j)?;
            let block = alg.multiplication_matrix(&hij)?;
            for r in 0..mu {
                for c in 0..mu {
                    let v = block.get(r, c);
                    if !v.is_zero() {
                        big.set(i * mu + r, j * mu + c, v.clone());
                    }
                }
            }
        }
    }
    let rank = linalg::rref(&big)?.rank;
    Ok((size - rank, size - rank))
}

/// `H⁰` of the Koszul complex on the partials, the Milnor algebra.
pub fn koszul_h0(p: &LgPair, cap: u32) -> Option<usize> {
    milnor_number(p, cap).mu
}

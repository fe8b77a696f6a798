//! One-parameter polynomial families: coordinate changes over ℚ[t] that
//! should preserve a potential, and matrices over ℚ[t].

use std::fmt;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::linalg::{JetIdeal, JetLimits, RatMatrix};
use crate::rational::{nth_root_exact, Rational};
use crate::series::{compose, Coeff, CoordChange, Monomial, Series, MAX_ORDER};

/// Polynomial in `t` with rational coefficients, lowest degree first and
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TPoly {
    coeffs: Vec<Rational>,
}

pub type FamilySeries = Series<TPoly>;
pub type FamilyCoordChange = CoordChange<TPoly>;

impl TPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Coeff::is_zero) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        TPoly::new(vec![c])
    }

    /// The parameter itself.
    pub fn t() -> Self {
        TPoly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &TPoly) -> Option<(TPoly, TPoly)> {
        let dd = d.degree()?;
        let lead = d.lead()?.recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() * &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Coeff::is_zero) {
                rem.pop();
            }
        }
        Some((TPoly::new(quot), TPoly::new(rem)))
    }

    pub fn pow(&self, e: u32) -> TPoly {
        (0..e).fold(TPoly::constant(Rational::one()), |acc, _| acc.mul(self))
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Series = Series::from_terms(
            1,
            crate::series::MAX_ORDER,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::from_exponents(&[k as u32]), c.clone())),
        );
        let names = ["t".to_string()];
        write!(f, "{}", t.display_with(&names))?;
        Ok(())
    }
}

impl Coeff for TPoly {
    fn zero() -> Self {
        TPoly::default()
    }
    fn one() -> Self {
        TPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &TPoly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
        TPoly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return TPoly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TPoly::new(out)
    }
    fn neg(&self) -> Self {
        TPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
    fn scale(&self, r: &Rational) -> Self {
        TPoly::new(self.coeffs.iter().map(|c| c * r).collect())
    }
    fn from_rational(r: Rational) -> Self {
        TPoly::constant(r)
    }
    fn inverse(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => Some(TPoly::constant(c.recip())),
            _ => None,
        }
    }
    /// Roots of polynomials that are exact n-th powers in ℚ[t], with the
    /// positive leading coefficient for even n.
    fn nth_root(&self, n: u32) -> Option<Self> {
        let deg = self.degree()?;
        if n == 0 || deg % n as usize != 0 {
            return None;
        }
        let low = self.coeffs.iter().position(|c| !c.is_zero())?;
        if low % n as usize != 0 {
            return None;
        }
        // Root of t^{-low}·self as a power series in t, truncated to the
        // degree a root would have, then checked.
        let shifted: Vec<Rational> = self.coeffs[low..].to_vec();
        let series = Series::from_terms(
            1,
            ((deg - low) / n as usize) as u32,
            shifted
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::from_exponents(&[k as u32]), c.clone())),
        );
        let c0 = &shifted[0];
        nth_root_exact(c0, n)?;
        let root = series.nth_root(n).ok()?;
        let mut coeffs = vec![Rational::zero(); low / n as usize];
        let top = root.order() as usize;
        coeffs.extend((0..=top).map(|k| root.coeff_of(&[k as u32])));
        let mut cand = TPoly::new(coeffs);
        if n.is_multiple_of(2) && cand.lead().is_some_and(|c| c < &Rational::zero()) {
            cand = cand.neg();
        }
        (cand.pow(n) == *self).then_some(cand)
    }
    /// Invertible over ℚ(t). Whether the determinant is a unit of ℚ[t]
    /// is reported separately by [`verify_isotopy`].
    fn matrix_invertible(rows: &[Vec<Self>]) -> bool {
        MatrixFamily::from_rows(rows.to_vec())
            .and_then(|m| m.det())
            .is_ok_and(|d| !Coeff::is_zero(&d))
    }
}

/// Square matrix with entries in ℚ[t].
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFamily {
    rows: Vec<Vec<TPoly>>,
}

impl MatrixFamily {
    pub fn from_rows(rows: Vec<Vec<TPoly>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix family must be square".into()));
        }
        Ok(MatrixFamily { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { TPoly::one() } else { TPoly::zero() }).collect())
            .collect();
        MatrixFamily { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &TPoly {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<TPoly>] {
        &self.rows
    }

    pub fn mul(&self, other: &MatrixFamily) -> Result<MatrixFamily> {
        let n = self.size();
        if other.size() != n {
            return Err(Error::Dimension(format!("{n}x{n} times {0}x{0}", other.size())));
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(TPoly::zero(), |acc, k| {
                            acc.add(&self.rows[i][k].mul(&other.rows[k][j]))
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(MatrixFamily { rows })
    }

    /// Determinant by fraction-free elimination over ℚ[t]; every division
    /// is exact.
    pub fn det(&self) -> Result<TPoly> {
        let n = self.size();
        let mut m = self.rows.clone();
        let mut prev = TPoly::one();
        let mut sign = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !Coeff::is_zero(&m[r][k])) else {
                return Ok(TPoly::zero());
            };
            if p != k {
                m.swap(p, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    let (q, r) = num.div_rem(&prev).expect("nonzero pivot");
                    if !Coeff::is_zero(&r) {
                        return Err(Error::Contract("inexact division in Bareiss step".into()));
                    }
                    m[i][j] = q;
                }
                m[i][k] = TPoly::zero();
            }
            prev = m[k][k].clone();
        }
        let d = if n == 0 { TPoly::one() } else { m[n - 1][n - 1].clone() };
        Ok(if sign { d.neg() } else { d })
    }

    pub fn specialize(&self, t: &Rational) -> RatMatrix {
        RatMatrix::from_rows(
            self.rows.iter().map(|r| r.iter().map(|p| p.eval(t)).collect()).collect(),
        )
    }
}

impl fmt::Debug for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn matrix_family_det(m: &MatrixFamily) -> Result<TPoly> {
    m.det()
}

pub fn specialize(m: &MatrixFamily, t: &Rational) -> RatMatrix {
    m.specialize(t)
}

/// Parses a polynomial in `vars` and the parameter `param`, read as a
/// series in `vars` with coefficients in ℚ[param].
pub fn parse_family_series(text: &str, vars: &[String], param: &str, order: u32) -> Result<FamilySeries> {
    let n = vars.len();
    let mut all = vars.to_vec();
    all.push(param.to_string());
    let expr = parse_expr(text, &all)?;
    let flat = expr.to_series(n + 1, MAX_ORDER)?;
    if flat.max_degree() == Some(MAX_ORDER) {
        return Err(Error::OrderTooLarge(MAX_ORDER));
    }
    let mut acc: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    for (m, c) in flat.terms() {
        let exps = m.exponents(n + 1);
        let space = Monomial::from_exponents(&exps[..n]);
        if space.degree() > order {
            continue;
        }
        let k = exps[n] as usize;
        let slot = acc.entry(space).or_default();
        if slot.len() <= k {
            slot.resize(k + 1, Rational::zero());
        }
        slot[k] = c.clone();
    }
    Ok(FamilySeries::from_terms(n, order, acc.into_iter().map(|(m, c)| (m, TPoly::new(c)))))
}

/// Parses a polynomial in the single variable `param`.
pub fn parse_tpoly(text: &str, param: &str) -> Result<TPoly> {
    let s = parse_family_series(text, &[], param, 0)?;
    Ok(s.constant_term())
}

/// Series with constant coefficients in `t`.
pub fn lift(f: &Series) -> FamilySeries {
    f.map_coeffs(|c| TPoly::constant(c.clone()))
}

pub fn specialize_series(f: &FamilySeries, t: &Rational) -> Series {
    f.map_coeffs(|p| p.eval(t))
}

pub fn specialize_change(phi: &FamilyCoordChange, t: &Rational) -> Result<CoordChange> {
    CoordChange::new(phi.components().iter().map(|c| specialize_series(c, t)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsotopyReport {
    pub order: u32,
    /// `f ∘ φ_t = f` as polynomials in `t`, modulo `m^{N+1}`.
    pub preserves_potential: bool,
    /// Lowest degree at which `f ∘ φ_t − f` is nonzero.
    pub defect_degree: Option<u32>,
    /// `φ_0 = id` modulo `m^{N+1}`.
    pub starts_at_identity: bool,
    /// Jacobian determinant of `φ_t` at the origin, and whether it is a
    /// nonzero constant (so every `φ_t` is invertible).
    pub jacobian_det: TPoly,
    pub jacobian_unit: bool,
    /// `φ_1(x_i) − x_i ∈ J(f) + m^{D+1}` for every `i`; a necessary
    /// condition for `φ_1` to fix the critical locus.
    pub fixes_critical_jets: bool,
    /// The degree `D` used for the Jacobian-ideal check.
    pub critical_check_degree: u32,
    pub phi_1: CoordChange,
}

impl IsotopyReport {
    pub fn passed(&self) -> bool {
        self.preserves_potential
            && self.starts_at_identity
            && self.fixes_critical_jets
            && self.jacobian_unit
    }
}

/// Checks a family `φ_t` against the potential `f` to order `order`. The
/// Jacobian check runs to degree `min(order, ord(f) − 1)` since the
/// partials of `f` are known one order lower than `f`.
pub fn verify_isotopy(f: &Series, phi: &FamilyCoordChange, order: u32) -> Result<IsotopyReport> {
    let n = f.nvars();
    if phi.nvars() != n {
        return Err(Error::VarMismatch { left: phi.nvars(), right: n });
    }
    let have = if n == 0 { f.order() } else { f.order().min(phi.order()) };
    if have < order {
        return Err(Error::Precision { needed: order, have });
    }
    let f = f.truncate(f.order().min(order + 1));
    let phi = phi.truncate(order);
    let ft = lift(&f.truncate(order));
    let defect = &compose(&ft, &phi)? - &ft;
    let defect_degree = defect.ord();

    let jacobian_det = MatrixFamily::from_rows(phi.linear_part())?.det()?;
    let jacobian_unit = jacobian_det.is_constant() && !Coeff::is_zero(&jacobian_det);
    let phi_0 = specialize_change(&phi, &Rational::zero())?;
    let phi_1 = specialize_change(&phi, &Rational::one())?;

    let d = order.min(f.order().saturating_sub(1));
    let fixes_critical_jets = if n == 0 {
        true
    } else {
        let grad: Vec<Series> = f.gradient().iter().map(|g| g.truncate(d)).collect();
        let j = JetIdeal::new(&grad, d, &JetLimits::default())?;
        let mut ok = true;
        for i in 0..n {
            let diff = &phi_1.component(i).truncate(d) - &Series::var(n, d, i);
            if !j.contains(&diff, d)? {
                ok = false;
                break;
            }
        }
        ok
    };

    Ok(IsotopyReport {
        order,
        preserves_potential: defect_degree.is_none(),
        defect_degree,
        starts_at_identity: phi_0.is_identity(),
        jacobian_det,
        jacobian_unit,
        fixes_critical_jets,
        critical_check_degree: d,
        phi_1,
    })
}

//! Truncated multivariate formal power series.
//!
//! A [`Series`] in `n` variables with order `N` stands for an element of
//! `k[[x₁..xₙ]]` known modulo `m^{N+1}`: every term of degree ≤ N is exact,
//! nothing above it is stored. Binary operations return the smaller of the
//! two orders.

mod coeff;
mod compose;
mod implicit;
mod monomial;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use coeff::Coeff;
pub use compose::{compose, substitute, CoordChange};
pub use implicit::implicit_solve;
pub use monomial::{binomial, monomials_of_degree, monomials_up_to, Monomial};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Variables are packed one byte each into a `u128`.
pub const MAX_VARS: usize = 16;
/// Exponents and total degrees live in one byte.
pub const MAX_ORDER: u32 = 255;
/// Truncation order used when none is given.
pub const DEFAULT_ORDER: u32 = 12;

#[derive(Clone, PartialEq)]
pub struct Series<C: Coeff = Rational> {
    nvars: usize,
    order: u32,
    /// Sorted by `Monomial` order, no zero coefficients, no term of degree
    /// above `order`.
    terms: Vec<(Monomial, C)>,
}

pub(crate) fn check_shape(nvars: usize, order: u32) -> Result<()> {
    if nvars > MAX_VARS {
        return Err(Error::TooManyVars(nvars));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    Ok(())
}

impl<C: Coeff> Series<C> {
    pub fn zero(nvars: usize, order: u32) -> Self {
        assert!(nvars <= MAX_VARS && order <= MAX_ORDER, "series shape out of range");
        Series { nvars, order, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: C) -> Self {
        Self::monomial(nvars, order, Monomial::ONE, c)
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, C::one())
    }

    /// The coordinate function `x_var`.
    pub fn var(nvars: usize, order: u32, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        Self::monomial(nvars, order, Monomial::var(var), C::one())
    }

    pub fn monomial(nvars: usize, order: u32, m: Monomial, c: C) -> Self {
        let mut s = Self::zero(nvars, order);
        if m.degree() <= order && !c.is_zero() {
            s.terms.push((m, c));
        }
        s
    }

    /// Canonicalizing constructor: sums duplicates, drops zeros and terms
    /// above the truncation order.
    pub fn from_terms(
        nvars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Self {
        let mut raw: Vec<(Monomial, C)> = terms
            .into_iter()
            .filter(|(m, _)| m.degree() <= order)
            .collect();
        raw.sort_by_key(|a| a.0);
        let mut out: Vec<(Monomial, C)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        let mut s = Self::zero(nvars, order);
        s.terms = out;
        s
    }

    /// Like [`Series::from_terms`] but takes exponent vectors.
    pub fn from_exponent_terms(
        nvars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, C)>,
    ) -> Result<Self> {
        check_shape(nvars, order)?;
        let mut packed = Vec::new();
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::VarMismatch { left: exps.len(), right: nvars });
            }
            if exps.iter().sum::<u32>() <= order {
                packed.push((Monomial::from_exponents(&exps), c));
            }
        }
        Ok(Self::from_terms(nvars, order, packed))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> C {
        match self.terms.binary_search_by(|(k, _)| k.cmp(&m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    pub fn coeff_of(&self, exps: &[u32]) -> C {
        self.coeff(Monomial::from_exponents(exps))
    }

    pub fn constant_term(&self) -> C {
        match self.terms.first() {
            Some((m, c)) if *m == Monomial::ONE => c.clone(),
            _ => C::zero(),
        }
    }

    /// Lowest degree of a nonzero term; `None` for the zero series.
    pub fn ord(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    /// Highest degree of a stored term.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.last().map(|(m, _)| m.degree())
    }

    /// Lowers the truncation order (never raises it).
    pub fn truncate(&self, order: u32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut s = Self::zero(self.nvars, order);
        s.terms = self
            .terms
            .iter()
            .take_while(|(m, _)| m.degree() <= order)
            .cloned()
            .collect();
        s
    }

    /// Reinterprets an exactly known polynomial at a different order. Only
    /// sound when the caller knows the series has no terms above its stored
    /// ones (parsed polynomials, fixtures).
    pub fn with_order_unchecked(&self, order: u32) -> Self {
        assert!(order <= MAX_ORDER);
        let mut s = self.truncate(order);
        s.order = order;
        s
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        let mut s = Self::zero(self.nvars, self.order);
        s.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .cloned()
            .collect();
        s
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.merge(other, |a| a.clone(), |a, b| a.add(b), |b| b.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.merge(other, |a| a.clone(), |a, b| a.sub(b), |b| b.neg()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let order = self.order.min(other.order);
        let prod = C::mul_terms(&self.terms, &other.terms, order);
        Ok(Self::from_terms(self.nvars, order, prod))
    }

    fn merge(
        &self,
        other: &Self,
        left: impl Fn(&C) -> C,
        both: impl Fn(&C, &C) -> C,
        right: impl Fn(&C) -> C,
    ) -> Self {
        let order = self.order.min(other.order);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => {
                    let (m, c) = a.next().unwrap();
                    (*m, left(c))
                }
                (None, Some(_)) => {
                    let (m, c) = b.next().unwrap();
                    (*m, right(c))
                }
                (Some((ma, _)), Some((mb, _))) => match ma.cmp(mb) {
                    std::cmp::Ordering::Less => {
                        let (m, c) = a.next().unwrap();
                        (*m, left(c))
                    }
                    std::cmp::Ordering::Greater => {
                        let (m, c) = b.next().unwrap();
                        (*m, right(c))
                    }
                    std::cmp::Ordering::Equal => {
                        let (m, x) = a.next().unwrap();
                        let (_, y) = b.next().unwrap();
                        (*m, both(x, y))
                    }
                },
            };
            if next.0.degree() > order {
                break;
            }
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        let mut s = Self::zero(self.nvars, order);
        s.terms = out;
        s
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn scale_by(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut s = Series::<D>::zero(self.nvars, self.order);
        s.terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        s
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars, self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative in `var`. The result is known to one order
    /// less (order 0 stays at 0 and is empty).
    pub fn partial(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::BadIndex { index: var, nvars: self.nvars });
        }
        let order = self.order.saturating_sub(1);
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(var);
            let lowered = m.lower(var)?;
            Some((lowered, c.scale(&Rational::from_integer(e.into()))))
        });
        Ok(Self::from_terms(self.nvars, order, terms))
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i).unwrap()).collect()
    }

    /// Places this series into a larger variable set: variable `i` becomes
    /// variable `slots[i]` of an `nvars`-variable ring.
    pub fn embed(&self, nvars: usize, slots: &[usize]) -> Result<Self> {
        if slots.len() != self.nvars {
            return Err(Error::VarMismatch { left: slots.len(), right: self.nvars });
        }
        check_shape(nvars, self.order)?;
        if let Some(&bad) = slots.iter().find(|&&s| s >= nvars) {
            return Err(Error::BadIndex { index: bad, nvars });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0u32; nvars];
            for (i, &s) in slots.iter().enumerate() {
                exps[s] += m.exponent(i);
            }
            (Monomial::from_exponents(&exps), c.clone())
        });
        Ok(Self::from_terms(nvars, self.order, terms))
    }

    /// Inverse of [`Series::embed`] on series supported on `slots`: keeps
    /// only terms free of every other variable and re-indexes.
    pub fn restrict(&self, slots: &[usize]) -> Self {
        let nv = slots.len();
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let exps = m.exponents(self.nvars);
            let other: u32 = exps
                .iter()
                .enumerate()
                .filter(|(i, _)| !slots.contains(i))
                .map(|(_, e)| e)
                .sum();
            if other > 0 {
                return None;
            }
            let sub: Vec<u32> = slots.iter().map(|&s| exps[s]).collect();
            Some((Monomial::from_exponents(&sub), c.clone()))
        });
        Series::from_terms(nv, self.order, terms)
    }

    /// Terms whose degree in `vars` equals `d`.
    pub fn part_of_degree_in(&self, vars: &[usize], d: u32) -> Self {
        let mut s = Self::zero(self.nvars, self.order);
        s.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree_in(vars) == d)
            .cloned()
            .collect();
        s
    }

    /// Equality of the two series modulo `m^{order+1}`.
    pub fn agrees_to(&self, other: &Self, order: u32) -> bool {
        self.nvars == other.nvars && self.truncate(order).terms == other.truncate(order).terms
    }

    /// Prints with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        SeriesDisplay { series: self, names }
    }
}

impl Series<Rational> {
    /// `Σ gram[i][j] x_i x_j` in `nvars` variables starting at `offset`.
    pub fn quadratic(nvars: usize, order: u32, offset: usize, gram: &[Vec<Rational>]) -> Self {
        let mut terms = Vec::new();
        for (i, row) in gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let m = Monomial::var(offset + i).mul(Monomial::var(offset + j));
                terms.push((m, g.clone()));
            }
        }
        Series::from_terms(nvars, order, terms)
    }

    /// Value at the rational point `point`, using only the stored terms.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::from_integer(0.into());
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, p) in point.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    v *= num_traits::pow(p.clone(), e as usize);
                }
            }
            total += v;
        }
        total
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[n={}, N={}]({})", self.nvars, self.order, self)
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let shown = SeriesDisplay { series: self, names: &names };
        write!(f, "{shown}")
    }
}

/// `x, y, z` for up to three variables, `x1..xn` beyond.
pub fn default_names(nvars: usize) -> Vec<String> {
    if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

struct SeriesDisplay<'a, C: Coeff> {
    series: &'a Series<C>,
    names: &'a [String],
}

impl<C: Coeff> fmt::Display for SeriesDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.series.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.series.terms.iter().enumerate() {
            let text = c.to_string();
            let compound = text.trim_start_matches('-').contains(['+', '-', ' ']);
            let negative = !compound && text.starts_with('-');
            let magnitude = if negative { &text[1..] } else { &text[..] };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = monomial_text(*m, self.names);
            if mono.is_empty() {
                if compound {
                    write!(f, "({magnitude})")?;
                } else {
                    write!(f, "{magnitude}")?;
                }
            } else if magnitude == "1" {
                write!(f, "{mono}")?;
            } else if compound {
                write!(f, "({magnitude})*{mono}")?;
            } else {
                write!(f, "{magnitude}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn monomial_text(m: Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        match m.exponent(i) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coeff> $trait<&Series<C>> for &Series<C> {
            type Output = Series<C>;
            /// Panics on a variable-count mismatch; use the `checked_`
            /// method for fallible input.
            fn $method(self, rhs: &Series<C>) -> Series<C> {
                self.$checked(rhs).expect("series variable counts differ")
            }
        }
        impl<C: Coeff> $trait<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $method(self, rhs: Series<C>) -> Series<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<C: Coeff> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.map_coeffs(|c| c.neg())
    }
}

impl<C: Coeff> Neg for Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        -&self
    }
}

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::{Coeff, Monomial, Series};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::Rational;

/// An adic automorphism of the formal ball: the image of each coordinate.
/// Components have zero constant term and the Jacobian at the origin is
/// invertible.
#[derive(Clone, PartialEq)]
pub struct CoordChange<C: Coeff = Rational> {
    nvars: usize,
    order: u32,
    components: Vec<Series<C>>,
}

impl<C: Coeff> CoordChange<C> {
    pub fn new(components: Vec<Series<C>>) -> Result<Self> {
        let nvars = components.len();
        let mut order = super::MAX_ORDER;
        for (i, c) in components.iter().enumerate() {
            if c.nvars() != nvars {
                return Err(Error::VarMismatch { left: c.nvars(), right: nvars });
            }
            if !c.constant_term().is_zero() {
                return Err(Error::NonzeroConstant { index: i });
            }
            order = order.min(c.order());
        }
        if nvars == 0 {
            order = 0;
        }
        let phi = CoordChange { nvars, order, components };
        if !C::matrix_invertible(&phi.linear_part()) {
            return Err(Error::SingularLinearPart);
        }
        Ok(phi)
    }

    pub fn identity(nvars: usize, order: u32) -> Self {
        CoordChange {
            nvars,
            order,
            components: (0..nvars).map(|i| Series::var(nvars, order, i)).collect(),
        }
    }

    /// `x_i ↦ Σ_j rows[i][j] x_j`.
    pub fn linear(rows: &[Vec<C>], order: u32) -> Result<Self> {
        let n = rows.len();
        let components = rows
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::Dimension("linear map must be square".into()));
                }
                Ok(Series::from_terms(
                    n,
                    order,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (Monomial::var(j), c.clone())),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &[Series<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Series<C> {
        &self.components[i]
    }

    /// Jacobian at the origin: `rows[i][j] = ∂φ_i/∂x_j (0)`.
    pub fn linear_part(&self) -> Vec<Vec<C>> {
        self.components
            .iter()
            .map(|c| (0..self.nvars).map(|j| c.coeff(Monomial::var(j))).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(i, c)| c.terms().len() == 1 && c.terms()[0].0 == Monomial::var(i) && c.terms()[0].1 == C::one())
    }

    /// The map `self ∘ other`: pulling back by it equals pulling back by
    /// `self` first and then by `other`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| compose(c, other))
            .collect::<Result<Vec<_>>>()?;
        let order = components.iter().map(|c| c.order()).min().unwrap_or(0);
        Ok(CoordChange { nvars: self.nvars, order, components })
    }

    pub fn truncate(&self, order: u32) -> Self {
        CoordChange {
            nvars: self.nvars,
            order: order.min(self.order),
            components: self.components.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    pub fn agrees_to(&self, other: &Self, order: u32) -> bool {
        self.nvars == other.nvars
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.agrees_to(b, order))
    }
}

impl<C: Coeff> std::fmt::Debug for CoordChange<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.components.iter().map(|c| c.to_string())).finish()
    }
}

/// `f(φ₁, …, φₙ)`, truncated at the smaller of the two orders.
pub fn compose<C: Coeff>(f: &Series<C>, phi: &CoordChange<C>) -> Result<Series<C>> {
    substitute(f, &phi.components)
}

/// Substitutes `images[i]` for variable `i`. The images only need zero
/// constant terms, not an invertible linear part.
pub fn substitute<C: Coeff>(f: &Series<C>, images: &[Series<C>]) -> Result<Series<C>> {
    if images.len() != f.nvars() {
        return Err(Error::VarMismatch { left: f.nvars(), right: images.len() });
    }
    let target = images.first().map_or(f.nvars(), |s| s.nvars());
    let mut order = f.order();
    for (i, s) in images.iter().enumerate() {
        if s.nvars() != target {
            return Err(Error::VarMismatch { left: s.nvars(), right: target });
        }
        if !s.constant_term().is_zero() {
            return Err(Error::NonzeroConstant { index: i });
        }
        order = order.min(s.order());
    }

    // Variables mapped to themselves are carried through untouched.
    let fixed: Vec<bool> = images
        .iter()
        .enumerate()
        .map(|(i, s)| {
            target == f.nvars()
                && s.terms().len() == 1
                && s.terms()[0].0 == Monomial::var(i)
                && s.terms()[0].1 == C::one()
        })
        .collect();
    let moving: Vec<usize> = (0..f.nvars()).filter(|&i| !fixed[i]).collect();

    let mut groups: BTreeMap<Monomial, Vec<(Monomial, C)>> = BTreeMap::new();
    for (m, c) in f.terms() {
        if m.degree() > order {
            break;
        }
        let (mov, rest) = m.split(&moving);
        groups.entry(mov).or_default().push((rest, c.clone()));
    }

    let mut memo: FxHashMap<Monomial, Series<C>> = FxHashMap::default();
    memo.insert(Monomial::ONE, Series::one(target, order));
    let mut acc: Vec<(Monomial, C)> = Vec::new();
    for (mov, rest) in groups {
        let image = power_image(mov, &moving, images, order, &mut memo);
        let cofactor = Series::from_terms(target, order, rest);
        let prod = C::mul_terms(cofactor.terms(), image.terms(), order);
        acc.extend(prod);
    }
    Ok(Series::from_terms(target, order, acc))
}

fn power_image<C: Coeff>(
    m: Monomial,
    moving: &[usize],
    images: &[Series<C>],
    order: u32,
    memo: &mut FxHashMap<Monomial, Series<C>>,
) -> Series<C> {
    if let Some(s) = memo.get(&m) {
        return s.clone();
    }
    // strip one factor of the last moving variable present, iteratively
    let mut chain = vec![m];
    let mut cur = m;
    let base = loop {
        let v = *moving.iter().rev().find(|&&v| cur.exponent(v) > 0).unwrap();
        cur = cur.lower(v).unwrap();
        if let Some(s) = memo.get(&cur) {
            break s.clone();
        }
        chain.push(cur);
    };
    let mut acc = base;
    for &step in chain.iter().rev() {
        let v = *moving
            .iter()
            .rev()
            .find(|&&v| step.exponent(v) > 0)
            .unwrap();
        let prod = C::mul_terms(acc.terms(), images[v].terms(), order);
        acc = Series::from_terms(acc.nvars(), order, prod);
        memo.insert(step, acc.clone());
    }
    acc
}

impl CoordChange<Rational> {
    /// Compositional inverse: `self ∘ inv = inv ∘ self = id` modulo
    /// `m^{N+1}`. Each correction step fixes at least one more degree.
    pub fn invert(&self) -> Result<Self> {
        let n = self.nvars;
        let order = self.order;
        let lin = RatMatrix::from_rows(self.linear_part());
        let lin_inv = crate::linalg::inverse(&lin).ok_or(Error::SingularLinearPart)?;
        let apply_inv = |v: &[Series]| -> Vec<Series> {
            (0..n)
                .map(|i| {
                    let mut s = Series::zero(n, order);
                    for (j, vj) in v.iter().enumerate() {
                        let c = lin_inv.get(i, j);
                        if !num_traits::Zero::is_zero(c) {
                            s = &s + &vj.scale(c);
                        }
                    }
                    s
                })
                .collect()
        };
        // After the linear start the inverse is right to degree 1; each
        // correction fixes one more degree, so the residual only needs to be
        // computed to the degree being fixed.
        let mut inv = apply_inv(&CoordChange::<Rational>::identity(n, order).components);
        for known in 1..order {
            let target = known + 1;
            let trial: Vec<Series> = inv.iter().map(|s| s.truncate(target)).collect();
            let err: Vec<Series> = self
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    substitute(&c.truncate(target), &trial)
                        .map(|s| &s - &Series::var(n, target, i))
                })
                .collect::<Result<_>>()?;
            if err.iter().any(|e| e.ord().is_some_and(|d| d <= known)) {
                return Err(Error::Contract("coordinate inversion lost a degree".into()));
            }
            let corr = apply_inv(&err);
            inv = inv
                .iter()
                .zip(&corr)
                .map(|(a, b)| a - &b.with_order_unchecked(order))
                .collect();
        }
        let inv = CoordChange { nvars: n, order, components: inv };
        if order > 0 && !self.then(&inv)?.is_identity() {
            return Err(Error::Contract("coordinate inversion failed to converge".into()));
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s(nvars: usize, order: u32, terms: &[(&[u32], Rational)]) -> Series {
        Series::from_exponent_terms(nvars, order, terms.iter().map(|(e, c)| (e.to_vec(), c.clone())))
            .unwrap()
    }

    #[test]
    fn compose_square() {
        let f = s(1, 4, &[(&[2], int(1))]);
        let phi = CoordChange::new(vec![s(1, 4, &[(&[1], int(1)), (&[2], int(1))])]).unwrap();
        let g = compose(&f, &phi).unwrap();
        assert_eq!(g, s(1, 4, &[(&[2], int(1)), (&[3], int(2)), (&[4], int(1))]));
    }

    #[test]
    fn compose_identity() {
        let f = s(2, 6, &[(&[3, 0], int(1)), (&[1, 2], rat(2, 3)), (&[0, 4], int(1))]);
        let id = CoordChange::identity(2, 6);
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn nonzero_constant_rejected() {
        let bad = s(1, 3, &[(&[0], int(1)), (&[1], int(1))]);
        assert!(matches!(CoordChange::new(vec![bad.clone()]), Err(Error::NonzeroConstant { index: 0 })));
        assert!(substitute(&s(1, 3, &[(&[2], int(1))]), &[bad]).is_err());
    }

    #[test]
    fn singular_rejected() {
        let c = s(2, 3, &[(&[1, 0], int(1))]);
        assert_eq!(CoordChange::new(vec![c.clone(), c]).unwrap_err(), Error::SingularLinearPart);
    }

    #[test]
    fn inverses() {
        let phi = CoordChange::new(vec![s(1, 3, &[(&[1], int(2))])]).unwrap();
        let inv = phi.invert().unwrap();
        assert_eq!(inv.component(0), &s(1, 3, &[(&[1], rat(1, 2))]));

        let phi = CoordChange::new(vec![s(1, 3, &[(&[1], int(1)), (&[2], int(1))])]).unwrap();
        let inv = phi.invert().unwrap();
        assert_eq!(
            inv.component(0),
            &s(1, 3, &[(&[1], int(1)), (&[2], int(-1)), (&[3], int(2))])
        );

        let swap = CoordChange::new(vec![
            s(2, 5, &[(&[0, 1], int(1))]),
            s(2, 5, &[(&[1, 0], int(1))]),
        ])
        .unwrap();
        assert_eq!(swap.invert().unwrap(), swap);
    }

    #[test]
    fn inverse_both_sides() {
        let phi = CoordChange::new(vec![
            s(2, 6, &[(&[1, 0], int(1)), (&[0, 1], int(2)), (&[1, 1], int(3))]),
            s(2, 6, &[(&[0, 1], int(-1)), (&[2, 0], rat(1, 2)), (&[0, 3], int(1))]),
        ])
        .unwrap();
        let inv = phi.invert().unwrap();
        let id = CoordChange::identity(2, 6);
        assert_eq!(phi.then(&inv).unwrap(), id);
        assert_eq!(inv.then(&phi).unwrap(), id);
    }
}

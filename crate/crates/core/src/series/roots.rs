use super::{Coeff, Series};
use crate::error::{Error, Result};
use crate::rational::Rational;

impl<C: Coeff> Series<C> {
    /// Multiplicative inverse of a unit, by Newton iteration
    /// `r ← r·(2 − u·r)`, doubling the known precision each step.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = c0.inverse().ok_or_else(|| Error::NoRationalRoot {
            value: c0.to_string(),
            n: 1,
        })?;
        let n = self.nvars();
        let order = self.order();
        let mut r = Series::constant(n, 0, inv0);
        let mut known = 0u32;
        while known < order {
            known = (2 * known + 1).min(order);
            let u = self.truncate(known);
            let r_ext = r.with_order_unchecked(known);
            let two = Series::constant(n, known, C::from_rational(Rational::from_integer(2.into())));
            r = &r_ext * &(&two - &(&u * &r_ext));
        }
        Ok(r.with_order_unchecked(order))
    }

    /// `r` with `rⁿ = self` modulo `m^{N+1}` and `r(0)` the ring's chosen
    /// n-th root of the constant term. Newton iteration on jets,
    /// `r ← r − (rⁿ − u)/(n·rⁿ⁻¹)`, doubling precision per step.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("root degree must be positive".into()));
        }
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let root0 = c0.nth_root(n).ok_or_else(|| Error::NoRationalRoot {
            value: c0.to_string(),
            n,
        })?;
        if n == 1 {
            return Ok(self.clone());
        }
        let nv = self.nvars();
        let order = self.order();
        let n_rat = Rational::from_integer(n.into());
        let mut r = Series::constant(nv, 0, root0);
        let mut known = 0u32;
        while known < order {
            known = (2 * known + 1).min(order);
            let u = self.truncate(known);
            let r_ext = r.with_order_unchecked(known);
            let r_pow = r_ext.pow(n - 1);
            let residual = &(&r_pow * &r_ext) - &u;
            let denom = r_pow.scale(&n_rat).inverse()?;
            r = &r_ext - &(&residual * &denom);
        }
        Ok(r.with_order_unchecked(order))
    }
}

use super::compose::substitute;
use super::Series;
use crate::error::{Error, Result};
use crate::linalg::{inverse, RatMatrix};
use crate::rational::Rational;

/// Solves `∂f/∂y = 0` for the fiber variables `y = w(x)`, where `x` are the
/// remaining (base) variables.
///
/// Returns one series per fiber variable, depending on base variables only,
/// with `w(0) = 0` and `∂_y f(x, w(x)) ≡ 0` to the order of the partials
/// (`N − 1`). Requires the fiber block of the Hessian at the origin to be
/// invertible. Each pass solves the constant linear system given by that
/// block and fixes one more degree.
pub fn implicit_solve(f: &Series, fiber: &[usize]) -> Result<Vec<Series>> {
    let n = f.nvars();
    for &v in fiber {
        if v >= n {
            return Err(Error::BadIndex { index: v, nvars: n });
        }
    }
    let r = fiber.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    let grads: Vec<Series> = fiber.iter().map(|&v| f.partial(v)).collect::<Result<_>>()?;
    let order = grads[0].order();

    for g in &grads {
        if !num_traits::Zero::is_zero(&g.constant_term()) {
            return Err(Error::NotLgPair("fiber gradient is nonzero at the origin".into()));
        }
    }
    let block = RatMatrix::from_rows(
        grads
            .iter()
            .map(|g| {
                fiber
                    .iter()
                    .map(|&v| g.coeff(super::Monomial::var(v)))
                    .collect()
            })
            .collect(),
    );
    let block_inv = inverse(&block).ok_or(Error::DegenerateFiberHessian)?;

    let mut w: Vec<Series> = vec![Series::zero(n, order); r];
    for _ in 0..=order + 1 {
        let images: Vec<Series> = (0..n)
            .map(|v| match fiber.iter().position(|&y| y == v) {
                Some(k) => w[k].clone(),
                None => Series::var(n, order, v),
            })
            .collect();
        let residual: Vec<Series> = grads
            .iter()
            .map(|g| substitute(g, &images))
            .collect::<Result<_>>()?;
        if residual.iter().all(Series::is_zero) {
            return Ok(w);
        }
        for (k, wk) in w.iter_mut().enumerate() {
            let mut corr = Series::zero(n, order);
            for (j, res) in residual.iter().enumerate() {
                let c: &Rational = block_inv.get(k, j);
                if !num_traits::Zero::is_zero(c) {
                    corr = &corr + &res.scale(c);
                }
            }
            *wk = &*wk - &corr;
        }
    }
    Err(Error::Contract("implicit solve failed to converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s(order: u32, terms: &[(&[u32], Rational)]) -> Series {
        Series::from_exponent_terms(2, order, terms.iter().map(|(e, c)| (e.to_vec(), c.clone())))
            .unwrap()
    }

    #[test]
    fn linear_coupling() {
        // y² + 2xy, solve in y (variable 1)
        let f = s(6, &[(&[0, 2], int(1)), (&[1, 1], int(2))]);
        let w = implicit_solve(&f, &[1]).unwrap();
        assert_eq!(w[0], s(5, &[(&[1, 0], int(-1))]));
    }

    #[test]
    fn already_centered() {
        let f = s(6, &[(&[0, 2], int(3)), (&[3, 0], int(1))]);
        let w = implicit_solve(&f, &[1]).unwrap();
        assert!(w[0].is_zero());
    }

    #[test]
    fn quadratic_coupling() {
        // y² + x²y, order 4
        let f = s(4, &[(&[0, 2], int(1)), (&[2, 1], int(1))]);
        let w = implicit_solve(&f, &[1]).unwrap();
        assert_eq!(w[0], s(3, &[(&[2, 0], rat(-1, 2))]));
        // substitute back: ∂_y f(x, w) vanishes to order 3
        let dy = f.partial(1).unwrap();
        let back = substitute(&dy, &[Series::var(2, 3, 0), w[0].clone()]).unwrap();
        assert!(back.is_zero());
    }

    #[test]
    fn singular_block() {
        let f = s(6, &[(&[0, 3], int(1)), (&[2, 0], int(1))]);
        assert_eq!(implicit_solve(&f, &[1]).unwrap_err(), Error::DegenerateFiberHessian);
    }
}

//! Hessian analysis, the relative Morse iteration, and the splitting lemma.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::milnor::LgPair;
use crate::quad::{congruence_diagonalize, QuadForm};
use crate::rational::Rational;
use crate::series::{compose, implicit_solve, CoordChange, Monomial, Series};

/// Second-order data of a germ at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianData {
    /// `H_ij = ∂_i ∂_j f (0)`.
    pub h: RatMatrix,
    /// `H / 2`, the Gram matrix of the quadratic part.
    pub gram: RatMatrix,
    pub rank: usize,
    pub corank: usize,
    /// `P = [K | E·Q]`: kernel vectors first, then the congruence-diagonal
    /// directions. `Pᵀ·gram·P = diag(0, …, 0, d₁, …, d_rank)`.
    pub witness: RatMatrix,
    /// Nonzero diagonal entries `d₁, …, d_rank`.
    pub diag: Vec<Rational>,
}

pub fn hessian(p: &LgPair) -> Result<HessianData> {
    let f = p.f();
    let n = p.nvars();
    let mut gram = RatMatrix::zeros(n, n);
    for (m, c) in f.homogeneous(2).terms() {
        let e = m.exponents(n);
        let vars: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        match vars[..] {
            [i] => gram.set(i, i, c.clone()),
            [i, j] => {
                let half = c / Rational::from_integer(2.into());
                gram.set(i, j, half.clone());
                gram.set(j, i, half);
            }
            _ => unreachable!("degree-two monomial"),
        }
    }
    let mut h = gram.clone();
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, gram.get(i, j) * Rational::from_integer(2.into()));
        }
    }

    let red = linalg::rref(&gram)?;
    let kernel = linalg::kernel(&gram)?;
    let piv = &red.pivots;
    let block = RatMatrix::from_rows(
        piv.iter()
            .map(|&i| piv.iter().map(|&j| gram.get(i, j).clone()).collect())
            .collect(),
    );
    let (diag, q) = congruence_diagonalize(&block)?;
    if diag.iter().any(Zero::is_zero) {
        return Err(Error::Contract("principal block on pivot columns is singular".into()));
    }
    let c = kernel.len();
    let mut witness = RatMatrix::zeros(n, n);
    for (col, v) in kernel.iter().enumerate() {
        for (row, x) in v.iter().enumerate() {
            witness.set(row, col, x.clone());
        }
    }
    for (a, &row) in piv.iter().enumerate() {
        for b in 0..piv.len() {
            witness.set(row, c + b, q.get(a, b).clone());
        }
    }
    Ok(HessianData { h, gram, rank: piv.len(), corank: c, witness, diag })
}

type SMat = Vec<Vec<Series>>;

fn smat_mul(a: &SMat, b: &SMat) -> SMat {
    let r = a.len();
    let k = b.len();
    let c = b.first().map_or(0, Vec::len);
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let mut acc = Series::zero(a[i][0].nvars(), a[i][0].order());
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc = &acc + &(&a[i][l] * &b[l][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn smat_const(m: &RatMatrix, nvars: usize, order: u32) -> SMat {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Series::constant(nvars, order, m.get(i, j).clone())).collect())
        .collect()
}

fn smat_is_zero(m: &SMat) -> bool {
    m.iter().all(|row| row.iter().all(Series::is_zero))
}

/// Output of the relative Morse iteration on `h(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeMorse {
    /// Fiber variable indices, in the order used for `q`.
    pub fiber: Vec<usize>,
    /// Constant fiber Gram matrix.
    pub q: QuadForm,
    /// `h ∘ forward = q(y)`.
    pub forward: CoordChange,
    /// `h = q ∘ tau`, i.e. `h ∘ tau⁻¹ = q(y)`.
    pub tau: CoordChange,
    pub order: u32,
}

/// Relative formal Morse lemma for `h` centered along the base:
/// `h(x, 0) = 0`, `∂_y h(x, 0) = 0`, invertible fiber Hessian at 0.
///
/// Step `k` removes the part of fiber degree `k`: writing it as
/// `Σ y_i g_i` (each monomial assigned to the lowest-index fiber variable
/// dividing it) and substituting `y ↦ y − ½B(x)⁻¹g`, where `B(x)` is the
/// fiber Gram matrix. The remaining `yᵀB(x)y` is brought to `yᵀB(0)y` by
/// `y ↦ (I + B(0)⁻¹(B(x) − B(0)))^{-1/2} y`.
///
/// Works internally to order `N + 1` when `h` is known that far, so that
/// runs at `N` and `N + 1` agree modulo `m^{N+1}`. If `h` is only known to
/// order `N`, the degree-`N` part of `tau` is not determined by `h` (it
/// only affects `q ∘ tau` beyond `m^{N+1}`) and is some valid choice.
pub fn relative_morse(h: &Series, fiber: &[usize], order: u32) -> Result<RelativeMorse> {
    let n = h.nvars();
    for (i, &v) in fiber.iter().enumerate() {
        if v >= n {
            return Err(Error::BadIndex { index: v, nvars: n });
        }
        if fiber[..i].contains(&v) {
            return Err(Error::Dimension(format!("fiber variable {v} listed twice")));
        }
    }
    if h.order() < order {
        return Err(Error::Precision { needed: order, have: h.order() });
    }
    let prec = h.order().min(order + 1);
    let h = h.truncate(prec);
    if h.terms().iter().any(|(m, _)| m.degree_in(fiber) < 2) {
        return Err(Error::NotLgPair("function is not centered along the fiber".into()));
    }
    let r = fiber.len();

    // B(x) from the part of fiber degree two.
    let mut b: SMat = vec![vec![Series::zero(n, prec); r]; r];
    let mut b0 = RatMatrix::zeros(r, r);
    for (m, c) in h.part_of_degree_in(fiber, 2).terms() {
        let (inside, base) = m.split(fiber);
        let idx: Vec<usize> = (0..r).filter(|&i| inside.exponent(fiber[i]) > 0).collect();
        let (i, j, val) = match idx[..] {
            [i] => (i, i, c.clone()),
            [i, j] => (i, j, c / Rational::from_integer(2.into())),
            _ => unreachable!("fiber degree two"),
        };
        let term = Series::monomial(n, prec, base, val.clone());
        b[i][j] = &b[i][j] + &term;
        if i != j {
            b[j][i] = &b[j][i] + &term;
        }
        if base == Monomial::ONE {
            b0.set(i, j, val.clone());
            b0.set(j, i, val);
        }
    }
    let b0_inv = linalg::inverse(&b0).ok_or(Error::DegenerateFiberHessian)?;

    // C = B(0)⁻¹(B − B(0)), entries in m.
    let mut b1 = b.clone();
    for (i, row) in b1.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = &*e - &Series::constant(n, prec, b0.get(i, j).clone());
        }
    }
    let c_mat = smat_mul(&smat_const(&b0_inv, n, prec), &b1);

    // B⁻¹ = (I + C)⁻¹ B(0)⁻¹ by the Neumann series.
    let identity = smat_const(&RatMatrix::identity(r), n, prec);
    let mut inv_unit = identity.clone();
    let mut power = identity.clone();
    let mut sign = Rational::one();
    loop {
        power = smat_mul(&power, &c_mat);
        if smat_is_zero(&power) {
            break;
        }
        sign = -sign;
        for i in 0..r {
            for j in 0..r {
                inv_unit[i][j] = &inv_unit[i][j] + &power[i][j].scale(&sign);
            }
        }
    }
    let b_inv = smat_mul(&inv_unit, &smat_const(&b0_inv, n, prec));
    let half = Rational::new(1.into(), 2.into());

    let mut cur = h.clone();
    let mut forward = CoordChange::identity(n, prec);
    for k in 3..=prec {
        let defect = cur.part_of_degree_in(fiber, k);
        if defect.is_zero() {
            continue;
        }
        let mut g: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); r];
        for (m, c) in defect.terms() {
            let i = (0..r)
                .find(|&i| m.exponent(fiber[i]) > 0)
                .ok_or_else(|| Error::Contract("defect term without a fiber variable".into()))?;
            g[i].push((m.lower(fiber[i]).unwrap(), c.clone()));
        }
        let g: Vec<Series> = g.into_iter().map(|t| Series::from_terms(n, prec, t)).collect();
        let mut comps: Vec<Series> = (0..n).map(|v| Series::var(n, prec, v)).collect();
        for i in 0..r {
            let mut lambda = Series::zero(n, prec);
            for (j, gj) in g.iter().enumerate() {
                if !gj.is_zero() && !b_inv[i][j].is_zero() {
                    lambda = &lambda + &(&b_inv[i][j] * gj);
                }
            }
            comps[fiber[i]] = &comps[fiber[i]] - &lambda.scale(&half);
        }
        let phi = CoordChange::new(comps)?;
        cur = compose(&cur, &phi)?;
        forward = forward.then(&phi)?;
        if !cur.part_of_degree_in(fiber, k).is_zero() {
            return Err(Error::Contract(format!("fiber degree {k} survived its correction")));
        }
    }

    // (I + C)^{-1/2} by the binomial series.
    let mut root = identity.clone();
    let mut power = identity;
    let mut coeff = Rational::one();
    let mut j = 0i64;
    loop {
        power = smat_mul(&power, &c_mat);
        if smat_is_zero(&power) {
            break;
        }
        coeff *= Rational::new((-1 - 2 * j).into(), (2 * (j + 1)).into());
        j += 1;
        for a in 0..r {
            for bb in 0..r {
                root[a][bb] = &root[a][bb] + &power[a][bb].scale(&coeff);
            }
        }
    }
    let mut comps: Vec<Series> = (0..n).map(|v| Series::var(n, prec, v)).collect();
    for a in 0..r {
        let mut s = Series::zero(n, prec);
        for (bb, &y) in fiber.iter().enumerate() {
            s = &s + &(&root[a][bb] * &Series::var(n, prec, y));
        }
        comps[fiber[a]] = s;
    }
    let psi = CoordChange::new(comps)?;
    forward = forward.then(&psi)?;

    let q = QuadForm::new(b0.clone())?;
    let check = compose(&h, &forward)?;
    let target = Series::quadratic(n, prec, 0, &embed_gram(&b0, fiber, n));
    if check != target {
        return Err(Error::Contract("relative Morse normal form does not verify".into()));
    }
    let tau = forward.invert()?;
    Ok(RelativeMorse {
        fiber: fiber.to_vec(),
        q,
        forward: forward.truncate(order),
        tau: tau.truncate(order),
        order,
    })
}

fn embed_gram(b0: &RatMatrix, fiber: &[usize], n: usize) -> Vec<Vec<Rational>> {
    let mut g = vec![vec![Rational::zero(); n]; n];
    for (a, &i) in fiber.iter().enumerate() {
        for (b, &j) in fiber.iter().enumerate() {
            g[i][j] = b0.get(a, b).clone();
        }
    }
    g
}

/// `f ∘ witness = residual(u) + Σ d_k v_k²` modulo `m^{N+1}`, with the
/// kernel coordinates `u` first.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub quad: QuadForm,
    pub residual: LgPair,
    pub witness: CoordChange,
    pub order: u32,
    pub hessian: HessianData,
}

impl SplitResult {
    pub fn corank(&self) -> usize {
        self.residual.nvars()
    }

    pub fn rank(&self) -> usize {
        self.quad.dim()
    }

    /// `residual(u) + q(v)` in the original number of variables.
    pub fn normal_form(&self) -> Series {
        let c = self.corank();
        let n = c + self.rank();
        let slots: Vec<usize> = (0..c).collect();
        let g = self.residual.f().embed(n, &slots).expect("residual fits");
        &g + &self.quad.to_series(n, self.order, c)
    }
}

/// Splitting lemma: reorders coordinates so the Hessian kernel comes
/// first, centers the non-degenerate directions with the implicit function
/// theorem, runs the relative Morse iteration on them, and verifies the
/// assembled coordinate change before returning.
pub fn split(p: &LgPair, order: u32) -> Result<SplitResult> {
    let f = p.f();
    let n = p.nvars();
    if f.order() < order {
        return Err(Error::Precision { needed: order, have: f.order() });
    }
    let work = f.order().min(order + 1);
    let f = f.truncate(work);
    let hd = hessian(p)?;
    let c = hd.corank;

    let lin = CoordChange::linear(&hd.witness.to_rows(), work)?;
    let f1 = compose(&f, &lin)?;
    let fiber: Vec<usize> = (c..n).collect();

    let (witness, residual) = if fiber.is_empty() {
        (lin, f1)
    } else {
        // A change of w beyond its known order moves f1(u, v + w) only
        // beyond `work`, since ∂_v f1 vanishes at the origin.
        let w = implicit_solve(&f1, &fiber)?;
        let mut comps: Vec<Series> = (0..n).map(|v| Series::var(n, work, v)).collect();
        for (k, &v) in fiber.iter().enumerate() {
            comps[v] = &comps[v] + &w[k].with_order_unchecked(work);
        }
        let recenter = CoordChange::new(comps)?;
        let f2 = compose(&f1, &recenter)?;
        let g = f2.part_of_degree_in(&fiber, 0);
        let h = &f2 - &g;
        let rm = relative_morse(&h, &fiber, order)?;
        let witness = lin.then(&recenter)?.then(&rm.forward)?;
        (witness, g)
    };
    let witness = witness.truncate(order);
    let residual = residual.truncate(order).restrict(&(0..c).collect::<Vec<_>>());
    let quad = QuadForm::diagonal(&hd.diag)?;

    let result = SplitResult {
        quad,
        residual: LgPair::new(residual)?,
        witness,
        order,
        hessian: hd,
    };
    let lhs = compose(&p.f().truncate(order), &result.witness)?;
    if !lhs.agrees_to(&result.normal_form(), order) {
        return Err(Error::Contract("split witness does not verify".into()));
    }
    Ok(result)
}

/// The split read as a minimal model: the residual has zero Hessian.
pub fn minimal_model(p: &LgPair, order: u32) -> Result<SplitResult> {
    split(p, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_series;
    use crate::rational::{int, rat};

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pair(text: &str, v: &[&str], order: u32) -> LgPair {
        LgPair::new(parse_series(text, &vars(v), order).unwrap()).unwrap()
    }

    #[test]
    fn hessian_examples() {
        let h = hessian(&pair("x^3 + y^2", &["x", "y"], 8)).unwrap();
        assert_eq!((h.rank, h.corank), (1, 1));
        assert_eq!(h.diag, vec![int(1)]);
        assert_eq!(h.witness, RatMatrix::identity(2));

        let h = hessian(&pair("x^2 + y^2 + z^2", &["x", "y", "z"], 8)).unwrap();
        assert_eq!((h.rank, h.corank), (3, 0));

        let h = hessian(&pair("x*y", &["x", "y"], 8)).unwrap();
        assert_eq!(h.rank, 2);
        let prod = &h.diag[0] * &h.diag[1];
        assert!(prod < int(0));
        let d = h.witness.transpose().mul(&h.gram).unwrap().mul(&h.witness).unwrap();
        assert!(d.get(0, 1).is_zero());
    }

    #[test]
    fn morse_in_one_fiber_variable() {
        let y = vars(&["y"]);
        let h = parse_series("y^2 + y^3", &y, 8).unwrap();
        let rm = relative_morse(&h, &[0], 8).unwrap();
        assert_eq!(rm.q, QuadForm::standard(1));
        // tau(y)² = h
        let t = rm.tau.component(0);
        assert_eq!(&(t * t), &h);
        assert_eq!(t.coeff_of(&[2]), rat(1, 2));
    }

    #[test]
    fn pure_quadratic_gives_identity() {
        let v = vars(&["x", "y"]);
        let h = parse_series("2*x^2 + x*y - y^2", &v, 6).unwrap();
        let rm = relative_morse(&h, &[0, 1], 6).unwrap();
        assert!(rm.tau.is_identity());
    }

    #[test]
    fn unit_bundle_is_normalized() {
        let v = vars(&["x", "y"]);
        let h = parse_series("y^2 + x*y^2", &v, 7).unwrap();
        let rm = relative_morse(&h, &[1], 7).unwrap();
        assert_eq!(rm.q, QuadForm::standard(1));
        let sqrt = parse_series("1 + x", &v, 7).unwrap().nth_root(2).unwrap();
        let expect = &sqrt * &Series::var(2, 7, 1);
        assert_eq!(rm.tau.component(1), &expect);
        assert_eq!(rm.tau.component(0), &Series::var(2, 7, 0));
    }

    #[test]
    fn orders_agree() {
        let v = vars(&["x", "y", "z"]);
        let h = parse_series("y^2 - 3*z^2 + y*z + x*y^2 + y^3 + x^2*z^2 + y*z^3 + x*y^4", &v, 12).unwrap();
        let a = relative_morse(&h, &[1, 2], 8).unwrap();
        let b = relative_morse(&h, &[1, 2], 9).unwrap();
        assert!(a.tau.agrees_to(&b.tau, 8));
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn split_examples() {
        let s = split(&pair("x^3 + y^2", &["x", "y"], 12), 10).unwrap();
        assert_eq!(s.quad, QuadForm::standard(1));
        assert_eq!(s.residual.f().to_string(), "x^3");
        assert!(s.witness.is_identity());

        let s = split(&pair("x^3 + y^4", &["x", "y"], 12), 10).unwrap();
        assert_eq!(s.quad.dim(), 0);
        assert_eq!(s.residual.f().to_string(), "x^3 + y^4");

        let s = split(&pair("x^2 + y^2 + z^2", &["x", "y", "z"], 12), 10).unwrap();
        assert_eq!(s.corank(), 0);
        assert_eq!(s.rank(), 3);
    }

    #[test]
    fn split_mixed_terms() {
        // μ = 2 after splitting: a coupled A2 in disguise
        let p = pair("x^3 + y^2 + x^2*y + x*y^3 + 2*x*y^2", &["x", "y"], 12);
        let s = split(&p, 10).unwrap();
        assert_eq!(s.corank(), 1);
        assert_eq!(s.residual.f().ord(), Some(3));
        let r = crate::milnor::milnor_number(&s.residual, 8);
        assert_eq!(r.mu, Some(2));
    }

    #[test]
    fn split_needs_precision() {
        let p = pair("x^3 + y^2", &["x", "y"], 6);
        assert!(matches!(split(&p, 8), Err(Error::Precision { .. })));
    }

    #[test]
    fn uncentered_fiber_rejected() {
        let v = vars(&["x", "y"]);
        let h = parse_series("y^2 + x^2*y", &v, 6).unwrap();
        assert!(matches!(relative_morse(&h, &[1], 6), Err(Error::NotLgPair(_))));
        let h = parse_series("x*y^2", &v, 6).unwrap();
        assert_eq!(relative_morse(&h, &[1], 6).unwrap_err(), Error::DegenerateFiberHessian);
    }
}

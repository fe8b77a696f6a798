//! Non-degenerate quadratic forms over ℚ and their stable invariants.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{determinant, rank, RatMatrix};
use crate::rational::{square_class, Rational};
use crate::series::Series;

/// How invariants are read: over ℚ, or formally over ℂ where every nonzero
/// scalar is a square.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Q,
    CFormal,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Q => "q",
            Mode::CFormal => "c-formal",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "q" | "Q" => Ok(Mode::Q),
            "c-formal" | "c" | "C" => Ok(Mode::CFormal),
            _ => Err(format!("unknown mode {s:?} (expected q or c-formal)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `q(v) = vᵀ G v` for a symmetric invertible Gram matrix `G`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadForm {
    gram: RatMatrix,
}

impl QuadForm {
    pub fn new(gram: RatMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::Dimension("Gram matrix must be square and symmetric".into()));
        }
        if rank(&gram) != gram.rows() {
            return Err(Error::DegenerateForm);
        }
        Ok(QuadForm { gram })
    }

    pub fn empty() -> Self {
        QuadForm { gram: RatMatrix::zeros(0, 0) }
    }

    /// `x₁² + … + xₙ²`.
    pub fn standard(n: usize) -> Self {
        QuadForm { gram: RatMatrix::identity(n) }
    }

    /// `⟨a₁, …, aₙ⟩`.
    pub fn diagonal(entries: &[Rational]) -> Result<Self> {
        let mut g = RatMatrix::zeros(entries.len(), entries.len());
        for (i, a) in entries.iter().enumerate() {
            g.set(i, i, a.clone());
        }
        Self::new(g)
    }

    /// Gram `[[0,1],[1,0]]`, i.e. `2xy`.
    pub fn hyperbolic() -> Self {
        QuadForm { gram: RatMatrix::from_i64(&[&[0, 1], &[1, 0]]) }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn bilinear(&self, v: &[Rational], w: &[Rational]) -> Rational {
        let n = self.dim();
        let mut acc = Rational::zero();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let g = self.gram.get(i, j);
                if !g.is_zero() && !w[j].is_zero() {
                    acc += &v[i] * g * &w[j];
                }
            }
        }
        acc
    }

    pub fn eval(&self, v: &[Rational]) -> Rational {
        self.bilinear(v, v)
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.gram).expect("Gram matrix is square")
    }

    /// The form as a polynomial in variables `offset..offset+dim` of an
    /// `nvars`-variable ring.
    pub fn to_series(&self, nvars: usize, order: u32, offset: usize) -> Series {
        Series::quadratic(nvars, order, offset, &self.gram.to_rows())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.gram.get(i, j).is_zero()))
    }
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let d: Vec<String> = (0..self.dim()).map(|i| self.gram.get(i, i).to_string()).collect();
            write!(f, "<{}>", d.join(", "))
        } else {
            write!(f, "{:?}", self.gram)
        }
    }
}

/// Symmetric congruence diagonalization: returns `d` and `P` with
/// `Pᵀ G P = diag(d)`. Pivot rule: the first nonzero diagonal entry of the
/// remaining block; failing that, the first nonzero off-diagonal pair
/// `(i, j)` is made diagonal by `e_i ← e_i + e_j`. A singular `G` yields
/// trailing zeros in `d`.
pub fn congruence_diagonalize(gram: &RatMatrix) -> Result<(Vec<Rational>, RatMatrix)> {
    if !gram.is_symmetric() {
        return Err(Error::Dimension("Gram matrix must be square and symmetric".into()));
    }
    let n = gram.rows();
    let mut a = gram.to_rows();
    let mut p = RatMatrix::identity(n).to_rows();
    let swap = |a: &mut Vec<Vec<Rational>>, p: &mut Vec<Vec<Rational>>, i: usize, k: usize| {
        if i == k {
            return;
        }
        a.swap(i, k);
        for row in a.iter_mut() {
            row.swap(i, k);
        }
        for row in p.iter_mut() {
            row.swap(i, k);
        }
    };
    // e_dst ← e_dst + c·e_src
    let add = |a: &mut Vec<Vec<Rational>>, p: &mut Vec<Vec<Rational>>, dst: usize, src: usize, c: &Rational| {
        for row in a.iter_mut() {
            let v = &row[src] * c;
            row[dst] += v;
        }
        let src_row = a[src].clone();
        for (x, s) in a[dst].iter_mut().zip(&src_row) {
            *x += s * c;
        }
        for row in p.iter_mut() {
            let v = &row[src] * c;
            row[dst] += v;
        }
    };
    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            swap(&mut a, &mut p, i, k);
        } else {
            let pair = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
            let Some((i, j)) = pair else { break };
            add(&mut a, &mut p, i, j, &Rational::one());
            swap(&mut a, &mut p, i, k);
        }
        let pivot = a[k][k].clone();
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let c = -(&a[k][j] / &pivot);
            add(&mut a, &mut p, j, k, &c);
        }
    }
    let d = (0..n).map(|i| a[i][i].clone()).collect();
    Ok((d, RatMatrix::from_rows(p)))
}

/// Diagonal entries and congruence witness of a non-degenerate form.
pub fn diagonalize(q: &QuadForm) -> Result<(Vec<Rational>, RatMatrix)> {
    let (d, p) = congruence_diagonalize(&q.gram)?;
    if d.iter().any(Zero::is_zero) {
        return Err(Error::DegenerateForm);
    }
    Ok((d, p))
}

/// Stable class: rank, its parity, and the discriminant square class
/// (a squarefree integer; always 1 in the formal complex reading).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GwClass {
    pub rank: usize,
    pub parity: u8,
    pub disc: i64,
    pub mode: Mode,
}

impl GwClass {
    pub fn zero(mode: Mode) -> Self {
        GwClass { rank: 0, parity: 0, disc: 1, mode }
    }

    /// Class of `q ⊕ q'`.
    pub fn sum(&self, other: &GwClass) -> Result<GwClass> {
        if self.mode != other.mode {
            return Err(Error::Dimension("classes computed in different modes".into()));
        }
        let disc = square_class(&Rational::from_integer(
            num_bigint::BigInt::from(self.disc) * num_bigint::BigInt::from(other.disc),
        ))?;
        let rank = self.rank + other.rank;
        Ok(GwClass { rank, parity: (rank % 2) as u8, disc, mode: self.mode })
    }
}

impl fmt::Display for GwClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {} (parity {}), disc {}", self.rank, self.parity, self.disc)
    }
}

pub fn gw_class(q: &QuadForm, mode: Mode) -> Result<GwClass> {
    let rank = q.dim();
    let disc = match mode {
        Mode::Q if rank > 0 => square_class(&q.determinant())?,
        _ => 1,
    };
    Ok(GwClass { rank, parity: (rank % 2) as u8, disc, mode })
}

pub fn direct_sum(a: &QuadForm, b: &QuadForm) -> QuadForm {
    QuadForm { gram: a.gram.block_diag(&b.gram) }
}

/// Whether `basis` spans a Lagrangian: independent, `q` vanishing on it,
/// and of half the dimension.
pub fn isotropic_split_check(q: &QuadForm, basis: &[Vec<Rational>]) -> bool {
    let n = q.dim();
    if !n.is_multiple_of(2) || basis.len() != n / 2 || basis.iter().any(|v| v.len() != n) {
        return false;
    }
    if !basis.is_empty() && rank(&RatMatrix::from_rows(basis.to_vec())) != basis.len() {
        return false;
    }
    basis
        .iter()
        .enumerate()
        .all(|(i, v)| basis[i..].iter().all(|w| q.bilinear(v, w).is_zero()))
}

/// The pair `(parity of rank, discriminant class)`.
pub fn orientation_twist(q: &QuadForm, mode: Mode) -> Result<(u8, i64)> {
    let c = gw_class(q, mode)?;
    Ok((c.parity, c.disc))
}

/// Number of hyperbolic planes when the diagonal entries, reduced to
/// square classes, pair off as `⟨a, −a⟩`; `None` otherwise.
pub fn hyperbolic_count(q: &QuadForm) -> Result<Option<usize>> {
    let (d, _) = diagonalize(q)?;
    let mut classes: Vec<i64> = d.iter().map(square_class).collect::<Result<_>>()?;
    let mut pairs = 0;
    while let Some(a) = classes.pop() {
        match classes.iter().position(|&b| b == -a) {
            Some(i) => {
                classes.swap_remove(i);
                pairs += 1;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(pairs))
}

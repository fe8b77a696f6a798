//! Exact linear algebra over ℚ.
//!
//! Dense work goes through fraction-free (Bareiss) elimination on integer
//! rows, normalized back to reduced rationals only at the end. Jet-space
//! ideals use the sparse engine in [`jet`].

pub mod jet;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

pub use jet::{jet_span_dim, JetBasis, JetIdeal, JetLimits};

/// Widest dense matrix `rref` accepts.
pub const MAX_DENSE_COLS: usize = 5000;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows);
        let rows = (0..self.rows)
            .map(|i| self.row(i).iter().chain(other.row(i)).cloned().collect())
            .collect();
        RatMatrix::from_rows_with_cols(rows, self.cols + other.cols)
    }

    fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let r = rows.len();
        RatMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Exact reduced row-echelon form. Pivot choice: leftmost column with a
/// nonzero entry, then the smallest row index carrying it.
pub fn rref(m: &RatMatrix) -> Result<Rref> {
    if m.cols > MAX_DENSE_COLS {
        return Err(Error::Resource(format!(
            "dense elimination limited to {MAX_DENSE_COLS} columns, got {}",
            m.cols
        )));
    }
    Ok(rref_unchecked(m))
}

pub(crate) fn rref_unchecked(m: &RatMatrix) -> Rref {
    let (rows, cols) = (m.rows, m.cols);
    // Row scaling does not change the reduced form, so clear denominators
    // row by row and eliminate over ℤ.
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let d = common_denominator(row.iter());
            row.iter().map(|v| v.numer() * (&d / v.denom())).collect()
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &prow[c] * &row[j] - &factor * &prow[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        // Entries left of `c` in rows below are already zero.
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    for row in a.iter_mut().skip(r) {
        row.iter_mut().for_each(|v| *v = BigInt::zero());
    }

    // Back substitution over ℚ on the fraction-free echelon form.
    let mut q: Vec<Vec<Rational>> = a
        .into_iter()
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect();
    for (i, &c) in pivots.iter().enumerate().rev() {
        let lead = q[i][c].clone();
        for v in q[i][c..].iter_mut() {
            *v /= &lead;
        }
        let prow = q[i].clone();
        for row in q.iter_mut().take(i) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                if !prow[j].is_zero() {
                    row[j] -= &f * &prow[j];
                }
            }
        }
    }
    let rank = pivots.len();
    Rref { matrix: RatMatrix::from_rows_with_cols(q, cols), rank, pivots }
}

pub fn rank(m: &RatMatrix) -> usize {
    rref_unchecked(m).rank
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let aug = m.hstack(&RatMatrix::identity(n));
    let red = rref_unchecked(&aug);
    if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
        return None;
    }
    let rows = (0..n).map(|i| red.matrix.row(i)[n..].to_vec()).collect();
    Some(RatMatrix::from_rows(rows))
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if m.rows != m.cols {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    // Bareiss: the last pivot of the fraction-free form is det up to the
    // row-scaling and swap bookkeeping done here.
    let n = m.rows;
    let mut a: Vec<Vec<Rational>> = m.to_rows();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for i in c + 1..n {
            let f = &a[i][c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    Ok(det)
}

/// Exact particular solution of `m·x = b` with free variables set to zero,
/// or `None` when the system is inconsistent.
pub fn solve_linear(m: &RatMatrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if b.len() != m.rows {
        return Err(Error::Dimension(format!(
            "right-hand side has {} entries, matrix has {} rows",
            b.len(),
            m.rows
        )));
    }
    let col = RatMatrix::from_rows_with_cols(b.iter().map(|v| vec![v.clone()]).collect(), 1);
    let red = rref(&m.hstack(&col))?;
    if red.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); m.cols];
    for (i, &c) in red.pivots.iter().enumerate() {
        x[c] = red.matrix.get(i, m.cols).clone();
    }
    Ok(Some(x))
}

/// Basis of the right kernel, one vector per free column of the reduced
/// form (that column set to 1).
pub fn kernel(m: &RatMatrix) -> Result<Vec<Vec<Rational>>> {
    let red = rref(m)?;
    let free: Vec<usize> = (0..m.cols).filter(|c| !red.pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (i, &p) in red.pivots.iter().enumerate() {
                v[p] = -red.matrix.get(i, f).clone();
            }
            v
        })
        .collect())
}

/// Divides out the content of an integer vector and makes the first
/// nonzero entry positive.
pub(crate) fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
    }
    let negate = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if g.is_zero() {
        return;
    }
    if !g.is_one() || negate {
        let g = if negate { -g } else { g };
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

//! Ideals in the jet space `ℚ[x]/m^{E+1}`.
//!
//! The span of `{ m·g : g a generator, m a monomial }` truncated at degree
//! `E` is echelonized once with columns in ascending monomial order. A row
//! leading in degree `d` projects to zero below `d`, so the pivots in
//! columns of degree ≤ D span the image of the ideal in `ℚ[x]/m^{D+1}` for
//! every `D ≤ E` at once.

use std::collections::BTreeMap;
use std::ops::{Bound, Range};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use super::make_primitive;
use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};
use crate::series::{binomial, monomials_up_to, Monomial, Series};

/// Default bound on the matrix entries one elimination may generate.
pub const DEFAULT_MAX_CELLS: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetLimits {
    pub max_cells: u64,
}

impl Default for JetLimits {
    /// Reads `CRITFORGE_MAX_CELLS` when set.
    fn default() -> Self {
        let max_cells = std::env::var("CRITFORGE_MAX_CELLS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_CELLS);
        JetLimits { max_cells }
    }
}

/// Monomials of degree ≤ E in ascending order, with their column indices.
#[derive(Clone, Debug)]
pub struct JetBasis {
    nvars: usize,
    max_degree: u32,
    monomials: Vec<Monomial>,
    index: FxHashMap<Monomial, u32>,
    offsets: Vec<usize>,
}

impl JetBasis {
    pub fn new(nvars: usize, max_degree: u32) -> Self {
        let monomials = monomials_up_to(nvars, max_degree);
        let index = monomials.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let mut offsets = vec![0; max_degree as usize + 2];
        for m in &monomials {
            offsets[m.degree() as usize + 1] += 1;
        }
        for d in 1..offsets.len() {
            offsets[d] += offsets[d - 1];
        }
        JetBasis { nvars, max_degree, monomials, index, offsets }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, col: usize) -> Monomial {
        self.monomials[col]
    }

    pub fn column(&self, m: Monomial) -> Option<usize> {
        self.index.get(&m).map(|&i| i as usize)
    }

    /// Columns holding monomials of degree exactly `d`.
    pub fn degree_range(&self, d: u32) -> Range<usize> {
        let d = d.min(self.max_degree + 1) as usize;
        self.offsets[d]..self.offsets[(d + 1).min(self.offsets.len() - 1)]
    }

    /// Number of monomials of degree ≤ `d`.
    pub fn count_up_to(&self, d: u32) -> usize {
        self.offsets[(d.min(self.max_degree) + 1) as usize]
    }
}

type Row = Vec<(u32, BigInt)>;

/// Echelonized jet span of an ideal, truncated at degree `E`.
#[derive(Clone, Debug)]
pub struct JetIdeal {
    basis: JetBasis,
    pivots: FxHashMap<u32, Row>,
    per_degree: Vec<usize>,
}

impl JetIdeal {
    /// Every generator must be known modulo `m^{E+1}` at least.
    pub fn new(generators: &[Series], degree: u32, limits: &JetLimits) -> Result<Self> {
        let nvars = match generators.first() {
            Some(g) => g.nvars(),
            None => return Err(Error::Dimension("ideal needs at least one generator".into())),
        };
        for g in generators {
            if g.nvars() != nvars {
                return Err(Error::VarMismatch { left: g.nvars(), right: nvars });
            }
            if g.order() < degree {
                return Err(Error::Precision { needed: degree, have: g.order() });
            }
        }

        // Entries generated before elimination: terms times multipliers.
        let mut cells: u64 = 0;
        for g in generators {
            if let Some(o) = g.ord() {
                if o <= degree {
                    let terms = g.terms().iter().filter(|(m, _)| m.degree() <= degree).count() as u64;
                    let mults = binomial(nvars as u64 + (degree - o) as u64, nvars as u64);
                    cells = cells.saturating_add(terms.saturating_mul(mults));
                }
            }
        }
        if cells > limits.max_cells {
            return Err(Error::Resource(format!(
                "jet elimination at degree {degree} generates {cells} entries, limit {}",
                limits.max_cells
            )));
        }

        let basis = JetBasis::new(nvars, degree);
        let mut ideal = JetIdeal {
            per_degree: vec![0; degree as usize + 1],
            basis,
            pivots: FxHashMap::default(),
        };

        // Integer images of the generators, reused for every multiplier.
        let images: Vec<(u32, Vec<(Monomial, BigInt)>)> = generators
            .iter()
            .filter_map(|g| {
                let o = g.ord()?;
                if o > degree {
                    return None;
                }
                let d = common_denominator(g.terms().iter().map(|(_, c)| c));
                let terms = g
                    .terms()
                    .iter()
                    .filter(|(m, _)| m.degree() <= degree)
                    .map(|(m, c)| (*m, c.numer() * (&d / c.denom())))
                    .collect();
                Some((o, terms))
            })
            .collect();

        // Multipliers by ascending degree keeps early rows short.
        let multipliers = monomials_up_to(nvars, degree);
        for &mult in &multipliers {
            for (o, terms) in &images {
                if mult.degree() + o > degree {
                    continue;
                }
                let room = degree - mult.degree();
                let row: Row = terms
                    .iter()
                    .take_while(|(m, _)| m.degree() <= room)
                    .map(|(m, c)| (ideal.basis.index[&m.mul(mult)], c.clone()))
                    .collect();
                ideal.insert(row);
            }
        }
        Ok(ideal)
    }

    fn insert(&mut self, mut row: Row) {
        loop {
            let Some(&(lead, _)) = row.first() else {
                return;
            };
            match self.pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p),
                None => {
                    let mut vals: Vec<BigInt> = row.iter().map(|(_, c)| c.clone()).collect();
                    make_primitive(&mut vals);
                    for (slot, v) in row.iter_mut().zip(vals) {
                        slot.1 = v;
                    }
                    let d = self.basis.monomials[lead as usize].degree() as usize;
                    self.per_degree[d] += 1;
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    pub fn basis(&self) -> &JetBasis {
        &self.basis
    }

    pub fn degree(&self) -> u32 {
        self.basis.max_degree
    }

    /// Pivot columns of degree exactly `d`.
    pub fn pivots_at(&self, d: u32) -> usize {
        self.per_degree.get(d as usize).copied().unwrap_or(0)
    }

    /// Dimension of the image of the ideal in `ℚ[x]/m^{D+1}`.
    pub fn dim_up_to(&self, d: u32) -> usize {
        self.per_degree.iter().take(d as usize + 1).sum()
    }

    /// Dimension of `ℚ[x]/(J + m^{D+1})`.
    pub fn quotient_dim(&self, d: u32) -> usize {
        self.basis.count_up_to(d) - self.dim_up_to(d)
    }

    /// Whether every monomial of degree `d` lies in `J + m^{d+1}`.
    pub fn covers_degree(&self, d: u32) -> bool {
        d <= self.degree() && self.pivots_at(d) == self.basis.degree_range(d).len()
    }

    /// Quotient dimension per degree `0..=d`.
    pub fn hilbert(&self, d: u32) -> Vec<usize> {
        (0..=d.min(self.degree()))
            .map(|k| self.basis.degree_range(k).len() - self.pivots_at(k))
            .collect()
    }

    /// Non-pivot monomials of degree ≤ `d`: a basis of `ℚ[x]/(J + m^{d+1})`.
    pub fn standard_monomials(&self, d: u32) -> Vec<Monomial> {
        (0..self.basis.count_up_to(d))
            .filter(|c| !self.pivots.contains_key(&(*c as u32)))
            .map(|c| self.basis.monomials[c])
            .collect()
    }

    /// Remainder of `s` modulo `J + m^{d+1}`, written on the standard
    /// monomials. `s` must be known to degree `d`.
    pub fn normal_form(&self, s: &Series, d: u32) -> Result<Vec<(Monomial, Rational)>> {
        if s.nvars() != self.basis.nvars {
            return Err(Error::VarMismatch { left: s.nvars(), right: self.basis.nvars });
        }
        if d > self.degree() {
            return Err(Error::Precision { needed: d, have: self.degree() });
        }
        if s.order() < d {
            return Err(Error::Precision { needed: d, have: s.order() });
        }
        let limit = self.basis.count_up_to(d) as u32;
        let mut v: BTreeMap<u32, Rational> = s
            .terms()
            .iter()
            .filter(|(m, _)| m.degree() <= d)
            .map(|(m, c)| (self.basis.index[m], c.clone()))
            .collect();
        let mut out = Vec::new();
        let mut cursor = Bound::Unbounded;
        loop {
            let next = match cursor {
                Bound::Unbounded => v.iter().next(),
                b => v.range((b, Bound::Unbounded)).next(),
            };
            let Some((&c, coef)) = next else { break };
            cursor = Bound::Excluded(c);
            match self.pivots.get(&c) {
                Some(p) => {
                    let f = coef / Rational::from_integer(p[0].1.clone());
                    for (col, pc) in p.iter() {
                        if *col >= limit {
                            break;
                        }
                        let e = v.entry(*col).or_insert_with(Rational::zero);
                        *e -= &f * Rational::from_integer(pc.clone());
                        if e.is_zero() {
                            v.remove(col);
                        }
                    }
                }
                None => out.push((self.basis.monomials[c as usize], coef.clone())),
            }
        }
        Ok(out)
    }

    /// Whether `s ∈ J + m^{d+1}`.
    pub fn contains(&self, s: &Series, d: u32) -> Result<bool> {
        Ok(self.normal_form(s, d)?.is_empty())
    }
}

/// Cancels the leading entry of `row` against `pivot` (same leading column),
/// keeping integer entries: `a·row − b·pivot` with `a, b` coprime.
fn eliminate(row: &Row, pivot: &Row) -> Row {
    let (a, b) = {
        let (pa, ra) = (&pivot[0].1, &row[0].1);
        let g = pa.gcd(ra);
        let (mut a, mut b) = (pa / &g, ra / &g);
        if a.is_negative() {
            a = -a;
            b = -b;
        }
        (a, b)
    };
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(u32::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(u32::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, if a.is_one() { row[i].1.clone() } else { &a * &row[i].1 }));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(&b * &pivot[j].1)));
            j += 1;
        } else {
            let v = &a * &row[i].1 - &b * &pivot[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    if !a.is_one() {
        let mut vals: Vec<BigInt> = out.iter().map(|(_, c)| c.clone()).collect();
        make_primitive(&mut vals);
        for (slot, v) in out.iter_mut().zip(vals) {
            slot.1 = v;
        }
    }
    out
}

/// `dim_ℚ` of the image of the ideal generated by `generators` in
/// `ℚ[x]/m^{D+1}`.
pub fn jet_span_dim(generators: &[Series], d: u32) -> Result<usize> {
    if generators.is_empty() {
        return Ok(0);
    }
    Ok(JetIdeal::new(generators, d, &JetLimits::default())?.dim_up_to(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn s(nvars: usize, order: u32, terms: &[(&[u32], i64)]) -> Series {
        Series::from_exponent_terms(nvars, order, terms.iter().map(|(e, c)| (e.to_vec(), int(*c))))
            .unwrap()
    }

    #[test]
    fn basis_layout() {
        let b = JetBasis::new(2, 3);
        assert_eq!(b.len(), 10);
        assert_eq!(b.degree_range(2), 3..6);
        assert_eq!(b.count_up_to(1), 3);
        assert_eq!(b.monomial(3), Monomial::from_exponents(&[2, 0]));
    }

    #[test]
    fn span_of_partials_of_a_cusp() {
        // ∂(x³ + y²) = (3x², 2y)
        let gens = vec![s(2, 10, &[(&[2, 0], 3)]), s(2, 10, &[(&[0, 1], 2)])];
        let j = JetIdeal::new(&gens, 4, &JetLimits::default()).unwrap();
        assert_eq!(j.quotient_dim(1), 2);
        assert_eq!(j.quotient_dim(4), 2);
        assert!(j.covers_degree(2));
        assert!(!j.covers_degree(1));
        assert_eq!(j.hilbert(3), vec![1, 1, 0, 0]);
        assert_eq!(
            j.standard_monomials(3),
            vec![Monomial::ONE, Monomial::var(0)]
        );
    }

    #[test]
    fn normal_form_reduces_to_standard_monomials() {
        // J = (x² + y, y²)
        let gens = vec![s(2, 8, &[(&[2, 0], 1), (&[0, 1], 1)]), s(2, 8, &[(&[0, 2], 1)])];
        let j = JetIdeal::new(&gens, 6, &JetLimits::default()).unwrap();
        let nf = j.normal_form(&s(2, 8, &[(&[0, 1], 1)]), 6).unwrap();
        // y ≡ −x²
        assert_eq!(nf, vec![(Monomial::from_exponents(&[2, 0]), int(-1))]);
        assert!(j.contains(&s(2, 8, &[(&[4, 0], 1)]), 6).unwrap());
        assert_eq!(j.quotient_dim(6), 4);
    }

    #[test]
    fn precision_and_resources() {
        let gens = vec![s(1, 3, &[(&[2], 1)])];
        assert!(matches!(
            JetIdeal::new(&gens, 5, &JetLimits::default()),
            Err(Error::Precision { .. })
        ));
        let tight = JetLimits { max_cells: 1 };
        assert!(matches!(JetIdeal::new(&gens, 3, &tight), Err(Error::Resource(_))));
    }

    #[test]
    fn span_dim_counts() {
        let gens = vec![s(2, 6, &[(&[1, 0], 1)]), s(2, 6, &[(&[0, 1], 1)])];
        assert_eq!(jet_span_dim(&gens, 3).unwrap(), 9);
        assert_eq!(jet_span_dim(&[s(1, 5, &[(&[1], 1)])], 3).unwrap(), 3);
        assert_eq!(jet_span_dim(&[], 3).unwrap(), 0);
        let gens = vec![s(2, 6, &[(&[2, 0], 3)]), s(2, 6, &[(&[0, 3], 4)])];
        assert_eq!(jet_span_dim(&gens, 4).unwrap(), 9);
    }
}

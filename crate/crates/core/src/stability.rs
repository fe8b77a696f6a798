//! Thom–Sebastiani sums, stabilization by quadratic forms, and the
//! invariants that survive stabilization.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::milnor::{milnor_number, Inconclusive, LgPair, DEFAULT_CAP};
use crate::morse::split;
use crate::quad::{gw_class, GwClass, Mode, QuadForm};
use crate::series::{compose, CoordChange, Series};

/// `f(x) + g(y)` on disjoint blocks of variables, `x` first.
pub fn ts_sum(p: &LgPair, r: &LgPair) -> Result<LgPair> {
    let (a, b) = (p.nvars(), r.nvars());
    let n = a + b;
    let order = p.order().min(r.order());
    let f = p.f().truncate(order).embed(n, &(0..a).collect::<Vec<_>>())?;
    let g = r.f().truncate(order).embed(n, &(a..n).collect::<Vec<_>>())?;
    LgPair::new(&f + &g)
}

/// A pair together with the class of the form it was stabilized by.
#[derive(Clone, Debug, PartialEq)]
pub struct Stabilized {
    pub pair: LgPair,
    pub acting: GwClass,
}

/// `f ⊞ q` with `q` in fresh variables appended after those of `f`.
pub fn stabilize(p: &LgPair, q: &QuadForm, mode: Mode) -> Result<Stabilized> {
    let qs = LgPair::new(q.to_series(q.dim(), p.order(), 0))?;
    Ok(Stabilized { pair: ts_sum(p, &qs)?, acting: gw_class(q, mode)? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StableInvariants {
    pub nvars: usize,
    pub order: u32,
    pub corank: usize,
    pub mu: usize,
    pub tjurina: usize,
    pub hilbert: Vec<usize>,
    pub certified_at: u32,
    /// Class of the split-off non-degenerate form.
    pub quad_gw: GwClass,
    pub total_dim_parity: u8,
    /// Lowest degree of the residual, `None` when it vanishes to order N.
    pub multiplicity: Option<u32>,
    /// Residual jet with the normalization used for comparison.
    pub residual: Series,
}

fn undecided(why: Inconclusive) -> Error {
    match why {
        Inconclusive::ResourceLimit { message, .. } => Error::Resource(message),
        other => Error::NonIsolated(other.checked_to()),
    }
}

/// Scales the residual so its lowest-degree part has coefficient 1 when
/// that part is a single term.
pub fn normalize_residual(s: &Series) -> Series {
    let Some(d) = s.ord() else {
        return s.clone();
    };
    let lead = s.homogeneous(d);
    match lead.terms() {
        [(_, c)] if !c.is_one() => s.scale(&c.recip()),
        _ => s.clone(),
    }
}

/// Splits at order `order` and computes the singularity invariants of the
/// residual.
pub fn stable_invariants(p: &LgPair, order: u32, mode: Mode) -> Result<StableInvariants> {
    let s = split(p, order)?;
    let report = milnor_number(&s.residual, DEFAULT_CAP);
    let (Some(mu), Some(certified_at)) = (report.mu, report.certified_at) else {
        return Err(undecided(report.inconclusive.expect("inconclusive report")));
    };
    let tjurina = report
        .tjurina
        .ok_or_else(|| Error::Contract("Tjurina number missing for a certified algebra".into()))?;
    Ok(StableInvariants {
        nvars: p.nvars(),
        order,
        corank: s.corank(),
        mu,
        tjurina,
        hilbert: report.hilbert,
        certified_at,
        quad_gw: gw_class(&s.quad, mode)?,
        total_dim_parity: (p.nvars() % 2) as u8,
        multiplicity: s.residual.f().ord(),
        residual: normalize_residual(s.residual.f()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A stable invariant differs; the pairs are not stably equivalent.
    Distinguished { invariant: &'static str, left: String, right: String },
    /// Every checked invariant agrees. The residual jet comparison is
    /// reported but not decisive, since equivalent germs can have different
    /// residual jets.
    ConsistentToOrder { order: u32, residual_jets_match: bool },
}

impl Verdict {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, Verdict::Distinguished { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Distinguished { invariant, left, right } => {
                write!(f, "DISTINGUISHED by {invariant} ({left} vs {right})")
            }
            Verdict::ConsistentToOrder { order, .. } => write!(f, "CONSISTENT_TO_ORDER({order})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StableComparison {
    pub verdict: Verdict,
    pub left: StableInvariants,
    pub right: StableInvariants,
}

fn fmt_opt(v: Option<u32>) -> String {
    v.map_or_else(|| "inf".to_string(), |d| d.to_string())
}

fn first_difference(a: &StableInvariants, b: &StableInvariants) -> Option<Verdict> {
    let diff = |invariant, left: String, right: String| {
        (left != right).then_some(Verdict::Distinguished { invariant, left, right })
    };
    diff("corank", a.corank.to_string(), b.corank.to_string())
        .or_else(|| diff("mu", a.mu.to_string(), b.mu.to_string()))
        .or_else(|| diff("tjurina", a.tjurina.to_string(), b.tjurina.to_string()))
        .or_else(|| diff("hilbert", format!("{:?}", a.hilbert), format!("{:?}", b.hilbert)))
        .or_else(|| diff("multiplicity", fmt_opt(a.multiplicity), fmt_opt(b.multiplicity)))
}

/// Necessary-condition check for stable equivalence at order `order`.
pub fn stable_compare(p1: &LgPair, p2: &LgPair, order: u32, mode: Mode) -> Result<StableComparison> {
    let left = stable_invariants(p1, order, mode)?;
    let right = stable_invariants(p2, order, mode)?;
    let verdict = first_difference(&left, &right).unwrap_or_else(|| Verdict::ConsistentToOrder {
        order,
        residual_jets_match: left.residual.agrees_to(&right.residual, order),
    });
    Ok(StableComparison { verdict, left, right })
}

/// Whether `(f1 ⊞ q1) ∘ φ = f2 ⊞ q2` modulo `m^{N+1}`.
pub fn verify_stable_witness(
    p1: &LgPair,
    p2: &LgPair,
    q1: &QuadForm,
    q2: &QuadForm,
    phi: &CoordChange,
    order: u32,
) -> Result<bool> {
    let s1 = stabilize(p1, q1, Mode::CFormal)?.pair;
    let s2 = stabilize(p2, q2, Mode::CFormal)?.pair;
    if s1.nvars() != s2.nvars() || phi.nvars() != s1.nvars() {
        return Err(Error::Dimension(format!(
            "stabilized pairs have {} and {} variables, coordinate change has {}",
            s1.nvars(),
            s2.nvars(),
            phi.nvars()
        )));
    }
    let have = s1.order().min(s2.order()).min(if phi.nvars() == 0 { order } else { phi.order() });
    if have < order {
        return Err(Error::Precision { needed: order, have });
    }
    let lhs = compose(&s1.f().truncate(order), &phi.truncate(order))?;
    Ok(lhs.agrees_to(s2.f(), order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_series;
    use crate::rational::int;

    fn pair(text: &str, v: &[&str], order: u32) -> LgPair {
        let vars: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        LgPair::new(parse_series(text, &vars, order).unwrap()).unwrap()
    }

    #[test]
    fn ts_sum_adds_on_disjoint_blocks() {
        let s = ts_sum(&pair("x^3", &["x"], 12), &pair("y^2", &["y"], 12)).unwrap();
        assert_eq!(s, pair("x^3 + y^2", &["x", "y"], 12));
        let unit = ts_sum(&pair("x^3", &["x"], 12), &LgPair::point(12)).unwrap();
        assert_eq!(unit, pair("x^3", &["x"], 12));
        let t = ts_sum(&pair("x^3", &["x"], 12), &pair("y^3", &["y"], 12)).unwrap();
        assert_eq!(milnor_number(&t, DEFAULT_CAP).mu, Some(4));
    }

    #[test]
    fn stabilize_appends_fresh_squares() {
        let s = stabilize(&pair("x^3", &["x"], 12), &QuadForm::standard(1), Mode::Q).unwrap();
        assert_eq!(s.pair, pair("x^3 + y^2", &["x", "y"], 12));
        assert_eq!(s.acting.rank, 1);
        let s = stabilize(&pair("x^3 + y^4", &["x", "y"], 12), &QuadForm::standard(2), Mode::Q)
            .unwrap();
        assert_eq!(s.pair, pair("x^3 + y^4 + z^2 + w^2", &["x", "y", "z", "w"], 12));
        assert_eq!(milnor_number(&s.pair, DEFAULT_CAP).mu, Some(6));
        let p = pair("x^3 + y^4", &["x", "y"], 12);
        assert_eq!(stabilize(&p, &QuadForm::empty(), Mode::Q).unwrap().pair, p);
    }

    #[test]
    fn stable_invariants_examples() {
        let a = stable_invariants(&pair("x^3 + y^2", &["x", "y"], 12), 12, Mode::Q).unwrap();
        assert_eq!((a.corank, a.mu, a.quad_gw.rank), (1, 2, 1));
        let b = stable_invariants(&pair("x^3 + y^4", &["x", "y"], 12), 12, Mode::Q).unwrap();
        assert_eq!((b.corank, b.mu, b.quad_gw.rank), (2, 6, 0));
        let c = stable_invariants(&pair("x^2 + y^2 + z^2", &["x", "y", "z"], 12), 12, Mode::Q)
            .unwrap();
        assert_eq!((c.corank, c.mu, c.total_dim_parity), (0, 1, 1));
    }

    #[test]
    fn compare_examples() {
        let cmp = |a: LgPair, b: LgPair| stable_compare(&a, &b, 12, Mode::Q).unwrap().verdict;
        assert_eq!(
            cmp(pair("x^2", &["x"], 12), pair("x^2 + y^2", &["x", "y"], 12)),
            Verdict::ConsistentToOrder { order: 12, residual_jets_match: true }
        );
        assert_eq!(
            cmp(pair("x^3", &["x"], 12), pair("x^3 + y^2", &["x", "y"], 12)),
            Verdict::ConsistentToOrder { order: 12, residual_jets_match: true }
        );
        assert_eq!(
            cmp(pair("x^3", &["x"], 12), pair("x^4", &["x"], 12)),
            Verdict::Distinguished { invariant: "mu", left: "2".into(), right: "3".into() }
        );
    }

    #[test]
    fn non_isolated_is_an_error() {
        let e = stable_invariants(&pair("x^2*y", &["x", "y"], 12), 12, Mode::Q).unwrap_err();
        assert!(matches!(e, Error::NonIsolated(_)));
    }

    #[test]
    fn witness_examples() {
        let p1 = pair("x^3", &["x"], 12);
        let p2 = pair("x^3 + y^2", &["x", "y"], 12);
        let q1 = QuadForm::standard(1);
        let q0 = QuadForm::empty();
        let id = CoordChange::identity(2, 12);
        assert!(verify_stable_witness(&p1, &p2, &q1, &q0, &id, 12).unwrap());

        let sym = pair("x^3 + y^3", &["x", "y"], 12);
        let swap = CoordChange::linear(&[vec![int(0), int(1)], vec![int(1), int(0)]], 12).unwrap();
        assert!(verify_stable_witness(&sym, &sym, &q0, &q0, &swap, 12).unwrap());

        let mut comps = id.components().to_vec();
        comps[0] = &comps[0] + &Series::var(2, 12, 1).pow(2);
        let bad = CoordChange::new(comps).unwrap();
        assert!(!verify_stable_witness(&p1, &p2, &q1, &q0, &bad, 12).unwrap());

        assert!(verify_stable_witness(&p1, &p1, &q0, &q1, &id, 12).is_err());
    }
}

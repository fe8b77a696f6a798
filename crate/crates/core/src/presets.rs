//! Named fixtures: the stabilized cusp, the E6 automorphism and its
//! isotopy, and the determinant-one matrix family ending at a 3-cycle.

use crate::error::{Error, Result};
use crate::expr::parse_series;
use crate::isotopy::{FamilyCoordChange, FamilySeries, MatrixFamily, TPoly};
use crate::milnor::LgPair;
use crate::rational::int;
use crate::series::{CoordChange, Monomial, Series};

pub const NAMES: [&str; 4] = ["a2-stabilized", "e6-automorphism", "e6-isotopy", "hyperbolic-3cycle"];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "a2-stabilized" => "x^3 in one variable and x^3 + y^2 in two",
        "e6-automorphism" => "f = x^3 + y^4 with x -> x + y^4, y -> y*(1 - 3x^2 - 3xy^4 - y^8)^(1/4)",
        "e6-isotopy" => "x -> x + t*y^4, y -> y*(1 - 3t*x^2 - 3t^2*x*y^4 - t^3*y^8)^(1/4)",
        "hyperbolic-3cycle" => "[[1-t^3, t, 0], [0, 1-t^3, t], [t(3-3t^3+t^6), 0, 1-t^3]]",
        _ => return None,
    })
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// `(x³, x³ + y²)`.
pub fn a2_stabilized(order: u32) -> Result<(LgPair, LgPair)> {
    let a = LgPair::new(parse_series("x^3", &names(&["x"]), order)?)?;
    let b = LgPair::new(parse_series("x^3 + y^2", &names(&["x", "y"]), order)?)?;
    Ok((a, b))
}

/// `x³ + y⁴`.
pub fn e6_potential(order: u32) -> Result<Series> {
    parse_series("x^3 + y^4", &names(&["x", "y"]), order)
}

/// `x ↦ x + y⁴`, `y ↦ y·(1 − 3x² − 3xy⁴ − y⁸)^{1/4}`.
pub fn e6_automorphism(order: u32) -> Result<CoordChange> {
    let v = names(&["x", "y"]);
    let x = parse_series("x + y^4", &v, order)?;
    let u = parse_series("1 - 3*x^2 - 3*x*y^4 - y^8", &v, order)?;
    let y = &Series::var(2, order, 1) * &u.nth_root(4)?;
    CoordChange::new(vec![x, y])
}

fn family_term(exps: [u32; 2], t: &[i64]) -> (Monomial, TPoly) {
    (Monomial::from_exponents(&exps), TPoly::new(t.iter().map(|&c| int(c)).collect()))
}

/// The isotopy from the identity (`t = 0`) to the E6 automorphism (`t = 1`).
pub fn e6_isotopy(order: u32) -> Result<FamilyCoordChange> {
    let x = FamilySeries::from_terms(
        2,
        order,
        [family_term([1, 0], &[1]), family_term([0, 4], &[0, 1])],
    );
    let u = FamilySeries::from_terms(
        2,
        order,
        [
            family_term([0, 0], &[1]),
            family_term([2, 0], &[0, -3]),
            family_term([1, 4], &[0, 0, -3]),
            family_term([0, 8], &[0, 0, 0, -1]),
        ],
    );
    let y = &FamilySeries::var(2, order, 1) * &u.nth_root(4)?;
    CoordChange::new(vec![x, y])
}

/// The 3×3 family with determinant 1, identity at `t = 0` and a cyclic
/// permutation at `t = 1`.
pub fn hyperbolic_3cycle() -> MatrixFamily {
    let p = |c: &[i64]| TPoly::new(c.iter().map(|&v| int(v)).collect());
    let d = p(&[1, 0, 0, -1]);
    let z = p(&[]);
    let t = p(&[0, 1]);
    MatrixFamily::from_rows(vec![
        vec![d.clone(), t.clone(), z.clone()],
        vec![z.clone(), d.clone(), t],
        vec![p(&[0, 3, 0, 0, -3, 0, 0, 1]), z, d],
    ])
    .expect("square")
}

pub fn unknown(name: &str) -> Error {
    Error::Dimension(format!("unknown preset `{name}` (known: {})", NAMES.join(", ")))
}

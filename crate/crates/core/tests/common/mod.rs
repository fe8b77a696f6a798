#![allow(dead_code)]

use critforge::rational::{int, rat};
use critforge::{CoordChange, LgPair, Monomial, Rational, Series};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn vars(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn pair(text: &str, v: &[&str], order: u32) -> LgPair {
    LgPair::new(critforge::parse_series(text, &vars(v), order).unwrap()).unwrap()
}

pub fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Series with up to `max_terms` terms of degree in `lo..=hi`.
pub fn series(nvars: usize, order: u32, lo: u32, hi: u32, max_terms: usize) -> impl Strategy<Value = Series> {
    let exps = proptest::collection::vec(0u32..=hi, nvars);
    proptest::collection::vec((exps, coeff()), 0..=max_terms).prop_map(move |terms| {
        let terms = terms.into_iter().filter(|(e, _)| {
            let d: u32 = e.iter().sum();
            d >= lo && d <= hi
        });
        Series::from_exponent_terms(nvars, order, terms).unwrap()
    })
}

/// Coordinate change with an integer unipotent-times-diagonal linear part
/// and random higher terms.
pub fn coord_change(nvars: usize, order: u32) -> impl Strategy<Value = CoordChange> {
    let lin = proptest::collection::vec(-2i64..=2, nvars * nvars);
    let diag = proptest::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2)], nvars);
    let higher = proptest::collection::vec(series(nvars, order, 2, 3, 3), nvars);
    (lin, diag, higher).prop_map(move |(lin, diag, higher)| {
        let comps = (0..nvars)
            .map(|i| {
                let mut s = Series::var(nvars, order, i).scale(&int(diag[i]));
                for j in i + 1..nvars {
                    s = &s + &Series::var(nvars, order, j).scale(&int(lin[i * nvars + j]));
                }
                &s + &higher[i]
            })
            .collect();
        CoordChange::new(comps).unwrap()
    })
}

pub fn random_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = rng.gen_range(-4i64..=4);
    if n == 0 {
        n = 1;
    }
    rat(n, rng.gen_range(1..=2))
}

/// Random polynomial with `terms` terms of degree in `lo..=hi`.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, order: u32, lo: u32, hi: u32, terms: usize) -> Series {
    let mut out = Series::zero(nvars, order);
    for _ in 0..terms {
        let d = rng.gen_range(lo..=hi);
        let mut e = vec![0u32; nvars];
        for _ in 0..d {
            e[rng.gen_range(0..nvars)] += 1;
        }
        out = &out + &Series::monomial(nvars, order, Monomial::from_exponents(&e), random_coeff(rng));
    }
    out
}

/// Random change with linear part `L·U` (`L` a signed permutation with
/// scaling, `U` unipotent) plus terms of degree 2 and 3.
pub fn random_change(rng: &mut ChaCha8Rng, nvars: usize, order: u32) -> CoordChange {
    let mut perm: Vec<usize> = (0..nvars).collect();
    for i in (1..nvars).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let comps = (0..nvars)
        .map(|i| {
            let scale = [1i64, -1, 2, -2][rng.gen_range(0..4)];
            let mut s = Series::var(nvars, order, perm[i]).scale(&int(scale));
            for j in 0..nvars {
                if j != perm[i] && rng.gen_bool(0.4) {
                    let c = int(rng.gen_range(-1..=1));
                    // keep the linear part triangular in permuted order
                    if perm.iter().position(|&p| p == j).unwrap() > i {
                        s = &s + &Series::var(nvars, order, j).scale(&c);
                    }
                }
            }
            &s + &random_poly(rng, nvars, order, 2, 3, 2)
        })
        .collect();
    CoordChange::new(comps).unwrap()
}

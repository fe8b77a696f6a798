mod common;

use common::{pair, series};
use critforge::milnor::{milnor_number, LgPair};
use critforge::stability::{stabilize, stable_compare, stable_invariants, ts_sum, verify_stable_witness};
use critforge::{CoordChange, Mode, QuadForm};
use proptest::prelude::*;

const N: u32 = 10;

fn isolated(max_mu: usize) -> impl Strategy<Value = LgPair> {
    series(2, N, 2, 4, 4).prop_filter_map("not isolated", move |f| {
        let p = LgPair::new(f).ok()?;
        milnor_number(&p, N - 2).mu.filter(|&m| m <= max_mu).map(|_| p)
    })
}

fn form() -> impl Strategy<Value = QuadForm> {
    proptest::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(3), Just(-5)], 0..=2)
        .prop_map(|d| QuadForm::diagonal(&d.into_iter().map(critforge::rational::int).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mu_is_multiplicative(a in isolated(12), b in isolated(12)) {
        let ma = milnor_number(&a, N - 2).mu.unwrap();
        let mb = milnor_number(&b, N - 2).mu.unwrap();
        let s = ts_sum(&a, &b).unwrap();
        prop_assert_eq!(milnor_number(&s, N - 2).mu, Some(ma * mb));
    }

    #[test]
    fn stabilization_moves_only_the_form(p in isolated(20), q in form()) {
        for mode in [Mode::Q, Mode::CFormal] {
            let before = stable_invariants(&p, N, mode).unwrap();
            let st = stabilize(&p, &q, mode).unwrap();
            let after = stable_invariants(&st.pair, N, mode).unwrap();
            prop_assert_eq!(after.corank, before.corank);
            prop_assert_eq!(after.mu, before.mu);
            prop_assert_eq!(after.tjurina, before.tjurina);
            prop_assert_eq!(&after.hilbert, &before.hilbert);
            prop_assert_eq!(after.quad_gw, before.quad_gw.sum(&st.acting).unwrap());
            prop_assert_eq!(after.total_dim_parity, (before.total_dim_parity + (q.dim() % 2) as u8) % 2);
        }
    }

    #[test]
    fn compare_is_reflexive_and_symmetric(a in isolated(20), b in isolated(20)) {
        prop_assert!(!stable_compare(&a, &a, N, Mode::Q).unwrap().verdict.is_distinguished());
        let ab = stable_compare(&a, &b, N, Mode::Q).unwrap().verdict;
        let ba = stable_compare(&b, &a, N, Mode::Q).unwrap().verdict;
        prop_assert_eq!(ab.is_distinguished(), ba.is_distinguished());
    }

    #[test]
    fn identity_witnesses_itself(p in isolated(30), q in form()) {
        let id = CoordChange::identity(p.nvars() + q.dim(), N);
        prop_assert!(verify_stable_witness(&p, &p, &q, &q, &id, N).unwrap());
    }
}

#[test]
fn stabilized_cusp() {
    let a = pair("x^3", &["x"], N);
    let b = pair("x^3 + y^2", &["x", "y"], N);
    let cmp = stable_compare(&a, &b, N, Mode::Q).unwrap();
    assert!(!cmp.verdict.is_distinguished());
    assert_eq!(cmp.left.quad_gw.rank + 1, cmp.right.quad_gw.rank);
}

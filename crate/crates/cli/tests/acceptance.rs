//! Acceptance suite. Runs every criterion at its tolerance, prints one line
//! per criterion and exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use critforge::isotopy::verify_isotopy;
use critforge::linalg::rref;
use critforge::milnor::{behrend_value, milnor_number, tangent_complex_dims, LgPair, MilnorAlgebra};
use critforge::morse::{hessian, split};
use critforge::quad::{direct_sum, gw_class, GwClass};
use critforge::rational::{int, rat};
use critforge::stability::{stabilize, ts_sum};
use critforge::{compose, parse_series, presets, CoordChange, Mode, Monomial, QuadForm, RatMatrix, Rational, Series};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn pair(text: &str, v: &[&str], order: u32) -> LgPair {
    LgPair::new(parse_series(text, &names(v), order).unwrap()).unwrap()
}

fn nonzero_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let n = [1i64, -1, 2, -2, 3, -3][rng.gen_range(0..6)];
    rat(n, rng.gen_range(1..=2))
}

fn random_monomial(rng: &mut ChaCha8Rng, nvars: usize, degree: u32) -> Monomial {
    let mut e = vec![0u32; nvars];
    for _ in 0..degree {
        e[rng.gen_range(0..nvars)] += 1;
    }
    Monomial::from_exponents(&e)
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, order: u32, lo: u32, hi: u32, terms: usize) -> Series {
    let mut out = Series::zero(nvars, order);
    for _ in 0..terms {
        let d = rng.gen_range(lo..=hi);
        let m = random_monomial(rng, nvars, d);
        out = &out + &Series::monomial(nvars, order, m, nonzero_coeff(rng));
    }
    out
}

/// Isolated polynomial of degree ≤ 5 in `nvars` variables with μ ≤ 30,
/// certified at a degree ≤ `max_cert`. Returns the pair read at `order`
/// and its certificate degree.
fn random_isolated(rng: &mut ChaCha8Rng, nvars: usize, lo: u32, max_cert: u32, order: u32) -> (LgPair, u32) {
    loop {
        let terms = rng.gen_range(0..=3);
        let mut f = random_poly(rng, nvars, order, lo.max(3), 5, terms);
        for v in 0..nvars {
            let e = rng.gen_range(lo..=5);
            f = &f + &Series::var(nvars, order, v).pow(e).scale(&nonzero_coeff(rng));
        }
        let Ok(p) = LgPair::new(f) else { continue };
        let r = milnor_number(&p, max_cert);
        if let (Some(mu), Some(d)) = (r.mu, r.certified_at) {
            if mu <= 30 {
                return (p, d);
            }
        }
    }
}

fn random_form(rng: &mut ChaCha8Rng, dim: usize) -> QuadForm {
    loop {
        let mut rows = vec![vec![int(0); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let v = int(rng.gen_range(-3..=3));
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        if let Ok(q) = QuadForm::new(RatMatrix::from_rows(rows)) {
            return q;
        }
    }
}

/// Random change: signed, scaled permutation composed with a unipotent
/// linear part, plus terms of degree 2 and 3.
fn random_change(rng: &mut ChaCha8Rng, nvars: usize, order: u32) -> CoordChange {
    let mut perm: Vec<usize> = (0..nvars).collect();
    for i in (1..nvars).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let comps = (0..nvars)
        .map(|i| {
            let scale = [1i64, -1, 2, -2][rng.gen_range(0..4)];
            let mut s = Series::var(nvars, order, perm[i]).scale(&int(scale));
            for &j in &perm[i + 1..] {
                if rng.gen_bool(0.4) {
                    s = &s + &Series::var(nvars, order, j).scale(&int(rng.gen_range(-1..=1)));
                }
            }
            &s + &random_poly(rng, nvars, order, 2, 3, 2)
        })
        .collect();
    CoordChange::new(comps).unwrap()
}

/// Square-free part of a nonzero rational with its sign, by trial division.
fn squarefree(r: &Rational) -> i64 {
    let mut n = (r.numer() * r.denom()).abs().to_i64().expect("small determinant");
    let mut out = 1i64;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
        }
        if n % p == 0 {
            out *= p;
            n /= p;
        }
        p += 1;
    }
    out *= n;
    if r.is_negative() {
        -out
    } else {
        out
    }
}

const GOLDEN: [(&str, &[&str], usize); 5] = [
    ("x^2", &["x"], 1),
    ("x^3", &["x"], 2),
    ("x^3 + y^2", &["x", "y"], 2),
    ("x^3 + y^4", &["x", "y"], 6),
    ("x^3 + y^5", &["x", "y"], 8),
];

fn golden_invariants() -> Check {
    let mut slowest = Duration::ZERO;
    for (text, vars, mu) in GOLDEN {
        let start = Instant::now();
        let p = pair(text, vars, 12);
        let r = milnor_number(&p, 10);
        ensure!(r.mu == Some(mu), "mu({text}) = {:?}, expected {mu}", r.mu);
        ensure!(r.certified_at.is_some(), "{text}: no certificate");
        let nu = behrend_value(&p, 10).map_err(|e| e.to_string())?;
        ensure!(nu == mu as i64, "nu({text}) = {nu}");
        if text == "x^3 + y^4" {
            let basis: BTreeSet<Monomial> = MilnorAlgebra::compute(&p, 10).map_err(|e| e.to_string())?.basis().into_iter().collect();
            let expected: BTreeSet<Monomial> =
                (0..2).flat_map(|a| (0..3).map(move |b| Monomial::from_exponents(&[a, b]))).collect();
            ensure!(basis == expected, "basis of x^3 + y^4 is not that of k[[x,y]]/(x^2, y^3)");
        }
        let t = start.elapsed();
        ensure!(t < Duration::from_secs(1), "{text} took {t:?}");
        slowest = slowest.max(t);
    }
    Ok(format!("5 potentials, slowest {:.3}s", slowest.as_secs_f64()))
}

fn stabilization_invariance() -> Check {
    const N: u32 = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mus = Vec::new();
    for case in 0..50 {
        let n = rng.gen_range(1..=3);
        let (p, _) = random_isolated(&mut rng, n, 2, N - 2, N);
        let r = rng.gen_range(1..=3);
        let q = random_form(&mut rng, r);
        let st = stabilize(&p, &q, Mode::Q).map_err(|e| e.to_string())?.pair;
        let a = milnor_number(&p, N - 2);
        let b = milnor_number(&st, N - 2);
        ensure!(b.mu.is_some(), "case {case}: stabilization not certified");
        ensure!(
            (a.mu, a.tjurina, &a.hilbert) == (b.mu, b.tjurina, &b.hilbert),
            "case {case}: {:?} vs {:?}",
            (a.mu, a.tjurina, &a.hilbert),
            (b.mu, b.tjurina, &b.hilbert)
        );
        let ca = hessian(&p).map_err(|e| e.to_string())?.corank;
        let cb = hessian(&st).map_err(|e| e.to_string())?.corank;
        ensure!(ca == cb, "case {case}: corank {ca} vs {cb}");
        mus.push(a.mu.unwrap());
    }
    mus.sort();
    Ok(format!("50 seeded instances, mu median {} max {}", mus[25], mus[49]))
}

fn thom_sebastiani() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut largest = 0;
    for case in 0..50 {
        let (na, nb) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let (a, da) = random_isolated(&mut rng, na, 3, 8, 10);
        let (b, db) = random_isolated(&mut rng, nb, 3, 8, 10);
        let order = da + db + 4;
        let reread = |p: &LgPair| LgPair::new(p.f().with_order_unchecked(order)).unwrap();
        let s = ts_sum(&reread(&a), &reread(&b)).map_err(|e| e.to_string())?;
        let ma = milnor_number(&a, 8).mu.unwrap();
        let mb = milnor_number(&b, 8).mu.unwrap();
        let ms = milnor_number(&s, order - 2).mu;
        ensure!(ms == Some(ma * mb), "case {case}: mu(sum) = {ms:?}, product {}", ma * mb);
        largest = largest.max(ma * mb);
    }
    Ok(format!("50 seeded pairs, largest mu {largest}"))
}

fn split_round_trips() -> Check {
    const N: u32 = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total_mu = 0;
    for case in 0..30 {
        let c = rng.gen_range(1..=2);
        let r = rng.gen_range(1..=2);
        let (g, _) = random_isolated(&mut rng, c, 3, 8, N);
        let q = random_form(&mut rng, r);
        let n = c + r;
        let slots: Vec<usize> = (0..c).collect();
        let sum = &g.f().embed(n, &slots).unwrap() + &q.to_series(n, N, c);
        let psi = random_change(&mut rng, n, N);
        let f = LgPair::new(compose(&sum, &psi).unwrap()).unwrap();

        let s = split(&f, N).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(s.corank() == c, "case {case}: corank {} expected {c}", s.corank());
        let lhs = compose(f.f(), &s.witness).unwrap();
        ensure!(lhs == s.normal_form(), "case {case}: witness does not compose to the normal form");
        let before = milnor_number(&g, N - 2);
        let after = milnor_number(&s.residual, N - 2);
        ensure!(
            (before.mu, before.tjurina, &before.hilbert) == (after.mu, after.tjurina, &after.hilbert),
            "case {case}: residual invariants changed"
        );
        total_mu += before.mu.unwrap();
    }
    Ok(format!("30 seeded instances at N = 10, mean residual mu {:.1}", total_mu as f64 / 30.0))
}

fn isotopy_fixture() -> Check {
    let f = presets::e6_potential(17).unwrap();
    let fam = presets::e6_isotopy(16).unwrap();
    let r = verify_isotopy(&f, &fam, 16).map_err(|e| e.to_string())?;
    ensure!(r.preserves_potential, "potential not preserved (defect at {:?})", r.defect_degree);
    ensure!(r.starts_at_identity, "family does not start at the identity");
    ensure!(r.fixes_critical_jets, "critical jets moved");
    ensure!(r.jacobian_unit, "Jacobian determinant {} is not a unit", r.jacobian_det);
    ensure!(r.phi_1 == presets::e6_automorphism(16).unwrap(), "phi_1 differs from the automorphism");
    Ok("all checks pass at N = 16, phi_1 exact".into())
}

fn matrix_fixture() -> Check {
    let m = presets::hyperbolic_3cycle();
    let det = m.det().map_err(|e| e.to_string())?;
    ensure!(det.to_string() == "1", "det = {det}");
    ensure!(m.specialize(&int(0)) == RatMatrix::identity(3), "f_0 is not the identity");
    let cycle = RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
    ensure!(m.specialize(&int(1)) == cycle, "f_1 is not the 3-cycle");
    Ok("det = 1, f_0 = Id, f_1 = 3-cycle".into())
}

fn tangent_self_duality() -> Check {
    for (text, vars, _) in GOLDEN {
        let (a, b) = tangent_complex_dims(&pair(text, vars, 12), 10).map_err(|e| e.to_string())?;
        ensure!(a == b, "{text}: h^-1 = {a}, h^0 = {b}");
    }
    for (text, vars) in [("x^2", &["x"][..]), ("x^2 + y^2", &["x", "y"]), ("x*y - z^2", &["x", "y", "z"])] {
        let dims = tangent_complex_dims(&pair(text, vars, 12), 10).map_err(|e| e.to_string())?;
        ensure!(dims == (0, 0), "{text}: {dims:?}");
    }
    let dims = tangent_complex_dims(&pair("x^3", &["x"], 12), 10).map_err(|e| e.to_string())?;
    ensure!(dims == (1, 1), "x^3: {dims:?}");
    Ok("golden corpus, Morse inputs and x^3".into())
}

fn gw_bookkeeping() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let dim = rng.gen_range(0..=4);
        let q = random_form(&mut rng, dim);
        let c = gw_class(&q, Mode::CFormal).map_err(|e| e.to_string())?;
        let expected = GwClass { rank: dim, parity: (dim % 2) as u8, disc: 1, mode: Mode::CFormal };
        ensure!(c == expected, "case {case}: {c:?}");
        ensure!(c == gw_class(&QuadForm::standard(dim), Mode::CFormal).unwrap(), "case {case}: depends on more than rank");

        let (da, db) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random_form(&mut rng, da);
        let b = random_form(&mut rng, db);
        let sum = gw_class(&direct_sum(&a, &b), Mode::Q).map_err(|e| e.to_string())?;
        let oracle = squarefree(&(a.determinant() * b.determinant()));
        ensure!(sum.disc == oracle, "case {case}: disc {} vs {oracle}", sum.disc);
        let added = gw_class(&a, Mode::Q).unwrap().sum(&gw_class(&b, Mode::Q).unwrap()).unwrap();
        ensure!(sum == added, "case {case}: class of the sum differs from the sum of classes");
    }
    Ok("100 forms in each mode".into())
}

fn small_series(rng: &mut ChaCha8Rng, order: u32) -> Series {
    let terms = rng.gen_range(0..=6);
    random_poly(rng, 2, order, 0, order, terms)
}

fn property_suites() -> Check {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..CASES {
        let (a, b, c) = (small_series(&mut rng, 5), small_series(&mut rng, 5), small_series(&mut rng, 5));
        ensure!(&(&a + &b) + &c == &a + &(&b + &c), "ring case {case}: addition");
        ensure!(&a * &b == &b * &a, "ring case {case}: commutativity");
        ensure!(&(&a * &b) * &c == &a * &(&b * &c), "ring case {case}: associativity");
        ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "ring case {case}: distributivity");
        ensure!((&a - &a).is_zero(), "ring case {case}: negation");
    }
    for case in 0..CASES {
        let f = small_series(&mut rng, 5);
        let phi = random_change(&mut rng, 2, 5);
        let psi = random_change(&mut rng, 2, 5);
        let lhs = compose(&compose(&f, &phi).unwrap(), &psi).unwrap();
        let rhs = compose(&f, &phi.then(&psi).unwrap()).unwrap();
        ensure!(lhs == rhs, "compose case {case}");
    }
    for case in 0..CASES {
        let phi = random_change(&mut rng, 3, 5);
        let inv = phi.invert().map_err(|e| e.to_string())?;
        ensure!(phi.then(&inv).unwrap().is_identity(), "inverse case {case}: right");
        ensure!(inv.then(&phi).unwrap().is_identity(), "inverse case {case}: left");
    }
    for case in 0..CASES {
        let n = rng.gen_range(1..=4u32);
        let c = rng.gen_range(1..=3i64);
        let base = &Series::constant(2, 6, int(c.pow(n))) + &random_poly(&mut rng, 2, 6, 1, 6, 5);
        let r = base.nth_root(n).map_err(|e| e.to_string())?;
        ensure!(r.pow(n) == base && r.constant_term() == int(c), "root case {case}");
    }
    for case in 0..CASES {
        let (rows, cols) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let m = RatMatrix::from_rows(
            (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| if rng.gen_bool(0.3) { Rational::zero() } else { nonzero_coeff(&mut rng) })
                        .collect()
                })
                .collect(),
        );
        let once = rref(&m).map_err(|e| e.to_string())?;
        let twice = rref(&once.matrix).map_err(|e| e.to_string())?;
        ensure!(once.matrix == twice.matrix && once.rank == twice.rank, "rref case {case}");
    }
    Ok(format!("5 suites x {CASES} cases"))
}

fn non_isolated_honesty() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_critforge"))
        .args(["milnor", "--vars", "x,y", "x^2*y", "--cap", "64", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.code() == Some(2), "exit code {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(v["status"] == "inconclusive", "status {}", v["status"]);
    ensure!(v["result"].get("mu").is_none(), "a Milnor number was reported");
    let r = milnor_number(&pair("x^2*y", &["x", "y"], 66), 64);
    ensure!(r.mu.is_none() && r.certified_at.is_none(), "library certified x^2*y");
    Ok(format!("exit 2, {}", v["result"]["message"].as_str().unwrap_or("")))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("golden invariants", Duration::from_secs(5), golden_invariants),
        ("stabilization invariance", Duration::from_secs(60), stabilization_invariance),
        ("Thom-Sebastiani multiplicativity", Duration::from_secs(120), thom_sebastiani),
        ("split round trips", Duration::from_secs(120), split_round_trips),
        ("isotopy fixture", Duration::from_secs(10), isotopy_fixture),
        ("matrix fixture", Duration::from_secs(1), matrix_fixture),
        ("tangent complex self-duality", Duration::from_secs(60), tangent_self_duality),
        ("GW bookkeeping", Duration::from_secs(60), gw_bookkeeping),
        ("property suites", Duration::from_secs(300), property_suites),
        ("non-isolated honesty", Duration::from_secs(60), non_isolated_honesty),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let t = start.elapsed();
        let result = match result {
            Ok(detail) if t > *limit => Err(format!("{detail}; over the {}s limit", limit.as_secs())),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {id:>2} {name:<34} {:>8.2}s  {detail}", t.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

use critforge::isotopy::{parse_family_series, parse_tpoly, verify_isotopy, MatrixFamily, TPoly};
use critforge::milnor::{behrend_comparison, milnor_number, LgPair, MilnorReport};
use critforge::quad::{diagonalize, gw_class, hyperbolic_count, orientation_twist};
use critforge::series::MAX_ORDER;
use critforge::stability::{stabilize, stable_compare, stable_invariants, ts_sum, verify_stable_witness, StableInvariants};
use critforge::{parse_expr, parse_series, presets, CoordChange, Error, GwClass, Mode, QuadForm, RatMatrix, Rational, Series, Verdict};
use serde_json::{json, Map, Value};

use crate::args::{Command, DetFamily, FormArg, GlobalOpts, Isotopy, Pair, Potential, Stabilize, Witness};
use crate::report::Outcome;

type Job<T> = std::result::Result<T, Outcome>;

fn fail(e: Error) -> Outcome {
    Outcome::from_error(&e)
}

pub fn execute(cmd: &Command, opts: &GlobalOpts) -> Outcome {
    if opts.order < 2 {
        return Outcome::usage("bad_order", "the truncation order N must be at least 2");
    }
    if opts.order > MAX_ORDER - 1 {
        return Outcome::usage("bad_order", format!("the truncation order N must be below {MAX_ORDER}"));
    }
    if opts.cap < opts.order {
        return Outcome::usage("bad_cap", format!("--cap {} is below the order {}", opts.cap, opts.order));
    }
    let result = match cmd {
        Command::Milnor(p) => milnor(p, opts),
        Command::Tjurina(p) => tjurina(p, opts),
        Command::Behrend(p) => behrend(p, opts),
        Command::Split(p) => split(p, opts, false),
        Command::MinimalModel(p) => split(p, opts, true),
        Command::Stabilize(s) => stabilize_cmd(s, opts),
        Command::TsSum(p) => ts_sum_cmd(p, opts),
        Command::Invariants(p) => invariants(p, opts),
        Command::StableCompare(p) => compare(p, opts),
        Command::VerifyWitness(w) => witness(w, opts),
        Command::VerifyIsotopy(i) => isotopy(i, opts),
        Command::DetFamily(d) => det_family(d),
        Command::GwClass(f) => gw(f, opts),
    };
    result.unwrap_or_else(|o| o)
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Polynomial inputs are exact, so they can be read to whatever order a
/// computation needs.
fn read_potential(p: &Potential, order: u32) -> Job<(LgPair, Vec<String>)> {
    if let Some(name) = &p.preset {
        let (text, vars) = match name.as_str() {
            "a2-stabilized" => ("x^3 + y^2", names(&["x", "y"])),
            "e6-automorphism" | "e6-isotopy" => ("x^3 + y^4", names(&["x", "y"])),
            _ => return Err(fail(presets::unknown(name))),
        };
        let f = parse_series(text, &vars, order).map_err(fail)?;
        return Ok((LgPair::new(f).map_err(fail)?, vars));
    }
    let Some(expr) = &p.expr else {
        return Err(Outcome::usage("missing_input", "give an expression or --preset"));
    };
    let f = parse_series(expr, &p.vars, order).map_err(fail)?;
    Ok((LgPair::new(f).map_err(fail)?, p.vars.clone()))
}

fn read_pair(p: &Pair, order: u32) -> Job<[(LgPair, Vec<String>); 2]> {
    if let Some(name) = &p.preset {
        if name != "a2-stabilized" {
            return Err(Outcome::usage("bad_preset", format!("preset `{name}` is not a pair of potentials")));
        }
        let (a, b) = presets::a2_stabilized(order).map_err(fail)?;
        return Ok([(a, names(&["x"])), (b, names(&["x", "y"]))]);
    }
    if p.exprs.len() != 2 || p.vars.len() != 2 {
        return Err(Outcome::usage(
            "missing_input",
            "give two expressions, each with its own --vars",
        ));
    }
    let read = |k: usize| -> Job<(LgPair, Vec<String>)> {
        let vars: Vec<String> = if p.vars[k].trim().is_empty() {
            Vec::new()
        } else {
            p.vars[k].split(',').map(|s| s.trim().to_string()).collect()
        };
        let f = parse_series(&p.exprs[k], &vars, order).map_err(fail)?;
        Ok((LgPair::new(f).map_err(fail)?, vars))
    };
    Ok([read(0)?, read(1)?])
}

fn parse_constant(text: &str) -> Result<Rational, Error> {
    parse_expr(text, &[])?
        .constant_value()
        .ok_or_else(|| Error::Dimension(format!("`{text}` is not a number")))
}

pub fn parse_form(text: &str) -> Result<QuadForm, Error> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(QuadForm::empty());
    }
    if let Some(diag) = text.strip_prefix("diag:") {
        let d: Vec<Rational> = diag.split(',').map(parse_constant).collect::<Result<_, _>>()?;
        return QuadForm::diagonal(&d);
    }
    let rows: Vec<Vec<Rational>> = text
        .split(';')
        .map(|row| row.split(',').map(parse_constant).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Dimension("Gram matrix must be square".into()));
    }
    QuadForm::new(RatMatrix::from_rows(rows))
}

fn fresh_names(taken: &[String], prefix: &str, count: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1;
    while out.len() < count {
        let name = format!("{prefix}{k}");
        if !taken.contains(&name) {
            out.push(name);
        }
        k += 1;
    }
    out
}

fn show(s: &Series, vars: &[String]) -> String {
    s.display_with(vars).to_string()
}

fn gw_json(c: &GwClass) -> Value {
    json!({ "rank": c.rank, "parity": c.parity, "disc": c.disc, "mode": c.mode.name() })
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| json!(r.to_string())).collect())
}

fn matrix_json(m: &RatMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rats(r)).collect())
}

fn milnor_order(opts: &GlobalOpts) -> u32 {
    (opts.cap + 2).clamp(opts.order, MAX_ORDER)
}

fn certified(report: &MilnorReport, extra: Map<String, Value>) -> Job<(usize, u32)> {
    match (report.mu, report.certified_at) {
        (Some(mu), Some(d)) => Ok((mu, d)),
        _ => Err(Outcome::inconclusive(report.inconclusive.as_ref().expect("reason"), extra)),
    }
}

fn base(p: &LgPair, vars: &[String]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("nvars".into(), json!(p.nvars()));
    m.insert("vars".into(), json!(vars));
    m.insert("f".into(), json!(show(p.f(), vars)));
    m
}

fn milnor(p: &Potential, opts: &GlobalOpts) -> Job<Outcome> {
    let (pair, vars) = read_potential(p, milnor_order(opts))?;
    let report = milnor_number(&pair, opts.cap);
    let mut m = base(&pair, &vars);
    let (mu, d) = certified(&report, m.clone())?;
    m.insert("mu".into(), json!(mu));
    m.insert("certified_at".into(), json!(d));
    m.insert("hilbert".into(), json!(report.hilbert));
    m.insert("tjurina".into(), json!(report.tjurina));
    Ok(Outcome::ok(Value::Object(m)))
}

fn tjurina(p: &Potential, opts: &GlobalOpts) -> Job<Outcome> {
    let (pair, vars) = read_potential(p, milnor_order(opts))?;
    let report = milnor_number(&pair, opts.cap);
    let mut m = base(&pair, &vars);
    let (mu, d) = certified(&report, m.clone())?;
    m.insert("tjurina".into(), json!(report.tjurina));
    m.insert("mu".into(), json!(mu));
    m.insert("certified_at".into(), json!(d));
    Ok(Outcome::ok(Value::Object(m)))
}

fn behrend(p: &Potential, opts: &GlobalOpts) -> Job<Outcome> {
    let (pair, vars) = read_potential(p, milnor_order(opts))?;
    let report = milnor_number(&pair, opts.cap);
    let mut m = base(&pair, &vars);
    let (mu, d) = certified(&report, m.clone())?;
    let cmp = behrend_comparison(&pair, opts.cap).map_err(fail)?;
    let n = pair.nvars() as i64;
    let chi = 1 + if n % 2 == 1 { 1 } else { -1 } * mu as i64;
    m.insert("nu".into(), json!(cmp.canonical));
    m.insert("euler_char".into(), json!(chi));
    m.insert("mu".into(), json!(mu));
    m.insert("certified_at".into(), json!(d));
    m.insert(
        "alternative".into(),
        json!({ "unshifted": cmp.alt_unshifted, "perverse": cmp.alt_perverse }),
    );
    Ok(Outcome::ok(Value::Object(m)))
}

fn split(p: &Potential, opts: &GlobalOpts, minimal: bool) -> Job<Outcome> {
    let (pair, vars) = read_potential(p, opts.order + 1)?;
    let s = critforge::morse::split(&pair, opts.order).map_err(fail)?;
    let c = s.corank();
    let mut new_vars = fresh_names(&vars, "u", c);
    new_vars.extend(fresh_names(&vars, "v", s.rank()));
    let witness: Vec<String> = vars
        .iter()
        .zip(s.witness.components())
        .map(|(x, comp)| format!("{x} = {}", show(comp, &new_vars)))
        .collect();
    let mut m = base(&pair, &vars);
    m.insert("corank".into(), json!(c));
    m.insert("rank".into(), json!(s.rank()));
    m.insert("new_vars".into(), json!(new_vars));
    m.insert("residual".into(), json!(show(s.residual.f(), &new_vars[..c])));
    m.insert("quad".into(), json!({
        "diag": rats(&s.hessian.diag),
        "gw": gw_json(&gw_class(&s.quad, opts.mode).map_err(fail)?),
    }));
    m.insert("witness".into(), json!(witness));
    m.insert("verified".into(), json!(true));
    if minimal {
        m.insert("hessian_vanishes".into(), json!(s.residual.f().homogeneous(2).is_zero()));
    }
    Ok(Outcome::ok(Value::Object(m)))
}

fn stabilize_cmd(s: &Stabilize, opts: &GlobalOpts) -> Job<Outcome> {
    let (pair, vars) = read_potential(&s.potential, opts.order)?;
    let q = parse_form(&s.form.form).map_err(fail)?;
    let st = stabilize(&pair, &q, opts.mode).map_err(fail)?;
    let mut all = vars.clone();
    all.extend(fresh_names(&vars, "s", q.dim()));
    Ok(Outcome::ok(json!({
        "vars": all,
        "f": show(st.pair.f(), &all),
        "nvars": st.pair.nvars(),
        "acting": gw_json(&st.acting),
    })))
}

fn joined_names(a: &[String], b: &[String]) -> Vec<String> {
    let mut all = a.to_vec();
    for name in b {
        let mut candidate = name.clone();
        let mut k = 2;
        while all.contains(&candidate) {
            candidate = format!("{name}_{k}");
            k += 1;
        }
        all.push(candidate);
    }
    all
}

fn ts_sum_cmd(p: &Pair, opts: &GlobalOpts) -> Job<Outcome> {
    let [(a, va), (b, vb)] = read_pair(p, opts.order)?;
    let s = ts_sum(&a, &b).map_err(fail)?;
    let all = joined_names(&va, &vb);
    Ok(Outcome::ok(json!({ "vars": all, "f": show(s.f(), &all), "nvars": s.nvars() })))
}

fn invariants_json(inv: &StableInvariants, vars: &[String]) -> Value {
    let residual_vars = fresh_names(vars, "u", inv.corank);
    json!({
        "nvars": inv.nvars,
        "corank": inv.corank,
        "mu": inv.mu,
        "tjurina": inv.tjurina,
        "hilbert": inv.hilbert,
        "certified_at": inv.certified_at,
        "quad_gw": gw_json(&inv.quad_gw),
        "total_dim_parity": inv.total_dim_parity,
        "multiplicity": inv.multiplicity,
        "residual": show(&inv.residual, &residual_vars),
    })
}

fn invariants(p: &Potential, opts: &GlobalOpts) -> Job<Outcome> {
    let (pair, vars) = read_potential(p, opts.order + 1)?;
    let inv = stable_invariants(&pair, opts.order, opts.mode).map_err(fail)?;
    Ok(Outcome::ok(invariants_json(&inv, &vars)))
}

fn compare(p: &Pair, opts: &GlobalOpts) -> Job<Outcome> {
    let [(a, va), (b, vb)] = read_pair(p, opts.order + 1)?;
    let cmp = stable_compare(&a, &b, opts.order, opts.mode).map_err(fail)?;
    let mut m = Map::new();
    m.insert("summary".into(), json!(cmp.verdict.to_string()));
    match &cmp.verdict {
        Verdict::Distinguished { invariant, left, right } => {
            m.insert("verdict".into(), json!("distinguished"));
            m.insert("invariant".into(), json!(invariant));
            m.insert("left_value".into(), json!(left));
            m.insert("right_value".into(), json!(right));
        }
        Verdict::ConsistentToOrder { order, residual_jets_match } => {
            m.insert("verdict".into(), json!("consistent_to_order"));
            m.insert("consistent_to".into(), json!(order));
            m.insert("residual_jets_match".into(), json!(residual_jets_match));
        }
    }
    m.insert("left".into(), invariants_json(&cmp.left, &va));
    m.insert("right".into(), invariants_json(&cmp.right, &vb));
    Ok(Outcome::ok(Value::Object(m)))
}

fn witness(w: &Witness, opts: &GlobalOpts) -> Job<Outcome> {
    let [(a, va), (b, _)] = read_pair(&w.pair, opts.order)?;
    let (q1, q2) = if w.pair.preset.is_some() && w.q1.is_empty() && w.q2.is_empty() {
        (QuadForm::standard(1), QuadForm::empty())
    } else {
        (parse_form(&w.q1).map_err(fail)?, parse_form(&w.q2).map_err(fail)?)
    };
    let n = a.nvars() + q1.dim();
    let space = if w.space_vars.is_empty() {
        let mut s = va.clone();
        s.extend(fresh_names(&va, "s", q1.dim()));
        s
    } else {
        w.space_vars.clone()
    };
    if space.len() != n {
        return Err(fail(Error::Dimension(format!("{} space variables for a space of dimension {n}", space.len()))));
    }
    let phi = if w.map.is_empty() {
        CoordChange::identity(n, opts.order)
    } else {
        let comps = w
            .map
            .iter()
            .map(|e| parse_series(e, &space, opts.order))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        CoordChange::new(comps).map_err(fail)?
    };
    let valid = verify_stable_witness(&a, &b, &q1, &q2, &phi, opts.order).map_err(fail)?;
    Ok(Outcome::ok(json!({
        "valid": valid,
        "space_vars": space,
        "q1": q1.to_string(),
        "q2": q2.to_string(),
        "map": phi.components().iter().map(|c| show(c, &space)).collect::<Vec<_>>(),
    })))
}

fn isotopy(i: &Isotopy, opts: &GlobalOpts) -> Job<Outcome> {
    let order = opts.order;
    let (f, vars, family, preset) = match &i.potential.preset {
        Some(name) if name == "e6-isotopy" => {
            let f = presets::e6_potential(order + 1).map_err(fail)?;
            let fam = presets::e6_isotopy(order).map_err(fail)?;
            (f, names(&["x", "y"]), fam, true)
        }
        Some(name) => return Err(Outcome::usage("bad_preset", format!("preset `{name}` is not a family"))),
        None => {
            let (pair, vars) = read_potential(&i.potential, order + 1)?;
            if i.map.len() != vars.len() {
                return Err(Outcome::usage("missing_input", "give one --map per variable"));
            }
            if vars.contains(&i.param) {
                return Err(Outcome::usage("bad_param", format!("parameter `{}` clashes with a variable", i.param)));
            }
            let comps = i
                .map
                .iter()
                .map(|e| parse_family_series(e, &vars, &i.param, order))
                .collect::<Result<Vec<_>, _>>()
                .map_err(fail)?;
            let fam = CoordChange::new(comps).map_err(fail)?;
            (pair.into_series(), vars, fam, false)
        }
    };
    let r = verify_isotopy(&f, &family, order).map_err(fail)?;
    let mut m = Map::new();
    m.insert("f".into(), json!(show(&f.truncate(order), &vars)));
    m.insert("vars".into(), json!(vars));
    m.insert("passed".into(), json!(r.passed()));
    m.insert("preserves_potential".into(), json!(r.preserves_potential));
    m.insert("defect_degree".into(), json!(r.defect_degree));
    m.insert("starts_at_identity".into(), json!(r.starts_at_identity));
    m.insert("fixes_critical_jets".into(), json!(r.fixes_critical_jets));
    m.insert("critical_check_degree".into(), json!(r.critical_check_degree));
    m.insert("jacobian_det".into(), json!(r.jacobian_det.to_string()));
    m.insert("jacobian_unit".into(), json!(r.jacobian_unit));
    m.insert(
        "phi_1".into(),
        json!(r.phi_1.components().iter().map(|c| show(c, &vars)).collect::<Vec<_>>()),
    );
    if preset {
        let auto = presets::e6_automorphism(order).map_err(fail)?;
        m.insert("phi_1_matches_automorphism".into(), json!(r.phi_1 == auto));
    }
    Ok(Outcome::ok(Value::Object(m)))
}

fn det_family(d: &DetFamily) -> Job<Outcome> {
    let m = match (&d.preset, &d.matrix) {
        (Some(name), _) if name == "hyperbolic-3cycle" => presets::hyperbolic_3cycle(),
        (Some(name), _) => return Err(Outcome::usage("bad_preset", format!("preset `{name}` is not a matrix family"))),
        (None, Some(text)) => {
            let rows = text
                .split(';')
                .map(|row| row.split(',').map(|e| parse_tpoly(e, &d.param)).collect::<Result<Vec<TPoly>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(fail)?;
            MatrixFamily::from_rows(rows).map_err(fail)?
        }
        (None, None) => return Err(Outcome::usage("missing_input", "give --matrix or --preset")),
    };
    let det = m.det().map_err(fail)?;
    let mut specs = Vec::new();
    for t in &d.at {
        let t = parse_constant(t).map_err(fail)?;
        specs.push(json!({ "t": t.to_string(), "matrix": matrix_json(&m.specialize(&t)) }));
    }
    let entries: Vec<Vec<String>> = m.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
    Ok(Outcome::ok(json!({
        "size": m.size(),
        "matrix": entries,
        "det": det.to_string(),
        "summary": format!("det = {det}"),
        "det_is_one": det == <TPoly as critforge::series::Coeff>::one(),
        "specializations": specs,
    })))
}

fn gw(f: &FormArg, opts: &GlobalOpts) -> Job<Outcome> {
    let q = parse_form(&f.form).map_err(fail)?;
    let class = gw_class(&q, opts.mode).map_err(fail)?;
    let (diag, _) = diagonalize(&q).map_err(fail)?;
    let (parity, disc) = orientation_twist(&q, opts.mode).map_err(fail)?;
    let mode = match opts.mode {
        Mode::Q => "q",
        Mode::CFormal => "c-formal",
    };
    Ok(Outcome::ok(json!({
        "dim": q.dim(),
        "gram": matrix_json(q.gram()),
        "determinant": q.determinant().to_string(),
        "diag": rats(&diag),
        "class": gw_json(&class),
        "hyperbolic_planes": hyperbolic_count(&q).map_err(fail)?,
        "orientation_twist": { "parity": parity, "disc": disc },
        "mode": mode,
    })))
}

//! Python bindings. Potentials keep their source text and are reread at
//! whatever truncation order a computation needs.

use critforge::milnor::{behrend_value, milnor_number, LgPair};
use critforge::quad::gw_class;
use critforge::series::MAX_ORDER;
use critforge::stability::{stabilize, stable_compare, stable_invariants, ts_sum, StableInvariants, Verdict};
use critforge::{parse_series, presets, verify_isotopy, Error, GwClass, Mode, QuadForm, RatMatrix, Rational, Series};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(critforge_py, Inconclusive, PyException);
create_exception!(critforge_py, ContractViolation, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonIsolated(_) | Error::Resource(_) | Error::Precision { .. } => Inconclusive::new_err(e.to_string()),
        Error::Contract(_) => ContractViolation::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(PyValueError::new_err)
}

fn show(s: &Series, vars: &[String]) -> String {
    s.display_with(vars).to_string()
}

/// A polynomial potential with named variables.
#[pyclass(module = "critforge_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Potential {
    expr: String,
    vars: Vec<String>,
}

impl Potential {
    fn series(&self, order: u32) -> PyResult<Series> {
        parse_series(&self.expr, &self.vars, order.min(MAX_ORDER)).map_err(py_err)
    }

    fn pair(&self, order: u32) -> PyResult<LgPair> {
        LgPair::new(self.series(order)?).map_err(py_err)
    }
}

fn gw_dict<'py>(py: Python<'py>, c: &GwClass) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rank", c.rank)?;
    d.set_item("parity", c.parity)?;
    d.set_item("disc", c.disc)?;
    d.set_item("mode", c.mode.name())?;
    Ok(d)
}

fn invariants_dict<'py>(py: Python<'py>, inv: &StableInvariants) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("nvars", inv.nvars)?;
    d.set_item("corank", inv.corank)?;
    d.set_item("mu", inv.mu)?;
    d.set_item("tjurina", inv.tjurina)?;
    d.set_item("hilbert", inv.hilbert.clone())?;
    d.set_item("certified_at", inv.certified_at)?;
    d.set_item("quad_gw", gw_dict(py, &inv.quad_gw)?)?;
    d.set_item("total_dim_parity", inv.total_dim_parity)?;
    d.set_item("multiplicity", inv.multiplicity)?;
    d.set_item("residual", inv.residual.to_string())?;
    Ok(d)
}

#[pymethods]
impl Potential {
    #[new]
    fn new(expr: String, vars: Vec<String>) -> PyResult<Self> {
        let p = Potential { expr, vars };
        p.pair(2)?;
        Ok(p)
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Milnor number, certificate degree and Hilbert function. Raises
    /// `Inconclusive` when no certificate exists up to `cap`.
    #[pyo3(signature = (cap = critforge::milnor::DEFAULT_CAP))]
    fn milnor<'py>(&self, py: Python<'py>, cap: u32) -> PyResult<Bound<'py, PyDict>> {
        let r = milnor_number(&self.pair(cap + 2)?, cap);
        let (Some(mu), Some(d)) = (r.mu, r.certified_at) else {
            let why = r.inconclusive.map(|w| w.to_string()).unwrap_or_default();
            return Err(Inconclusive::new_err(why));
        };
        let out = PyDict::new(py);
        out.set_item("mu", mu)?;
        out.set_item("certified_at", d)?;
        out.set_item("hilbert", r.hilbert)?;
        out.set_item("tjurina", r.tjurina)?;
        Ok(out)
    }

    #[pyo3(signature = (cap = critforge::milnor::DEFAULT_CAP))]
    fn tjurina(&self, cap: u32) -> PyResult<usize> {
        let r = milnor_number(&self.pair(cap + 2)?, cap);
        r.tjurina.ok_or_else(|| Inconclusive::new_err("no determinacy certificate"))
    }

    #[pyo3(signature = (cap = critforge::milnor::DEFAULT_CAP))]
    fn behrend(&self, cap: u32) -> PyResult<i64> {
        behrend_value(&self.pair(cap + 2)?, cap).map_err(py_err)
    }

    /// Splitting at order `n`: corank, Hessian diagonal, residual and the
    /// verified coordinate change in the new coordinates `u…, v…`.
    #[pyo3(signature = (n = critforge::series::DEFAULT_ORDER))]
    fn split<'py>(&self, py: Python<'py>, n: u32) -> PyResult<Bound<'py, PyDict>> {
        let s = critforge::split(&self.pair(n + 1)?, n).map_err(py_err)?;
        let c = s.corank();
        let mut names: Vec<String> = (1..=c).map(|k| format!("u{k}")).collect();
        names.extend((1..=s.rank()).map(|k| format!("v{k}")));
        let out = PyDict::new(py);
        out.set_item("corank", c)?;
        out.set_item("rank", s.rank())?;
        out.set_item("diag", s.hessian.diag.iter().map(|d| d.to_string()).collect::<Vec<_>>())?;
        out.set_item("residual", show(s.residual.f(), &names[..c]))?;
        out.set_item(
            "witness",
            s.witness.components().iter().map(|w| show(w, &names)).collect::<Vec<_>>(),
        )?;
        Ok(out)
    }

    #[pyo3(signature = (n = critforge::series::DEFAULT_ORDER, mode = "q"))]
    fn invariants<'py>(&self, py: Python<'py>, n: u32, mode: &str) -> PyResult<Bound<'py, PyDict>> {
        let inv = stable_invariants(&self.pair(n + 1)?, n, parse_mode(mode)?).map_err(py_err)?;
        invariants_dict(py, &inv)
    }

    /// `f ⊕ q` in fresh variables `s1, s2, …`.
    #[pyo3(signature = (form, mode = "q"))]
    fn stabilize(&self, form: &QuadraticForm, mode: &str) -> PyResult<Potential> {
        let p = self.pair(2)?;
        stabilize(&p, &form.q, parse_mode(mode)?).map_err(py_err)?;
        let mut vars = self.vars.clone();
        let mut expr = format!("({})", self.expr);
        let mut k = 1;
        let mut fresh = Vec::new();
        while fresh.len() < form.q.dim() {
            let name = format!("s{k}");
            if !vars.contains(&name) {
                fresh.push(name);
            }
            k += 1;
        }
        let q = form.q.to_series(fresh.len(), 2, 0);
        expr.push_str(&format!(" + ({})", show(&q, &fresh)));
        vars.extend(fresh);
        Ok(Potential { expr, vars })
    }

    /// Thom-Sebastiani sum; clashing names in `other` get a suffix.
    fn ts_sum(&self, other: &Potential) -> PyResult<Potential> {
        ts_sum(&self.pair(2)?, &other.pair(2)?).map_err(py_err)?;
        let mut vars = self.vars.clone();
        let mut renamed = Vec::new();
        for name in &other.vars {
            let mut candidate = name.clone();
            let mut k = 2;
            while vars.contains(&candidate) {
                candidate = format!("{name}_{k}");
                k += 1;
            }
            vars.push(candidate.clone());
            renamed.push(candidate);
        }
        let g = other.series(MAX_ORDER)?;
        Ok(Potential { expr: format!("({}) + ({})", self.expr, show(&g, &renamed)), vars })
    }

    fn __str__(&self) -> PyResult<String> {
        Ok(show(&self.series(MAX_ORDER)?, &self.vars))
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("Potential({:?}, {:?})", self.__str__()?, self.vars))
    }
}

/// A non-degenerate quadratic form given by its symmetric Gram matrix.
#[pyclass(module = "critforge_py", frozen)]
struct QuadraticForm {
    q: QuadForm,
}

fn rational(s: &str) -> PyResult<Rational> {
    critforge::parse_expr(s, &[])
        .map_err(|e| py_err(e.into()))?
        .constant_value()
        .ok_or_else(|| PyValueError::new_err(format!("`{s}` is not a number")))
}

#[pymethods]
impl QuadraticForm {
    /// Entries may be ints or strings such as "-1/2".
    #[new]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|v| rational(&v.str()?.to_cow()?)).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(PyValueError::new_err("Gram matrix must be square"));
        }
        Ok(QuadraticForm { q: QuadForm::new(RatMatrix::from_rows(rows)).map_err(py_err)? })
    }

    #[staticmethod]
    fn diagonal(entries: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let d = entries.iter().map(|v| rational(&v.str()?.to_cow()?)).collect::<PyResult<Vec<_>>>()?;
        Ok(QuadraticForm { q: QuadForm::diagonal(&d).map_err(py_err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.q.dim()
    }

    fn determinant(&self) -> String {
        self.q.determinant().to_string()
    }

    #[pyo3(signature = (mode = "q"))]
    fn gw_class<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyDict>> {
        gw_dict(py, &gw_class(&self.q, parse_mode(mode)?).map_err(py_err)?)
    }

    fn __repr__(&self) -> String {
        format!("QuadraticForm({})", self.q)
    }
}

/// Compares two potentials up to stabilization at order `n`.
#[pyfunction]
#[pyo3(signature = (left, right, n = critforge::series::DEFAULT_ORDER, mode = "q"))]
fn compare<'py>(py: Python<'py>, left: &Potential, right: &Potential, n: u32, mode: &str) -> PyResult<Bound<'py, PyDict>> {
    let cmp = stable_compare(&left.pair(n + 1)?, &right.pair(n + 1)?, n, parse_mode(mode)?).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("summary", cmp.verdict.to_string())?;
    out.set_item("distinguished", cmp.verdict.is_distinguished())?;
    if let Verdict::Distinguished { invariant, .. } = &cmp.verdict {
        out.set_item("invariant", *invariant)?;
    }
    out.set_item("left", invariants_dict(py, &cmp.left)?)?;
    out.set_item("right", invariants_dict(py, &cmp.right)?)?;
    Ok(out)
}

/// Checks the built-in E6 isotopy at order `n`.
#[pyfunction]
#[pyo3(signature = (n = critforge::series::DEFAULT_ORDER))]
fn e6_isotopy<'py>(py: Python<'py>, n: u32) -> PyResult<Bound<'py, PyDict>> {
    let f = presets::e6_potential(n + 1).map_err(py_err)?;
    let fam = presets::e6_isotopy(n).map_err(py_err)?;
    let r = verify_isotopy(&f, &fam, n).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("passed", r.passed())?;
    out.set_item("jacobian_det", r.jacobian_det.to_string())?;
    out.set_item("phi_1_matches_automorphism", r.phi_1 == presets::e6_automorphism(n).map_err(py_err)?)?;
    Ok(out)
}

/// Determinant of the built-in 3×3 family as a polynomial in `t`.
#[pyfunction]
fn three_cycle_det() -> PyResult<String> {
    Ok(presets::hyperbolic_3cycle().det().map_err(py_err)?.to_string())
}

#[pymodule]
fn critforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Potential>()?;
    m.add_class::<QuadraticForm>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(e6_isotopy, m)?)?;
    m.add_function(wrap_pyfunction!(three_cycle_det, m)?)?;
    m.add("Inconclusive", m.py().get_type::<Inconclusive>())?;
    m.add("ContractViolation", m.py().get_type::<ContractViolation>())?;
    Ok(())
}

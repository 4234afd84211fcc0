//! Python bindings: JSON-descriptor constructors plus the main exact
//! operations (polynomial certification, complexity, Følner tables,
//! averages, von Neumann sequences and rate tuples).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use walshlab::descriptors::{ActionDesc, MapDesc, SystemDesc};
use walshlab::dynamics::{ActionAssignment, Observable};
use walshlab::folner::{self, FolnerSet};
use walshlab::growth;
use walshlab::nilgroup::{lcs, refine_scalar, Length};
use walshlab::polymap::Target;
use walshlab::rates;
use walshlab::systems;
use walshlab::vncircle;
use walshlab::{Int, Rat};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rat(s: &str) -> PyResult<Rat> {
    s.parse::<Rat>().map_err(err)
}

fn parse_int(s: &str) -> PyResult<Int> {
    s.parse::<Int>().map_err(err)
}

/// A polynomial map described by JSON (see docs/formats.md).
#[pyclass]
struct Map {
    inner: walshlab::polymap::PolyMap,
    dim: usize,
}

#[pymethods]
impl Map {
    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        let desc: MapDesc = serde_json::from_str(json).map_err(err)?;
        let inner = desc.build().map_err(err)?;
        Ok(Map { inner, dim: desc.dim })
    }

    /// "certified", "refuted" or "unknown" against the scalar-degree
    /// refinement of the lower central series.
    #[pyo3(signature = (degree = 2))]
    fn verify(&self, degree: usize) -> PyResult<String> {
        let verdict = if matches!(self.inner.target, Target::Ut(_)) {
            let pf = refine_scalar(&lcs(self.dim), degree).map_err(err)?;
            let cap = self.inner.default_depth_cap(&pf);
            self.inner.is_polynomial(&pf, cap).map_err(err)?
        } else {
            self.inner.is_polynomial(&lcs(self.dim), 16).map_err(err)?
        };
        Ok(if verdict.is_certified() {
            "certified".into()
        } else if verdict.is_refuted() {
            "refuted".into()
        } else {
            "unknown".into()
        })
    }
}

/// A polynomial system (g₀ ≡ 1, g₁, …, g_j) described by JSON.
#[pyclass]
struct System {
    inner: walshlab::systems::System,
}

#[pymethods]
impl System {
    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        let desc: SystemDesc = serde_json::from_str(json).map_err(err)?;
        Ok(System { inner: desc.build().map_err(err)? })
    }

    fn j(&self) -> usize {
        self.inner.j()
    }

    /// Certified complexity bound, or None when inconclusive in budget.
    #[pyo3(signature = (budget = 8))]
    fn certify(&self, budget: usize) -> PyResult<Option<usize>> {
        Ok(systems::certify_complexity(&self.inner, budget)
            .map_err(err)?
            .bound())
    }
}

/// A finite measure-preserving action with observables, from JSON.
#[pyclass]
struct Action {
    inner: ActionAssignment,
    fs: Vec<Observable>,
}

#[pymethods]
impl Action {
    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        let desc: ActionDesc = serde_json::from_str(json).map_err(err)?;
        let (inner, fs) = desc.build().map_err(err)?;
        Ok(Action { inner, fs })
    }

    fn period(&self) -> u64 {
        self.inner.period()
    }

    /// Exact multiple ergodic average over the canonical F_N, "p/q" per point.
    fn average(&self, floor: u64) -> PyResult<Vec<String>> {
        let i = FolnerSet::canonical(self.inner.model(), floor).map_err(err)?;
        let avg = self.inner.av(&i, &self.fs).map_err(err)?;
        Ok(avg.values.iter().map(|v| v.to_string()).collect())
    }

    /// Exact period-lattice limit, "p/q" per point.
    fn limit(&self) -> PyResult<Vec<String>> {
        let lim = self.inner.limit_oracle(&self.fs, 1 << 24).map_err(err)?;
        Ok(lim.values.iter().map(|v| v.to_string()).collect())
    }
}

/// Evaluate a growth expression at integer m (both as decimal strings).
#[pyfunction]
fn growth_eval(expr: &str, m: &str) -> PyResult<String> {
    let g = growth::parse(expr).map_err(err)?;
    Ok(g.eval(&parse_int(m)?).map_err(err)?.to_string())
}

/// c(d, j); length is a natural number as string, or "-inf".
#[pyfunction]
fn complexity_bound(length: &str, j: u64) -> PyResult<String> {
    let d = if length == "-inf" {
        Length::MinusInf
    } else {
        Length::Fin(length.parse::<usize>().map_err(err)?)
    };
    Ok(systems::complexity_bound(d, j).map_err(err)?.to_string())
}

/// Closed-form φ_γ(L) on ℤ.
#[pyfunction]
fn phi_z(gamma: &str, l: u64) -> PyResult<String> {
    Ok(folner::phi_z_closed_form(&parse_rat(gamma)?, l).to_string())
}

/// |lF_N Δ F_N|/|F_N| sup over l ∈ F_k, exact "p/q".
#[pyfunction]
fn sup_ratio(model: &str, k: u64, n: u64) -> PyResult<String> {
    let m = walshlab::descriptors::parse_model(model).map_err(err)?;
    Ok(folner::sup_ratio(&m, k, n).to_string())
}

/// Quantitative von Neumann M-sequence: (K, [M₁…M_K] as strings).
#[pyfunction]
fn vn_sequence(eps: &str, growth_expr: &str, m0: &str) -> PyResult<(usize, Vec<String>)> {
    let g = growth::parse(growth_expr).map_err(err)?;
    let seq = vncircle::vn_sequence(&parse_rat(eps)?, &g, &parse_int(m0)?).map_err(err)?;
    Ok((seq.k, seq.ms.iter().map(|m| m.to_string()).collect()))
}

/// Theorem 9.1 tuple, degrading gracefully; returns a JSON string.
#[pyfunction]
#[pyo3(signature = (eps, complexity, growth_expr, m, delta_override = None))]
fn main_tuple(
    eps: &str,
    complexity: u32,
    growth_expr: &str,
    m: &str,
    delta_override: Option<&str>,
) -> PyResult<String> {
    let g = growth::parse(growth_expr).map_err(err)?;
    let mut ctx = rates::RateCtx::standard();
    if let Some(d) = delta_override {
        ctx.delta_rule = rates::DeltaRule::Override(parse_rat(d)?);
    }
    let f = rates::nat_from_growth(g);
    let phi = rates::phi_z_closed();
    let out = match rates::main_tuple_deferred(complexity, &parse_rat(eps)?, &f, &parse_int(m)?, &phi, &ctx) {
        rates::TupleOutcome::Exact(t) => serde_json::json!({
            "count": t.count.to_string(),
            "entries": t.entries.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "n": t.n.map(|n| n.to_string()),
        }),
        rates::TupleOutcome::CountOnly { count, digits, description } => serde_json::json!({
            "count": count.to_string(),
            "digits": digits,
            "description": description,
        }),
        rates::TupleOutcome::Symbolic { description } => serde_json::json!({
            "description": description,
        }),
    };
    Ok(out.to_string())
}

#[pymodule]
fn walshlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Map>()?;
    m.add_class::<System>()?;
    m.add_class::<Action>()?;
    m.add_function(wrap_pyfunction!(growth_eval, m)?)?;
    m.add_function(wrap_pyfunction!(complexity_bound, m)?)?;
    m.add_function(wrap_pyfunction!(phi_z, m)?)?;
    m.add_function(wrap_pyfunction!(sup_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(vn_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(main_tuple, m)?)?;
    Ok(())
}

//! Python bindings for the dualplan toolkit.
//!
//! The module mirrors the command-line surface: load or generate a task,
//! normalize/dualize it, run a search, validate plans, and synthesize
//! invariants. Errors surface as `ValueError`.

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dualplan as dp;
use dualplan::search::PrunerSet;
use dualplan::{Direction, Heuristic, SearchConfig, StateSet, Strategy};

type ActionTuple = (String, Vec<String>, Vec<String>, Vec<String>);

fn val_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A grounded planning task over a fixed atom universe.
#[pyclass(name = "Task", frozen, eq)]
#[derive(Clone, PartialEq)]
struct PyTask {
    inner: dp::Task,
}

impl PyTask {
    fn names(&self, s: &StateSet) -> Vec<String> {
        self.inner.atom_names(s)
    }
}

fn set_from_names(
    task: &dp::Task,
    names: &[String],
    context: &str,
) -> PyResult<StateSet> {
    let mut set = StateSet::empty(task.width());
    for name in names {
        let id = task
            .atoms
            .get(name)
            .ok_or_else(|| val_err(format!("unknown atom `{name}` (in {context})")))?;
        set.insert(id);
    }
    Ok(set)
}

#[pymethods]
impl PyTask {
    /// Task(atoms, init, goal, actions) where each action is a
    /// (name, pre, add, del) tuple of atom-name lists.
    #[new]
    fn new(
        atoms: Vec<String>,
        init: Vec<String>,
        goal: Vec<String>,
        actions: Vec<ActionTuple>,
    ) -> PyResult<Self> {
        let mut table = dp::AtomTable::new();
        for name in &atoms {
            table.intern(name);
        }
        if table.len() != atoms.len() {
            return Err(val_err("duplicate atom name"));
        }
        let shell = dp::Task::new(
            table,
            StateSet::empty(atoms.len()),
            StateSet::empty(atoms.len()),
            Vec::new(),
        )
        .map_err(val_err)?;
        let init = set_from_names(&shell, &init, "init")?;
        let goal = set_from_names(&shell, &goal, "goal")?;
        let mut built = Vec::with_capacity(actions.len());
        for (name, pre, add, del) in &actions {
            built.push(dp::Action::new(
                name,
                set_from_names(&shell, pre, name)?,
                set_from_names(&shell, add, name)?,
                set_from_names(&shell, del, name)?,
            ));
        }
        let inner = dp::Task::new(shell.atoms, init, goal, built).map_err(val_err)?;
        Ok(PyTask { inner })
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.inner.atoms.names().map(str::to_string).collect()
    }

    #[getter]
    fn init(&self) -> Vec<String> {
        self.names(&self.inner.init)
    }

    #[getter]
    fn goal(&self) -> Vec<String> {
        self.names(&self.inner.goal)
    }

    #[getter]
    fn actions(&self) -> Vec<ActionTuple> {
        self.inner
            .actions
            .iter()
            .map(|a| {
                (
                    a.name.clone(),
                    self.names(&a.pre),
                    self.names(&a.add),
                    self.names(&a.del),
                )
            })
            .collect()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn normalized(&self) -> bool {
        self.inner.is_normalized()
    }

    #[getter]
    fn dualized(&self) -> bool {
        self.inner.dualized
    }

    fn __repr__(&self) -> String {
        format!(
            "Task({} atoms, {} actions{})",
            self.inner.width(),
            self.inner.actions.len(),
            if self.inner.dualized { ", dualized" } else { "" },
        )
    }
}

/// Parse a task from ground-task-format text.
#[pyfunction]
fn read_gtf(text: &str) -> PyResult<PyTask> {
    Ok(PyTask {
        inner: dp::read_gtf(text).map_err(val_err)?,
    })
}

/// Render a task as ground-task-format text.
#[pyfunction]
fn write_gtf(task: PyRef<'_, PyTask>) -> String {
    dp::write_gtf(&task.inner)
}

/// Parse and ground a typed STRIPS domain/problem pair.
#[pyfunction]
#[pyo3(signature = (domain, problem, reachability_prune = true))]
fn ground_pddl(domain: &str, problem: &str, reachability_prune: bool) -> PyResult<PyTask> {
    let domain = dp::parse_domain(domain).map_err(val_err)?;
    let problem = dp::parse_problem(problem).map_err(val_err)?;
    let options = dp::GroundOptions { reachability_prune };
    Ok(PyTask {
        inner: dp::ground(&domain, &problem, &options).map_err(val_err)?,
    })
}

/// Render a task as a grounded domain/problem pair of PDDL texts.
#[pyfunction]
fn write_pddl(task: PyRef<'_, PyTask>) -> (String, String) {
    dp::write_pddl(&task.inner)
}

/// Normalize every action (effects disjoint, adds not already required).
#[pyfunction]
fn normalize(task: PyRef<'_, PyTask>) -> PyTask {
    PyTask {
        inner: dp::normalize_task(&task.inner),
    }
}

/// Normalize, then build the dual task: complemented init/goal and
/// del/add/pre actions.
#[pyfunction]
fn dualize(task: PyRef<'_, PyTask>) -> PyResult<PyTask> {
    let normalized = dp::normalize_task(&task.inner);
    Ok(PyTask {
        inner: dp::dual_task(&normalized).map_err(val_err)?,
    })
}

/// Turn a plan for a dual task into a plan for the original: same action
/// names, reversed order.
#[pyfunction]
fn dual_plan_to_primal(dual: PyRef<'_, PyTask>, steps: Vec<String>) -> PyResult<Vec<String>> {
    let plan = dp::dual_plan_to_primal(&dual.inner, &dp::Plan::new(steps)).map_err(val_err)?;
    Ok(plan.steps)
}

/// Run a search and return a dict with verdict, plan, stats and (optionally)
/// the expansion layers. The task is normalized first.
#[pyfunction]
#[pyo3(signature = (
    task,
    direction = "forward",
    strategy = "gbfs",
    heuristic = None,
    prune = None,
    node_limit = None,
    time_limit = None,
    record_layers = false,
))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    task: PyRef<'_, PyTask>,
    direction: &str,
    strategy: &str,
    heuristic: Option<&str>,
    prune: Option<&str>,
    node_limit: Option<u64>,
    time_limit: Option<f64>,
    record_layers: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let normalized = dp::normalize_task(&task.inner);
    let direction: Direction = direction.parse().map_err(val_err)?;
    let strategy: Strategy = strategy.parse().map_err(val_err)?;
    let heuristic = match heuristic {
        Some(h) => h.parse::<Heuristic>().map_err(val_err)?,
        None => Heuristic::default_for(strategy, direction),
    };
    let pruners = match prune {
        Some(p) => p.parse::<PrunerSet>().map_err(val_err)?,
        None => PrunerSet::default_for(direction),
    };
    let time_limit = time_limit
        .map(Duration::try_from_secs_f64)
        .transpose()
        .map_err(val_err)?;
    let config = SearchConfig {
        strategy,
        heuristic,
        pruners,
        node_limit,
        time_limit,
        record_layers,
    };
    let outcome = dp::solve(&normalized, direction, &config).map_err(val_err)?;

    let dict = PyDict::new(py);
    dict.set_item("verdict", outcome.verdict.to_string())?;
    dict.set_item(
        "plan",
        outcome.plan.as_ref().map(|p| p.steps.clone()),
    )?;
    let s = &outcome.stats;
    let stats = PyDict::new(py);
    stats.set_item("expanded", s.expanded)?;
    stats.set_item("generated", s.generated)?;
    stats.set_item("duplicates", s.duplicates)?;
    stats.set_item("pruned_useful", s.pruned_useful)?;
    stats.set_item("pruned_relevant", s.pruned_relevant)?;
    stats.set_item("pruned_invariants", s.pruned_invariants)?;
    stats.set_item("pruned_infinite", s.pruned_infinite)?;
    stats.set_item("peak_open", s.peak_open)?;
    stats.set_item("wall_time_ms", s.wall_time.as_secs_f64() * 1e3)?;
    dict.set_item("stats", stats)?;
    if record_layers {
        let wrap = PyTask { inner: normalized };
        let layers: Vec<Vec<Vec<String>>> = outcome
            .layers
            .iter()
            .map(|layer| layer.iter().map(|s| wrap.names(s)).collect())
            .collect();
        dict.set_item("layers", layers)?;
    }
    Ok(dict)
}

/// Check a plan against the task. Returns the state trace (a list of states,
/// each a list of atom names, from init to final) or raises ValueError.
#[pyfunction]
fn validate(task: PyRef<'_, PyTask>, steps: Vec<String>) -> PyResult<Vec<Vec<String>>> {
    let trace =
        dp::validate_plan(&task.inner, &dp::Plan::new(steps)).map_err(val_err)?;
    Ok(trace.iter().map(|s| task.names(s)).collect())
}

/// Synthesize invariants. Forward: atoms always/never true plus mutex pairs
/// over reachable states. Backward: atoms required in, and binary clauses
/// satisfied by, every goal-reaching state.
#[pyfunction]
#[pyo3(signature = (task, direction = "forward"))]
fn invariants<'py>(
    py: Python<'py>,
    task: PyRef<'_, PyTask>,
    direction: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let normalized = dp::normalize_task(&task.inner);
    let direction: Direction = direction.parse().map_err(val_err)?;
    let wrap = PyTask {
        inner: normalized.clone(),
    };
    let pair_names = |pairs: &[(dp::AtomId, dp::AtomId)]| -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|&(p, q)| {
                (
                    normalized.atoms.name(p).to_string(),
                    normalized.atoms.name(q).to_string(),
                )
            })
            .collect()
    };
    let dict = PyDict::new(py);
    match direction {
        Direction::Forward => {
            let m = dp::mutex_fixpoint(&normalized).map_err(val_err)?;
            dict.set_item("always_true", wrap.names(&m.always_true))?;
            dict.set_item("always_false", wrap.names(&m.always_false))?;
            dict.set_item("mutex", pair_names(&m.pairs))?;
        }
        Direction::Backward => {
            let c = dp::backward_invariants(&normalized).map_err(val_err)?;
            dict.set_item("unary", wrap.names(&c.unary))?;
            dict.set_item("clauses", pair_names(&c.clauses))?;
        }
    }
    Ok(dict)
}

/// Generate a reproducible random task.
#[pyfunction]
#[pyo3(signature = (atoms = 6, actions = 6, seed = 0, normalize = true))]
fn random_task(atoms: usize, actions: usize, seed: u64, normalize: bool) -> PyTask {
    PyTask {
        inner: dp::oracle::random_task(&dp::oracle::RandomTaskConfig {
            n_atoms: atoms,
            n_actions: actions,
            seed,
            normalize,
            ..Default::default()
        }),
    }
}

/// Decide solvability by exhaustive state-space enumeration (small tasks
/// only).
#[pyfunction]
fn solvable_bruteforce(task: PyRef<'_, PyTask>) -> PyResult<bool> {
    let normalized = dp::normalize_task(&task.inner);
    dp::oracle::solvable_bruteforce(&normalized).map_err(val_err)
}

#[pymodule]
fn dualplan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTask>()?;
    m.add_function(wrap_pyfunction!(read_gtf, m)?)?;
    m.add_function(wrap_pyfunction!(write_gtf, m)?)?;
    m.add_function(wrap_pyfunction!(ground_pddl, m)?)?;
    m.add_function(wrap_pyfunction!(write_pddl, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(dualize, m)?)?;
    m.add_function(wrap_pyfunction!(dual_plan_to_primal, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(random_task, m)?)?;
    m.add_function(wrap_pyfunction!(solvable_bruteforce, m)?)?;
    Ok(())
}

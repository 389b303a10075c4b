//! Python bindings: run simulations, decode utterances and use the
//! statistics kernel from Python.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;

use ::lexsim as core;
use core::dialogue::{self, Decoding};
use core::harness::{self, ExperimentGrid, SimulateOptions};
use core::lexicon::{Form, FormParams};
use core::metrics::RunResult;
use core::population::SimRng;
use core::stats::{self, SharePoint};
use core::world::{Atom, ConceptInventory, Event, Individuation};
use core::Arrangement;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn letters(text: &str) -> PyResult<Form> {
    Form::from_letters(text).ok_or_else(|| value_err(format!("`{text}` is not lowercase letters")))
}

/// Parameters of one simulation run.
#[pyclass(name = "RunConfig")]
struct PyRunConfig {
    inner: core::RunConfig,
}

#[pymethods]
impl PyRunConfig {
    #[new]
    #[pyo3(signature = (
        p_sm=0.0, theta=0.0, arrangement="fixed", agents=10, epochs=1000, window=100,
        round_length=100, seed=0, actions=10, entities=20, arity=3, alphabet=20,
        form_len_min=2, form_len_max=5,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        p_sm: f64,
        theta: f64,
        arrangement: &str,
        agents: usize,
        epochs: u32,
        window: u32,
        round_length: u32,
        seed: u64,
        actions: u32,
        entities: u32,
        arity: usize,
        alphabet: u16,
        form_len_min: usize,
        form_len_max: usize,
    ) -> PyResult<Self> {
        let inner = core::RunConfig {
            p_sm,
            theta,
            arrangement: arrangement.parse::<Arrangement>().map_err(value_err)?,
            agents,
            epochs,
            interactions_per_epoch: agents,
            inventory: ConceptInventory::new(actions, entities, arity).map_err(value_err)?,
            forms: FormParams::new(form_len_min, form_len_max, alphabet).map_err(value_err)?,
            window,
            round_length,
            seed,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn p_sm(&self) -> f64 {
        self.inner.p_sm
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn arrangement(&self) -> &'static str {
        self.inner.arrangement.as_str()
    }

    #[getter]
    fn agents(&self) -> usize {
        self.inner.agents
    }

    #[getter]
    fn epochs(&self) -> u32 {
        self.inner.epochs
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "RunConfig(p_sm={}, theta={}, arrangement='{}', agents={}, epochs={}, seed={})",
            c.p_sm, c.theta, c.arrangement, c.agents, c.epochs, c.seed
        )
    }
}

fn result_dict<'py>(py: Python<'py>, r: &RunResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("combo_id", r.combo_id)?;
    d.set_item("arrangement", r.arrangement.as_str())?;
    d.set_item("p_sm", r.p_sm)?;
    d.set_item("theta", r.theta)?;
    d.set_item("run_index", r.run_index)?;
    d.set_item("seed", r.seed)?;
    for name in harness::io::METRICS {
        d.set_item(name, r.metric(name))?;
    }
    d.set_item("share_exactly", r.share_exactly.clone())?;
    Ok(d)
}

/// Runs one simulation and returns its metrics as a dict.
#[pyfunction]
fn run_simulation<'py>(py: Python<'py>, config: &PyRunConfig) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.inner.clone();
    let result = py.detach(|| core::run_simulation(cfg)).map_err(value_err)?;
    result_dict(py, &result)
}

/// A single agent's lexicon. Forms are written as lowercase letters.
#[pyclass(name = "Lexicon")]
#[derive(Default)]
struct PyLexicon {
    inner: core::lexicon::Lexicon,
}

#[pymethods]
impl PyLexicon {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    /// Stores `(meaning, form)` or reinforces it if already known.
    #[pyo3(signature = (meaning, form, epoch=0))]
    fn commit(&mut self, meaning: u32, form: &str, epoch: u32) -> PyResult<()> {
        let form = letters(form)?;
        self.inner.commit(Atom(meaning), form.symbols(), epoch);
        Ok(())
    }

    /// `(meaning, form, count)` triples in insertion order.
    fn mappings(&self) -> Vec<(u32, String, u32)> {
        self.inner.mappings().iter().map(|m| (m.meaning.0, m.form.to_string(), m.count)).collect()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.stats();
        let d = PyDict::new(py);
        d.set_item("size", s.size)?;
        d.set_item("unique_meanings", s.unique_meanings)?;
        d.set_item("unique_forms", s.unique_forms)?;
        d.set_item("synonymy", s.synonymy)?;
        d.set_item("homonymy", s.homonymy)?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

type Spans = Vec<(usize, usize, u32)>;
type DecodingTuple = (Spans, Spans, Vec<(usize, usize)>);

fn decoding_tuple(d: &Decoding) -> DecodingTuple {
    (
        d.matches.iter().map(|m| (m.span.start, m.span.end, m.meaning.0)).collect(),
        d.guesses.iter().map(|g| (g.span.start, g.span.end, g.meaning.0)).collect(),
        d.gaps.iter().map(|s| (s.start, s.end)).collect(),
    )
}

fn with_view<T>(event: Vec<u32>, order: Option<Vec<u32>>, f: impl FnOnce(&Individuation<'_>) -> T) -> PyResult<T> {
    let ev = Event::from_atoms(event.iter().map(|&a| Atom(a)).collect())
        .ok_or_else(|| value_err("event atoms must be distinct and non-empty"))?;
    let order = order.unwrap_or(event).into_iter().map(Atom).collect();
    let view = Individuation::with_order(&ev, order).ok_or_else(|| value_err("order must permute the event"))?;
    Ok(f(&view))
}

/// Segments `text` with `lexicon` for a hearer attending to `event` in
/// `order`. Returns `(matches, guesses, gaps)` with `(start, end, meaning)`
/// triples and `(start, end)` gaps.
#[pyfunction]
#[pyo3(signature = (lexicon, text, event, order=None, seed=0, exhaustive=false))]
fn decode(
    lexicon: &PyLexicon,
    text: &str,
    event: Vec<u32>,
    order: Option<Vec<u32>>,
    seed: u64,
    exhaustive: bool,
) -> PyResult<DecodingTuple> {
    let text = letters(text)?;
    let mut rng = SimRng::seed_from_u64(seed);
    let d = with_view(event, order, |view| {
        if exhaustive {
            dialogue::brute_force_decode(&lexicon.inner, text.symbols(), view, &mut rng)
        } else {
            Some(dialogue::decode(&lexicon.inner, text.symbols(), view, &mut rng))
        }
    })?
    .ok_or_else(|| value_err(format!("exhaustive decoding is limited to {} symbols", dialogue::BRUTE_FORCE_MAX_LEN)))?;
    Ok(decoding_tuple(&d))
}

/// Welch two-sample t-test. Returns `(t, df, p)`.
#[pyfunction]
fn welch_t(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let sa = stats::aggregate(&a).map_err(value_err)?;
    let sb = stats::aggregate(&b).map_err(value_err)?;
    let r = stats::welch_t(&sa, &sb).map_err(value_err)?;
    Ok((r.t, r.df, r.p))
}

/// Two-sided Student-t tail probability.
#[pyfunction]
fn student_t_sf(t: f64, df: f64) -> f64 {
    stats::student_t_sf(t, df)
}

/// Fits `ratio = a^p_sm * b^-k` to `(p_sm, k, ratio)` triples. Returns a
/// dict with `ln_a`, `ln_b`, `a`, `b`, `r2`, `n_points`.
#[pyfunction]
fn fit_mapshare<'py>(py: Python<'py>, points: Vec<(f64, f64, f64)>) -> PyResult<Bound<'py, PyDict>> {
    let points: Vec<SharePoint> = points.into_iter().map(|(p_sm, k, ratio)| SharePoint { p_sm, k, ratio }).collect();
    let fit = stats::fit_mapshare(&points).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("ln_a", fit.ln_a)?;
    d.set_item("ln_b", fit.ln_b)?;
    d.set_item("a", fit.a())?;
    d.set_item("b", fit.b())?;
    d.set_item("r2", fit.r2)?;
    d.set_item("n_points", fit.n_points)?;
    Ok(d)
}

fn grid_from(config: &str) -> PyResult<ExperimentGrid> {
    ExperimentGrid::parse(config).map_err(value_err)
}

/// Parameter combinations of a config text (empty text gives the default
/// grid) as `(combo_id, arrangement, p_sm, theta)` tuples.
#[pyfunction]
#[pyo3(signature = (config=""))]
fn expand_grid(config: &str) -> PyResult<Vec<(usize, &'static str, f64, f64)>> {
    let grid = grid_from(config)?;
    grid.validate().map_err(value_err)?;
    Ok(harness::expand_grid(&grid).into_iter().map(|c| (c.combo_id, c.arrangement.as_str(), c.p_sm, c.theta)).collect())
}

#[pyfunction]
fn derive_seed(master_seed: u64, combo_id: usize, run_index: usize) -> u64 {
    harness::derive_seed(master_seed, combo_id, run_index)
}

fn pipeline_err(e: core::Error) -> PyErr {
    match e {
        core::Error::Config(c) => value_err(c),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Runs the sweep described by `config` text and writes `runs.csv` into
/// `out_dir`. Returns the number of runs.
#[pyfunction]
#[pyo3(signature = (config, out_dir, runs=None, seed=None, threads=0))]
fn simulate(
    py: Python<'_>,
    config: &str,
    out_dir: PathBuf,
    runs: Option<usize>,
    seed: Option<u64>,
    threads: usize,
) -> PyResult<usize> {
    let mut grid = grid_from(config)?;
    if let Some(runs) = runs {
        grid.runs = runs;
    }
    if let Some(seed) = seed {
        grid.master_seed = seed;
    }
    let opts = SimulateOptions { threads, ..Default::default() };
    py.detach(|| harness::simulate(&grid, &out_dir, &opts)).map(|r| r.len()).map_err(pipeline_err)
}

/// Writes `summary.csv`, `tests.csv` and `fit.csv` from `runs.csv`.
#[pyfunction]
fn analyze(py: Python<'_>, in_dir: PathBuf, out_dir: PathBuf) -> PyResult<()> {
    py.detach(|| harness::analyze(&in_dir, &out_dir)).map(drop).map_err(pipeline_err)
}

/// Writes the per-figure CSV tables from `runs.csv`.
#[pyfunction]
fn report(py: Python<'_>, in_dir: PathBuf, out_dir: PathBuf) -> PyResult<Vec<&'static str>> {
    py.detach(|| harness::report(&in_dir, &out_dir))
        .map(|tables| tables.into_iter().map(|(name, _)| name).collect())
        .map_err(pipeline_err)
}

#[pymodule]
mod lexsim {
    #[pymodule_export]
    use super::{
        analyze, decode, derive_seed, expand_grid, fit_mapshare, report, run_simulation, simulate, student_t_sf,
        welch_t, PyLexicon, PyRunConfig,
    };
}

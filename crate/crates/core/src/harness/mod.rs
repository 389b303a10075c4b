//! Experiment sweeps: configuration, seeding, parallel execution and the
//! CSV pipeline (`simulate` → `analyze` → `report`).

mod analyze;
mod config;
mod grid;
pub mod io;
mod report;

use std::fs;
use std::io::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lexicon::render_symbols;
use crate::metrics::RunResult;
use crate::population::{Agent, InteractionRecord, Simulation};

pub use analyze::{analyze, analyze_runs, comparison_battery, fit_points, Analysis, FitRow, SummaryRow, TestRow};
pub use config::{ExperimentGrid, KEYS as CONFIG_KEYS};
pub use grid::{derive_seed, expand_grid, splitmix64, Combo};
pub use report::{figure_tables, report, FigureRow, FIGURES};

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    /// Worker threads; 0 uses all available cores.
    pub threads: usize,
    /// Write a JSON-lines trace of every interaction under `trace/`.
    pub trace: bool,
    /// Write every agent's final lexicon under `lexicons/`.
    pub dump_lexicons: bool,
}

struct Job {
    combo: Combo,
    run_index: usize,
    seed: u64,
}

/// Runs every `(combo, run)` of the grid in parallel. Results come back
/// ordered by `(combo_id, run_index)` whatever the thread count.
pub fn execute(grid: &ExperimentGrid, threads: usize) -> Result<Vec<RunResult>> {
    run_jobs(grid, &SimulateOptions { threads, ..Default::default() }, None)
}

/// [`execute`], then writes `runs.csv`, `lexicon_window.csv` and the
/// effective `config.txt` into `out_dir`.
pub fn simulate(grid: &ExperimentGrid, out_dir: &Path, opts: &SimulateOptions) -> Result<Vec<RunResult>> {
    grid.validate()?;
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    for (flag, dir) in [(opts.trace, "trace"), (opts.dump_lexicons, "lexicons")] {
        if flag {
            let d = out_dir.join(dir);
            fs::create_dir_all(&d).map_err(Error::io(&d))?;
        }
    }
    let results = run_jobs(grid, opts, Some(out_dir))?;
    io::write_runs(&out_dir.join(io::RUNS_FILE), &results, grid.base.agents)?;
    io::write_lexicon_window(&out_dir.join(io::LEXICON_WINDOW_FILE), &results)?;
    let cfg = out_dir.join("config.txt");
    fs::write(&cfg, grid.to_config_text()).map_err(Error::io(&cfg))?;
    Ok(results)
}

fn run_jobs(grid: &ExperimentGrid, opts: &SimulateOptions, out_dir: Option<&Path>) -> Result<Vec<RunResult>> {
    grid.validate()?;
    let jobs: Vec<Job> = expand_grid(grid)
        .into_iter()
        .flat_map(|combo| {
            (0..grid.runs).map(move |run_index| Job {
                combo,
                run_index,
                seed: derive_seed(grid.master_seed, combo.combo_id, run_index),
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build().expect("thread pool construction");
    pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                panic::catch_unwind(AssertUnwindSafe(|| run_job(grid, job, opts, out_dir))).unwrap_or_else(|payload| {
                    let message = payload
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panic".into());
                    Err(Error::RunFailed {
                        combo_id: job.combo.combo_id,
                        run_index: job.run_index,
                        seed: job.seed,
                        message,
                    })
                })
            })
            .collect()
    })
}

fn run_file(out_dir: &Path, dir: &str, job: &Job, ext: &str) -> PathBuf {
    out_dir.join(dir).join(format!("c{:03}_r{:04}.{ext}", job.combo.combo_id, job.run_index))
}

fn run_job(grid: &ExperimentGrid, job: &Job, opts: &SimulateOptions, out_dir: Option<&Path>) -> Result<RunResult> {
    let config = job.combo.run_config(&grid.base, job.seed);
    let sim = Simulation::new(config)?;
    let (mut result, agents) = match (opts.trace, out_dir) {
        (true, Some(dir)) => {
            let path = run_file(dir, "trace", job, "jsonl");
            let mut out = io::create(&path)?;
            let mut failure = None;
            let mut observer = |r: &InteractionRecord<'_>| {
                if failure.is_none() {
                    if let Err(e) = writeln!(out, "{}", trace_line(r)) {
                        failure = Some(e);
                    }
                }
            };
            let done = sim.run(&mut observer);
            if let Some(e) = failure {
                return Err(Error::Io { path, source: e });
            }
            out.flush().map_err(Error::io(&path))?;
            done
        }
        _ => sim.run(&mut ()),
    };
    result.combo_id = job.combo.combo_id;
    result.run_index = job.run_index;
    if let (true, Some(dir)) = (opts.dump_lexicons, out_dir) {
        dump_lexicons(&run_file(dir, "lexicons", job, "csv"), &agents)?;
    }
    Ok(result)
}

fn trace_line(r: &InteractionRecord<'_>) -> serde_json::Value {
    let u = r.utterance;
    let span = |s: crate::dialogue::Span| json!([s.start, s.end]);
    json!({
        "interaction": r.index,
        "epoch": r.epoch,
        "speaker": r.speaker,
        "hearer": r.hearer,
        "event": r.event.atoms().iter().map(|a| a.0).collect::<Vec<_>>(),
        "text": render_symbols(&u.text),
        "gold": u.tokens.iter().map(|t| json!({
            "span": span(t.span),
            "meaning": t.meaning.0,
            "form": render_symbols(u.token_form(t)),
            "invented": t.invented(),
        })).collect::<Vec<_>>(),
        "matches": r.decoding.matches.iter().map(|m| json!({
            "span": span(m.span),
            "meaning": m.meaning.0,
        })).collect::<Vec<_>>(),
        "guesses": r.decoding.guesses.iter().map(|g| json!({
            "span": span(g.span),
            "meaning": g.meaning.0,
        })).collect::<Vec<_>>(),
        "gaps": r.decoding.gaps.iter().map(|&s| span(s)).collect::<Vec<_>>(),
        "precision": r.outcome.precision,
        "recall": r.outcome.recall,
        "f1": r.outcome.f1,
        "meaning_recall": r.outcome.meaning_recall,
        "lex_use": r.outcome.lex_use,
        "lex_precision": r.outcome.lex_precision,
        "gated": r.outcome.gated,
        "committed": r.outcome.committed,
    })
}

fn dump_lexicons(path: &Path, agents: &[Agent]) -> Result<()> {
    let mut w = io::csv_writer(path)?;
    io::write_row(&mut w, path, ["agent_id", "meaning", "form", "count", "created_at"])?;
    for agent in agents {
        for m in agent.lexicon.mappings() {
            io::write_row(
                &mut w,
                path,
                [
                    agent.id.to_string(),
                    m.meaning.0.to_string(),
                    m.form.to_string(),
                    m.count.to_string(),
                    m.created_at.to_string(),
                ],
            )?;
        }
    }
    w.flush().map_err(Error::io(path))
}

//! Per-combo summaries, the comparison battery and the mapshare fit.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::RunResult;
use crate::population::Arrangement;
use crate::stats::{self, ComparisonResult, FitResult, SampleStats, SharePoint};

use super::io::{self, fmt_f64, fmt_opt, metric_names};

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub combo_id: usize,
    pub arrangement: Arrangement,
    pub p_sm: f64,
    pub theta: f64,
    pub metric: String,
    /// `None` when no run of the combo defines the metric.
    pub stats: Option<SampleStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRow {
    pub metric: String,
    pub scope: String,
    pub condition_a: String,
    pub condition_b: String,
    /// `None` when either side has fewer than two defined values.
    pub result: Option<ComparisonResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub scope: String,
    pub fit: Option<FitResult>,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub summary: Vec<SummaryRow>,
    pub tests: Vec<TestRow>,
    pub fits: Vec<FitRow>,
}

fn level(p_sm: f64) -> String {
    format!("p_sm={p_sm}")
}

fn sorted_levels(runs: &[RunResult]) -> Vec<f64> {
    let mut levels: Vec<f64> = runs.iter().map(|r| r.p_sm).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn values<'a>(runs: &'a [RunResult], metric: &'a str, keep: impl Fn(&RunResult) -> bool + 'a) -> Vec<f64> {
    runs.iter().filter(|r| keep(r)).filter_map(|r| r.metric(metric)).collect()
}

fn compare(a: &[f64], b: &[f64]) -> Option<ComparisonResult> {
    let a = stats::aggregate(a).ok()?;
    let b = stats::aggregate(b).ok()?;
    stats::welch_t(&a, &b).ok()
}

/// Welch tests of every metric: each `p_sm` level against `p_sm = 0` within
/// each arrangement, then community against fixed at each level and pooled
/// over all levels. Thresholds are pooled throughout.
pub fn comparison_battery(runs: &[RunResult], agents: usize) -> Vec<TestRow> {
    let levels = sorted_levels(runs);
    let mut arrangements: Vec<Arrangement> = runs.iter().map(|r| r.arrangement).collect();
    arrangements.sort();
    arrangements.dedup();
    let both = arrangements.len() == 2;
    let mut rows = Vec::new();
    for metric in metric_names(agents) {
        let m = metric.as_str();
        if levels.first() == Some(&0.0) {
            for &arr in &arrangements {
                let base = values(runs, m, |r| r.arrangement == arr && r.p_sm == 0.0);
                for &p in levels.iter().skip(1) {
                    let cur = values(runs, m, |r| r.arrangement == arr && r.p_sm == p);
                    rows.push(TestRow {
                        metric: metric.clone(),
                        scope: arr.to_string(),
                        condition_a: level(p),
                        condition_b: level(0.0),
                        result: compare(&cur, &base),
                    });
                }
            }
        }
        if both {
            let mut scopes: Vec<(String, Option<f64>)> = levels.iter().map(|&p| (level(p), Some(p))).collect();
            scopes.push(("all".into(), None));
            for (scope, p) in scopes {
                let in_scope = |r: &RunResult| p.is_none_or(|p| r.p_sm == p);
                let c = values(runs, m, |r| r.arrangement == Arrangement::Community && in_scope(r));
                let f = values(runs, m, |r| r.arrangement == Arrangement::Fixed && in_scope(r));
                rows.push(TestRow {
                    metric: metric.clone(),
                    scope,
                    condition_a: Arrangement::Community.to_string(),
                    condition_b: Arrangement::Fixed.to_string(),
                    result: compare(&c, &f),
                });
            }
        }
    }
    rows
}

/// `(p_sm, k, mean share_k)` for every combo and `k = 2..=agents`,
/// optionally restricted to one arrangement.
pub fn fit_points(runs: &[RunResult], agents: usize, arrangement: Option<Arrangement>) -> Vec<SharePoint> {
    // keyed by bit pattern; p_sm is non-negative so this orders numerically
    let mut by_level: BTreeMap<u64, (Vec<f64>, usize)> = BTreeMap::new();
    for r in runs.iter().filter(|r| arrangement.is_none_or(|a| r.arrangement == a)) {
        let e = by_level.entry(r.p_sm.to_bits()).or_insert((vec![0.0; agents], 0));
        for (acc, v) in e.0.iter_mut().zip(&r.share_exactly) {
            *acc += v;
        }
        e.1 += 1;
    }
    let mut points = Vec::new();
    for (bits, (sums, n)) in by_level {
        for k in 2..=agents {
            points.push(SharePoint { p_sm: f64::from_bits(bits), k: k as f64, ratio: sums[k - 1] / n as f64 });
        }
    }
    points
}

pub fn analyze_runs(runs: &[RunResult], agents: usize) -> Analysis {
    let mut combos: BTreeMap<usize, &RunResult> = BTreeMap::new();
    for r in runs {
        combos.entry(r.combo_id).or_insert(r);
    }
    let mut summary = Vec::new();
    for (&combo_id, first) in &combos {
        for metric in metric_names(agents) {
            let vals = values(runs, &metric, |r| r.combo_id == combo_id);
            summary.push(SummaryRow {
                combo_id,
                arrangement: first.arrangement,
                p_sm: first.p_sm,
                theta: first.theta,
                stats: stats::aggregate(&vals).ok(),
                metric,
            });
        }
    }

    let mut scopes: Vec<(String, Option<Arrangement>)> = Vec::new();
    for arr in [Arrangement::Fixed, Arrangement::Community] {
        if runs.iter().any(|r| r.arrangement == arr) {
            scopes.push((arr.to_string(), Some(arr)));
        }
    }
    scopes.push(("pooled".into(), None));
    let fits = scopes
        .into_iter()
        .map(|(scope, arr)| {
            let points = fit_points(runs, agents, arr);
            let fit = stats::fit_mapshare(&points).ok();
            let n_points = fit.map_or_else(|| points.iter().filter(|p| p.ratio > 0.0).count(), |f| f.n_points);
            FitRow { scope, fit, n_points }
        })
        .collect();

    Analysis { summary, tests: comparison_battery(runs, agents), fits }
}

/// Reads `runs.csv` from `in_dir` and writes `summary.csv`, `tests.csv`
/// and `fit.csv` into `out_dir`.
pub fn analyze(in_dir: &Path, out_dir: &Path) -> Result<Analysis> {
    let (runs, agents) = io::read_runs(&in_dir.join(io::RUNS_FILE))?;
    let analysis = analyze_runs(&runs, agents);
    std::fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;

    let path = out_dir.join(io::SUMMARY_FILE);
    let mut w = io::csv_writer(&path)?;
    io::write_row(&mut w, &path, ["combo_id", "arrangement", "p_sm", "theta", "metric", "n", "mean", "sd", "sem"])?;
    for row in &analysis.summary {
        let s = row.stats.as_ref();
        io::write_row(
            &mut w,
            &path,
            [
                row.combo_id.to_string(),
                row.arrangement.to_string(),
                fmt_f64(row.p_sm),
                fmt_f64(row.theta),
                row.metric.clone(),
                s.map_or(0, |s| s.n).to_string(),
                fmt_opt(s.map(|s| s.mean)),
                fmt_opt(s.and_then(|s| s.sd)),
                fmt_opt(s.and_then(|s| s.sem)),
            ],
        )?;
    }
    w.flush().map_err(Error::io(&path))?;

    let path = out_dir.join(io::TESTS_FILE);
    let mut w = io::csv_writer(&path)?;
    io::write_row(&mut w, &path, ["metric", "arrangement_scope", "condition_a", "condition_b", "t", "df", "p"])?;
    for row in &analysis.tests {
        let r = row.result.as_ref();
        io::write_row(
            &mut w,
            &path,
            [
                row.metric.clone(),
                row.scope.clone(),
                row.condition_a.clone(),
                row.condition_b.clone(),
                fmt_opt(r.map(|r| r.t)),
                fmt_opt(r.map(|r| r.df)),
                fmt_opt(r.map(|r| r.p)),
            ],
        )?;
    }
    w.flush().map_err(Error::io(&path))?;

    let path = out_dir.join(io::FIT_FILE);
    let mut w = io::csv_writer(&path)?;
    io::write_row(&mut w, &path, ["scope", "ln_a", "ln_b", "a", "b", "r2", "n_points"])?;
    for row in &analysis.fits {
        let f = row.fit.as_ref();
        io::write_row(
            &mut w,
            &path,
            [
                row.scope.clone(),
                fmt_opt(f.map(|f| f.ln_a)),
                fmt_opt(f.map(|f| f.ln_b)),
                fmt_opt(f.map(|f| f.a())),
                fmt_opt(f.map(|f| f.b())),
                fmt_opt(f.map(|f| f.r2)),
                row.n_points.to_string(),
            ],
        )?;
    }
    w.flush().map_err(Error::io(&path))?;
    Ok(analysis)
}

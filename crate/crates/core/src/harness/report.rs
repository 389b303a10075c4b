//! Figure-ready tables: one CSV per figure panel, x = `p_sm`, one series
//! per arrangement, thresholds pooled.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::RunResult;
use crate::population::Arrangement;
use crate::stats::{self, SampleStats};

use super::io::{self, fmt_f64, fmt_opt, lexicon_metric, share_column, LEXICON_METRICS};

/// Figure panels and the `runs.csv` metric each one plots. `fig5b` plots
/// every `share_k` for `k >= 2`.
pub const FIGURES: [(&str, &str); 10] = [
    ("fig1a", "f1"),
    ("fig1b", "lex_size"),
    ("fig2a", "lex_use"),
    ("fig2b", "lex_precision"),
    ("fig3a", "unique_meanings"),
    ("fig3b", "unique_forms"),
    ("fig4a", "synonymy"),
    ("fig4b", "homonymy"),
    ("fig5a", "mapshare_avg"),
    ("fig5b", "share_k"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub figure: &'static str,
    /// An arrangement name, or `all` when arrangements are pooled.
    pub arrangement: String,
    pub p_sm: f64,
    /// `window` (measurement-window mean), `end` (final snapshot) or
    /// `k=<n>` for the share distribution.
    pub series: String,
    pub stats: Option<SampleStats>,
}

fn levels(runs: &[RunResult]) -> Vec<f64> {
    let mut v: Vec<f64> = runs.iter().map(|r| r.p_sm).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn arrangements(runs: &[RunResult]) -> Vec<Arrangement> {
    let mut v: Vec<Arrangement> = runs.iter().map(|r| r.arrangement).collect();
    v.sort();
    v.dedup();
    v
}

pub fn figure_tables(runs: &[RunResult], agents: usize) -> Vec<(&'static str, Vec<FigureRow>)> {
    let levels = levels(runs);
    let arrangements = arrangements(runs);
    FIGURES
        .iter()
        .map(|&(figure, metric)| {
            let mut rows = Vec::new();
            let mut push = |arrangement: String, p_sm: f64, series: String, vals: Vec<f64>| {
                rows.push(FigureRow { figure, arrangement, p_sm, series, stats: stats::aggregate(&vals).ok() });
            };
            if figure == "fig5b" {
                for &p in &levels {
                    for k in 2..=agents {
                        let col = share_column(k);
                        let vals = runs.iter().filter(|r| r.p_sm == p).filter_map(|r| r.metric(&col)).collect();
                        push("all".into(), p, format!("k={k}"), vals);
                    }
                }
                return (figure, rows);
            }
            let lexical = LEXICON_METRICS.contains(&metric);
            for &arr in &arrangements {
                for &p in &levels {
                    let cell = || runs.iter().filter(move |r| r.arrangement == arr && r.p_sm == p);
                    let primary = if lexical || metric == "mapshare_avg" { "end" } else { "window" };
                    push(arr.to_string(), p, primary.into(), cell().filter_map(|r| r.metric(metric)).collect());
                    if lexical {
                        let vals = cell()
                            .filter_map(|r| r.lexicon_window.as_ref().and_then(|l| lexicon_metric(l, metric)))
                            .collect();
                        push(arr.to_string(), p, "window".into(), vals);
                    }
                }
            }
            (figure, rows)
        })
        .collect()
}

/// Reads `runs.csv` (and `lexicon_window.csv` when present) from `in_dir`
/// and writes `fig1a.csv` .. `fig5b.csv` into `out_dir`.
pub fn report(in_dir: &Path, out_dir: &Path) -> Result<Vec<(&'static str, Vec<FigureRow>)>> {
    let (mut runs, agents) = io::read_runs(&in_dir.join(io::RUNS_FILE))?;
    let window = in_dir.join(io::LEXICON_WINDOW_FILE);
    if window.exists() {
        io::read_lexicon_window(&window, &mut runs)?;
    }
    let tables = figure_tables(&runs, agents);
    std::fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    for (figure, rows) in &tables {
        let path = out_dir.join(format!("{figure}.csv"));
        let mut w = io::csv_writer(&path)?;
        io::write_row(&mut w, &path, ["figure", "arrangement", "p_sm", "series", "n", "mean", "sd", "sem"])?;
        for row in rows {
            let s = row.stats.as_ref();
            io::write_row(
                &mut w,
                &path,
                [
                    row.figure.to_string(),
                    row.arrangement.clone(),
                    fmt_f64(row.p_sm),
                    row.series.clone(),
                    s.map_or(0, |s| s.n).to_string(),
                    fmt_opt(s.map(|s| s.mean)),
                    fmt_opt(s.and_then(|s| s.sd)),
                    fmt_opt(s.and_then(|s| s.sem)),
                ],
            )?;
        }
        w.flush().map_err(Error::io(&path))?;
    }
    Ok(tables)
}

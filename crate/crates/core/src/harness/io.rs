//! CSV layouts shared by `simulate`, `analyze` and `report`.
//!
//! Floats use Rust's shortest round-trip formatting; an empty cell means
//! the value is undefined.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{LexiconMeans, RunResult, WindowMetrics};
use crate::population::Arrangement;

pub const RUNS_FILE: &str = "runs.csv";
pub const LEXICON_WINDOW_FILE: &str = "lexicon_window.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TESTS_FILE: &str = "tests.csv";
pub const FIT_FILE: &str = "fit.csv";

pub const ID_COLUMNS: [&str; 6] = ["combo_id", "arrangement", "p_sm", "theta", "run_index", "seed"];

/// Per-run metrics in `runs.csv` order, before the `share_k` columns.
pub const METRICS: [&str; 12] = [
    "committed_ratio",
    "precision",
    "recall",
    "f1",
    "lex_use",
    "lex_precision",
    "lex_size",
    "unique_meanings",
    "unique_forms",
    "synonymy",
    "homonymy",
    "mapshare_avg",
];

pub const LEXICON_METRICS: [&str; 5] = ["lex_size", "unique_meanings", "unique_forms", "synonymy", "homonymy"];

pub fn share_column(k: usize) -> String {
    format!("share_{k}")
}

pub fn runs_header(agents: usize) -> Vec<String> {
    ID_COLUMNS.iter().chain(METRICS.iter()).map(|s| s.to_string()).chain((1..=agents).map(share_column)).collect()
}

/// All metric names of a `runs.csv` with `agents` share columns.
pub fn metric_names(agents: usize) -> Vec<String> {
    METRICS.iter().map(|s| s.to_string()).chain((1..=agents).map(share_column)).collect()
}

pub fn lexicon_metric(m: &LexiconMeans, name: &str) -> Option<f64> {
    Some(match name {
        "lex_size" => m.lex_size,
        "unique_meanings" => m.unique_meanings,
        "unique_forms" => m.unique_forms,
        "synonymy" => m.synonymy,
        "homonymy" => m.homonymy,
        _ => return None,
    })
}

impl RunResult {
    /// Looks a metric up by its `runs.csv` column name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        let w = &self.window;
        match name {
            "committed_ratio" => w.committed_ratio,
            "precision" => w.precision,
            "recall" => w.recall,
            "f1" => w.f1,
            "lex_use" => w.lex_use,
            "lex_precision" => w.lex_precision,
            "mapshare_avg" => self.mapshare_avg,
            _ => match name.strip_prefix("share_") {
                Some(k) => {
                    let k: usize = k.parse().ok()?;
                    self.share_exactly.get(k.checked_sub(1)?).copied()
                }
                None => lexicon_metric(&self.lexicon, name),
            },
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v != 0.0 && v.is_finite() && !(1e-4..1e15).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(Error::io(path))
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

pub(crate) fn write_row<W: Write, I, S>(w: &mut csv::Writer<W>, path: &Path, row: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(row).map_err(Error::csv(path))
}

pub fn write_runs(path: &Path, results: &[RunResult], agents: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    write_row(&mut w, path, runs_header(agents))?;
    for r in results {
        let mut row = vec![
            r.combo_id.to_string(),
            r.arrangement.to_string(),
            fmt_f64(r.p_sm),
            fmt_f64(r.theta),
            r.run_index.to_string(),
            r.seed.to_string(),
        ];
        row.extend(metric_names(agents).iter().map(|m| fmt_opt(r.metric(m))));
        write_row(&mut w, path, row)?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn write_lexicon_window(path: &Path, results: &[RunResult]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let header = ["combo_id", "run_index"].into_iter().chain(LEXICON_METRICS);
    write_row(&mut w, path, header)?;
    for r in results {
        let mut row = vec![r.combo_id.to_string(), r.run_index.to_string()];
        row.extend(
            LEXICON_METRICS.iter().map(|m| fmt_opt(r.lexicon_window.as_ref().and_then(|l| lexicon_metric(l, m)))),
        );
        write_row(&mut w, path, row)?;
    }
    w.flush().map_err(Error::io(path))
}

struct Rows {
    path: std::path::PathBuf,
    reader: csv::Reader<File>,
    header: Vec<String>,
}

impl Rows {
    fn open(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(Error::csv(path))?;
        let header = reader.headers().map_err(Error::csv(path))?.iter().map(str::to_string).collect();
        Ok(Self { path: path.to_path_buf(), reader, header })
    }

    fn expect_prefix(&self, expected: &[&str]) -> Result<()> {
        for (i, col) in expected.iter().enumerate() {
            if self.header.get(i).map(String::as_str) != Some(*col) {
                return Err(Error::Schema { path: self.path.clone(), column: col.to_string() });
            }
        }
        Ok(())
    }
}

fn parse_cell<T: std::str::FromStr>(path: &Path, row: usize, column: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::BadValue {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        value: value.to_string(),
    })
}

fn parse_opt(path: &Path, row: usize, column: &str, value: &str) -> Result<Option<f64>> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse_cell(path, row, column, value).map(Some)
    }
}

/// Reads `runs.csv`, checking the column layout.
pub fn read_runs(path: &Path) -> Result<(Vec<RunResult>, usize)> {
    let mut rows = Rows::open(path)?;
    let fixed: Vec<&str> = ID_COLUMNS.iter().chain(METRICS.iter()).copied().collect();
    rows.expect_prefix(&fixed)?;
    let agents = rows.header.len() - fixed.len();
    if agents == 0 {
        return Err(Error::Schema { path: path.to_path_buf(), column: share_column(1) });
    }
    for k in 1..=agents {
        if rows.header[fixed.len() + k - 1] != share_column(k) {
            return Err(Error::Schema { path: path.to_path_buf(), column: share_column(k) });
        }
    }
    let header = rows.header.clone();
    let mut out = Vec::new();
    for (i, rec) in rows.reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(Error::csv(path))?;
        let cell = |c: usize| rec.get(c).unwrap_or("");
        let opt = |c: usize| parse_opt(path, row, &header[c], cell(c));
        let req = |c: usize| -> Result<f64> { parse_cell(path, row, &header[c], cell(c)) };
        let arrangement: Arrangement = cell(1).parse().map_err(|_| Error::BadValue {
            path: path.to_path_buf(),
            row,
            column: header[1].clone(),
            value: cell(1).to_string(),
        })?;
        let window = WindowMetrics {
            committed_ratio: opt(6)?,
            precision: opt(7)?,
            recall: opt(8)?,
            f1: opt(9)?,
            lex_use: opt(10)?,
            lex_precision: opt(11)?,
        };
        let lexicon = LexiconMeans {
            lex_size: req(12)?,
            unique_meanings: req(13)?,
            unique_forms: req(14)?,
            synonymy: req(15)?,
            homonymy: req(16)?,
        };
        out.push(RunResult {
            combo_id: parse_cell(path, row, &header[0], cell(0))?,
            arrangement,
            p_sm: req(2)?,
            theta: req(3)?,
            run_index: parse_cell(path, row, &header[4], cell(4))?,
            seed: parse_cell(path, row, &header[5], cell(5))?,
            window,
            lexicon,
            lexicon_window: None,
            mapshare_avg: opt(17)?,
            share_exactly: (0..agents).map(|k| req(fixed.len() + k)).collect::<Result<_>>()?,
        });
    }
    Ok((out, agents))
}

/// Attaches the window lexicon means from `lexicon_window.csv`, matched by
/// `(combo_id, run_index)`.
pub fn read_lexicon_window(path: &Path, runs: &mut [RunResult]) -> Result<()> {
    let rows = Rows::open(path)?;
    let expected: Vec<&str> = ["combo_id", "run_index"].into_iter().chain(LEXICON_METRICS).collect();
    rows.expect_prefix(&expected)?;
    let header = rows.header.clone();
    let mut reader = rows.reader;
    let index: std::collections::HashMap<(usize, usize), usize> =
        runs.iter().enumerate().map(|(i, r)| ((r.combo_id, r.run_index), i)).collect();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(Error::csv(path))?;
        let cell = |c: usize| rec.get(c).unwrap_or("");
        let combo: usize = parse_cell(path, row, &header[0], cell(0))?;
        let run: usize = parse_cell(path, row, &header[1], cell(1))?;
        let vals: Vec<Option<f64>> =
            (2..7).map(|c| parse_opt(path, row, &header[c], cell(c))).collect::<Result<_>>()?;
        let means = match vals.as_slice() {
            [Some(a), Some(b), Some(c), Some(d), Some(e)] => {
                Some(LexiconMeans { lex_size: *a, unique_meanings: *b, unique_forms: *c, synonymy: *d, homonymy: *e })
            }
            _ => None,
        };
        if let Some(&i) = index.get(&(combo, run)) {
            runs[i].lexicon_window = means;
        }
    }
    Ok(())
}

//! Per-run measures: understanding over the measurement window, lexicon
//! statistics averaged over agents, and how widely mappings are shared.

use std::collections::HashMap;

use crate::dialogue::InteractionOutcome;
use crate::lexicon::{Lexicon, LexiconStats};
use crate::population::Arrangement;

/// Running sums over the interactions of the measurement window.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WindowAccumulator {
    total: u64,
    committed: u64,
    precision: f64,
    recall: f64,
    f1: f64,
    lex_use: f64,
    lex_precision: f64,
    with_matches: u64,
}

impl WindowAccumulator {
    pub fn push(&mut self, o: &InteractionOutcome) {
        self.total += 1;
        if !o.committed {
            return;
        }
        self.committed += 1;
        self.precision += o.precision;
        self.recall += o.recall;
        self.f1 += o.f1;
        self.lex_use += o.lex_use;
        if let Some(lp) = o.lex_precision {
            self.lex_precision += lp;
            self.with_matches += 1;
        }
    }

    pub fn finish(&self) -> WindowMetrics {
        let mean = |sum: f64, n: u64| (n > 0).then(|| sum / n as f64);
        WindowMetrics {
            committed_ratio: mean(self.committed as f64, self.total),
            precision: mean(self.precision, self.committed),
            recall: mean(self.recall, self.committed),
            f1: mean(self.f1, self.committed),
            lex_use: mean(self.lex_use, self.committed),
            lex_precision: mean(self.lex_precision, self.with_matches),
        }
    }
}

/// Understanding measures averaged over committed interactions. `None`
/// marks an undefined mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindowMetrics {
    pub committed_ratio: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub lex_use: Option<f64>,
    pub lex_precision: Option<f64>,
}

pub fn window_interaction_metrics<'a>(outcomes: impl IntoIterator<Item = &'a InteractionOutcome>) -> WindowMetrics {
    let mut acc = WindowAccumulator::default();
    outcomes.into_iter().for_each(|o| acc.push(o));
    acc.finish()
}

/// Lexicon statistics averaged over agents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LexiconMeans {
    pub lex_size: f64,
    pub unique_meanings: f64,
    pub unique_forms: f64,
    pub synonymy: f64,
    pub homonymy: f64,
}

impl LexiconMeans {
    fn add(&mut self, s: &LexiconStats) {
        self.lex_size += s.size as f64;
        self.unique_meanings += s.unique_meanings as f64;
        self.unique_forms += s.unique_forms as f64;
        self.synonymy += s.synonymy;
        self.homonymy += s.homonymy;
    }

    fn scale(&mut self, by: f64) {
        self.lex_size *= by;
        self.unique_meanings *= by;
        self.unique_forms *= by;
        self.synonymy *= by;
        self.homonymy *= by;
    }
}

pub fn population_lexicon_metrics<'a>(lexicons: impl IntoIterator<Item = &'a Lexicon>) -> LexiconMeans {
    let mut means = LexiconMeans::default();
    let mut n = 0usize;
    for lex in lexicons {
        means.add(&lex.stats());
        n += 1;
    }
    if n > 0 {
        means.scale(1.0 / n as f64);
    }
    means
}

/// Running mean of [`LexiconMeans`] snapshots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SnapshotAccumulator {
    sum: LexiconMeans,
    n: usize,
}

impl SnapshotAccumulator {
    pub fn push(&mut self, m: &LexiconMeans) {
        self.sum.lex_size += m.lex_size;
        self.sum.unique_meanings += m.unique_meanings;
        self.sum.unique_forms += m.unique_forms;
        self.sum.synonymy += m.synonymy;
        self.sum.homonymy += m.homonymy;
        self.n += 1;
    }

    pub fn finish(&self) -> Option<LexiconMeans> {
        (self.n > 0).then(|| {
            let mut m = self.sum;
            m.scale(1.0 / self.n as f64);
            m
        })
    }
}

/// How many agents know each distinct mapping of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingShare {
    /// Number of distinct `(meaning, form)` pairs across all lexicons.
    pub pool: usize,
    /// `histogram[k - 1]` = pool entries known by exactly `k` agents.
    pub histogram: Vec<usize>,
    /// Mean number of agents per pool entry; `None` for an empty pool.
    pub average: Option<f64>,
    /// `exactly[k - 1]` = share of the pool known by exactly `k` agents.
    pub exactly: Vec<f64>,
}

pub fn mapping_share(lexicons: &[Lexicon]) -> MappingShare {
    let mut holders: HashMap<(crate::world::Atom, &[u8]), usize> = HashMap::new();
    for lex in lexicons {
        for m in lex.mappings() {
            *holders.entry((m.meaning, m.form.symbols())).or_default() += 1;
        }
    }
    let n = lexicons.len();
    let mut histogram = vec![0usize; n];
    for &k in holders.values() {
        histogram[k - 1] += 1;
    }
    let pool = holders.len();
    if pool == 0 {
        return MappingShare { pool, histogram, average: None, exactly: vec![0.0; n] };
    }
    let weighted: usize = histogram.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
    MappingShare {
        pool,
        average: Some(weighted as f64 / pool as f64),
        exactly: histogram.iter().map(|&c| c as f64 / pool as f64).collect(),
        histogram,
    }
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub combo_id: usize,
    pub arrangement: Arrangement,
    pub p_sm: f64,
    pub theta: f64,
    pub run_index: usize,
    pub seed: u64,
    pub window: WindowMetrics,
    /// End-of-run lexicon means over agents.
    pub lexicon: LexiconMeans,
    /// Lexicon means averaged over the end of every window epoch.
    pub lexicon_window: Option<LexiconMeans>,
    pub mapshare_avg: Option<f64>,
    pub share_exactly: Vec<f64>,
}

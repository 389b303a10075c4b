//! Agents, pairing schedules and the epoch loop of one simulation run.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dialogue::{self, Decoding, Gate, InteractionOutcome, Utterance};
use crate::error::ConfigError;
use crate::lexicon::{FormParams, Lexicon};
use crate::metrics::{self, RunResult, SnapshotAccumulator, WindowAccumulator};
use crate::world::{ConceptInventory, Event};

/// Random number generator behind every run. ChaCha8 seeded through
/// `seed_from_u64`, so a run is reproducible from its 64-bit seed.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arrangement {
    /// Partners never change.
    Fixed,
    /// Partners rotate every `round_length` epochs.
    Community,
}

impl Arrangement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Arrangement::Fixed => "fixed",
            Arrangement::Community => "community",
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arrangement {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "fixed" => Ok(Arrangement::Fixed),
            "community" => Ok(Arrangement::Community),
            other => Err(ConfigError::invalid(
                "arrangements",
                format!("unknown arrangement `{other}` (expected fixed or community)"),
            )),
        }
    }
}

pub type Pair = (usize, usize);

/// Perfect matchings of the population, one per pairing round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingSchedule {
    arrangement: Arrangement,
    round_length: u32,
    rounds: Vec<Vec<Pair>>,
}

impl PairingSchedule {
    pub fn new(arrangement: Arrangement, agents: usize, round_length: u32) -> Result<Self, ConfigError> {
        if agents < 2 || !agents.is_multiple_of(2) {
            return Err(ConfigError::invalid("agents", format!("need an even count >= 2, got {agents}")));
        }
        if round_length == 0 {
            return Err(ConfigError::invalid("round_length", "must be at least 1"));
        }
        let rounds = match arrangement {
            Arrangement::Fixed => vec![(0..agents).step_by(2).map(|a| (a, a + 1)).collect()],
            Arrangement::Community => circle_method(agents),
        };
        Ok(Self { arrangement, round_length, rounds })
    }

    pub fn arrangement(&self) -> Arrangement {
        self.arrangement
    }

    pub fn rounds(&self) -> &[Vec<Pair>] {
        &self.rounds
    }

    pub fn pairs_for_epoch(&self, epoch: u32) -> &[Pair] {
        let round = (epoch / self.round_length) as usize % self.rounds.len();
        &self.rounds[round]
    }
}

/// Round-robin tournament rounds: agent `n - 1` stays put while the others
/// rotate, giving `n - 1` matchings that together cover every pair once.
fn circle_method(n: usize) -> Vec<Vec<Pair>> {
    let m = n - 1;
    (0..m)
        .map(|r| {
            let mut pairs = vec![(r, m)];
            for i in 1..n / 2 {
                let a = (r + i) % m;
                let b = (r + m - i) % m;
                pairs.push((a.min(b), a.max(b)));
            }
            pairs.sort_unstable();
            pairs
        })
        .collect()
}

/// Parameters of a single simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p_sm: f64,
    pub theta: f64,
    pub arrangement: Arrangement,
    pub agents: usize,
    pub epochs: u32,
    pub interactions_per_epoch: usize,
    pub inventory: ConceptInventory,
    pub forms: FormParams,
    /// Trailing epochs over which interaction metrics are averaged.
    pub window: u32,
    pub round_length: u32,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p_sm: 0.0,
            theta: 0.0,
            arrangement: Arrangement::Fixed,
            agents: 10,
            epochs: 1000,
            interactions_per_epoch: 10,
            inventory: ConceptInventory::default(),
            forms: FormParams::default(),
            window: 100,
            round_length: 100,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.p_sm) {
            return Err(ConfigError::invalid("p_sm_levels", format!("{} not in [0, 1]", self.p_sm)));
        }
        let theta_ok =
            if self.p_sm > 0.0 { self.theta > 0.0 && self.theta <= 1.0 } else { (0.0..=1.0).contains(&self.theta) };
        if !theta_ok {
            return Err(ConfigError::invalid("theta_levels", format!("{} not in (0, 1]", self.theta)));
        }
        if self.agents < 2 || !self.agents.is_multiple_of(2) {
            return Err(ConfigError::invalid("agents", format!("need an even count >= 2, got {}", self.agents)));
        }
        if self.interactions_per_epoch != self.agents {
            return Err(ConfigError::invalid(
                "interactions_per_epoch",
                format!("must equal the number of agents ({})", self.agents),
            ));
        }
        if self.round_length == 0 {
            return Err(ConfigError::invalid("round_length", "must be at least 1"));
        }
        Ok(())
    }

    pub fn gate(&self) -> Gate {
        Gate { p_sm: self.p_sm, theta: self.theta }
    }

    fn window_start(&self) -> u32 {
        self.epochs.saturating_sub(self.window)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: usize,
    pub lexicon: Lexicon,
}

/// Everything that happened in one interaction, for tracing.
#[derive(Debug)]
pub struct InteractionRecord<'a> {
    pub index: u64,
    pub epoch: u32,
    pub speaker: usize,
    pub hearer: usize,
    pub event: &'a Event,
    pub utterance: &'a Utterance,
    pub decoding: &'a Decoding,
    pub outcome: &'a InteractionOutcome,
}

/// Receives every interaction of a run as it happens.
pub trait Observer {
    fn interaction(&mut self, record: &InteractionRecord<'_>);
}

impl Observer for () {
    fn interaction(&mut self, _: &InteractionRecord<'_>) {}
}

impl<F: FnMut(&InteractionRecord<'_>)> Observer for F {
    fn interaction(&mut self, record: &InteractionRecord<'_>) {
        self(record)
    }
}

/// One simulation run in progress. Advances epoch by epoch so callers can
/// inspect agents between epochs.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: RunConfig,
    schedule: PairingSchedule,
    agents: Vec<Agent>,
    rng: SimRng,
    epoch: u32,
    interactions: u64,
    window: WindowAccumulator,
    snapshots: SnapshotAccumulator,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let schedule = PairingSchedule::new(config.arrangement, config.agents, config.round_length)?;
        let agents = (0..config.agents).map(|id| Agent { id, lexicon: Lexicon::new() }).collect();
        let rng = SimRng::seed_from_u64(config.seed);
        Ok(Self {
            config,
            schedule,
            agents,
            rng,
            epoch: 0,
            interactions: 0,
            window: WindowAccumulator::default(),
            snapshots: SnapshotAccumulator::default(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn interactions(&self) -> u64 {
        self.interactions
    }

    pub fn is_finished(&self) -> bool {
        self.epoch >= self.config.epochs
    }

    /// Runs one epoch. Returns `false` once all epochs are done.
    pub fn step_epoch(&mut self, observer: &mut impl Observer) -> bool {
        if self.is_finished() {
            return false;
        }
        let epoch = self.epoch;
        let in_window = epoch >= self.config.window_start();
        for _ in 0..self.config.interactions_per_epoch {
            let pairs = self.schedule.pairs_for_epoch(epoch);
            let (a, b) = pairs[self.rng.random_range(0..pairs.len())];
            let (speaker, hearer) = if self.rng.random::<bool>() { (a, b) } else { (b, a) };
            let outcome = self.interact(speaker, hearer, observer);
            if in_window {
                self.window.push(&outcome);
            }
        }
        if in_window {
            self.snapshots.push(&metrics::population_lexicon_metrics(self.lexicons()));
        }
        self.epoch += 1;
        true
    }

    fn interact(&mut self, speaker: usize, hearer: usize, observer: &mut impl Observer) -> InteractionOutcome {
        debug_assert_ne!(speaker, hearer);
        let cfg = &self.config;
        let event = cfg.inventory.sample_event(&mut self.rng);
        let speaker_view = event.individuate(&mut self.rng);
        let hearer_view = event.individuate(&mut self.rng);
        let utterance = dialogue::encode(&self.agents[speaker].lexicon, &speaker_view, &cfg.forms, &mut self.rng);
        let decoding = dialogue::decode(&self.agents[hearer].lexicon, &utterance.text, &hearer_view, &mut self.rng);
        let mut outcome = dialogue::score(&utterance, &decoding);
        let (s, h) = pair_mut(&mut self.agents, speaker, hearer);
        dialogue::gate_and_commit(
            &mut outcome,
            cfg.gate(),
            &mut s.lexicon,
            &mut h.lexicon,
            &utterance,
            &decoding,
            self.epoch,
            &mut self.rng,
        );
        observer.interaction(&InteractionRecord {
            index: self.interactions,
            epoch: self.epoch,
            speaker,
            hearer,
            event: &event,
            utterance: &utterance,
            decoding: &decoding,
            outcome: &outcome,
        });
        self.interactions += 1;
        outcome
    }

    pub fn lexicons(&self) -> impl Iterator<Item = &Lexicon> + '_ {
        self.agents.iter().map(|a| &a.lexicon)
    }

    pub fn run(mut self, observer: &mut impl Observer) -> (RunResult, Vec<Agent>) {
        while self.step_epoch(observer) {}
        let result = self.result();
        (result, self.agents)
    }

    /// Metrics for the current state, with run identity fields left zero.
    pub fn result(&self) -> RunResult {
        let lexicons: Vec<Lexicon> = self.agents.iter().map(|a| a.lexicon.clone()).collect();
        let share = metrics::mapping_share(&lexicons);
        RunResult {
            combo_id: 0,
            arrangement: self.config.arrangement,
            p_sm: self.config.p_sm,
            theta: self.config.theta,
            run_index: 0,
            seed: self.config.seed,
            window: self.window.finish(),
            lexicon: metrics::population_lexicon_metrics(&lexicons),
            lexicon_window: self.snapshots.finish(),
            mapshare_avg: share.average,
            share_exactly: share.exactly,
        }
    }
}

fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Runs a full simulation and returns its metrics.
pub fn run_simulation(config: RunConfig) -> Result<RunResult, ConfigError> {
    Ok(Simulation::new(config)?.run(&mut ()).0)
}

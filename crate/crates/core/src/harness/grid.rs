//! Grid expansion and per-run seed derivation.

use crate::population::{Arrangement, RunConfig};

use super::config::ExperimentGrid;

/// One parameter combination of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combo {
    pub combo_id: usize,
    pub arrangement: Arrangement,
    pub p_sm: f64,
    /// `0.0` when `p_sm == 0`: the threshold is never consulted.
    pub theta: f64,
}

impl Combo {
    pub fn run_config(&self, base: &RunConfig, seed: u64) -> RunConfig {
        RunConfig { p_sm: self.p_sm, theta: self.theta, arrangement: self.arrangement, seed, ..base.clone() }
    }
}

/// Combos in canonical order: arrangement-major, then `p_sm`, then
/// `theta`. A `p_sm` of zero collapses all thresholds into one combo.
pub fn expand_grid(grid: &ExperimentGrid) -> Vec<Combo> {
    let mut arrangements = grid.arrangements.clone();
    arrangements.sort();
    let mut combos = Vec::new();
    for &arrangement in &arrangements {
        for &p_sm in &grid.p_sm_levels {
            let thetas: &[f64] = if p_sm == 0.0 { &[0.0] } else { &grid.theta_levels };
            for &theta in thetas {
                combos.push(Combo { combo_id: combos.len(), arrangement, p_sm, theta });
            }
        }
    }
    combos
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output finalizer; a bijection on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run_index` in combo `combo_id`:
/// `splitmix64((master ^ (combo_id << 32) ^ run_index) + GOLDEN_GAMMA)`.
///
/// For combo and run indices below 2^32 every step is a bijection, so
/// distinct runs of one experiment never share a seed.
pub fn derive_seed(master_seed: u64, combo_id: usize, run_index: usize) -> u64 {
    let x = master_seed ^ ((combo_id as u64) << 32) ^ run_index as u64;
    splitmix64(x.wrapping_add(GOLDEN_GAMMA))
}

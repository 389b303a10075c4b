//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;

use crate::error::ConfigError;
use crate::lexicon::FormParams;
use crate::population::{Arrangement, RunConfig};
use crate::world::ConceptInventory;

/// A full parameter sweep: the cartesian product of the level lists, each
/// cell run `runs` times.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub p_sm_levels: Vec<f64>,
    pub theta_levels: Vec<f64>,
    pub arrangements: Vec<Arrangement>,
    pub runs: usize,
    pub master_seed: u64,
    /// Template for every run; its `p_sm`, `theta`, `arrangement` and
    /// `seed` are overwritten per run.
    pub base: RunConfig,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            p_sm_levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            theta_levels: vec![0.25, 0.5, 0.75, 1.0],
            arrangements: vec![Arrangement::Fixed, Arrangement::Community],
            runs: 600,
            master_seed: 0,
            base: RunConfig::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "actions",
    "entities",
    "event_arity",
    "alphabet",
    "form_len_min",
    "form_len_max",
    "agents",
    "epochs",
    "interactions_per_epoch",
    "window",
    "round_length",
    "p_sm_levels",
    "theta_levels",
    "arrangements",
    "runs",
    "master_seed",
];

fn number<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::invalid(key, format!("cannot parse `{value}`")))
}

fn list<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<Vec<T>, ConfigError> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| number(key, s)).collect()
}

impl ExperimentGrid {
    /// Parses a config file on top of the defaults. Blank lines and `#`
    /// comments are ignored; list values are comma separated.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut grid = Self::default();
        let mut inventory = (10u32, 20u32, 3usize);
        let mut forms = (2usize, 5usize, 20u16);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
            };
            let key = key.trim();
            let key: &'static str =
                KEYS.iter().find(|k| **k == key).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
            match key {
                "actions" => inventory.0 = number(key, value)?,
                "entities" => inventory.1 = number(key, value)?,
                "event_arity" => inventory.2 = number(key, value)?,
                "alphabet" => forms.2 = number(key, value)?,
                "form_len_min" => forms.0 = number(key, value)?,
                "form_len_max" => forms.1 = number(key, value)?,
                "agents" => grid.base.agents = number(key, value)?,
                "epochs" => grid.base.epochs = number(key, value)?,
                "interactions_per_epoch" => grid.base.interactions_per_epoch = number(key, value)?,
                "window" => grid.base.window = number(key, value)?,
                "round_length" => grid.base.round_length = number(key, value)?,
                "p_sm_levels" => grid.p_sm_levels = list(key, value)?,
                "theta_levels" => grid.theta_levels = list(key, value)?,
                "arrangements" => {
                    grid.arrangements = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_, _>>()?
                }
                "runs" => grid.runs = number(key, value)?,
                "master_seed" => grid.master_seed = number(key, value)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        grid.base.inventory = ConceptInventory::new(inventory.0, inventory.1, inventory.2)?;
        grid.base.forms = FormParams::new(forms.0, forms.1, forms.2)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_levels("p_sm_levels", &self.p_sm_levels, |v| (0.0..=1.0).contains(&v), "[0, 1]")?;
        if self.p_sm_levels.iter().any(|&p| p > 0.0) {
            check_levels("theta_levels", &self.theta_levels, |v| v > 0.0 && v <= 1.0, "(0, 1]")?;
        }
        if self.arrangements.is_empty() {
            return Err(ConfigError::invalid("arrangements", "list is empty"));
        }
        for (i, a) in self.arrangements.iter().enumerate() {
            if self.arrangements[..i].contains(a) {
                return Err(ConfigError::DuplicateLevel { key: "arrangements", value: a.to_string() });
            }
        }
        let mut base = self.base.clone();
        base.p_sm = 0.0;
        base.theta = 0.0;
        base.validate()
    }

    /// Renders the effective configuration in the file format.
    pub fn to_config_text(&self) -> String {
        let b = &self.base;
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let entities = b.inventory.entities().count();
        let actions = b.inventory.actions().count();
        let _ = writeln!(s, "actions = {actions}");
        let _ = writeln!(s, "entities = {entities}");
        let _ = writeln!(s, "event_arity = {}", b.inventory.arity());
        let _ = writeln!(s, "alphabet = {}", b.forms.alphabet());
        let _ = writeln!(s, "form_len_min = {}", b.forms.min_len());
        let _ = writeln!(s, "form_len_max = {}", b.forms.max_len());
        let _ = writeln!(s, "agents = {}", b.agents);
        let _ = writeln!(s, "epochs = {}", b.epochs);
        let _ = writeln!(s, "interactions_per_epoch = {}", b.interactions_per_epoch);
        let _ = writeln!(s, "window = {}", b.window);
        let _ = writeln!(s, "round_length = {}", b.round_length);
        let _ = writeln!(s, "p_sm_levels = {}", join(&self.p_sm_levels));
        let _ = writeln!(s, "theta_levels = {}", join(&self.theta_levels));
        let arr: Vec<&str> = self.arrangements.iter().map(Arrangement::as_str).collect();
        let _ = writeln!(s, "arrangements = {}", arr.join(", "));
        let _ = writeln!(s, "runs = {}", self.runs);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        s
    }
}

fn check_levels(
    key: &'static str,
    levels: &[f64],
    in_range: impl Fn(f64) -> bool,
    range: &str,
) -> Result<(), ConfigError> {
    if levels.is_empty() {
        return Err(ConfigError::invalid(key, "list is empty"));
    }
    for (i, &v) in levels.iter().enumerate() {
        if !in_range(v) {
            return Err(ConfigError::invalid(key, format!("{v} not in {range}")));
        }
        if levels[..i].contains(&v) {
            return Err(ConfigError::DuplicateLevel { key, value: v.to_string() });
        }
        if i > 0 && levels[i - 1] > v {
            return Err(ConfigError::invalid(key, "levels must be sorted ascending"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentGrid::parse("").unwrap(), ExperimentGrid::default());
    }

    #[test]
    fn parses_all_keys() {
        let text = "\
# a comment
actions = 4
entities = 6
event_arity = 2
alphabet = 8
form_len_min = 1
form_len_max = 3
agents = 4
epochs = 50
interactions_per_epoch = 4
window = 10
round_length = 5
p_sm_levels = 0, 1
theta_levels = 0.5
arrangements = community
runs = 3
master_seed = 99   # trailing comment
";
        let g = ExperimentGrid::parse(text).unwrap();
        assert_eq!(g.p_sm_levels, vec![0.0, 1.0]);
        assert_eq!(g.theta_levels, vec![0.5]);
        assert_eq!(g.arrangements, vec![Arrangement::Community]);
        assert_eq!((g.runs, g.master_seed), (3, 99));
        assert_eq!(g.base.inventory, ConceptInventory::new(4, 6, 2).unwrap());
        assert_eq!(g.base.forms, FormParams::new(1, 3, 8).unwrap());
        assert_eq!((g.base.agents, g.base.epochs, g.base.window, g.base.round_length), (4, 50, 10, 5));
        assert_eq!(ExperimentGrid::parse(&g.to_config_text()).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentGrid::parse("bogus = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ExperimentGrid::parse("runs 4"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(ExperimentGrid::parse("p_sm_levels = 0, 0.5, 0.5"), Err(ConfigError::DuplicateLevel { .. })));
        assert!(ExperimentGrid::parse("p_sm_levels = 1, 0.5").is_err());
        assert!(ExperimentGrid::parse("theta_levels = 0, 1").is_err());
        assert!(ExperimentGrid::parse("agents = 7\ninteractions_per_epoch = 7").is_err());
        assert!(ExperimentGrid::parse("arrangements = fixed, fixed").is_err());
        assert!(ExperimentGrid::parse("arrangements = ring").is_err());
        assert!(ExperimentGrid::parse("epochs = many").is_err());
    }
}

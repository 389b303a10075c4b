//! Meaning-form conventions held by a single agent.

use std::borrow::Borrow;
use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use crate::error::ConfigError;
use crate::world::Atom;

/// A word: a non-empty string of abstract symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form(Box<[u8]>);

impl Form {
    pub fn new(symbols: impl Into<Box<[u8]>>) -> Self {
        Form(symbols.into())
    }

    /// Parses the letter rendering used in dumps and traces (`"ab"` is
    /// symbols `[0, 1]`).
    pub fn from_letters(s: &str) -> Option<Self> {
        s.bytes()
            .map(|b| b.is_ascii_lowercase().then(|| b - b'a'))
            .collect::<Option<Vec<u8>>>()
            .filter(|v| !v.is_empty())
            .map(Form::new)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Borrow<[u8]> for Form {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.0)
    }
}

/// Renders symbols as letters when they fit in `a..z`, otherwise as
/// dot-separated integers.
pub(crate) fn write_symbols(f: &mut impl fmt::Write, symbols: &[u8]) -> fmt::Result {
    if symbols.iter().all(|&s| s < 26) {
        for &s in symbols {
            f.write_char((b'a' + s) as char)?;
        }
        Ok(())
    } else {
        for (i, s) in symbols.iter().enumerate() {
            if i > 0 {
                f.write_char('.')?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

pub(crate) fn render_symbols(symbols: &[u8]) -> String {
    let mut s = String::with_capacity(symbols.len());
    write_symbols(&mut s, symbols).expect("writing to a String cannot fail");
    s
}

/// Word-invention parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormParams {
    min_len: usize,
    max_len: usize,
    alphabet: u16,
}

impl FormParams {
    pub fn new(min_len: usize, max_len: usize, alphabet: u16) -> Result<Self, ConfigError> {
        if min_len == 0 {
            return Err(ConfigError::invalid("form_len_min", "must be at least 1"));
        }
        if max_len < min_len {
            return Err(ConfigError::invalid("form_len_max", "must be >= form_len_min"));
        }
        if alphabet == 0 || alphabet > 256 {
            return Err(ConfigError::invalid("alphabet", "must be in 1..=256"));
        }
        Ok(Self { min_len, max_len, alphabet })
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn alphabet(&self) -> u16 {
        self.alphabet
    }

    /// A fresh form: uniform length, i.i.d. uniform symbols. Collisions with
    /// existing forms are allowed.
    pub fn invent<R: Rng + ?Sized>(&self, rng: &mut R) -> Form {
        let len = rng.random_range(self.min_len..=self.max_len);
        let symbols: Vec<u8> = (0..len).map(|_| rng.random_range(0..self.alphabet) as u8).collect();
        Form::new(symbols)
    }
}

impl Default for FormParams {
    fn default() -> Self {
        Self { min_len: 2, max_len: 5, alphabet: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub meaning: Atom,
    pub form: Form,
    pub count: u32,
    pub created_at: u32,
}

/// Handle to a mapping inside one lexicon. Stable for the lexicon's
/// lifetime since nothing is ever removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MappingId(usize);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LexiconStats {
    pub size: usize,
    pub unique_meanings: usize,
    pub unique_forms: usize,
    pub synonymy: f64,
    pub homonymy: f64,
}

/// An agent's set of meaning-form mappings with use counts.
///
/// Mappings are only ever added or reinforced. `(meaning, form)` is the
/// identity key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    mappings: Vec<Mapping>,
    by_meaning: HashMap<Atom, Vec<usize>>,
    meanings_per_form: HashMap<Form, u32>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }

    /// All mappings in insertion order.
    pub fn mappings(&self) -> &[Mapping] {
        &self.mappings
    }

    pub fn get(&self, id: MappingId) -> &Mapping {
        &self.mappings[id.0]
    }

    /// Mappings whose meaning is `meaning`, in insertion order.
    pub fn for_meaning(&self, meaning: Atom) -> impl Iterator<Item = (MappingId, &Mapping)> + '_ {
        self.by_meaning.get(&meaning).into_iter().flatten().map(move |&i| (MappingId(i), &self.mappings[i]))
    }

    pub fn find(&self, meaning: Atom, form: &[u8]) -> Option<MappingId> {
        self.for_meaning(meaning).find(|(_, m)| m.form.symbols() == form).map(|(id, _)| id)
    }

    /// The speaker's preferred mapping for `meaning`: highest count, then
    /// most recently created, then lexicographically smallest form.
    pub fn best_form(&self, meaning: Atom) -> Option<MappingId> {
        self.for_meaning(meaning).max_by_key(|(_, m)| (m.count, m.created_at, Reverse(&m.form))).map(|(id, _)| id)
    }

    /// Inserts `(meaning, form)` with count 1, or increments its count if
    /// already known.
    pub fn commit(&mut self, meaning: Atom, form: &[u8], epoch: u32) -> MappingId {
        if let Some(id) = self.find(meaning, form) {
            self.reinforce(id);
            return id;
        }
        let idx = self.mappings.len();
        self.mappings.push(Mapping { meaning, form: Form::new(form), count: 1, created_at: epoch });
        self.by_meaning.entry(meaning).or_default().push(idx);
        match self.meanings_per_form.get_mut(form) {
            Some(n) => *n += 1,
            None => {
                self.meanings_per_form.insert(Form::new(form), 1);
            }
        }
        MappingId(idx)
    }

    pub fn reinforce(&mut self, id: MappingId) {
        let m = &mut self.mappings[id.0];
        m.count = m.count.saturating_add(1);
    }

    pub fn stats(&self) -> LexiconStats {
        let size = self.mappings.len();
        let unique_meanings = self.by_meaning.len();
        let unique_forms = self.meanings_per_form.len();
        let ratio = |d: usize| if d == 0 { 0.0 } else { size as f64 / d as f64 };
        LexiconStats {
            size,
            unique_meanings,
            unique_forms,
            synonymy: ratio(unique_meanings),
            homonymy: ratio(unique_forms),
        }
    }
}

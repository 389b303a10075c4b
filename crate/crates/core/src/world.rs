//! Concept inventory, event sampling and per-agent individuation.
//!
//! Events are flat tuples of distinct atoms: one action plus `arity - 1`
//! distinct entities. Each interlocutor sees the same event but orders its
//! atoms independently, which is the only source of initial misalignment.

use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::ConfigError;

/// An opaque meaning atom. Actions occupy `0..actions`, entities follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Action,
    Entity,
}

/// Largest supported event arity. The hearer decoder tracks used meanings
/// in a bitmask indexed by event position.
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptInventory {
    actions: u32,
    entities: u32,
    arity: usize,
}

impl ConceptInventory {
    pub fn new(actions: u32, entities: u32, arity: usize) -> Result<Self, ConfigError> {
        if actions == 0 {
            return Err(ConfigError::invalid("actions", "need at least one action"));
        }
        if entities == 0 {
            return Err(ConfigError::invalid("entities", "need at least one entity"));
        }
        if arity == 0 || arity > MAX_ARITY {
            return Err(ConfigError::invalid("event_arity", format!("must be in 1..={MAX_ARITY}, got {arity}")));
        }
        if (entities as usize) < arity - 1 {
            return Err(ConfigError::invalid(
                "entities",
                format!("{entities} entities cannot fill events of arity {arity}"),
            ));
        }
        Ok(Self { actions, entities, arity })
    }

    pub fn actions(&self) -> impl Iterator<Item = Atom> {
        (0..self.actions).map(Atom)
    }

    pub fn entities(&self) -> impl Iterator<Item = Atom> {
        (self.actions..self.actions + self.entities).map(Atom)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self, atom: Atom) -> Option<AtomKind> {
        if atom.0 < self.actions {
            Some(AtomKind::Action)
        } else if atom.0 < self.actions + self.entities {
            Some(AtomKind::Entity)
        } else {
            None
        }
    }

    /// Draws one action and `arity - 1` distinct entities, uniformly over
    /// all such compositions.
    pub fn sample_event<R: Rng + ?Sized>(&self, rng: &mut R) -> Event {
        let mut atoms = Vec::with_capacity(self.arity);
        atoms.push(Atom(rng.random_range(0..self.actions)));
        let picks = index::sample(rng, self.entities as usize, self.arity - 1);
        atoms.extend(picks.iter().map(|i| Atom(self.actions + i as u32)));
        Event { atoms }
    }
}

impl Default for ConceptInventory {
    fn default() -> Self {
        Self { actions: 10, entities: 20, arity: 3 }
    }
}

/// A jointly attended occurrence: pairwise distinct atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    atoms: Vec<Atom>,
}

impl Event {
    /// Builds an event from explicit atoms. Returns `None` on duplicates
    /// or when the arity is out of range.
    pub fn from_atoms(atoms: Vec<Atom>) -> Option<Self> {
        if atoms.is_empty() || atoms.len() > MAX_ARITY {
            return None;
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return None;
            }
        }
        Some(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.atoms.contains(&atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// One agent's private view of this event.
    pub fn individuate<R: Rng + ?Sized>(&self, rng: &mut R) -> Individuation<'_> {
        let mut order = self.atoms.clone();
        order.shuffle(rng);
        Individuation { event: self, order }
    }
}

/// An agent's ordering of the atoms of an event it attends to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individuation<'e> {
    event: &'e Event,
    order: Vec<Atom>,
}

impl<'e> Individuation<'e> {
    /// A fixed ordering, mainly for tests. `order` must be a permutation of
    /// the event's atoms.
    pub fn with_order(event: &'e Event, order: Vec<Atom>) -> Option<Self> {
        let mut a = order.clone();
        let mut b = event.atoms.clone();
        a.sort_unstable();
        b.sort_unstable();
        (a == b).then_some(Self { event, order })
    }

    pub fn event(&self) -> &'e Event {
        self.event
    }

    pub fn order(&self) -> &[Atom] {
        &self.order
    }
}

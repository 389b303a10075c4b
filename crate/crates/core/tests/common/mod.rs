#![allow(dead_code)]

use lexsim::dialogue::{Decoding, Span};
use lexsim::lexicon::Lexicon;
use lexsim::world::{Atom, Event};
use rand::seq::SliceRandom;
use rand::Rng;

/// A small decoder input: a lexicon, a text and the attended event with the
/// hearer's private order of it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub lexicon: Lexicon,
    pub text: Vec<u8>,
    pub event: Event,
    pub order: Vec<Atom>,
}

/// Random instance with text length <= `max_text`, alphabet <= 4 and at most
/// 8 lexicon entries. Half the texts are stitched from lexicon forms so that
/// matches are common.
pub fn random_instance<R: Rng>(rng: &mut R, max_text: usize) -> Instance {
    let alphabet = rng.random_range(1..=4u8);
    let mut atoms: Vec<Atom> = (0..6).map(Atom).collect();
    atoms.shuffle(rng);
    let arity = rng.random_range(1..=4);
    let event = Event::from_atoms(atoms[..arity].to_vec()).unwrap();
    let mut order = event.atoms().to_vec();
    order.shuffle(rng);

    let mut lexicon = Lexicon::new();
    let mut forms = Vec::new();
    for _ in 0..rng.random_range(0..=8) {
        let len = rng.random_range(1..=3);
        let form: Vec<u8> = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
        // meanings 0..6, some outside the event
        lexicon.commit(Atom(rng.random_range(0..6)), &form, 0);
        forms.push(form);
    }

    let target = rng.random_range(1..=max_text);
    let mut text = Vec::new();
    if rng.random::<bool>() && !forms.is_empty() {
        while text.len() < target {
            if rng.random_range(0..4) == 0 {
                text.push(rng.random_range(0..alphabet));
            } else {
                text.extend_from_slice(&forms[rng.random_range(0..forms.len())]);
            }
        }
        text.truncate(target);
    } else {
        text = (0..target).map(|_| rng.random_range(0..alphabet)).collect();
    }
    Instance { lexicon, text, event, order }
}

/// Structural invariants of a decoding; returns the first violation.
pub fn check_decoding(inst: &Instance, d: &Decoding) -> Result<(), String> {
    let n = inst.text.len();
    let mut pos = 0;
    for m in &d.matches {
        if m.span.start < pos || m.span.end > n || m.span.is_empty() {
            return Err(format!("match {:?} out of order or bounds", m.span));
        }
        let mapping = inst.lexicon.get(m.mapping);
        if mapping.meaning != m.meaning || mapping.form.symbols() != &inst.text[m.span.start..m.span.end] {
            return Err(format!("match {:?} disagrees with its mapping", m.span));
        }
        if !inst.event.contains(m.meaning) {
            return Err(format!("match meaning {} outside the event", m.meaning));
        }
        pos = m.span.end;
    }

    let mut gaps = Vec::new();
    let mut pos = 0;
    for m in &d.matches {
        if m.span.start > pos {
            gaps.push(Span::new(pos, m.span.start));
        }
        pos = m.span.end;
    }
    if pos < n {
        gaps.push(Span::new(pos, n));
    }
    if gaps != d.gaps {
        return Err(format!("gaps {:?} are not the maximal unmatched stretches {:?}", d.gaps, gaps));
    }

    let meanings: Vec<Atom> = d.meanings().collect();
    let mut uniq = meanings.clone();
    uniq.sort();
    uniq.dedup();
    if uniq.len() != meanings.len() || meanings.iter().any(|a| !inst.event.contains(*a)) {
        return Err("meanings repeat or leave the event".into());
    }

    let unheard: Vec<Atom> =
        inst.order.iter().copied().filter(|a| !d.matches.iter().any(|m| m.meaning == *a)).collect();
    let gap_symbols: usize = gaps.iter().map(|g| g.len()).sum();
    if d.guesses.len() != unheard.len().min(gap_symbols) {
        return Err(format!("{} guesses for {} unheard atoms", d.guesses.len(), unheard.len()));
    }
    if d.guesses.iter().zip(&unheard).any(|(g, a)| g.meaning != *a) {
        return Err("guesses do not follow the hearer's order".into());
    }
    let mut pos = 0;
    for g in &d.guesses {
        if g.span.is_empty()
            || g.span.start < pos
            || !gaps.iter().any(|s| s.start <= g.span.start && g.span.end <= s.end)
        {
            return Err(format!("guess {:?} overlaps or leaves the gaps", g.span));
        }
        pos = g.span.end;
    }
    if unheard.len() >= gaps.len() {
        let covered: usize = d.guesses.iter().map(|g| g.span.len()).sum();
        if covered != gap_symbols {
            return Err("gaps not fully handed out".into());
        }
    }
    Ok(())
}

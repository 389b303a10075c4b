//! A single interaction: the speaker encodes an event as one boundary-free
//! symbol string and the hearer segments it against its own lexicon. The
//! interaction is then scored, and it may be dropped from memory if success
//! matters and the hearer understood too little.

use std::cmp::{Ordering, Reverse};

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::lexicon::{FormParams, Lexicon, MappingId};
use crate::world::{Atom, Individuation};

/// Half-open interval of symbol positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldToken {
    pub span: Span,
    pub meaning: Atom,
    /// The speaker's mapping, or `None` for a freshly invented form.
    pub mapping: Option<MappingId>,
}

impl GoldToken {
    pub fn invented(&self) -> bool {
        self.mapping.is_none()
    }
}

/// The speaker's output. `tokens` is scorer-only; the decoder sees `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: Vec<u8>,
    pub tokens: Vec<GoldToken>,
}

impl Utterance {
    pub fn token_form(&self, token: &GoldToken) -> &[u8] {
        &self.text[token.span.start..token.span.end]
    }

    /// Forms invented for this utterance, committed only if the interaction
    /// is remembered.
    pub fn pending_inventions(&self) -> impl Iterator<Item = (Atom, &[u8])> + '_ {
        self.tokens.iter().filter(|t| t.invented()).map(|t| (t.meaning, self.token_form(t)))
    }
}

/// Encodes the speaker's view of the event: the best known form for each
/// atom in the speaker's order, inventing one where none is known.
pub fn encode<R: Rng + ?Sized>(
    lexicon: &Lexicon,
    view: &Individuation<'_>,
    params: &FormParams,
    rng: &mut R,
) -> Utterance {
    let mut text = Vec::new();
    let mut tokens = Vec::with_capacity(view.order().len());
    for &meaning in view.order() {
        let start = text.len();
        let mapping = lexicon.best_form(meaning);
        match mapping {
            Some(id) => text.extend_from_slice(lexicon.get(id).form.symbols()),
            None => text.extend_from_slice(params.invent(rng).symbols()),
        }
        tokens.push(GoldToken { span: Span::new(start, text.len()), meaning, mapping });
    }
    Utterance { text, tokens }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub span: Span,
    pub meaning: Atom,
    pub mapping: MappingId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guess {
    pub span: Span,
    pub meaning: Atom,
}

/// The hearer's reading of an utterance. `gaps` lists every maximal
/// unmatched stretch; the first `guesses.len()` of them received a meaning.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decoding {
    pub matches: Vec<Match>,
    pub guesses: Vec<Guess>,
    pub gaps: Vec<Span>,
}

/// Lexicographic decoder objective. Greater is better: more matched
/// segments, then more symbols covered, then the lexicographically smallest
/// list of `(start, longest first, meaning)` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub matches: usize,
    pub coverage: usize,
    pub layout: Vec<(usize, Reverse<usize>, Atom)>,
}

impl Ord for Objective {
    fn cmp(&self, other: &Self) -> Ordering {
        self.matches
            .cmp(&other.matches)
            .then(self.coverage.cmp(&other.coverage))
            .then_with(|| other.layout.cmp(&self.layout))
    }
}

impl PartialOrd for Objective {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Decoding {
    pub fn objective(&self) -> Objective {
        let mut layout: Vec<_> =
            self.matches.iter().map(|m| (m.span.start, Reverse(m.span.len()), m.meaning)).collect();
        layout.sort();
        Objective { matches: self.matches.len(), coverage: self.matches.iter().map(|m| m.span.len()).sum(), layout }
    }

    /// Meanings the hearer attributes to the utterance.
    pub fn meanings(&self) -> impl Iterator<Item = Atom> + '_ {
        self.matches.iter().map(|m| m.meaning).chain(self.guesses.iter().map(|g| g.meaning))
    }

    /// Fills in gaps and guesses around a set of matches (sorted by start).
    ///
    /// Atoms the hearer found no word for are paired, in the hearer's
    /// order, with unmatched pieces of text from left to right. When there
    /// are more such atoms than gaps, the gaps are first cut at uniformly
    /// chosen interior positions so that each atom can get a piece.
    fn from_matches<R: Rng + ?Sized>(
        matches: Vec<Match>,
        text_len: usize,
        view: &Individuation<'_>,
        rng: &mut R,
    ) -> Self {
        let mut gaps = Vec::new();
        let mut pos = 0;
        for m in &matches {
            if m.span.start > pos {
                gaps.push(Span::new(pos, m.span.start));
            }
            pos = m.span.end;
        }
        if pos < text_len {
            gaps.push(Span::new(pos, text_len));
        }
        let unheard: Vec<Atom> =
            view.order().iter().copied().filter(|a| !matches.iter().any(|m| m.meaning == *a)).collect();
        let pieces = split_gaps(&gaps, unheard.len(), rng);
        let guesses = pieces.into_iter().zip(unheard).map(|(span, meaning)| Guess { span, meaning }).collect();
        Decoding { matches, guesses, gaps }
    }
}

/// Cuts `gaps` into up to `wanted` pieces. Extra cuts are drawn uniformly
/// without replacement from the interior boundaries of all gaps; no random
/// draw happens when the gaps already suffice.
fn split_gaps<R: Rng + ?Sized>(gaps: &[Span], wanted: usize, rng: &mut R) -> Vec<Span> {
    if wanted <= gaps.len() {
        return gaps.to_vec();
    }
    let interior: Vec<usize> = gaps.iter().flat_map(|g| g.start + 1..g.end).collect();
    let extra = (wanted - gaps.len()).min(interior.len());
    if extra == 0 {
        return gaps.to_vec();
    }
    let mut cuts: Vec<usize> = index::sample(rng, interior.len(), extra).into_iter().map(|i| interior[i]).collect();
    cuts.sort_unstable();
    let mut pieces = Vec::with_capacity(gaps.len() + extra);
    let mut cuts = cuts.into_iter().peekable();
    for g in gaps {
        let mut start = g.start;
        while let Some(&c) = cuts.peek() {
            if c >= g.end {
                break;
            }
            pieces.push(Span::new(start, c));
            start = c;
            cuts.next();
        }
        pieces.push(Span::new(start, g.end));
    }
    pieces
}

/// A lexicon entry that can be placed at some text position.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    len: usize,
    slot: usize,
    meaning: Atom,
    mapping: MappingId,
}

/// Candidate matches starting at each text position, longest first then
/// smallest meaning. Only mappings whose meaning belongs to the attended
/// event are considered.
fn candidates_by_position(lexicon: &Lexicon, text: &[u8], view: &Individuation<'_>) -> Vec<Vec<Candidate>> {
    let mut at: Vec<Vec<Candidate>> = vec![Vec::new(); text.len()];
    for (slot, &meaning) in view.event().atoms().iter().enumerate() {
        for (mapping, m) in lexicon.for_meaning(meaning) {
            let form = m.form.symbols();
            if form.is_empty() || form.len() > text.len() {
                continue;
            }
            for start in 0..=text.len() - form.len() {
                if &text[start..start + form.len()] == form {
                    at[start].push(Candidate { len: form.len(), slot, meaning, mapping });
                }
            }
        }
    }
    for list in &mut at {
        list.sort_by_key(|c| (Reverse(c.len), c.meaning));
    }
    at
}

/// Segments `text` into lexicon matches and unmatched gaps without knowing
/// word boundaries, then assigns leftover event atoms (in the hearer's
/// order) to gaps from left to right.
///
/// Matches maximise the [`Objective`]; each event atom is matched at most
/// once. Runs a dynamic program over `(position, used atoms)`.
pub fn decode<R: Rng + ?Sized>(lexicon: &Lexicon, text: &[u8], view: &Individuation<'_>, rng: &mut R) -> Decoding {
    let n = text.len();
    let cands = candidates_by_position(lexicon, text, view);
    let masks = 1usize << view.event().len();
    // best[(pos, mask)] = (matches, coverage) achievable on text[pos..]
    let mut best = vec![(0u32, 0u32); (n + 1) * masks];
    let at = |pos: usize, mask: usize| pos * masks + mask;
    for pos in (0..n).rev() {
        for mask in 0..masks {
            let mut v = best[at(pos + 1, mask)];
            for c in &cands[pos] {
                if mask & (1 << c.slot) == 0 {
                    let rest = best[at(pos + c.len, mask | (1 << c.slot))];
                    v = v.max((rest.0 + 1, rest.1 + c.len as u32));
                }
            }
            best[at(pos, mask)] = v;
        }
    }

    // Leftmost-longest reconstruction: at each position take the first
    // candidate (longest, then smallest meaning) that stays optimal.
    let mut matches = Vec::new();
    let (mut pos, mut mask) = (0, 0);
    while pos < n {
        let target = best[at(pos, mask)];
        let pick = cands[pos].iter().find(|c| {
            mask & (1 << c.slot) == 0 && {
                let rest = best[at(pos + c.len, mask | (1 << c.slot))];
                (rest.0 + 1, rest.1 + c.len as u32) == target
            }
        });
        match pick {
            Some(c) => {
                matches.push(Match { span: Span::new(pos, pos + c.len), meaning: c.meaning, mapping: c.mapping });
                mask |= 1 << c.slot;
                pos += c.len;
            }
            None => pos += 1,
        }
    }
    Decoding::from_matches(matches, n, view, rng)
}

/// Longest text the exhaustive decoder accepts.
pub const BRUTE_FORCE_MAX_LEN: usize = 16;

/// Reference decoder: tries every boundary placement and every consistent
/// meaning assignment. Returns `None` for texts longer than
/// [`BRUTE_FORCE_MAX_LEN`].
pub fn brute_force_decode<R: Rng + ?Sized>(
    lexicon: &Lexicon,
    text: &[u8],
    view: &Individuation<'_>,
    rng: &mut R,
) -> Option<Decoding> {
    let n = text.len();
    if n == 0 || n > BRUTE_FORCE_MAX_LEN {
        return None;
    }
    let atoms = view.event().atoms();
    let mut best: Option<(Objective, Vec<Match>)> = None;
    for cuts in 0u32..(1 << (n - 1)) {
        let mut segments = Vec::new();
        let mut start = 0;
        for i in 1..n {
            if cuts & (1 << (i - 1)) != 0 {
                segments.push(Span::new(start, i));
                start = i;
            }
        }
        segments.push(Span::new(start, n));
        assign(lexicon, text, atoms, &segments, 0, &mut Vec::new(), &mut best);
    }
    let (_, matches) = best.expect("the all-unmatched assignment always exists");
    Some(Decoding::from_matches(matches, n, view, rng))
}

fn assign(
    lexicon: &Lexicon,
    text: &[u8],
    atoms: &[Atom],
    segments: &[Span],
    i: usize,
    chosen: &mut Vec<Match>,
    best: &mut Option<(Objective, Vec<Match>)>,
) {
    if i == segments.len() {
        let objective = Decoding { matches: chosen.clone(), ..Default::default() }.objective();
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            *best = Some((objective, chosen.clone()));
        }
        return;
    }
    let span = segments[i];
    assign(lexicon, text, atoms, segments, i + 1, chosen, best);
    let piece = &text[span.start..span.end];
    for &meaning in atoms {
        if chosen.iter().any(|m| m.meaning == meaning) {
            continue;
        }
        if let Some(mapping) = lexicon.find(meaning, piece) {
            chosen.push(Match { span, meaning, mapping });
            assign(lexicon, text, atoms, segments, i + 1, chosen, best);
            chosen.pop();
        }
    }
}

/// How one interaction went.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionOutcome {
    /// Share of the hearer's decoded `(span, meaning)` items that equal a
    /// speaker token.
    pub precision: f64,
    /// Share of speaker tokens the hearer decoded at the right span with
    /// the right meaning.
    pub recall: f64,
    pub f1: f64,
    /// Share of intended meanings present anywhere in the decoding,
    /// ignoring where the hearer placed them.
    pub meaning_recall: f64,
    /// Matched segments per speaker token. Can exceed 1 when the hearer
    /// finds more matches than the speaker produced words.
    pub lex_use: f64,
    /// Share of matches whose span and meaning equal a speaker token;
    /// `None` when nothing matched.
    pub lex_precision: Option<f64>,
    pub gated: bool,
    pub committed: bool,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Compares the hearer's reading with the speaker's tokens. A decoded item
/// counts as understood only when both its span and its meaning agree with
/// a speaker token.
pub fn score(utterance: &Utterance, decoding: &Decoding) -> InteractionOutcome {
    let gold = &utterance.tokens;
    let is_gold = |span: Span, meaning: Atom| gold.iter().any(|t| t.span == span && t.meaning == meaning);
    let items = decoding.matches.len() + decoding.guesses.len();
    let exact_matches = decoding.matches.iter().filter(|m| is_gold(m.span, m.meaning)).count();
    let exact_guesses = decoding.guesses.iter().filter(|g| is_gold(g.span, g.meaning)).count();
    let correct = exact_matches + exact_guesses;
    let ratio = |num: usize, den: usize, empty: f64| if den == 0 { empty } else { num as f64 / den as f64 };

    let recall = ratio(correct, gold.len(), 1.0);
    let precision = ratio(correct, items, if gold.is_empty() { 1.0 } else { 0.0 });
    let heard = decoding.meanings().filter(|m| gold.iter().any(|t| t.meaning == *m)).count();
    InteractionOutcome {
        precision,
        recall,
        f1: f1_score(precision, recall),
        meaning_recall: ratio(heard, gold.len(), 1.0),
        lex_use: ratio(decoding.matches.len(), gold.len(), 0.0),
        lex_precision: (!decoding.matches.is_empty()).then(|| exact_matches as f64 / decoding.matches.len() as f64),
        gated: false,
        committed: false,
    }
}

/// Success gating: with probability `p_sm` the interaction is only
/// remembered when recall reaches `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub p_sm: f64,
    pub theta: f64,
}

/// Applies the gate and, if the interaction is remembered, updates both
/// lexicons: the speaker stores its inventions and reinforces the mappings
/// it used, the hearer reinforces its matches and stores each guess.
///
/// A uniform draw is consumed on every call, so the random stream does not
/// depend on `p_sm`.
#[allow(clippy::too_many_arguments)]
pub fn gate_and_commit<R: Rng + ?Sized>(
    outcome: &mut InteractionOutcome,
    gate: Gate,
    speaker: &mut Lexicon,
    hearer: &mut Lexicon,
    utterance: &Utterance,
    decoding: &Decoding,
    epoch: u32,
    rng: &mut R,
) -> bool {
    let u: f64 = rng.random();
    outcome.gated = u < gate.p_sm;
    outcome.committed = !(outcome.gated && outcome.recall < gate.theta);
    if !outcome.committed {
        return false;
    }
    for token in &utterance.tokens {
        match token.mapping {
            Some(id) => speaker.reinforce(id),
            None => {
                speaker.commit(token.meaning, utterance.token_form(token), epoch);
            }
        }
    }
    for m in &decoding.matches {
        hearer.reinforce(m.mapping);
    }
    for g in &decoding.guesses {
        hearer.commit(g.meaning, &utterance.text[g.span.start..g.span.end], epoch);
    }
    true
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lexicon::Form;
    use crate::world::Event;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(17)
    }

    fn sym(s: &str) -> Vec<u8> {
        Form::from_letters(s).unwrap().symbols().to_vec()
    }

    fn lex(entries: &[(&str, u32)]) -> Lexicon {
        let mut l = Lexicon::new();
        for (form, m) in entries {
            l.commit(Atom(*m), &sym(form), 0);
        }
        l
    }

    fn event(atoms: &[u32]) -> Event {
        Event::from_atoms(atoms.iter().map(|&a| Atom(a)).collect()).unwrap()
    }

    fn view<'e>(ev: &'e Event, order: &[u32]) -> Individuation<'e> {
        Individuation::with_order(ev, order.iter().map(|&a| Atom(a)).collect()).unwrap()
    }

    fn spans(d: &Decoding) -> Vec<(usize, usize, u32)> {
        d.matches.iter().map(|m| (m.span.start, m.span.end, m.meaning.0)).collect()
    }

    #[test]
    fn encode_with_empty_lexicon_invents_everything() {
        let ev = event(&[0, 1, 2]);
        let v = view(&ev, &[2, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = encode(&Lexicon::new(), &v, &FormParams::default(), &mut rng);
        assert_eq!(u.tokens.len(), 3);
        assert!(u.tokens.iter().all(|t| t.invented()));
        assert!((6..=15).contains(&u.text.len()));
        assert_eq!(u.pending_inventions().count(), 3);
        let order: Vec<u32> = u.tokens.iter().map(|t| t.meaning.0).collect();
        assert_eq!(order, vec![2, 0, 1]);
    }

    #[test]
    fn encode_uses_known_forms_in_speaker_order() {
        let ev = event(&[1]);
        let l = lex(&[("ab", 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = encode(&l, &view(&ev, &[1]), &FormParams::default(), &mut rng);
        assert_eq!(u.text, sym("ab"));
        assert_eq!(u.pending_inventions().count(), 0);

        let ev = event(&[1, 2, 3]);
        let l = lex(&[("ab", 1), ("c", 2), ("dd", 3)]);
        let u = encode(&l, &view(&ev, &[3, 1, 2]), &FormParams::default(), &mut rng);
        assert_eq!(u.text, sym("ddabc"));
        assert_eq!(u.tokens[1].span, Span::new(2, 4));
    }

    #[test]
    fn decode_finds_both_words() {
        let l = lex(&[("ab", 1), ("cd", 2)]);
        let ev = event(&[1, 2, 3]);
        let d = decode(&l, &sym("abcd"), &view(&ev, &[3, 1, 2]), &mut rng());
        assert_eq!(spans(&d), vec![(0, 2, 1), (2, 4, 2)]);
        assert!(d.gaps.is_empty() && d.guesses.is_empty());
        assert_eq!(Some(d), brute_force_decode(&l, &sym("abcd"), &view(&ev, &[3, 1, 2]), &mut rng()));
    }

    #[test]
    fn decode_without_candidates_splits_the_gap() {
        let l = lex(&[("ab", 7)]);
        let ev = event(&[3, 1, 2]);
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = decode(&l, &sym("abcd"), &view(&ev, &[3, 1, 2]), &mut rng);
            assert!(d.matches.is_empty());
            assert_eq!(d.gaps, vec![Span::new(0, 4)]);
            let meanings: Vec<u32> = d.guesses.iter().map(|g| g.meaning.0).collect();
            assert_eq!(meanings, vec![3, 1, 2]);
            assert_eq!(d.guesses[0].span.start, 0);
            assert_eq!(d.guesses[2].span.end, 4);
            assert!(d.guesses.windows(2).all(|w| w[0].span.end == w[1].span.start));
        }
    }

    #[test]
    fn single_unheard_atom_takes_the_whole_gap() {
        let ev = event(&[3]);
        let d = decode(&Lexicon::new(), &sym("abcd"), &view(&ev, &[3]), &mut rng());
        assert_eq!(d.guesses, vec![Guess { span: Span::new(0, 4), meaning: Atom(3) }]);
    }

    #[test]
    fn short_gaps_cannot_be_split_past_single_symbols() {
        let ev = event(&[1, 2, 3]);
        let d = decode(&Lexicon::new(), &sym("ab"), &view(&ev, &[2, 3, 1]), &mut rng());
        let got: Vec<(usize, usize, u32)> = d.guesses.iter().map(|g| (g.span.start, g.span.end, g.meaning.0)).collect();
        assert_eq!(got, vec![(0, 1, 2), (1, 2, 3)]);
    }

    #[test]
    fn gap_cuts_are_uniform() {
        // "abcd" has three interior boundaries; two cuts pick one of three
        // pairs, each with probability 1/3.
        let ev = event(&[1, 2, 3]);
        let mut rng = rng();
        let mut counts = std::collections::HashMap::new();
        let n = 30_000;
        for _ in 0..n {
            let d = decode(&Lexicon::new(), &sym("abcd"), &view(&ev, &[1, 2, 3]), &mut rng);
            let cuts = (d.guesses[0].span.end, d.guesses[1].span.end);
            *counts.entry(cuts).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        for c in counts.values() {
            assert!((*c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn decode_prefers_longer_coverage() {
        let l = lex(&[("ab", 1), ("abc", 1)]);
        let ev = event(&[1]);
        let d = decode(&l, &sym("abc"), &view(&ev, &[1]), &mut rng());
        assert_eq!(spans(&d), vec![(0, 3, 1)]);
    }

    #[test]
    fn decode_matches_each_meaning_once() {
        let l = lex(&[("ab", 1)]);
        let ev = event(&[1, 2]);
        let d = decode(&l, &sym("abab"), &view(&ev, &[2, 1]), &mut rng());
        assert_eq!(spans(&d), vec![(0, 2, 1)]);
        assert_eq!(d.guesses, vec![Guess { span: Span::new(2, 4), meaning: Atom(2) }]);
    }

    #[test]
    fn leftover_gaps_and_atoms() {
        // two gaps, one unheard atom: the second gap carries no meaning
        let l = lex(&[("c", 1), ("e", 2)]);
        let ev = event(&[1, 2, 3]);
        let d = decode(&l, &sym("abcde"), &view(&ev, &[1, 3, 2]), &mut rng());
        assert_eq!(spans(&d), vec![(2, 3, 1), (4, 5, 2)]);
        assert_eq!(d.gaps, vec![Span::new(0, 2), Span::new(3, 4)]);
        assert_eq!(d.guesses, vec![Guess { span: Span::new(0, 2), meaning: Atom(3) }]);
        // no gaps, atoms unheard
        let d = decode(&l, &sym("ce"), &view(&ev, &[1, 3, 2]), &mut rng());
        assert!(d.guesses.is_empty());
    }

    #[test]
    fn homonyms_resolve_to_smallest_meaning() {
        let l = lex(&[("ab", 2), ("ab", 1)]);
        let ev = event(&[1, 2]);
        let d = decode(&l, &sym("ab"), &view(&ev, &[2, 1]), &mut rng());
        assert_eq!(spans(&d), vec![(0, 2, 1)]);
    }

    #[test]
    fn decoder_ignores_meanings_outside_the_event() {
        let l = lex(&[("ab", 9), ("b", 1)]);
        let ev = event(&[1]);
        let d = decode(&l, &sym("ab"), &view(&ev, &[1]), &mut rng());
        assert_eq!(spans(&d), vec![(1, 2, 1)]);
    }

    #[test]
    fn brute_force_small_cases() {
        let ev = event(&[1]);
        let d = brute_force_decode(&Lexicon::new(), &sym("a"), &view(&ev, &[1]), &mut rng()).unwrap();
        assert_eq!(d.gaps, vec![Span::new(0, 1)]);
        let l = lex(&[("a", 1)]);
        let d = brute_force_decode(&l, &sym("a"), &view(&ev, &[1]), &mut rng()).unwrap();
        assert_eq!(spans(&d), vec![(0, 1, 1)]);
        assert!(brute_force_decode(&l, &[0; 17], &view(&ev, &[1]), &mut rng()).is_none());
    }

    fn utterance(tokens: &[(usize, usize, u32)]) -> Utterance {
        let end = tokens.last().map_or(0, |t| t.1);
        Utterance {
            text: vec![0; end],
            tokens: tokens
                .iter()
                .map(|&(s, e, m)| GoldToken { span: Span::new(s, e), meaning: Atom(m), mapping: None })
                .collect(),
        }
    }

    #[test]
    fn perfect_score() {
        let u = utterance(&[(0, 2, 1), (2, 4, 2), (4, 6, 3)]);
        let l = lex(&[("aa", 1), ("aa", 2), ("aa", 3)]);
        let d = Decoding {
            matches: u
                .tokens
                .iter()
                .map(|t| Match { span: t.span, meaning: t.meaning, mapping: l.find(t.meaning, &[0, 0]).unwrap() })
                .collect(),
            ..Default::default()
        };
        let o = score(&u, &d);
        assert_eq!((o.precision, o.recall, o.f1, o.lex_use), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(o.lex_precision, Some(1.0));
    }

    #[test]
    fn partial_score_by_hand() {
        let u = utterance(&[(0, 2, 1), (2, 4, 2), (4, 6, 3)]);
        let s = |a, b| Span::new(a, b);
        let d = Decoding {
            matches: vec![],
            guesses: vec![
                Guess { span: s(0, 2), meaning: Atom(1) },
                Guess { span: s(2, 4), meaning: Atom(2) },
                Guess { span: s(4, 5), meaning: Atom(3) },
                Guess { span: s(5, 6), meaning: Atom(9) },
            ],
            gaps: vec![s(0, 6)],
        };
        let o = score(&u, &d);
        assert_eq!(o.recall, 2.0 / 3.0);
        assert_eq!(o.precision, 0.5);
        assert!((o.f1 - 4.0 / 7.0).abs() < 1e-15);
        assert_eq!(o.meaning_recall, 1.0);
        assert_eq!(o.lex_precision, None);
        assert_eq!(o.lex_use, 0.0);
    }

    #[test]
    fn misplaced_meanings_are_not_understood() {
        let u = utterance(&[(0, 2, 1), (2, 4, 2)]);
        let d = Decoding {
            matches: vec![],
            guesses: vec![
                Guess { span: Span::new(0, 2), meaning: Atom(2) },
                Guess { span: Span::new(2, 4), meaning: Atom(1) },
            ],
            gaps: vec![Span::new(0, 4)],
        };
        let o = score(&u, &d);
        assert_eq!((o.precision, o.recall, o.f1), (0.0, 0.0, 0.0));
        assert_eq!(o.meaning_recall, 1.0);
    }

    #[test]
    fn span_exact_lexicon_precision() {
        let u = utterance(&[(0, 2, 1), (2, 5, 2)]);
        let l = lex(&[("aa", 1), ("a", 2)]);
        let d = Decoding {
            matches: vec![
                Match { span: Span::new(0, 2), meaning: Atom(1), mapping: l.find(Atom(1), &[0, 0]).unwrap() },
                Match { span: Span::new(2, 3), meaning: Atom(2), mapping: l.find(Atom(2), &[0]).unwrap() },
            ],
            ..Default::default()
        };
        let o = score(&u, &d);
        assert_eq!(o.lex_precision, Some(0.5));
        assert_eq!(o.recall, 0.5);
        assert_eq!(o.meaning_recall, 1.0);
    }

    #[test]
    fn empty_decoding_scores_zero() {
        let u = utterance(&[(0, 2, 1)]);
        let o = score(&u, &Decoding::default());
        assert_eq!((o.precision, o.recall, o.f1), (0.0, 0.0, 0.0));
    }

    fn setup() -> (Lexicon, Lexicon, Utterance, Decoding, InteractionOutcome) {
        let ev = event(&[1, 2, 3]);
        let speaker = lex(&[("ab", 1), ("cd", 2)]);
        let hearer = lex(&[("ab", 1), ("cd", 2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = encode(&speaker, &view(&ev, &[1, 2, 3]), &FormParams::default(), &mut rng);
        let d = decode(&hearer, &u.text, &view(&ev, &[2, 1, 3]), &mut rng);
        let o = score(&u, &d);
        (speaker, hearer, u, d, o)
    }

    #[test]
    fn success_irrelevant_always_commits() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (mut s, mut h, u, d, mut o) = setup();
            o.recall = 0.0;
            let gate = Gate { p_sm: 0.0, theta: 1.0 };
            assert!(gate_and_commit(&mut o, gate, &mut s, &mut h, &u, &d, 1, &mut rng));
            assert!(!o.gated);
        }
    }

    #[test]
    fn failed_gate_leaves_lexicons_untouched() {
        let (mut s, mut h, u, d, mut o) = setup();
        // the invented third word is not recognised, but guessed correctly
        assert_eq!(o.recall, 1.0);
        o.recall = 2.0 / 3.0;
        let (s0, h0) = (s.clone(), h.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gate = Gate { p_sm: 1.0, theta: 1.0 };
        assert!(!gate_and_commit(&mut o, gate, &mut s, &mut h, &u, &d, 1, &mut rng));
        assert!(o.gated && !o.committed);
        assert_eq!(s, s0);
        assert_eq!(h, h0);
    }

    #[test]
    fn passing_gate_updates_both_agents() {
        let (mut s, mut h, u, d, mut o) = setup();
        o.recall = 1.0 / 3.0;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gate = Gate { p_sm: 1.0, theta: 0.25 };
        assert!(gate_and_commit(&mut o, gate, &mut s, &mut h, &u, &d, 4, &mut rng));
        assert_eq!(s.len(), 3);
        assert!(s.mappings()[..2].iter().all(|m| m.count == 2));
        assert_eq!(s.mappings()[2].created_at, 4);
        assert_eq!(h.len(), 3);
        assert!(h.mappings()[..2].iter().all(|m| m.count == 2));
        assert_eq!(h.mappings()[2].meaning, Atom(3));
        assert_eq!(h.mappings()[2].form, s.mappings()[2].form);
    }
}

mod common;

use common::{check_decoding, random_instance};
use lexsim::dialogue::{brute_force_decode, decode, encode, score};
use lexsim::lexicon::{FormParams, Lexicon};
use lexsim::world::{Atom, Event, Individuation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dp_matches_exhaustive_search(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 12);
        let view = Individuation::with_order(&inst.event, inst.order.clone()).unwrap();
        let fast = decode(&inst.lexicon, &inst.text, &view, &mut rng);
        let slow = brute_force_decode(&inst.lexicon, &inst.text, &view, &mut rng).unwrap();
        prop_assert_eq!(fast.objective(), slow.objective(), "{:?}", inst);
    }

    /// Distinct forms of one common length cannot be misparsed, so a hearer
    /// sharing the speaker's lexicon recovers every token.
    #[test]
    fn shared_unambiguous_lexicon_gives_full_recall(
        seed in any::<u64>(),
        len in 1usize..4,
        arity in 1usize..5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forms: Vec<Vec<u8>> = Vec::new();
        let mut lexicon = Lexicon::new();
        for m in 0..8 {
            let form = loop {
                let f: Vec<u8> = (0..len).map(|_| rand::Rng::random_range(&mut rng, 0..3u8)).collect();
                if !forms.contains(&f) {
                    break f;
                }
            };
            lexicon.commit(Atom(m), &form, 0);
            forms.push(form);
            if forms.len() == 3usize.pow(len as u32) {
                break;
            }
        }
        let known = forms.len();
        let mut atoms: Vec<Atom> = (0..known as u32).map(Atom).collect();
        atoms.shuffle(&mut rng);
        atoms.truncate(arity.min(known));
        let event = Event::from_atoms(atoms).unwrap();
        let params = FormParams::new(len, len, 3).unwrap();
        let speaker = event.individuate(&mut rng);
        let hearer = event.individuate(&mut rng);
        let utterance = encode(&lexicon, &speaker, &params, &mut rng);
        let decoding = decode(&lexicon, &utterance.text, &hearer, &mut rng);
        let outcome = score(&utterance, &decoding);
        prop_assert_eq!(outcome.recall, 1.0);
        prop_assert_eq!(outcome.precision, 1.0);
    }
}

#[test]
fn decoding_invariants_hold_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100_000 {
        let inst = random_instance(&mut rng, 14);
        let view = Individuation::with_order(&inst.event, inst.order.clone()).unwrap();
        let d = decode(&inst.lexicon, &inst.text, &view, &mut rng);
        if let Err(e) = check_decoding(&inst, &d) {
            panic!("case {i}: {e}\n{inst:?}\n{d:?}");
        }
    }
}

#[test]
fn exhaustive_decoder_obeys_the_same_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..2000 {
        let inst = random_instance(&mut rng, 10);
        let view = Individuation::with_order(&inst.event, inst.order.clone()).unwrap();
        let d = brute_force_decode(&inst.lexicon, &inst.text, &view, &mut rng).unwrap();
        if let Err(e) = check_decoding(&inst, &d) {
            panic!("case {i}: {e}\n{inst:?}\n{d:?}");
        }
    }
}

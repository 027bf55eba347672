mod common;

use common::{random_state, random_task, to_state};
use macroforge::macros::Macro;
use macroforge::task::successor;
use macroforge::{applicable, apply_macro, apply_sequence, macro_applicable, GroundTask, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// An applicable macro from `s`: a random walk of 2..=5 steps. `None` if
/// the walk gets stuck before two steps.
fn walk_macro(rng: &mut impl Rng, t: &GroundTask, s: &State) -> Option<Macro> {
    let len = rng.gen_range(2..=5);
    let mut cur = s.clone();
    let mut steps = Vec::new();
    for _ in 0..len {
        let options: Vec<usize> = (0..t.actions().len()).filter(|&i| applicable(&cur, t.action(i))).collect();
        if options.is_empty() {
            break;
        }
        let i = options[rng.gen_range(0..options.len())];
        cur = successor(&cur, t.action(i));
        steps.push(i);
    }
    (steps.len() >= 2).then(|| Macro {
        signatures: steps.iter().map(|&i| t.action(i).signature.clone()).collect(),
        steps,
        support: 1,
    })
}

proptest! {
    #[test]
    fn macro_states_are_the_prefix_folds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rt = random_task(&mut rng, 6, 8);
        let t = &rt.task;
        let s = to_state(6, &random_state(&mut rng, 6));
        if let Some(m) = walk_macro(&mut rng, t, &s) {
            prop_assert!(macro_applicable(t, &s, &m));
            let states = apply_macro(t, &s, &m).unwrap();
            prop_assert_eq!(states.len(), m.len());
            for k in 1..=m.len() {
                prop_assert_eq!(&states[k - 1], &apply_sequence(t, &s, &m.steps[..k]).unwrap());
            }
        }
    }

    #[test]
    fn applicability_agrees_with_stepwise_application(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rt = random_task(&mut rng, 5, 6);
        let t = &rt.task;
        let s = to_state(5, &random_state(&mut rng, 5));
        let len = rng.gen_range(2..=4);
        let steps: Vec<usize> = (0..len).map(|_| rng.gen_range(0..t.actions().len())).collect();
        let m = Macro { signatures: steps.iter().map(|&i| t.action(i).signature.clone()).collect(), steps, support: 1 };
        let stepwise = apply_sequence(t, &s, &m.steps);
        prop_assert_eq!(macro_applicable(t, &s, &m), stepwise.is_ok());
        prop_assert_eq!(apply_macro(t, &s, &m).ok().and_then(|v| v.last().cloned()), stepwise.ok());
    }
}

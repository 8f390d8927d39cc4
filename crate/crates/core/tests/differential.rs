mod common;

use std::collections::HashSet;

use common::{all_strings, random_grammar, words, Shape};
use lcfrs_core::oracle::{tabular_recognize, Item};
use lcfrs_core::recognizer::{recognize, ClosureAlgorithm, Options};
use lcfrs_core::Error;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Runs the engine and the oracle on every short string. Verdicts must match
/// and engine facts must be oracle items. Equality is required for every item
/// that can take part in a derivation: nonterminals no wider than the contact
/// rank and, without empty spans, spans that do not touch.
fn run(seed: u64, shape: &Shape, grammars: usize, max_len: usize) -> (usize, usize) {
    let mut rng = StdRng::seed_from_u64(seed);
    let alpha = words("a b");
    let (mut checked, mut refused) = (0, 0);
    for k in 0..grammars {
        let g = random_grammar(&mut rng, shape);
        let opts = Options {
            closure: if k % 2 == 0 {
                ClosureAlgorithm::Fixpoint
            } else {
                ClosureAlgorithm::Valiant
            },
            ..Options::default()
        };
        for s in all_strings(&alpha, max_len).into_iter().skip(1) {
            let r = match recognize(&g, &s, opts) {
                Ok(r) => r,
                Err(Error::Precondition(_)) => {
                    refused += 1;
                    break;
                }
                Err(e) => panic!("{e}\n{}", g.to_text()),
            };
            let chart = tabular_recognize(&r.grammar, &s);
            assert_eq!(r.accepted, chart.accepted(), "{s:?}\n{}", g.to_text());
            let facts = r.facts();
            assert!(facts.is_subset(&chart.items), "{s:?}\n{}", g.to_text());
            let usable = |f: &&Item| {
                r.grammar.fan_out(f.0) <= r.stats.contact_rank.max(1)
                    && (r.grammar.has_empty_spans() || f.1.windows(2).all(|w| w[0].1 < w[1].0))
            };
            let want: HashSet<&Item> = chart.items.iter().filter(usable).collect();
            let got: HashSet<&Item> = facts.iter().filter(usable).collect();
            assert_eq!(got, want, "{s:?}\n{}", g.to_text());
            checked += 1;
        }
    }
    (checked, refused)
}

#[test]
fn single_initial_grammars_match_the_oracle() {
    let (checked, refused) = run(101, &Shape::default(), 30, 4);
    assert_eq!(refused, 0);
    assert!(checked > 800);
}

#[test]
fn dual_initial_grammars_match_the_oracle() {
    let shape = Shape {
        dual_initial: true,
        ..Shape::default()
    };
    let (checked, _) = run(202, &shape, 30, 4);
    assert!(checked > 500);
}

#[test]
fn fan_out_three() {
    let shape = Shape {
        nonterminals: 4,
        max_fan_out: 3,
        binary_rules: 4,
        terminals: &["a", "b"],
        dual_initial: false,
    };
    let (checked, _) = run(303, &shape, 12, 4);
    assert!(checked > 300);
}

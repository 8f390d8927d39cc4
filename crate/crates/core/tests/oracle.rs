mod common;

use std::collections::BTreeSet;

use common::{all_strings, random_grammar, words, Shape};
use lcfrs_core::bundled::bundled;
use lcfrs_core::grammar::parse_grammar;
use lcfrs_core::oracle::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn set(items: &[&str]) -> BTreeSet<Vec<String>> {
    items.iter().map(|s| words(s)).collect()
}

#[test]
fn count4_short_strings() {
    let g = bundled("count4").unwrap();
    assert_eq!(
        enumerate_language(&g, 6).unwrap(),
        set(&["a b c d", "a a b c c d", "a b b c d d"])
    );
}

#[test]
fn anbn_short_strings() {
    let g = bundled("cfg_anbn").unwrap();
    assert_eq!(enumerate_language(&g, 7).unwrap(), set(&["a b", "a a b b", "a a a b b b"]));
}

#[test]
fn no_lexical_rules_means_empty_language() {
    let g = parse_grammar("start S\nS -> S S : b1 g1\n").unwrap();
    assert!(enumerate_language(&g, 6).unwrap().is_empty());
    assert!(!tabular_recognize(&g, &words("a")).accepted());
}

#[test]
fn itg_permutations() {
    let g = bundled("itg_sep").unwrap();
    for (s, want) in [
        ("x y # y x", true),
        ("x y # x y", true),
        ("x # x", true),
        ("x y # x x", false),
        ("x y x", false),
        ("# x", false),
    ] {
        assert_eq!(tabular_recognize(&g, &words(s)).accepted(), want, "{s}");
    }
}

#[test]
fn chart_contains_expected_items() {
    let g = bundled("count4").unwrap();
    let s = words("a a b c c d");
    let chart = tabular_recognize(&g, &s);
    assert!(chart.accepted());
    let a = g.lookup("A").unwrap();
    assert!(chart.items.contains(&(a, vec![(0, 2), (3, 5)])));
    assert!(chart.items.contains(&(a, vec![(1, 2), (4, 5)])));
    assert!(!chart.items.contains(&(a, vec![(0, 1), (3, 5)])));
}

#[test]
fn empty_input_and_empty_spans() {
    let g = parse_grammar("start S\nS -> A B : b1 g1\nA -> : ''\nA -> : 'a'\nB -> : 'b'\n").unwrap();
    assert_eq!(enumerate_language(&g, 3).unwrap(), set(&["b", "a b"]));
    assert!(tabular_recognize(&g, &words("b")).accepted());
    assert!(!tabular_recognize(&g, &[]).accepted());
    let n = parse_grammar("start S\nS -> : ''\n").unwrap();
    assert!(tabular_recognize(&n, &[]).accepted());
}

#[test]
fn enumeration_limit() {
    let g = bundled("cfg_anbn").unwrap();
    assert!(enumerate_language(&g, MAX_ENUMERATION_LENGTH + 1).is_err());
}

#[test]
fn compose_follows_templates() {
    let g = bundled("count4").unwrap();
    let (_, r) = g.binary_rules().find(|(_, r)| g.name(r.lhs) == "S").unwrap();
    let lcfrs_core::grammar::RuleBody::Binary { composition, .. } = &r.body else {
        unreachable!()
    };
    assert_eq!(compose_spans(composition, &[(0, 1), (2, 3)], &[(1, 2), (3, 4)]), Some(vec![(0, 4)]));
    assert_eq!(compose_spans(composition, &[(0, 1), (2, 3)], &[(1, 2), (4, 5)]), None);
}

#[test]
fn chart_agrees_with_enumeration() {
    let mut rng = StdRng::seed_from_u64(5);
    let alpha = words("a b");
    let shape = Shape {
        dual_initial: true,
        ..Shape::default()
    };
    for _ in 0..40 {
        let g = random_grammar(&mut rng, &shape);
        let lang = enumerate_language(&g, 5).unwrap();
        for s in all_strings(&alpha, 5) {
            assert_eq!(tabular_recognize(&g, &s).accepted(), lang.contains(&s), "{s:?}\n{}", g.to_text());
        }
    }
}

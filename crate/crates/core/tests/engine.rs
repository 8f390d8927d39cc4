mod common;

use common::words;
use lcfrs_core::boolean::Backend;
use lcfrs_core::bundled::bundled;
use lcfrs_core::grammar::parse_grammar;
use lcfrs_core::oracle::tabular_recognize;
use lcfrs_core::recognizer::*;
use lcfrs_core::Error;

fn all_options() -> Vec<Options> {
    let mut v = vec![];
    for m in [
        Multiplier::Reference,
        Multiplier::Boolean(Backend::Naive),
        Multiplier::Boolean(Backend::Bitset),
        Multiplier::Boolean(Backend::Strassen { cutoff: 8 }),
    ] {
        for c in [ClosureAlgorithm::Fixpoint, ClosureAlgorithm::Valiant] {
            v.push(Options {
                multiplier: m,
                closure: c,
            });
        }
    }
    v
}

fn accepts(name: &str, s: &str) -> bool {
    let g = bundled(name).unwrap();
    recognize(&g, &words(s), Options::default()).unwrap().accepted
}

#[test]
fn bundled_examples() {
    let cases = [
        ("cfg_anbn", "a a b b", true),
        ("cfg_anbn", "a a b", false),
        ("count4", "a a b c c d", true),
        ("count4", "a b b c d d", true),
        ("count4", "a b c c d", false),
        ("count4", "a b d c", false),
        ("tag_style", "a b e c d", true),
        ("tag_style", "a a b b e c c d d", true),
        ("tag_style", "a a b e c c d", false),
        ("itg_sep", "x y # y x", true),
        ("itg_sep", "x y y # y x y", true),
        ("itg_sep", "x y # x x", false),
        ("dual_initial_demo", "a a c b", true),
        ("dual_initial_demo", "a c", false),
    ];
    for (name, s, want) in cases {
        assert_eq!(accepts(name, s), want, "{name}: {s}");
    }
}

#[test]
fn backends_and_closures_agree() {
    for (name, s) in [("count4", "a b c d"), ("itg_sep", "x y # y x"), ("dual_initial_demo", "a c b")] {
        let g = bundled(name).unwrap();
        let s = words(s);
        let base = recognize(&g, &s, Options::default()).unwrap();
        assert!(base.accepted, "{name}");
        for o in all_options() {
            let r = recognize(&g, &s, o).unwrap();
            assert_eq!(r.accepted, base.accepted, "{name} {o:?}");
            assert_eq!(r.facts(), base.facts(), "{name} {o:?}");
        }
    }
}

#[test]
fn dispatch() {
    let s = words("a b c d");
    let r = recognize(&bundled("count4").unwrap(), &s, Options::default()).unwrap();
    assert_eq!((r.path, r.converted), (RecognitionPath::Unbalanced, false));
    assert_eq!(r.stats.contact_rank, 3);

    let r = recognize(&bundled("itg_sep").unwrap(), &words("x # x"), Options::default()).unwrap();
    assert_eq!((r.path, r.converted), (RecognitionPath::General, false));

    let r = recognize(&bundled("dual_initial_demo").unwrap(), &words("a c b"), Options::default()).unwrap();
    assert!(r.converted);
    assert!(r.accepted);

    let r = recognize(&bundled("cfg_anbn").unwrap(), &[], Options::default()).unwrap();
    assert_eq!(r.path, RecognitionPath::Empty);
    assert!(!r.accepted);
}

#[test]
fn itg_needs_more_than_one_round() {
    let g = bundled("itg_sep").unwrap();
    let s = words("x y x y # y x y x");
    let r = recognize(&g, &s, Options::default()).unwrap();
    assert!(r.accepted);
    assert!(r.stats.rounds >= 2, "{:?}", r.stats);
    assert_eq!(r.facts(), tabular_recognize(&g, &s).items);
}

#[test]
fn preconditions() {
    let itg = bundled("itg_sep").unwrap();
    let e = recognize_unbalanced(&itg, &words("x # x"), Options::default()).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)), "{e}");

    let nullable = parse_grammar("start S\nS -> A B : b1 g1\nA -> : ''\nB -> : 'b'\n").unwrap();
    let e = recognize_general(&nullable, &words("b"), Options::default()).unwrap_err();
    assert!(e.to_string().contains("only empty strings"), "{e}");
}

#[test]
fn recursive_dual_initial_grammar_is_refused_not_misjudged() {
    let g = parse_grammar("start S\nS -> N S : b1 g1 b2\nN -> N S : b1 , g1 b2\nN -> : 'a' , 'b'\nS -> : 'c'\n").unwrap();
    let s = words("a c b");
    assert!(tabular_recognize(&g, &s).accepted());
    let e = recognize(&g, &s, Options::default()).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)), "{e}");
}

#[test]
fn oversized_input_is_a_limit_error() {
    let g = bundled("count4").unwrap();
    let s = vec!["a".to_string(); 40];
    assert!(matches!(recognize(&g, &s, Options::default()), Err(Error::Limit(_))));
}

#[test]
fn derivations() {
    let g = bundled("count4").unwrap();
    let s = words("a a b c c d");
    let r = recognize(&g, &s, Options::default()).unwrap();
    let t = extract_derivation(&r).unwrap().unwrap();
    assert_eq!(t.nonterminal, "S");
    assert_eq!(t.spans, vec![(0, 6)]);
    let y: Vec<String> = t.yield_tokens(s.len()).into_iter().map(Option::unwrap).collect();
    assert_eq!(y, s);
    let a = &t.children[0];
    assert_eq!((a.nonterminal.as_str(), a.spans.clone()), ("A", vec![(0, 2), (3, 5)]));
    // S, A, X, A, B: five nodes
    assert_eq!(t.size(), 5);

    let r = recognize(&g, &words("a b c"), Options::default()).unwrap();
    assert_eq!(extract_derivation(&r).unwrap(), None);
}

#[test]
fn derivation_on_converted_grammar() {
    let g = bundled("dual_initial_demo").unwrap();
    let s = words("a a c b b");
    let r = recognize(&g, &s, Options::default()).unwrap();
    let t = extract_derivation(&r).unwrap().unwrap();
    let y: Vec<String> = t.yield_tokens(s.len()).into_iter().map(Option::unwrap).collect();
    assert_eq!(y, s);
}

#[test]
fn nullable_start_on_empty_input() {
    let g = parse_grammar("start S\nS -> A A : b1 g1\nA -> : ''\nA -> : 'a'\n").unwrap();
    let r = recognize(&g, &[], Options::default()).unwrap();
    assert!(r.accepted);
    let t = extract_derivation(&r).unwrap().unwrap();
    assert_eq!(t.spans, vec![(0, 0)]);
}

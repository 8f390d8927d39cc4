//! Grammars shipped with the crate.

use crate::grammar::{parse_grammar, Grammar};

pub const BUNDLED: &[(&str, &str)] = &[
    ("cfg_anbn", include_str!("../grammars/cfg_anbn.lcfrs")),
    ("count4", include_str!("../grammars/count4.lcfrs")),
    ("tag_style", include_str!("../grammars/tag_style.lcfrs")),
    ("itg_sep", include_str!("../grammars/itg_sep.lcfrs")),
    ("dual_initial_demo", include_str!("../grammars/dual_initial_demo.lcfrs")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn bundled(name: &str) -> Option<Grammar> {
    source(name).map(|s| parse_grammar(s).expect("bundled grammar is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{contact_rank, is_balanced, is_single_initial};

    #[test]
    fn all_parse() {
        for n in names() {
            assert!(bundled(n).is_some(), "{n}");
        }
        assert!(bundled("nope").is_none());
    }

    #[test]
    fn shapes() {
        let g = bundled("count4").unwrap();
        assert_eq!((contact_rank(&g), is_balanced(&g)), (3, false));
        let g = bundled("tag_style").unwrap();
        assert_eq!((contact_rank(&g), is_balanced(&g)), (2, false));
        let g = bundled("itg_sep").unwrap();
        assert_eq!((contact_rank(&g), is_balanced(&g)), (2, true));
        assert!(!is_single_initial(&bundled("dual_initial_demo").unwrap()));
    }
}

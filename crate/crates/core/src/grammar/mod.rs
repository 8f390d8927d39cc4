//! Binary LCFRS grammars: representation, parsing, validation and the
//! structural analyses that drive the matrix engine.

mod analysis;
mod convert;
mod parse;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use analysis::{
    config_set, configurations, contact_rank, contact_rank_three_term, delta, is_balanced,
    is_single_initial, rule_contact_rank, tabular_exponent, AnalysisReport, Config,
    ConfigTriple, RuleAnalysis, DEFAULT_OMEGA,
};
pub use convert::to_single_initial;
pub use parse::{parse_grammar, parse_grammar_unvalidated};

pub type NtId = usize;

/// A variable in a span template: `B(i)` is β_i, `C(i)` is γ_i (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    B(usize),
    C(usize),
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::B(i) | Var::C(i) => i,
        }
    }

    pub fn is_b(self) -> bool {
        matches!(self, Var::B(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::B(i) => write!(f, "b{i}"),
            Var::C(i) => write!(f, "g{i}"),
        }
    }
}

/// One span template per component of the left-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    pub templates: Vec<Vec<Var>>,
}

impl Composition {
    pub fn new(templates: Vec<Vec<Var>>) -> Self {
        Composition { templates }
    }

    pub fn fan_out(&self) -> usize {
        self.templates.len()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .templates
            .iter()
            .map(|t| {
                t.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", parts.join(" , "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    Binary {
        rhs1: NtId,
        rhs2: NtId,
        composition: Composition,
    },
    /// One terminal string per component; an empty vector is ε.
    Lexical { strings: Vec<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: NtId,
    pub body: RuleBody,
    /// Source line, 0 for rules built in code.
    pub line: usize,
}

impl Rule {
    pub fn is_binary(&self) -> bool {
        matches!(self.body, RuleBody::Binary { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nonterminal {
    pub name: String,
    pub fan_out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub nonterminals: Vec<Nonterminal>,
    pub rules: Vec<Rule>,
    pub start: NtId,
}

impl Grammar {
    pub fn fan_out(&self, a: NtId) -> usize {
        self.nonterminals[a].fan_out
    }

    pub fn name(&self, a: NtId) -> &str {
        &self.nonterminals[a].name
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.nonterminals.iter().position(|n| n.name == name)
    }

    /// Largest fan-out of any nonterminal.
    pub fn max_fan_out(&self) -> usize {
        self.nonterminals.iter().map(|n| n.fan_out).max().unwrap_or(1)
    }

    pub fn binary_rules(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().enumerate().filter(|(_, r)| r.is_binary())
    }

    pub fn lexical_rules(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().enumerate().filter(|(_, r)| !r.is_binary())
    }

    pub fn terminals(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rules
            .iter()
            .filter_map(|r| match &r.body {
                RuleBody::Lexical { strings } => Some(strings.iter().flatten().cloned()),
                _ => None,
            })
            .flatten()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// True if some lexical rule has an empty component.
    pub fn has_empty_spans(&self) -> bool {
        self.rules.iter().any(|r| match &r.body {
            RuleBody::Lexical { strings } => strings.iter().any(|s| s.is_empty()),
            _ => false,
        })
    }

    /// Nonterminals that can derive a tuple of empty strings.
    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if null[r.lhs] {
                    continue;
                }
                let ok = match &r.body {
                    RuleBody::Lexical { strings } => strings.iter().all(|s| s.is_empty()),
                    RuleBody::Binary { rhs1, rhs2, .. } => null[*rhs1] && null[*rhs2],
                };
                if ok {
                    null[r.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return null;
            }
        }
    }

    pub fn rule_to_string(&self, r: &Rule) -> String {
        match &r.body {
            RuleBody::Binary {
                rhs1,
                rhs2,
                composition,
            } => format!(
                "{} -> {} {} : {}",
                self.name(r.lhs),
                self.name(*rhs1),
                self.name(*rhs2),
                composition
            ),
            RuleBody::Lexical { strings } => {
                let parts: Vec<String> = strings
                    .iter()
                    .map(|s| {
                        if s.is_empty() {
                            "''".to_string()
                        } else {
                            s.iter()
                                .map(|t| format!("'{t}'"))
                                .collect::<Vec<_>>()
                                .join(" ")
                        }
                    })
                    .collect();
                format!("{} -> : {}", self.name(r.lhs), parts.join(" , "))
            }
        }
    }

    /// Serializes back to the text format accepted by [`parse_grammar`].
    pub fn to_text(&self) -> String {
        let mut s = format!("start {}\n", self.name(self.start));
        for r in &self.rules {
            s.push_str(&self.rule_to_string(r));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    StartFanOut,
    NameClash,
    FanOutArity,
    VarOutOfRange,
    NonLinear,
    Erasing,
    BetaOrder,
    GammaOrder,
    NotInitialBeta,
    EmptyTemplate,
    AdjacentSameChild,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Option<usize>,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(r) => write!(f, "rule {r}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Checks every structural invariant and returns all violations found.
pub fn validate(g: &Grammar) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule: Option<usize>, kind: ViolationKind, message: String| {
        out.push(Violation {
            rule,
            kind,
            message,
        })
    };
    if g.fan_out(g.start) != 1 {
        push(
            None,
            ViolationKind::StartFanOut,
            format!("start symbol {} has fan-out {}", g.name(g.start), g.fan_out(g.start)),
        );
    }
    let names: HashMap<&str, ()> = g.nonterminals.iter().map(|n| (n.name.as_str(), ())).collect();
    for t in g.terminals() {
        if names.contains_key(t.as_str()) {
            push(
                None,
                ViolationKind::NameClash,
                format!("`{t}` is both a terminal and a nonterminal"),
            );
        }
    }
    for (idx, r) in g.rules.iter().enumerate() {
        let fa = g.fan_out(r.lhs);
        match &r.body {
            RuleBody::Lexical { strings } => {
                if strings.len() != fa {
                    push(
                        Some(idx),
                        ViolationKind::FanOutArity,
                        format!("{} components for fan-out {fa}", strings.len()),
                    );
                }
            }
            RuleBody::Binary {
                rhs1,
                rhs2,
                composition,
            } => {
                let (fb, fc) = (g.fan_out(*rhs1), g.fan_out(*rhs2));
                if composition.fan_out() != fa {
                    push(
                        Some(idx),
                        ViolationKind::FanOutArity,
                        format!("{} templates for fan-out {fa}", composition.fan_out()),
                    );
                }
                let mut seen_b = vec![0usize; fb + 1];
                let mut seen_c = vec![0usize; fc + 1];
                let mut next_b = 1;
                let mut next_c = 1;
                for (ti, t) in composition.templates.iter().enumerate() {
                    if t.is_empty() {
                        push(
                            Some(idx),
                            ViolationKind::EmptyTemplate,
                            format!("template {} is empty", ti + 1),
                        );
                    }
                    for w in t.windows(2) {
                        if w[0].is_b() == w[1].is_b() {
                            push(
                                Some(idx),
                                ViolationKind::AdjacentSameChild,
                                format!("{} and {} are adjacent", w[0], w[1]),
                            );
                        }
                    }
                    for &v in t {
                        let (seen, bound, next) = match v {
                            Var::B(_) => (&mut seen_b, fb, &mut next_b),
                            Var::C(_) => (&mut seen_c, fc, &mut next_c),
                        };
                        let i = v.index();
                        if i == 0 || i > bound {
                            push(
                                Some(idx),
                                ViolationKind::VarOutOfRange,
                                format!("{v} out of range (fan-out {bound})"),
                            );
                            continue;
                        }
                        seen[i] += 1;
                        if seen[i] > 1 {
                            push(
                                Some(idx),
                                ViolationKind::NonLinear,
                                format!("non-linear use of {v}"),
                            );
                        }
                        if i != *next {
                            let kind = if v.is_b() {
                                ViolationKind::BetaOrder
                            } else {
                                ViolationKind::GammaOrder
                            };
                            push(Some(idx), kind, format!("{v} out of order"));
                        }
                        *next = (*next).max(i + 1);
                    }
                }
                for (i, &c) in seen_b.iter().enumerate().skip(1) {
                    if c == 0 {
                        push(Some(idx), ViolationKind::Erasing, format!("b{i} unused"));
                    }
                }
                for (i, &c) in seen_c.iter().enumerate().skip(1) {
                    if c == 0 {
                        push(Some(idx), ViolationKind::Erasing, format!("g{i} unused"));
                    }
                }
                let first = composition.templates.first().and_then(|t| t.first());
                if first != Some(&Var::B(1)) {
                    push(
                        Some(idx),
                        ViolationKind::NotInitialBeta,
                        "first template must start with b1".to_string(),
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catches_non_linear_and_erasing() {
        let g = parse_grammar_unvalidated("start S\nS -> A A : b1 b1 g1\nA -> : 'a'\n").unwrap();
        let kinds: Vec<ViolationKind> = validate(&g).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::NonLinear));

        let g = parse_grammar_unvalidated(
            "start S\nS -> P A : b2 g1\nP -> : 'a' , 'b'\nA -> : 'a'\n",
        )
        .unwrap();
        let kinds: Vec<ViolationKind> = validate(&g).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::Erasing));
        assert!(kinds.contains(&ViolationKind::NotInitialBeta));
    }

    #[test]
    fn gamma_order_is_checked() {
        let g = parse_grammar_unvalidated(
            "start S\nS -> A P : b1 g2 g1\nA -> : 'a'\nP -> : 'a' , 'b'\n",
        )
        .unwrap();
        let kinds: Vec<ViolationKind> = validate(&g).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::GammaOrder));
        assert!(kinds.contains(&ViolationKind::AdjacentSameChild));
    }

    #[test]
    fn nullable_propagates() {
        let g = parse_grammar("start S\nS -> A A : b1 g1\nA -> : ''\nA -> : 'a'\n").unwrap();
        assert_eq!(g.nullable(), vec![true, true]);
    }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Composition, Grammar, NtId, RuleBody, Var};
use crate::error::{Error, Result};

pub const DEFAULT_OMEGA: f64 = 2.3728639;

/// Sorted 1-based endpoint numbers.
pub type Config = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigTriple {
    pub cfg1: Config,
    pub cfg2: Config,
    pub cfg3: Config,
}

fn binary_parts(g: &Grammar, rule: usize) -> Result<(NtId, NtId, NtId, &Composition)> {
    match &g.rules[rule].body {
        RuleBody::Binary {
            rhs1,
            rhs2,
            composition,
        } => Ok((g.rules[rule].lhs, *rhs1, *rhs2, composition)),
        RuleBody::Lexical { .. } => Err(Error::NotBinary(rule)),
    }
}

/// Number of combination points: φ(B) + φ(C) − φ(A).
pub fn delta(g: &Grammar, rule: usize) -> Result<usize> {
    let (a, b, c, _) = binary_parts(g, rule)?;
    Ok(g.fan_out(b) + g.fan_out(c) - g.fan_out(a))
}

pub fn rule_contact_rank(g: &Grammar, rule: usize) -> Result<usize> {
    let (_, b, c, _) = binary_parts(g, rule)?;
    let dl = delta(g, rule)?;
    let (fb, fc) = (g.fan_out(b), g.fan_out(c));
    Ok(dl.max(2 * fb - dl).max(2 * fc - dl))
}

/// Largest per-rule contact rank; 1 for grammars without binary rules.
pub fn contact_rank(g: &Grammar) -> usize {
    g.binary_rules()
        .map(|(i, _)| rule_contact_rank(g, i).unwrap())
        .max()
        .unwrap_or(1)
}

/// The same quantity written as max{φA+φB−φC, φA−φB+φC, −φA+φB+φC}.
pub fn contact_rank_three_term(g: &Grammar) -> usize {
    g.binary_rules()
        .map(|(i, _)| {
            let (a, b, c, _) = binary_parts(g, i).unwrap();
            let (fa, fb, fc) = (
                g.fan_out(a) as i64,
                g.fan_out(b) as i64,
                g.fan_out(c) as i64,
            );
            (fa + fb - fc).max(fa - fb + fc).max(-fa + fb + fc) as usize
        })
        .max()
        .unwrap_or(1)
}

/// max φ(A)+φ(B)+φ(C) over binary rules; the exponent of the tabular bound.
pub fn tabular_exponent(g: &Grammar) -> usize {
    g.binary_rules()
        .map(|(i, _)| {
            let (a, b, c, _) = binary_parts(g, i).unwrap();
            g.fan_out(a) + g.fan_out(b) + g.fan_out(c)
        })
        .max()
        .unwrap_or(1)
}

pub fn configurations(g: &Grammar, rule: usize) -> Result<ConfigTriple> {
    let (_, _, _, comp) = binary_parts(g, rule)?;
    let mut cfg1 = BTreeSet::new();
    let mut cfg2 = BTreeSet::new();
    let mut cfg3 = BTreeSet::new();
    for (t, tmpl) in comp.templates.iter().enumerate() {
        let n = tmpl.len();
        for (k, &v) in tmpl.iter().enumerate() {
            match v {
                Var::B(i) => {
                    if k == 0 {
                        cfg2.insert(2 * i - 1);
                    }
                    if k + 1 == n {
                        cfg2.insert(2 * i);
                    }
                }
                Var::C(i) => {
                    if k + 1 < n {
                        cfg3.insert(2 * i);
                    }
                    if k > 0 {
                        cfg3.insert(2 * i - 1);
                    }
                }
            }
        }
        if tmpl.first().is_some_and(|v| v.is_b()) {
            cfg1.insert(2 * (t + 1) - 1);
        }
        if tmpl.last().is_some_and(|v| v.is_b()) {
            cfg1.insert(2 * (t + 1));
        }
    }
    Ok(ConfigTriple {
        cfg1: cfg1.into_iter().collect(),
        cfg2: cfg2.into_iter().collect(),
        cfg3: cfg3.into_iter().collect(),
    })
}

/// Every configuration in which `a` is produced or consumed.
pub fn config_set(g: &Grammar, a: NtId) -> BTreeSet<Config> {
    let mut out = BTreeSet::new();
    for (i, r) in g.binary_rules() {
        let t = configurations(g, i).unwrap();
        if r.lhs == a {
            out.insert(t.cfg1.clone());
        }
        if let RuleBody::Binary { rhs1, rhs2, .. } = r.body {
            if rhs1 == a {
                out.insert(t.cfg2.clone());
            }
            if rhs2 == a {
                out.insert(t.cfg3);
            }
        }
    }
    out
}

pub fn is_balanced(g: &Grammar) -> bool {
    let d = contact_rank(g);
    (0..g.nonterminals.len()).any(|b| g.fan_out(b) == d && config_set(g, b).len() > 1)
}

pub fn is_single_initial(g: &Grammar) -> bool {
    g.rules.iter().all(|r| match &r.body {
        RuleBody::Binary { composition, .. } => composition
            .templates
            .iter()
            .all(|t| t.first() != Some(&Var::C(1))),
        RuleBody::Lexical { .. } => true,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleAnalysis {
    pub rule: usize,
    pub text: String,
    pub delta: usize,
    pub contact_rank: usize,
    pub configurations: ConfigTriple,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub start: String,
    pub nonterminals: usize,
    pub rules: usize,
    pub fan_out: usize,
    pub contact_rank: usize,
    pub tabular_exponent: usize,
    pub balanced: bool,
    pub single_initial: bool,
    pub omega: f64,
    pub predicted_matmul_exponent: f64,
    pub per_rule: Vec<RuleAnalysis>,
    pub config_sets: BTreeMap<String, Vec<Config>>,
}

impl AnalysisReport {
    pub fn new(g: &Grammar, omega: f64) -> Self {
        let d = contact_rank(g);
        let balanced = is_balanced(g);
        let per_rule = g
            .binary_rules()
            .map(|(i, r)| RuleAnalysis {
                rule: i,
                text: g.rule_to_string(r),
                delta: delta(g, i).unwrap(),
                contact_rank: rule_contact_rank(g, i).unwrap(),
                configurations: configurations(g, i).unwrap(),
            })
            .collect();
        let config_sets = (0..g.nonterminals.len())
            .map(|a| (g.name(a).to_string(), config_set(g, a).into_iter().collect()))
            .collect();
        AnalysisReport {
            start: g.name(g.start).to_string(),
            nonterminals: g.nonterminals.len(),
            rules: g.rules.len(),
            fan_out: g.max_fan_out(),
            contact_rank: d,
            tabular_exponent: tabular_exponent(g),
            balanced,
            single_initial: is_single_initial(g),
            omega,
            predicted_matmul_exponent: omega * d as f64 + if balanced { 1.0 } else { 0.0 },
            per_rule,
            config_sets,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("start symbol        {}\n", self.start));
        s.push_str(&format!("nonterminals        {}\n", self.nonterminals));
        s.push_str(&format!("rules               {}\n", self.rules));
        s.push_str(&format!("fan-out             {}\n", self.fan_out));
        s.push_str(&format!("contact rank        {}\n", self.contact_rank));
        s.push_str(&format!("balanced            {}\n", self.balanced));
        s.push_str(&format!("single-initial      {}\n", self.single_initial));
        s.push_str(&format!(
            "matmul exponent     {:.4} (omega = {})\n",
            self.predicted_matmul_exponent, self.omega
        ));
        s.push_str(&format!("tabular exponent    {}\n", self.tabular_exponent));
        for r in &self.per_rule {
            s.push_str(&format!(
                "  [{}] {}  delta={} d={} cfg1={:?} cfg2={:?} cfg3={:?}\n",
                r.rule,
                r.text,
                r.delta,
                r.contact_rank,
                r.configurations.cfg1,
                r.configurations.cfg2,
                r.configurations.cfg3
            ));
        }
        for (nt, cs) in &self.config_sets {
            if !cs.is_empty() {
                s.push_str(&format!("  config({nt}) = {cs:?}\n"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    #[test]
    fn cfg_rule() {
        let g = parse_grammar("start S\nS -> A B : b1 g1\nA -> : 'a'\nB -> : 'b'\n").unwrap();
        assert_eq!(delta(&g, 0).unwrap(), 1);
        assert_eq!(contact_rank(&g), 1);
        let t = configurations(&g, 0).unwrap();
        assert_eq!(t.cfg1, vec![1]);
        assert_eq!(t.cfg2, vec![1]);
        assert_eq!(t.cfg3, vec![1]);
        assert!(!is_balanced(&g));
        assert!(matches!(delta(&g, 1), Err(Error::NotBinary(1))));
    }

    #[test]
    fn lexical_only_grammar_has_rank_one() {
        let g = parse_grammar("S -> : 'a' 'b'\n").unwrap();
        assert_eq!(contact_rank(&g), 1);
        assert_eq!(contact_rank_three_term(&g), 1);
    }

    #[test]
    fn wrapping_rule() {
        let g = parse_grammar(
            "start S\nS -> A Z : b1 g1 b2\nA -> : 'a' , 'b'\nZ -> : 'e'\n",
        )
        .unwrap();
        let t = configurations(&g, 0).unwrap();
        assert_eq!(t.cfg1, vec![1, 2]);
        assert_eq!(t.cfg2, vec![1, 4]);
        assert_eq!(t.cfg3, vec![1, 2]);
        assert_eq!(rule_contact_rank(&g, 0).unwrap(), 2);
    }
}

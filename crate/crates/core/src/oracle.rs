//! Independent recognizers used to check the matrix engine: an agenda-driven
//! tabular parser and a bounded enumeration of the language.

use std::collections::{BTreeSet, HashSet};

use crate::address::Span;
use crate::error::{Error, Result};
use crate::grammar::{Composition, Grammar, NtId, RuleBody, Var};

pub type Item = (NtId, Vec<Span>);

pub struct Chart {
    pub items: HashSet<Item>,
    pub n: usize,
    pub start: NtId,
}

impl Chart {
    pub fn accepted(&self) -> bool {
        self.items.contains(&(self.start, vec![(0, self.n as u32)]))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn place(
    strings: &[Vec<String>],
    sentence: &[String],
    from: usize,
    cur: &mut Vec<Span>,
    out: &mut Vec<Vec<Span>>,
) {
    let Some(s) = strings.first() else {
        out.push(cur.clone());
        return;
    };
    for l in from..=sentence.len() {
        let r = l + s.len();
        if r <= sentence.len() && sentence[l..r] == s[..] {
            cur.push((l as u32, r as u32));
            place(&strings[1..], sentence, r, cur, out);
            cur.pop();
        }
    }
}

/// Spans of the left-hand side, or `None` if the children do not fit.
pub fn compose_spans(comp: &Composition, b: &[Span], c: &[Span]) -> Option<Vec<Span>> {
    let mut out = Vec::with_capacity(comp.templates.len());
    for t in &comp.templates {
        let get = |v: &Var| match v {
            Var::B(i) => b[i - 1],
            Var::C(i) => c[i - 1],
        };
        let mut span = get(&t[0]);
        for v in &t[1..] {
            let s = get(v);
            if s.0 != span.1 {
                return None;
            }
            span.1 = s.1;
        }
        if let Some(prev) = out.last() {
            let prev: &Span = prev;
            if prev.1 > span.0 {
                return None;
            }
        }
        out.push(span);
    }
    Some(out)
}

/// Every item derivable over `sentence`.
pub fn tabular_recognize(g: &Grammar, sentence: &[String]) -> Chart {
    let mut chart: HashSet<Item> = HashSet::new();
    let mut agenda: Vec<Item> = Vec::new();
    for r in &g.rules {
        if let RuleBody::Lexical { strings } = &r.body {
            let mut placements = Vec::new();
            place(strings, sentence, 0, &mut Vec::new(), &mut placements);
            for p in placements {
                let it = (r.lhs, p);
                if chart.insert(it.clone()) {
                    agenda.push(it);
                }
            }
        }
    }
    let binary: Vec<(NtId, NtId, NtId, &Composition)> = g
        .rules
        .iter()
        .filter_map(|r| match &r.body {
            RuleBody::Binary {
                rhs1,
                rhs2,
                composition,
            } => Some((r.lhs, *rhs1, *rhs2, composition)),
            _ => None,
        })
        .collect();
    let mut done: Vec<Vec<Vec<Span>>> = vec![Vec::new(); g.nonterminals.len()];
    while let Some((x, sp)) = agenda.pop() {
        done[x].push(sp.clone());
        let mut fresh = Vec::new();
        for &(a, b, c, comp) in &binary {
            if b == x {
                for other in &done[c] {
                    if let Some(s) = compose_spans(comp, &sp, other) {
                        fresh.push((a, s));
                    }
                }
            }
            if c == x {
                for other in &done[b] {
                    if let Some(s) = compose_spans(comp, other, &sp) {
                        fresh.push((a, s));
                    }
                }
            }
        }
        for it in fresh {
            if chart.insert(it.clone()) {
                agenda.push(it);
            }
        }
    }
    Chart {
        items: chart,
        n: sentence.len(),
        start: g.start,
    }
}

pub const MAX_ENUMERATION_LENGTH: usize = 12;

type Tuple = Vec<Vec<String>>;

/// All strings of the language with at most `max_len` tokens.
pub fn enumerate_language(g: &Grammar, max_len: usize) -> Result<BTreeSet<Vec<String>>> {
    if max_len > MAX_ENUMERATION_LENGTH {
        return Err(Error::Limit(format!(
            "enumeration length {max_len} exceeds {MAX_ENUMERATION_LENGTH}"
        )));
    }
    let size = |t: &Tuple| t.iter().map(|s| s.len()).sum::<usize>();
    let mut yields: Vec<HashSet<Tuple>> = vec![HashSet::new(); g.nonterminals.len()];
    loop {
        let mut changed = false;
        for r in &g.rules {
            let new: Vec<Tuple> = match &r.body {
                RuleBody::Lexical { strings } => {
                    if size(strings) <= max_len {
                        vec![strings.clone()]
                    } else {
                        vec![]
                    }
                }
                RuleBody::Binary {
                    rhs1,
                    rhs2,
                    composition,
                } => {
                    let mut v = Vec::new();
                    for b in &yields[*rhs1] {
                        for c in &yields[*rhs2] {
                            if size(b) + size(c) > max_len {
                                continue;
                            }
                            let t: Tuple = composition
                                .templates
                                .iter()
                                .map(|tm| {
                                    tm.iter()
                                        .flat_map(|v| match v {
                                            Var::B(i) => b[i - 1].iter(),
                                            Var::C(i) => c[i - 1].iter(),
                                        })
                                        .cloned()
                                        .collect()
                                })
                                .collect();
                            v.push(t);
                        }
                    }
                    v
                }
            };
            for t in new {
                changed |= yields[r.lhs].insert(t);
            }
        }
        if !changed {
            break;
        }
    }
    Ok(yields[g.start]
        .iter()
        .map(|t| t[0].clone())
        .collect())
}

//! Random members of a grammar's language with a prescribed length.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grammar::{Composition, Grammar, NtId, RuleBody, Var};

type Lengths = Vec<usize>;

/// Component lengths reachable by each nonterminal, up to a total bound.
pub struct LengthTable {
    max_total: usize,
    sets: Vec<HashSet<Lengths>>,
}

fn compose(comp: &Composition, b: &[usize], c: &[usize]) -> Lengths {
    comp.templates
        .iter()
        .map(|t| {
            t.iter()
                .map(|v| match v {
                    Var::B(i) => b[i - 1],
                    Var::C(i) => c[i - 1],
                })
                .sum()
        })
        .collect()
}

impl LengthTable {
    pub fn new(g: &Grammar, max_total: usize) -> LengthTable {
        let mut sets: Vec<HashSet<Lengths>> = vec![HashSet::new(); g.nonterminals.len()];
        loop {
            let mut changed = false;
            for r in &g.rules {
                let fresh: Vec<Lengths> = match &r.body {
                    RuleBody::Lexical { strings } => vec![strings.iter().map(|s| s.len()).collect()],
                    RuleBody::Binary {
                        rhs1,
                        rhs2,
                        composition,
                    } => {
                        let mut v = Vec::new();
                        for b in &sets[*rhs1] {
                            let sb: usize = b.iter().sum();
                            for c in &sets[*rhs2] {
                                if sb + c.iter().sum::<usize>() <= max_total {
                                    v.push(compose(composition, b, c));
                                }
                            }
                        }
                        v
                    }
                };
                for l in fresh {
                    if l.iter().sum::<usize>() <= max_total {
                        changed |= sets[r.lhs].insert(l);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        LengthTable { max_total, sets }
    }

    /// Sentence lengths of the language up to the bound, ascending.
    pub fn sentence_lengths(&self, g: &Grammar) -> Vec<usize> {
        let mut v: Vec<usize> = self.sets[g.start].iter().map(|l| l[0]).collect();
        v.sort_unstable();
        v
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }
}

const MAX_DEPTH: usize = 512;

fn generate<R: Rng>(
    g: &Grammar,
    table: &LengthTable,
    a: NtId,
    lens: &[usize],
    rng: &mut R,
    depth: usize,
) -> Option<Vec<Vec<String>>> {
    if depth > MAX_DEPTH {
        return None;
    }
    enum Choice<'a> {
        Lex(&'a Vec<Vec<String>>),
        Bin(NtId, NtId, &'a Composition, &'a Lengths, &'a Lengths),
    }
    let mut options = Vec::new();
    for r in g.rules.iter().filter(|r| r.lhs == a) {
        match &r.body {
            RuleBody::Lexical { strings } => {
                if strings.iter().map(|s| s.len()).eq(lens.iter().copied()) {
                    options.push(Choice::Lex(strings));
                }
            }
            RuleBody::Binary {
                rhs1,
                rhs2,
                composition,
            } => {
                for b in &table.sets[*rhs1] {
                    for c in &table.sets[*rhs2] {
                        if compose(composition, b, c) == lens {
                            options.push(Choice::Bin(*rhs1, *rhs2, composition, b, c));
                        }
                    }
                }
            }
        }
    }
    match options.choose(rng)? {
        Choice::Lex(s) => Some((*s).clone()),
        Choice::Bin(b, c, comp, bl, cl) => {
            let ys = generate(g, table, *b, bl, rng, depth + 1)?;
            let zs = generate(g, table, *c, cl, rng, depth + 1)?;
            Some(
                comp.templates
                    .iter()
                    .map(|t| {
                        t.iter()
                            .flat_map(|v| match v {
                                Var::B(i) => ys[i - 1].iter(),
                                Var::C(i) => zs[i - 1].iter(),
                            })
                            .cloned()
                            .collect()
                    })
                    .collect(),
            )
        }
    }
}

/// A random sentence of exactly `n` tokens, if the language has one.
pub fn sample_sentence<R: Rng>(g: &Grammar, table: &LengthTable, n: usize, rng: &mut R) -> Option<Vec<String>> {
    if n > table.max_total || !table.sets[g.start].contains(&vec![n]) {
        return None;
    }
    (0..16).find_map(|_| generate(g, table, g.start, &[n], rng, 0).map(|mut t| t.remove(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;
    use crate::oracle::tabular_recognize;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn anbn_lengths_are_even() {
        let g = parse_grammar(
            "start S\nS -> A B : b1 g1\nS -> A T : b1 g1\nT -> S B : b1 g1\nA -> : 'a'\nB -> : 'b'\n",
        )
        .unwrap();
        let t = LengthTable::new(&g, 9);
        assert_eq!(t.sentence_lengths(&g), vec![2, 4, 6, 8]);
        let mut rng = StdRng::seed_from_u64(1);
        assert!(sample_sentence(&g, &t, 5, &mut rng).is_none());
        let s = sample_sentence(&g, &t, 8, &mut rng).unwrap();
        assert_eq!(s.join(" "), "a a a a b b b b");
    }

    #[test]
    fn samples_are_members() {
        let g = parse_grammar(
            "start S\nS -> A B : b1 g1 b2 g2\nA -> X A : b1 g1 , g2 b2\nA -> : 'a' , 'c'\nB -> : 'b' , 'd'\nB -> Y B : b1 g1 , g2 b2\nX -> : 'a' , 'c'\nY -> : 'b' , 'd'\n",
        )
        .unwrap();
        let t = LengthTable::new(&g, 10);
        let mut rng = StdRng::seed_from_u64(7);
        for n in [4, 6, 8, 10] {
            let s = sample_sentence(&g, &t, n, &mut rng).unwrap();
            assert_eq!(s.len(), n);
            assert!(tabular_recognize(&g, &s).accepted());
        }
    }
}

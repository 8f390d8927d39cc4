#![allow(dead_code)]

use lcfrs_core::address::{merge_m, merged_endpoints, Address};
use lcfrs_core::grammar::{parse_grammar, Grammar};
use lcfrs_core::matrix::{pi_copy, CellSymbol, Context, CopySymbol, ProductMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

/// Every string over `alpha` with at most `max` tokens, shortest first.
pub fn all_strings(alpha: &[String], max: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for a in alpha {
                let mut t = s.clone();
                t.push(a.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub struct Shape {
    pub nonterminals: usize,
    pub max_fan_out: usize,
    pub binary_rules: usize,
    pub terminals: &'static [&'static str],
    /// Allow a template other than the first to start with the second child.
    pub dual_initial: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            nonterminals: 4,
            max_fan_out: 2,
            binary_rules: 5,
            terminals: &["a", "b"],
            dual_initial: false,
        }
    }
}

fn composition<R: Rng>(rng: &mut R, fa: usize, fb: usize, fc: usize, dual: bool) -> Option<String> {
    let (mut nb, mut nc) = (1, 0);
    let mut seq = vec![(true, 1)];
    while nb < fb || nc < fc {
        let take_b = if nb == fb {
            false
        } else if nc == fc {
            true
        } else {
            rng.gen_bool(0.5)
        };
        if take_b {
            nb += 1;
            seq.push((true, nb));
        } else {
            nc += 1;
            seq.push((false, nc));
        }
    }
    let gaps = seq.len() - 1;
    let forced: Vec<usize> = (0..gaps).filter(|&g| seq[g].0 == seq[g + 1].0).collect();
    if forced.len() + 1 > fa || fa > seq.len() {
        return None;
    }
    let mut free: Vec<usize> = (0..gaps).filter(|g| !forced.contains(g)).collect();
    free.shuffle(rng);
    let mut cuts: Vec<usize> = forced;
    cuts.extend(free.into_iter().take(fa - 1 - cuts.len()));
    cuts.sort_unstable();
    if !dual && cuts.iter().any(|&g| seq[g + 1] == (false, 1)) {
        return None;
    }
    let mut out = String::new();
    for (k, &(is_b, i)) in seq.iter().enumerate() {
        out.push_str(if is_b { "b" } else { "g" });
        out.push_str(&i.to_string());
        if k + 1 < seq.len() {
            out.push_str(if cuts.contains(&k) { " , " } else { " " });
        }
    }
    Some(out)
}

/// Source text of a random valid grammar in binary normal form.
pub fn random_grammar_text<R: Rng>(rng: &mut R, shape: &Shape) -> String {
    let names: Vec<String> = std::iter::once("S".to_string())
        .chain((1..shape.nonterminals).map(|i| format!("N{i}")))
        .collect();
    let fan: Vec<usize> = (0..names.len())
        .map(|i| if i == 0 { 1 } else { rng.gen_range(1..=shape.max_fan_out) })
        .collect();
    let mut text = String::from("start S\n");
    for (i, name) in names.iter().enumerate() {
        let strings: Vec<String> = (0..fan[i])
            .map(|_| {
                let len = if rng.gen_bool(0.8) { 1 } else { 2 };
                (0..len)
                    .map(|_| format!("'{}'", shape.terminals.choose(rng).unwrap()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        text.push_str(&format!("{name} -> : {}\n", strings.join(" , ")));
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < shape.binary_rules && attempts < 200 * shape.binary_rules {
        attempts += 1;
        let (a, b, c) = (
            rng.gen_range(0..names.len()),
            rng.gen_range(0..names.len()),
            rng.gen_range(0..names.len()),
        );
        if let Some(comp) = composition(rng, fan[a], fan[b], fan[c], shape.dual_initial) {
            text.push_str(&format!("{} -> {} {} : {comp}\n", names[a], names[b], names[c]));
            added += 1;
        }
    }
    text
}

pub fn random_grammar<R: Rng>(rng: &mut R, shape: &Shape) -> Grammar {
    let text = random_grammar_text(rng, shape);
    parse_grammar(&text).unwrap_or_else(|e| panic!("generated grammar is invalid: {e}\n{text}"))
}

pub fn random_sentence<R: Rng>(rng: &mut R, alpha: &[&str], max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| alpha.choose(rng).unwrap().to_string()).collect()
}

/// Counts of structural properties of one matrix.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Structure {
    /// Cells holding a nonterminal with row >= col.
    pub nt_below: usize,
    /// Cells holding a copy symbol with row >= col.
    pub copy_below: usize,
    /// Cells holding a nonterminal whose row minimum exceeds the column
    /// minimum (an empty address counts as +inf).
    pub block_violations: usize,
    /// Nonempty cells with more than one mark across row and column.
    pub double_marks: usize,
    /// Nonterminal facts at defined m(i, j) with row >= col.
    pub facts_below: usize,
    /// Entries Π would add for facts with distinct endpoints, over
    /// nonterminals with fan-out below the address length.
    pub missing_copies: usize,
    /// Entries Π would add for facts whose spans touch.
    pub missing_touching: usize,
}

impl Structure {
    pub fn add(&mut self, o: Structure) {
        self.nt_below += o.nt_below;
        self.copy_below += o.copy_below;
        self.block_violations += o.block_violations;
        self.double_marks += o.double_marks;
        self.facts_below += o.facts_below;
        self.missing_copies += o.missing_copies;
        self.missing_touching += o.missing_touching;
    }
}

fn min_or_inf(a: &Address) -> u32 {
    Address::min(a).unwrap_or(u32::MAX)
}

pub fn structure(ctx: &Context, x: &ProductMatrix, copies: bool) -> Structure {
    let mut s = Structure::default();
    let size = x.size();
    let mut with_nt = vec![false; size * size];
    let mut with_copy = vec![false; size * size];
    for a in 0..x.num_nonterminals() {
        for (i, j) in x.nt_layer(a).ones() {
            with_nt[i * size + j] = true;
            if i >= j && merge_m(ctx.addr(i), ctx.addr(j)).is_some() {
                s.facts_below += 1;
            }
        }
    }
    for sym in CopySymbol::ALL {
        for (i, j) in x.layer(CellSymbol::Copy(sym)).ones() {
            with_copy[i * size + j] = true;
        }
    }
    for i in 0..size {
        for j in 0..size {
            let (nt, cp) = (with_nt[i * size + j], with_copy[i * size + j]);
            if !nt && !cp {
                continue;
            }
            let (ai, aj) = (ctx.addr(i), ctx.addr(j));
            if i >= j {
                s.nt_below += nt as usize;
                s.copy_below += cp as usize;
            }
            if nt && min_or_inf(ai) > min_or_inf(aj) {
                s.block_violations += 1;
            }
            if ai.is_marked() && aj.is_marked() {
                s.double_marks += 1;
            }
        }
    }
    if copies {
        let pi = pi_copy(ctx, x);
        let d = ctx.space.d();
        for a in (0..x.num_nonterminals()).filter(|&a| ctx.grammar.fan_out(a) < d) {
            for (i, j) in pi.nt_layer(a).ones() {
                if x.nt_layer(a).get(i, j) {
                    continue;
                }
                let e = merged_endpoints(ctx.addr(i), ctx.addr(j)).unwrap();
                if e.windows(2).any(|w| w[0] == w[1]) {
                    s.missing_touching += 1;
                } else {
                    s.missing_copies += 1;
                }
            }
        }
    }
    s
}

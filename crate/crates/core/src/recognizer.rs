//! Closures of the seed matrix and the two recognition procedures.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::address::{merge_m, Address, Span};
use crate::boolean::Backend;
use crate::error::{Error, Result};
use crate::grammar::{is_balanced, is_single_initial, to_single_initial, Grammar, NtId, RuleBody};
use crate::matrix::{matrix_product_block_into, pi_copy, seed, CellSymbol, Context, ProductMatrix};
use crate::oracle::{compose_spans, tabular_recognize};
use crate::reduction::product_block_into;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureAlgorithm {
    Fixpoint,
    Valiant,
}

impl ClosureAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosureAlgorithm::Fixpoint => "fixpoint",
            ClosureAlgorithm::Valiant => "valiant",
        }
    }
}

impl FromStr for ClosureAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixpoint" => Ok(ClosureAlgorithm::Fixpoint),
            "valiant" => Ok(ClosureAlgorithm::Valiant),
            _ => Err(format!("unknown closure `{s}` (fixpoint, valiant)")),
        }
    }
}

/// How one matrix product is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplier {
    /// Cell-by-cell products.
    Reference,
    /// Reduction to Boolean matrix products.
    Boolean(Backend),
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Reference => write!(f, "reference"),
            Multiplier::Boolean(b) => write!(f, "{}", b.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub multiplier: Multiplier,
    pub closure: ClosureAlgorithm,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            multiplier: Multiplier::Boolean(Backend::Bitset),
            closure: ClosureAlgorithm::Fixpoint,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    /// Matrix products (full or block) computed.
    pub products: usize,
    /// Boolean matrix multiplications performed inside them.
    pub multiplications: usize,
    /// Closure computations (more than one on the Π path).
    pub rounds: usize,
    pub matrix_size: usize,
    pub contact_rank: usize,
    pub facts: usize,
    pub elapsed_ms: f64,
}

fn product_into(
    ctx: &Context,
    m: Multiplier,
    t1: &ProductMatrix,
    t2: &ProductMatrix,
    rows: Range<usize>,
    mid: Range<usize>,
    cols: Range<usize>,
    out: &mut ProductMatrix,
    stats: &mut Stats,
) {
    stats.products += 1;
    match m {
        Multiplier::Reference => matrix_product_block_into(ctx, t1, t2, rows, mid, cols, out),
        Multiplier::Boolean(b) => {
            stats.multiplications += product_block_into(ctx, t1, t2, rows, mid, cols, b, out)
        }
    }
}

fn full_product(
    ctx: &Context,
    m: Multiplier,
    t1: &ProductMatrix,
    t2: &ProductMatrix,
    stats: &mut Stats,
) -> ProductMatrix {
    let n = t1.size();
    let mut out = ProductMatrix::zeros(n, t1.num_nonterminals());
    product_into(ctx, m, t1, t2, 0..n, 0..n, 0..n, &mut out, stats);
    out
}

/// Semi-naive saturation: `x` is closed except for products involving `delta`.
fn saturate(
    ctx: &Context,
    mut x: ProductMatrix,
    mut delta: ProductMatrix,
    m: Multiplier,
    stats: &mut Stats,
) -> ProductMatrix {
    while !delta.is_zero() {
        let mut new = full_product(ctx, m, &delta, &x, stats);
        new.union_with(&full_product(ctx, m, &x, &delta, stats));
        delta = new.difference(&x);
        x.union_with(&delta);
    }
    x
}

/// T⁺ as the least fixpoint of X = X ∪ X ⊗ X.
pub fn closure_fixpoint(ctx: &Context, t: &ProductMatrix, m: Multiplier, stats: &mut Stats) -> ProductMatrix {
    stats.rounds += 1;
    saturate(ctx, t.clone(), t.clone(), m, stats)
}

struct Dc<'a> {
    ctx: &'a Context,
    m: Multiplier,
    x: ProductMatrix,
    occ: crate::boolean::BoolMatrix,
    p: ProductMatrix,
    stats: &'a mut Stats,
}

fn halves(r: &Range<usize>) -> (Range<usize>, Range<usize>) {
    let mid = r.start + r.len() / 2;
    (r.start..mid, mid..r.end)
}

impl Dc<'_> {
    fn add(&mut self, rows: Range<usize>, mid: Range<usize>, cols: Range<usize>) {
        if !self.occ.any_in(rows.clone(), mid.clone()) || !self.occ.any_in(mid.clone(), cols.clone()) {
            return;
        }
        product_into(self.ctx, self.m, &self.x, &self.x, rows, mid, cols, &mut self.p, self.stats);
    }

    fn closure(&mut self, r: Range<usize>) {
        if r.len() <= 1 {
            return;
        }
        let (a, b) = halves(&r);
        self.closure(a.clone());
        self.closure(b.clone());
        self.complete(a, b);
    }

    /// Finalizes X[r, c] given final X[r, r] and X[c, c] and P[r, c]
    /// holding every product through indices strictly between r and c.
    fn complete(&mut self, r: Range<usize>, c: Range<usize>) {
        match (r.len() > 1, c.len() > 1) {
            (false, false) => {
                let (i, j) = (r.start, c.start);
                for a in 0..self.x.num_nonterminals() {
                    if self.p.nt_layer(a).get(i, j) && self.x.nt_layer_mut(a).set(i, j) {
                        self.occ.set(i, j);
                    }
                }
            }
            (true, false) => {
                let (r1, r2) = halves(&r);
                self.complete(r2.clone(), c.clone());
                self.add(r1.clone(), r2, c.clone());
                self.complete(r1, c);
            }
            (false, true) => {
                let (c1, c2) = halves(&c);
                self.complete(r.clone(), c1.clone());
                self.add(r.clone(), c1, c2.clone());
                self.complete(r, c2);
            }
            (true, true) => {
                let (r1, r2) = halves(&r);
                let (c1, c2) = halves(&c);
                self.complete(r2.clone(), c1.clone());
                self.add(r1.clone(), r2.clone(), c1.clone());
                self.complete(r1.clone(), c1.clone());
                self.add(r2.clone(), c1.clone(), c2.clone());
                self.complete(r2.clone(), c2.clone());
                self.add(r1.clone(), r2, c2.clone());
                self.add(r1.clone(), c1, c2.clone());
                self.complete(r1, c2);
            }
        }
    }
}

/// Divide-and-conquer closure over the upper triangle, alternated with a
/// full product so that copy symbols below the diagonal also take part.
pub fn closure_valiant(ctx: &Context, t: &ProductMatrix, m: Multiplier, stats: &mut Stats) -> ProductMatrix {
    stats.rounds += 1;
    let n = t.size();
    let mut x = t.clone();
    loop {
        let mut dc = Dc {
            ctx,
            m,
            occ: x.occupancy(),
            x,
            p: ProductMatrix::zeros(n, t.num_nonterminals()),
            stats,
        };
        dc.closure(0..n);
        x = dc.x;
        let p = full_product(ctx, m, &x, &x, stats);
        if !x.union_with(&p) {
            return x;
        }
    }
}

pub fn closure(ctx: &Context, t: &ProductMatrix, opts: Options, stats: &mut Stats) -> ProductMatrix {
    match opts.closure {
        ClosureAlgorithm::Fixpoint => closure_fixpoint(ctx, t, opts.multiplier, stats),
        ClosureAlgorithm::Valiant => closure_valiant(ctx, t, opts.multiplier, stats),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecognitionPath {
    /// Empty input, decided without a matrix.
    Empty,
    /// One closure of the seed matrix.
    Unbalanced,
    /// Closures alternated with Π until stable.
    General,
}

pub struct Recognition {
    pub accepted: bool,
    pub path: RecognitionPath,
    /// True if the grammar was rewritten to single-initial form first.
    pub converted: bool,
    pub stats: Stats,
    pub context: Option<Context>,
    pub matrix: Option<ProductMatrix>,
    pub grammar: Grammar,
}

impl fmt::Debug for Recognition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Recognition")
            .field("accepted", &self.accepted)
            .field("path", &self.path)
            .field("converted", &self.converted)
            .field("stats", &self.stats)
            .finish()
    }
}

impl Recognition {
    /// Every (nonterminal, spans) entry in the final matrix.
    pub fn facts(&self) -> HashSet<(NtId, Vec<Span>)> {
        match (&self.context, &self.matrix) {
            (Some(ctx), Some(x)) => matrix_facts(ctx, x),
            _ => HashSet::new(),
        }
    }
}

pub fn matrix_facts(ctx: &Context, x: &ProductMatrix) -> HashSet<(NtId, Vec<Span>)> {
    let mut out = HashSet::new();
    for a in 0..x.num_nonterminals() {
        for (i, j) in x.nt_layer(a).ones() {
            if let Some(m) = merge_m(ctx.addr(i), ctx.addr(j)) {
                if m.len() == ctx.grammar.fan_out(a) {
                    out.insert((a, m));
                }
            }
        }
    }
    out
}

fn start_cell(ctx: &Context) -> (usize, usize) {
    let n = ctx.sentence.len() as u32;
    let i = ctx.space.id(&Address::unmarked(&[0])).expect("(0) in space");
    let j = ctx.space.id(&Address::unmarked(&[n])).expect("(n) in space");
    (i, j)
}

fn accepts(ctx: &Context, x: &ProductMatrix) -> bool {
    let (i, j) = start_cell(ctx);
    x.contains(i, j, CellSymbol::Nt(ctx.grammar.start))
}

fn empty_input(g: &Grammar, converted: bool, start: Instant) -> Recognition {
    Recognition {
        accepted: g.nullable()[g.start],
        path: RecognitionPath::Empty,
        converted,
        stats: Stats {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            ..Stats::default()
        },
        context: None,
        matrix: None,
        grammar: g.clone(),
    }
}

fn finish(
    ctx: Context,
    x: ProductMatrix,
    path: RecognitionPath,
    converted: bool,
    mut stats: Stats,
    start: Instant,
) -> Recognition {
    stats.matrix_size = ctx.size();
    stats.contact_rank = ctx.space.d();
    stats.facts = x.fact_count();
    stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Recognition {
        accepted: accepts(&ctx, &x),
        path,
        converted,
        stats,
        grammar: ctx.grammar.clone(),
        context: Some(ctx),
        matrix: Some(x),
    }
}

/// Seed, one closure, then a lookup of the start symbol over the whole
/// input. The grammar must be single-initial and unbalanced.
pub fn recognize_unbalanced(g: &Grammar, sentence: &[String], opts: Options) -> Result<Recognition> {
    if is_balanced(g) {
        return Err(Error::Precondition("grammar is balanced".into()));
    }
    run_unbalanced(g, sentence, opts, false)
}

fn run_unbalanced(g: &Grammar, sentence: &[String], opts: Options, converted: bool) -> Result<Recognition> {
    let t0 = Instant::now();
    if sentence.is_empty() {
        return Ok(empty_input(g, converted, t0));
    }
    let ctx = Context::new(g, sentence)?;
    let mut stats = Stats::default();
    let x = closure(&ctx, &seed(&ctx), opts, &mut stats);
    Ok(finish(ctx, x, RecognitionPath::Unbalanced, converted, stats, t0))
}

/// Alternates closure with Π until the matrix stops changing. Works for
/// any single-initial grammar without ε-deriving nonterminals.
pub fn recognize_general(g: &Grammar, sentence: &[String], opts: Options) -> Result<Recognition> {
    run_general(g, sentence, opts, false)
}

fn run_general(g: &Grammar, sentence: &[String], opts: Options, converted: bool) -> Result<Recognition> {
    let t0 = Instant::now();
    if sentence.is_empty() {
        return Ok(empty_input(g, converted, t0));
    }
    let null = g.nullable();
    if let Some(a) = null.iter().position(|&b| b) {
        return Err(Error::Precondition(format!(
            "{} derives only empty strings, which the matrix engine cannot place (use the tabular engine)",
            g.name(a)
        )));
    }
    let ctx = Context::new(g, sentence)?;
    let mut stats = Stats::default();
    let mut x = closure(&ctx, &pi_copy(&ctx, &seed(&ctx)), opts, &mut stats);
    loop {
        let pi = pi_copy(&ctx, &x);
        if pi.fact_count() == x.fact_count() {
            debug_assert!(pi == x);
            break;
        }
        x = match opts.closure {
            ClosureAlgorithm::Fixpoint => {
                stats.rounds += 1;
                let delta = pi.difference(&x);
                saturate(&ctx, pi, delta, opts.multiplier, &mut stats)
            }
            ClosureAlgorithm::Valiant => closure_valiant(&ctx, &pi, opts.multiplier, &mut stats),
        };
    }
    Ok(finish(ctx, x, RecognitionPath::General, converted, stats, t0))
}

/// Converts to single-initial form if needed, then picks the single-closure
/// path for unbalanced grammars without empty spans and the Π path otherwise.
pub fn recognize(g: &Grammar, sentence: &[String], opts: Options) -> Result<Recognition> {
    let (g, converted) = if is_single_initial(g) {
        (g.clone(), false)
    } else {
        (to_single_initial(g)?, true)
    };
    if !is_balanced(&g) && !g.has_empty_spans() {
        run_unbalanced(&g, sentence, opts, converted)
    } else {
        run_general(&g, sentence, opts, converted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationNode {
    pub nonterminal: String,
    pub rule: usize,
    pub spans: Vec<Span>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    /// Tokens placed by the leaves, by position; `None` where no leaf covers.
    pub fn yield_tokens(&self, n: usize) -> Vec<Option<String>> {
        let mut out = vec![None; n];
        self.fill(&mut out);
        out
    }

    fn fill(&self, out: &mut [Option<String>]) {
        if let Some(ts) = &self.terminals {
            for (s, toks) in self.spans.iter().zip(ts) {
                for (k, t) in toks.iter().enumerate() {
                    out[s.0 as usize + k] = Some(t.clone());
                }
            }
        }
        for c in &self.children {
            c.fill(out);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }
}

fn splits(l: u32, r: u32, parts: usize, cur: &mut Vec<Span>, out: &mut Vec<Vec<Span>>) {
    if parts == 1 {
        cur.push((l, r));
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for p in l..=r {
        cur.push((l, p));
        splits(p, r, parts - 1, cur, out);
        cur.pop();
    }
}

struct Extractor<'a> {
    g: &'a Grammar,
    sentence: &'a [String],
    facts: &'a HashSet<(NtId, Vec<Span>)>,
    stack: HashSet<(NtId, Vec<Span>)>,
}

impl Extractor<'_> {
    fn build(&mut self, a: NtId, spans: &[Span]) -> Option<DerivationNode> {
        let key = (a, spans.to_vec());
        if !self.stack.insert(key.clone()) {
            return None;
        }
        let found = self.try_rules(a, spans);
        self.stack.remove(&key);
        found
    }

    fn try_rules(&mut self, a: NtId, spans: &[Span]) -> Option<DerivationNode> {
        let g = self.g;
        for (idx, r) in g.rules.iter().enumerate().filter(|(_, r)| r.lhs == a) {
            match &r.body {
                RuleBody::Lexical { strings } => {
                    let ok = strings.iter().zip(spans).all(|(s, &(l, rr))| {
                        (rr - l) as usize == s.len() && self.sentence[l as usize..rr as usize] == s[..]
                    });
                    if ok {
                        return Some(DerivationNode {
                            nonterminal: g.name(a).to_string(),
                            rule: idx,
                            spans: spans.to_vec(),
                            terminals: Some(strings.clone()),
                            children: vec![],
                        });
                    }
                }
                RuleBody::Binary {
                    rhs1,
                    rhs2,
                    composition,
                } => {
                    let mut per_template: Vec<Vec<Vec<Span>>> = Vec::new();
                    for (t, &(l, rr)) in composition.templates.iter().zip(spans) {
                        let mut out = Vec::new();
                        splits(l, rr, t.len(), &mut Vec::new(), &mut out);
                        per_template.push(out);
                    }
                    let mut choice = vec![0usize; per_template.len()];
                    loop {
                        let mut b = vec![(0, 0); g.fan_out(*rhs1)];
                        let mut c = vec![(0, 0); g.fan_out(*rhs2)];
                        for (t, tmpl) in composition.templates.iter().enumerate() {
                            for (v, &s) in tmpl.iter().zip(&per_template[t][choice[t]]) {
                                match v {
                                    crate::grammar::Var::B(i) => b[i - 1] = s,
                                    crate::grammar::Var::C(i) => c[i - 1] = s,
                                }
                            }
                        }
                        if compose_spans(composition, &b, &c).as_deref() == Some(spans)
                            && self.facts.contains(&(*rhs1, b.clone()))
                            && self.facts.contains(&(*rhs2, c.clone()))
                        {
                            if let Some(left) = self.build(*rhs1, &b) {
                                if let Some(right) = self.build(*rhs2, &c) {
                                    return Some(DerivationNode {
                                        nonterminal: g.name(a).to_string(),
                                        rule: idx,
                                        spans: spans.to_vec(),
                                        terminals: None,
                                        children: vec![left, right],
                                    });
                                }
                            }
                        }
                        let mut k = 0;
                        loop {
                            if k == choice.len() {
                                break;
                            }
                            choice[k] += 1;
                            if choice[k] < per_template[k].len() {
                                break;
                            }
                            choice[k] = 0;
                            k += 1;
                        }
                        if k == choice.len() {
                            break;
                        }
                    }
                }
            }
        }
        None
    }
}

/// A derivation of the whole input built from facts in the final matrix.
/// An accepted input without a reconstructible derivation is an engine bug
/// and is reported as an error.
pub fn extract_derivation(rec: &Recognition) -> Result<Option<DerivationNode>> {
    if !rec.accepted {
        return Ok(None);
    }
    let found = build_derivation(rec);
    match found {
        Some(d) => Ok(Some(d)),
        None => Err(Error::Internal("accepted input has no derivation in the chart".into())),
    }
}

fn build_derivation(rec: &Recognition) -> Option<DerivationNode> {
    match &rec.context {
        None => {
            let chart = tabular_recognize(&rec.grammar, &[]);
            derive(&rec.grammar, &[], &chart.items)
        }
        Some(ctx) => derive(&rec.grammar, &ctx.sentence, &rec.facts()),
    }
}

/// A derivation of the whole sentence using only items from `facts`.
pub fn derive(
    g: &Grammar,
    sentence: &[String],
    facts: &HashSet<(NtId, Vec<Span>)>,
) -> Option<DerivationNode> {
    let mut ex = Extractor {
        g,
        sentence,
        facts,
        stack: HashSet::new(),
    };
    ex.build(g.start, &[(0, sentence.len() as u32)])
}

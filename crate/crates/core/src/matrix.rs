//! The recognition matrix: cells indexed by address pairs, holding sets of
//! nonterminals and copy symbols, with the cell product that combines them.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use crate::address::{merged_endpoints, Address, AddressSpace, MarkedIndex};
use crate::boolean::BoolMatrix;
use crate::error::{Error, Result};
use crate::reduction::Masks;
use crate::grammar::{
    configurations, contact_rank, is_single_initial, Config, Grammar, NtId, RuleBody,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CopySymbol {
    FromRow,
    ToCol,
    UnmarkCol,
    ToRow,
    FromCol,
    UnmarkRow,
}

impl CopySymbol {
    pub const ALL: [CopySymbol; 6] = [
        CopySymbol::FromRow,
        CopySymbol::ToCol,
        CopySymbol::UnmarkCol,
        CopySymbol::ToRow,
        CopySymbol::FromCol,
        CopySymbol::UnmarkRow,
    ];

    pub fn offset(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CopySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellSymbol {
    Nt(NtId),
    Copy(CopySymbol),
}

/// A binary rule with its three configurations precomputed.
#[derive(Clone, Debug)]
pub struct RuleInfo {
    pub rule: usize,
    pub lhs: NtId,
    pub rhs1: NtId,
    pub rhs2: NtId,
    pub cfg1: Config,
    pub cfg2: Config,
    pub cfg3: Config,
}

/// Largest address space a context will allocate matrices for.
pub const MAX_ADDRESSES: usize = 8192;

/// Everything fixed for one (grammar, sentence) pair.
pub struct Context {
    pub grammar: Grammar,
    pub sentence: Vec<String>,
    pub space: AddressSpace,
    pub rules: Vec<RuleInfo>,
    pub(crate) by_pair: HashMap<(NtId, NtId), Vec<usize>>,
    masks: OnceLock<Masks>,
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context(n={}, {:?})", self.sentence.len(), self.space)
    }
}

impl Context {
    /// The grammar must be single-initial; the address space uses its
    /// contact rank.
    pub fn new(grammar: &Grammar, sentence: &[String]) -> Result<Context> {
        if !is_single_initial(grammar) {
            return Err(Error::NotSingleInitial);
        }
        let d = contact_rank(grammar);
        Self::with_rank(grammar, sentence, d)
    }

    pub fn with_rank(grammar: &Grammar, sentence: &[String], d: usize) -> Result<Context> {
        let space = AddressSpace::new(sentence.len(), d);
        if space.len() > MAX_ADDRESSES {
            return Err(Error::Limit(format!(
                "{} addresses for n = {}, d = {d} (at most {MAX_ADDRESSES})",
                space.len(),
                sentence.len()
            )));
        }
        let mut rules = Vec::new();
        let mut by_pair: HashMap<(NtId, NtId), Vec<usize>> = HashMap::new();
        for (i, r) in grammar.binary_rules() {
            if let RuleBody::Binary { rhs1, rhs2, .. } = r.body {
                let t = configurations(grammar, i)?;
                by_pair.entry((rhs1, rhs2)).or_default().push(rules.len());
                rules.push(RuleInfo {
                    rule: i,
                    lhs: r.lhs,
                    rhs1,
                    rhs2,
                    cfg1: t.cfg1,
                    cfg2: t.cfg2,
                    cfg3: t.cfg3,
                });
            }
        }
        Ok(Context {
            grammar: grammar.clone(),
            sentence: sentence.to_vec(),
            space,
            rules,
            by_pair,
            masks: OnceLock::new(),
        })
    }

    pub fn num_nonterminals(&self) -> usize {
        self.grammar.nonterminals.len()
    }

    pub fn size(&self) -> usize {
        self.space.len()
    }

    pub fn addr(&self, id: usize) -> &Address {
        self.space.addr(id)
    }

    pub fn masks(&self) -> &Masks {
        self.masks.get_or_init(|| Masks::new(self))
    }
}

/// Row i and column j produce m(i, j) with 2·fan_out endpoints, and the
/// row holds exactly the endpoints numbered in `cfg`.
pub fn config_matches(i: &Address, j: &Address, cfg: &[usize], fan_out: usize) -> bool {
    if i.len() != cfg.len() || i.len() + j.len() != 2 * fan_out {
        return false;
    }
    let Some(e) = merged_endpoints(i, j) else {
        return false;
    };
    cfg.iter().zip(i.items()).all(|(&q, m)| e[q - 1] == m.pos)
}

fn has_plain(a: &Address, x: u32) -> bool {
    a.contains(MarkedIndex::plain(x))
}

pub fn to_col_post(i: &Address, j: &Address) -> bool {
    !i.is_marked() && j.mark().is_some_and(|x| has_plain(i, x))
}

pub fn from_row_post(i: &Address, j: &Address) -> bool {
    j.mark().is_some_and(|x| !i.items().iter().any(|m| m.pos == x))
}

pub fn to_row_post(i: &Address, j: &Address) -> bool {
    !j.is_marked() && i.mark().is_some_and(|x| has_plain(j, x))
}

pub fn from_col_post(i: &Address, j: &Address) -> bool {
    i.mark().is_some_and(|x| !j.items().iter().any(|m| m.pos == x))
}

pub fn unmark_post(i: &Address, j: &Address, fan_out: usize) -> bool {
    i.len() + j.len() == 2 * fan_out
}

/// Layered Boolean storage: one matrix per nonterminal, then one per copy
/// symbol in [`CopySymbol::ALL`] order.
#[derive(Clone, PartialEq, Eq)]
pub struct ProductMatrix {
    size: usize,
    nts: usize,
    layers: Vec<BoolMatrix>,
}

impl fmt::Debug for ProductMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ProductMatrix(size={}, facts={}, copies={})",
            self.size,
            self.fact_count(),
            self.copy_count()
        )
    }
}

impl ProductMatrix {
    pub fn zeros(size: usize, nts: usize) -> Self {
        ProductMatrix {
            size,
            nts,
            layers: (0..nts + 6).map(|_| BoolMatrix::zeros(size, size)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nts
    }

    fn layer_index(&self, s: CellSymbol) -> usize {
        match s {
            CellSymbol::Nt(a) => a,
            CellSymbol::Copy(c) => self.nts + c.offset(),
        }
    }

    pub fn layer(&self, s: CellSymbol) -> &BoolMatrix {
        &self.layers[self.layer_index(s)]
    }

    pub fn layer_mut(&mut self, s: CellSymbol) -> &mut BoolMatrix {
        let k = self.layer_index(s);
        &mut self.layers[k]
    }

    pub fn nt_layer(&self, a: NtId) -> &BoolMatrix {
        &self.layers[a]
    }

    pub fn nt_layer_mut(&mut self, a: NtId) -> &mut BoolMatrix {
        &mut self.layers[a]
    }

    pub fn contains(&self, i: usize, j: usize, s: CellSymbol) -> bool {
        self.layer(s).get(i, j)
    }

    pub fn insert(&mut self, i: usize, j: usize, s: CellSymbol) -> bool {
        self.layer_mut(s).set(i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> Vec<CellSymbol> {
        let mut out: Vec<CellSymbol> = (0..self.nts)
            .filter(|&a| self.layers[a].get(i, j))
            .map(CellSymbol::Nt)
            .collect();
        out.extend(
            CopySymbol::ALL
                .iter()
                .filter(|c| self.layers[self.nts + c.offset()].get(i, j))
                .map(|&c| CellSymbol::Copy(c)),
        );
        out
    }

    pub fn nonterminals_at(&self, i: usize, j: usize) -> Vec<NtId> {
        (0..self.nts).filter(|&a| self.layers[a].get(i, j)).collect()
    }

    /// Union in place; true if anything was added.
    pub fn union_with(&mut self, other: &ProductMatrix) -> bool {
        let mut changed = false;
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            changed |= a.or_assign(b);
        }
        changed
    }

    /// Entries of `self` missing from `other`.
    pub fn difference(&self, other: &ProductMatrix) -> ProductMatrix {
        let mut out = self.clone();
        for (a, b) in out.layers.iter_mut().zip(&other.layers) {
            a.and_not_assign(b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|l| l.is_zero())
    }

    pub fn union(&self, other: &ProductMatrix) -> ProductMatrix {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    /// Number of (nonterminal, cell) entries.
    pub fn fact_count(&self) -> usize {
        self.layers[..self.nts].iter().map(|l| l.count_ones()).sum()
    }

    pub fn copy_count(&self) -> usize {
        self.layers[self.nts..].iter().map(|l| l.count_ones()).sum()
    }

    /// Cells holding at least one symbol.
    pub fn occupancy(&self) -> BoolMatrix {
        let mut occ = BoolMatrix::zeros(self.size, self.size);
        for l in &self.layers {
            occ.or_assign(l);
        }
        occ
    }

    pub fn nt_occupancy(&self) -> BoolMatrix {
        let mut occ = BoolMatrix::zeros(self.size, self.size);
        for l in &self.layers[..self.nts] {
            occ.or_assign(l);
        }
        occ
    }

    /// Nonterminal entries on or below the diagonal.
    pub fn nt_lower_entries(&self) -> usize {
        self.layers[..self.nts]
            .iter()
            .map(|l| l.ones().filter(|&(i, j)| j <= i).count())
            .sum()
    }

    pub fn nt_is_zero(&self) -> bool {
        self.layers[..self.nts].iter().all(|l| l.is_zero())
    }

    /// Lines `row | col | symbols` for every nonempty cell.
    pub fn dump(&self, ctx: &Context) -> String {
        let mut s = String::new();
        let occ = self.occupancy();
        for (i, j) in occ.ones() {
            let mut names: Vec<String> = self
                .get(i, j)
                .into_iter()
                .map(|x| match x {
                    CellSymbol::Nt(a) => ctx.grammar.name(a).to_string(),
                    CellSymbol::Copy(c) => c.to_string(),
                })
                .collect();
            names.sort();
            s.push_str(&format!("{} | {} | {}\n", ctx.addr(i), ctx.addr(j), names.join(",")));
        }
        s
    }
}

/// Initial matrix: lexical facts in every matching unmarked cell, plus all
/// copy symbols.
pub fn seed(ctx: &Context) -> ProductMatrix {
    let sp = &ctx.space;
    let nts = ctx.num_nonterminals();
    let mut t = ProductMatrix::zeros(sp.len(), nts);
    let unmarked: Vec<usize> = (0..sp.len()).filter(|&i| !sp.addr(i).is_marked()).collect();
    let lexical: Vec<(NtId, &Vec<Vec<String>>)> = ctx
        .grammar
        .rules
        .iter()
        .filter_map(|r| match &r.body {
            RuleBody::Lexical { strings } => Some((r.lhs, strings)),
            _ => None,
        })
        .collect();
    for &i in &unmarked {
        for &j in &unmarked {
            let Some(e) = merged_endpoints(sp.addr(i), sp.addr(j)) else {
                continue;
            };
            for &(a, strings) in &lexical {
                if e.len() != 2 * strings.len() {
                    continue;
                }
                let ok = strings.iter().enumerate().all(|(k, s)| {
                    let (l, r) = (e[2 * k] as usize, e[2 * k + 1] as usize);
                    r - l == s.len() && ctx.sentence[l..r] == s[..]
                });
                if ok {
                    t.insert(i, j, CellSymbol::Nt(a));
                }
            }
        }
    }

    let n = sp.n();
    for id in 0..sp.len() {
        let s = sp.addr(id);
        if s.is_marked() {
            let u = sp.id(&s.unmark()).expect("unmarked variant in space");
            t.insert(u, id, CellSymbol::Copy(CopySymbol::UnmarkRow));
            t.insert(id, u, CellSymbol::Copy(CopySymbol::UnmarkCol));
            continue;
        }
        for x in 0..=n {
            if let Some(h) = s.insert(MarkedIndex::hat(x)).ok().and_then(|h| sp.id(&h)) {
                t.insert(id, h, CellSymbol::Copy(CopySymbol::ToCol));
                t.insert(h, id, CellSymbol::Copy(CopySymbol::ToRow));
            }
        }
        let mut seen = None;
        for m in s.items() {
            if seen == Some(m.pos) {
                continue;
            }
            seen = Some(m.pos);
            let less = s.remove(*m).unwrap();
            let lid = sp.id(&less).expect("shorter address in space");
            // the leftmost endpoint never leaves the row
            if Address::min(&less) == s.min() {
                t.insert(lid, id, CellSymbol::Copy(CopySymbol::FromRow));
            }
            t.insert(id, lid, CellSymbol::Copy(CopySymbol::FromCol));
        }
    }
    t
}

/// R ⊗ S for R at cell (i, k) and S at cell (k, j); only nonterminals result.
pub fn cell_product(
    ctx: &Context,
    i: usize,
    k: usize,
    j: usize,
    r: &[CellSymbol],
    s: &[CellSymbol],
) -> Vec<NtId> {
    let (ai, ak, aj) = (ctx.addr(i), ctx.addr(k), ctx.addr(j));
    let g = &ctx.grammar;
    let mut out = Vec::new();
    let has = |set: &[CellSymbol], c: CopySymbol| set.contains(&CellSymbol::Copy(c));
    for &x in r {
        let CellSymbol::Nt(b) = x else { continue };
        for &y in s {
            let CellSymbol::Nt(c) = y else { continue };
            for &ri in ctx.by_pair.get(&(b, c)).map(|v| v.as_slice()).unwrap_or(&[]) {
                let ru = &ctx.rules[ri];
                if config_matches(ai, ak, &ru.cfg2, g.fan_out(b))
                    && config_matches(ak, aj, &ru.cfg3, g.fan_out(c))
                    && config_matches(ai, aj, &ru.cfg1, g.fan_out(ru.lhs))
                {
                    out.push(ru.lhs);
                }
            }
        }
        let f = g.fan_out(b);
        if (has(s, CopySymbol::ToCol) && to_col_post(ai, aj))
            || (has(s, CopySymbol::UnmarkCol) && unmark_post(ai, aj, f))
            || (has(s, CopySymbol::FromCol) && from_col_post(ai, aj))
        {
            out.push(b);
        }
    }
    for &y in s {
        let CellSymbol::Nt(a) = y else { continue };
        let f = g.fan_out(a);
        if (has(r, CopySymbol::FromRow) && from_row_post(ai, aj))
            || (has(r, CopySymbol::ToRow) && to_row_post(ai, aj))
            || (has(r, CopySymbol::UnmarkRow) && unmark_post(ai, aj, f))
        {
            out.push(a);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Reference product: union of cell products over every k.
pub fn matrix_product(ctx: &Context, t1: &ProductMatrix, t2: &ProductMatrix) -> ProductMatrix {
    let n = t1.size();
    let mut out = ProductMatrix::zeros(n, t1.num_nonterminals());
    matrix_product_block_into(ctx, t1, t2, 0..n, 0..n, 0..n, &mut out);
    out
}

/// Adds cell products for i in `rows`, k in `mid`, j in `cols` into `out`.
pub fn matrix_product_block_into(
    ctx: &Context,
    t1: &ProductMatrix,
    t2: &ProductMatrix,
    rows: Range<usize>,
    mid: Range<usize>,
    cols: Range<usize>,
    out: &mut ProductMatrix,
) {
    let occ1 = t1.occupancy();
    let occ2 = t2.occupancy();
    let rows2: Vec<Vec<(usize, Vec<CellSymbol>)>> = mid
        .clone()
        .map(|k| {
            occ2.row_ones(k)
                .filter(|j| cols.contains(j))
                .map(|j| (j, t2.get(k, j)))
                .collect()
        })
        .collect();
    for i in rows {
        for k in occ1.row_ones(i).filter(|k| mid.contains(k)) {
            let entries = &rows2[k - mid.start];
            if entries.is_empty() {
                continue;
            }
            let r = t1.get(i, k);
            for (j, s) in entries {
                for a in cell_product(ctx, i, k, *j, &r, s) {
                    out.insert(i, *j, CellSymbol::Nt(a));
                }
            }
        }
    }
}

/// Makes every unmarked cell hold the union of nonterminals over all cells
/// with the same span list.
pub fn pi_copy(ctx: &Context, t: &ProductMatrix) -> ProductMatrix {
    let mut out = t.clone();
    for group in ctx.space.equivalence_groups() {
        for a in 0..t.num_nonterminals() {
            let l = t.nt_layer(a);
            if group.iter().any(|&(i, j)| l.get(i, j)) {
                let m = out.nt_layer_mut(a);
                for &(i, j) in group {
                    m.set(i, j);
                }
            }
        }
    }
    out
}

//! The matrix product expressed as a set of ordinary Boolean products.
//!
//! Every condition on a cell product either involves only (i, k), only
//! (k, j) or only (i, j), so it can be applied as a mask on one factor or
//! on the result.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::ops::Range;

use crate::address::merged_endpoints;
use crate::boolean::{multiply, Backend, BoolMatrix};
use crate::matrix::{
    config_matches, from_col_post, from_row_post, to_col_post, to_row_post, unmark_post,
    CellSymbol, Context, CopySymbol, ProductMatrix,
};

/// Precomputed cell filters for one context.
pub struct Masks {
    pub pre2: Vec<BoolMatrix>,
    pub pre3: Vec<BoolMatrix>,
    pub post1: Vec<BoolMatrix>,
    pub to_col: BoolMatrix,
    pub from_row: BoolMatrix,
    pub to_row: BoolMatrix,
    pub from_col: BoolMatrix,
    /// |i| + |j| = 2f, keyed by f.
    pub unmark: BTreeMap<usize, BoolMatrix>,
}

impl Masks {
    pub fn new(ctx: &Context) -> Masks {
        let sp = &ctx.space;
        let n = sp.len();
        let g = &ctx.grammar;
        let zero = || BoolMatrix::zeros(n, n);
        let mut pre2: Vec<BoolMatrix> = ctx.rules.iter().map(|_| zero()).collect();
        let mut pre3 = pre2.clone();
        let mut post1 = pre2.clone();
        let unmarked: Vec<usize> = (0..n).filter(|&i| !sp.addr(i).is_marked()).collect();
        let marked: Vec<usize> = (0..n).filter(|&i| sp.addr(i).is_marked()).collect();
        for &i in &unmarked {
            for &j in &unmarked {
                let (ai, aj) = (sp.addr(i), sp.addr(j));
                if merged_endpoints(ai, aj).is_none() {
                    continue;
                }
                for (r, ru) in ctx.rules.iter().enumerate() {
                    if config_matches(ai, aj, &ru.cfg2, g.fan_out(ru.rhs1)) {
                        pre2[r].set(i, j);
                    }
                    if config_matches(ai, aj, &ru.cfg3, g.fan_out(ru.rhs2)) {
                        pre3[r].set(i, j);
                    }
                    if config_matches(ai, aj, &ru.cfg1, g.fan_out(ru.lhs)) {
                        post1[r].set(i, j);
                    }
                }
            }
        }
        let (mut to_col, mut from_row, mut to_row, mut from_col) = (zero(), zero(), zero(), zero());
        for &m in &marked {
            for o in 0..n {
                let (am, ao) = (sp.addr(m), sp.addr(o));
                if to_col_post(ao, am) {
                    to_col.set(o, m);
                }
                if from_row_post(ao, am) {
                    from_row.set(o, m);
                }
                if to_row_post(am, ao) {
                    to_row.set(m, o);
                }
                if from_col_post(am, ao) {
                    from_col.set(m, o);
                }
            }
        }
        let mut unmark = BTreeMap::new();
        for nt in &g.nonterminals {
            unmark.entry(nt.fan_out).or_insert_with(|| {
                let mut m = zero();
                for i in 0..n {
                    for j in 0..n {
                        if unmark_post(sp.addr(i), sp.addr(j), nt.fan_out) {
                            m.set(i, j);
                        }
                    }
                }
                m
            });
        }
        Masks {
            pre2,
            pre3,
            post1,
            to_col,
            from_row,
            to_row,
            from_col,
            unmark,
        }
    }
}

/// Rectangular view of a block, optionally filtered by a full-size mask.
fn block<'a>(
    layer: &'a BoolMatrix,
    mask: Option<&BoolMatrix>,
    r: &Range<usize>,
    c: &Range<usize>,
) -> Cow<'a, BoolMatrix> {
    if r.start == 0 && r.end == layer.rows() && c.start == 0 && c.end == layer.cols() {
        return match mask {
            None => Cow::Borrowed(layer),
            Some(m) => {
                let mut out = layer.clone();
                out.and_assign(m);
                Cow::Owned(out)
            }
        };
    }
    let mut out = BoolMatrix::zeros(r.len(), c.len());
    for i in r.clone() {
        if layer.row_is_zero(i) {
            continue;
        }
        for j in layer.row_ones(i) {
            if j >= c.start && j < c.end && mask.is_none_or(|m| m.get(i, j)) {
                out.set(i - r.start, j - c.start);
            }
        }
    }
    Cow::Owned(out)
}

pub struct CopyFactors<'a> {
    pub to_col: Cow<'a, BoolMatrix>,
    pub from_row: Cow<'a, BoolMatrix>,
    pub unmark_col: Cow<'a, BoolMatrix>,
    pub to_row: Cow<'a, BoolMatrix>,
    pub from_col: Cow<'a, BoolMatrix>,
    pub unmark_row: Cow<'a, BoolMatrix>,
}

/// G and H operands for one product T1 ⊗ T2 restricted to rows × mid × cols.
pub struct Factors<'a> {
    /// (G_r, H_r) per binary rule, prefiltered on (i, k) and (k, j).
    pub rule: Vec<(Cow<'a, BoolMatrix>, Cow<'a, BoolMatrix>)>,
    /// (G_A, H_A) per nonterminal.
    pub nt: Vec<(Cow<'a, BoolMatrix>, Cow<'a, BoolMatrix>)>,
    pub copy: CopyFactors<'a>,
}

impl Factors<'_> {
    pub fn count(&self) -> usize {
        2 * self.rule.len() + 2 * self.nt.len() + 6
    }
}

pub fn build_rule_factors<'a>(
    ctx: &Context,
    t1: &'a ProductMatrix,
    t2: &'a ProductMatrix,
    rows: Range<usize>,
    mid: Range<usize>,
    cols: Range<usize>,
) -> Factors<'a> {
    let masks = ctx.masks();
    let rule = ctx
        .rules
        .iter()
        .enumerate()
        .map(|(r, ru)| {
            (
                block(t1.nt_layer(ru.rhs1), Some(&masks.pre2[r]), &rows, &mid),
                block(t2.nt_layer(ru.rhs2), Some(&masks.pre3[r]), &mid, &cols),
            )
        })
        .collect();
    let nt = (0..ctx.num_nonterminals())
        .map(|a| {
            (
                block(t1.nt_layer(a), None, &rows, &mid),
                block(t2.nt_layer(a), None, &mid, &cols),
            )
        })
        .collect();
    let c1 = |s| block(t1.layer(CellSymbol::Copy(s)), None, &rows, &mid);
    let c2 = |s| block(t2.layer(CellSymbol::Copy(s)), None, &mid, &cols);
    Factors {
        rule,
        nt,
        copy: CopyFactors {
            to_col: c2(CopySymbol::ToCol),
            from_row: c1(CopySymbol::FromRow),
            unmark_col: c2(CopySymbol::UnmarkCol),
            to_row: c1(CopySymbol::ToRow),
            from_col: c2(CopySymbol::FromCol),
            unmark_row: c1(CopySymbol::UnmarkRow),
        },
    }
}

/// Adds the products of T1[rows, mid] and T2[mid, cols] into `out` at
/// global coordinates. Returns the number of Boolean multiplications.
pub fn product_block_into(
    ctx: &Context,
    t1: &ProductMatrix,
    t2: &ProductMatrix,
    rows: Range<usize>,
    mid: Range<usize>,
    cols: Range<usize>,
    backend: Backend,
    out: &mut ProductMatrix,
) -> usize {
    let masks = ctx.masks();
    let f = build_rule_factors(ctx, t1, t2, rows.clone(), mid, cols.clone());
    let mut muls = 0;
    let mut emit = |g: &BoolMatrix, h: &BoolMatrix, post: &BoolMatrix, a: usize, muls: &mut usize| {
        if g.is_zero() || h.is_zero() {
            return;
        }
        *muls += 1;
        let mut p = multiply(g, h, backend);
        let layer = out.nt_layer_mut(a);
        if p.rows() == layer.rows() && p.cols() == layer.cols() {
            p.and_assign(post);
            layer.or_assign(&p);
            return;
        }
        for (x, y) in p.ones() {
            let (i, j) = (rows.start + x, cols.start + y);
            if post.get(i, j) {
                layer.set(i, j);
            }
        }
    };
    for (r, ru) in ctx.rules.iter().enumerate() {
        emit(&f.rule[r].0, &f.rule[r].1, &masks.post1[r], ru.lhs, &mut muls);
    }
    for (a, (ga, ha)) in f.nt.iter().enumerate() {
        let um = &masks.unmark[&ctx.grammar.fan_out(a)];
        emit(ga, &f.copy.to_col, &masks.to_col, a, &mut muls);
        emit(&f.copy.from_row, ha, &masks.from_row, a, &mut muls);
        emit(ga, &f.copy.unmark_col, um, a, &mut muls);
        emit(&f.copy.to_row, ha, &masks.to_row, a, &mut muls);
        emit(ga, &f.copy.from_col, &masks.from_col, a, &mut muls);
        emit(&f.copy.unmark_row, ha, um, a, &mut muls);
    }
    muls
}

/// T1 ⊗ T2 computed through Boolean matrix products.
pub fn product_via_boolean(
    ctx: &Context,
    t1: &ProductMatrix,
    t2: &ProductMatrix,
    backend: Backend,
) -> (ProductMatrix, usize) {
    let n = t1.size();
    let mut out = ProductMatrix::zeros(n, t1.num_nonterminals());
    let muls = product_block_into(ctx, t1, t2, 0..n, 0..n, 0..n, backend, &mut out);
    (out, muls)
}

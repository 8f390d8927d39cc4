use std::collections::{HashMap, VecDeque};

use super::{validate, Composition, Grammar, Nonterminal, NtId, Rule, RuleBody, Var};
use crate::error::{Error, Result};

struct Converter {
    g: Grammar,
    limit: usize,
    memo: HashMap<(NtId, usize), NtId>,
    queue: VecDeque<usize>,
}

/// Shifts every variable of one child with index > `after` up by one.
fn shift(comp: &mut Composition, b_side: bool, after: usize) {
    for v in comp.templates.iter_mut().flatten() {
        match v {
            Var::B(i) if b_side && *i > after => *i += 1,
            Var::C(i) if !b_side && *i > after => *i += 1,
            _ => {}
        }
    }
}

impl Converter {
    /// A copy of `x` with an empty component inserted after component `slot`.
    fn widen(&mut self, x: NtId, slot: usize) -> Result<NtId> {
        if let Some(&id) = self.memo.get(&(x, slot)) {
            return Ok(id);
        }
        let fan_out = self.g.fan_out(x) + 1;
        if fan_out > self.limit {
            return Err(Error::Conversion(format!(
                "widening {} would need fan-out {fan_out}",
                self.g.name(x)
            )));
        }
        let base = format!("{}_e{slot}", self.g.name(x));
        let mut name = base.clone();
        while self.g.lookup(&name).is_some() {
            name.push('_');
        }
        let id = self.g.nonterminals.len();
        self.g.nonterminals.push(Nonterminal { name, fan_out });
        self.memo.insert((x, slot), id);

        let sources: Vec<Rule> = self.g.rules.iter().filter(|r| r.lhs == x).cloned().collect();
        for r in sources {
            let body = match r.body {
                RuleBody::Lexical { mut strings } => {
                    strings.insert(slot, Vec::new());
                    RuleBody::Lexical { strings }
                }
                RuleBody::Binary {
                    mut rhs1,
                    mut rhs2,
                    mut composition,
                } => {
                    // The empty component goes to whichever child has a
                    // component ending before the gap; the second child is
                    // preferred so the first stays free for a later fix.
                    let before = composition.templates[..slot].iter().flatten();
                    let nb = before.clone().filter(|v| v.is_b()).count();
                    let nc = before.filter(|v| !v.is_b()).count();
                    let to_c = nc > 0 && self.g.fan_out(rhs2) < self.limit;
                    let fresh = if to_c {
                        rhs2 = self.widen(rhs2, nc)?;
                        shift(&mut composition, false, nc);
                        Var::C(nc + 1)
                    } else {
                        rhs1 = self.widen(rhs1, nb)?;
                        shift(&mut composition, true, nb);
                        Var::B(nb + 1)
                    };
                    composition.templates.insert(slot, vec![fresh]);
                    RuleBody::Binary {
                        rhs1,
                        rhs2,
                        composition,
                    }
                }
            };
            self.g.rules.push(Rule {
                lhs: id,
                body,
                line: r.line,
            });
            self.queue.push_back(self.g.rules.len() - 1);
        }
        Ok(id)
    }

    fn fix(&mut self, idx: usize) -> Result<()> {
        let (rhs1, mut composition) = match &self.g.rules[idx].body {
            RuleBody::Binary {
                rhs1, composition, ..
            } => (*rhs1, composition.clone()),
            RuleBody::Lexical { .. } => return Ok(()),
        };
        let Some(t) = composition
            .templates
            .iter()
            .position(|t| t.first() == Some(&Var::C(1)))
        else {
            return Ok(());
        };
        let slot = composition.templates[..t]
            .iter()
            .flatten()
            .filter(|v| v.is_b())
            .count();
        let widened = self.widen(rhs1, slot)?;
        shift(&mut composition, true, slot);
        composition.templates[t].insert(0, Var::B(slot + 1));
        if let RuleBody::Binary {
            rhs1, composition: c, ..
        } = &mut self.g.rules[idx].body
        {
            *rhs1 = widened;
            *c = composition;
        }
        Ok(())
    }
}

/// Name not yet used in `g`, starting from `base`.
fn fresh_name(g: &Grammar, base: String) -> String {
    let mut name = base;
    while g.lookup(&name).is_some() {
        name.push('_');
    }
    name
}

/// Rewrites every dual-initial rule `A -> B C` as `A -> B' C` with
/// `B' -> E B`, where `E` derives two empty spans: the first is glued to the
/// front of B's first component and the second becomes the extra component
/// of `B'`. No other rule is touched.
fn pad_with_empty_pair(g: &Grammar) -> Result<Grammar> {
    let mut h = g.clone();
    let mut padded: HashMap<(NtId, usize), NtId> = HashMap::new();
    let mut pair = None;
    for idx in 0..g.rules.len() {
        let RuleBody::Binary {
            rhs1, composition, ..
        } = &g.rules[idx].body
        else {
            continue;
        };
        let Some(t) = composition
            .templates
            .iter()
            .position(|t| t.first() == Some(&Var::C(1)))
        else {
            continue;
        };
        let slot = composition.templates[..t]
            .iter()
            .flatten()
            .filter(|v| v.is_b())
            .count();
        let e = *pair.get_or_insert_with(|| {
            let name = fresh_name(&h, "EPS2".into());
            h.nonterminals.push(Nonterminal { name, fan_out: 2 });
            let id = h.nonterminals.len() - 1;
            h.rules.push(Rule {
                lhs: id,
                body: RuleBody::Lexical {
                    strings: vec![Vec::new(), Vec::new()],
                },
                line: 0,
            });
            id
        });
        let b = *rhs1;
        let wide = match padded.get(&(b, slot)) {
            Some(&w) => w,
            None => {
                let fb = g.fan_out(b);
                let name = fresh_name(&h, format!("{}_e{slot}", g.name(b)));
                h.nonterminals.push(Nonterminal { name, fan_out: fb + 1 });
                let w = h.nonterminals.len() - 1;
                // E B : b1 g1 , g2 .. g_slot , b2 , g_slot+1 .. g_fb
                let mut templates = vec![vec![Var::B(1), Var::C(1)]];
                templates.extend((2..=slot).map(|i| vec![Var::C(i)]));
                templates.push(vec![Var::B(2)]);
                templates.extend((slot + 1..=fb).map(|i| vec![Var::C(i)]));
                h.rules.push(Rule {
                    lhs: w,
                    body: RuleBody::Binary {
                        rhs1: e,
                        rhs2: b,
                        composition: Composition::new(templates),
                    },
                    line: 0,
                });
                padded.insert((b, slot), w);
                w
            }
        };
        let mut composition = composition.clone();
        shift(&mut composition, true, slot);
        composition.templates[t].insert(0, Var::B(slot + 1));
        if let RuleBody::Binary {
            rhs1, composition: c, ..
        } = &mut h.rules[idx].body
        {
            *rhs1 = wide;
            *c = composition;
        }
    }
    let v = validate(&h);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    Ok(h)
}

/// Rewrites dual-initial rules so that every second child's first component
/// is preceded by a component of the first child, padding with empty spans.
/// The language is unchanged and the fan-out grows by at most one.
///
/// Padding is first pushed down into clones of the first child, which keeps
/// every nonterminal covering some input. Recursive dual-initial rules can
/// make that need a second empty component; in that case every dual-initial
/// rule is rewritten through a nonterminal deriving two empty spans instead,
/// which the matrix engine does not accept (the tabular engine does).
pub fn to_single_initial(g: &Grammar) -> Result<Grammar> {
    let mut c = Converter {
        g: g.clone(),
        limit: g.max_fan_out() + 1,
        memo: HashMap::new(),
        queue: (0..g.rules.len()).collect(),
    };
    let mut cloned = Ok(());
    while let Some(i) = c.queue.pop_front() {
        cloned = c.fix(i);
        if cloned.is_err() {
            break;
        }
    }
    match cloned {
        Ok(()) => {
            let v = validate(&c.g);
            if !v.is_empty() {
                return Err(Error::Invalid(v));
            }
            Ok(c.g)
        }
        Err(Error::Conversion(_)) => pad_with_empty_pair(g),
        Err(e) => Err(e),
    }
}

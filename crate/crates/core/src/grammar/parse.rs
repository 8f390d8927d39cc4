//! Text format:
//!
//! ```text
//! # comment
//! start S
//! S -> A B : b1 g1 b2 g2
//! A -> X A : b1 g1 , g2 b2
//! A -> : 'a' , 'c'
//! E -> : ''
//! ```
//!
//! Binary rules list their span templates after the colon, separated by
//! commas; `bK` is component K of the first child and `gK` of the second.
//! Lexical rules list one quoted token sequence per component; `''` is the
//! empty string.

use std::collections::HashMap;

use super::{validate, Composition, Grammar, Nonterminal, Rule, RuleBody, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Arrow,
    Colon,
    Comma,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c == ':' {
            out.push((Tok::Colon, col));
            i += 1;
        } else if c == ',' {
            out.push((Tok::Comma, col));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, col));
            i += 2;
        } else if c == '\'' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '\'' {
                if chars[j].is_whitespace() {
                    return Err(syntax(line, j + 1, "whitespace inside terminal"));
                }
                j += 1;
            }
            if j == chars.len() {
                return Err(syntax(line, col, "unterminated quote"));
            }
            out.push((Tok::Quoted(chars[i + 1..j].iter().collect()), col));
            i = j + 1;
        } else if c.is_alphanumeric() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push((Tok::Ident(chars[i..j].iter().collect()), col));
            i = j;
        } else {
            return Err(syntax(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

enum RawBody {
    Binary(String, String, Vec<Vec<Var>>),
    Lexical(Vec<Vec<String>>),
}

struct RawRule {
    lhs: String,
    body: RawBody,
    line: usize,
}

fn parse_var(s: &str, line: usize, col: usize) -> Result<Var> {
    let (head, rest) = s.split_at(1);
    let idx: usize = rest
        .parse()
        .map_err(|_| syntax(line, col, format!("expected variable like b1 or g2, found `{s}`")))?;
    match head {
        "b" => Ok(Var::B(idx)),
        "g" => Ok(Var::C(idx)),
        _ => Err(syntax(line, col, format!("expected variable like b1 or g2, found `{s}`"))),
    }
}

fn parse_rule(toks: &[(Tok, usize)], line: usize) -> Result<RawRule> {
    let lhs = match toks.first() {
        Some((Tok::Ident(s), _)) => s.clone(),
        Some((_, c)) => return Err(syntax(line, *c, "expected nonterminal")),
        None => unreachable!(),
    };
    match toks.get(1) {
        Some((Tok::Arrow, _)) => {}
        Some((_, c)) => return Err(syntax(line, *c, "expected `->`")),
        None => return Err(syntax(line, 1, "expected `->`")),
    }
    let colon = toks
        .iter()
        .position(|(t, _)| *t == Tok::Colon)
        .ok_or_else(|| syntax(line, 1, "missing `:`"))?;
    let rhs: Vec<String> = toks[2..colon]
        .iter()
        .map(|(t, c)| match t {
            Tok::Ident(s) => Ok(s.clone()),
            _ => Err(syntax(line, *c, "expected nonterminal on right-hand side")),
        })
        .collect::<Result<_>>()?;
    let after = &toks[colon + 1..];
    let mut groups: Vec<Vec<(Tok, usize)>> = vec![Vec::new()];
    for t in after {
        if t.0 == Tok::Comma {
            groups.push(Vec::new());
        } else {
            groups.last_mut().unwrap().push(t.clone());
        }
    }
    let end_col = toks.last().map(|t| t.1).unwrap_or(1);
    match rhs.len() {
        0 => {
            let mut strings = Vec::new();
            for g in groups {
                if g.is_empty() {
                    return Err(syntax(line, end_col, "empty component; write '' for ε"));
                }
                let mut s = Vec::new();
                for (t, c) in g {
                    match t {
                        Tok::Quoted(q) if q.is_empty() => {}
                        Tok::Quoted(q) => s.push(q),
                        _ => return Err(syntax(line, c, "expected quoted terminal")),
                    }
                }
                strings.push(s);
            }
            Ok(RawRule {
                lhs,
                body: RawBody::Lexical(strings),
                line,
            })
        }
        2 => {
            let mut templates = Vec::new();
            for g in groups {
                let mut t = Vec::new();
                for (tok, c) in g {
                    match tok {
                        Tok::Ident(s) => t.push(parse_var(&s, line, c)?),
                        _ => return Err(syntax(line, c, "expected variable")),
                    }
                }
                templates.push(t);
            }
            Ok(RawRule {
                lhs,
                body: RawBody::Binary(rhs[0].clone(), rhs[1].clone(), templates),
                line,
            })
        }
        1 => Err(syntax(line, toks[2].1, "unary rules are not supported")),
        _ => Err(syntax(line, toks[4].1, "at most two right-hand-side nonterminals")),
    }
}

/// Parses without running [`validate`]; fan-out and symbol checks still apply.
pub fn parse_grammar_unvalidated(text: &str) -> Result<Grammar> {
    let mut start: Option<(String, usize)> = None;
    let mut raw = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokenize(l, line)?;
        if toks.is_empty() {
            continue;
        }
        if let (Tok::Ident(kw), _) = &toks[0] {
            if kw == "start" && toks.get(1).map(|t| &t.0) != Some(&Tok::Arrow) {
                match toks.as_slice() {
                    [_, (Tok::Ident(s), _)] => {
                        start = Some((s.clone(), line));
                        continue;
                    }
                    _ => return Err(syntax(line, 1, "expected `start NAME`")),
                }
            }
        }
        raw.push(parse_rule(&toks, line)?);
    }
    if raw.is_empty() {
        return Err(syntax(1, 1, "grammar has no rules"));
    }

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut nts: Vec<Nonterminal> = Vec::new();
    let mut decl_line: Vec<usize> = Vec::new();
    for r in &raw {
        let fo = match &r.body {
            RawBody::Binary(_, _, t) => t.len(),
            RawBody::Lexical(s) => s.len(),
        };
        match ids.get(&r.lhs) {
            Some(&id) => {
                if nts[id].fan_out != fo {
                    return Err(Error::FanOutMismatch {
                        line: r.line,
                        symbol: r.lhs.clone(),
                        message: format!(
                            "{fo} components here, {} on line {}",
                            nts[id].fan_out, decl_line[id]
                        ),
                    });
                }
            }
            None => {
                ids.insert(r.lhs.clone(), nts.len());
                nts.push(Nonterminal {
                    name: r.lhs.clone(),
                    fan_out: fo,
                });
                decl_line.push(r.line);
            }
        }
    }

    let mut rules = Vec::new();
    for r in raw {
        let lhs = ids[&r.lhs];
        let body = match r.body {
            RawBody::Lexical(strings) => RuleBody::Lexical { strings },
            RawBody::Binary(b, c, templates) => {
                let look = |s: &str| {
                    ids.get(s).copied().ok_or_else(|| Error::UnknownSymbol {
                        line: r.line,
                        symbol: s.to_string(),
                    })
                };
                let (rb, rc) = (look(&b)?, look(&c)?);
                let max_b = templates.iter().flatten().filter(|v| v.is_b()).map(|v| v.index()).max();
                let max_c = templates.iter().flatten().filter(|v| !v.is_b()).map(|v| v.index()).max();
                for (sym, id, m) in [(&b, rb, max_b), (&c, rc, max_c)] {
                    if let Some(m) = m {
                        if m > nts[id].fan_out {
                            return Err(Error::FanOutMismatch {
                                line: r.line,
                                symbol: sym.clone(),
                                message: format!(
                                    "component {m} used but fan-out is {}",
                                    nts[id].fan_out
                                ),
                            });
                        }
                    }
                }
                RuleBody::Binary {
                    rhs1: rb,
                    rhs2: rc,
                    composition: Composition::new(templates),
                }
            }
        };
        rules.push(Rule {
            lhs,
            body,
            line: r.line,
        });
    }

    let start = match start {
        Some((s, line)) => *ids.get(&s).ok_or(Error::UnknownSymbol { line, symbol: s })?,
        None => rules[0].lhs,
    };
    Ok(Grammar {
        nonterminals: nts,
        rules,
        start,
    })
}

/// Parses and validates a grammar.
pub fn parse_grammar(text: &str) -> Result<Grammar> {
    let g = parse_grammar_unvalidated(text)?;
    let v = validate(&g);
    if v.is_empty() {
        Ok(g)
    } else {
        Err(Error::Invalid(v))
    }
}

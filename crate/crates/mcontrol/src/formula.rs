//! Boolean formulas, their text syntax, their candidate-name encoding and
//! a brute-force evaluator for quantified formulas.

use crate::error::{malformed, Result};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Variables are numbered from 1.
    Var(u32),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// ∃ block then ∀ block.
    EA,
    /// ∀ block then ∃ block.
    AE,
    /// ∀ then ∃ then ∀.
    AEA,
}

impl Shape {
    pub fn blocks(self) -> usize {
        if self == Shape::AEA {
            3
        } else {
            2
        }
    }
}

impl Formula {
    pub fn var(i: u32) -> Formula {
        Formula::Var(i)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        match self {
            Formula::Var(i) => x.get(*i as usize - 1).copied().unwrap_or(false),
            Formula::Not(f) => !f.eval(x),
            Formula::And(fs) => fs.iter().all(|f| f.eval(x)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(x)),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Formula::Var(i) => {
                out.insert(*i);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn max_var(&self) -> u32 {
        self.vars().into_iter().next_back().unwrap_or(0)
    }

    /// True when the variables are exactly x1..xz for some z ≥ 1.
    pub fn contiguous_vars(&self) -> bool {
        let v = self.vars();
        !v.is_empty() && v.iter().copied().eq(1..=v.len() as u32)
    }

    pub fn rename(&self, f: &impl Fn(u32) -> u32) -> Formula {
        match self {
            Formula::Var(i) => Formula::Var(f(*i)),
            Formula::Not(g) => Formula::not(g.rename(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename(f)).collect()),
        }
    }

    /// Text syntax, e.g. `(or x1 (not x2))`.
    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let f = parse_sexpr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return malformed(format!("trailing input after formula at token {pos}"));
        }
        Ok(f)
    }

    pub fn to_sexpr(&self) -> String {
        match self {
            Formula::Var(i) => format!("x{i}"),
            Formula::Not(f) => format!("(not {})", f.to_sexpr()),
            Formula::And(fs) => format!("(and {})", fs.iter().map(|f| f.to_sexpr()).collect::<Vec<_>>().join(" ")),
            Formula::Or(fs) => format!("(or {})", fs.iter().map(|f| f.to_sexpr()).collect::<Vec<_>>().join(" ")),
        }
    }

    /// Candidate-name encoding: `x3`, `not<f>`, `and<f,g>`, `or<f,g>`.
    pub fn encode(&self) -> String {
        match self {
            Formula::Var(i) => format!("x{i}"),
            Formula::Not(f) => format!("not<{}>", f.encode()),
            Formula::And(fs) => format!("and<{}>", fs.iter().map(|f| f.encode()).collect::<Vec<_>>().join(",")),
            Formula::Or(fs) => format!("or<{}>", fs.iter().map(|f| f.encode()).collect::<Vec<_>>().join(",")),
        }
    }

    pub fn decode(s: &str) -> Option<Formula> {
        let b = s.as_bytes();
        let mut pos = 0;
        let f = decode_at(b, &mut pos, 0)?;
        (pos == b.len()).then_some(f)
    }
}

fn decode_at(b: &[u8], pos: &mut usize, depth: usize) -> Option<Formula> {
    if depth > 256 {
        return None;
    }
    let rest = &b[*pos..];
    if rest.first() == Some(&b'x') {
        let digits = rest[1..].iter().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 || rest[1] == b'0' {
            return None;
        }
        let n: u32 = std::str::from_utf8(&rest[1..1 + digits]).ok()?.parse().ok()?;
        *pos += 1 + digits;
        return Some(Formula::Var(n));
    }
    let (op, len) = if rest.starts_with(b"not<") {
        (0, 4)
    } else if rest.starts_with(b"and<") {
        (1, 4)
    } else if rest.starts_with(b"or<") {
        (2, 3)
    } else {
        return None;
    };
    *pos += len;
    let mut args = vec![decode_at(b, pos, depth + 1)?];
    while b.get(*pos) == Some(&b',') {
        *pos += 1;
        args.push(decode_at(b, pos, depth + 1)?);
    }
    if b.get(*pos) != Some(&b'>') {
        return None;
    }
    *pos += 1;
    match op {
        0 if args.len() == 1 => Some(Formula::not(args.pop()?)),
        1 => Some(Formula::And(args)),
        2 => Some(Formula::Or(args)),
        _ => None,
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<Formula> {
    let Some(tok) = tokens.get(*pos) else {
        return malformed("unexpected end of formula");
    };
    *pos += 1;
    if tok != "(" {
        return parse_var(tok);
    }
    let Some(op) = tokens.get(*pos).cloned() else {
        return malformed("unexpected end of formula");
    };
    *pos += 1;
    let mut args = Vec::new();
    while tokens.get(*pos).map(String::as_str) != Some(")") {
        if *pos >= tokens.len() {
            return malformed("unbalanced parentheses in formula");
        }
        args.push(parse_sexpr(tokens, pos)?);
    }
    *pos += 1;
    match (op.as_str(), args.len()) {
        ("not", 1) => Ok(Formula::not(args.pop().unwrap())),
        ("and", n) if n >= 1 => Ok(Formula::And(args)),
        ("or", n) if n >= 1 => Ok(Formula::Or(args)),
        _ => malformed(format!("bad operator or arity: ({op} ...) with {} arguments", args.len())),
    }
}

fn parse_var(tok: &str) -> Result<Formula> {
    match tok.strip_prefix('x').and_then(|d| d.parse::<u32>().ok()) {
        Some(i) if i >= 1 && !tok[1..].starts_with('0') => Ok(Formula::Var(i)),
        _ => malformed(format!("bad variable {tok:?}")),
    }
}

/// Truth of the quantified formula whose blocks cover x1.. in order.
pub fn qbf_eval(formula: &Formula, shape: Shape, blocks: &[usize]) -> Result<bool> {
    if blocks.len() != shape.blocks() {
        return malformed(format!("shape {shape:?} needs {} blocks, got {}", shape.blocks(), blocks.len()));
    }
    let total: usize = blocks.iter().sum();
    if formula.max_var() as usize > total {
        return malformed("formula mentions variables beyond the quantifier blocks");
    }
    if total > 24 {
        return malformed("too many variables for brute-force evaluation");
    }
    let universal: Vec<bool> = match shape {
        Shape::EA => vec![false, true],
        Shape::AE => vec![true, false],
        Shape::AEA => vec![true, false, true],
    };
    let mut x = vec![false; total];
    Ok(eval_blocks(formula, blocks, &universal, 0, 0, &mut x))
}

fn eval_blocks(f: &Formula, blocks: &[usize], universal: &[bool], bi: usize, offset: usize, x: &mut Vec<bool>) -> bool {
    if bi == blocks.len() {
        return f.eval(x);
    }
    let width = blocks[bi];
    let mut each = (0u64..1 << width).map(|bits| {
        for j in 0..width {
            x[offset + j] = bits >> j & 1 == 1;
        }
        eval_blocks(f, blocks, universal, bi + 1, offset + width, x)
    });
    if universal[bi] {
        each.all(|v| v)
    } else {
        each.any(|v| v)
    }
}

/// Brings a formula whose blocks have the given widths to equal widths
/// w = max width: block b's variables move to x_{b·w+1}.., and every
/// unused variable is conjoined as the tautology (x ∨ ¬x).
pub fn pad_blocks(formula: &Formula, widths: &[usize]) -> Result<(Formula, usize)> {
    let w = widths.iter().copied().max().unwrap_or(0).max(1);
    let total: usize = widths.iter().sum();
    if formula.max_var() as usize > total {
        return malformed("formula mentions variables beyond the quantifier blocks");
    }
    let starts: Vec<usize> = widths.iter().scan(0, |acc, &x| {
        let s = *acc;
        *acc += x;
        Some(s)
    }).collect();
    let renamed = formula.rename(&|i| {
        let i = i as usize - 1;
        let b = starts.iter().rposition(|&s| s <= i).unwrap_or(0);
        (b * w + (i - starts[b]) + 1) as u32
    });
    let used = renamed.vars();
    let mut parts = vec![renamed];
    for v in 1..=(w * widths.len()) as u32 {
        if !used.contains(&v) {
            parts.push(tautology(v));
        }
    }
    let f = if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) };
    Ok((f, w))
}

pub fn tautology(v: u32) -> Formula {
    Formula::Or(vec![Formula::Var(v), Formula::not(Formula::Var(v))])
}

/// Exchanges x_i and x_{w+i} for i in 1..=w.
pub fn swap_blocks(formula: &Formula, w: usize) -> Formula {
    let w = w as u32;
    formula.rename(&|i| if i <= w { i + w } else if i <= 2 * w { i - w } else { i })
}

fn lit(v: u32, positive: bool) -> Formula {
    if positive {
        Formula::Var(v)
    } else {
        Formula::not(Formula::Var(v))
    }
}

fn join(and: bool, parts: Vec<Formula>) -> Formula {
    if and {
        Formula::And(parts)
    } else {
        Formula::Or(parts)
    }
}

/// Fixed family of 2+2-variable formulas (x1, x2 first block; x3, x4
/// second), used for reduction soundness checks.
pub fn two_block_family() -> Vec<Formula> {
    let mut out = Vec::new();
    for and in [true, false] {
        for a in 1..=2 {
            for b in 3..=4 {
                for (pa, pb) in [(true, true), (true, false), (false, true), (false, false)] {
                    out.push(join(and, vec![lit(a, pa), lit(b, pb)]));
                }
            }
        }
    }
    for outer in [true, false] {
        for signs in 0..16u32 {
            let s = |i: u32| signs >> i & 1 == 0;
            let left = join(!outer, vec![lit(1, s(0)), lit(3, s(1))]);
            let right = join(!outer, vec![lit(2, s(2)), lit(4, s(3))]);
            out.push(join(outer, vec![left, right]));
        }
    }
    // x1 ↔ x3 and x2 ↔ x4 spelled out
    let iff = |a: u32, b: u32| {
        Formula::Or(vec![Formula::And(vec![lit(a, true), lit(b, true)]), Formula::And(vec![lit(a, false), lit(b, false)])])
    };
    out.push(Formula::And(vec![iff(1, 3), iff(2, 4)]));
    out.push(Formula::Or(vec![iff(1, 3), iff(2, 4)]));
    out.push(Formula::And(vec![lit(1, true), lit(1, false)]));
    out.push(Formula::Or(vec![lit(3, true), lit(3, false)]));
    out
}

/// Fixed family of formulas over x1, x2, x3, one variable per block.
pub fn three_block_family() -> Vec<Formula> {
    let mut out = Vec::new();
    for (inner, outer) in [(true, false), (false, true), (true, true), (false, false)] {
        for signs in 0..8u32 {
            let s = |i: u32| signs >> i & 1 == 0;
            out.push(join(outer, vec![join(inner, vec![lit(1, s(0)), lit(2, s(1))]), lit(3, s(2))]));
        }
    }
    out
}

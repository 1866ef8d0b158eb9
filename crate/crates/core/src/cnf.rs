//! CNF formulas, DIMACS I/O, small SAT oracles, and the transformation into
//! the restricted form consumed by the reduction.
//!
//! Restricted form: clauses have 2 or 3 literals, 3-clauses are all positive,
//! and every variable occurs in exactly one 3-clause and in exactly three
//! clauses overall, once negated and twice positive.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub const BRUTE_FORCE_MAX_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Collapses repeated literals; rejects empty clauses, tautologies and
    /// out-of-range variables.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (ci, c) in clauses.into_iter().enumerate() {
            out.push(normalize_clause(num_vars, c).map_err(|m| Error::Input(format!("clause {}: {m}", ci + 1)))?);
        }
        Ok(Self {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `assignment[v-1]` is the value of variable `v`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    pub fn is_exactly3(&self) -> bool {
        self.clauses.iter().all(|c| c.len() == 3)
    }

    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in &self.clauses {
            for &l in c {
                occ[l.unsigned_abs() as usize - 1] += 1;
            }
        }
        occ
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }
}

fn normalize_clause(num_vars: usize, c: Vec<i32>) -> std::result::Result<Vec<i32>, String> {
    let mut out: Vec<i32> = Vec::with_capacity(c.len());
    for l in c {
        if l == 0 || l.unsigned_abs() as usize > num_vars {
            return Err(format!("literal {l} out of range 1..={num_vars}"));
        }
        if out.contains(&-l) {
            return Err(format!("variable {} occurs with both signs", l.abs()));
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    if out.is_empty() {
        return Err("empty clause".into());
    }
    Ok(out)
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut cur: Vec<i32> = Vec::new();
    let mut cur_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(perr(line_no, "second header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(perr(line_no, "expected `p cnf <vars> <clauses>`".into()));
            }
            let v = parts[2]
                .parse()
                .map_err(|_| perr(line_no, format!("bad variable count {:?}", parts[2])))?;
            let c = parts[3]
                .parse()
                .map_err(|_| perr(line_no, format!("bad clause count {:?}", parts[3])))?;
            header = Some((v, c, line_no));
            continue;
        }
        let Some((nv, _, _)) = header else {
            return Err(perr(line_no, "clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| perr(line_no, format!("bad literal {tok:?}")))?;
            if cur.is_empty() {
                cur_line = line_no;
            }
            if l == 0 {
                if cur.is_empty() {
                    return Err(perr(line_no, "empty clause".into()));
                }
                let c = normalize_clause(nv, std::mem::take(&mut cur)).map_err(|m| perr(cur_line, m))?;
                clauses.push(c);
            } else {
                cur.push(l);
            }
        }
    }
    let Some((nv, nc, hl)) = header else {
        return Err(perr(1, "missing header".into()));
    };
    if !cur.is_empty() {
        return Err(perr(cur_line, "clause not terminated by 0".into()));
    }
    if clauses.len() != nc {
        return Err(perr(hl, format!("header promises {nc} clauses, found {}", clauses.len())));
    }
    Ok(CnfFormula {
        num_vars: nv,
        clauses,
    })
}

/// Exhaustive search; the ground truth for small formulas.
pub fn brute_force_sat(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    if f.num_vars > BRUTE_FORCE_MAX_VARS {
        return Err(Error::Capacity(format!(
            "{} variables exceed the brute-force bound of {BRUTE_FORCE_MAX_VARS}",
            f.num_vars
        )));
    }
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, n), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    for a in 0u32..(1u32 << f.num_vars) {
        if masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0) {
            return Ok(Some((0..f.num_vars).map(|i| a >> i & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Plain DPLL with unit propagation, for formulas beyond brute force.
pub fn dpll_sat(f: &CnfFormula) -> Option<Vec<bool>> {
    fn go(clauses: &[Vec<i32>], val: &mut Vec<i8>) -> bool {
        let mut trail: Vec<usize> = Vec::new();
        loop {
            let mut changed = false;
            for c in clauses {
                let mut free = None;
                let mut n_free = 0;
                let mut sat = false;
                for &l in c {
                    let v = val[l.unsigned_abs() as usize - 1];
                    if v == 0 {
                        n_free += 1;
                        free = Some(l);
                    } else if (v > 0) == (l > 0) {
                        sat = true;
                        break;
                    }
                }
                if sat {
                    continue;
                }
                match (n_free, free) {
                    (0, _) => {
                        for v in trail {
                            val[v] = 0;
                        }
                        return false;
                    }
                    (1, Some(l)) => {
                        let v = l.unsigned_abs() as usize - 1;
                        val[v] = if l > 0 { 1 } else { -1 };
                        trail.push(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let branch = clauses.iter().find_map(|c| {
            let sat = c
                .iter()
                .any(|&l| val[l.unsigned_abs() as usize - 1] == if l > 0 { 1 } else { -1 });
            if sat {
                None
            } else {
                c.iter().copied().find(|&l| val[l.unsigned_abs() as usize - 1] == 0)
            }
        });
        let Some(l) = branch else {
            return true;
        };
        let v = l.unsigned_abs() as usize - 1;
        for s in [1i8, -1] {
            val[v] = if l > 0 { s } else { -s };
            if go(clauses, val) {
                return true;
            }
        }
        val[v] = 0;
        for v in trail {
            val[v] = 0;
        }
        false
    }
    let mut val = vec![0i8; f.num_vars];
    go(&f.clauses, &mut val).then(|| val.iter().map(|&v| v > 0).collect())
}

/// Brute force when small enough, DPLL otherwise.
pub fn is_satisfiable(f: &CnfFormula) -> bool {
    if f.num_vars <= 20 {
        brute_force_sat(f).expect("within bound").is_some()
    } else {
        dpll_sat(f).is_some()
    }
}

/// Equisatisfiable formula in which every clause has exactly three distinct
/// variables and every variable occurs at least twice.
///
/// Long clauses are chained through fresh variables, variables occurring once
/// are set to satisfy their clause (which is dropped, repeatedly), and short
/// clauses are padded with variables forced false by four 3-clauses
/// `(-f | ±g | ±h)`.
pub fn preprocess_exactly3(f: &CnfFormula) -> CnfFormula {
    let mut nv = f.num_vars;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for c in &f.clauses {
        if c.len() <= 3 {
            clauses.push(c.clone());
            continue;
        }
        // (c0 c1 z1) (-z1 c2 z2) ... (-z_{k-3} c_{k-2} c_{k-1})
        let k = c.len();
        let mut prev = 0i32;
        for i in 1..k - 2 {
            nv += 1;
            let z = nv as i32;
            if i == 1 {
                clauses.push(vec![c[0], c[1], z]);
            } else {
                clauses.push(vec![-prev, c[i], z]);
            }
            prev = z;
        }
        clauses.push(vec![-prev, c[k - 2], c[k - 1]]);
    }
    loop {
        let mut occ = vec![0usize; nv];
        for c in &clauses {
            for &l in c {
                occ[l.unsigned_abs() as usize - 1] += 1;
            }
        }
        let before = clauses.len();
        clauses.retain(|c| c.iter().all(|&l| occ[l.unsigned_abs() as usize - 1] != 1));
        if clauses.len() == before {
            break;
        }
    }
    let mut falses: Vec<i32> = Vec::new();
    let mut extra: Vec<Vec<i32>> = Vec::new();
    let mut forced_false = |nv: &mut usize, want: usize, falses: &mut Vec<i32>| {
        while falses.len() < want {
            let (x, y, z) = (*nv as i32 + 1, *nv as i32 + 2, *nv as i32 + 3);
            *nv += 3;
            for (sy, sz) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                extra.push(vec![-x, sy * y, sz * z]);
            }
            falses.push(x);
        }
    };
    for c in clauses.iter_mut() {
        let need = 3 - c.len();
        if need > 0 {
            forced_false(&mut nv, need, &mut falses);
            c.extend_from_slice(&falses[..need]);
        }
    }
    clauses.extend(extra);
    CnfFormula {
        num_vars: nv,
        clauses,
    }
}

/// Which clauses a restricted variable occurs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrences {
    pub three_clause: usize,
    pub positive_two_clause: usize,
    pub negated_clause: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedForm {
    pub formula: CnfFormula,
    /// Indexed by variable - 1; clause indices are 0-based.
    pub occurrence_table: Vec<Occurrences>,
}

impl RestrictedForm {
    /// Checks the restricted-form invariants and builds the occurrence table.
    pub fn new(formula: CnfFormula) -> Result<Self> {
        let n = formula.num_vars;
        let mut three = vec![None; n];
        let mut pos2 = vec![None; n];
        let mut neg = vec![None; n];
        for (ci, c) in formula.clauses.iter().enumerate() {
            match c.len() {
                3 => {
                    for &l in c {
                        if l < 0 {
                            return input(format!("3-clause {} has a negated literal", ci + 1));
                        }
                        let v = l as usize - 1;
                        if three[v].replace(ci).is_some() {
                            return input(format!("variable {l} is in two 3-clauses"));
                        }
                    }
                }
                2 => {
                    for &l in c {
                        let v = l.unsigned_abs() as usize - 1;
                        let slot = if l > 0 { &mut pos2[v] } else { &mut neg[v] };
                        if slot.replace(ci).is_some() {
                            return input(format!(
                                "variable {} occurs twice {} in 2-clauses",
                                l.abs(),
                                if l > 0 { "positively" } else { "negated" }
                            ));
                        }
                    }
                }
                k => return input(format!("clause {} has {k} literals", ci + 1)),
            }
        }
        let mut table = Vec::with_capacity(n);
        for v in 0..n {
            match (three[v], pos2[v], neg[v]) {
                (Some(t), Some(p), Some(q)) => table.push(Occurrences {
                    three_clause: t,
                    positive_two_clause: p,
                    negated_clause: q,
                }),
                _ => {
                    return input(format!(
                        "variable {} does not occur once in a 3-clause, once positive and once negated in 2-clauses",
                        v + 1
                    ))
                }
            }
        }
        Ok(Self {
            formula,
            occurrence_table: table,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.formula.num_vars
    }

    pub fn three_clauses(&self) -> impl Iterator<Item = (usize, &Vec<i32>)> {
        self.formula.clauses.iter().enumerate().filter(|(_, c)| c.len() == 3)
    }

    pub fn two_clauses(&self) -> impl Iterator<Item = (usize, &Vec<i32>)> {
        self.formula.clauses.iter().enumerate().filter(|(_, c)| c.len() == 2)
    }
}

/// Replaces each occurrence by a fresh variable and ties the copies of one
/// variable together with a cycle of implications.
///
/// The copy for a negated occurrence stands for the negated literal, so it
/// appears positively in its 3-clause.
pub fn restrict_sat(f: &CnfFormula) -> Result<RestrictedForm> {
    if !f.is_exactly3() {
        return input("restrict_sat needs every clause to have exactly 3 literals");
    }
    let occ = f.occurrences();
    if let Some(v) = occ.iter().position(|&k| k == 1) {
        return input(format!(
            "variable {} occurs once; preprocess the formula first",
            v + 1
        ));
    }
    let mut per_var: BTreeMap<usize, Vec<i32>> = BTreeMap::new();
    let mut clauses = Vec::with_capacity(f.clauses.len() * 2);
    for (ci, c) in f.clauses.iter().enumerate() {
        let mut nc = Vec::with_capacity(3);
        for (p, &l) in c.iter().enumerate() {
            let id = (3 * ci + p + 1) as i32;
            nc.push(id);
            // the occurrence literal, as a literal over the copy
            per_var
                .entry(l.unsigned_abs() as usize)
                .or_default()
                .push(if l > 0 { id } else { -id });
        }
        clauses.push(nc);
    }
    for lits in per_var.values() {
        let k = lits.len();
        for j in 0..k {
            clauses.push(vec![lits[j], -lits[(j + 1) % k]]);
        }
    }
    RestrictedForm::new(CnfFormula {
        num_vars: 3 * f.clauses.len(),
        clauses,
    })
}

/// Preprocessing followed by `restrict_sat`.
pub fn to_restricted(f: &CnfFormula) -> Result<RestrictedForm> {
    if let Ok(r) = RestrictedForm::new(f.clone()) {
        return Ok(r);
    }
    restrict_sat(&preprocess_exactly3(f))
}

/// Three variables, clauses `(1 2 3) (1 -2) (2 -3) (3 -1)`: always satisfiable
/// and already in restricted form.
pub fn padding_block() -> CnfFormula {
    CnfFormula {
        num_vars: 3,
        clauses: vec![vec![1, 2, 3], vec![1, -2], vec![2, -3], vec![3, -1]],
    }
}

/// `m` clauses, each on three distinct variables among `1..=n` with random signs.
pub fn random_exactly3<R: Rng>(rng: &mut R, n: usize, m: usize) -> CnfFormula {
    assert!(n >= 3);
    let clauses = (0..m)
        .map(|_| {
            let mut c: Vec<i32> = Vec::with_capacity(3);
            while c.len() < 3 {
                let v = rng.gen_range(1..=n as i32);
                if !c.iter().any(|l| l.abs() == v) {
                    c.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            c
        })
        .collect();
    CnfFormula {
        num_vars: n,
        clauses,
    }
}

/// Every exactly-3 formula over variables `1..=3` (subsets of the 8 sign
/// patterns), including the empty one.
pub fn all_exactly3_on_three_vars() -> Vec<CnfFormula> {
    let patterns: Vec<Vec<i32>> = (0..8)
        .map(|s| (0..3).map(|i| if s >> i & 1 == 1 { -(i + 1) } else { i + 1 }).collect())
        .collect();
    (0u32..256)
        .map(|mask| CnfFormula {
            num_vars: 3,
            clauses: (0..8)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| patterns[i].clone())
                .collect(),
        })
        .collect()
}

/// Every restricted formula with one 3-clause `(1 2 3)` per block of three
/// variables and 2-clauses pairing the positive and negated slots, up to
/// clause order. Only meant for tiny `blocks`.
pub fn restricted_instances(blocks: usize) -> Vec<CnfFormula> {
    let n = 3 * blocks;
    let three: Vec<Vec<i32>> = (0..blocks)
        .map(|b| (1..=3).map(|i| (3 * b + i) as i32).collect())
        .collect();
    let mut slots: Vec<i32> = (1..=n as i32).flat_map(|v| [v, -v]).collect();
    slots.sort_by_key(|l| (l.abs(), *l < 0));
    let mut out = Vec::new();
    fn pair(slots: &[i32], acc: &mut Vec<Vec<i32>>, out: &mut Vec<Vec<Vec<i32>>>) {
        let Some(&first) = slots.first() else {
            out.push(acc.clone());
            return;
        };
        for k in 1..slots.len() {
            let other = slots[k];
            if other.abs() == first.abs() {
                continue;
            }
            let rest: Vec<i32> = slots
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != 0 && i != k)
                .map(|(_, &l)| l)
                .collect();
            acc.push(vec![first, other]);
            pair(&rest, acc, out);
            acc.pop();
        }
    }
    let mut pairings = Vec::new();
    pair(&slots, &mut Vec::new(), &mut pairings);
    for p in pairings {
        let mut clauses = three.clone();
        clauses.extend(p);
        out.push(CnfFormula {
            num_vars: n,
            clauses,
        });
    }
    out
}

/// A random restricted formula on `3 * blocks` variables: 3-clauses
/// `(3b+1 3b+2 3b+3)` and a uniformly random pairing of the positive and
/// negated 2-clause slots, redrawn until no pair repeats a variable.
pub fn random_restricted<R: Rng>(rng: &mut R, blocks: usize) -> CnfFormula {
    assert!(blocks >= 1);
    let n = 3 * blocks;
    let mut slots: Vec<i32> = (1..=n as i32).flat_map(|v| [v, -v]).collect();
    loop {
        slots.shuffle(rng);
        if slots.chunks(2).all(|p| p[0].abs() != p[1].abs()) {
            break;
        }
    }
    let mut clauses: Vec<Vec<i32>> = (0..blocks)
        .map(|b| (1..=3).map(|i| (3 * b + i) as i32).collect())
        .collect();
    clauses.extend(slots.chunks(2).map(|p| p.to_vec()));
    CnfFormula {
        num_vars: n,
        clauses,
    }
}

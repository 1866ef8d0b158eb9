//! Searches for (x,...,x) families (open intervals of integer length x with
//! integer endpoints inside `[0, coord_max]`) and for unit families of
//! bounded depth.
//!
//! The integer search walks the same token orders as the unit oracle and
//! keeps the least integer left endpoints satisfying, for token `j` with
//! earliest open token `s`:
//!
//! ```text
//! l[j] >= l[j-1]            tokens sorted by left endpoint
//! l[j] >= l[s-1] + x        disjoint from everything closed
//! l[j] <= l[s] + x - 1      meets everything still open
//! 0 <= l[j] <= coord_max - x
//! ```

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{input, Result};
use crate::graph::Graph;
use crate::interval::{DIntervalFamily, Interval, Openness, Rational};
use crate::order::{order_family_for, Core, Hook, Mode, OrderConfig};

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub d: usize,
    pub x: u64,
    pub coord_max: u64,
    pub depth_cap: Option<usize>,
    pub time_budget: Option<Duration>,
}

impl SearchConfig {
    pub fn new(d: usize, x: u64, coord_max: u64) -> Self {
        Self {
            d,
            x,
            coord_max,
            depth_cap: None,
            time_budget: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntRepStats {
    pub nodes: u64,
    pub wall_ms: u128,
}

struct Difference {
    x: i64,
    max_l: i64,
    l: Vec<i64>,
    earliest: Vec<usize>,
    gap_from: Vec<Vec<usize>>,
    trail: Vec<(usize, i64)>,
    marks: Vec<usize>,
    work: Vec<usize>,
}

impl Difference {
    fn new(x: i64, max_l: i64) -> Self {
        Self {
            x,
            max_l,
            l: Vec::new(),
            earliest: Vec::new(),
            gap_from: Vec::new(),
            trail: Vec::new(),
            marks: Vec::new(),
            work: Vec::new(),
        }
    }

    fn raise(&mut self, i: usize, v: i64) -> bool {
        if self.l[i] < v {
            self.trail.push((i, self.l[i]));
            self.l[i] = v;
            if v > self.max_l {
                return false;
            }
            self.work.push(i);
        }
        true
    }

    fn propagate(&mut self) -> bool {
        let last = self.l.len() - 1;
        while let Some(i) = self.work.pop() {
            let li = self.l[i];
            if i < last && !self.raise(i + 1, li) {
                return false;
            }
            for k in 0..self.gap_from[i].len() {
                let c = self.gap_from[i][k];
                if !self.raise(c, li + self.x) {
                    return false;
                }
            }
            let s = self.earliest[i];
            if s < i && !self.raise(s, li - self.x + 1) {
                return false;
            }
        }
        true
    }
}

impl Hook for Difference {
    fn place(&mut self, pos: usize, earliest: usize) -> bool {
        self.marks.push(self.trail.len());
        self.work.clear();
        let mut low = if pos > 0 { self.l[pos - 1] } else { 0 };
        if earliest >= 1 {
            low = low.max(self.l[earliest - 1] + self.x);
            self.gap_from[earliest - 1].push(pos);
        }
        self.l.push(low);
        self.earliest.push(earliest);
        self.gap_from.push(Vec::new());
        let ok = low <= self.max_l
            && (earliest == pos || self.raise(earliest, low - self.x + 1))
            && self.propagate();
        if !ok {
            self.unplace();
        }
        ok
    }

    fn unplace(&mut self) {
        let mark = self.marks.pop().expect("balanced");
        while self.trail.len() > mark {
            let (i, v) = self.trail.pop().expect("nonempty");
            self.l[i] = v;
        }
        self.l.pop();
        self.gap_from.pop();
        let e = self.earliest.pop().expect("balanced");
        if e >= 1 {
            self.gap_from[e - 1].pop();
        }
    }

    fn memo_ok(&self) -> bool {
        false
    }

    fn singleton_completion(&self) -> bool {
        false
    }
}

/// Open integer family of lengths `x` with `profile[v]` intervals for `v`,
/// or `None` when none fits in `[0, coord_max]`.
pub fn find_integer_rep_profile(
    g: &Graph,
    profile: &[usize],
    cfg: &SearchConfig,
    order_cfg: &OrderConfig,
    budget: &mut Budget,
) -> Result<(Option<DIntervalFamily>, IntRepStats)> {
    if cfg.x == 0 || cfg.coord_max < cfg.x {
        return input(format!("need 0 < x <= coord_max, got x={} coord_max={}", cfg.x, cfg.coord_max));
    }
    if profile.iter().any(|&c| c > cfg.d) {
        return input(format!("profile asks for more than d={} intervals", cfg.d));
    }
    let x = cfg.x as i64;
    let hook = Difference::new(x, cfg.coord_max as i64 - x);
    let ocfg = OrderConfig {
        depth_cap: cfg.depth_cap,
        ..order_cfg.clone()
    };
    let start = Instant::now();
    let mut local = cfg.time_budget.map(Budget::time);
    let mut core = Core::new(g, profile, &ocfg, Mode::Recognize, hook)?;
    let mut found: Option<(Vec<usize>, Vec<i64>)> = None;
    let run = {
        let b = local.as_mut().unwrap_or(budget);
        core.dfs(b, &mut |c, seq, _| {
            found = Some((seq.to_vec(), c.hook.l.clone()));
            ControlFlow::Break(())
        })
    };
    let _ = run?;
    let st = IntRepStats {
        nodes: core.stats.nodes,
        wall_ms: start.elapsed().as_millis(),
    };
    let Some((seq, lefts)) = found else {
        return Ok((None, st));
    };
    let mut per: Vec<Vec<Interval>> = vec![Vec::new(); g.n()];
    for (&v, &l) in seq.iter().zip(&lefts) {
        per[v].push(Interval::ints(l, l + x)?);
    }
    let mut fam = DIntervalFamily::new(cfg.d, Openness::Open);
    for (v, is) in per.into_iter().enumerate() {
        fam.insert(g.label(v), is)?;
    }
    Ok((Some(fam), st))
}

/// `find_integer_rep_profile` with `d` intervals for every vertex.
pub fn find_integer_rep(g: &Graph, cfg: &SearchConfig, budget: &mut Budget) -> Result<Option<DIntervalFamily>> {
    let profile = vec![cfg.d; g.n()];
    Ok(find_integer_rep_profile(g, &profile, cfg, &OrderConfig::default(), budget)?.0)
}

/// Maps each left endpoint `l` to `l + floor(l / x)`: gaps of at least `x`
/// grow by at least one and overlaps of at most `x - 1` grow by at most one,
/// so lengths become `x + 1` with the same intersections.
pub fn stretch(fam: &DIntervalFamily) -> Result<DIntervalFamily> {
    let report = fam.classify()?;
    let Some(x) = report.integer_x else {
        return input("stretch needs an open family of integer intervals of one length");
    };
    let xb = BigInt::from(x);
    let mut out = DIntervalFamily::new(fam.d, Openness::Open);
    for (label, is) in fam.entries() {
        let mut next = Vec::with_capacity(is.len());
        for iv in is {
            let l = iv.left.to_integer();
            let nl = &l + l.div_floor(&xb);
            let nr = &nl + &xb + 1;
            next.push(Interval::new(Rational::from_integer(nl), Rational::from_integer(nr))?);
        }
        out.insert(label.clone(), next)?;
    }
    Ok(out)
}

/// Unit family of depth at most `r` with `profile[v]` intervals for `v`.
/// Exhausting `budget` is an error, never a negative answer.
pub fn find_depth_bounded_unit(
    g: &Graph,
    profile: &[usize],
    r: usize,
    budget: &mut Budget,
) -> Result<Option<DIntervalFamily>> {
    if r == 0 {
        return input("depth bound must be positive");
    }
    let cfg = OrderConfig {
        depth_cap: Some(r),
        ..OrderConfig::default()
    };
    let (found, _) = crate::order::recognize_unit_d_order(g, profile, &cfg, budget)?;
    found.map(|t| order_family_for(g, &t)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{validate_representation, ClassConstraints};

    fn complete(n: usize) -> Graph {
        let mut g = Graph::with_numbered_vertices(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    fn int_constraints(x: u64) -> ClassConstraints {
        ClassConstraints {
            integer_x: Some(x),
            ..ClassConstraints::default()
        }
    }

    #[test]
    fn single_vertex_two_intervals() {
        let g = Graph::with_numbered_vertices(1);
        let fam = find_integer_rep(&g, &SearchConfig::new(2, 1, 4), &mut Budget::unlimited())
            .unwrap()
            .unwrap();
        assert_eq!(fam.get("0").unwrap(), &[Interval::ints(0, 1).unwrap(), Interval::ints(1, 2).unwrap()]);
        assert!(find_integer_rep(&g, &SearchConfig::new(2, 3, 5), &mut Budget::unlimited())
            .unwrap()
            .is_none());
    }

    #[test]
    fn k4_depth_three_is_infeasible() {
        let k4 = complete(4);
        let mut cfg = SearchConfig::new(1, 1, 10);
        cfg.depth_cap = Some(3);
        assert!(find_integer_rep(&k4, &cfg, &mut Budget::unlimited()).unwrap().is_none());
        cfg.depth_cap = None;
        assert!(find_integer_rep(&k4, &cfg, &mut Budget::unlimited()).unwrap().is_some());
        assert!(find_depth_bounded_unit(&k4, &[1; 4], 3, &mut Budget::unlimited())
            .unwrap()
            .is_none());
        let f = find_depth_bounded_unit(&k4, &[1; 4], 4, &mut Budget::unlimited()).unwrap().unwrap();
        assert_eq!(f.depth().unwrap(), 4);
    }

    #[test]
    fn path_needs_room() {
        let p3 = Graph::from_edges(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        // length-one open integer intervals meet only when equal
        assert!(find_integer_rep(&p3, &SearchConfig::new(1, 1, 20), &mut Budget::unlimited())
            .unwrap()
            .is_none());
        let fam = find_integer_rep(&p3, &SearchConfig::new(1, 2, 4), &mut Budget::unlimited())
            .unwrap()
            .unwrap();
        assert!(validate_representation(&p3, &fam, &int_constraints(2)).unwrap().is_empty());
        assert!(find_integer_rep(&p3, &SearchConfig::new(1, 2, 3), &mut Budget::unlimited())
            .unwrap()
            .is_none());
    }

    #[test]
    fn stretch_examples() {
        let mut f = DIntervalFamily::new(1, Openness::Open);
        f.insert("a", vec![Interval::ints(0, 2).unwrap()]).unwrap();
        f.insert("b", vec![Interval::ints(1, 3).unwrap()]).unwrap();
        f.insert("c", vec![Interval::ints(3, 5).unwrap()]).unwrap();
        let s = stretch(&f).unwrap();
        assert_eq!(s.classify().unwrap().integer_x, Some(3));
        assert_eq!(s.intersection_graph(), f.intersection_graph());
        let mut closed = DIntervalFamily::new(1, Openness::Closed);
        closed.insert("a", vec![Interval::ints(0, 2).unwrap()]).unwrap();
        assert!(stretch(&closed).is_err());
    }
}

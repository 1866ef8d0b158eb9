//! Splits of a colored graph: one representative per black vertex, two per
//! white vertex, projecting onto the colored graph with every edge covered.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde_json::{json, Value};

use crate::budget::{capacity_override_from_env, Budget};
use crate::error::{input, Error, Result};
use crate::graph::{Color, ColoredGraph, Graph, GraphJson};
use crate::interval::{
    int, validate_representation, ClassConstraints, DIntervalFamily, Interval, Openness,
};
use crate::unit_interval::{is_unit_interval_adj, recognize_unit_interval, UnitIntervalResult};

pub const MAX_WHITE: usize = 12;
pub const MAX_EDGES: usize = 40;

/// Label of representative `k` (0 or 1) of a vertex.
pub fn rep_label(v: &str, color: Color, k: usize) -> String {
    match color {
        Color::Black => v.to_string(),
        Color::White => format!("{v}#{}", k + 1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub s: Graph,
    /// `f[i]` is the colored-graph vertex represented by vertex `i` of `s`.
    pub f: Vec<String>,
}

impl Split {
    pub fn to_json(&self) -> Value {
        let f: BTreeMap<&str, &str> = self
            .s
            .labels()
            .iter()
            .map(String::as_str)
            .zip(self.f.iter().map(String::as_str))
            .collect();
        json!({ "s": self.s.to_json_value(), "f": f })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let s: GraphJson = serde_json::from_value(
            v.get("s")
                .cloned()
                .ok_or_else(|| Error::Input("split needs \"s\"".into()))?,
        )?;
        let s = s.to_graph()?;
        let fmap: BTreeMap<String, String> = serde_json::from_value(
            v.get("f")
                .cloned()
                .ok_or_else(|| Error::Input("split needs \"f\"".into()))?,
        )?;
        let f = s
            .labels()
            .iter()
            .map(|l| {
                fmap.get(l)
                    .cloned()
                    .ok_or_else(|| Error::Input(format!("f is not defined on {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if fmap.len() != s.n() {
            return input("f mentions vertices outside s");
        }
        Ok(Self { s, f })
    }

    /// Representatives of each colored-graph vertex, in `s` order.
    pub fn preimages(&self, cg: &ColoredGraph) -> Result<Vec<Vec<usize>>> {
        let mut pre = vec![Vec::new(); cg.graph.n()];
        for (i, l) in self.f.iter().enumerate() {
            pre[cg.graph.require(l)?].push(i);
        }
        Ok(pre)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitCheck {
    pub violations: Vec<String>,
}

impl SplitCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the five split conditions.
pub fn is_valid_split(cg: &ColoredGraph, sp: &Split) -> Result<SplitCheck> {
    let g = &cg.graph;
    if sp.f.len() != sp.s.n() {
        return input("f must be defined on every vertex of s");
    }
    let pre = sp.preimages(cg)?;
    if let Some(v) = pre.iter().position(Vec::is_empty) {
        return input(format!("f is not onto: {:?} has no representative", g.label(v)));
    }
    let mut out = Vec::new();
    for (v, reps) in pre.iter().enumerate() {
        let want = cg.color(v).interval_count();
        if reps.len() != want {
            out.push(format!(
                "count: {:?} has {} representatives, expected {want}",
                g.label(v),
                reps.len()
            ));
        }
        for (i, &a) in reps.iter().enumerate() {
            for &b in &reps[i + 1..] {
                if sp.s.has_edge(a, b) {
                    out.push(format!(
                        "independence: representatives {:?} and {:?} of {:?} are adjacent",
                        sp.s.label(a),
                        sp.s.label(b),
                        g.label(v)
                    ));
                }
            }
        }
    }
    let owner: Vec<usize> = sp.f.iter().map(|l| g.require(l)).collect::<Result<_>>()?;
    for (a, b) in sp.s.edges() {
        let (u, v) = (owner[a], owner[b]);
        if u != v && !g.has_edge(u, v) {
            out.push(format!(
                "projection: edge {:?}-{:?} of s maps to non-edge {:?}-{:?}",
                sp.s.label(a),
                sp.s.label(b),
                g.label(u),
                g.label(v)
            ));
        }
    }
    for (u, v) in g.edges() {
        let covered = pre[u]
            .iter()
            .any(|&a| pre[v].iter().any(|&b| sp.s.has_edge(a, b)));
        if !covered {
            out.push(format!(
                "coverage: edge {:?}-{:?} has no representative edge",
                g.label(u),
                g.label(v)
            ));
        }
    }
    Ok(SplitCheck { violations: out })
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Visit only splits whose graph is a unit interval graph.
    pub only_unit_interval: bool,
    /// Visit each split once modulo swapping the two representatives of
    /// white vertices. When false every labeled split is visited.
    pub reduce_symmetry: bool,
    pub capacity_override: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            only_unit_interval: false,
            reduce_symmetry: true,
            capacity_override: capacity_override_from_env(),
        }
    }
}

/// Read-only view of a split under construction, handed to visitors.
pub struct SplitView<'a> {
    eng: &'a Engine<'a>,
}

impl SplitView<'_> {
    /// Adjacency of `s`; representative `k` of vertex `v` is `rep(v, k)`.
    pub fn s_adjacency(&self) -> &[Vec<usize>] {
        &self.eng.s_adj
    }

    pub fn rep(&self, v: usize, k: usize) -> Option<usize> {
        let r = self.eng.rep_base[v] + k;
        (k < self.eng.copies(v)).then_some(r)
    }

    pub fn owner(&self, s_vertex: usize) -> usize {
        self.eng.owner[s_vertex]
    }

    pub fn to_split(&self) -> Split {
        self.eng.materialize()
    }
}

struct EdgeSlot {
    /// Candidate representative pairs; bit `p` of a mask selects `pairs[p]`.
    pairs: Vec<(usize, usize)>,
    /// Permutation of pair indices under swapping the first / second endpoint.
    swap_u: Option<Vec<usize>>,
    swap_v: Option<Vec<usize>>,
    u: usize,
    v: usize,
    /// Run the unit interval check after this slot is assigned.
    checkpoint: bool,
}

struct Engine<'a> {
    cg: &'a ColoredGraph,
    rep_base: Vec<usize>,
    owner: Vec<usize>,
    slots: Vec<EdgeSlot>,
    masks: Vec<usize>,
    s_adj: Vec<Vec<usize>>,
    /// Per white vertex: true once some swap comparison came out strictly greater.
    swap_settled: Vec<bool>,
    white_ids: Vec<usize>,
    opts: EnumerateOptions,
    leaf_orbit_check: bool,
}

impl<'a> Engine<'a> {
    fn new(cg: &'a ColoredGraph, opts: EnumerateOptions) -> Result<Self> {
        let g = &cg.graph;
        let n = g.n();
        let whites: Vec<usize> = cg.whites().collect();
        if !opts.capacity_override && (whites.len() > MAX_WHITE || g.m() > MAX_EDGES) {
            return Err(Error::Capacity(format!(
                "split enumeration is bounded to {MAX_WHITE} white vertices and {MAX_EDGES} edges \
                 (got {} and {}); set {} to lift",
                whites.len(),
                g.m(),
                crate::budget::CAPACITY_OVERRIDE_ENV
            )));
        }
        let mut rep_base = Vec::with_capacity(n);
        let mut owner = Vec::new();
        for v in 0..n {
            rep_base.push(owner.len());
            for _ in 0..cg.color(v).interval_count() {
                owner.push(v);
            }
        }
        let order = bfs_order(g);
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        edges.sort_by_key(|&(a, b)| {
            let (lo, hi) = if pos[a] < pos[b] { (a, b) } else { (b, a) };
            (pos[hi], pos[lo])
        });
        let copies = |v: usize| cg.color(v).interval_count();
        let mut slots: Vec<EdgeSlot> = edges
            .iter()
            .map(|&(u, v)| {
                let (cu, cv) = (copies(u), copies(v));
                let mut pairs = Vec::new();
                for i in 0..cu {
                    for j in 0..cv {
                        pairs.push((rep_base[u] + i, rep_base[v] + j));
                    }
                }
                let idx = |i: usize, j: usize| i * cv + j;
                let swap_u = (cu == 2).then(|| {
                    (0..cu * cv).map(|p| idx(1 - p / cv, p % cv)).collect()
                });
                let swap_v = (cv == 2).then(|| {
                    (0..cu * cv).map(|p| idx(p / cv, 1 - p % cv)).collect()
                });
                EdgeSlot {
                    pairs,
                    swap_u,
                    swap_v,
                    u,
                    v,
                    checkpoint: false,
                }
            })
            .collect();
        for i in 0..slots.len() {
            let key = |s: &EdgeSlot| pos[s.u].max(pos[s.v]);
            let last_of_group = i + 1 == slots.len() || key(&slots[i + 1]) != key(&slots[i]);
            slots[i].checkpoint = last_of_group;
        }
        Ok(Self {
            cg,
            rep_base,
            s_adj: vec![Vec::new(); owner.len()],
            owner,
            masks: vec![0; slots.len()],
            slots,
            swap_settled: vec![false; n],
            white_ids: whites,
            opts,
            leaf_orbit_check: true,
        })
    }

    fn copies(&self, v: usize) -> usize {
        self.cg.color(v).interval_count()
    }

    fn apply(&mut self, slot: usize, mask: usize) {
        self.masks[slot] = mask;
        for (p, &(a, b)) in self.slots[slot].pairs.iter().enumerate() {
            if mask & (1 << p) != 0 {
                self.s_adj[a].push(b);
                self.s_adj[b].push(a);
            }
        }
    }

    fn unapply(&mut self, slot: usize, mask: usize) {
        for (p, &(a, b)) in self.slots[slot].pairs.iter().enumerate().rev() {
            if mask & (1 << p) != 0 {
                self.s_adj[a].pop();
                self.s_adj[b].pop();
            }
        }
        self.masks[slot] = 0;
    }

    fn permute(mask: usize, perm: &[usize]) -> usize {
        let mut out = 0;
        for (p, &q) in perm.iter().enumerate() {
            if mask & (1 << p) != 0 {
                out |= 1 << q;
            }
        }
        out
    }

    /// Mask of `slot` after swapping the representatives of every vertex in `swapped`.
    fn image(&self, slot: usize, mask: usize, swapped: &dyn Fn(usize) -> bool) -> usize {
        let s = &self.slots[slot];
        let mut m = mask;
        if let Some(p) = &s.swap_u {
            if swapped(s.u) {
                m = Self::permute(m, p);
            }
        }
        if let Some(p) = &s.swap_v {
            if swapped(s.v) {
                m = Self::permute(m, p);
            }
        }
        m
    }

    /// True when no combination of representative swaps yields a
    /// lexicographically smaller assignment.
    fn is_orbit_minimal(&self) -> bool {
        let k = self.white_ids.len();
        let mut flag = vec![false; self.cg.graph.n()];
        for sub in 1u64..(1u64 << k) {
            for (i, &w) in self.white_ids.iter().enumerate() {
                flag[w] = sub & (1 << i) != 0;
            }
            for slot in 0..self.slots.len() {
                let m = self.masks[slot];
                let img = self.image(slot, m, &|v| flag[v]);
                if img < m {
                    return false;
                }
                if img > m {
                    break;
                }
            }
        }
        true
    }

    fn materialize(&self) -> Split {
        let g = &self.cg.graph;
        let mut s = Graph::new();
        let mut f = Vec::with_capacity(self.owner.len());
        for (i, &v) in self.owner.iter().enumerate() {
            let k = i - self.rep_base[v];
            s.add_vertex(rep_label(g.label(v), self.cg.color(v), k))
                .expect("representative labels are unique");
            f.push(g.label(v).to_string());
        }
        for (a, ns) in self.s_adj.iter().enumerate() {
            for &b in ns {
                if a < b {
                    s.add_edge(a, b).expect("pairs are distinct");
                }
            }
        }
        Split { s, f }
    }

    fn run<F>(&mut self, slot: usize, budget: &mut Budget, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&SplitView) -> ControlFlow<()>,
    {
        if slot == self.slots.len() {
            if self.opts.reduce_symmetry && self.leaf_orbit_check && !self.is_orbit_minimal() {
                return Ok(ControlFlow::Continue(()));
            }
            if self.opts.only_unit_interval && !is_unit_interval_adj(&self.s_adj) {
                return Ok(ControlFlow::Continue(()));
            }
            return Ok(visit(&SplitView { eng: self }));
        }
        let k = self.slots[slot].pairs.len();
        let mut options: Vec<usize> = (1..(1usize << k)).collect();
        options.sort_by_key(|m| (m.count_ones(), *m));
        for mask in options {
            budget.tick()?;
            let (u, v) = (self.slots[slot].u, self.slots[slot].v);
            // single-vertex swap pruning
            let mut settled_now = Vec::new();
            let mut pruned = false;
            if self.opts.reduce_symmetry {
                for w in [u, v] {
                    if self.copies(w) != 2 || self.swap_settled[w] {
                        continue;
                    }
                    let img = self.image(slot, mask, &|x| x == w);
                    if img < mask {
                        pruned = true;
                        break;
                    }
                    if img > mask {
                        settled_now.push(w);
                    }
                }
            }
            if pruned {
                continue;
            }
            for &w in &settled_now {
                self.swap_settled[w] = true;
            }
            self.apply(slot, mask);
            let ok = !self.opts.only_unit_interval
                || !self.slots[slot].checkpoint
                || is_unit_interval_adj(&self.s_adj);
            let flow = if ok {
                self.run(slot + 1, budget, visit)?
            } else {
                ControlFlow::Continue(())
            };
            self.unapply(slot, mask);
            for &w in &settled_now {
                self.swap_settled[w] = false;
            }
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// BFS order over all components, neighbors in index order.
fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut head = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

/// Depth-first visit of all splits. Every split is a choice of a nonempty set
/// of representative pairs per edge; branches are cut as soon as the
/// representatives of a completed vertex prefix fail to induce a unit
/// interval graph (when `only_unit_interval` is set).
pub fn enumerate_splits<F>(
    cg: &ColoredGraph,
    opts: &EnumerateOptions,
    budget: &mut Budget,
    mut visit: F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&SplitView) -> ControlFlow<()>,
{
    let mut eng = Engine::new(cg, opts.clone())?;
    eng.run(0, budget, &mut visit)
}

pub fn count_splits(cg: &ColoredGraph, opts: &EnumerateOptions) -> Result<u64> {
    let mut count = 0u64;
    let _ = enumerate_splits(cg, opts, &mut Budget::unlimited(), |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// Colored family built from a split and a unit representation of its graph.
/// With `pad`, black vertices get a second far-away interval so every vertex
/// has two.
pub fn split_to_representation(
    cg: &ColoredGraph,
    sp: &Split,
    srep: &DIntervalFamily,
    pad: bool,
) -> Result<DIntervalFamily> {
    let report = validate_representation(&sp.s, srep, &ClassConstraints::unit())?;
    if !report.is_empty() || srep.d != 1 || srep.openness != Openness::Closed {
        return input(format!(
            "representation of the split graph is not a closed unit family: {report:?}"
        ));
    }
    let pre = sp.preimages(cg)?;
    let (_, hi) = srep.span().unwrap_or((int(0), int(0)));
    let mut fam = DIntervalFamily::new(2, Openness::Closed);
    let mut pad_at = hi + int(2);
    for (v, reps) in pre.iter().enumerate() {
        let mut is: Vec<Interval> = reps
            .iter()
            .map(|&r| srep.get(sp.s.label(r)).expect("validated")[0].clone())
            .collect();
        if pad && reps.len() == 1 {
            is.push(Interval::unit(pad_at.clone()));
            pad_at += int(3);
        }
        fam.insert(cg.graph.label(v), is)?;
    }
    Ok(fam)
}

/// A split with a unit interval graph and the colored family it yields, or
/// `None` when no such split exists.
pub fn recognize_colored_unit2_via_splits(
    cg: &ColoredGraph,
    budget: &mut Budget,
) -> Result<Option<(Split, DIntervalFamily)>> {
    let opts = EnumerateOptions {
        only_unit_interval: true,
        reduce_symmetry: true,
        ..EnumerateOptions::default()
    };
    recognize_with(cg, &opts, budget)
}

pub fn recognize_with(
    cg: &ColoredGraph,
    opts: &EnumerateOptions,
    budget: &mut Budget,
) -> Result<Option<(Split, DIntervalFamily)>> {
    let mut eng = Engine::new(
        cg,
        EnumerateOptions {
            only_unit_interval: true,
            ..opts.clone()
        },
    )?;
    // Any witness will do, so single swaps prune but the full orbit test is skipped.
    eng.leaf_orbit_check = false;
    let mut found = None;
    let _ = eng.run(0, budget, &mut |view: &SplitView| {
        found = Some(view.to_split());
        ControlFlow::Break(())
    })?;
    let Some(sp) = found else {
        return Ok(None);
    };
    let UnitIntervalResult::Unit { family, .. } = recognize_unit_interval(&sp.s)? else {
        return input("visited split graph is not unit interval");
    };
    let fam = split_to_representation(cg, &sp, &family, false)?;
    Ok(Some((sp, fam)))
}

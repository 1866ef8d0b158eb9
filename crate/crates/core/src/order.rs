//! Recognition of unit d-interval graphs by searching proper orders of
//! interval tokens.
//!
//! A realization lists the tokens (vertex copies) by left endpoint. Tokens
//! `i < j` meet iff `j <= reach[i]`, and `reach` is nondecreasing, so the
//! tokens meeting a new token always form a contiguous window ending at the
//! previous position. The search places tokens left to right; before each
//! placement it closes some prefix of the window.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::budget::{capacity_override_from_env, Budget};
use crate::error::{input, Error, Result};
use crate::graph::{ColoredGraph, Graph};
use crate::interval::{DIntervalFamily, Interval, Openness};
use crate::unit_interval::left_endpoints_from_reach;

pub const DEFAULT_TOKEN_BOUND: usize = 36;

/// A proper order of tokens `(vertex, copy)` together with its reach map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TokenOrder {
    pub tokens: Vec<(String, usize)>,
    pub reach: Vec<usize>,
}

impl TokenOrder {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn meets(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a != b && b <= self.reach[a]
    }

    /// The same realization read right to left.
    pub fn mirrored(&self) -> TokenOrder {
        let n = self.len();
        let mut tokens: Vec<(String, usize)> = self.tokens.iter().rev().cloned().collect();
        let mut reach = vec![0; n];
        let mut first = 0usize;
        for i in 0..n {
            // first position reaching i
            while self.reach[first] < i {
                first += 1;
            }
            reach[n - 1 - i] = n - 1 - first;
        }
        // copies keep their placement order
        let mut next: BTreeMap<String, usize> = BTreeMap::new();
        for t in &mut tokens {
            let c = next.entry(t.0.clone()).or_default();
            t.1 = *c;
            *c += 1;
        }
        TokenOrder { tokens, reach }
    }

    /// Largest number of tokens sharing a point.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut s = 0;
        for j in 0..self.len() {
            while self.reach[s] < j {
                s += 1;
            }
            best = best.max(j - s + 1);
        }
        best
    }

    /// True when the token intersections realize `g` with the given counts.
    pub fn realizes(&self, g: &Graph, profile: &[usize]) -> bool {
        let n = self.len();
        let Ok(ids) = self
            .tokens
            .iter()
            .map(|(l, _)| g.require(l))
            .collect::<Result<Vec<_>>>()
        else {
            return false;
        };
        let mut count = vec![0usize; g.n()];
        for &v in &ids {
            count[v] += 1;
        }
        if count != profile {
            return false;
        }
        for i in 0..n {
            if self.reach[i] < i || self.reach[i] >= n || (i > 0 && self.reach[i] < self.reach[i - 1])
            {
                return false;
            }
        }
        let mut meet = vec![vec![false; g.n()]; g.n()];
        for i in 0..n {
            for j in i + 1..=self.reach[i] {
                if ids[i] == ids[j] {
                    return false;
                }
                meet[ids[i]][ids[j]] = true;
                meet[ids[j]][ids[i]] = true;
            }
        }
        (0..g.n()).all(|u| (u + 1..g.n()).all(|v| meet[u][v] == g.has_edge(u, v)))
    }
}

/// Closed unit family realizing exactly the token intersections of `t`.
pub fn order_to_family(t: &TokenOrder) -> Result<DIntervalFamily> {
    let lefts = left_endpoints_from_reach(&t.reach)?;
    for i in 0..t.len() {
        for j in i + 1..=t.reach[i] {
            if t.tokens[i].0 == t.tokens[j].0 {
                return input(format!("two tokens of {:?} intersect", t.tokens[i].0));
            }
        }
    }
    let mut per: Vec<(String, Vec<Interval>)> = Vec::new();
    for (i, (v, _)) in t.tokens.iter().enumerate() {
        let iv = Interval::unit(lefts[i].clone());
        match per.iter_mut().find(|(l, _)| l == v) {
            Some((_, is)) => is.push(iv),
            None => per.push((v.clone(), vec![iv])),
        }
    }
    per.sort_by(|a, b| a.0.cmp(&b.0));
    let d = per.iter().map(|(_, is)| is.len()).max().unwrap_or(1);
    let mut fam = DIntervalFamily::new(d, Openness::Closed);
    for (v, is) in per {
        fam.insert(v, is)?;
    }
    Ok(fam)
}

/// Same family with vertices listed in graph order.
pub(crate) fn order_family_for(g: &Graph, t: &TokenOrder) -> Result<DIntervalFamily> {
    let fam = order_to_family(t)?;
    let mut out = DIntervalFamily::new(fam.d, fam.openness);
    for l in g.labels() {
        let is = fam
            .get(l)
            .ok_or_else(|| Error::Input(format!("no token for {l:?}")))?;
        out.insert(l.clone(), is.to_vec())?;
    }
    Ok(out)
}

pub fn uniform_profile(g: &Graph, d: usize) -> Vec<usize> {
    vec![d; g.n()]
}

pub fn colored_profile(cg: &ColoredGraph) -> Vec<usize> {
    cg.colors().iter().map(|c| c.interval_count()).collect()
}

pub fn profile_from_map(g: &Graph, map: &BTreeMap<String, usize>) -> Result<Vec<usize>> {
    g.labels()
        .iter()
        .map(|l| {
            map.get(l)
                .copied()
                .filter(|&c| c > 0)
                .ok_or_else(|| Error::Input(format!("profile needs a positive count for {l:?}")))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct OrderConfig {
    pub token_bound: usize,
    pub capacity_override: bool,
    /// Maximum number of tokens sharing a point.
    pub depth_cap: Option<usize>,
    /// Entries kept in the table of failed states (recognition only).
    pub memo_limit: usize,
    pub dynamic_alpha: bool,
}

impl Default for OrderConfig {
    fn default() -> Self {
        Self {
            token_bound: DEFAULT_TOKEN_BOUND,
            capacity_override: capacity_override_from_env(),
            depth_cap: None,
            memo_limit: 1 << 21,
            dynamic_alpha: true,
        }
    }
}

impl OrderConfig {
    pub fn unbounded() -> Self {
        Self {
            capacity_override: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub memo_hits: u64,
    pub memo_size: usize,
}

/// Extra constraints checked at every placement.
pub(crate) trait Hook {
    /// Token `pos` is placed; `earliest` is the first still-open position
    /// (`pos` when none). Returns false to reject.
    fn place(&mut self, pos: usize, earliest: usize) -> bool;
    fn unplace(&mut self);
    /// Whether failed states may be cached (the hook's own state must then
    /// be a function of the combinatorial state).
    fn memo_ok(&self) -> bool;
    /// Whether leftover tokens may be completed as isolated singletons once
    /// every edge is covered.
    fn singleton_completion(&self) -> bool;
}

pub(crate) struct NoHook;

impl Hook for NoHook {
    fn place(&mut self, _: usize, _: usize) -> bool {
        true
    }
    fn unplace(&mut self) {}
    fn memo_ok(&self) -> bool {
        true
    }
    fn singleton_completion(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Stop at the first realization; prune freely.
    Recognize,
    /// Visit every realization once modulo copy relabeling, block order and
    /// per-block mirroring.
    Enumerate,
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64).max(1)])
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    /// True when every member of `self` is in `other`.
    fn subset_of(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct BlockState {
    start: usize,
    required: usize,
    has_required: bool,
}

type BlockKey = (usize, Vec<(u32, u32)>);

pub(crate) struct Core<'a, H: Hook> {
    g: &'a Graph,
    copies: Vec<usize>,
    adj: Vec<BitSet>,
    edge_id: Vec<u32>,
    total: usize,
    placed: Vec<usize>,
    open: Vec<bool>,
    win: BitSet,
    seq: Vec<usize>,
    reach: Vec<usize>,
    win_start: usize,
    cover: Vec<u32>,
    uncovered_bits: BitSet,
    uncovered: usize,
    mode: Mode,
    depth_cap: Option<usize>,
    dynamic_alpha: bool,
    memo: HashSet<Vec<u64>>,
    memo_limit: usize,
    blocks: Vec<BlockState>,
    block_keys: Vec<BlockKey>,
    pub(crate) hook: H,
    pub(crate) stats: SearchStats,
}

const OPEN: usize = usize::MAX;

impl<'a, H: Hook> Core<'a, H> {
    pub(crate) fn new(
        g: &'a Graph,
        profile: &[usize],
        cfg: &OrderConfig,
        mode: Mode,
        hook: H,
    ) -> Result<Self> {
        let n = g.n();
        if profile.len() != n || profile.contains(&0) {
            return input("profile needs a positive interval count for every vertex");
        }
        let total: usize = profile.iter().sum();
        if !cfg.capacity_override && total > cfg.token_bound {
            return Err(Error::Capacity(format!(
                "{total} interval tokens exceed the bound of {}; set {} to lift",
                cfg.token_bound,
                crate::budget::CAPACITY_OVERRIDE_ENV
            )));
        }
        let mut adj = vec![BitSet::new(n); n];
        let mut edge_id = vec![u32::MAX; n * n];
        for (e, (u, v)) in g.edges().enumerate() {
            adj[u].set(v);
            adj[v].set(u);
            edge_id[u * n + v] = e as u32;
            edge_id[v * n + u] = e as u32;
        }
        let m = g.m();
        let mut uncovered_bits = BitSet::new(m);
        for e in 0..m {
            uncovered_bits.set(e);
        }
        let required = 0;
        Ok(Self {
            g,
            copies: profile.to_vec(),
            adj,
            edge_id,
            total,
            placed: vec![0; n],
            open: vec![false; n],
            win: BitSet::new(n),
            seq: Vec::with_capacity(total),
            reach: Vec::with_capacity(total),
            win_start: 0,
            cover: vec![0; m],
            uncovered_bits,
            uncovered: m,
            mode,
            depth_cap: cfg.depth_cap,
            dynamic_alpha: cfg.dynamic_alpha,
            memo: HashSet::new(),
            memo_limit: cfg.memo_limit,
            blocks: vec![BlockState {
                start: 0,
                required,
                has_required: n == 0,
            }],
            block_keys: Vec::new(),
            hook,
            stats: SearchStats::default(),
        })
    }

    #[inline]
    fn unplaced(&self, v: usize) -> usize {
        self.copies[v] - self.placed[v]
    }

    #[inline]
    fn edge(&self, u: usize, v: usize) -> usize {
        self.edge_id[u * self.g.n() + v] as usize
    }

    /// An uncovered edge can still be covered by some future pair.
    #[inline]
    fn coverable(&self, u: usize, w: usize) -> bool {
        (self.unplaced(u) > 0 && (self.unplaced(w) > 0 || self.open[w]))
            || (self.open[u] && self.unplaced(w) > 0)
    }

    /// Exact necessary conditions on the uncovered edges at `u`.
    fn vertex_ok(&self, u: usize) -> bool {
        let mut pending: Vec<usize> = Vec::new();
        for &w in self.g.neighbors(u) {
            if self.cover[self.edge(u, w)] == 0 {
                if !self.coverable(u, w) {
                    return false;
                }
                pending.push(w);
            }
        }
        if self.dynamic_alpha && pending.len() > 1 {
            // a future token meets at most two disjoint tokens, an open one at most one more
            let cap = 2 * self.unplaced(u) + usize::from(self.open[u]);
            if pending.len() > cap && pending.len() <= 24 && self.alpha(&pending) > cap {
                return false;
            }
        }
        true
    }

    /// Independence number of the subgraph induced on `vs`.
    fn alpha(&self, vs: &[usize]) -> usize {
        fn go(adj: &[u32], cand: u32) -> usize {
            if cand == 0 {
                return 0;
            }
            let v = cand.trailing_zeros() as usize;
            let rest = cand & !(1 << v);
            let with = 1 + go(adj, rest & !adj[v]);
            if with as u32 > rest.count_ones() {
                return with;
            }
            with.max(go(adj, rest))
        }
        let k = vs.len();
        let local: Vec<u32> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| self.adj[vs[i]].get(vs[j]))
                    .fold(0u32, |m, j| m | (1 << j))
            })
            .collect();
        go(&local, if k == 32 { u32::MAX } else { (1u32 << k) - 1 })
    }

    /// Static check: the neighbors of `u` contain no independent set larger
    /// than twice its token count.
    pub(crate) fn static_ok(&self) -> bool {
        (0..self.g.n()).all(|u| {
            let ns = self.g.neighbors(u);
            ns.len() <= 2 * self.copies[u] || ns.len() > 24 || self.alpha(ns) <= 2 * self.copies[u]
        })
    }

    fn close_front(&mut self, at: usize) -> usize {
        let t = self.win_start;
        let v = self.seq[t];
        self.reach[t] = at;
        self.open[v] = false;
        self.win.clear(v);
        self.win_start += 1;
        v
    }

    fn reopen_front(&mut self) {
        self.win_start -= 1;
        let t = self.win_start;
        let v = self.seq[t];
        self.reach[t] = OPEN;
        self.open[v] = true;
        self.win.set(v);
    }

    fn place(&mut self, v: usize) {
        for t in self.win_start..self.seq.len() {
            let w = self.seq[t];
            let e = self.edge(v, w);
            self.cover[e] += 1;
            if self.cover[e] == 1 {
                self.uncovered -= 1;
                self.uncovered_bits.clear(e);
            }
        }
        self.placed[v] += 1;
        self.open[v] = true;
        self.win.set(v);
        self.seq.push(v);
        self.reach.push(OPEN);
    }

    fn unplace(&mut self, v: usize) {
        self.seq.pop();
        self.reach.pop();
        self.placed[v] -= 1;
        self.open[v] = false;
        self.win.clear(v);
        for t in self.win_start..self.seq.len() {
            let w = self.seq[t];
            let e = self.edge(v, w);
            self.cover[e] -= 1;
            if self.cover[e] == 0 {
                self.uncovered += 1;
                self.uncovered_bits.set(e);
            }
        }
    }

    /// Encoding of the block `[start, end)` read left to right and right to left.
    fn block_codes(&self, start: usize, end: usize) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
        let m = end - start;
        let r = |i: usize| {
            let x = self.reach[start + i];
            if x == OPEN {
                m - 1
            } else {
                x - start
            }
        };
        let fwd: Vec<(u32, u32)> = (0..m)
            .map(|i| (self.seq[start + i] as u32, (r(i) - i) as u32))
            .collect();
        let mut back = vec![(0u32, 0u32); m];
        let mut first = 0usize;
        for i in 0..m {
            while r(first) < i {
                first += 1;
            }
            // position i read backwards is m-1-i; its reach there is m-1-first
            back[m - 1 - i] = (self.seq[start + i] as u32, (i - first) as u32);
        }
        (fwd, back)
    }

    /// Checks run when the current block `[start, end)` is complete. In
    /// enumeration mode also returns the block's key for ordering.
    fn block_end(&self, end: usize) -> Option<Option<BlockKey>> {
        let b = self.blocks.last().expect("a block is always open");
        if !b.has_required {
            return None;
        }
        if self.mode == Mode::Recognize {
            return Some(None);
        }
        let (fwd, back) = self.block_codes(b.start, end);
        if fwd > back {
            return None;
        }
        let min_v = fwd.iter().map(|&(v, _)| v as usize).min().unwrap_or(0);
        let key = (min_v, fwd);
        if self.block_keys.last().is_some_and(|prev| *prev > key) {
            return None;
        }
        Some(Some(key))
    }

    fn memo_key(&self) -> Vec<u64> {
        let mut key = Vec::with_capacity(8 + self.uncovered_bits.0.len());
        let mut word = 0u64;
        for (i, &p) in self.placed.iter().enumerate() {
            word |= (p as u64 & 0xff) << ((i % 8) * 8);
            if i % 8 == 7 {
                key.push(word);
                word = 0;
            }
        }
        key.push(word);
        key.push((self.seq.len() - self.win_start) as u64);
        let mut word = 0u64;
        for (i, t) in (self.win_start..self.seq.len()).enumerate() {
            word |= (self.seq[t] as u64 & 0xffff) << ((i % 4) * 16);
            if i % 4 == 3 {
                key.push(word);
                word = 0;
            }
        }
        key.push(word);
        key.extend_from_slice(&self.uncovered_bits.0);
        let b = self.blocks.last().expect("open block");
        key.push(((b.required as u64) << 1) | u64::from(b.has_required));
        key
    }

    fn finished_reach(&self) -> Vec<usize> {
        let last = self.seq.len().saturating_sub(1);
        self.reach
            .iter()
            .map(|&r| if r == OPEN { last } else { r })
            .collect()
    }

    pub(crate) fn token_order(&self, seq: &[usize], reach: &[usize]) -> TokenOrder {
        let mut next = vec![0usize; self.g.n()];
        let tokens = seq
            .iter()
            .map(|&v| {
                let c = next[v];
                next[v] += 1;
                (self.g.label(v).to_string(), c)
            })
            .collect();
        TokenOrder {
            tokens,
            reach: reach.to_vec(),
        }
    }

    /// Current sequence with every leftover token appended as a singleton.
    fn completed(&self) -> (Vec<usize>, Vec<usize>) {
        let mut seq = self.seq.clone();
        let mut reach = self.finished_reach();
        for v in 0..self.g.n() {
            for _ in 0..self.unplaced(v) {
                reach.push(seq.len());
                seq.push(v);
            }
        }
        (seq, reach)
    }

    pub(crate) fn dfs(
        &mut self,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&Self, &[usize], &[usize]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        budget.tick()?;
        self.stats.nodes += 1;
        let len = self.seq.len();
        if len == self.total {
            if self.uncovered > 0 || self.block_end(len).is_none() {
                return Ok(ControlFlow::Continue(()));
            }
            let reach = self.finished_reach();
            let seq = self.seq.clone();
            return Ok(visit(self, &seq, &reach));
        }
        if self.mode == Mode::Recognize && self.uncovered == 0 && self.hook.singleton_completion() {
            let (seq, reach) = self.completed();
            return Ok(visit(self, &seq, &reach));
        }
        let memo = self.mode == Mode::Recognize && self.hook.memo_ok();
        let key = memo.then(|| self.memo_key());
        if let Some(k) = &key {
            if self.memo.contains(k) {
                self.stats.memo_hits += 1;
                return Ok(ControlFlow::Continue(()));
            }
        }
        let win_len = len - self.win_start;
        let mut closed = 0usize;
        let mut flow = ControlFlow::Continue(());
        'k: for k in 0..=win_len {
            if k > 0 {
                let v = self.close_front(len.wrapping_sub(1));
                closed += 1;
                if !self.vertex_ok(v) {
                    break;
                }
            }
            let remaining = win_len - k;
            if self.depth_cap.is_some_and(|cap| remaining + 1 > cap) {
                continue;
            }
            let ends_block = k == win_len && win_len > 0;
            if ends_block {
                let Some(bk) = self.block_end(len) else {
                    continue;
                };
                if let Some(bk) = bk {
                    self.block_keys.push(bk);
                }
                let required = (0..self.g.n()).find(|&v| self.unplaced(v) > 0).unwrap_or(0);
                self.blocks.push(BlockState {
                    start: len,
                    required,
                    has_required: false,
                });
            }
            let mut cands: Vec<(usize, usize)> = (0..self.g.n())
                .filter(|&v| self.unplaced(v) > 0 && !self.open[v] && self.win.subset_of(&self.adj[v]))
                .map(|v| {
                    let gain = (self.win_start..len)
                        .filter(|&t| self.cover[self.edge(v, self.seq[t])] == 0)
                        .count();
                    (v, gain)
                })
                .collect();
            if self.mode == Mode::Recognize {
                cands.sort_by_key(|&(v, gain)| (std::cmp::Reverse(gain), v));
            }
            for (v, _) in cands {
                let block = self.blocks.last_mut().expect("open block");
                let had = block.has_required;
                if v == block.required {
                    block.has_required = true;
                }
                self.place(v);
                let earliest = self.win_start;
                if self.vertex_ok(v) && self.hook.place(len, earliest) {
                    let r = self.dfs(budget, visit);
                    self.hook.unplace();
                    flow = r?;
                }
                self.unplace(v);
                self.blocks.last_mut().expect("open block").has_required = had;
                if flow.is_break() {
                    break 'k;
                }
            }
            if ends_block {
                self.blocks.pop();
                if self.mode == Mode::Enumerate {
                    self.block_keys.pop();
                }
            }
        }
        if flow.is_break() {
            return Ok(flow);
        }
        for _ in 0..closed {
            self.reopen_front();
        }
        if let Some(k) = key {
            if self.memo.len() < self.memo_limit {
                self.memo.insert(k);
            }
        }
        self.stats.memo_size = self.memo.len();
        Ok(flow)
    }
}

/// Token order realizing `g` with `profile[v]` unit intervals for vertex `v`,
/// or `None` when no unit family with these counts exists.
pub fn recognize_unit_d_order(
    g: &Graph,
    profile: &[usize],
    cfg: &OrderConfig,
    budget: &mut Budget,
) -> Result<(Option<TokenOrder>, SearchStats)> {
    let mut core = Core::new(g, profile, cfg, Mode::Recognize, NoHook)?;
    if !core.static_ok() {
        return Ok((None, core.stats));
    }
    let mut found = None;
    let _ = core.dfs(budget, &mut |c, seq, reach| {
        found = Some(c.token_order(seq, reach));
        ControlFlow::Break(())
    })?;
    Ok((found, core.stats))
}

pub fn recognize_unit_d(
    g: &Graph,
    profile: &[usize],
    cfg: &OrderConfig,
    budget: &mut Budget,
) -> Result<Option<DIntervalFamily>> {
    let (found, _) = recognize_unit_d_order(g, profile, cfg, budget)?;
    found.map(|t| order_family_for(g, &t)).transpose()
}

/// Visits realizations of `g`, each once up to relabeling copies of a vertex,
/// reordering the connected blocks of tokens, and mirroring blocks. Returns
/// the number of visits.
pub fn enumerate_realizations<F>(
    g: &Graph,
    profile: &[usize],
    cfg: &OrderConfig,
    budget: &mut Budget,
    limit: Option<u64>,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&TokenOrder) -> ControlFlow<()>,
{
    let mut core = Core::new(g, profile, cfg, Mode::Enumerate, NoHook)?;
    let mut count = 0u64;
    if limit == Some(0) {
        return Ok(0);
    }
    let _ = core.dfs(budget, &mut |c, seq, reach| {
        count += 1;
        let flow = visit(&c.token_order(seq, reach));
        if flow.is_break() || limit.is_some_and(|l| count >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(count)
}

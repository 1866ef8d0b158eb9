//! Canonical labeling of small graphs and a catalog of all graphs up to
//! isomorphism on few vertices.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_CANON_BOUND: usize = 24;

/// Bitmask adjacency: bit `v` of `adj[u]` is set iff `u ~ v`.
pub type Masks = Vec<u32>;

pub fn masks(g: &Graph) -> Masks {
    (0..g.n())
        .map(|u| g.neighbors(u).iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect()
}

/// Isomorphism-invariant string for graphs with at most
/// [`DEFAULT_CANON_BOUND`] vertices.
pub fn canonical_form(g: &Graph) -> Result<String> {
    canonical_form_bounded(g, DEFAULT_CANON_BOUND)
}

pub fn canonical_form_bounded(g: &Graph, bound: usize) -> Result<String> {
    let n = g.n();
    if n > bound || n > 32 {
        return Err(Error::Capacity(format!(
            "canonical form supports at most {} vertices, got {n}",
            bound.min(32)
        )));
    }
    let (rows, _) = canonical_masks(&masks(g));
    let mut s = format!("{n}:");
    for r in rows {
        s.push_str(&format!("{r:x}."));
    }
    Ok(s)
}

/// Canonically relabeled adjacency and the permutation used
/// (`perm[old] = new`).
pub fn canonical_masks(adj: &[u32]) -> (Vec<u32>, Vec<usize>) {
    let n = adj.len();
    let mut search = Search {
        adj,
        best: None,
        best_perm: Vec::new(),
    };
    let cells = refine(adj, vec![(0..n).collect()]);
    search.descend(cells);
    let rows = search.best.unwrap_or_default();
    (rows, search.best_perm)
}

struct Search<'a> {
    adj: &'a [u32],
    best: Option<Vec<u32>>,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, cells: Vec<Vec<usize>>) {
        let Some(target) = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i)
        else {
            self.leaf(&cells);
            return;
        };
        let cell = &cells[target];
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            // Swapping twins is an automorphism fixing every other vertex.
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let mut next = cells.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&u| u != v).collect();
            next[target] = vec![v];
            next.insert(target + 1, rest);
            let refined = refine(self.adj, next);
            self.descend(refined);
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let mu = self.adj[u] & !(1 << v);
        let mv = self.adj[v] & !(1 << u);
        mu == mv
    }

    fn leaf(&mut self, cells: &[Vec<usize>]) {
        let n = self.adj.len();
        let mut perm = vec![0usize; n];
        for (new, c) in cells.iter().enumerate() {
            perm[c[0]] = new;
        }
        let mut rows = vec![0u32; n];
        for u in 0..n {
            let mut m = 0u32;
            let mut bits = self.adj[u];
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                m |= 1 << perm[v];
            }
            rows[perm[u]] = m;
        }
        if self.best.as_ref().is_none_or(|b| rows > *b) {
            self.best = Some(rows);
            self.best_perm = perm;
        }
    }
}

/// Equitable refinement of an ordered partition. Splits depend only on
/// neighbor counts and cell positions, never on vertex names.
fn refine(adj: &[u32], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let mut changed = false;
        let mut s = 0;
        while s < cells.len() {
            let splitter: u32 = cells[s].iter().fold(0, |m, &v| m | (1 << v));
            let mut next = Vec::with_capacity(cells.len());
            let mut split_any = false;
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(u32, usize)> = cell
                    .iter()
                    .map(|&v| ((adj[v] & splitter).count_ones(), v))
                    .collect();
                keyed.sort_by_key(|&(k, _)| k);
                if keyed[0].0 == keyed[keyed.len() - 1].0 {
                    next.push(cell.clone());
                    continue;
                }
                split_any = true;
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        let mut part: Vec<usize> = keyed[start..i].iter().map(|&(_, v)| v).collect();
                        part.sort_unstable();
                        next.push(part);
                        start = i;
                    }
                }
            }
            cells = next;
            if split_any {
                changed = true;
                s = 0;
            } else {
                s += 1;
            }
        }
        if !changed {
            return cells;
        }
    }
}

/// One representative per isomorphism class of graphs on exactly `n`
/// vertices, for every `n` in `0..=max_n`. Vertices are labeled `0..n`.
pub fn graphs_up_to(max_n: usize) -> Vec<Graph> {
    let mut out = vec![Graph::new()];
    let mut level: Vec<Masks> = vec![Vec::new()];
    for n in 1..=max_n {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut next: Vec<Masks> = Vec::new();
        for chunk in level.chunks(256) {
            let forms: Vec<Vec<u32>> = chunk
                .par_iter()
                .flat_map_iter(|base| {
                    (0u32..(1 << (n - 1))).map(move |nbrs| {
                        let mut adj = base.clone();
                        for (u, row) in adj.iter_mut().enumerate() {
                            if nbrs & (1 << u) != 0 {
                                *row |= 1 << (n - 1);
                            }
                        }
                        adj.push(nbrs);
                        canonical_masks(&adj).0
                    })
                })
                .collect();
            for f in forms {
                if seen.insert(f.clone()) {
                    next.push(f);
                }
            }
        }
        out.extend(next.iter().map(|m| graph_from_masks(m)));
        level = next;
    }
    out
}

pub fn graph_from_masks(adj: &[u32]) -> Graph {
    let n = adj.len();
    let mut g = Graph::with_numbered_vertices(n);
    for u in 0..n {
        for v in u + 1..n {
            if adj[u] & (1 << v) != 0 {
                g.add_edge(u, v).expect("simple masks");
            }
        }
    }
    g
}

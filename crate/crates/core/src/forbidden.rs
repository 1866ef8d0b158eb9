//! Induced claw, net, tent and hole detection.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForbiddenKind {
    Claw,
    Net,
    Tent,
    Hole,
}

impl fmt::Display for ForbiddenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ForbiddenKind::Claw => "claw",
            ForbiddenKind::Net => "net",
            ForbiddenKind::Tent => "tent",
            ForbiddenKind::Hole => "hole",
        };
        f.write_str(s)
    }
}

/// An induced obstruction to being a unit interval graph.
///
/// Witness order: claw `[center, leaf, leaf, leaf]`; net `[a, b, c, a', b', c']`
/// with `x'` the pendant of `x`; tent `[a, b, c, x, y, z]` with `x`, `y`, `z`
/// seeing `ab`, `bc`, `ca`; hole in cycle order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenCertificate {
    pub kind: ForbiddenKind,
    pub witness: Vec<String>,
}

impl ForbiddenCertificate {
    /// Adjacency the witness must induce, as index pairs into `witness`.
    pub fn pattern_edges(kind: ForbiddenKind, len: usize) -> Vec<(usize, usize)> {
        match kind {
            ForbiddenKind::Claw => vec![(0, 1), (0, 2), (0, 3)],
            ForbiddenKind::Net => vec![(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)],
            ForbiddenKind::Tent => vec![
                (0, 1),
                (1, 2),
                (0, 2),
                (0, 3),
                (1, 3),
                (1, 4),
                (2, 4),
                (2, 5),
                (0, 5),
            ],
            ForbiddenKind::Hole => (0..len).map(|i| (i, (i + 1) % len)).collect(),
        }
    }

    /// True when the witness induces exactly the named pattern in `g`.
    pub fn verify(&self, g: &Graph) -> bool {
        let expected_len = match self.kind {
            ForbiddenKind::Claw => Some(4),
            ForbiddenKind::Net | ForbiddenKind::Tent => Some(6),
            ForbiddenKind::Hole => None,
        };
        let len = self.witness.len();
        if expected_len.is_some_and(|l| l != len) || len < 4 {
            return false;
        }
        let Ok(ids) = self
            .witness
            .iter()
            .map(|l| g.require(l))
            .collect::<Result<Vec<_>, _>>()
        else {
            return false;
        };
        let mut distinct = ids.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != len {
            return false;
        }
        let pattern = Self::pattern_edges(self.kind, len);
        for i in 0..len {
            for j in i + 1..len {
                let want = pattern.contains(&(i, j)) || pattern.contains(&(j, i));
                if g.has_edge(ids[i], ids[j]) != want {
                    return false;
                }
            }
        }
        true
    }

    fn from_ids(g: &Graph, kind: ForbiddenKind, ids: &[usize]) -> Self {
        Self {
            kind,
            witness: ids.iter().map(|&v| g.label(v).to_string()).collect(),
        }
    }
}

/// Some induced claw, hole, net or tent, searched in that order; `None`
/// exactly when `g` is a unit interval graph.
pub fn find_forbidden_unit_interval(g: &Graph) -> Option<ForbiddenCertificate> {
    if let Some(w) = find_claw(g) {
        return Some(ForbiddenCertificate::from_ids(g, ForbiddenKind::Claw, &w));
    }
    if let Some(w) = find_shortest_hole(g) {
        return Some(ForbiddenCertificate::from_ids(g, ForbiddenKind::Hole, &w));
    }
    if let Some(w) = find_net(g) {
        return Some(ForbiddenCertificate::from_ids(g, ForbiddenKind::Net, &w));
    }
    find_tent(g).map(|w| ForbiddenCertificate::from_ids(g, ForbiddenKind::Tent, &w))
}

pub fn find_claw(g: &Graph) -> Option<Vec<usize>> {
    for c in 0..g.n() {
        let ns = g.neighbors(c);
        for (i, &x) in ns.iter().enumerate() {
            for (j, &y) in ns.iter().enumerate().skip(i + 1) {
                if g.has_edge(x, y) {
                    continue;
                }
                for &z in &ns[j + 1..] {
                    if !g.has_edge(x, z) && !g.has_edge(y, z) {
                        return Some(vec![c, x, y, z]);
                    }
                }
            }
        }
    }
    None
}

/// A shortest induced cycle of length at least four, in cycle order.
pub fn find_shortest_hole(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut best: Option<Vec<usize>> = None;
    let mut blocked = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    for v in 0..n {
        let ns = g.neighbors(v);
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if g.has_edge(a, b) {
                    continue;
                }
                // A shortest a-b path whose interior avoids N[v] closes an induced cycle.
                blocked.iter_mut().for_each(|x| *x = false);
                blocked[v] = true;
                for &u in ns {
                    if u != a && u != b {
                        blocked[u] = true;
                    }
                }
                let limit = best.as_ref().map_or(usize::MAX, |h| h.len());
                if let Some(path) = bfs_path(g, a, b, &blocked, &mut parent, limit) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    if best.as_ref().is_none_or(|h| cycle.len() < h.len()) {
                        best = Some(cycle);
                    }
                }
            }
        }
        if best.as_ref().is_some_and(|h| h.len() == 4) {
            break;
        }
    }
    best
}

/// Shortest path from `a` to `b` avoiding `blocked`, returned only if the
/// resulting cycle (path plus one hub vertex) is shorter than `limit`.
fn bfs_path(
    g: &Graph,
    a: usize,
    b: usize,
    blocked: &[bool],
    parent: &mut [usize],
    limit: usize,
) -> Option<Vec<usize>> {
    parent.iter_mut().for_each(|p| *p = usize::MAX);
    let mut dist = vec![usize::MAX; g.n()];
    dist[a] = 0;
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        // path with dist+1 vertices plus the hub must stay below limit
        if dist[u] + 3 >= limit {
            return None;
        }
        for &w in g.neighbors(u) {
            if blocked[w] || parent[w] != usize::MAX {
                continue;
            }
            parent[w] = u;
            dist[w] = dist[u] + 1;
            queue.push_back(w);
        }
    }
    if parent[b] == usize::MAX {
        return None;
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    (path.len() + 1 < limit).then_some(path)
}

fn triangles(g: &Graph) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    (0..g.n()).flat_map(move |a| {
        g.neighbors(a)
            .iter()
            .copied()
            .filter(move |&b| b > a)
            .flat_map(move |b| {
                g.neighbors(b)
                    .iter()
                    .copied()
                    .filter(move |&c| c > b && g.has_edge(a, c))
                    .map(move |c| (a, b, c))
            })
    })
}

pub fn find_net(g: &Graph) -> Option<Vec<usize>> {
    for (a, b, c) in triangles(g) {
        let pend = |x: usize, y: usize, z: usize| -> Vec<usize> {
            g.neighbors(x)
                .iter()
                .copied()
                .filter(|&p| p != y && p != z && !g.has_edge(p, y) && !g.has_edge(p, z))
                .collect()
        };
        let (pa, pb, pc) = (pend(a, b, c), pend(b, a, c), pend(c, a, b));
        for &x in &pa {
            for &y in &pb {
                if g.has_edge(x, y) {
                    continue;
                }
                for &z in &pc {
                    if !g.has_edge(x, z) && !g.has_edge(y, z) {
                        return Some(vec![a, b, c, x, y, z]);
                    }
                }
            }
        }
    }
    None
}

pub fn find_tent(g: &Graph) -> Option<Vec<usize>> {
    for (a, b, c) in triangles(g) {
        let common = |x: usize, y: usize, z: usize| -> Vec<usize> {
            g.neighbors(x)
                .iter()
                .copied()
                .filter(|&p| p != y && p != z && g.has_edge(p, y) && !g.has_edge(p, z))
                .collect()
        };
        let (xab, ybc, zca) = (common(a, b, c), common(b, c, a), common(c, a, b));
        for &x in &xab {
            for &y in &ybc {
                if g.has_edge(x, y) {
                    continue;
                }
                for &z in &zca {
                    if !g.has_edge(x, z) && !g.has_edge(y, z) {
                        return Some(vec![a, b, c, x, y, z]);
                    }
                }
            }
        }
    }
    None
}

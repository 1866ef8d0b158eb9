//! Unit interval recognition by three LexBFS sweeps, plus the conversion of
//! an umbrella ordering into exact unit intervals.

use num_traits::One;

use crate::error::{input, Error, Result};
use crate::forbidden::{find_forbidden_unit_interval, ForbiddenCertificate};
use crate::graph::Graph;
use crate::interval::{int, DIntervalFamily, Interval, Openness, Rational};

/// Vertex order in which every closed neighborhood is consecutive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndifferenceOrdering {
    pub order: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum UnitIntervalResult {
    Unit {
        ordering: IndifferenceOrdering,
        family: DIntervalFamily,
    },
    Forbidden(ForbiddenCertificate),
}

impl UnitIntervalResult {
    pub fn is_unit(&self) -> bool {
        matches!(self, UnitIntervalResult::Unit { .. })
    }
}

/// Lexicographic BFS. With `prev`, ties go to the vertex appearing last in
/// `prev` (the "+" variant); otherwise to the smallest index.
fn lexbfs(adj: &[Vec<usize>], prev: Option<&[usize]>) -> Vec<usize> {
    let n = adj.len();
    let first: Vec<usize> = match prev {
        Some(p) => p.iter().rev().copied().collect(),
        None => (0..n).collect(),
    };
    let mut slices: Vec<Vec<usize>> = if n == 0 { Vec::new() } else { vec![first] };
    let mut mark = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(head) = slices.first_mut() {
        let p = head.remove(0);
        if head.is_empty() {
            slices.remove(0);
        }
        order.push(p);
        for &w in &adj[p] {
            mark[w] = true;
        }
        let mut next = Vec::with_capacity(slices.len() + 4);
        for s in slices.drain(..) {
            let (yes, no): (Vec<usize>, Vec<usize>) = s.into_iter().partition(|&v| mark[v]);
            if !yes.is_empty() {
                next.push(yes);
            }
            if !no.is_empty() {
                next.push(no);
            }
        }
        slices = next;
        for &w in &adj[p] {
            mark[w] = false;
        }
    }
    order
}

/// Candidate umbrella ordering: LexBFS, then two LexBFS+ sweeps.
pub(crate) fn three_sweep(adj: &[Vec<usize>]) -> Vec<usize> {
    let s1 = lexbfs(adj, None);
    let s2 = lexbfs(adj, Some(&s1));
    lexbfs(adj, Some(&s2))
}

/// `reach[i]` for the ordering, or `None` if some forward neighborhood is not
/// consecutive or reach decreases.
pub(crate) fn umbrella_reach(adj: &[Vec<usize>], order: &[usize]) -> Option<Vec<usize>> {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut reach = Vec::with_capacity(n);
    let mut last = 0usize;
    for (i, &v) in order.iter().enumerate() {
        let mut fwd = 0usize;
        let mut far = i;
        for &w in &adj[v] {
            if pos[w] > i {
                fwd += 1;
                far = far.max(pos[w]);
            }
        }
        if far - i != fwd || far < last {
            return None;
        }
        last = far;
        reach.push(far);
    }
    Some(reach)
}

/// Fast yes/no unit interval test.
pub fn is_unit_interval_adj(adj: &[Vec<usize>]) -> bool {
    let order = three_sweep(adj);
    umbrella_reach(adj, &order).is_some()
}

pub fn is_unit_interval(g: &Graph) -> bool {
    is_unit_interval_adj(g.adjacency())
}

pub fn recognize_unit_interval(g: &Graph) -> Result<UnitIntervalResult> {
    let adj = g.adjacency();
    let order = three_sweep(adj);
    match umbrella_reach(adj, &order) {
        Some(reach) => {
            let lefts = left_endpoints_from_reach(&reach)?;
            let mut family = DIntervalFamily::new(1, Openness::Closed);
            let mut slot: Vec<Option<Rational>> = vec![None; g.n()];
            for (i, &v) in order.iter().enumerate() {
                slot[v] = Some(lefts[i].clone());
            }
            for (v, l) in slot.into_iter().enumerate() {
                family.insert(g.label(v), vec![Interval::unit(l.expect("every vertex placed"))])?;
            }
            let ordering = IndifferenceOrdering {
                order: order.iter().map(|&v| g.label(v).to_string()).collect(),
            };
            Ok(UnitIntervalResult::Unit { ordering, family })
        }
        None => find_forbidden_unit_interval(g)
            .map(UnitIntervalResult::Forbidden)
            .ok_or_else(|| {
                Error::Input("ordering check failed but no obstruction exists".into())
            }),
    }
}

/// Strictly increasing left endpoints such that positions `i < j` get unit
/// intervals meeting exactly when `j <= reach[i]`.
///
/// Each endpoint is the midpoint of its feasible window; a position no
/// earlier interval reaches starts 3 after its predecessor, leaving a gap of 2.
pub fn left_endpoints_from_reach(reach: &[usize]) -> Result<Vec<Rational>> {
    let n = reach.len();
    for i in 0..n {
        if reach[i] < i || reach[i] >= n || (i > 0 && reach[i] < reach[i - 1]) {
            return input(format!("infeasible reach at position {i}"));
        }
    }
    let one = Rational::one();
    let two = int(2);
    let mut l: Vec<Rational> = Vec::with_capacity(n);
    let mut s = 0usize; // earliest position still reaching j
    for j in 0..n {
        while s < j && reach[s] < j {
            s += 1;
        }
        let lj = if j == 0 {
            int(0)
        } else if s == j {
            &l[j - 1] + int(3)
        } else {
            let hi = &l[s] + &one;
            let mut lo = l[j - 1].clone();
            if s > 0 {
                let after = &l[s - 1] + &one;
                if after > lo {
                    lo = after;
                }
            }
            debug_assert!(lo < hi);
            (lo + hi) / &two
        };
        l.push(lj);
    }
    Ok(l)
}

/// Unit family from an ordering that must satisfy the umbrella property.
pub fn proper_to_unit(ordering: &IndifferenceOrdering, g: &Graph) -> Result<DIntervalFamily> {
    if ordering.order.len() != g.n() {
        return input("ordering must list every vertex exactly once");
    }
    let ids = ordering
        .order
        .iter()
        .map(|l| g.require(l))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = vec![false; g.n()];
    for &v in &ids {
        if std::mem::replace(&mut seen[v], true) {
            return input("ordering must list every vertex exactly once");
        }
    }
    let Some(reach) = umbrella_reach(g.adjacency(), &ids) else {
        let (a, b, c) = umbrella_violation(g, &ids).expect("reach check failed");
        return input(format!(
            "ordering violates the umbrella property at ({:?}, {:?}, {:?})",
            g.label(a),
            g.label(b),
            g.label(c)
        ));
    };
    let lefts = left_endpoints_from_reach(&reach)?;
    let mut family = DIntervalFamily::new(1, Openness::Closed);
    for v in 0..g.n() {
        let i = ids.iter().position(|&w| w == v).expect("permutation");
        family.insert(g.label(v), vec![Interval::unit(lefts[i].clone())])?;
    }
    Ok(family)
}

/// A triple `i < j < k` in the order with `v_i ~ v_k` but a missing edge
/// `v_i v_j` or `v_j v_k`.
fn umbrella_violation(g: &Graph, ids: &[usize]) -> Option<(usize, usize, usize)> {
    let n = ids.len();
    for i in 0..n {
        for k in i + 2..n {
            if !g.has_edge(ids[i], ids[k]) {
                continue;
            }
            for j in i + 1..k {
                if !g.has_edge(ids[i], ids[j]) || !g.has_edge(ids[j], ids[k]) {
                    return Some((ids[i], ids[j], ids[k]));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forbidden::ForbiddenKind;
    use crate::interval::{validate_representation, ClassConstraints};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::with_numbered_vertices(n);
        for &(u, v) in edges {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    fn assert_represents(g: &Graph, fam: &DIntervalFamily) {
        let r = validate_representation(g, fam, &ClassConstraints::unit()).unwrap();
        assert!(r.is_empty(), "{r:?}");
    }

    #[test]
    fn p5_yields_path_order() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let UnitIntervalResult::Unit { ordering, family } = recognize_unit_interval(&g).unwrap()
        else {
            panic!("P5 is unit interval");
        };
        let fwd: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let mut rev = fwd.clone();
        rev.reverse();
        assert!(ordering.order == fwd || ordering.order == rev);
        assert_represents(&g, &family);
    }

    #[test]
    fn claw_and_c5_are_rejected() {
        let claw = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        match recognize_unit_interval(&claw).unwrap() {
            UnitIntervalResult::Forbidden(c) => assert_eq!(c.kind, ForbiddenKind::Claw),
            _ => panic!("claw accepted"),
        }
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        match recognize_unit_interval(&c5).unwrap() {
            UnitIntervalResult::Forbidden(c) => {
                assert_eq!(c.kind, ForbiddenKind::Hole);
                assert_eq!(c.witness.len(), 5);
            }
            _ => panic!("C5 accepted"),
        }
    }

    #[test]
    fn proper_to_unit_small_cases() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let ord = |v: &[&str]| IndifferenceOrdering {
            order: v.iter().map(|s| s.to_string()).collect(),
        };
        let fam = proper_to_unit(&ord(&["0", "1", "2"]), &p3).unwrap();
        assert_eq!(fam.intersection_graph(), p3);

        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let fam = proper_to_unit(&ord(&["0", "1", "2"]), &k3).unwrap();
        assert_represents(&k3, &fam);
        assert_eq!(fam.depth().unwrap(), 3);

        let e3 = graph(3, &[]);
        let fam = proper_to_unit(&ord(&["0", "1", "2"]), &e3).unwrap();
        assert_eq!(fam.intersection_graph().m(), 0);

        let err = proper_to_unit(&ord(&["0", "2", "1"]), &p3).unwrap_err();
        assert!(err.to_string().contains("umbrella"));
    }

    #[test]
    fn left_endpoints_are_tight() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (4, 5)]);
        let order: Vec<usize> = three_sweep(g.adjacency());
        let reach = umbrella_reach(g.adjacency(), &order).unwrap();
        let l = left_endpoints_from_reach(&reach).unwrap();
        let one = Rational::one();
        for i in 0..6 {
            for j in i + 1..6 {
                let adjacent = g.has_edge(order[i], order[j]);
                assert!(l[i] < l[j]);
                assert_eq!(l[j] <= &l[i] + &one, adjacent);
            }
        }
    }

    #[test]
    fn output_is_deterministic() {
        let g = graph(7, &[(0, 1), (1, 2), (2, 3), (4, 5), (1, 3), (5, 6)]);
        let a = recognize_unit_interval(&g).unwrap();
        let b = recognize_unit_interval(&g).unwrap();
        match (a, b) {
            (
                UnitIntervalResult::Unit { ordering: o1, family: f1 },
                UnitIntervalResult::Unit { ordering: o2, family: f2 },
            ) => {
                assert_eq!(o1, o2);
                assert_eq!(f1.to_json(), f2.to_json());
            }
            _ => panic!("expected unit interval"),
        }
    }
}

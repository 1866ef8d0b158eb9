//! The colored graph built from a restricted formula, the black-vertex
//! replacement that removes colors, and the lift to d intervals.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cnf::RestrictedForm;
use crate::error::{input, Result};
use crate::graph::{Color, ColoredGraph, Graph, GraphJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Positive occurrence in the 3-clause.
    Literal1,
    /// Positive occurrence in a 2-clause.
    Literal2,
    /// Negated occurrence.
    LiteralN,
    PrivateA,
    PrivateB,
    PrivateC,
    ClauseL,
    ClauseP,
    GadgetInternal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SizeStats {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub white: usize,
    pub black: usize,
}

impl SizeStats {
    pub fn of(cg: &ColoredGraph) -> Self {
        Self {
            vertices: cg.graph.n(),
            edges: cg.graph.m(),
            max_degree: cg.graph.max_degree(),
            white: cg.whites().count(),
            black: cg.blacks().count(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionTrace {
    pub colored_graph: GraphJson,
    pub vertex_roles: BTreeMap<String, Role>,
    pub size_stats: SizeStats,
    #[serde(skip)]
    pub graph: ColoredGraph,
}

pub(crate) struct Builder {
    g: Graph,
    colors: Vec<Color>,
    roles: BTreeMap<String, Role>,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Self {
            g: Graph::new(),
            colors: Vec::new(),
            roles: BTreeMap::new(),
        }
    }

    pub(crate) fn vertex(&mut self, label: String, color: Color, role: Role) -> Result<usize> {
        let v = self.g.add_vertex(label.clone())?;
        self.colors.push(color);
        self.roles.insert(label, role);
        Ok(v)
    }

    pub(crate) fn edge(&mut self, a: &str, b: &str) -> Result<()> {
        self.g.add_edge_by_label(a, b)
    }

    pub(crate) fn variable(&mut self, i: usize) -> Result<()> {
        let lits = [
            (format!("x{i}_1"), Role::Literal1),
            (format!("x{i}_2"), Role::Literal2),
            (format!("x{i}_N"), Role::LiteralN),
        ];
        let privs = [
            (format!("A{i}"), Role::PrivateA),
            (format!("B{i}"), Role::PrivateB),
            (format!("C{i}"), Role::PrivateC),
        ];
        for (l, r) in &lits {
            self.vertex(l.clone(), Color::White, *r)?;
        }
        for (l, r) in &privs {
            self.vertex(l.clone(), Color::Black, *r)?;
        }
        for (w, _) in &lits {
            for (b, _) in &privs {
                self.edge(w, b)?;
            }
        }
        self.edge(&lits[0].0, &lits[1].0)?;
        self.edge(&privs[2].0, &privs[0].0)?;
        self.edge(&privs[2].0, &privs[1].0)
    }

    pub(crate) fn two_clause(&mut self, alpha: usize, a: &str, b: &str) -> Result<()> {
        let l = format!("L{alpha}");
        let p = format!("p{alpha}");
        self.vertex(l.clone(), Color::Black, Role::ClauseL)?;
        self.vertex(p.clone(), Color::Black, Role::ClauseP)?;
        self.edge(a, b)?;
        self.edge(a, &l)?;
        self.edge(b, &l)?;
        self.edge(&l, &p)
    }

    pub(crate) fn finish(self) -> Result<ReductionTrace> {
        let graph = ColoredGraph::new(self.g, self.colors)?;
        Ok(ReductionTrace {
            colored_graph: graph.to_json_value(),
            vertex_roles: self.roles,
            size_stats: SizeStats::of(&graph),
            graph,
        })
    }
}

/// Literal vertex carrying a 2-clause literal.
fn two_clause_vertex(l: i32) -> String {
    if l > 0 {
        format!("x{l}_2")
    } else {
        format!("x{}_N", -l)
    }
}

/// Variable gadgets for every variable, a triangle on the `x_1` vertices of
/// each 3-clause, and an `L`/`p` pair for each 2-clause (numbered by clause
/// position, from 1).
pub fn build_reduction_graph(r: &RestrictedForm) -> Result<ReductionTrace> {
    // re-check in case the fields were edited after construction
    let r = RestrictedForm::new(r.formula.clone())?;
    let mut b = Builder::new();
    for i in 1..=r.num_vars() {
        b.variable(i)?;
    }
    for (alpha, c) in r.formula.clauses.iter().enumerate() {
        if c.len() == 3 {
            let x: Vec<String> = c.iter().map(|l| format!("x{l}_1")).collect();
            b.edge(&x[0], &x[1])?;
            b.edge(&x[1], &x[2])?;
            b.edge(&x[2], &x[0])?;
        } else {
            b.two_clause(alpha + 1, &two_clause_vertex(c[0]), &two_clause_vertex(c[1]))?;
        }
    }
    b.finish()
}

/// One variable gadget on its own (`i = 1`).
pub fn variable_gadget() -> ColoredGraph {
    let mut b = Builder::new();
    b.variable(1).expect("fresh labels");
    b.finish().expect("consistent").graph
}

/// Three variable gadgets joined by the triangle of the 3-clause `(x1 x2 x3)`.
pub fn three_clause_gadget() -> ColoredGraph {
    let mut b = Builder::new();
    for i in 1..=3 {
        b.variable(i).expect("fresh labels");
    }
    for (u, v) in [("x1_1", "x2_1"), ("x2_1", "x3_1"), ("x3_1", "x1_1")] {
        b.edge(u, v).expect("fresh edge");
    }
    b.finish().expect("consistent").graph
}

/// Two variable gadgets joined by the 2-clause `(x1 | -x2)`.
pub fn two_clause_gadget() -> ColoredGraph {
    let mut b = Builder::new();
    b.variable(1).expect("fresh labels");
    b.variable(2).expect("fresh labels");
    b.two_clause(1, "x1_2", "x2_N").expect("fresh labels");
    b.finish().expect("consistent").graph
}

/// Result of attaching gadgets to an existing graph.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetTrace {
    #[serde(skip)]
    pub graph: Graph,
    /// New vertex label to the vertex whose gadget it belongs to.
    pub owner: BTreeMap<String, String>,
    pub added_vertices: usize,
    pub added_edges: usize,
}

/// Attaches to `v` a triangle `v, a_0, b_0` where each of `a_0`, `b_0` gets
/// `leaves` pendant vertices.
fn attach_hub_gadget(g: &mut Graph, v: &str, leaves: usize, owner: &mut BTreeMap<String, String>) -> Result<()> {
    let a0 = format!("a{v}_0");
    let b0 = format!("b{v}_0");
    for hub in [&a0, &b0] {
        g.add_vertex(hub.clone())?;
        owner.insert(hub.clone(), v.to_string());
    }
    g.add_edge_by_label(v, &a0)?;
    g.add_edge_by_label(v, &b0)?;
    g.add_edge_by_label(&a0, &b0)?;
    for (prefix, hub) in [("a", &a0), ("b", &b0)] {
        for k in 1..=leaves {
            let leaf = format!("{prefix}{v}_{k}");
            g.add_vertex(leaf.clone())?;
            owner.insert(leaf.clone(), v.to_string());
            g.add_edge_by_label(hub, &leaf)?;
        }
    }
    Ok(())
}

/// Replaces colors by structure: every black vertex gets the 8-vertex
/// gadget that uses up one of its two intervals.
pub fn decolorize(cg: &ColoredGraph) -> Result<GadgetTrace> {
    let mut g = cg.graph.clone();
    let mut owner = BTreeMap::new();
    let blacks: Vec<String> = cg.blacks().map(|v| cg.graph.label(v).to_string()).collect();
    for v in &blacks {
        attach_hub_gadget(&mut g, v, 3, &mut owner)?;
    }
    Ok(GadgetTrace {
        added_vertices: g.n() - cg.graph.n(),
        added_edges: g.m() - cg.graph.m(),
        graph: g,
        owner,
    })
}

/// Every vertex gets the hub gadget with `2d - 1` leaves per hub, which uses
/// up one of its `d` intervals.
pub fn lift_to_d(g: &Graph, d: usize) -> Result<GadgetTrace> {
    if d < 3 {
        return input(format!("lift needs d >= 3, got {d}"));
    }
    let mut out = g.clone();
    let mut owner = BTreeMap::new();
    for v in g.labels() {
        attach_hub_gadget(&mut out, v, 2 * d - 1, &mut owner)?;
    }
    Ok(GadgetTrace {
        added_vertices: out.n() - g.n(),
        added_edges: out.m() - g.m(),
        graph: out,
        owner,
    })
}

/// The gadget `B_v` alone, on vertex `v`.
pub fn black_gadget() -> Graph {
    let mut single = Graph::new();
    single.add_vertex("v").expect("fresh");
    let cg = ColoredGraph::uniform(single, Color::Black);
    decolorize(&cg).expect("fresh labels").graph
}

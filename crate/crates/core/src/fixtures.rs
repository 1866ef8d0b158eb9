//! Named gadgets, figure representations and formulas.
//!
//! Representations are transcribed from the figures' combinatorial layout
//! (which intervals overlap, which leave gaps), not from pixel positions.
//! The block fixtures use variables `i, j, k, m, l` = `1, 2, 3, 4, 5`, with
//! 2-clause vertices `L1`/`p1` joining `x4_2, x1_2` and `L2`/`p2` joining
//! `x5_2, x3_2`.

use crate::cnf::{padding_block, CnfFormula};
use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, Graph};
use crate::interval::DIntervalFamily;
use crate::reduction::{
    black_gadget, three_clause_gadget, two_clause_gadget, variable_gadget, Builder, Role,
};

const FIG4A: &str = include_str!("../fixtures/fig4a-rep.json");
const FIG4B: &str = include_str!("../fixtures/fig4b-rep.json");
const FIG6: &str = include_str!("../fixtures/fig6-rep.json");
const FIG8: &str = include_str!("../fixtures/fig8-rep.json");
const FIG9: &str = include_str!("../fixtures/fig9-rep.json");

pub const FIXTURE_NAMES: &[&str] = &[
    "variable-gadget",
    "three-clause",
    "two-clause",
    "black-gadget",
    "fig4a-rep",
    "fig4b-rep",
    "fig6-rep",
    "fig8-block",
    "fig9-block",
    "fig9-rep",
    "padding-block-cnf",
];

pub enum Fixture {
    Graph(ColoredGraph),
    Rep(DIntervalFamily),
    Cnf(CnfFormula),
}

/// Looks up a fixture by name. Besides the listed names, `fig4-graph`,
/// `fig6-graph`, `fig8-graph`, `fig9-graph`, `fig8-rep` and
/// `stubbed-variable-gadget` are accepted.
pub fn fixture(name: &str) -> Result<Fixture> {
    let rep = |s: &str| DIntervalFamily::parse(s).map(Fixture::Rep);
    match name {
        "variable-gadget" | "fig4-graph" | "fig4a-graph" | "fig4b-graph" => {
            Ok(Fixture::Graph(variable_gadget()))
        }
        "stubbed-variable-gadget" => Ok(Fixture::Graph(stubbed_variable_gadget())),
        "three-clause" => Ok(Fixture::Graph(three_clause_gadget())),
        "two-clause" => Ok(Fixture::Graph(two_clause_gadget())),
        "black-gadget" | "fig6-graph" => Ok(Fixture::Graph(fig6_graph())),
        "fig4a-rep" => rep(FIG4A),
        "fig4b-rep" => rep(FIG4B),
        "fig6-rep" => rep(FIG6),
        "fig8-block" | "fig8-rep" => rep(FIG8),
        "fig9-rep" => rep(FIG9),
        "fig9-block" | "fig8-graph" | "fig9-graph" => Ok(Fixture::Graph(block_graph())),
        "padding-block-cnf" => Ok(Fixture::Cnf(padding_block())),
        _ => Err(Error::Input(format!(
            "unknown fixture {name:?}; known: {}",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}

pub fn fixture_graph(name: &str) -> Result<ColoredGraph> {
    match fixture(name)? {
        Fixture::Graph(g) => Ok(g),
        _ => Err(Error::Input(format!("fixture {name:?} is not a graph"))),
    }
}

pub fn fixture_rep(name: &str) -> Result<DIntervalFamily> {
    match fixture(name)? {
        Fixture::Rep(r) => Ok(r),
        _ => Err(Error::Input(format!("fixture {name:?} is not a representation"))),
    }
}

/// `B_v` with every vertex white: the uncolored graph gives everyone two intervals.
pub fn fig6_graph() -> ColoredGraph {
    ColoredGraph::uniform(black_gadget(), Color::White)
}

/// The longest contiguous block: the gadgets of the two false variables of a
/// 3-clause, the true variable's `x_1`, and the 2-clauses hanging off both
/// false variables. Colors give the interval count of each vertex inside the
/// block: white for the four literals drawn twice, black for the rest.
pub fn block_graph() -> ColoredGraph {
    let mut b = Builder::new();
    b.variable(1).expect("fresh");
    b.variable(3).expect("fresh");
    for l in ["x2_1", "x4_2", "x5_2"] {
        b.vertex(l.to_string(), Color::White, Role::Literal1).expect("fresh");
    }
    for (u, v) in [("x1_1", "x2_1"), ("x2_1", "x3_1"), ("x3_1", "x1_1")] {
        b.edge(u, v).expect("fresh");
    }
    b.two_clause(1, "x4_2", "x1_2").expect("fresh");
    b.two_clause(2, "x5_2", "x3_2").expect("fresh");
    let mut cg = b.finish().expect("consistent").graph;
    for v in 0..cg.graph.n() {
        let twice = matches!(cg.graph.label(v), "x1_1" | "x1_2" | "x3_1" | "x3_2");
        cg.set_color(v, if twice { Color::White } else { Color::Black });
    }
    cg
}

/// The variable gadget with a black pendant on each literal vertex, standing
/// in for its external neighbors.
pub fn stubbed_variable_gadget() -> ColoredGraph {
    let base = variable_gadget();
    let mut g: Graph = base.graph.clone();
    let mut colors = base.colors().to_vec();
    for lit in ["x1_1", "x1_2", "x1_N"] {
        let stub = format!("s_{lit}");
        g.add_vertex(stub.clone()).expect("fresh");
        g.add_edge_by_label(lit, &stub).expect("fresh");
        colors.push(Color::Black);
    }
    ColoredGraph::new(g, colors).expect("one color per vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{validate_representation, ClassConstraints};

    fn counts_ok(g: &ColoredGraph, rep: &str, unit: bool) {
        let fam = fixture_rep(rep).unwrap();
        let c = if unit {
            ClassConstraints::colored_unit(g)
        } else {
            ClassConstraints::default().with_counts(g.profile())
        };
        let r = validate_representation(&g.graph, &fam, &c).unwrap();
        assert!(r.is_empty(), "{rep}: {r:?}");
    }

    #[test]
    fn every_name_resolves() {
        for n in FIXTURE_NAMES {
            fixture(n).unwrap();
        }
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn figure_fixtures_validate() {
        let vg = variable_gadget();
        counts_ok(&vg, "fig4a-rep", true);
        counts_ok(&vg, "fig4b-rep", true);
        counts_ok(&fig6_graph(), "fig6-rep", true);
        counts_ok(&block_graph(), "fig8-block", false);
        counts_ok(&block_graph(), "fig9-rep", false);
    }

    #[test]
    fn block_graph_shape() {
        let g = block_graph();
        assert_eq!((g.graph.n(), g.graph.m()), (19, 35));
        assert_eq!(g.whites().count(), 4);
    }
}

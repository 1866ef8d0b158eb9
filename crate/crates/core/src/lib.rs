//! Exact algorithms for unit multiple-interval graphs: recognition oracles,
//! representation checking, and the SAT-to-graph reduction with its gadgets.

pub mod budget;
pub mod canon;
pub mod cnf;
pub mod e2e;
pub mod error;
pub mod fixtures;
pub mod forbidden;
pub mod graph;
pub mod interval;
pub mod intrep;
pub mod order;
pub mod pipeline;
pub mod reduction;
pub mod split;
pub mod unit_interval;

pub use budget::Budget;
pub use error::{Error, Result};
pub use forbidden::{find_forbidden_unit_interval, ForbiddenCertificate, ForbiddenKind};
pub use graph::{Color, ColoredGraph, Graph, GraphJson};

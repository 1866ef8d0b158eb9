//! Workloads shared by the benches.

use mil_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// G(n, p) with a fixed seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_numbered_vertices(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    g
}

/// A path of `n` cliques of size `k`, consecutive cliques joined completely:
/// a unit interval graph that makes the sweeps do real work.
pub fn clique_path(n: usize, k: usize) -> Graph {
    let mut g = Graph::with_numbered_vertices(n * k);
    for u in 0..n * k {
        for v in u + 1..n * k {
            if v / k <= u / k + 1 {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    g
}

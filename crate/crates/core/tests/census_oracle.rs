use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topocontro_core::graph::SimpleDigraph;
use topocontro_core::motifs::census_of;
use topocontro_core::oracle::census_by_enumeration;

fn random_digraph(rng: &mut ChaCha8Rng) -> SimpleDigraph {
    let n = rng.gen_range(0..=50);
    let density: f64 = rng.gen_range(0.0..0.3);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    SimpleDigraph::from_edges(n, edges)
}

#[test]
fn optimized_census_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..120 {
        let g = random_digraph(&mut rng);
        assert_eq!(census_of(&g).counts, census_by_enumeration(&g), "trial {trial}");
    }
}

#[test]
fn census_is_relabeling_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..60 {
        let g = random_digraph(&mut rng);
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        perm.shuffle(&mut rng);
        assert_eq!(census_of(&g), census_of(&g.permuted(&perm)));
    }
}

#[test]
fn adding_an_edge_never_shrinks_the_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let g = random_digraph(&mut rng);
        let n = g.node_count();
        if n < 2 {
            continue;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v {
            continue;
        }
        let bigger = SimpleDigraph::from_edges(n, g.edges().chain([(u, v)]));
        assert!(census_of(&bigger).total() >= census_of(&g).total());
    }
}

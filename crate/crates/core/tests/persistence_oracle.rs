use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topocontro_core::graph::{graph_distance_matrix, DistanceMode, UndirectedGraph};
use topocontro_core::oracle::{betti_at, persistence_by_ranks, simplex_counts_at};
use topocontro_core::tda::{
    build_vr_filtration, compute_persistence, diagram_to_image, Bar, ImageConfig, PersistenceDiagram,
};

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> UndirectedGraph {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.1..0.8);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=4)));
            }
        }
    }
    UndirectedGraph::from_edges(n, edges)
}

fn engine_bars(g: &UndirectedGraph, mode: DistanceMode) -> Vec<(u8, f64, f64)> {
    let dist = graph_distance_matrix(g, mode);
    let filt = build_vr_filtration(&dist, dist.max_finite(), 2).unwrap();
    compute_persistence(&filt)
        .bars
        .iter()
        .map(|b| (b.dim, b.birth, b.death))
        .collect()
}

#[test]
fn reduction_matches_rank_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7da);
    for trial in 0..300 {
        let g = random_graph(&mut rng, 7);
        let mode = if trial % 2 == 0 { DistanceMode::Hop } else { DistanceMode::InverseWeight };
        let dist = graph_distance_matrix(&g, mode);
        let expected = persistence_by_ranks(&dist, dist.max_finite());
        assert_eq!(engine_bars(&g, mode), expected, "trial {trial}: {g:?}");
    }
}

#[test]
fn infinite_h0_bars_count_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 12);
        let bars = engine_bars(&g, DistanceMode::Hop);
        let essential = bars.iter().filter(|b| b.0 == 0 && b.2.is_infinite()).count();
        assert_eq!(essential, g.component_count());
        assert!(bars.iter().filter(|b| b.0 == 0).all(|b| b.1 == 0.0));
        assert!(bars.iter().all(|b| b.1 < b.2));
    }
}

#[test]
fn euler_characteristic_matches_oracle_betti_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let g = random_graph(&mut rng, 7);
        let dist = graph_distance_matrix(&g, DistanceMode::Hop);
        let eps = dist.max_finite();
        for t in [0.0, 1.0, 2.0, 3.0, eps] {
            let [v, e, f] = simplex_counts_at(&dist, eps, t);
            let [b0, b1, b2] = betti_at(&dist, eps, t);
            assert_eq!(v as i64 - e as i64 + f as i64, b0 as i64 - b1 as i64 + b2 as i64);
        }
    }
}

#[test]
fn square_fixture() {
    let g = UndirectedGraph::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
    let dist = graph_distance_matrix(&g, DistanceMode::Hop);
    // hop square: sides 1, diagonals 2
    let expected = vec![
        (0, 0.0, 1.0),
        (0, 0.0, 1.0),
        (0, 0.0, 1.0),
        (0, 0.0, f64::INFINITY),
        (1, 1.0, 2.0),
    ];
    assert_eq!(persistence_by_ranks(&dist, 2.0), expected);
    assert_eq!(engine_bars(&g, DistanceMode::Hop), expected);
}

#[test]
fn relabeling_preserves_f4() {
    use topocontro_core::graph::{build_interaction_graph, GraphConfig};
    use topocontro_core::record::{CommentRecord, ThreadRecord};
    use topocontro_core::tda::{f4_vector, TdaConfig};
    let mk = |names: [&str; 4]| {
        let c = |id: &str, parent: &str, a: &str, t| CommentRecord {
            comment_id: id.into(),
            parent_id: parent.into(),
            author: a.into(),
            body: String::new(),
            created_utc: t,
        };
        ThreadRecord {
            post_id: "p".into(),
            subreddit: "s".into(),
            title: String::new(),
            selftext: String::new(),
            author: names[0].into(),
            created_utc: 0,
            upvote_ratio: 0.5,
            comments: vec![
                c("1", "p", names[1], 1),
                c("2", "1", names[2], 2),
                c("3", "2", names[3], 3),
                c("4", "3", names[0], 4),
            ],
        }
    };
    let cfg = TdaConfig::with_cap(3.0, 8);
    let a = f4_vector(&build_interaction_graph(&mk(["a", "b", "c", "d"]), &GraphConfig::default()), &cfg);
    let b = f4_vector(&build_interaction_graph(&mk(["zed", "mo", "al", "bo"]), &GraphConfig::default()), &cfg);
    assert_eq!(a, b);
    assert!(a[64..].iter().any(|&x| x > 0.0), "4-cycle should light the H1 image");
}

fn diagram_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 0..12)
        .prop_map(|v| v.into_iter().map(|(b, l)| (b, b + l)).collect())
}

fn to_diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram {
        bars: points.iter().map(|&(birth, death)| Bar { dim: 1, birth, death }).collect(),
        max_finite_value: 6.0,
    }
}

proptest! {
    #[test]
    fn image_is_additive_and_nonnegative(d1 in diagram_strategy(), d2 in diagram_strategy()) {
        let cfg = ImageConfig::with_cap(6.0, 8);
        let i1 = diagram_to_image(&to_diagram(&d1), 1, &cfg);
        let i2 = diagram_to_image(&to_diagram(&d2), 1, &cfg);
        let joined: Vec<_> = d1.iter().chain(d2.iter()).copied().collect();
        let i12 = diagram_to_image(&to_diagram(&joined), 1, &cfg);
        for k in 0..64 {
            prop_assert!(i12.pixels[k] >= 0.0);
            prop_assert!((i12.pixels[k] - (i1.pixels[k] + i2.pixels[k])).abs() <= 1e-9 * (1.0 + i12.pixels[k]));
        }
    }
}

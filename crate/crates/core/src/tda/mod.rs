//! Persistent homology of interaction graphs and persistence images.
//!
//! A post's undirected interaction graph becomes a finite metric space
//! (hop or inverse-weight shortest paths), whose Vietoris–Rips filtration
//! up to triangles is reduced over GF(2) into H0 and H1 bars. Diagrams are
//! rasterized into fixed-size persistence images and flattened into f4.

mod filtration;
mod image;
mod reduction;

pub use filtration::{build_vr_filtration, Filtration, Simplex};
pub use image::{diagram_to_image, EssentialPolicy, ImageConfig, PersistenceImage};
pub use reduction::{compute_persistence, Bar, PersistenceDiagram};

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{graph_distance_matrix, DistanceMatrix, DistanceMode, InteractionGraph, UndirectedGraph};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TdaError {
    EmptyMetricSpace,
    InvalidEpsMax(f64),
}

impl fmt::Display for TdaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdaError::EmptyMetricSpace => write!(f, "empty metric space"),
            TdaError::InvalidEpsMax(e) => write!(f, "eps_max must be finite and nonnegative, got {e}"),
        }
    }
}

/// Settings for the graph → diagram → image pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdaConfig {
    pub metric: DistanceMode,
    /// Rips scale cutoff; `None` uses the largest finite distance of each post.
    pub eps_max: Option<f64>,
    pub image: ImageConfig,
}

impl TdaConfig {
    pub fn with_cap(cap: f64, resolution: usize) -> Self {
        TdaConfig {
            metric: DistanceMode::Hop,
            eps_max: None,
            image: ImageConfig::with_cap(cap, resolution),
        }
    }

    /// Length of the f4 block.
    pub fn f4_len(&self) -> usize {
        2 * self.image.resolution * self.image.resolution
    }
}

pub fn distance_matrix(g: &InteractionGraph, metric: DistanceMode) -> DistanceMatrix {
    graph_distance_matrix(&g.undirected_view(), metric)
}

/// H0/H1 diagram of an undirected graph's shortest-path metric. `None` for
/// the empty graph.
pub fn graph_diagram(g: &UndirectedGraph, metric: DistanceMode, eps_max: Option<f64>) -> Option<PersistenceDiagram> {
    if g.node_count() == 0 {
        return None;
    }
    let dist = graph_distance_matrix(g, metric);
    let eps = eps_max.unwrap_or_else(|| dist.max_finite());
    let filt = build_vr_filtration(&dist, eps, 2).ok()?;
    Some(compute_persistence(&filt))
}

/// f4: flattened H0 image followed by the flattened H1 image, always
/// `2 · R²` long. A graph with no nodes yields zeros.
pub fn f4_vector(g: &InteractionGraph, cfg: &TdaConfig) -> Vec<f64> {
    let mut out = Vec::with_capacity(cfg.f4_len());
    match graph_diagram(&g.undirected_view(), cfg.metric, cfg.eps_max) {
        Some(diag) => {
            for dim in [0u8, 1] {
                out.extend(diagram_to_image(&diag, dim, &cfg.image).pixels);
            }
        }
        None => out.resize(cfg.f4_len(), 0.0),
    }
    out
}

/// Largest finite distance of each graph's metric, i.e. the default `eps_max`.
pub fn eps_max_of(g: &InteractionGraph, metric: DistanceMode) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    distance_matrix(g, metric).max_finite()
}

/// Nearest-rank percentile (`q` in `[0, 1]`) of `values`; `None` when empty.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = math::ceil(q.clamp(0.0, 1.0) * v.len() as f64) as usize;
    Some(v[rank.max(1) - 1])
}

/// Common image domain cap: the 99th percentile of per-post `eps_max`,
/// falling back to 1 when every post is degenerate.
pub fn domain_cap(eps_values: &[f64]) -> f64 {
    match percentile(eps_values, 0.99) {
        Some(c) if c > 0.0 => c,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_interaction_graph, GraphConfig};
    use crate::record::fixtures::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn f4_length_and_edgeless_h1() {
        // five users replying only to a deleted post author → edgeless graph
        let comments = (0..5).map(|i| comment(&format!("c{i}"), "p", &format!("U{i}"), i)).collect();
        let g = build_interaction_graph(&thread("p", "[deleted]", 0.5, comments), &GraphConfig::default());
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.directed_edge_count(), 0);
        let cfg = TdaConfig::with_cap(3.0, 8);
        let v = f4_vector(&g, &cfg);
        assert_eq!(v.len(), 128);
        assert!(v[64..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn percentile_nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.99), Some(99.0));
        assert_eq!(percentile(&v, 1.0), Some(100.0));
        assert_eq!(percentile(&[5.0], 0.99), Some(5.0));
        assert_eq!(percentile(&[], 0.99), None);
        assert_eq!(domain_cap(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn empty_graph_gives_zero_vector() {
        let g = build_interaction_graph(&thread("p", "[deleted]", 0.5, vec![]), &GraphConfig::default());
        let v = f4_vector(&g, &TdaConfig::with_cap(2.0, 4));
        assert_eq!(v, vec![0.0; 32]);
    }
}

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::UndirectedGraph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Unweighted shortest-path length.
    #[default]
    Hop,
    /// Shortest path with edge length `1 / weight`.
    #[serde(rename = "invweight")]
    InverseWeight,
}

/// Symmetric `n × n` distances; `f64::INFINITY` marks disconnected pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Matrix from row-major entries. Panics on a size mismatch.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "distance matrix must be n×n");
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Largest finite off-diagonal entry, 0 if none.
    pub fn max_finite(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // min-heap on distance, then node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

pub fn graph_distance_matrix(g: &UndirectedGraph, mode: DistanceMode) -> DistanceMatrix {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut data = vec![f64::INFINITY; n * n];
    for src in 0..n {
        let row = &mut data[src * n..(src + 1) * n];
        row[src] = 0.0;
        match mode {
            DistanceMode::Hop => {
                let mut queue = VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    let du = row[u];
                    for &(v, _) in &adj[u] {
                        if row[v].is_infinite() {
                            row[v] = du + 1.0;
                            queue.push_back(v);
                        }
                    }
                }
            }
            DistanceMode::InverseWeight => {
                let mut heap = BinaryHeap::from([Entry(0.0, src)]);
                while let Some(Entry(du, u)) = heap.pop() {
                    if du > row[u] {
                        continue;
                    }
                    for &(v, w) in &adj[u] {
                        let alt = du + 1.0 / w as f64;
                        if alt < row[v] {
                            row[v] = alt;
                            heap.push(Entry(alt, v));
                        }
                    }
                }
            }
        }
    }
    // Dijkstra sums can differ by an ulp between directions.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = data[i * n + j].min(data[j * n + i]);
            data[i * n + j] = m;
            data[j * n + i] = m;
        }
    }
    DistanceMatrix { n, data }
}

//! Brute-force reference computations for test suites.
//!
//! Nothing here shares code with the production paths it checks: the
//! persistence oracle rebuilds Rips complexes straight from the distance
//! matrix and reads bars off persistent Betti numbers computed by dense
//! GF(2) elimination; the census oracle visits every vertex triple and
//! classifies it by explicit permutation search.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{DistanceMatrix, SimpleDigraph};

/// A bar as `(dim, birth, death)`; death is `f64::INFINITY` when essential.
pub type RawBar = (u8, f64, f64);

/// Rank over GF(2) of bit-vectors of length `width`.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

struct Complex {
    /// `(vertices, value)` per dimension 0, 1, 2.
    cells: [Vec<(Vec<usize>, f64)>; 3],
}

fn rips(dist: &DistanceMatrix, eps_max: f64) -> Complex {
    let n = dist.len();
    let ok = |i: usize, j: usize| dist.get(i, j) <= eps_max;
    let mut cells: [Vec<(Vec<usize>, f64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for i in 0..n {
        cells[0].push((vec![i], 0.0));
        for j in (i + 1)..n {
            if ok(i, j) {
                cells[1].push((vec![i, j], dist.get(i, j)));
            }
            for k in (j + 1)..n {
                if ok(i, j) && ok(i, k) && ok(j, k) {
                    let v = dist.get(i, j).max(dist.get(i, k)).max(dist.get(j, k));
                    cells[2].push((vec![i, j, k], v));
                }
            }
        }
    }
    Complex { cells }
}

impl Complex {
    /// Boundary vectors of the `p+1`-cells with value ≤ `t`, indexed over all `p`-cells.
    fn boundary_rows(&self, p: usize, t: f64) -> Vec<Vec<bool>> {
        if p + 1 > 2 {
            return Vec::new();
        }
        let faces = &self.cells[p];
        self.cells[p + 1]
            .iter()
            .filter(|(_, v)| *v <= t)
            .map(|(verts, _)| {
                let mut row = vec![false; faces.len()];
                for skip in 0..verts.len() {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    let idx = faces.iter().position(|(f, _)| *f == face).expect("face present");
                    row[idx] = true;
                }
                row
            })
            .collect()
    }

    fn count(&self, p: usize, t: f64) -> usize {
        self.cells[p].iter().filter(|(_, v)| *v <= t).count()
    }

    /// rank of ∂_p restricted to K_t (0 for p = 0).
    fn rank_boundary(&self, p: usize, t: f64) -> usize {
        if p == 0 {
            0
        } else {
            gf2_rank(self.boundary_rows(p - 1, t))
        }
    }

    /// dim of the image of H_p(K_s) in H_p(K_t), s ≤ t.
    fn persistent_betti(&self, p: usize, s: f64, t: f64) -> usize {
        let cycles = self.count(p, s) - self.rank_boundary(p, s);
        let b_t = self.boundary_rows(p, t);
        let rank_b = gf2_rank(b_t.clone());
        // keep only rows of p-cells outside K_s
        let outside: Vec<usize> = self.cells[p]
            .iter()
            .enumerate()
            .filter(|(_, (_, v))| *v > s)
            .map(|(i, _)| i)
            .collect();
        let projected: Vec<Vec<bool>> = b_t
            .iter()
            .map(|row| outside.iter().map(|&i| row[i]).collect())
            .collect();
        let rank_out = if outside.is_empty() { 0 } else { gf2_rank(projected) };
        let boundaries_inside = rank_b - rank_out;
        cycles - boundaries_inside
    }
}

fn critical_values(c: &Complex) -> Vec<f64> {
    let mut vals: Vec<f64> = c.cells.iter().flatten().map(|(_, v)| *v).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    vals
}

/// H0 and H1 bars of the Rips filtration of `dist` truncated at `eps_max`,
/// sorted by (dim, birth, death). Zero-length bars never appear.
pub fn persistence_by_ranks(dist: &DistanceMatrix, eps_max: f64) -> Vec<RawBar> {
    let c = rips(dist, eps_max);
    let vals = critical_values(&c);
    let m = vals.len();
    let mut bars = Vec::new();
    for p in 0..2usize {
        let beta = |i: isize, j: usize| -> isize {
            if i < 0 {
                0
            } else {
                c.persistent_betti(p, vals[i as usize], vals[j]) as isize
            }
        };
        for i in 0..m {
            let ii = i as isize;
            for j in (i + 1)..m {
                let mu = beta(ii, j - 1) - beta(ii, j) - beta(ii - 1, j - 1) + beta(ii - 1, j);
                assert!(mu >= 0, "negative multiplicity");
                for _ in 0..mu {
                    bars.push((p as u8, vals[i], vals[j]));
                }
            }
            let mu_inf = beta(ii, m - 1) - beta(ii - 1, m - 1);
            assert!(mu_inf >= 0);
            for _ in 0..mu_inf {
                bars.push((p as u8, vals[i], f64::INFINITY));
            }
        }
    }
    bars.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    bars
}

/// Betti numbers (β0, β1, β2) of the Rips complex at scale `t`.
pub fn betti_at(dist: &DistanceMatrix, eps_max: f64, t: f64) -> [usize; 3] {
    let c = rips(dist, eps_max);
    let mut out = [0; 3];
    for (p, b) in out.iter_mut().enumerate() {
        let cycles = c.count(p, t) - c.rank_boundary(p, t);
        let bounds = if p < 2 { c.rank_boundary(p + 1, t) } else { 0 };
        *b = cycles - bounds;
    }
    out
}

/// Simplex counts (vertices, edges, triangles) at scale `t`.
pub fn simplex_counts_at(dist: &DistanceMatrix, eps_max: f64, t: f64) -> [usize; 3] {
    let c = rips(dist, eps_max);
    [c.count(0, t), c.count(1, t), c.count(2, t)]
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn matrix_key(a: &[[bool; 3]; 3]) -> u16 {
    let mut key = 0u16;
    for i in 0..3 {
        for j in 0..3 {
            key = (key << 1) | a[i][j] as u16;
        }
    }
    key
}

/// Canonical form by permutation search, ordered as (edge count, form).
fn oracle_class_key(a: &[[bool; 3]; 3]) -> Option<(u32, u16)> {
    let linked = |i: usize, j: usize| a[i][j] || a[j][i];
    let pairs = linked(0, 1) as u8 + linked(0, 2) as u8 + linked(1, 2) as u8;
    if pairs < 2 {
        return None;
    }
    let mut best = u16::MAX;
    for p in PERMS {
        let mut b = [[false; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[p[i]][p[j]] = a[i][j];
            }
        }
        best = best.min(matrix_key(&b));
    }
    Some((best.count_ones(), best))
}

/// Naive O(n³) induced census: every triple, classified by permutation
/// search, classes numbered by ascending (edge count, canonical form).
pub fn census_by_enumeration(g: &SimpleDigraph) -> [u64; 13] {
    // enumerate class keys over all 64 labeled digraphs to fix the numbering
    let mut keys: Vec<(u32, u16)> = Vec::new();
    for code in 0u8..64 {
        let mut a = [[false; 3]; 3];
        let mut k = 0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    a[i][j] = code & (1 << k) != 0;
                    k += 1;
                }
            }
        }
        if let Some(key) = oracle_class_key(&a) {
            keys.push(key);
        }
    }
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 13);

    let n = g.node_count();
    let mut counts = [0u64; 13];
    for x in 0..n {
        for y in (x + 1)..n {
            for z in (y + 1)..n {
                let v = [x, y, z];
                let mut a = [[false; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        a[i][j] = i != j && g.has_edge(v[i], v[j]);
                    }
                }
                if let Some(key) = oracle_class_key(&a) {
                    let idx = keys.binary_search(&key).expect("known class");
                    counts[idx] += 1;
                }
            }
        }
    }
    counts
}

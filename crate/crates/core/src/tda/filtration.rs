use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::TdaError;
use crate::graph::DistanceMatrix;

/// A vertex, edge or triangle with its filtration value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simplex {
    pub dim: u8,
    verts: [u32; 3],
    pub value: f64,
}

impl Simplex {
    pub fn vertex(v: u32) -> Self {
        Simplex { dim: 0, verts: [v, 0, 0], value: 0.0 }
    }

    pub fn edge(a: u32, b: u32, value: f64) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Simplex { dim: 1, verts: [a, b, 0], value }
    }

    pub fn triangle(mut vs: [u32; 3], value: f64) -> Self {
        vs.sort_unstable();
        Simplex { dim: 2, verts: vs, value }
    }

    /// Sorted vertex list.
    pub fn vertices(&self) -> &[u32] {
        &self.verts[..=self.dim as usize]
    }

    fn order(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// Vietoris–Rips filtration up to triangles, sorted by
/// (value, dimension, vertex tuple).
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    n_vertices: usize,
    simplices: Vec<Simplex>,
}

impl Filtration {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Count of simplices of dimension `dim`.
    pub fn count(&self, dim: u8) -> usize {
        self.simplices.iter().filter(|s| s.dim == dim).count()
    }

    /// Largest filtration value present.
    pub fn max_value(&self) -> f64 {
        self.simplices.iter().map(|s| s.value).fold(0.0, f64::max)
    }

    /// Build from an explicit simplex list, sorting it into filtration order.
    /// The caller guarantees closure under faces.
    pub fn from_simplices(n_vertices: usize, mut simplices: Vec<Simplex>) -> Self {
        simplices.sort_by(Simplex::order);
        Filtration { n_vertices, simplices }
    }
}

/// Rips filtration of `dist`: every vertex at 0, every edge with
/// `d ≤ eps_max`, every triangle whose longest edge is `≤ eps_max` (when
/// `max_dim ≥ 2`).
pub fn build_vr_filtration(dist: &DistanceMatrix, eps_max: f64, max_dim: u8) -> Result<Filtration, TdaError> {
    let n = dist.len();
    if n == 0 {
        return Err(TdaError::EmptyMetricSpace);
    }
    if !eps_max.is_finite() || eps_max < 0.0 {
        return Err(TdaError::InvalidEpsMax(eps_max));
    }
    let mut simplices: Vec<Simplex> = (0..n as u32).map(Simplex::vertex).collect();
    if max_dim >= 1 {
        let mut present = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist.get(i, j);
                if d <= eps_max {
                    present[i * n + j] = true;
                    simplices.push(Simplex::edge(i as u32, j as u32, d));
                }
            }
        }
        if max_dim >= 2 {
            for i in 0..n {
                for j in (i + 1)..n {
                    if !present[i * n + j] {
                        continue;
                    }
                    for k in (j + 1)..n {
                        if present[i * n + k] && present[j * n + k] {
                            let v = dist.get(i, j).max(dist.get(i, k)).max(dist.get(j, k));
                            simplices.push(Simplex::triangle([i as u32, j as u32, k as u32], v));
                        }
                    }
                }
            }
        }
    }
    Ok(Filtration::from_simplices(n, simplices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn square() -> DistanceMatrix {
        let r2 = core::f64::consts::SQRT_2;
        DistanceMatrix::from_rows(
            4,
            vec![
                0.0, 1.0, r2, 1.0, //
                1.0, 0.0, 1.0, r2, //
                r2, 1.0, 0.0, 1.0, //
                1.0, r2, 1.0, 0.0,
            ],
        )
    }

    #[test]
    fn two_points() {
        let d = DistanceMatrix::from_rows(2, vec![0.0, 1.0, 1.0, 0.0]);
        let f = build_vr_filtration(&d, 2.0, 2).unwrap();
        assert_eq!((f.count(0), f.count(1), f.count(2)), (2, 1, 0));
        assert_eq!(f.simplices()[2].value, 1.0);
    }

    #[test]
    fn equilateral_triangle() {
        let d = DistanceMatrix::from_rows(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        let f = build_vr_filtration(&d, 1.0, 2).unwrap();
        assert_eq!((f.count(0), f.count(1), f.count(2)), (3, 3, 1));
        assert!(f.simplices().iter().skip(3).all(|s| s.value == 1.0));
        // edges precede the triangle at equal value
        assert_eq!(f.simplices().last().unwrap().dim, 2);
    }

    #[test]
    fn square_counts_by_enumeration() {
        let f = build_vr_filtration(&square(), 2.0, 2).unwrap();
        let edges: Vec<f64> = f.simplices().iter().filter(|s| s.dim == 1).map(|s| s.value).collect();
        assert_eq!(edges.iter().filter(|&&v| v == 1.0).count(), 4);
        assert_eq!(edges.iter().filter(|&&v| v == core::f64::consts::SQRT_2).count(), 2);
        let tris: Vec<&Simplex> = f.simplices().iter().filter(|s| s.dim == 2).collect();
        assert_eq!(tris.len(), 4);
        assert!(tris.iter().all(|t| t.value == core::f64::consts::SQRT_2));
    }

    #[test]
    fn eps_max_truncates() {
        let f = build_vr_filtration(&square(), 1.0, 2).unwrap();
        assert_eq!((f.count(1), f.count(2)), (4, 0));
    }

    #[test]
    fn empty_space_is_an_error() {
        let d = DistanceMatrix::from_rows(0, vec![]);
        assert_eq!(build_vr_filtration(&d, 1.0, 2), Err(TdaError::EmptyMetricSpace));
    }

    #[test]
    fn order_is_value_dim_lex() {
        let f = build_vr_filtration(&square(), 2.0, 2).unwrap();
        for w in f.simplices().windows(2) {
            assert_ne!(w[0].order(&w[1]), Ordering::Greater);
        }
    }
}

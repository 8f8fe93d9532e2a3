use alloc::vec;
use alloc::vec::Vec;

use super::filtration::Filtration;

/// One homology class: born at `birth`, dies at `death` (`f64::INFINITY`
/// for classes that never die).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bar {
    pub dim: u8,
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    /// Sorted by (dim, birth, death).
    pub bars: Vec<Bar>,
    /// Largest finite filtration value of the source filtration.
    pub max_finite_value: f64,
}

impl PersistenceDiagram {
    pub fn in_dim(&self, dim: u8) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }

    pub fn count(&self, dim: u8) -> usize {
        self.in_dim(dim).count()
    }

    pub fn essential_count(&self, dim: u8) -> usize {
        self.in_dim(dim).filter(|b| b.is_essential()).count()
    }
}

/// XOR of two sorted index sets.
fn add_columns(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Persistence pairs by left-to-right column reduction of the boundary
/// matrix over GF(2), with clearing (higher dimensions first).
///
/// Zero-persistence pairs are dropped. Unpaired vertices and edges become
/// infinite bars; unpaired triangles (H2) are not reported.
pub fn compute_persistence(filt: &Filtration) -> PersistenceDiagram {
    let simplices = filt.simplices();
    let m = simplices.len();
    let n = filt.vertex_count();

    let mut vertex_index = vec![usize::MAX; n];
    let mut edge_index = vec![usize::MAX; n * n];
    for (idx, s) in simplices.iter().enumerate() {
        let v = s.vertices();
        match s.dim {
            0 => vertex_index[v[0] as usize] = idx,
            1 => edge_index[v[0] as usize * n + v[1] as usize] = idx,
            _ => {}
        }
    }
    let boundary = |idx: usize| -> Vec<usize> {
        let v = simplices[idx].vertices();
        let mut col = match simplices[idx].dim {
            0 => Vec::new(),
            1 => vec![vertex_index[v[0] as usize], vertex_index[v[1] as usize]],
            _ => {
                let e = |a: u32, b: u32| edge_index[a as usize * n + b as usize];
                vec![e(v[0], v[1]), e(v[0], v[2]), e(v[1], v[2])]
            }
        };
        debug_assert!(col.iter().all(|&f| f < idx), "filtration is not closed under faces");
        col.sort_unstable();
        col
    };

    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut pivot_col = vec![usize::MAX; m];
    let mut cleared = vec![false; m];
    let mut scratch = Vec::new();

    for dim in [2u8, 1] {
        for j in 0..m {
            if simplices[j].dim != dim || cleared[j] {
                continue;
            }
            let mut col = boundary(j);
            while let Some(&low) = col.last() {
                let k = pivot_col[low];
                if k == usize::MAX {
                    break;
                }
                add_columns(&col, &reduced[k], &mut scratch);
                core::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_col[low] = j;
                cleared[low] = true;
                reduced[j] = col;
            }
        }
    }

    let mut bars = Vec::new();
    for i in 0..m {
        let s = &simplices[i];
        if s.dim > 1 || !reduced[i].is_empty() {
            continue;
        }
        let j = pivot_col[i];
        if j == usize::MAX {
            bars.push(Bar { dim: s.dim, birth: s.value, death: f64::INFINITY });
        } else if simplices[j].value > s.value {
            bars.push(Bar { dim: s.dim, birth: s.value, death: simplices[j].value });
        }
    }
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    PersistenceDiagram { bars, max_finite_value: filt.max_value() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DistanceMatrix;
    use crate::tda::build_vr_filtration;

    fn diagram(n: usize, d: Vec<f64>) -> PersistenceDiagram {
        let dist = DistanceMatrix::from_rows(n, d);
        let eps = dist.max_finite();
        compute_persistence(&build_vr_filtration(&dist, eps, 2).unwrap())
    }

    #[test]
    fn single_point() {
        let d = diagram(1, vec![0.0]);
        assert_eq!(d.bars, vec![Bar { dim: 0, birth: 0.0, death: f64::INFINITY }]);
    }

    #[test]
    fn two_points() {
        let d = diagram(2, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            d.bars,
            vec![
                Bar { dim: 0, birth: 0.0, death: 1.0 },
                Bar { dim: 0, birth: 0.0, death: f64::INFINITY },
            ]
        );
        assert_eq!(d.count(1), 0);
    }

    #[test]
    fn square_has_one_loop() {
        let r2 = core::f64::consts::SQRT_2;
        let d = diagram(
            4,
            vec![0.0, 1.0, r2, 1.0, 1.0, 0.0, 1.0, r2, r2, 1.0, 0.0, 1.0, 1.0, r2, 1.0, 0.0],
        );
        let h0: Vec<_> = d.in_dim(0).copied().collect();
        assert_eq!(h0.len(), 4);
        assert_eq!(h0.iter().filter(|b| b.death == 1.0).count(), 3);
        assert_eq!(d.essential_count(0), 1);
        assert_eq!(d.in_dim(1).copied().collect::<Vec<_>>(), vec![Bar { dim: 1, birth: 1.0, death: r2 }]);
    }

    #[test]
    fn triangle_loop_has_zero_persistence() {
        let d = diagram(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(d.count(1), 0);
    }

    #[test]
    fn disconnected_components_are_essential() {
        let inf = f64::INFINITY;
        let d = diagram(3, vec![0.0, 1.0, inf, 1.0, 0.0, inf, inf, inf, 0.0]);
        assert_eq!(d.essential_count(0), 2);
        assert_eq!(d.count(0), 3);
    }
}

//! Directed triad census over the 13 weakly connected 3-node motif classes.
//!
//! A labeled 3-node digraph is encoded as a 6-bit adjacency string
//! `a01 a02 a10 a12 a20 a21`, most significant bit first. Its canonical code
//! is the minimum over the six vertex permutations. Classes are numbered
//! 1..=13 in ascending order of edge count, then canonical code:
//!
//! | class | edges | canonical | shape |
//! |-------|-------|-----------|-------|
//! | 1  | 2 | `000011` | out-star: one node points at both others |
//! | 2  | 2 | `000110` | directed path |
//! | 3  | 2 | `001010` | in-star: both others point at one node |
//! | 4  | 3 | `000111` | mutual dyad, one member points at the third |
//! | 5  | 3 | `001011` | transitive triple |
//! | 6  | 3 | `010101` | mutual dyad, third node points into it |
//! | 7  | 3 | `011001` | directed 3-cycle |
//! | 8  | 4 | `001111` | mutual dyad, both members point at the third |
//! | 9  | 4 | `010111` | two mutual dyads sharing a node |
//! | 10 | 4 | `011011` | mutual dyad plus a path through the third node |
//! | 11 | 4 | `011110` | mutual dyad, third node points at both members |
//! | 12 | 5 | `011111` | two mutual dyads plus one asymmetric edge |
//! | 13 | 6 | `111111` | all pairs mutual |
//!
//! The shape column is informal; the table in [`CLASS_CANONICAL`] is
//! authoritative and computed at compile time.

use serde::{Deserialize, Serialize};

use crate::graph::{InteractionGraph, SimpleDigraph};

pub const MOTIF_CLASSES: usize = 13;

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

const fn bit_of(i: usize, j: usize) -> u8 {
    let mut p = 0;
    while p < 6 {
        if PAIRS[p].0 == i && PAIRS[p].1 == j {
            return 1 << (5 - p);
        }
        p += 1;
    }
    0
}

const fn permute(code: u8, perm: [usize; 3]) -> u8 {
    let mut out = 0u8;
    let mut p = 0;
    while p < 6 {
        if code & (1 << (5 - p)) != 0 {
            let (i, j) = PAIRS[p];
            out |= bit_of(perm[i], perm[j]);
        }
        p += 1;
    }
    out
}

const fn canonical_code(code: u8) -> u8 {
    let mut best = code;
    let mut k = 0;
    while k < 6 {
        let c = permute(code, PERMS[k]);
        if c < best {
            best = c;
        }
        k += 1;
    }
    best
}

const fn linked(code: u8, i: usize, j: usize) -> bool {
    code & (bit_of(i, j) | bit_of(j, i)) != 0
}

const fn weakly_connected(code: u8) -> bool {
    linked(code, 0, 1) as u8 + linked(code, 0, 2) as u8 + linked(code, 1, 2) as u8 >= 2
}

const fn build_canonical() -> [u8; MOTIF_CLASSES] {
    let mut reps = [0u8; MOTIF_CLASSES];
    let mut count = 0;
    let mut code = 0u8;
    while code < 64 {
        if weakly_connected(code) && canonical_code(code) == code {
            reps[count] = code;
            count += 1;
        }
        code += 1;
    }
    assert!(count == MOTIF_CLASSES);
    // insertion sort by (edge count, code)
    let mut i = 1;
    while i < MOTIF_CLASSES {
        let mut j = i;
        while j > 0 {
            let (a, b) = (reps[j - 1], reps[j]);
            let key_a = (a.count_ones() as u16) << 8 | a as u16;
            let key_b = (b.count_ones() as u16) << 8 | b as u16;
            if key_a > key_b {
                reps[j - 1] = b;
                reps[j] = a;
                j -= 1;
            } else {
                break;
            }
        }
        i += 1;
    }
    reps
}

/// Canonical code of each class, index 0 ↦ class 1.
pub const CLASS_CANONICAL: [u8; MOTIF_CLASSES] = build_canonical();

const fn build_class_of() -> [u8; 64] {
    let mut table = [0u8; 64];
    let mut code = 0u8;
    while code < 64 {
        if weakly_connected(code) {
            let canon = canonical_code(code);
            let mut k = 0;
            while k < MOTIF_CLASSES {
                if CLASS_CANONICAL[k] == canon {
                    table[code as usize] = k as u8 + 1;
                }
                k += 1;
            }
        }
        code += 1;
    }
    table
}

/// Class (1..=13) of every 6-bit code, 0 for disconnected codes.
const CLASS_OF: [u8; 64] = build_class_of();

/// 6-bit code of a 3×3 adjacency. Diagonal entries are ignored.
pub fn adjacency_code(adj: &[[bool; 3]; 3]) -> u8 {
    PAIRS
        .iter()
        .filter(|&&(i, j)| adj[i][j])
        .fold(0, |acc, &(i, j)| acc | bit_of(i, j))
}

/// Motif class in `1..=13`, or `None` when the triple is not weakly connected.
pub fn canonical_class(adj: &[[bool; 3]; 3]) -> Option<usize> {
    class_of_code(adjacency_code(adj))
}

pub fn class_of_code(code: u8) -> Option<usize> {
    match CLASS_OF[(code & 0x3f) as usize] {
        0 => None,
        c => Some(c as usize),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCensus {
    /// `counts[k]` holds class `k + 1`.
    pub counts: [u64; MOTIF_CLASSES],
}

impl TriadCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> [f64; MOTIF_CLASSES] {
        self.counts.map(|c| c as f64)
    }
}

fn triple_code(g: &SimpleDigraph, v: [usize; 3]) -> u8 {
    PAIRS
        .iter()
        .filter(|&&(i, j)| g.has_edge(v[i], v[j]))
        .fold(0, |acc, &(i, j)| acc | bit_of(i, j))
}

/// Induced census over all weakly connected triples. Each triple is reached
/// from a vertex adjacent to the other two: path triples once from their
/// middle vertex, triangles once from their smallest vertex.
pub fn census_of(g: &SimpleDigraph) -> TriadCensus {
    let mut census = TriadCensus::default();
    if g.node_count() < 3 {
        return census;
    }
    let nb = g.undirected_neighbors();
    for (v, list) in nb.iter().enumerate() {
        for (a, &u) in list.iter().enumerate() {
            for &w in &list[a + 1..] {
                if nb[u].binary_search(&w).is_ok() && (u < v || w < v) {
                    continue;
                }
                let class = class_of_code(triple_code(g, [u, v, w]))
                    .expect("triple with a shared neighbor is connected");
                census.counts[class - 1] += 1;
            }
        }
    }
    census
}

/// Census of a post's interaction graph; multiplicities and timestamps are
/// ignored.
pub fn triad_census(g: &InteractionGraph) -> TriadCensus {
    census_of(&g.simple_digraph())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn adj(edges: &[(usize, usize)]) -> [[bool; 3]; 3] {
        let mut a = [[false; 3]; 3];
        for &(i, j) in edges {
            a[i][j] = true;
        }
        a
    }

    #[test]
    fn thirteen_classes_cover_54_labeled_digraphs() {
        let mut per_class = [0usize; MOTIF_CLASSES];
        let mut disconnected = 0;
        for code in 0u8..64 {
            match class_of_code(code) {
                Some(c) => per_class[c - 1] += 1,
                None => disconnected += 1,
            }
        }
        assert_eq!(disconnected, 10);
        assert_eq!(per_class.iter().sum::<usize>(), 54);
        assert!(per_class.iter().all(|&n| n > 0));
        let edges: Vec<u32> = CLASS_CANONICAL.iter().map(|c| c.count_ones()).collect();
        assert_eq!(edges, [2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 6].to_vec());
        assert_eq!(class_of_code(0b111111), Some(13));
    }

    #[test]
    fn class_order_matches_documented_table() {
        assert_eq!(
            CLASS_CANONICAL,
            [
                0b000011, 0b000110, 0b001010, 0b000111, 0b001011, 0b010101, 0b011001, 0b001111, 0b010111,
                0b011011, 0b011110, 0b011111, 0b111111,
            ]
        );
        assert_eq!(canonical_class(&adj(&[(0, 1), (1, 2), (2, 0)])), Some(7));
    }

    #[test]
    fn directed_cycle_is_one_class() {
        let c1 = canonical_class(&adj(&[(0, 1), (1, 2), (2, 0)]));
        let c2 = canonical_class(&adj(&[(0, 2), (2, 1), (1, 0)]));
        assert!(c1.is_some());
        assert_eq!(c1, c2);
        let transitive = canonical_class(&adj(&[(0, 1), (1, 2), (0, 2)]));
        assert_ne!(c1, transitive);
    }

    #[test]
    fn disconnected_sentinel() {
        assert_eq!(canonical_class(&adj(&[])), None);
        assert_eq!(canonical_class(&adj(&[(0, 1)])), None);
        assert_eq!(canonical_class(&adj(&[(0, 1), (1, 0)])), None);
    }

    #[test]
    fn census_small_cases() {
        assert_eq!(census_of(&SimpleDigraph::from_edges(0, [])).total(), 0);
        let full = SimpleDigraph::from_edges(3, [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        let c = census_of(&full);
        assert_eq!(c.total(), 1);
        assert_eq!(c.counts[class_of_code(0b111111).unwrap() - 1], 1);
        let dyads = SimpleDigraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(census_of(&dyads), TriadCensus::default());
    }
}

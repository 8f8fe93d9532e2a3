//! User–user interaction graphs.
//!
//! Edges are directed replier → repliee and carry the timestamps of every
//! reply event; the edge weight is the number of events. Top-level comments
//! reply to the post author. Replies involving a `[deleted]` author, replies
//! to oneself, and comments whose parent is not in the record are dropped
//! and tallied in [`GraphDiagnostics`].

mod distance;
mod tree;

pub use distance::{graph_distance_matrix, DistanceMatrix, DistanceMode};
pub use tree::{build_comment_tree, CommentTree, TreeNode, TreeNodeKind};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::record::{Parent, ThreadRecord, DELETED_AUTHOR};

/// Sorted reply timestamps on one directed edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventList {
    timestamps: Vec<i64>,
}

impl EventList {
    pub fn from_unsorted(mut timestamps: Vec<i64>) -> Self {
        timestamps.sort_unstable();
        EventList { timestamps }
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn weight(&self) -> u64 {
        self.timestamps.len() as u64
    }

    fn insert(&mut self, t: i64) {
        let at = self.timestamps.partition_point(|&x| x <= t);
        self.timestamps.insert(at, t);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDiagnostics {
    /// Reply relationships dropped because either side is `[deleted]`.
    pub deleted_skipped: usize,
    pub self_replies_skipped: usize,
    pub unresolved_parent_skipped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphConfig {
    /// Treat top-level comments as replies to the post author.
    pub top_level_to_author: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            top_level_to_author: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), EventList>,
    post_author: String,
    pub diagnostics: GraphDiagnostics,
}

fn is_deleted(author: &str) -> bool {
    author == DELETED_AUTHOR || author.is_empty()
}

pub fn build_interaction_graph(rec: &ThreadRecord, cfg: &GraphConfig) -> InteractionGraph {
    let mut g = InteractionGraph {
        nodes: BTreeSet::new(),
        edges: BTreeMap::new(),
        post_author: rec.author.clone(),
        diagnostics: GraphDiagnostics::default(),
    };
    if !is_deleted(&rec.author) {
        g.nodes.insert(rec.author.clone());
    }
    for (c, parent) in rec.comments.iter().zip(rec.parents()) {
        let repliee = match parent {
            Parent::Missing => {
                g.diagnostics.unresolved_parent_skipped += 1;
                continue;
            }
            Parent::Post if !cfg.top_level_to_author => {
                if !is_deleted(&c.author) {
                    g.nodes.insert(c.author.clone());
                }
                continue;
            }
            Parent::Post => rec.author.as_str(),
            Parent::Comment(i) => rec.comments[i].author.as_str(),
        };
        if is_deleted(&c.author) || is_deleted(repliee) {
            g.diagnostics.deleted_skipped += 1;
            if !is_deleted(&c.author) {
                g.nodes.insert(c.author.clone());
            }
            continue;
        }
        g.nodes.insert(c.author.clone());
        if c.author == repliee {
            g.diagnostics.self_replies_skipped += 1;
            continue;
        }
        g.edges
            .entry((c.author.clone(), String::from(repliee)))
            .or_default()
            .insert(c.created_utc);
    }
    g
}

impl InteractionGraph {
    pub fn from_parts(
        post_author: String,
        nodes: BTreeSet<String>,
        edges: BTreeMap<(String, String), EventList>,
    ) -> Self {
        InteractionGraph {
            nodes,
            edges,
            post_author,
            diagnostics: GraphDiagnostics::default(),
        }
    }

    pub fn post_author(&self) -> &str {
        &self.post_author
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, &EventList)> {
        self.edges
            .iter()
            .map(|((s, d), ev)| (s.as_str(), d.as_str(), ev))
    }

    pub fn directed_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_events(&self) -> u64 {
        self.edges.values().map(EventList::weight).sum()
    }

    pub fn event_list(&self, src: &str, dst: &str) -> Option<&EventList> {
        self.edges.get(&(String::from(src), String::from(dst)))
    }

    fn index_of(&self) -> BTreeMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    }

    /// Edges as `(src, dst)` node indices, nodes numbered in sorted-name
    /// order. Multiplicities are collapsed.
    pub fn simple_digraph(&self) -> SimpleDigraph {
        let index = self.index_of();
        let n = self.nodes.len();
        let mut out = alloc::vec![Vec::new(); n];
        for (s, d) in self.edges.keys() {
            out[index[s.as_str()]].push(index[d.as_str()]);
        }
        SimpleDigraph::from_out_lists(out)
    }

    /// Undirected weighted view: `{u, v}` exists iff `u→v` or `v→u` does,
    /// with weight equal to the events in both directions.
    pub fn undirected_view(&self) -> UndirectedGraph {
        let index = self.index_of();
        let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for ((s, d), ev) in &self.edges {
            let (a, b) = (index[s.as_str()], index[d.as_str()]);
            let key = if a < b { (a, b) } else { (b, a) };
            *edges.entry(key).or_insert(0) += ev.weight();
        }
        UndirectedGraph {
            labels: self.nodes.iter().cloned().collect(),
            edges,
        }
    }
}

pub fn undirected_view(g: &InteractionGraph) -> UndirectedGraph {
    g.undirected_view()
}

/// Weighted undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    pub labels: Vec<String>,
    /// Keyed by `(u, v)` with `u < v`.
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl UndirectedGraph {
    /// Unlabeled graph from an edge list; duplicate edges add their weights.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            assert!(u < n && v < n && u != v, "invalid edge ({u}, {v})");
            let key = if u < v { (u, v) } else { (v, u) };
            *map.entry(key).or_insert(0) += w;
        }
        UndirectedGraph {
            labels: (0..n).map(|i| alloc::format!("{i}")).collect(),
            edges: map,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.get(&key).copied()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = alloc::vec![Vec::new(); self.labels.len()];
        for (&(u, v), &w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }

    /// `2E / N`, zero for the empty graph.
    pub fn average_degree(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.labels.len() as f64
        }
    }

    /// Connected components by union-find.
    pub fn component_count(&self) -> usize {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = n;
        for &(u, v) in self.edges.keys() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps
    }
}

/// Directed simple graph on `0..n` with sorted, deduplicated adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleDigraph {
    out: Vec<Vec<usize>>,
}

impl SimpleDigraph {
    /// Self-loops are dropped.
    pub fn from_out_lists(mut out: Vec<Vec<usize>>) -> Self {
        for (u, list) in out.iter_mut().enumerate() {
            list.retain(|&v| v != u);
            list.sort_unstable();
            list.dedup();
        }
        SimpleDigraph { out }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut out = alloc::vec![Vec::new(); n];
        for (u, v) in edges {
            out[u].push(v);
        }
        Self::from_out_lists(out)
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Sorted neighbor lists ignoring direction.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = alloc::vec![Vec::new(); self.out.len()];
        for (u, v) in self.edges() {
            nb[u].push(v);
            nb[v].push(u);
        }
        for list in &mut nb {
            list.sort_unstable();
            list.dedup();
        }
        nb
    }

    /// Relabel node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_edges(self.out.len(), self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::fixtures::*;
    use alloc::vec;

    #[test]
    fn two_comment_thread() {
        let rec = thread("p", "A", 0.5, vec![comment("c1", "p", "B", 10), comment("c2", "c1", "A", 20)]);
        let g = build_interaction_graph(&rec, &GraphConfig::default());
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec!["A", "B"]);
        assert_eq!(g.event_list("B", "A").unwrap().timestamps(), &[10]);
        assert_eq!(g.event_list("A", "B").unwrap().timestamps(), &[20]);
        assert_eq!(g.directed_edge_count(), 2);
    }

    #[test]
    fn zero_comment_post() {
        let g = build_interaction_graph(&thread("p", "A", 0.5, vec![]), &GraphConfig::default());
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.directed_edge_count(), 0);
    }

    #[test]
    fn self_reply_and_deleted_dropped() {
        let rec = thread(
            "p",
            "A",
            0.5,
            vec![
                comment("c1", "p", "B", 1),
                comment("c2", "c1", "B", 2),
                comment("c3", "c1", "[deleted]", 3),
                comment("c4", "c3", "C", 4),
                comment("c5", "missing", "D", 5),
            ],
        );
        let g = build_interaction_graph(&rec, &GraphConfig::default());
        assert_eq!(g.diagnostics.self_replies_skipped, 1);
        assert_eq!(g.diagnostics.deleted_skipped, 2);
        assert_eq!(g.diagnostics.unresolved_parent_skipped, 1);
        assert_eq!(g.directed_edge_count(), 1);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec!["A", "B", "C"]);
        assert!(g.edges().all(|(s, d, _)| s != d));
    }

    #[test]
    fn undirected_sums_both_directions() {
        let rec = thread(
            "p",
            "A",
            0.5,
            vec![comment("c1", "p", "B", 1), comment("c2", "c1", "A", 2), comment("c3", "c2", "B", 3)],
        );
        let g = build_interaction_graph(&rec, &GraphConfig::default());
        assert_eq!(g.event_list("B", "A").unwrap().weight(), 2);
        let u = g.undirected_view();
        assert_eq!(u.edge_count(), 1);
        assert_eq!(u.weight(0, 1), Some(3));
    }

    #[test]
    fn one_way_edge_weight() {
        let rec = thread("p", "A", 0.5, vec![comment("c1", "p", "B", 1)]);
        let u = build_interaction_graph(&rec, &GraphConfig::default()).undirected_view();
        assert_eq!(u.weight(0, 1), Some(1));
        let empty = build_interaction_graph(&thread("p", "A", 0.5, vec![]), &GraphConfig::default());
        assert_eq!(empty.undirected_view().edge_count(), 0);
    }

    #[test]
    fn event_list_sorted_on_insert() {
        let rec = thread(
            "p",
            "A",
            0.5,
            vec![comment("c1", "p", "B", 30), comment("c2", "p", "B", 10), comment("c3", "p", "B", 20)],
        );
        let g = build_interaction_graph(&rec, &GraphConfig::default());
        assert_eq!(g.event_list("B", "A").unwrap().timestamps(), &[10, 20, 30]);
    }
}

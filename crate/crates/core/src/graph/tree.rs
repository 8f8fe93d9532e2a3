use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::record::{Parent, ThreadRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeNodeKind {
    Post,
    /// Index into the record's comment list.
    Comment(usize),
    /// Synthetic holder for comments whose parent is missing.
    Orphans,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: TreeNodeKind,
    pub id: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
}

/// Post–comment tree rooted at the post (node 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommentTree {
    pub nodes: Vec<TreeNode>,
    pub orphan_count: usize,
}

impl CommentTree {
    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Largest number of children of any node.
    pub fn max_branching(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    /// Mean children count over nodes that have any.
    pub fn mean_branching(&self) -> f64 {
        let internal: Vec<usize> = self
            .nodes
            .iter()
            .map(|n| n.children.len())
            .filter(|&c| c > 0)
            .collect();
        if internal.is_empty() {
            0.0
        } else {
            internal.iter().sum::<usize>() as f64 / internal.len() as f64
        }
    }
}

fn reach(children: &[Vec<usize>], roots: &[usize], seen: &mut [bool]) {
    let mut queue: VecDeque<usize> = roots.iter().copied().collect();
    while let Some(c) = queue.pop_front() {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        queue.extend(children[c].iter().copied());
    }
}

pub const ORPHANS_ID: &str = "[orphans]";

/// Build the post–comment tree. Comments with a missing parent, and any
/// comment not reachable from the post (a parent cycle), hang under a
/// synthetic orphans node below the root.
pub fn build_comment_tree(rec: &ThreadRecord) -> CommentTree {
    let parents = rec.parents();
    let n = rec.comments.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut top: Vec<usize> = Vec::new();
    let mut orphans: Vec<usize> = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        match *p {
            Parent::Post => top.push(i),
            Parent::Comment(j) => children[j].push(i),
            Parent::Missing => orphans.push(i),
        }
    }

    let mut seen = vec![false; n];
    reach(&children, &top, &mut seen);
    reach(&children, &orphans, &mut seen);
    // Break cycles: promote the first unreached comment to an orphan.
    while let Some(i) = seen.iter().position(|s| !s) {
        if let Parent::Comment(j) = parents[i] {
            children[j].retain(|&c| c != i);
        }
        orphans.push(i);
        reach(&children, &[i], &mut seen);
    }

    let mut nodes = vec![TreeNode {
        kind: TreeNodeKind::Post,
        id: rec.post_id.clone(),
        parent: None,
        children: Vec::new(),
        depth: 0,
    }];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for &c in &top {
        queue.push_back((c, 0));
    }
    if !orphans.is_empty() {
        nodes.push(TreeNode {
            kind: TreeNodeKind::Orphans,
            id: String::from(ORPHANS_ID),
            parent: Some(0),
            children: Vec::new(),
            depth: 1,
        });
        nodes[0].children.push(1);
        for &c in &orphans {
            queue.push_back((c, 1));
        }
    }
    while let Some((c, parent)) = queue.pop_front() {
        let idx = nodes.len();
        let depth = nodes[parent].depth + 1;
        nodes.push(TreeNode {
            kind: TreeNodeKind::Comment(c),
            id: rec.comments[c].comment_id.clone(),
            parent: Some(parent),
            children: Vec::new(),
            depth,
        });
        nodes[parent].children.push(idx);
        for &k in &children[c] {
            queue.push_back((k, idx));
        }
    }
    CommentTree {
        nodes,
        orphan_count: orphans.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::fixtures::*;
    use alloc::format;

    #[test]
    fn flat_thread() {
        let comments = (0..5).map(|i| comment(&format!("c{i}"), "p", "B", i)).collect();
        let t = build_comment_tree(&thread("p", "A", 0.5, comments));
        assert_eq!(t.max_depth(), 1);
        assert_eq!(t.max_branching(), 5);
        assert_eq!(t.nodes.len(), 6);
    }

    #[test]
    fn chain_depth() {
        let comments = vec![
            comment("c1", "p", "B", 1),
            comment("c2", "c1", "C", 2),
            comment("c3", "c2", "B", 3),
            comment("c4", "c3", "C", 4),
        ];
        let t = build_comment_tree(&thread("p", "A", 0.5, comments));
        assert_eq!(t.max_depth(), 4);
        assert_eq!(t.max_branching(), 1);
    }

    #[test]
    fn empty_thread() {
        let t = build_comment_tree(&thread("p", "A", 0.5, vec![]));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.max_depth(), 0);
        assert_eq!(t.mean_branching(), 0.0);
    }

    #[test]
    fn orphans_and_cycles_attach_under_synthetic_node() {
        let comments = vec![
            comment("c1", "p", "B", 1),
            comment("c2", "gone", "C", 2),
            comment("c3", "c2", "D", 3),
            comment("x", "y", "E", 4),
            comment("y", "x", "F", 5),
        ];
        let t = build_comment_tree(&thread("p", "A", 0.5, comments));
        assert_eq!(t.nodes.len(), 7);
        assert_eq!(t.orphan_count, 2);
        assert_eq!(t.nodes[1].kind, TreeNodeKind::Orphans);
        assert_eq!(t.max_depth(), 3);
        // every comment appears exactly once
        let mut ids: Vec<_> = t.nodes.iter().filter_map(|n| match n.kind {
            TreeNodeKind::Comment(i) => Some(i),
            _ => None,
        }).collect();
        ids.sort();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    }
}

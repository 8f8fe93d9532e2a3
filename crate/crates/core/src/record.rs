//! Thread records: one post plus its comment forest.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Author name Reddit substitutes for removed accounts.
pub const DELETED_AUTHOR: &str = "[deleted]";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentRecord {
    pub comment_id: String,
    pub parent_id: String,
    pub author: String,
    pub body: String,
    pub created_utc: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreadRecord {
    pub post_id: String,
    pub subreddit: String,
    pub title: String,
    pub selftext: String,
    pub author: String,
    pub created_utc: i64,
    pub upvote_ratio: f64,
    #[serde(default)]
    pub comments: Vec<CommentRecord>,
}

/// What a comment's `parent_id` points at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parent {
    Post,
    Comment(usize),
    Missing,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RecordError {
    EmptyPostId,
    UpvoteRatioOutOfRange(f64),
    EmptyCommentId { index: usize },
    DuplicateCommentId(String),
    ParentCycle(String),
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordError::EmptyPostId => write!(f, "post_id is empty"),
            RecordError::UpvoteRatioOutOfRange(v) => {
                write!(f, "upvote_ratio {v} is outside [0, 1]")
            }
            RecordError::EmptyCommentId { index } => {
                write!(f, "comment #{index} has an empty comment_id")
            }
            RecordError::DuplicateCommentId(id) => write!(f, "duplicate comment_id {id:?}"),
            RecordError::ParentCycle(id) => {
                write!(f, "comment {id:?} is part of a parent_id cycle")
            }
        }
    }
}

/// Strip Reddit fullname prefixes (`t1_` comment, `t3_` link).
fn bare_id(id: &str) -> &str {
    id.strip_prefix("t1_")
        .or_else(|| id.strip_prefix("t3_"))
        .unwrap_or(id)
}

/// Parent lookup for one record. Ids match either verbatim or after
/// dropping a `t1_`/`t3_` fullname prefix.
pub struct ParentIndex<'a> {
    post_id: &'a str,
    by_id: BTreeMap<&'a str, usize>,
}

impl<'a> ParentIndex<'a> {
    pub fn new(rec: &'a ThreadRecord) -> Self {
        let mut by_id = BTreeMap::new();
        for (i, c) in rec.comments.iter().enumerate() {
            by_id.entry(c.comment_id.as_str()).or_insert(i);
        }
        ParentIndex {
            post_id: rec.post_id.as_str(),
            by_id,
        }
    }

    pub fn resolve(&self, parent_id: &str) -> Parent {
        for candidate in [parent_id, bare_id(parent_id)] {
            if candidate == self.post_id || bare_id(self.post_id) == candidate {
                return Parent::Post;
            }
            if let Some(&i) = self.by_id.get(candidate) {
                return Parent::Comment(i);
            }
        }
        // Fullname parent against bare comment ids stored with a prefix.
        for prefix in ["t1_", "t3_"] {
            let mut s = String::from(prefix);
            s.push_str(parent_id);
            if let Some(&i) = self.by_id.get(s.as_str()) {
                return Parent::Comment(i);
            }
        }
        Parent::Missing
    }

    pub fn comment_index(&self, comment_id: &str) -> Option<usize> {
        self.by_id.get(comment_id).copied()
    }
}

impl ThreadRecord {
    pub fn comment_count(&self) -> usize {
        self.comments.len()
    }

    /// Resolved parent of every comment, in comment order.
    pub fn parents(&self) -> Vec<Parent> {
        let index = ParentIndex::new(self);
        self.comments
            .iter()
            .map(|c| index.resolve(&c.parent_id))
            .collect()
    }

    /// Check the record invariants.
    ///
    /// Comments whose parent is absent from the record are accepted; the
    /// graph and tree builders count and skip them. Cycles among parent
    /// links are rejected.
    pub fn validate(&self) -> Result<(), RecordError> {
        if self.post_id.trim().is_empty() {
            return Err(RecordError::EmptyPostId);
        }
        if !(0.0..=1.0).contains(&self.upvote_ratio) {
            return Err(RecordError::UpvoteRatioOutOfRange(self.upvote_ratio));
        }
        let mut seen = BTreeMap::new();
        for (i, c) in self.comments.iter().enumerate() {
            if c.comment_id.trim().is_empty() {
                return Err(RecordError::EmptyCommentId { index: i });
            }
            if seen.insert(c.comment_id.as_str(), i).is_some() {
                return Err(RecordError::DuplicateCommentId(c.comment_id.clone()));
            }
        }
        let parents = self.parents();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; parents.len()];
        for start in 0..parents.len() {
            let mut path = Vec::new();
            let mut cur = start;
            loop {
                match state[cur] {
                    2 => break,
                    1 => return Err(RecordError::ParentCycle(self.comments[cur].comment_id.clone())),
                    _ => {}
                }
                state[cur] = 1;
                path.push(cur);
                match parents[cur] {
                    Parent::Comment(p) => cur = p,
                    Parent::Post | Parent::Missing => break,
                }
            }
            for i in path {
                state[i] = 2;
            }
        }
        Ok(())
    }

    /// Collapse whitespace runs in all free-text fields.
    pub fn normalize_whitespace(&mut self) {
        self.title = collapse_whitespace(&self.title);
        self.selftext = collapse_whitespace(&self.selftext);
        for c in &mut self.comments {
            c.body = collapse_whitespace(&c.body);
        }
    }
}

pub fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use alloc::string::ToString;

    pub fn comment(id: &str, parent: &str, author: &str, t: i64) -> CommentRecord {
        CommentRecord {
            comment_id: id.to_string(),
            parent_id: parent.to_string(),
            author: author.to_string(),
            body: String::new(),
            created_utc: t,
        }
    }

    pub fn thread(post_id: &str, author: &str, ur: f64, comments: Vec<CommentRecord>) -> ThreadRecord {
        ThreadRecord {
            post_id: post_id.to_string(),
            subreddit: "test".to_string(),
            title: String::new(),
            selftext: String::new(),
            author: author.to_string(),
            created_utc: 0,
            upvote_ratio: ur,
            comments,
        }
    }
}

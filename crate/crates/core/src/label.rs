//! Upvote-ratio labeling and dataset summaries.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::record::ThreadRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LabelValue {
    Controversial,
    NonControversial,
    Excluded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LabelReason {
    InControversialBand,
    InNonControversialBand,
    URGap,
    TooFewComments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub value: LabelValue,
    pub reason: LabelReason,
}

impl Label {
    pub fn is_included(&self) -> bool {
        self.value != LabelValue::Excluded
    }

    /// `Some(true)` for controversial, `Some(false)` for non-controversial.
    pub fn as_binary(&self) -> Option<bool> {
        match self.value {
            LabelValue::Controversial => Some(true),
            LabelValue::NonControversial => Some(false),
            LabelValue::Excluded => None,
        }
    }
}

/// Closed interval of upvote ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelConfig {
    pub controversial: Band,
    pub non_controversial: Band,
    /// Posts with fewer comments than this are excluded.
    pub min_comments: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            controversial: Band { lo: 0.30, hi: 0.70 },
            non_controversial: Band { lo: 0.80, hi: 1.00 },
            min_comments: 5,
        }
    }
}

/// Label from the pair (upvote ratio, comment count). All band bounds are
/// inclusive; the comment filter takes precedence over the bands.
pub fn label_from(upvote_ratio: f64, comment_count: usize, cfg: &LabelConfig) -> Label {
    let (value, reason) = if comment_count < cfg.min_comments {
        (LabelValue::Excluded, LabelReason::TooFewComments)
    } else if cfg.controversial.contains(upvote_ratio) {
        (LabelValue::Controversial, LabelReason::InControversialBand)
    } else if cfg.non_controversial.contains(upvote_ratio) {
        (LabelValue::NonControversial, LabelReason::InNonControversialBand)
    } else {
        (LabelValue::Excluded, LabelReason::URGap)
    };
    Label { value, reason }
}

/// Label a post. Every comment counts toward the filter, deleted authors included.
pub fn label_post(rec: &ThreadRecord, cfg: &LabelConfig) -> Label {
    label_from(rec.upvote_ratio, rec.comment_count(), cfg)
}

/// Counts in the shape of a filtered-dataset statistics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub total_posts: usize,
    pub controversial: usize,
    pub non_controversial: usize,
    pub excluded: usize,
    pub excluded_ur_gap: usize,
    pub excluded_too_few_comments: usize,
    /// Comments over labeled (non-excluded) posts.
    pub total_comments: usize,
    /// Median comments per labeled post.
    pub median_comments: Option<f64>,
}

impl SummaryTable {
    /// NC per C, `None` when there are no controversial posts.
    pub fn ratio(&self) -> Option<f64> {
        if self.controversial == 0 {
            None
        } else {
            Some(self.non_controversial as f64 / self.controversial as f64)
        }
    }

    /// `"1 : 7.74"` style rendering, `"n/a"` when undefined.
    pub fn ratio_display(&self) -> String {
        match self.ratio() {
            Some(r) => format!("1 : {r:.2}"),
            None => String::from("n/a"),
        }
    }
}

pub fn dataset_summary<'a, I>(items: I) -> SummaryTable
where
    I: IntoIterator<Item = (&'a ThreadRecord, &'a Label)>,
{
    let mut t = SummaryTable {
        total_posts: 0,
        controversial: 0,
        non_controversial: 0,
        excluded: 0,
        excluded_ur_gap: 0,
        excluded_too_few_comments: 0,
        total_comments: 0,
        median_comments: None,
    };
    let mut counts: Vec<usize> = Vec::new();
    for (rec, label) in items {
        t.total_posts += 1;
        match label.value {
            LabelValue::Controversial => t.controversial += 1,
            LabelValue::NonControversial => t.non_controversial += 1,
            LabelValue::Excluded => {
                t.excluded += 1;
                match label.reason {
                    LabelReason::TooFewComments => t.excluded_too_few_comments += 1,
                    _ => t.excluded_ur_gap += 1,
                }
            }
        }
        if label.is_included() {
            t.total_comments += rec.comment_count();
            counts.push(rec.comment_count());
        }
    }
    t.median_comments = median(&mut counts);
    t
}

fn median(xs: &mut [usize]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_unstable();
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[m] as f64
    } else {
        (xs[m - 1] + xs[m]) as f64 / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::fixtures::*;

    fn lab(ur: f64, n: usize) -> Label {
        label_from(ur, n, &LabelConfig::default())
    }

    #[test]
    fn band_examples() {
        assert_eq!(lab(0.50, 20).value, LabelValue::Controversial);
        assert_eq!(lab(0.95, 20).value, LabelValue::NonControversial);
        assert_eq!(lab(0.75, 20), Label { value: LabelValue::Excluded, reason: LabelReason::URGap });
        assert_eq!(lab(0.50, 3), Label { value: LabelValue::Excluded, reason: LabelReason::TooFewComments });
    }

    #[test]
    fn bounds_are_inclusive() {
        for ur in [0.30, 0.70] {
            assert_eq!(lab(ur, 5).value, LabelValue::Controversial);
        }
        for ur in [0.80, 1.00] {
            assert_eq!(lab(ur, 5).value, LabelValue::NonControversial);
        }
        assert_eq!(lab(0.29, 5).reason, LabelReason::URGap);
        assert_eq!(lab(0.0, 5).reason, LabelReason::URGap);
        assert_eq!(lab(0.5, 4).reason, LabelReason::TooFewComments);
    }

    #[test]
    fn summary_ratio() {
        let recs: Vec<_> = (0..10)
            .map(|i| {
                let comments = (0..(5 + i)).map(|j| comment(&format!("c{j}"), "p", "u", 0)).collect();
                thread(&format!("p{i}"), "A", if i < 2 { 0.5 } else { 0.9 }, comments)
            })
            .collect();
        let labels: Vec<_> = recs.iter().map(|r| label_post(r, &LabelConfig::default())).collect();
        let t = dataset_summary(recs.iter().zip(labels.iter()));
        assert_eq!((t.controversial, t.non_controversial), (2, 8));
        assert_eq!(t.ratio_display(), "1 : 4.00");
        assert_eq!(t.total_comments, (5..15).sum::<usize>());
        assert_eq!(t.median_comments, Some(9.5));
    }

    #[test]
    fn summary_of_reported_counts() {
        let t = SummaryTable {
            total_posts: 18_462,
            controversial: 2_112,
            non_controversial: 16_350,
            excluded: 0,
            excluded_ur_gap: 0,
            excluded_too_few_comments: 0,
            total_comments: 946_775,
            median_comments: Some(20.0),
        };
        assert_eq!(t.ratio_display(), "1 : 7.74");
    }

    #[test]
    fn empty_summary() {
        let t = dataset_summary(core::iter::empty());
        assert_eq!(t.total_posts, 0);
        assert_eq!(t.ratio_display(), "n/a");
        assert_eq!(t.median_comments, None);
    }
}

//! Discrete mechanics of an engagement pod: members submit posts to a
//! shared channel and must like and comment the most recent posts by other
//! members before submitting their own. An algorithm enforces the rule by
//! deleting submissions whose obligations were not met.
//!
//! Obligations derive purely from the submission order, so the whole module
//! is a deterministic fold over the log.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One submission to the pod channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub member_id: String,
    pub post_id: String,
    /// Monotone clock; strictly increasing within a log.
    pub timestamp: u64,
}

/// How the "last N posts" window is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObligationMode {
    /// The N most recent distinct posts by other members; the submitter's
    /// own posts do not occupy window slots. This is the default reading:
    /// engaging with one's own post is meaningless on the platform.
    #[default]
    SkipOwn,
    /// A strict positional window over the last N submissions, own posts
    /// included (they consume slots but create no obligation). Kept for
    /// sensitivity analysis.
    PositionalWindow,
}

/// A like or a comment left on a post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEvent {
    pub member_id: String,
    pub post_id: String,
    pub timestamp: u64,
    pub kind: EngagementKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngagementKind {
    Like,
    Comment,
}

/// Obligations created by one submission: the posts its submitter had to
/// engage with beforehand, most recent first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionObligations {
    pub member_id: String,
    pub post_id: String,
    pub timestamp: u64,
    /// Target posts, paired with the timestamp at which each target was
    /// submitted (its latest prior submission).
    pub targets: Vec<(String, u64)>,
}

/// All obligations derived from a log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationSet {
    /// Window size the set was derived with.
    pub n: usize,
    pub mode: ObligationMode,
    pub per_submission: Vec<SubmissionObligations>,
}

impl ObligationSet {
    /// Collapsed view: post id to the set of members obligated to engage it.
    pub fn by_post(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for sub in &self.per_submission {
            for (post, _) in &sub.targets {
                map.entry(post.clone())
                    .or_default()
                    .insert(sub.member_id.clone());
            }
        }
        map
    }

    /// Number of distinct (member, post) obligation pairs.
    pub fn total_obligations(&self) -> usize {
        self.by_post().values().map(|m| m.len()).sum()
    }
}

fn check_log(log: &[Submission]) -> Result<()> {
    for i in 1..log.len() {
        let prev = &log[i - 1];
        let cur = &log[i];
        if cur.timestamp == prev.timestamp
            && cur.member_id == prev.member_id
            && cur.post_id == prev.post_id
        {
            return Err(Error::MalformedLog(format!(
                "duplicate submission of ({}, {}) at timestamp {}",
                cur.member_id, cur.post_id, cur.timestamp
            )));
        }
        if cur.timestamp <= prev.timestamp {
            return Err(Error::MalformedLog(format!(
                "timestamps must be strictly increasing: position {} has {} after {}",
                i, cur.timestamp, prev.timestamp
            )));
        }
    }
    Ok(())
}

/// Obligation targets for a submitter against a log prefix.
fn window_targets(
    prefix: &[Submission],
    submitter: &str,
    n: usize,
    mode: ObligationMode,
) -> Vec<(String, u64)> {
    let mut targets = Vec::with_capacity(n);
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    match mode {
        ObligationMode::SkipOwn => {
            for sub in prefix.iter().rev() {
                if sub.member_id == submitter {
                    continue;
                }
                if seen.insert(&sub.post_id) {
                    targets.push((sub.post_id.clone(), sub.timestamp));
                    if targets.len() == n {
                        break;
                    }
                }
            }
        }
        ObligationMode::PositionalWindow => {
            let mut slots = 0usize;
            for sub in prefix.iter().rev() {
                if slots == n {
                    break;
                }
                slots += 1;
                if sub.member_id == submitter {
                    continue;
                }
                if seen.insert(&sub.post_id) {
                    targets.push((sub.post_id.clone(), sub.timestamp));
                }
            }
        }
    }
    targets
}

/// Derive every submission's obligations from a log: each submitter owes a
/// like and a comment to the `n` most recent prior posts by other members
/// (fewer when the history is shorter).
pub fn derive_obligations(
    log: &[Submission],
    n: usize,
    mode: ObligationMode,
) -> Result<ObligationSet> {
    if n == 0 {
        return Err(Error::config("window size must be at least 1".to_string()));
    }
    check_log(log)?;
    let per_submission = log
        .iter()
        .enumerate()
        .map(|(i, sub)| SubmissionObligations {
            member_id: sub.member_id.clone(),
            post_id: sub.post_id.clone(),
            timestamp: sub.timestamp,
            targets: window_targets(&log[..i], &sub.member_id, n, mode),
        })
        .collect();
    Ok(ObligationSet {
        n,
        mode,
        per_submission,
    })
}

/// Outcome of enforcing the pod rules on a log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `(member_id, post_id)` of each deleted submission, in log order.
    pub violations: Vec<(String, String)>,
    /// The log with violating submissions removed.
    pub purged_log: Vec<Submission>,
}

/// Timestamps of one member's likes and comments on one post.
struct EventIndex {
    likes: HashMap<(String, String), Vec<u64>>,
    comments: HashMap<(String, String), Vec<u64>>,
}

impl EventIndex {
    fn build(events: &[EngagementEvent]) -> Self {
        let mut likes: HashMap<(String, String), Vec<u64>> = HashMap::new();
        let mut comments: HashMap<(String, String), Vec<u64>> = HashMap::new();
        for e in events {
            let key = (e.member_id.clone(), e.post_id.clone());
            match e.kind {
                EngagementKind::Like => likes.entry(key).or_default().push(e.timestamp),
                EngagementKind::Comment => comments.entry(key).or_default().push(e.timestamp),
            }
        }
        for v in likes.values_mut().chain(comments.values_mut()) {
            v.sort_unstable();
        }
        EventIndex { likes, comments }
    }

    fn has_in(&self, kind: EngagementKind, member: &str, post: &str, lo: u64, hi: u64) -> bool {
        let map = match kind {
            EngagementKind::Like => &self.likes,
            EngagementKind::Comment => &self.comments,
        };
        map.get(&(member.to_string(), post.to_string()))
            .map(|ts| {
                let start = ts.partition_point(|t| *t < lo);
                start < ts.len() && ts[start] < hi
            })
            .unwrap_or(false)
    }
}

/// Enforce the pod rules: a submission is a violation if any of its
/// obligations lacks both a like and a comment in the admissible interval.
///
/// The admissible interval for an obligation of a submission at time `T`
/// toward a post submitted at `t_p` is `[max(t_p, T - w), T)` with deadline
/// window `w`, or `[t_p, T)` when no window is given (engage any time after
/// the target appeared and before submitting). Deleting a submission removes
/// its post from later members' windows, so obligations are recomputed
/// against the surviving prefix as the scan advances; validating the purged
/// log therefore yields no violations.
pub fn validate(
    log: &[Submission],
    obligations: &ObligationSet,
    events: &[EngagementEvent],
    deadline_window: Option<u64>,
) -> Result<ValidationReport> {
    check_log(log)?;
    let index = EventIndex::build(events);
    let mut kept: Vec<Submission> = Vec::with_capacity(log.len());
    let mut violations = Vec::new();
    for sub in log {
        let targets = window_targets(&kept, &sub.member_id, obligations.n, obligations.mode);
        let satisfied = targets.iter().all(|(post, t_post)| {
            let lo = match deadline_window {
                Some(w) => (*t_post).max(sub.timestamp.saturating_sub(w)),
                None => *t_post,
            };
            index.has_in(EngagementKind::Like, &sub.member_id, post, lo, sub.timestamp)
                && index.has_in(
                    EngagementKind::Comment,
                    &sub.member_id,
                    post,
                    lo,
                    sub.timestamp,
                )
        });
        if satisfied {
            kept.push(sub.clone());
        } else {
            violations.push((sub.member_id.clone(), sub.post_id.clone()));
        }
    }
    Ok(ValidationReport {
        violations,
        purged_log: kept,
    })
}

/// Number of distinct members obligated to engage each post.
pub fn direct_engagement_count(obligations: &ObligationSet) -> BTreeMap<String, usize> {
    obligations
        .by_post()
        .into_iter()
        .map(|(post, members)| (post, members.len()))
        .collect()
}

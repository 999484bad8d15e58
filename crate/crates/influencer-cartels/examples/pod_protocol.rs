//! Pod mechanics end to end: a submission log, the derived obligations, and
//! algorithmic enforcement purging a member who skipped a comment.
//!
//! Run with: cargo run --example pod_protocol

use influencer_cartels::pod::{
    derive_obligations, direct_engagement_count, validate, EngagementEvent, EngagementKind,
    ObligationMode, Submission,
};

fn sub(member: &str, post: &str, ts: u64) -> Submission {
    Submission {
        member_id: member.into(),
        post_id: post.into(),
        timestamp: ts,
    }
}

fn main() {
    // Eight submissions from five members; walrus posts twice.
    let log = vec![
        sub("ava", "ava_sunset", 10),
        sub("ben", "ben_gym", 20),
        sub("cleo", "cleo_ramen", 30),
        sub("walrus", "walrus_surf", 40),
        sub("walrus", "walrus_board", 50),
        sub("dana", "dana_lisbon", 60),
        sub("ava", "ava_latte", 70),
        sub("ben", "ben_protein", 80),
    ];
    let n = 3;
    let set = derive_obligations(&log, n, ObligationMode::SkipOwn).unwrap();

    println!("obligations (window of {n} most recent posts by others):\n");
    for s in &set.per_submission {
        let targets: Vec<&str> = s.targets.iter().map(|(p, _)| p.as_str()).collect();
        println!("  {:>7} submits {:<13} owes {:?}", s.member_id, s.post_id, targets);
    }

    println!("\nobligated engagers per post:");
    for (post, count) in direct_engagement_count(&set) {
        println!("  {post:<13} {count}");
    }

    // Everyone engages dutifully except dana, who never comments on
    // walrus_board.
    let mut events = Vec::new();
    for s in &set.per_submission {
        for (post, t_post) in &s.targets {
            let t = (*t_post).max(s.timestamp - 1);
            events.push(EngagementEvent {
                member_id: s.member_id.clone(),
                post_id: post.clone(),
                timestamp: t,
                kind: EngagementKind::Like,
            });
            if !(s.member_id == "dana" && post == "walrus_board") {
                events.push(EngagementEvent {
                    member_id: s.member_id.clone(),
                    post_id: post.clone(),
                    timestamp: t,
                    kind: EngagementKind::Comment,
                });
            }
        }
    }

    let report = validate(&log, &set, &events, None).unwrap();
    println!("\nenforcement: {} violation(s)", report.violations.len());
    for (member, post) in &report.violations {
        println!("  deleted {member}'s submission of {post} (missing like+comment)");
    }
    println!("surviving log:");
    for s in &report.purged_log {
        println!("  t={:<3} {:>7} {}", s.timestamp, s.member_id, s.post_id);
    }

    // Downstream windows shift once a submission is purged: ava's second
    // submission now looks further back.
    let purged_set = derive_obligations(&report.purged_log, n, ObligationMode::SkipOwn).unwrap();
    let ava2 = purged_set
        .per_submission
        .iter()
        .find(|s| s.post_id == "ava_latte")
        .unwrap();
    let targets: Vec<&str> = ava2.targets.iter().map(|(p, _)| p.as_str()).collect();
    println!("\nafter the purge, ava_latte owes {targets:?}");
}

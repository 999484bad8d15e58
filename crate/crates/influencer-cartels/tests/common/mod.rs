#![allow(dead_code)] // each test target uses a different subset

//! Independent oracles shared by the integration suites. Everything here is
//! deliberately written on a different code path from the library: forward
//! scans instead of backward walks, dummy-variable least squares instead of
//! the within estimator, scalar loops instead of matrix routines.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use influencer_cartels::empirics::panel::{CommenterClass, PanelObservation};
use influencer_cartels::pod::{ObligationMode, Submission};

/// Quadratic-time obligation oracle: for every submission, scan the whole
/// prior log forward, keep each post's latest occurrence, filter by mode,
/// sort by recency and truncate.
pub fn brute_force_obligations(
    log: &[Submission],
    n: usize,
    mode: ObligationMode,
) -> Vec<Vec<(String, u64)>> {
    (0..log.len())
        .map(|i| {
            let submitter = &log[i].member_id;
            let window_start = match mode {
                ObligationMode::SkipOwn => 0,
                ObligationMode::PositionalWindow => i.saturating_sub(n),
            };
            let mut latest: HashMap<&str, (usize, u64)> = HashMap::new();
            for (j, sub) in log.iter().enumerate().take(i).skip(window_start) {
                if sub.member_id != *submitter {
                    latest.insert(sub.post_id.as_str(), (j, sub.timestamp));
                }
            }
            let mut posts: Vec<(&str, usize, u64)> = latest
                .into_iter()
                .map(|(post, (pos, ts))| (post, pos, ts))
                .collect();
            posts.sort_by(|a, b| b.1.cmp(&a.1));
            let keep = match mode {
                ObligationMode::SkipOwn => n,
                ObligationMode::PositionalWindow => posts.len(),
            };
            posts
                .into_iter()
                .take(keep)
                .map(|(post, _, ts)| (post.to_string(), ts))
                .collect()
        })
        .collect()
}

/// Random pod log with fuzzed member multiplicities and resubmissions.
pub fn random_log(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Submission> {
    let len = rng.random_range(1..=max_len);
    let n_members = rng.random_range(1..=12usize);
    // Skew member frequencies so some members dominate long stretches.
    let weights: Vec<f64> = (0..n_members)
        .map(|_| rng.random::<f64>().powi(3) + 0.02)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut posts_by_member: Vec<Vec<String>> = vec![Vec::new(); n_members];
    let mut log = Vec::with_capacity(len);
    let mut ts = 0u64;
    for i in 0..len {
        let mut pick = rng.random::<f64>() * total;
        let mut member = 0usize;
        for (m, w) in weights.iter().enumerate() {
            pick -= w;
            if pick <= 0.0 {
                member = m;
                break;
            }
        }
        let resubmit = !posts_by_member[member].is_empty() && rng.random::<f64>() < 0.15;
        let post = if resubmit {
            let k = rng.random_range(0..posts_by_member[member].len());
            posts_by_member[member][k].clone()
        } else {
            let post = format!("m{member}_p{i}");
            posts_by_member[member].push(post.clone());
            post
        };
        ts += rng.random_range(1..5u64);
        log.push(Submission {
            member_id: format!("m{member}"),
            post_id: post,
            timestamp: ts,
        });
    }
    log
}

/// Random balanced-ish panel: every author gets natural base observations
/// plus a random mix of the other classes.
pub fn random_panel(rng: &mut ChaCha8Rng, max_authors: usize) -> Vec<PanelObservation> {
    let n_authors = rng.random_range(4..=max_authors.max(5));
    let mut panel = Vec::new();
    for a in 0..n_authors {
        let author_id = format!("author{a}");
        let level = rng.random::<f64>() * 0.4 + 0.3;
        let n_natural = rng.random_range(1..=2usize);
        let mut push = |class: CommenterClass, idx: usize, rng: &mut ChaCha8Rng| {
            let shift = match class {
                CommenterClass::Natural => 0.0,
                CommenterClass::TopicCartel => -0.05,
                CommenterClass::GeneralCartel => -0.2,
                CommenterClass::RandomUser => -0.25,
            };
            let sim = (level + shift + (rng.random::<f64>() - 0.5) * 0.2).clamp(-1.0, 1.0);
            panel.push(PanelObservation {
                author_id: author_id.clone(),
                commenter_id: format!("{author_id}_{class}_{idx}"),
                class,
                similarity: sim,
            });
        };
        for i in 0..n_natural {
            push(CommenterClass::Natural, i, rng);
        }
        for class in [
            CommenterClass::GeneralCartel,
            CommenterClass::TopicCartel,
            CommenterClass::RandomUser,
        ] {
            for i in 0..rng.random_range(1..=3usize) {
                push(class, i, rng);
            }
        }
    }
    panel
}

/// Dummy-variable least squares: one indicator per author plus one per
/// non-base class, solved through the normal equations with plain
/// Gauss-Jordan elimination.
pub fn dummy_variable_ols(panel: &[PanelObservation]) -> BTreeMap<CommenterClass, f64> {
    let mut authors: Vec<&str> = Vec::new();
    for obs in panel {
        if !authors.contains(&obs.author_id.as_str()) {
            authors.push(obs.author_id.as_str());
        }
    }
    let classes: Vec<CommenterClass> = [
        CommenterClass::GeneralCartel,
        CommenterClass::TopicCartel,
        CommenterClass::RandomUser,
    ]
    .into_iter()
    .filter(|c| panel.iter().any(|o| o.class == *c))
    .collect();
    let g = authors.len();
    let p = g + classes.len();
    let n = panel.len();
    let mut x = vec![vec![0.0f64; p]; n];
    let mut y = vec![0.0f64; n];
    for (i, obs) in panel.iter().enumerate() {
        let a = authors.iter().position(|u| *u == obs.author_id).unwrap();
        x[i][a] = 1.0;
        if let Some(c) = classes.iter().position(|c| *c == obs.class) {
            x[i][g + c] = 1.0;
        }
        y[i] = obs.similarity;
    }
    let mut xtx = vec![vec![0.0f64; p]; p];
    let mut xty = vec![0.0f64; p];
    for i in 0..n {
        for a in 0..p {
            xty[a] += x[i][a] * y[i];
            for b in 0..p {
                xtx[a][b] += x[i][a] * x[i][b];
            }
        }
    }
    let beta = gauss_solve(&mut xtx, &mut xty);
    classes
        .into_iter()
        .enumerate()
        .map(|(c, class)| (class, beta[g + c]))
        .collect()
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        assert!(d.abs() > 1e-12, "oracle design is singular");
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col] / d;
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// Cluster-robust standard errors computed from first principles: demean
/// within author, estimate slopes, then assemble the CR1-scaled sandwich
/// with explicit loops over clusters.
pub fn naive_clustered_se(panel: &[PanelObservation]) -> BTreeMap<CommenterClass, f64> {
    let mut authors: Vec<&str> = Vec::new();
    for obs in panel {
        if !authors.contains(&obs.author_id.as_str()) {
            authors.push(obs.author_id.as_str());
        }
    }
    let classes: Vec<CommenterClass> = [
        CommenterClass::GeneralCartel,
        CommenterClass::TopicCartel,
        CommenterClass::RandomUser,
    ]
    .into_iter()
    .filter(|c| panel.iter().any(|o| o.class == *c))
    .collect();
    let p = classes.len();
    let n = panel.len();
    let g = authors.len();

    let mut xt = vec![vec![0.0f64; p]; n];
    let mut yt = vec![0.0f64; n];
    for author in &authors {
        let idx: Vec<usize> = (0..n)
            .filter(|&i| panel[i].author_id == *author)
            .collect();
        let m = idx.len() as f64;
        let ymean = idx.iter().map(|&i| panel[i].similarity).sum::<f64>() / m;
        for &i in &idx {
            yt[i] = panel[i].similarity - ymean;
        }
        for (c, class) in classes.iter().enumerate() {
            let xmean = idx
                .iter()
                .filter(|&&i| panel[i].class == *class)
                .count() as f64
                / m;
            for &i in &idx {
                let raw = if panel[i].class == *class { 1.0 } else { 0.0 };
                xt[i][c] = raw - xmean;
            }
        }
    }
    let mut xtx = vec![vec![0.0f64; p]; p];
    let mut xty = vec![0.0f64; p];
    for i in 0..n {
        for a in 0..p {
            xty[a] += xt[i][a] * yt[i];
            for b in 0..p {
                xtx[a][b] += xt[i][a] * xt[i][b];
            }
        }
    }
    let mut xtx_for_solve = xtx.clone();
    let mut rhs = xty.clone();
    let beta = gauss_solve(&mut xtx_for_solve, &mut rhs);

    // Bread: inverse of X'X by solving against unit vectors.
    let mut inv = vec![vec![0.0f64; p]; p];
    for col in 0..p {
        let mut a = xtx.clone();
        let mut e = vec![0.0f64; p];
        e[col] = 1.0;
        let solved = gauss_solve(&mut a, &mut e);
        for row in 0..p {
            inv[row][col] = solved[row];
        }
    }
    // Meat: sum over clusters of outer products of score sums.
    let mut meat = vec![vec![0.0f64; p]; p];
    for author in &authors {
        let mut score = vec![0.0f64; p];
        for i in (0..n).filter(|&i| panel[i].author_id == *author) {
            let mut fitted = 0.0;
            for a in 0..p {
                fitted += xt[i][a] * beta[a];
            }
            let resid = yt[i] - fitted;
            for a in 0..p {
                score[a] += xt[i][a] * resid;
            }
        }
        for a in 0..p {
            for b in 0..p {
                meat[a][b] += score[a] * score[b];
            }
        }
    }
    let k = (p + g) as f64;
    let cr1 = g as f64 / (g as f64 - 1.0) * (n as f64 - 1.0) / (n as f64 - k);
    let mut se = BTreeMap::new();
    for (c, class) in classes.iter().enumerate() {
        let mut var = 0.0;
        for a in 0..p {
            for b in 0..p {
                var += inv[c][a] * meat[a][b] * inv[b][c];
            }
        }
        se.insert(*class, (var * cr1).sqrt());
    }
    se
}

/// Planted three-topic corpus sized to pass the default pruning thresholds:
/// 300 users, 30 words per topic, 40 tokens per user drawn from the user's
/// topic vocabulary.
pub fn planted_topic_corpus(
    seed: u64,
) -> (
    Vec<influencer_cartels::empirics::lda::CorpusDoc>,
    Vec<Vec<String>>,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocabularies: Vec<Vec<String>> = (0..3)
        .map(|t| (0..30).map(|w| format!("t{t}_w{w:02}")).collect())
        .collect();
    let docs = (0..300)
        .map(|i| {
            let topic = i % 3;
            let tokens: Vec<String> = (0..40)
                .map(|_| vocabularies[topic][rng.random_range(0..30usize)].clone())
                .collect();
            influencer_cartels::empirics::lda::CorpusDoc {
                user_id: format!("u{i:03}"),
                tokens,
            }
        })
        .collect();
    (docs, vocabularies)
}

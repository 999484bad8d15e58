//! Latent Dirichlet Allocation fitted by collapsed Gibbs sampling
//! (Griffiths & Steyvers 2004), with the vocabulary and corpus pruning used
//! throughout the pipeline.
//!
//! Point estimates are the post-burn-in averages of the smoothed count
//! ratios; chains are deterministic for a fixed seed.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One user's hashtag sequence (order and duplicates preserved).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDoc {
    pub user_id: String,
    pub tokens: Vec<String>,
}

/// Vocabulary and corpus pruning thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneParams {
    /// Keep a token only if at least this many users use it.
    pub min_users: usize,
    /// Drop a token if more than this share of users use it.
    pub max_user_share: f64,
    /// Truncate each user's token sequence at this length, in submission
    /// order.
    pub max_tokens_per_user: usize,
    /// Drop users with fewer distinct kept tokens than this.
    pub min_unique_tokens: usize,
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams {
            min_users: 50,
            max_user_share: 0.33,
            max_tokens_per_user: 1000,
            min_unique_tokens: 15,
        }
    }
}

/// Corpus after pruning: token ids index into `vocabulary`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedCorpus {
    pub vocabulary: Vec<String>,
    /// `(user_id, token ids)` for every surviving user, in input order.
    pub docs: Vec<(String, Vec<usize>)>,
    pub raw_vocabulary_size: usize,
    pub dropped_users: usize,
}

/// Apply the pruning rules: token document frequencies are counted at the
/// user level over the raw corpus; surviving sequences are truncated; users
/// with too little signal are dropped.
pub fn prune_corpus(docs: &[CorpusDoc], params: &PruneParams) -> Result<PrunedCorpus> {
    let n_users = docs.len();
    // User-level document frequency, in first-appearance order.
    let mut order: Vec<&str> = Vec::new();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen: HashSet<&str> = HashSet::new();
        for tok in &doc.tokens {
            if seen.insert(tok) {
                let entry = df.entry(tok).or_insert(0);
                if *entry == 0 {
                    order.push(tok);
                }
                *entry += 1;
            }
        }
    }
    let raw_vocabulary_size = order.len();
    let max_df = params.max_user_share * n_users as f64;
    let vocabulary: Vec<String> = order
        .iter()
        .filter(|tok| {
            let d = df[**tok];
            d >= params.min_users && d as f64 <= max_df
        })
        .map(|tok| tok.to_string())
        .collect();
    let index: HashMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let mut kept_docs = Vec::new();
    let mut dropped_users = 0usize;
    for doc in docs {
        let ids: Vec<usize> = doc
            .tokens
            .iter()
            .filter_map(|t| index.get(t.as_str()).copied())
            .take(params.max_tokens_per_user)
            .collect();
        let unique: HashSet<usize> = ids.iter().copied().collect();
        if unique.len() < params.min_unique_tokens {
            dropped_users += 1;
        } else {
            kept_docs.push((doc.user_id.clone(), ids));
        }
    }
    if kept_docs.is_empty() || vocabulary.is_empty() {
        return Err(Error::config(format!(
            "corpus is empty after pruning: {} of {} tokens kept (min {} users, max share \
             {}), {} of {} users kept (min {} unique tokens, cap {} tokens)",
            vocabulary.len(),
            raw_vocabulary_size,
            params.min_users,
            params.max_user_share,
            kept_docs.len(),
            n_users,
            params.min_unique_tokens,
            params.max_tokens_per_user,
        )));
    }
    Ok(PrunedCorpus {
        vocabulary,
        docs: kept_docs,
        raw_vocabulary_size,
        dropped_users,
    })
}

/// Sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    /// Topic count.
    pub k: usize,
    /// Document-topic smoothing; defaults to `50 / k` when `None`.
    pub alpha: Option<f64>,
    /// Topic-word smoothing.
    pub beta: f64,
    /// Total Gibbs sweeps.
    pub iterations: usize,
    /// Sweeps discarded before averaging.
    pub burn_in: usize,
    pub seed: u64,
    pub prune: PruneParams,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams {
            k: 6,
            alpha: None,
            beta: 0.01,
            iterations: 2000,
            burn_in: 500,
            seed: 0,
            prune: PruneParams::default(),
        }
    }
}

/// Fitted topic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocabulary: Vec<String>,
    pub user_ids: Vec<String>,
    /// `k` rows over the vocabulary, each summing to 1.
    pub topic_word: Vec<Vec<f64>>,
    /// One row per user over topics, each summing to 1.
    pub doc_topic: Vec<Vec<f64>>,
}

impl LdaModel {
    pub fn doc_topic_for(&self, user_id: &str) -> Option<&[f64]> {
        self.user_ids
            .iter()
            .position(|u| u == user_id)
            .map(|i| self.doc_topic[i].as_slice())
    }

    /// Top `n` vocabulary entries of a topic by probability; ties broken by
    /// vocabulary order.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<&str> {
        let row = &self.topic_word[topic];
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap().then(a.cmp(&b)));
        idx.into_iter()
            .take(n)
            .map(|i| self.vocabulary[i].as_str())
            .collect()
    }
}

/// Fit LDA by collapsed Gibbs sampling on the pruned corpus.
pub fn lda_fit(docs: &[CorpusDoc], params: &LdaParams) -> Result<LdaModel> {
    if params.k == 0 {
        return Err(Error::config("need at least one topic".to_string()));
    }
    if params.iterations == 0 || params.burn_in >= params.iterations {
        return Err(Error::config(format!(
            "iterations ({}) must exceed burn-in ({})",
            params.iterations, params.burn_in
        )));
    }
    if !(params.beta > 0.0) {
        return Err(Error::config("beta must be positive".to_string()));
    }
    let alpha = params.alpha.unwrap_or(50.0 / params.k as f64);
    if !(alpha > 0.0) {
        return Err(Error::config("alpha must be positive".to_string()));
    }
    let corpus = prune_corpus(docs, &params.prune)?;
    let k = params.k;
    let v = corpus.vocabulary.len();
    let d = corpus.docs.len();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut n_dk = vec![0u32; d * k];
    let mut n_kw = vec![0u32; k * v];
    let mut n_k = vec![0u32; k];
    let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(d);
    for (di, (_, ids)) in corpus.docs.iter().enumerate() {
        let mut z = Vec::with_capacity(ids.len());
        for &w in ids {
            let t = (rng.random::<f64>() * k as f64) as usize % k;
            z.push(t);
            n_dk[di * k + t] += 1;
            n_kw[t * v + w] += 1;
            n_k[t] += 1;
        }
        assignments.push(z);
    }

    let vb = v as f64 * params.beta;
    let mut phi_acc = vec![0.0f64; k * v];
    let mut theta_acc = vec![0.0f64; d * k];
    let mut samples = 0usize;
    let mut weights = vec![0.0f64; k];

    for sweep in 0..params.iterations {
        for (di, (_, ids)) in corpus.docs.iter().enumerate() {
            for (pos, &w) in ids.iter().enumerate() {
                let old = assignments[di][pos];
                n_dk[di * k + old] -= 1;
                n_kw[old * v + w] -= 1;
                n_k[old] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    let wt = (n_dk[di * k + t] as f64 + alpha)
                        * (n_kw[t * v + w] as f64 + params.beta)
                        / (n_k[t] as f64 + vb);
                    total += wt;
                    weights[t] = total;
                }
                let target = rng.random::<f64>() * total;
                let new = weights.partition_point(|&c| c <= target).min(k - 1);
                assignments[di][pos] = new;
                n_dk[di * k + new] += 1;
                n_kw[new * v + w] += 1;
                n_k[new] += 1;
            }
        }
        if sweep >= params.burn_in {
            samples += 1;
            for t in 0..k {
                let denom = n_k[t] as f64 + vb;
                for w in 0..v {
                    phi_acc[t * v + w] += (n_kw[t * v + w] as f64 + params.beta) / denom;
                }
            }
            for (di, (_, ids)) in corpus.docs.iter().enumerate() {
                let denom = ids.len() as f64 + k as f64 * alpha;
                for t in 0..k {
                    theta_acc[di * k + t] += (n_dk[di * k + t] as f64 + alpha) / denom;
                }
            }
        }
    }

    let s = samples as f64;
    let topic_word: Vec<Vec<f64>> = (0..k)
        .map(|t| (0..v).map(|w| phi_acc[t * v + w] / s).collect())
        .collect();
    let doc_topic: Vec<Vec<f64>> = (0..d)
        .map(|di| (0..k).map(|t| theta_acc[di * k + t] / s).collect())
        .collect();
    Ok(LdaModel {
        k,
        alpha,
        beta: params.beta,
        vocabulary: corpus.vocabulary,
        user_ids: corpus.docs.into_iter().map(|(u, _)| u).collect(),
        topic_word,
        doc_topic,
    })
}

/// Index of the user's most probable topic; ties break to the lowest index.
pub fn main_topic(model: &LdaModel, user_id: &str) -> Result<usize> {
    let row = model
        .doc_topic_for(user_id)
        .ok_or_else(|| Error::domain(format!("user `{user_id}` is not in the fitted model")))?;
    let mut best = 0usize;
    for (i, p) in row.iter().enumerate() {
        if *p > row[best] {
            best = i;
        }
    }
    Ok(best)
}

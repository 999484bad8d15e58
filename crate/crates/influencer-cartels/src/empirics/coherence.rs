//! NPMI topic coherence (Bouma 2009): normalized pointwise mutual
//! information of a topic's top words, with probabilities estimated from
//! sliding co-occurrence windows over the corpus.

use std::collections::{HashMap, HashSet};

use crate::empirics::lda::{CorpusDoc, LdaModel};
use crate::error::{Error, Result};

/// Smoothing added to the joint window count so that never-co-occurring
/// pairs get a large negative NPMI instead of an undefined one.
const EPS: f64 = 1e-12;

/// Mean pairwise NPMI of each topic's `top_n` words, with co-occurrence
/// counted in sliding windows of `window` tokens (shorter documents form a
/// single window). Ranges over `[-1, 1]`; pairs whose words never occur in
/// the corpus at all are skipped.
pub fn npmi_coherence(
    model: &LdaModel,
    corpus: &[CorpusDoc],
    top_n: usize,
    window: usize,
) -> Result<Vec<f64>> {
    if top_n < 2 {
        return Err(Error::config("need at least 2 top words per topic".to_string()));
    }
    if window == 0 {
        return Err(Error::config("window size must be at least 1".to_string()));
    }
    // Words we need counts for.
    let tracked: Vec<Vec<&str>> = (0..model.k).map(|t| model.top_words(t, top_n)).collect();
    let mut word_index: HashMap<&str, usize> = HashMap::new();
    for words in &tracked {
        for w in words {
            let next = word_index.len();
            word_index.entry(w).or_insert(next);
        }
    }

    let mut total_windows = 0u64;
    let mut occur = vec![0u64; word_index.len()];
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    for doc in corpus {
        let ids: Vec<Option<usize>> = doc
            .tokens
            .iter()
            .map(|t| word_index.get(t.as_str()).copied())
            .collect();
        let len = ids.len();
        if len == 0 {
            continue;
        }
        let win = window.min(len);
        let n_windows = len - win + 1;
        total_windows += n_windows as u64;
        let mut present: HashSet<usize> = HashSet::new();
        for start in 0..n_windows {
            present.clear();
            for id in ids[start..start + win].iter().flatten() {
                present.insert(*id);
            }
            let mut members: Vec<usize> = present.iter().copied().collect();
            members.sort_unstable();
            for (a_pos, &a) in members.iter().enumerate() {
                occur[a] += 1;
                for &b in &members[a_pos + 1..] {
                    *joint.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
    }
    if total_windows == 0 {
        return Err(Error::config("corpus has no tokens to form windows".to_string()));
    }

    let w_total = total_windows as f64;
    let mut scores = Vec::with_capacity(model.k);
    for words in &tracked {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                let a = word_index[words[i]];
                let b = word_index[words[j]];
                let pa = occur[a] as f64 / w_total;
                let pb = occur[b] as f64 / w_total;
                if pa == 0.0 || pb == 0.0 {
                    continue;
                }
                let key = if a < b { (a, b) } else { (b, a) };
                let joint_count = joint.get(&key).copied().unwrap_or(0);
                // Words sharing every window hit the 0/0 limit of the NPMI
                // ratio, which tends to 1.
                let npmi = if joint_count == total_windows {
                    1.0
                } else {
                    let pab = joint_count as f64 / w_total + EPS;
                    (pab / (pa * pb)).ln() / -(pab.ln())
                };
                sum += npmi;
                pairs += 1;
            }
        }
        scores.push(if pairs > 0 { sum / pairs as f64 } else { 0.0 });
    }
    Ok(scores)
}

//! Topic-match comparison: how much probability mass commenters of each
//! class put on the author's main topic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::empirics::lda::{main_topic, LdaModel};
use crate::empirics::panel::{CommenterClass, PanelObservation};
use crate::error::{Error, Result};

/// One non-empty cell of the topic-match table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMatchRow {
    /// The authors' main topic this cell conditions on.
    pub author_topic: usize,
    pub class: CommenterClass,
    pub n: usize,
    /// Mean probability the commenters assign to the authors' main topic.
    pub mean_share: f64,
    /// 95% confidence interval, normal approximation.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// For each (author main topic, commenter class) cell, the mean share
/// commenters of that class put on the topic. Empty cells are absent from
/// the output rather than reported as zero.
///
/// Every author and commenter referenced by the panel must be present in the
/// fitted model.
pub fn topic_match_table(
    model: &LdaModel,
    panel: &[PanelObservation],
) -> Result<Vec<TopicMatchRow>> {
    let mut cells: BTreeMap<(usize, CommenterClass), Vec<f64>> = BTreeMap::new();
    for obs in panel {
        let topic = main_topic(model, &obs.author_id)?;
        let row = model.doc_topic_for(&obs.commenter_id).ok_or_else(|| {
            Error::domain(format!(
                "commenter `{}` is not in the fitted model",
                obs.commenter_id
            ))
        })?;
        cells
            .entry((topic, obs.class))
            .or_default()
            .push(row[topic]);
    }
    Ok(cells
        .into_iter()
        .map(|((topic, class), shares)| {
            let n = shares.len();
            let mean = shares.iter().sum::<f64>() / n as f64;
            let half = if n > 1 {
                let var = shares.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
                    / (n as f64 - 1.0);
                1.96 * (var / n as f64).sqrt()
            } else {
                0.0
            };
            TopicMatchRow {
                author_topic: topic,
                class,
                n,
                mean_share: mean,
                ci_low: mean - half,
                ci_high: mean + half,
            }
        })
        .collect())
}

//! Synthetic author/commenter generator bridging the market model to the
//! estimators: commenter topic distances are drawn from the model's
//! engagement rules, embeddings place users on the topic circle, and the
//! panel is built through the real similarity path.
//!
//! With zero noise and two dimensions, cosine similarity recovers `cos Δ`
//! exactly; the class orderings the estimators should find are therefore
//! known by construction.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::empirics::panel::{CommenterClass, PanelObservation};
use crate::empirics::similarity::{cosine_similarity, EmbeddingVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_authors: usize,
    /// Commenters generated per class for every author.
    pub commenters_per_class: usize,
    /// Internalized benefit share driving the natural engagement rule.
    pub gamma: f64,
    /// Topic-cartel engagement requirement, radians.
    pub lambda_topic: f64,
    pub embed_dim: usize,
    /// Standard deviation of the additive embedding noise.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_authors: 1000,
            commenters_per_class: 5,
            gamma: 0.5,
            lambda_topic: PI / 4.0,
            embed_dim: 16,
            noise_sigma: 0.05,
            seed: 0,
        }
    }
}

/// Ground truth behind one generated commenter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommenterTruth {
    pub commenter_id: String,
    pub author_id: String,
    pub class: CommenterClass,
    /// Topic distance to the author, radians.
    pub delta: f64,
}

/// Ground truth behind one generated author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorTruth {
    pub author_id: String,
    /// Topic angle, radians.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub authors: Vec<AuthorTruth>,
    pub commenters: Vec<CommenterTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthData {
    pub panel: Vec<PanelObservation>,
    pub embeddings: Vec<EmbeddingVector>,
    pub ground_truth: GroundTruth,
}

fn embed(angle: f64, dim: usize, noise: Option<&Normal<f64>>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut values = vec![0.0; dim];
    values[0] = angle.cos();
    values[1] = angle.sin();
    if let Some(normal) = noise {
        for v in values.iter_mut() {
            *v += normal.sample(rng);
        }
    }
    values
}

/// Generate a balanced synthetic panel with embeddings and ground truth.
///
/// Per author: `commenters_per_class` commenters of each class, with topic
/// distance drawn uniformly from `[0, arctan γ]` (natural), `[0, Λ_topic]`
/// (topic cartel), and `[0, π]` (general cartel and random users).
pub fn synth_generate(config: &SynthConfig) -> Result<SynthData> {
    if config.n_authors == 0 || config.commenters_per_class == 0 {
        return Err(Error::config(
            "need at least one author and one commenter per class".to_string(),
        ));
    }
    if config.embed_dim < 2 {
        return Err(Error::config(format!(
            "embedding dimension must be at least 2, got {}",
            config.embed_dim
        )));
    }
    if !(config.gamma > 0.0 && config.gamma < 1.0) {
        return Err(Error::domain(format!(
            "gamma must lie strictly in (0, 1), got {}",
            config.gamma
        )));
    }
    if !(config.lambda_topic > 0.0 && config.lambda_topic <= PI) {
        return Err(Error::domain(format!(
            "topic-cartel requirement must lie in (0, π], got {}",
            config.lambda_topic
        )));
    }
    if !(config.noise_sigma >= 0.0) {
        return Err(Error::domain("noise sigma must be >= 0".to_string()));
    }
    let noise = if config.noise_sigma > 0.0 {
        Some(Normal::new(0.0, config.noise_sigma).expect("validated sigma"))
    } else {
        None
    };
    let natural_cutoff = config.gamma.atan();
    let classes = [
        (CommenterClass::Natural, natural_cutoff),
        (CommenterClass::TopicCartel, config.lambda_topic),
        (CommenterClass::GeneralCartel, PI),
        (CommenterClass::RandomUser, PI),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut panel = Vec::new();
    let mut embeddings = Vec::new();
    let mut authors = Vec::new();
    let mut commenters = Vec::new();
    for a in 0..config.n_authors {
        let author_id = format!("author{a:05}");
        let alpha = rng.random::<f64>() * TAU;
        let author_emb = EmbeddingVector::new(
            author_id.clone(),
            embed(alpha, config.embed_dim, noise.as_ref(), &mut rng),
        );
        authors.push(AuthorTruth {
            author_id: author_id.clone(),
            alpha,
        });
        for (class, cutoff) in classes {
            for j in 0..config.commenters_per_class {
                let delta = rng.random::<f64>() * cutoff;
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let commenter_id = format!("a{a:05}_{}{j}", class.as_str());
                let angle = (alpha + sign * delta).rem_euclid(TAU);
                let emb = EmbeddingVector::new(
                    commenter_id.clone(),
                    embed(angle, config.embed_dim, noise.as_ref(), &mut rng),
                );
                let similarity = cosine_similarity(&author_emb, &emb)?;
                panel.push(PanelObservation {
                    author_id: author_id.clone(),
                    commenter_id: commenter_id.clone(),
                    class,
                    similarity,
                });
                commenters.push(CommenterTruth {
                    commenter_id,
                    author_id: author_id.clone(),
                    class,
                    delta,
                });
                embeddings.push(emb);
            }
        }
        embeddings.push(author_emb);
    }
    Ok(SynthData {
        panel,
        embeddings,
        ground_truth: GroundTruth {
            authors,
            commenters,
        },
    })
}

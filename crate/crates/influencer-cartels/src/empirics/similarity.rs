//! Embedding vectors and cosine similarity.
//!
//! Users are represented by the mean of their post embeddings, and pairs are
//! compared by the cosine of the angle between the user vectors. Cosine of
//! averaged embeddings is taken as the definition of user similarity; it
//! equals the average of pairwise dot products exactly, but only
//! approximates the average of pairwise cosines because normalization does
//! not commute with averaging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense embedding vector with an identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub id: String,
    pub values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        EmbeddingVector {
            id: id.into(),
            values,
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cosine of the angle between two vectors, in `[-1, 1]`.
pub fn cosine_similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    if u.values.len() != v.values.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: `{}` has {} components, `{}` has {}",
            u.id,
            u.values.len(),
            v.id,
            v.values.len()
        )));
    }
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::domain(format!(
            "cosine similarity undefined for zero vector (`{}`)",
            if nu == 0.0 { &u.id } else { &v.id }
        )));
    }
    let dot: f64 = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a * b)
        .sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Componentwise mean of a user's post embeddings.
pub fn user_embedding(id: impl Into<String>, posts: &[EmbeddingVector]) -> Result<EmbeddingVector> {
    let id = id.into();
    let first = posts
        .first()
        .ok_or_else(|| Error::domain(format!("user `{id}` has no post embeddings to average")))?;
    let d = first.values.len();
    let mut mean = vec![0.0; d];
    for post in posts {
        if post.values.len() != d {
            return Err(Error::domain(format!(
                "post `{}` has dimension {} but `{}` has {}",
                post.id,
                post.values.len(),
                first.id,
                d
            )));
        }
        for (m, v) in mean.iter_mut().zip(&post.values) {
            *m += v;
        }
    }
    let n = posts.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    Ok(EmbeddingVector { id, values: mean })
}

//! Measurement pipeline: hashtag extraction, embedding similarity, the
//! within-estimator panel regression with author-clustered standard errors,
//! collapsed-Gibbs LDA with NPMI coherence, topic-match tables, and a
//! synthetic data generator that ties the market model to the estimators.
//!
//! Embedding vectors are file inputs; this crate never runs an embedding
//! model.

pub mod coherence;
pub mod lda;
pub mod panel;
pub mod similarity;
pub mod synth;
pub mod text;
pub mod topic_match;

pub use coherence::npmi_coherence;
pub use lda::{lda_fit, main_topic, prune_corpus, CorpusDoc, LdaModel, LdaParams, PruneParams};
pub use panel::{
    fe_regression, normalized_value, CommenterClass, PanelObservation, RegressionResult,
};
pub use similarity::{cosine_similarity, user_embedding, EmbeddingVector};
pub use synth::{synth_generate, SynthConfig, SynthData};
pub use text::extract_hashtags;
pub use topic_match::{topic_match_table, TopicMatchRow};

//! Stance classification of tweets towards nine COVID-19 conspiracy
//! categories from frozen sentence embeddings.
//!
//! The crate covers the whole batch workflow: the labelled corpus and its
//! seeded split ([`corpus`]), embedding tables and the `CEV1` interchange file
//! ([`embedding`]), SMOTE rebalancing ([`sampling`]), a random forest
//! ([`forest`]), F1 / MCC scoring ([`metrics`]) and the experiment runner with
//! its reports ([`pipeline`]).

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod forest;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod sampling;

pub use corpus::{ConspiracyKind, Corpus, LabeledTweet, SplitConfig, StanceLabel};
pub use embedding::{EmbeddingMatrix, EmbeddingVector, Variant};
pub use error::{Error, Result};
pub use forest::{ForestModel, ForestParams, MaxFeatures};
pub use metrics::ConfusionMatrix;
pub use pipeline::{EvaluationReport, ExperimentConfig};
pub use sampling::{LabeledMatrix, SmoteConfig};

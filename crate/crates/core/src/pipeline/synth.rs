//! Synthetic corpora with controllable class signal, standing in for the
//! non-redistributable tweet dataset.
//!
//! Within-class noise is a standard normal per component (σ = 1). For
//! conspiracy `k`, a Discusses label adds `separation` to feature
//! `(2k) mod dim` and a Promotes label adds it to feature `(2k + 1) mod dim`,
//! so the closest pair of class means sits `separation · σ` apart. With
//! `dim >= 18` the nine conspiracies use disjoint features.

use serde::{Deserialize, Serialize};

use crate::corpus::{ConspiracyKind, Corpus, LabeledTweet, StanceLabel};
use crate::embedding::{EmbeddingMatrix, Variant};
use crate::error::{Error, Result};
use crate::rng;
use crate::sampling::LabeledMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

const LABEL_STREAM: u64 = 0x4C41_4245_4C00;
const TEXT_STREAM: u64 = 0x5445_5854_0000;
const NOISE_STREAM: u64 = 0x4E4F_4953_4500;

/// Training-split class shares per conspiracy as reported for the original
/// dataset, ordered (NonConspiracy, Discusses, Promotes). Rows are
/// renormalised on use; one of them sums to 100.1%.
pub const REPORTED_DISTRIBUTION: [[f64; 3]; 9] = [
    [97.4, 2.1, 0.5],
    [90.8, 4.9, 4.3],
    [88.1, 6.1, 5.8],
    [85.3, 9.5, 5.3],
    [84.0, 12.3, 3.7],
    [96.5, 2.0, 1.5],
    [91.6, 6.7, 1.7],
    [91.0, 7.8, 1.2],
    [95.2, 2.9, 1.9],
];

pub fn reported_distribution() -> [[f64; 3]; 9] {
    REPORTED_DISTRIBUTION.map(|row| {
        let sum: f64 = row.iter().sum();
        row.map(|p| p / sum)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    /// Per conspiracy, shares ordered by label code (Non, Discusses, Promotes).
    pub distribution: [[f64; 3]; 9],
    pub separation: f64,
    pub dim: usize,
    pub variant: Variant,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 400,
            distribution: [[0.91, 0.03, 0.06]; 9],
            separation: 3.0,
            dim: 32,
            variant: Variant::Synthetic,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 30 {
            return Err(Error::InvalidConfig(format!(
                "synthetic corpus needs n >= 30, got {}",
                self.n
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidConfig(
                "synthetic dim must be positive".into(),
            ));
        }
        if let Some(required) = self.variant.required_dim() {
            if required != self.dim {
                return Err(Error::InvalidConfig(format!(
                    "variant {} requires dim {required}, got {}",
                    self.variant, self.dim
                )));
            }
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "bad separation {}",
                self.separation
            )));
        }
        for (kind, dist) in ConspiracyKind::ALL.iter().zip(&self.distribution) {
            validate_distribution(dist).map_err(|e| e.in_conspiracy(*kind, "synth"))?;
        }
        Ok(())
    }
}

fn validate_distribution(dist: &[f64; 3]) -> Result<()> {
    let sum: f64 = dist.iter().sum();
    if dist.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "distribution {dist:?} must be nonnegative and sum to 1"
        )));
    }
    Ok(())
}

/// Largest-remainder rounding of `n · shares`; remainder ties go to the
/// lower label code.
pub fn class_counts_for(n: usize, shares: &[f64; 3]) -> [usize; 3] {
    let exact = shares.map(|p| p * n as f64);
    let mut counts = exact.map(|x| x.floor() as usize);
    let assigned: usize = counts.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &c in order.iter().take(n.saturating_sub(assigned)) {
        counts[c] += 1;
    }
    counts
}

const WORDS: [&str; 16] = [
    "vaccine",
    "5G",
    "lab",
    "cure",
    "towers",
    "elites",
    "plandemic",
    "masks",
    "news",
    "\"experts\"",
    "really?",
    "control",
    "hoax",
    "truth",
    "virus",
    "they, say",
];

/// Builds a corpus and its embeddings. Labels are assigned per conspiracy by
/// shuffling the exact class counts.
pub fn make_synthetic_corpus(cfg: &SynthConfig) -> Result<(Corpus, EmbeddingMatrix)> {
    cfg.validate()?;
    let n = cfg.n;
    let mut labels = vec![[StanceLabel::NonConspiracy; 9]; n];
    for kind in ConspiracyKind::ALL {
        let counts = class_counts_for(n, &cfg.distribution[kind.index()]);
        let mut column: Vec<StanceLabel> = StanceLabel::ALL
            .iter()
            .flat_map(|&l| std::iter::repeat_n(l, counts[l.index()]))
            .collect();
        column.shuffle(&mut rng::stream(
            cfg.seed,
            LABEL_STREAM + kind.index() as u64,
        ));
        for (row, l) in labels.iter_mut().zip(column) {
            row[kind.index()] = l;
        }
    }

    let mut text_rng = rng::stream(cfg.seed, TEXT_STREAM);
    let tweets: Vec<LabeledTweet> = labels
        .into_iter()
        .enumerate()
        .map(|(i, labels)| {
            let words: Vec<&str> = (0..4)
                .map(|_| WORDS[text_rng.random_range(..WORDS.len())])
                .collect();
            LabeledTweet {
                id: format!("syn{i:06}"),
                text: format!("tweet {i}: {}", words.join(" ")),
                labels,
            }
        })
        .collect();
    let corpus = Corpus::new(tweets)?;
    let embeddings = synthetic_embeddings(&corpus, cfg.variant, cfg.dim, cfg.separation, cfg.seed)?;
    Ok((corpus, embeddings))
}

/// Embeddings for an existing corpus; each variant draws its own noise.
pub fn synthetic_embeddings(
    corpus: &Corpus,
    variant: Variant,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<EmbeddingMatrix> {
    let mut rng = rng::stream(seed, NOISE_STREAM + u64::from(variant.code()));
    let mut values = Vec::with_capacity(corpus.len() * dim);
    for t in corpus.tweets() {
        let start = values.len();
        values.extend((0..dim).map(|_| rng.sample::<f32, _>(StandardNormal)));
        for kind in ConspiracyKind::ALL {
            if let Some(f) = signal_feature(kind.index(), t.label(kind), dim) {
                values[start + f] += separation as f32;
            }
        }
    }
    EmbeddingMatrix::new(
        variant,
        dim,
        corpus.ids().map(str::to_owned).collect(),
        values,
    )
}

fn signal_feature(task: usize, label: StanceLabel, dim: usize) -> Option<usize> {
    match label {
        StanceLabel::NonConspiracy => None,
        StanceLabel::Discusses => Some((2 * task) % dim),
        StanceLabel::Promotes => Some((2 * task + 1) % dim),
    }
}

/// Balanced three-class Gaussian blobs (`label = i mod 3`) using the same
/// mean layout as task 0 of [`make_synthetic_corpus`].
pub fn gaussian_blobs(n: usize, dim: usize, separation: f64, seed: u64) -> Result<LabeledMatrix> {
    if dim < 2 {
        return Err(Error::InvalidConfig("blobs need dim >= 2".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut values = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = StanceLabel::ALL[i % 3];
        let start = values.len();
        values.extend((0..dim).map(|_| rng.sample::<f32, _>(StandardNormal)));
        if let Some(f) = signal_feature(0, label, dim) {
            values[start + f] += separation as f32;
        }
        labels.push(label);
    }
    LabeledMatrix::new(dim, values, labels)
}

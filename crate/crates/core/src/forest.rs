//! Random forest over dense `f32` features with three stance classes.
//!
//! Trees are CART-style: Gini impurity, candidate thresholds at midpoints
//! between consecutive distinct values, rows with `x[feature] <= threshold`
//! going left. Every tie (split score, leaf argmax, forest vote) resolves to
//! the lowest feature index, threshold or class code. Tree `t` draws all of
//! its randomness (bootstrap, then per-node feature order) from
//! `rng::stream(seed, t)`, so the trained model does not depend on how
//! many threads built it.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ConspiracyKind, StanceLabel};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use rand::Rng as _;

pub const MODEL_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    Sqrt,
    All,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, dim: usize) -> Result<usize> {
        match self {
            MaxFeatures::Sqrt => Ok(((dim as f64).sqrt().floor() as usize).max(1)),
            MaxFeatures::All => Ok(dim),
            MaxFeatures::Fixed(m) if (1..=dim).contains(&m) => Ok(m),
            MaxFeatures::Fixed(m) => Err(Error::InvalidConfig(format!(
                "max_features {m} outside 1..={dim}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub seed: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: bool,
}

fn default_bootstrap() -> bool {
    true
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            seed: 0,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("n_trees must be positive".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidConfig("max_depth must be positive".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig(
                "min_samples_split must be at least 2".into(),
            ));
        }
        if self.max_features == MaxFeatures::Fixed(0) {
            return Err(Error::InvalidConfig("max_features must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        counts: [u64; 3],
    },
}

impl TreeNode {
    pub fn leaf<'a>(&'a self, x: &[f32]) -> &'a [u64; 3] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if f64::from(x[*feature]) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Majority class of the leaf reached by `x`.
    pub fn vote(&self, x: &[f32]) -> StanceLabel {
        argmax(self.leaf(x))
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    fn validate(&self, dim: usize, path: &mut String) -> Result<()> {
        let len = path.len();
        let out = match self {
            TreeNode::Leaf { counts } => {
                if counts.iter().sum::<u64>() == 0 {
                    path.push_str(".leaf.counts");
                    Err(Error::model_format(
                        path.clone(),
                        "leaf with zero total count",
                    ))
                } else {
                    Ok(())
                }
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                path.push_str(".split");
                if *feature >= dim {
                    path.push_str(".feature");
                    Err(Error::model_format(
                        path.clone(),
                        format!("feature {feature} out of range for dim {dim}"),
                    ))
                } else if !threshold.is_finite() {
                    path.push_str(".threshold");
                    Err(Error::model_format(path.clone(), "non-finite threshold"))
                } else {
                    let base = path.len();
                    path.push_str(".left");
                    left.validate(dim, path)?;
                    path.truncate(base);
                    path.push_str(".right");
                    right.validate(dim, path)
                }
            }
        };
        if out.is_ok() {
            path.truncate(len);
        }
        out
    }
}

fn argmax(counts: &[u64; 3]) -> StanceLabel {
    let mut best = 0;
    for c in 1..3 {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    StanceLabel::ALL[best]
}

/// 1 − Σ (count / total)².
pub fn gini(counts: [u64; 3]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("gini impurity of an empty node"));
    }
    let t = total as f64;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub impurity_decrease: f64,
}

/// Exact split score `Σ left² / n_left + Σ right² / n_right` held as a
/// fraction; maximising it minimises the weighted child impurity.
#[derive(Clone, Copy, Debug)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(left: &[u64; 3], right: &[u64; 3]) -> Self {
        let nl: u64 = left.iter().sum();
        let nr: u64 = right.iter().sum();
        let sq = |c: &[u64; 3]| {
            c.iter()
                .map(|&x| u128::from(x) * u128::from(x))
                .sum::<u128>()
        };
        Self {
            num: sq(left) * u128::from(nr) + sq(right) * u128::from(nl),
            den: u128::from(nl) * u128::from(nr),
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    /// Strictly better than leaving the node unsplit.
    fn beats_parent(&self, parent: &[u64; 3]) -> bool {
        let n: u64 = parent.iter().sum();
        let sq: u128 = parent.iter().map(|&x| u128::from(x) * u128::from(x)).sum();
        self.num * u128::from(n) > sq * self.den
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    feature: usize,
    threshold: f64,
    score: Score,
    left: [u64; 3],
    right: [u64; 3],
}

impl Candidate {
    /// Higher score wins, then lower feature, then lower threshold.
    fn better_than(&self, other: &Candidate) -> bool {
        match self.score.cmp(&other.score) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (self.feature, self.threshold) < (other.feature, other.threshold),
        }
    }

    fn into_split(self) -> Split {
        let parent: [u64; 3] = std::array::from_fn(|c| self.left[c] + self.right[c]);
        let n = parent.iter().sum::<u64>() as f64;
        let nl = self.left.iter().sum::<u64>() as f64;
        let nr = self.right.iter().sum::<u64>() as f64;
        let decrease = gini(parent).unwrap()
            - nl / n * gini(self.left).unwrap()
            - nr / n * gini(self.right).unwrap();
        Split {
            feature: self.feature,
            threshold: self.threshold,
            impurity_decrease: decrease,
        }
    }
}

/// Best threshold on one feature over the rows in `idx`, or `None` if the
/// feature is constant there. `buf` is scratch space.
fn best_on_feature(
    rows: &[&[f32]],
    labels: &[StanceLabel],
    idx: &[usize],
    feature: usize,
    parent: &[u64; 3],
    buf: &mut Vec<(f32, usize)>,
) -> Option<Candidate> {
    buf.clear();
    buf.extend(idx.iter().map(|&i| (rows[i][feature], labels[i].index())));
    buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut left = [0u64; 3];
    let mut best: Option<Candidate> = None;
    for w in 0..buf.len() - 1 {
        left[buf[w].1] += 1;
        let (lo, hi) = (buf[w].0, buf[w + 1].0);
        if lo >= hi {
            continue;
        }
        let right: [u64; 3] = std::array::from_fn(|c| parent[c] - left[c]);
        let cand = Candidate {
            feature,
            threshold: (f64::from(lo) + f64::from(hi)) / 2.0,
            score: Score::new(&left, &right),
            left,
            right,
        };
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            best = Some(cand);
        }
    }
    best
}

fn counts_of(labels: &[StanceLabel], idx: &[usize]) -> [u64; 3] {
    let mut counts = [0u64; 3];
    for &i in idx {
        counts[labels[i].index()] += 1;
    }
    counts
}

/// Weighted-Gini split search over `feature_subset`. Returns `None` when no
/// threshold strictly reduces impurity.
pub fn best_split(
    rows: &[&[f32]],
    labels: &[StanceLabel],
    feature_subset: &[usize],
) -> Option<Split> {
    if rows.len() < 2 {
        return None;
    }
    let idx: Vec<usize> = (0..rows.len()).collect();
    let parent = counts_of(labels, &idx);
    let mut buf = Vec::with_capacity(rows.len());
    let mut best: Option<Candidate> = None;
    for &f in feature_subset {
        if let Some(c) = best_on_feature(rows, labels, &idx, f, &parent, &mut buf) {
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
        }
    }
    best.filter(|c| c.score.beats_parent(&parent))
        .map(Candidate::into_split)
}

struct TreeBuilder<'a> {
    rows: &'a [&'a [f32]],
    labels: &'a [StanceLabel],
    params: &'a ForestParams,
    m: usize,
    perm: Vec<usize>,
    buf: Vec<(f32, usize)>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize, rng: &mut Rng) -> TreeNode {
        let counts = counts_of(self.labels, &idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || idx.len() < self.params.min_samples_split || depth_capped {
            return TreeNode::Leaf { counts };
        }
        let Some(best) = self.search(&idx, &counts, rng) else {
            return TreeNode::Leaf { counts };
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| f64::from(self.rows[i][best.feature]) <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.build(left, depth + 1, rng)),
            right: Box::new(self.build(right, depth + 1, rng)),
        }
    }

    /// Visits features in a fresh random order until `m` non-constant ones
    /// have been scored. Zero-gain splits are accepted so that impure nodes
    /// whose rows differ always split.
    fn search(&mut self, idx: &[usize], parent: &[u64; 3], rng: &mut Rng) -> Option<Candidate> {
        let d = self.perm.len();
        let mut scored = 0;
        let mut best: Option<Candidate> = None;
        for pos in 0..d {
            if scored == self.m {
                break;
            }
            let j = rng.random_range(pos..d);
            self.perm.swap(pos, j);
            let f = self.perm[pos];
            if let Some(c) = best_on_feature(self.rows, self.labels, idx, f, parent, &mut self.buf)
            {
                scored += 1;
                if best.as_ref().is_none_or(|b| c.better_than(b)) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

/// Grows one tree on the rows listed in `sample` (duplicates allowed).
pub fn fit_tree(
    rows: &[&[f32]],
    labels: &[StanceLabel],
    sample: Vec<usize>,
    params: &ForestParams,
    rng: &mut Rng,
) -> Result<TreeNode> {
    let dim = check_rows(rows, labels)?;
    if sample.is_empty() {
        return Err(Error::EmptyInput("tree sample is empty"));
    }
    let mut builder = TreeBuilder {
        rows,
        labels,
        params,
        m: params.max_features.resolve(dim)?,
        perm: (0..dim).collect(),
        buf: Vec::with_capacity(sample.len()),
    };
    Ok(builder.build(sample, 0, rng))
}

fn check_rows(rows: &[&[f32]], labels: &[StanceLabel]) -> Result<usize> {
    if rows.len() != labels.len() {
        return Err(Error::DimMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let dim = rows.first().map_or(0, |r| r.len());
    if dim == 0 {
        return Err(Error::EmptyInput("training rows"));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimMismatch {
            expected: dim,
            found: r.len(),
        });
    }
    Ok(dim)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForestModel {
    trees: Vec<TreeNode>,
    dim: usize,
    params: ForestParams,
    conspiracy: Option<ConspiracyKind>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u64,
    conspiracy: Option<ConspiracyKind>,
    dim: usize,
    params: ForestParams,
    trees: Vec<TreeNode>,
}

impl ForestModel {
    pub fn from_trees(
        trees: Vec<TreeNode>,
        dim: usize,
        params: ForestParams,
        conspiracy: Option<ConspiracyKind>,
    ) -> Result<Self> {
        let model = Self {
            trees,
            dim,
            params,
            conspiracy,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::model_format("$.dim", "dim must be positive"));
        }
        self.params
            .validate()
            .and_then(|_| self.params.max_features.resolve(self.dim).map(drop))
            .map_err(|e| Error::model_format("$.params", e))?;
        if self.trees.len() != self.params.n_trees {
            return Err(Error::model_format(
                "$.trees",
                format!(
                    "{} trees but params.n_trees = {}",
                    self.trees.len(),
                    self.params.n_trees
                ),
            ));
        }
        let mut path = String::new();
        for (i, t) in self.trees.iter().enumerate() {
            path.clear();
            path.push_str(&format!("$.trees[{i}]"));
            t.validate(self.dim, &mut path)?;
        }
        Ok(())
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn conspiracy(&self) -> Option<ConspiracyKind> {
        self.conspiracy
    }

    fn check_dim(&self, x: &[f32]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn votes(&self, x: &[f32]) -> Result<[u64; 3]> {
        self.check_dim(x)?;
        let mut votes = [0u64; 3];
        for t in &self.trees {
            votes[t.vote(x).index()] += 1;
        }
        Ok(votes)
    }

    pub fn predict(&self, x: &[f32]) -> Result<StanceLabel> {
        Ok(argmax(&self.votes(x)?))
    }

    /// Fraction of trees voting for each class.
    pub fn predict_proba(&self, x: &[f32]) -> Result<[f64; 3]> {
        let votes = self.votes(x)?;
        let n = self.trees.len() as f64;
        Ok(votes.map(|v| v as f64 / n))
    }
}

/// Trains `params.n_trees` trees on the global rayon pool.
pub fn fit_forest(
    rows: &[&[f32]],
    labels: &[StanceLabel],
    params: &ForestParams,
    conspiracy: Option<ConspiracyKind>,
) -> Result<ForestModel> {
    params.validate()?;
    let dim = check_rows(rows, labels)?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::DegenerateTraining(format!("{n} training row(s)")));
    }
    let present = counts_of(labels, &(0..n).collect::<Vec<_>>())
        .iter()
        .filter(|&&c| c > 0)
        .count();
    if present < 2 {
        return Err(Error::DegenerateTraining(
            "all training rows carry the same label".into(),
        ));
    }
    params.max_features.resolve(dim)?;

    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(params.seed, t as u64);
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree(rows, labels, sample, params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        dim,
        params: *params,
        conspiracy,
    })
}

/// [`fit_forest`] on a dedicated pool of `threads` workers.
pub fn fit_forest_with_threads(
    rows: &[&[f32]],
    labels: &[StanceLabel],
    params: &ForestParams,
    conspiracy: Option<ConspiracyKind>,
    threads: usize,
) -> Result<ForestModel> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| fit_forest(rows, labels, params, conspiracy))
}

pub fn save_model(model: &ForestModel) -> Vec<u8> {
    let file = ModelFile {
        version: MODEL_VERSION,
        conspiracy: model.conspiracy,
        dim: model.dim,
        params: model.params,
        trees: model.trees.clone(),
    };
    serde_json::to_vec(&file).expect("model serialisation cannot fail")
}

fn json_path(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::from("$");
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("[{index}]")),
            Segment::Map { key } => {
                out.push('.');
                out.push_str(key);
            }
            Segment::Enum { variant } => {
                out.push('.');
                out.push_str(variant);
            }
            Segment::Unknown => out.push_str(".?"),
        }
    }
    out
}

pub fn load_model(bytes: &[u8]) -> Result<ForestModel> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    de.disable_recursion_limit();
    let value = serde_json::Value::deserialize(&mut de)
        .and_then(|v| de.end().map(|_| v))
        .map_err(|e| Error::model_format("$", e))?;
    match value.get("version") {
        None => return Err(Error::model_format("$.version", "missing field")),
        Some(v) => match v.as_u64() {
            Some(MODEL_VERSION) => {}
            Some(other) => return Err(Error::UnsupportedVersion(other)),
            None => {
                return Err(Error::model_format(
                    "$.version",
                    "expected an unsigned integer",
                ))
            }
        },
    }
    let file: ModelFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let mut path = json_path(e.path());
        let message = e.inner().to_string();
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            path.push('.');
            path.push_str(field);
        }
        Error::model_format(path, message)
    })?;
    ForestModel::from_trees(file.trees, file.dim, file.params, file.conspiracy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::StanceLabel::*;

    fn leaf(counts: [u64; 3]) -> TreeNode {
        TreeNode::Leaf { counts }
    }

    fn stump(threshold: f64, left: [u64; 3], right: [u64; 3]) -> TreeNode {
        TreeNode::Split {
            feature: 0,
            threshold,
            left: Box::new(leaf(left)),
            right: Box::new(leaf(right)),
        }
    }

    fn params(n_trees: usize) -> ForestParams {
        ForestParams {
            n_trees,
            ..Default::default()
        }
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini([4, 0, 0]).unwrap(), 0.0);
        assert!((gini([2, 2, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((gini([3, 1, 0]).unwrap() - 0.375).abs() < 1e-15);
        assert!(gini([0, 0, 0]).is_err());
    }

    #[test]
    fn best_split_examples() {
        let rows: [&[f32]; 2] = [&[0.0], &[1.0]];
        let s = best_split(&rows, &[NonConspiracy, Promotes], &[0]).unwrap();
        assert_eq!((s.feature, s.threshold), (0, 0.5));
        assert!((s.impurity_decrease - 0.5).abs() < 1e-15);

        let rows: [&[f32]; 3] = [&[0.0, 1.0], &[1.0, 1.0], &[2.0, 1.0]];
        assert_eq!(best_split(&rows, &[Discusses; 3], &[0, 1]), None);
        assert_eq!(
            best_split(&rows, &[Discusses, Promotes, Discusses], &[1]),
            None
        );
    }

    #[test]
    fn best_split_ties_prefer_lower_feature_and_threshold() {
        // Features 0 and 1 are identical: the split must use feature 0.
        let rows: [&[f32]; 4] = [&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]];
        let labels = [NonConspiracy, Promotes, Promotes, NonConspiracy];
        let s = best_split(&rows, &labels, &[1, 0]).unwrap();
        assert_eq!(s.feature, 0);
        // thresholds 0.5 and 2.5 score the same
        assert_eq!(s.threshold, 0.5);
    }

    #[test]
    fn zero_gain_xor_still_fits() {
        let rows: [&[f32]; 4] = [&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]];
        let labels = [NonConspiracy, Promotes, Promotes, NonConspiracy];
        assert_eq!(best_split(&rows, &labels, &[0, 1]), None);
        let p = ForestParams {
            max_features: MaxFeatures::All,
            ..params(1)
        };
        let tree = fit_tree(&rows, &labels, (0..4).collect(), &p, &mut rng::seeded(0)).unwrap();
        for (r, l) in rows.iter().zip(labels) {
            assert_eq!(tree.vote(r), l);
        }
    }

    #[test]
    fn single_row_tree_is_a_leaf() {
        let rows: [&[f32]; 1] = [&[3.0]];
        let tree = fit_tree(
            &rows,
            &[Discusses],
            vec![0],
            &params(1),
            &mut rng::seeded(1),
        )
        .unwrap();
        assert_eq!(tree, leaf([0, 1, 0]));
    }

    #[test]
    fn depth_and_min_split_limits() {
        let raw: Vec<[f32; 1]> = (0..16).map(|i| [i as f32]).collect();
        let rows: Vec<&[f32]> = raw.iter().map(|r| r.as_slice()).collect();
        let labels: Vec<StanceLabel> = (0..16).map(|i| StanceLabel::ALL[i % 3]).collect();
        let p = ForestParams {
            max_depth: Some(2),
            max_features: MaxFeatures::All,
            ..params(1)
        };
        let t = fit_tree(&rows, &labels, (0..16).collect(), &p, &mut rng::seeded(0)).unwrap();
        assert!(t.depth() <= 2);
        let p = ForestParams {
            min_samples_split: 17,
            ..p
        };
        let t = fit_tree(&rows, &labels, (0..16).collect(), &p, &mut rng::seeded(0)).unwrap();
        assert_eq!(t.depth(), 0);
    }

    #[test]
    fn predict_vote_ties_go_to_lowest_code() {
        // trees vote Non, Non, Discusses, Discusses, Promotes
        let trees = vec![
            leaf([1, 0, 0]),
            leaf([1, 0, 0]),
            leaf([0, 3, 0]),
            leaf([0, 3, 0]),
            leaf([0, 0, 9]),
        ];
        let m = ForestModel::from_trees(trees, 1, params(5), None).unwrap();
        assert_eq!(m.predict(&[0.0]).unwrap(), NonConspiracy);
        // a leaf tied between Discusses and Promotes votes Discusses
        let m = ForestModel::from_trees(vec![leaf([0, 2, 2])], 1, params(1), None).unwrap();
        assert_eq!(m.predict(&[0.0]).unwrap(), Discusses);
    }

    #[test]
    fn proba_counts_votes() {
        let trees = vec![
            leaf([1, 0, 0]),
            leaf([1, 0, 0]),
            leaf([0, 0, 1]),
            leaf([0, 1, 0]),
        ];
        let m = ForestModel::from_trees(trees, 1, params(4), None).unwrap();
        assert_eq!(m.predict_proba(&[0.0]).unwrap(), [0.5, 0.25, 0.25]);
        let one =
            ForestModel::from_trees(vec![stump(0.0, [5, 0, 0], [0, 0, 2])], 1, params(1), None)
                .unwrap();
        assert_eq!(one.predict_proba(&[1.0]).unwrap(), [0.0, 0.0, 1.0]);
        assert!(matches!(
            one.predict(&[1.0, 2.0]),
            Err(Error::DimMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn degenerate_training_is_refused() {
        let rows: [&[f32]; 3] = [&[0.0], &[1.0], &[2.0]];
        assert!(matches!(
            fit_forest(&rows, &[Promotes; 3], &params(3), None),
            Err(Error::DegenerateTraining(_))
        ));
        assert!(matches!(
            fit_forest(&rows[..1], &[Promotes], &params(3), None),
            Err(Error::DegenerateTraining(_))
        ));
        let p = ForestParams {
            max_features: MaxFeatures::Fixed(2),
            ..params(1)
        };
        assert!(matches!(
            fit_forest(&rows, &[Promotes, NonConspiracy, Promotes], &p, None),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn one_tree_without_bootstrap_matches_fit_tree() {
        let rows: [&[f32]; 2] = [&[0.0, 5.0], &[1.0, 4.0]];
        let labels = [NonConspiracy, Promotes];
        let p = ForestParams {
            max_features: MaxFeatures::All,
            bootstrap: false,
            seed: 9,
            ..params(1)
        };
        let forest = fit_forest(&rows, &labels, &p, None).unwrap();
        let tree = fit_tree(&rows, &labels, vec![0, 1], &p, &mut rng::stream(9, 0)).unwrap();
        assert_eq!(forest.trees(), &[tree]);
    }

    #[test]
    fn missing_trees_key_reports_path() {
        let json = br#"{"version":1,"conspiracy":null,"dim":1,"params":{"n_trees":1,"max_depth":null,"min_samples_split":2,"max_features":"sqrt","seed":0}}"#;
        match load_model(json) {
            Err(Error::ModelFormat { path, .. }) => assert_eq!(path, "$.trees"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn version_must_be_one() {
        let json = br#"{"version":2,"conspiracy":null,"dim":1,"params":{},"trees":[]}"#;
        assert!(matches!(
            load_model(json),
            Err(Error::UnsupportedVersion(2))
        ));
    }

    #[test]
    fn invalid_feature_index_reports_nested_path() {
        let bad = ForestModel {
            trees: vec![leaf([1, 0, 0]), stump(0.5, [1, 0, 0], [0, 1, 0])],
            dim: 1,
            params: params(2),
            conspiracy: Some(ConspiracyKind::Antivax),
        };
        let text = String::from_utf8(save_model(&bad))
            .unwrap()
            .replace("\"feature\":0", "\"feature\":4");
        match load_model(text.as_bytes()) {
            Err(Error::ModelFormat { path, .. }) => assert_eq!(path, "$.trees[1].split.feature"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_type_reports_path() {
        let json = br#"{"version":1,"conspiracy":null,"dim":1,"params":{"n_trees":1,"max_depth":null,"min_samples_split":2,"max_features":"sqrt","seed":0},"trees":[{"leaf":{"counts":[1,"x",0]}}]}"#;
        match load_model(json) {
            Err(Error::ModelFormat { path, .. }) => assert_eq!(path, "$.trees[0].leaf.counts[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn model_file_shape() {
        let m = ForestModel::from_trees(
            vec![stump(0.25, [2, 0, 0], [0, 0, 1])],
            1,
            ForestParams {
                max_features: MaxFeatures::Fixed(1),
                ..params(1)
            },
            Some(ConspiracyKind::NewWorldOrder),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&save_model(&m)).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["conspiracy"], "new_world_order");
        assert_eq!(v["params"]["max_features"]["fixed"], 1);
        assert_eq!(v["trees"][0]["split"]["threshold"], 0.25);
        assert_eq!(v["trees"][0]["split"]["right"]["leaf"]["counts"][2], 1);
        assert_eq!(load_model(&save_model(&m)).unwrap(), m);
    }
}

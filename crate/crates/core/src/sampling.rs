//! SMOTE oversampling of the stance classes towards a target distribution.
//!
//! The largest class is kept as is. Every other class `c` grows to
//! `round(n_majority * target[c] / target[majority])` rows by interpolating
//! between a uniformly chosen member and one of its `k` nearest same-class
//! neighbours. Class `c` draws from its own stream `rng::stream(seed, c)`
//! in the order source, neighbour, lambda, so results do not depend on the
//! order in which classes are processed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{label_counts, StanceLabel};
use crate::error::{Error, Result};
use crate::rng;
use rand::Rng as _;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    pub k: usize,
    /// Target shares in the order (NonConspiracy, Promotes, Discusses).
    pub target: [f64; 3],
    pub seed: u64,
    /// Clone the single member of a one-row class instead of failing.
    #[serde(default)]
    pub duplicate_fallback: bool,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self {
            k: 5,
            target: [0.50, 0.25, 0.25],
            seed: 0,
            duplicate_fallback: false,
        }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("SMOTE k must be at least 1".into()));
        }
        if self.target.iter().any(|&t| t.is_nan() || t <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "SMOTE target shares must be positive, got {:?}",
                self.target
            )));
        }
        let sum: f64 = self.target.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "SMOTE target shares must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    /// Target share indexed by label code.
    pub fn share(&self, label: StanceLabel) -> f64 {
        match label {
            StanceLabel::NonConspiracy => self.target[0],
            StanceLabel::Promotes => self.target[1],
            StanceLabel::Discusses => self.target[2],
        }
    }
}

/// Where a synthetic row came from: `source + lambda * (neighbor - source)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticOrigin {
    pub source: usize,
    pub neighbor: usize,
    pub lambda: f64,
}

/// Feature rows with a stance label each; synthetic rows carry their origin.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix {
    dim: usize,
    values: Vec<f32>,
    labels: Vec<StanceLabel>,
    origins: Vec<Option<SyntheticOrigin>>,
}

impl LabeledMatrix {
    pub fn new(dim: usize, values: Vec<f32>, labels: Vec<StanceLabel>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("feature dim must be positive".into()));
        }
        if values.len() != labels.len() * dim {
            return Err(Error::DimMismatch {
                expected: labels.len() * dim,
                found: values.len(),
            });
        }
        let origins = vec![None; labels.len()];
        Ok(Self {
            dim,
            values,
            labels,
            origins,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<&[f32]> {
        self.values.chunks_exact(self.dim).collect()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn labels(&self) -> &[StanceLabel] {
        &self.labels
    }

    pub fn origin(&self, i: usize) -> Option<&SyntheticOrigin> {
        self.origins[i].as_ref()
    }

    pub fn is_synthetic(&self, i: usize) -> bool {
        self.origins[i].is_some()
    }

    pub fn class_counts(&self) -> [usize; 3] {
        label_counts(&self.labels)
    }

    fn push_synthetic(&mut self, row: &[f32], label: StanceLabel, origin: SyntheticOrigin) {
        self.values.extend_from_slice(row);
        self.labels.push(label);
        self.origins.push(Some(origin));
    }
}

fn squared_distance(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum()
}

/// Brute-force Euclidean k nearest neighbours of `points[query]`, excluding
/// the query itself. Equal distances resolve to the lower index.
pub fn knn_indices(points: &[&[f32]], query: usize, k: usize) -> Result<Vec<usize>> {
    let n = points.len();
    if k == 0 || k >= n {
        return Err(Error::InsufficientNeighbors { k, n });
    }
    let q = points[query];
    let mut dists: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, p)| (squared_distance(q, p), i))
        .collect();
    dists.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(dists.into_iter().take(k).map(|(_, i)| i).collect())
}

/// `x + lambda * (neighbor - x)`, evaluated in `f64`.
pub fn smote_point(x: &[f32], neighbor: &[f32], lambda: f64) -> Result<Vec<f32>> {
    if x.len() != neighbor.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            found: neighbor.len(),
        });
    }
    Ok(x.iter()
        .zip(neighbor)
        .map(|(&a, &b)| {
            let (a, b) = (f64::from(a), f64::from(b));
            (a + lambda * (b - a)) as f32
        })
        .collect())
}

/// Counts each class should reach; classes are never shrunk.
pub fn target_counts(counts: [usize; 3], cfg: &SmoteConfig) -> [usize; 3] {
    let majority = majority_label(counts);
    let n_maj = counts[majority.index()] as f64;
    let maj_share = cfg.share(majority);
    let mut out = counts;
    for label in StanceLabel::ALL {
        if label == majority || counts[label.index()] == 0 {
            continue;
        }
        let want = (n_maj * cfg.share(label) / maj_share + 0.5).floor() as usize;
        out[label.index()] = want.max(counts[label.index()]);
    }
    out
}

/// Largest class; ties go to the lower label code.
pub fn majority_label(counts: [usize; 3]) -> StanceLabel {
    let mut best = StanceLabel::NonConspiracy;
    for label in StanceLabel::ALL {
        if counts[label.index()] > counts[best.index()] {
            best = label;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resampled {
    pub data: LabeledMatrix,
    /// Non-majority classes with no rows at all; they stay empty.
    pub empty_classes: Vec<StanceLabel>,
}

pub fn resample(data: &LabeledMatrix, cfg: &SmoteConfig) -> Result<Resampled> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("cannot resample an empty training set"));
    }
    let counts = data.class_counts();
    let targets = target_counts(counts, cfg);
    let mut out = data.clone();
    let mut empty_classes = Vec::new();

    for label in StanceLabel::ALL {
        let have = counts[label.index()];
        let need = targets[label.index()] - have;
        if have == 0 {
            if label != majority_label(counts) {
                log::warn!("class {label} has no examples; left empty");
                empty_classes.push(label);
            }
            continue;
        }
        if need == 0 {
            continue;
        }
        let members: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels[i] == label)
            .collect();
        if members.len() == 1 {
            if !cfg.duplicate_fallback {
                return Err(Error::DegenerateClass { label, count: 1 });
            }
            let only = members[0];
            let row = data.row(only).to_vec();
            for _ in 0..need {
                out.push_synthetic(
                    &row,
                    label,
                    SyntheticOrigin {
                        source: only,
                        neighbor: only,
                        lambda: 0.0,
                    },
                );
            }
            continue;
        }

        let k = cfg.k.min(members.len() - 1);
        let member_rows: Vec<&[f32]> = members.iter().map(|&i| data.row(i)).collect();
        let mut neighbours: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut rng = rng::stream(cfg.seed, u64::from(label.code()));
        for _ in 0..need {
            let local = rng.random_range(..members.len());
            let nn = match neighbours.get(&local) {
                Some(nn) => nn,
                None => {
                    let nn = knn_indices(&member_rows, local, k)?;
                    neighbours.entry(local).or_insert(nn)
                }
            };
            let pick = nn[rng.random_range(..k)];
            let lambda: f64 = rng.random();
            let point = smote_point(member_rows[local], member_rows[pick], lambda)?;
            out.push_synthetic(
                &point,
                label,
                SyntheticOrigin {
                    source: members[local],
                    neighbor: members[pick],
                    lambda,
                },
            );
        }
    }
    Ok(Resampled {
        data: out,
        empty_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::StanceLabel::*;

    fn labeled(rows: &[&[f32]], labels: &[StanceLabel]) -> LabeledMatrix {
        let dim = rows[0].len();
        LabeledMatrix::new(dim, rows.concat(), labels.to_vec()).unwrap()
    }

    #[test]
    fn knn_examples() {
        let pts: [&[f32]; 3] = [&[0.0], &[1.0], &[5.0]];
        assert_eq!(knn_indices(&pts, 0, 1).unwrap(), vec![1]);
        assert_eq!(knn_indices(&pts, 0, 2).unwrap(), vec![1, 2]);
        let square: [&[f32]; 4] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[3.0, 3.0]];
        assert_eq!(knn_indices(&square, 0, 2).unwrap(), vec![1, 2]);
        assert!(matches!(
            knn_indices(&pts, 0, 3),
            Err(Error::InsufficientNeighbors { k: 3, n: 3 })
        ));
    }

    #[test]
    fn knn_agrees_with_exhaustive_sort() {
        let mut rng = rng::seeded(11);
        let raw: Vec<Vec<f32>> = (0..30)
            .map(|_| {
                (0..3)
                    .map(|_| (rng.random_range(0..5u8) as f32) - 2.0)
                    .collect()
            })
            .collect();
        let pts: Vec<&[f32]> = raw.iter().map(Vec::as_slice).collect();
        for q in 0..pts.len() {
            // oracle: stable sort on exact integer squared distances
            let mut order: Vec<usize> = (0..pts.len()).filter(|&i| i != q).collect();
            let d = |i: usize| -> i64 {
                pts[i]
                    .iter()
                    .zip(pts[q])
                    .map(|(a, b)| ((a - b) as i64).pow(2))
                    .sum()
            };
            order.sort_by_key(|&i| (d(i), i));
            assert_eq!(knn_indices(&pts, q, 7).unwrap(), order[..7].to_vec());
        }
    }

    #[test]
    fn smote_point_examples() {
        assert_eq!(
            smote_point(&[0.0, 0.0], &[2.0, 4.0], 0.25).unwrap(),
            vec![0.5, 1.0]
        );
        let x = [0.1f32, -3.7];
        let nn = [9.25f32, 1e-3];
        assert_eq!(smote_point(&x, &nn, 0.0).unwrap(), x.to_vec());
        assert_eq!(smote_point(&x, &nn, 1.0).unwrap(), nn.to_vec());
        assert!(smote_point(&[0.0], &[0.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn anchored_targets() {
        let cfg = SmoteConfig::default();
        assert_eq!(target_counts([1740, 57, 115], &cfg), [1740, 870, 870]);
        assert_eq!(target_counts([10, 5, 5], &cfg), [10, 5, 5]);
        assert_eq!(target_counts([7, 0, 2], &cfg), [7, 0, 4]);
    }

    #[test]
    fn balanced_input_is_a_fixed_point() {
        let mut rows: Vec<Vec<f32>> = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            rows.push(vec![i as f32]);
            labels.push(match i % 4 {
                0 | 1 => NonConspiracy,
                2 => Discusses,
                _ => Promotes,
            });
        }
        let refs: Vec<&[f32]> = rows.iter().map(Vec::as_slice).collect();
        let data = labeled(&refs, &labels);
        let out = resample(&data, &SmoteConfig::default()).unwrap();
        assert_eq!(out.data, data);
    }

    #[test]
    fn singleton_class_errors_unless_fallback() {
        let data = labeled(
            &[&[0.0], &[1.0], &[2.0], &[3.0], &[10.0], &[11.0]],
            &[
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                Promotes,
                Discusses,
            ],
        );
        let cfg = SmoteConfig::default();
        assert!(matches!(
            resample(&data, &cfg),
            Err(Error::DegenerateClass { count: 1, .. })
        ));
        let out = resample(
            &data,
            &SmoteConfig {
                duplicate_fallback: true,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(out.data.class_counts(), [4, 2, 2]);
        for i in 6..8 {
            let o = out.data.origin(i).unwrap();
            assert_eq!(o.source, o.neighbor);
            assert_eq!(out.data.row(i), data.row(o.source));
        }
    }

    #[test]
    fn empty_class_is_reported() {
        let data = labeled(
            &[&[0.0], &[1.0], &[2.0], &[3.0], &[10.0], &[11.0]],
            &[
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                Promotes,
                Promotes,
            ],
        );
        let out = resample(&data, &SmoteConfig::default()).unwrap();
        assert_eq!(out.empty_classes, vec![Discusses]);
        assert_eq!(out.data.class_counts(), [4, 0, 2]);
    }

    #[test]
    fn small_class_shrinks_k() {
        // two Promotes rows: each one's only neighbour is the other
        let data = labeled(
            &[
                &[0.0],
                &[1.0],
                &[2.0],
                &[3.0],
                &[4.0],
                &[5.0],
                &[10.0],
                &[20.0],
                &[30.0],
                &[31.0],
            ],
            &[
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                NonConspiracy,
                Promotes,
                Promotes,
                Discusses,
                Discusses,
            ],
        );
        let out = resample(
            &data,
            &SmoteConfig {
                seed: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.data.class_counts(), [6, 3, 3]);
        for i in data.len()..out.data.len() {
            let o = out.data.origin(i).unwrap();
            assert_ne!(o.source, o.neighbor);
            assert_eq!(data.labels()[o.source], data.labels()[o.neighbor]);
            assert_eq!(data.labels()[o.source], out.data.labels()[i]);
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            SmoteConfig {
                k: 0,
                ..Default::default()
            },
            SmoteConfig {
                target: [0.5, 0.5, 0.0],
                ..Default::default()
            },
            SmoteConfig {
                target: [0.5, 0.3, 0.3],
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}

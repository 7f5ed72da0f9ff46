//! Precision, recall, F1 and Matthews correlation over 3×3 confusion matrices.
//!
//! Every 0/0 ratio is defined as 0, so degenerate predictors (everything in
//! one class) score F1 0 on the missing classes and MCC exactly 0.

use serde::{Deserialize, Serialize};

use crate::corpus::StanceLabel;
use crate::error::{Error, Result};

/// Entry `[t][p]` counts examples of true class `t` predicted as `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn row_sum(&self, t: usize) -> u64 {
        self.0[t].iter().sum()
    }

    pub fn col_sum(&self, p: usize) -> u64 {
        self.0.iter().map(|r| r[p]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|k| self.0[k][k]).sum()
    }

    pub fn record(&mut self, truth: StanceLabel, predicted: StanceLabel) {
        self.0[truth.index()][predicted.index()] += 1;
    }
}

pub fn confusion(y_true: &[StanceLabel], y_pred: &[StanceLabel]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("confusion matrix of zero predictions"));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.record(t, p);
    }
    Ok(cm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// One-vs-rest precision, recall and F1 for class `cls`.
pub fn precision_recall_f1(cm: &ConfusionMatrix, cls: StanceLabel) -> ClassMetrics {
    let c = cls.index();
    let tp = cm.0[c][c] as f64;
    let fp = cm.col_sum(c) as f64 - tp;
    let fn_ = cm.row_sum(c) as f64 - tp;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    ClassMetrics {
        precision,
        recall,
        f1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Average {
    Macro,
    /// Weighted by true-class support.
    #[default]
    Weighted,
}

pub fn f1_average(cm: &ConfusionMatrix, mode: F1Average) -> f64 {
    let f1s = StanceLabel::ALL.map(|c| precision_recall_f1(cm, c).f1);
    match mode {
        F1Average::Macro => f1s.iter().sum::<f64>() / 3.0,
        F1Average::Weighted => {
            let total = cm.total() as f64;
            let weighted: f64 = (0..3).map(|c| cm.row_sum(c) as f64 * f1s[c]).sum();
            ratio(weighted, total)
        }
    }
}

/// Binary MCC; any zero factor in the denominator gives 0.
pub fn mcc_binary(tp: u64, tn: u64, fp: u64, fn_: u64) -> f64 {
    let num = i128::from(tp) * i128::from(tn) - i128::from(fp) * i128::from(fn_);
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0) {
        return 0.0;
    }
    let den = (factors.iter().map(|&f| u128::from(f)).product::<u128>() as f64).sqrt();
    (num as f64 / den).clamp(-1.0, 1.0)
}

/// Multiclass (Rk) MCC:
/// `(n·tr − Σ row_k·col_k) / √((n² − Σ row_k²)(n² − Σ col_k²))`.
pub fn mcc_multiclass(cm: &ConfusionMatrix) -> f64 {
    let n = i128::from(cm.total());
    let tr = i128::from(cm.trace());
    let rows: [i128; 3] = std::array::from_fn(|k| i128::from(cm.row_sum(k)));
    let cols: [i128; 3] = std::array::from_fn(|k| i128::from(cm.col_sum(k)));
    let num = n * tr - (0..3).map(|k| rows[k] * cols[k]).sum::<i128>();
    let var_true = n * n - rows.iter().map(|r| r * r).sum::<i128>();
    let var_pred = n * n - cols.iter().map(|c| c * c).sum::<i128>();
    if var_true == 0 || var_pred == 0 {
        return 0.0;
    }
    let den = ((var_true * var_pred) as f64).sqrt();
    (num as f64 / den).clamp(-1.0, 1.0)
}

pub fn average_scores(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("average of zero scores"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

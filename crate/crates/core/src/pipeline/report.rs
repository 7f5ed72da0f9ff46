//! Evaluation results and their tabular renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassProportions, ConspiracyKind, StanceLabel};
use crate::embedding::Variant;
use crate::error::{Error, Result};
use crate::metrics::{average_scores, ConfusionMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConspiracyResult {
    pub conspiracy: ConspiracyKind,
    pub f1_weighted: f64,
    pub f1_macro: f64,
    pub mcc: f64,
    pub confusion: ConfusionMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantResults {
    pub variant: Variant,
    /// One row per conspiracy, in [`ConspiracyKind::ALL`] order.
    pub rows: Vec<ConspiracyResult>,
    pub average_f1_weighted: f64,
    pub average_f1_macro: f64,
    pub average_mcc: f64,
}

impl VariantResults {
    pub fn new(variant: Variant, mut rows: Vec<ConspiracyResult>) -> Result<Self> {
        rows.sort_by_key(|r| r.conspiracy);
        let kinds: Vec<ConspiracyKind> = rows.iter().map(|r| r.conspiracy).collect();
        if kinds != ConspiracyKind::ALL {
            return Err(Error::InvalidConfig(format!(
                "{variant} results need exactly one row per conspiracy"
            )));
        }
        let column = |f: fn(&ConspiracyResult) -> f64| -> Result<f64> {
            average_scores(&rows.iter().map(f).collect::<Vec<_>>())
        };
        Ok(Self {
            variant,
            average_f1_weighted: column(|r| r.f1_weighted)?,
            average_f1_macro: column(|r| r.f1_macro)?,
            average_mcc: column(|r| r.mcc)?,
            rows,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub conspiracy: ConspiracyKind,
    pub proportions: ClassProportions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_train: usize,
    pub n_test: usize,
    /// Ordered by [`Variant::ALL`].
    pub variants: Vec<VariantResults>,
    /// Class shares of the training split, before resampling.
    pub distribution: Vec<DistributionRow>,
}

impl EvaluationReport {
    pub fn variant(&self, v: Variant) -> Option<&VariantResults> {
        self.variants.iter().find(|r| r.variant == v)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serialisation cannot fail");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| Error::InvalidConfig(format!("evaluation file: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "report.md",
            ReportFormat::Csv => "report.csv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Markdown => render_markdown(report).into_bytes(),
        ReportFormat::Csv => render_csv(report),
    }
}

struct Grid<'a> {
    title: &'a str,
    average_label: &'a str,
    cell_decimals: usize,
    average_decimals: usize,
    cell: fn(&ConspiracyResult) -> f64,
    average: fn(&VariantResults) -> f64,
}

const GRIDS: [Grid<'static>; 3] = [
    Grid {
        title: "F1 (weighted)",
        average_label: "Average F1-Score",
        cell_decimals: 2,
        average_decimals: 3,
        cell: |r| r.f1_weighted,
        average: |v| v.average_f1_weighted,
    },
    Grid {
        title: "F1 (macro)",
        average_label: "Average F1-Score",
        cell_decimals: 2,
        average_decimals: 3,
        cell: |r| r.f1_macro,
        average: |v| v.average_f1_macro,
    },
    Grid {
        title: "MCC",
        average_label: "Average MCC Score",
        cell_decimals: 3,
        average_decimals: 3,
        cell: |r| r.mcc,
        average: |v| v.average_mcc,
    },
];

fn table_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    out.push('|');
    for c in cells {
        let _ = write!(out, " {c} |");
    }
    out.push('\n');
}

fn render_markdown(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Evaluation report\n\nTraining tweets: {}, test tweets: {}\n",
        report.n_train, report.n_test
    );
    for grid in &GRIDS {
        let _ = writeln!(out, "## {}\n", grid.title);
        let mut header = vec!["Conspiracy".to_string()];
        header.extend(
            report
                .variants
                .iter()
                .map(|v| v.variant.title().to_string()),
        );
        table_row(&mut out, header);
        let mut rule = vec!["---".to_string()];
        rule.extend(report.variants.iter().map(|_| "---:".to_string()));
        table_row(&mut out, rule);
        for kind in ConspiracyKind::ALL {
            let mut cells = vec![kind.display_name().to_string()];
            for v in &report.variants {
                let value = v
                    .rows
                    .iter()
                    .find(|r| r.conspiracy == kind)
                    .map(grid.cell)
                    .unwrap_or(f64::NAN);
                cells.push(format!("{:.*}", grid.cell_decimals, value));
            }
            table_row(&mut out, cells);
        }
        let mut avg = vec![grid.average_label.to_string()];
        avg.extend(
            report
                .variants
                .iter()
                .map(|v| format!("{:.*}", grid.average_decimals, (grid.average)(v))),
        );
        table_row(&mut out, avg);
        out.push('\n');
    }
    if !report.distribution.is_empty() {
        out.push_str("## Training class distribution\n\n");
        table_row(
            &mut out,
            [
                "Conspiracy",
                "Non-Conspiracy",
                "Discusses Conspiracy",
                "Promotes / Supports Conspiracy",
            ]
            .map(String::from),
        );
        table_row(&mut out, ["---", "---:", "---:", "---:"].map(String::from));
        for row in &report.distribution {
            let mut cells = vec![row.conspiracy.display_name().to_string()];
            cells.extend(
                StanceLabel::ALL
                    .iter()
                    .map(|&l| format!("{:.1}%", 100.0 * row.proportions.get(l))),
            );
            table_row(&mut out, cells);
        }
    }
    out
}

/// Full-precision values, one line per (variant, conspiracy) plus averages.
fn render_csv(report: &EvaluationReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| {
        w.write_record(rec).expect("writing to a Vec cannot fail");
    };
    write(
        &mut w,
        &[
            "table",
            "variant",
            "conspiracy",
            "f1_weighted",
            "f1_macro",
            "mcc",
        ]
        .map(String::from),
    );
    for v in &report.variants {
        for r in &v.rows {
            write(
                &mut w,
                &[
                    "scores".into(),
                    v.variant.name().into(),
                    r.conspiracy.slug().into(),
                    r.f1_weighted.to_string(),
                    r.f1_macro.to_string(),
                    r.mcc.to_string(),
                ],
            );
        }
        write(
            &mut w,
            &[
                "average".into(),
                v.variant.name().into(),
                String::new(),
                v.average_f1_weighted.to_string(),
                v.average_f1_macro.to_string(),
                v.average_mcc.to_string(),
            ],
        );
    }
    for row in &report.distribution {
        let p = row.proportions.0;
        write(
            &mut w,
            &[
                "distribution".into(),
                String::new(),
                row.conspiracy.slug().into(),
                p[0].to_string(),
                p[1].to_string(),
                p[2].to_string(),
            ],
        );
    }
    w.into_inner().expect("flushing a Vec cannot fail")
}

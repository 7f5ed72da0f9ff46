//! End-to-end experiment: load corpus and embeddings, split once, resample
//! each conspiracy's training side, fit one forest per (variant, conspiracy),
//! evaluate on the untouched test side and write models and reports.

pub mod report;
pub mod synth;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    class_distribution, parse_corpus, ConspiracyKind, Corpus, SplitConfig, StanceLabel,
};
use crate::embedding::{combine_matrices, load_embeddings, EmbeddingMatrix, Variant};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, load_model, save_model, ForestModel, ForestParams};
use crate::metrics::{confusion, f1_average, mcc_multiclass, F1Average};
use crate::sampling::{resample, LabeledMatrix, SmoteConfig};

pub use report::{
    render_report, ConspiracyResult, DistributionRow, EvaluationReport, ReportFormat,
    VariantResults,
};
pub use synth::{gaussian_blobs, make_synthetic_corpus, SynthConfig};

pub const EVALUATION_FILE: &str = "evaluation.json";
pub const SPLIT_FILE: &str = "split.json";

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::from(e).at_path(path))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::from(e).at_path(path))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::from(e).at_path(path))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    /// At least one entry. `combined` is derived from `bert` + `elmo` when
    /// both are given and it is not.
    pub embeddings: BTreeMap<Variant, PathBuf>,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub smote: SmoteConfig,
    #[serde(default)]
    pub forest: ForestParams,
    pub out_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub report_formats: Vec<ReportFormat>,
    /// Train on the whole corpus instead of the training split.
    #[serde(default)]
    pub full_train: bool,
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Markdown, ReportFormat::Csv]
}

impl ExperimentConfig {
    pub fn new(corpus: PathBuf, embeddings: BTreeMap<Variant, PathBuf>, out_dir: PathBuf) -> Self {
        Self {
            corpus,
            embeddings,
            split: SplitConfig::default(),
            smote: SmoteConfig::default(),
            forest: ForestParams::default(),
            out_dir,
            report_formats: default_formats(),
            full_train: false,
        }
    }

    /// Reads a JSON config; relative paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let mut cfg: Self = serde_json::from_slice(&bytes)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.corpus);
        resolve(&mut cfg.out_dir);
        cfg.embeddings.values_mut().for_each(resolve);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.embeddings.is_empty() {
            return Err(Error::InvalidConfig("no embedding files configured".into()));
        }
        self.split.validate()?;
        self.smote.validate()?;
        self.forest.validate()
    }
}

/// Corpus plus one embedding table per variant.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub corpus: Corpus,
    pub embeddings: BTreeMap<Variant, EmbeddingMatrix>,
}

impl Inputs {
    pub fn new(corpus: Corpus, matrices: Vec<EmbeddingMatrix>) -> Result<Self> {
        let mut embeddings = BTreeMap::new();
        for m in matrices {
            let v = m.variant();
            if embeddings.insert(v, m).is_some() {
                return Err(Error::InvalidConfig(format!("{v} embeddings given twice")));
            }
        }
        if embeddings.is_empty() {
            return Err(Error::InvalidConfig("no embedding tables".into()));
        }
        if !embeddings.contains_key(&Variant::Combined) {
            if let (Some(b), Some(e)) = (
                embeddings.get(&Variant::Bert),
                embeddings.get(&Variant::Elmo),
            ) {
                let combined = combine_matrices(b, e)?;
                embeddings.insert(Variant::Combined, combined);
            }
        }
        for (v, m) in &embeddings {
            let missing = m.missing_ids(corpus.ids());
            if !missing.is_empty() {
                return Err(Error::MissingEmbeddings {
                    variant: v.to_string(),
                    missing,
                });
            }
        }
        Ok(Self { corpus, embeddings })
    }

    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let corpus = parse_corpus(
            fs::File::open(&cfg.corpus).map_err(|e| Error::from(e).at_path(&cfg.corpus))?,
        )
        .map_err(|e| e.at_path(&cfg.corpus))?;
        let mut matrices = Vec::new();
        for (variant, path) in &cfg.embeddings {
            let m = load_embeddings(path)?;
            if m.variant() != *variant {
                return Err(Error::InvalidConfig(format!(
                    "{} holds {} embeddings, configured as {variant}",
                    path.display(),
                    m.variant()
                )));
            }
            matrices.push(m);
        }
        Self::new(corpus, matrices)
    }

    fn rows_for(&self, variant: Variant, indices: &[usize], kind: ConspiracyKind) -> LabeledMatrix {
        let emb = &self.embeddings[&variant];
        let tweets = self.corpus.tweets();
        let mut values = Vec::with_capacity(indices.len() * emb.dim());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(emb.get(&tweets[i].id).expect("coverage checked on load"));
            labels.push(tweets[i].label(kind));
        }
        LabeledMatrix::new(emb.dim(), values, labels).expect("rows have the table's dim")
    }
}

/// Row indices (into the corpus) of the two sides of the shared split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Partition {
    pub fn new(corpus: &Corpus, cfg: &ExperimentConfig) -> Result<Self> {
        let (train, test) = crate::corpus::split_indices(corpus.len(), &cfg.split)?;
        let train = if cfg.full_train {
            (0..corpus.len()).collect()
        } else {
            train
        };
        Ok(Self { train, test })
    }

    fn ids_json(&self, corpus: &Corpus) -> Vec<u8> {
        let ids = |idx: &[usize]| -> Vec<&str> {
            idx.iter()
                .map(|&i| corpus.tweets()[i].id.as_str())
                .collect()
        };
        let doc = serde_json::json!({ "train": ids(&self.train), "test": ids(&self.test) });
        let mut out = serde_json::to_vec_pretty(&doc).expect("json");
        out.push(b'\n');
        out
    }
}

pub type ModelSet = BTreeMap<(Variant, ConspiracyKind), ForestModel>;

pub fn model_file_name(variant: Variant, kind: ConspiracyKind) -> String {
    format!("{}.{}.model.json", variant.name(), kind.slug())
}

/// Resamples and fits one forest for every (variant, conspiracy) pair.
pub fn train_models(
    cfg: &ExperimentConfig,
    inputs: &Inputs,
    partition: &Partition,
) -> Result<ModelSet> {
    let jobs: Vec<(Variant, ConspiracyKind)> = inputs
        .embeddings
        .keys()
        .flat_map(|&v| ConspiracyKind::ALL.map(|k| (v, k)))
        .collect();
    let models = jobs
        .par_iter()
        .map(|&(variant, kind)| {
            let train = inputs.rows_for(variant, &partition.train, kind);
            let fitted = resample(&train, &cfg.smote).and_then(|r| {
                log::info!(
                    "{variant}/{kind}: {} rows after resampling (class counts {:?})",
                    r.data.len(),
                    r.data.class_counts()
                );
                fit_forest(&r.data.rows(), r.data.labels(), &cfg.forest, Some(kind))
            });
            fitted
                .map(|m| ((variant, kind), m))
                .map_err(|e| e.in_conspiracy(kind, variant.name()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(models.into_iter().collect())
}

pub fn save_models(dir: &Path, models: &ModelSet) -> Result<()> {
    create_dir(dir)?;
    for (&(variant, kind), model) in models {
        write_file(&dir.join(model_file_name(variant, kind)), save_model(model))?;
    }
    Ok(())
}

fn load_one(dir: &Path, variant: Variant, kind: ConspiracyKind) -> Result<ForestModel> {
    let path = dir.join(model_file_name(variant, kind));
    let model = load_model(&read_file(&path)?).map_err(|e| e.at_path(&path))?;
    if model.conspiracy() != Some(kind) {
        return Err(Error::model_format(
            "$.conspiracy",
            format!("{} is not a {kind} model", path.display()),
        ));
    }
    Ok(model)
}

pub fn load_models(dir: &Path, variants: impl IntoIterator<Item = Variant>) -> Result<ModelSet> {
    let mut out = ModelSet::new();
    for variant in variants {
        for kind in ConspiracyKind::ALL {
            out.insert((variant, kind), load_one(dir, variant, kind)?);
        }
    }
    Ok(out)
}

/// Scores every model on the test side of `partition`.
pub fn evaluate_models(
    inputs: &Inputs,
    models: &ModelSet,
    partition: &Partition,
) -> Result<EvaluationReport> {
    let mut variants = Vec::new();
    for (&variant, emb) in &inputs.embeddings {
        let mut rows = Vec::with_capacity(9);
        for kind in ConspiracyKind::ALL {
            let model = models
                .get(&(variant, kind))
                .ok_or_else(|| Error::InvalidConfig(format!("no model for {variant}/{kind}")))?;
            if model.dim() != emb.dim() {
                return Err(Error::DimMismatch {
                    expected: model.dim(),
                    found: emb.dim(),
                }
                .in_conspiracy(kind, variant.name()));
            }
            let test = inputs.rows_for(variant, &partition.test, kind);
            debug_assert!((0..test.len()).all(|i| !test.is_synthetic(i)));
            let predicted = (0..test.len())
                .map(|i| model.predict(test.row(i)))
                .collect::<Result<Vec<_>>>()?;
            let cm = confusion(test.labels(), &predicted)?;
            rows.push(ConspiracyResult {
                conspiracy: kind,
                f1_weighted: f1_average(&cm, F1Average::Weighted),
                f1_macro: f1_average(&cm, F1Average::Macro),
                mcc: mcc_multiclass(&cm),
                confusion: cm,
            });
        }
        variants.push(VariantResults::new(variant, rows)?);
    }
    let train_corpus = Corpus::new(
        partition
            .train
            .iter()
            .map(|&i| inputs.corpus.tweets()[i].clone())
            .collect(),
    )?;
    let distribution = ConspiracyKind::ALL
        .iter()
        .map(|&kind| {
            Ok(DistributionRow {
                conspiracy: kind,
                proportions: class_distribution(&train_corpus, kind)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationReport {
        n_train: partition.train.len(),
        n_test: partition.test.len(),
        variants,
        distribution,
    })
}

pub fn write_reports(
    dir: &Path,
    report: &EvaluationReport,
    formats: &[ReportFormat],
) -> Result<()> {
    create_dir(dir)?;
    for &f in formats {
        write_file(&dir.join(f.file_name()), render_report(report, f))?;
    }
    Ok(())
}

/// `train` step: fit and persist all models plus the split ids.
pub fn train(cfg: &ExperimentConfig) -> Result<ModelSet> {
    cfg.validate()?;
    let inputs = Inputs::load(cfg)?;
    let partition = Partition::new(&inputs.corpus, cfg)?;
    let models = train_models(cfg, &inputs, &partition)?;
    save_models(&cfg.out_dir, &models)?;
    write_file(
        &cfg.out_dir.join(SPLIT_FILE),
        partition.ids_json(&inputs.corpus),
    )?;
    Ok(models)
}

/// `evaluate` step: load persisted models and write `evaluation.json`.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let inputs = Inputs::load(cfg)?;
    let partition = Partition::new(&inputs.corpus, cfg)?;
    let models = load_models(&cfg.out_dir, inputs.embeddings.keys().copied())?;
    let report = evaluate_models(&inputs, &models, &partition)?;
    create_dir(&cfg.out_dir)?;
    write_file(&cfg.out_dir.join(EVALUATION_FILE), report.to_json())?;
    Ok(report)
}

/// Train, persist, evaluate and render in one go.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let inputs = Inputs::load(cfg)?;
    let partition = Partition::new(&inputs.corpus, cfg)?;
    let models = train_models(cfg, &inputs, &partition)?;
    save_models(&cfg.out_dir, &models)?;
    write_file(
        &cfg.out_dir.join(SPLIT_FILE),
        partition.ids_json(&inputs.corpus),
    )?;
    let report = evaluate_models(&inputs, &models, &partition)?;
    write_file(&cfg.out_dir.join(EVALUATION_FILE), report.to_json())?;
    write_reports(&cfg.out_dir, &report, &cfg.report_formats)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub id: String,
    pub labels: [StanceLabel; 9],
}

/// Labels every row of `embeddings` with the nine `variant` models in `model_dir`.
pub fn predict_batch(
    model_dir: &Path,
    embeddings: &EmbeddingMatrix,
    variant: Variant,
) -> Result<Vec<Prediction>> {
    let models = load_models(model_dir, [variant])?;
    predict_with(&models, embeddings, variant)
}

pub fn predict_with(
    models: &ModelSet,
    embeddings: &EmbeddingMatrix,
    variant: Variant,
) -> Result<Vec<Prediction>> {
    let per_kind: Vec<&ForestModel> = ConspiracyKind::ALL
        .iter()
        .map(|&k| {
            models
                .get(&(variant, k))
                .ok_or_else(|| Error::InvalidConfig(format!("no model for {variant}/{k}")))
        })
        .collect::<Result<_>>()?;
    for m in &per_kind {
        if m.dim() != embeddings.dim() {
            return Err(Error::DimMismatch {
                expected: m.dim(),
                found: embeddings.dim(),
            });
        }
    }
    (0..embeddings.len())
        .into_par_iter()
        .map(|i| {
            let x = embeddings.row(i);
            let mut labels = [StanceLabel::NonConspiracy; 9];
            for (slot, m) in labels.iter_mut().zip(&per_kind) {
                *slot = m.predict(x)?;
            }
            Ok(Prediction {
                id: embeddings.ids()[i].clone(),
                labels,
            })
        })
        .collect()
}

/// Writes predictions as `id` plus the nine label columns.
pub fn write_predictions<W: Write>(predictions: &[Prediction], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id"];
    header.extend(ConspiracyKind::ALL.iter().map(|k| k.slug()));
    w.write_record(&header)?;
    for p in predictions {
        let mut rec = vec![p.id.clone()];
        rec.extend(p.labels.iter().map(|l| l.code().to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stanceforest::corpus::{parse_corpus, train_test_split, write_corpus};
use stanceforest::embedding::{load_embeddings, save_embeddings, Variant};
use stanceforest::pipeline::{
    self, render_report, synth, EvaluationReport, ExperimentConfig, ReportFormat, SynthConfig,
};
use stanceforest::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stanceforest",
    version,
    about = "Per-conspiracy stance classifiers over tweet embeddings"
)]
struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides every seed in the config (split, SMOTE, forest, synth).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus, embedding files and a starter config.
    Synth(SynthArgs),
    /// Write the train and test halves of the corpus as CSV.
    Split,
    /// Resample, fit and save one forest per (variant, conspiracy).
    Train {
        /// Fit on the whole corpus rather than the training split.
        #[arg(long)]
        full_train: bool,
    },
    /// Score saved models on the test split and write evaluation.json.
    Evaluate,
    /// Label every row of an embedding file with the saved models.
    Predict(PredictArgs),
    /// Render evaluation.json as tables.
    Report(ReportArgs),
    /// train + evaluate + report in one process.
    Run,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Distance between class means, in units of the within-class sigma.
    #[arg(long, default_value_t = 3.0)]
    separation: f64,
    /// Dimension of `synthetic` embeddings (bert/elmo use 768/1024).
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Variants to generate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "synthetic")]
    variants: Vec<Variant>,
    /// Class shares `non,discusses,promotes`, used for all nine conspiracies.
    #[arg(long, value_parser = parse_shares, conflicts_with = "reported_distribution")]
    distribution: Option<[f64; 3]>,
    /// Use the per-conspiracy shares of the original training data instead.
    #[arg(long)]
    reported_distribution: bool,
}

fn parse_shares(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    <[f64; 3]>::try_from(parts)
        .map_err(|p| format!("expected 3 comma-separated shares, got {}", p.len()))
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Model variant to use; defaults to the file's variant tag.
    #[arg(long)]
    variant: Option<Variant>,
    /// Model directory; defaults to the output directory.
    #[arg(long)]
    models: Option<PathBuf>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Defaults to `<out-dir>/evaluation.json`.
    #[arg(long)]
    evaluation: Option<PathBuf>,
    /// Formats to write; defaults to the config's report_formats.
    #[arg(long, value_delimiter = ',')]
    format: Vec<ReportFormat>,
}

impl Cli {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("this command needs --config".into()))?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.split.seed = seed;
            cfg.smote.seed = seed;
            cfg.forest.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        Ok(cfg)
    }

    fn output_dir(&self) -> Result<PathBuf> {
        match &self.out_dir {
            Some(dir) => Ok(dir.clone()),
            None => Ok(self.experiment()?.out_dir),
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::from(e).at_path(path))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::from(e).at_path(path))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::from(e).at_path(path))
}

fn synth_cmd(cli: &Cli, args: &SynthArgs) -> Result<()> {
    let out = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let distribution = match (&args.distribution, args.reported_distribution) {
        (_, true) => synth::reported_distribution(),
        (Some(d), false) => [*d; 9],
        (None, false) => SynthConfig::default().distribution,
    };
    let seed = cli.seed.unwrap_or(0);
    let variants = {
        let mut v = args.variants.clone();
        v.sort();
        v.dedup();
        v
    };
    let first = *variants
        .first()
        .ok_or_else(|| Error::InvalidConfig("no variants requested".into()))?;
    let dim_of = |v: Variant| v.required_dim().unwrap_or(args.dim);
    let cfg = SynthConfig {
        n: args.n,
        distribution,
        separation: args.separation,
        dim: dim_of(first),
        variant: first,
        seed,
    };
    let (corpus, first_matrix) = pipeline::make_synthetic_corpus(&cfg)?;
    mkdir(&out)?;
    write_corpus(&corpus, create(&out.join("corpus.csv"))?)?;

    let mut embeddings = BTreeMap::new();
    for &v in &variants {
        let matrix = if v == first {
            first_matrix.clone()
        } else {
            synth::synthetic_embeddings(&corpus, v, dim_of(v), args.separation, seed)?
        };
        let name = format!("{}.cev", v.name());
        save_embeddings(&matrix, &out.join(&name))?;
        embeddings.insert(v, PathBuf::from(name));
    }
    let mut experiment = ExperimentConfig::new("corpus.csv".into(), embeddings, "run".into());
    experiment.split.seed = seed;
    experiment.smote.seed = seed;
    experiment.forest.seed = seed;
    let mut json = serde_json::to_vec_pretty(&experiment).expect("config serialises");
    json.push(b'\n');
    create(&out.join("experiment.json"))?.write_all(&json)?;
    eprintln!(
        "wrote {} tweets and {} embedding file(s) to {}",
        corpus.len(),
        variants.len(),
        out.display()
    );
    Ok(())
}

fn split_cmd(cli: &Cli) -> Result<()> {
    let cfg = cli.experiment()?;
    let corpus = parse_corpus(open(&cfg.corpus)?)?;
    let (train, test) = train_test_split(&corpus, &cfg.split)?;
    mkdir(&cfg.out_dir)?;
    write_corpus(&train, create(&cfg.out_dir.join("train.csv"))?)?;
    write_corpus(&test, create(&cfg.out_dir.join("test.csv"))?)?;
    eprintln!("train {} / test {}", train.len(), test.len());
    Ok(())
}

fn predict_cmd(cli: &Cli, args: &PredictArgs) -> Result<()> {
    let models = match &args.models {
        Some(dir) => dir.clone(),
        None => cli.output_dir()?,
    };
    let embeddings = load_embeddings(&args.embeddings)?;
    let variant = args.variant.unwrap_or(embeddings.variant());
    let predictions = pipeline::predict_batch(&models, &embeddings, variant)?;
    match &args.output {
        Some(path) => pipeline::write_predictions(&predictions, create(path)?),
        None => pipeline::write_predictions(&predictions, io::stdout().lock()),
    }
}

fn report_cmd(cli: &Cli, args: &ReportArgs) -> Result<()> {
    let dir = cli.output_dir()?;
    let path = args
        .evaluation
        .clone()
        .unwrap_or_else(|| dir.join(pipeline::EVALUATION_FILE));
    let report =
        EvaluationReport::from_json(&fs::read(&path).map_err(|e| Error::from(e).at_path(&path))?)?;
    let formats = if !args.format.is_empty() {
        args.format.clone()
    } else if cli.config.is_some() {
        cli.experiment()?.report_formats
    } else {
        vec![ReportFormat::Markdown, ReportFormat::Csv]
    };
    pipeline::write_reports(&dir, &report, &formats)?;
    if formats.contains(&ReportFormat::Markdown) {
        io::stdout().write_all(&render_report(&report, ReportFormat::Markdown))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(args) => synth_cmd(cli, args),
        Command::Split => split_cmd(cli),
        Command::Train { full_train } => {
            let mut cfg = cli.experiment()?;
            cfg.full_train |= *full_train;
            let models = pipeline::train(&cfg)?;
            eprintln!("saved {} models to {}", models.len(), cfg.out_dir.display());
            Ok(())
        }
        Command::Evaluate => {
            let cfg = cli.experiment()?;
            let report = pipeline::evaluate(&cfg)?;
            for v in &report.variants {
                eprintln!(
                    "{}: average weighted F1 {:.3}, average MCC {:.3}",
                    v.variant, v.average_f1_weighted, v.average_mcc
                );
            }
            Ok(())
        }
        Command::Predict(args) => predict_cmd(cli, args),
        Command::Report(args) => report_cmd(cli, args),
        Command::Run => {
            let cfg = cli.experiment()?;
            let report = pipeline::run_experiment(&cfg)?;
            io::stdout().write_all(&render_report(&report, ReportFormat::Markdown))?;
            Ok(())
        }
    }
}

fn broken_pipe(e: &Error) -> bool {
    matches!(e.root(), Error::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

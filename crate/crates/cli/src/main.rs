use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use topicrec::{HyperTemplate, LdaHyperparams, ModelFile, DEFAULT_TOP_TERMS};
use topicrec_cli::bundle::{BundlePaths, EngineBundle};
use topicrec_cli::commands;
use topicrec_cli::config::PreprocessArgs;
use topicrec_cli::server::{self, AppState};
use topicrec_cli::session::SessionStore;
use topicrec_cli::{exit_code, RATINGS_LOG_ENV};

#[derive(Parser)]
#[command(name = "topicrec", version, about = "Topic-model recommender for art collections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a topic model and write the model file with its similarity matrix.
    Train(TrainArgs),
    /// Mean coherence across topic counts.
    Sweep(SweepArgs),
    /// Rank items for a ratings file.
    Recommend(RecommendArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Dump a model file as JSON.
    Export(ExportArgs),
}

#[derive(Args)]
struct HyperArgs {
    /// Dirichlet prior on document-topic mixtures; defaults to 50/K.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Average estimates over post-burn-in sweeps.
    #[arg(long)]
    average: bool,
}

impl HyperArgs {
    fn template(&self) -> HyperTemplate {
        HyperTemplate {
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
            average: self.average,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Items as JSONL or CSV.
    #[arg(long)]
    items: PathBuf,
    /// Add title, artist, metadata and extra texts to each description.
    #[arg(long)]
    enrich: bool,
    #[arg(long, short = 'k')]
    topics: usize,
    #[command(flatten)]
    hyper: HyperArgs,
    #[command(flatten)]
    preprocess: PreprocessArgs,
    /// Words per topic for the coherence summary.
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    /// Model file to write; the coherence report goes to `<output>.coherence.json`.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    items: PathBuf,
    /// Comma-separated topic counts.
    #[arg(long, value_delimiter = ',', required = true)]
    topics: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    #[arg(long)]
    enrich: bool,
    /// Run plain and enriched documents side by side.
    #[arg(long)]
    compare_enrichment: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[command(flatten)]
    hyper: HyperArgs,
    #[command(flatten)]
    preprocess: PreprocessArgs,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RecommendArgs {
    #[arg(long)]
    model: PathBuf,
    /// JSON object mapping item id to a rating from 1 to 5.
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long, short = 'k', default_value = "10")]
    k: NonZeroUsize,
    #[arg(long, default_value_t = DEFAULT_TOP_TERMS)]
    top_terms: usize,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    items: PathBuf,
    /// Precomputed feature vectors enabling the `features` arm.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Coherence report written by `train`.
    #[arg(long)]
    coherence: Option<PathBuf>,
    #[arg(long, env = RATINGS_LOG_ENV, default_value = "ratings.jsonl")]
    ratings_log: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn sidecar(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".coherence.json");
    PathBuf::from(s)
}

fn train(args: TrainArgs) -> Result<()> {
    let items = commands::read_items(&args.items)?;
    let config = args.preprocess.resolve()?;
    let hyper: LdaHyperparams = args.hyper.template().for_topics(args.topics);
    let out = commands::train_pipeline(&items, args.enrich, &config, &hyper, args.top_n)?;
    out.model_file.save(&args.output)?;
    let path = sidecar(&args.output);
    std::fs::write(&path, commands::coherence_json(&out.coherence))
        .with_context(|| format!("writing {}", path.display()))?;
    print!("{}", commands::coherence_summary(&out.coherence));
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let items = commands::read_items(&args.items)?;
    let config = args.preprocess.resolve()?;
    let report = commands::sweep_report(
        &items,
        &args.topics,
        &args.hyper.template(),
        &config,
        args.top_n,
        args.enrich,
        args.compare_enrichment,
    )?;
    let text = match args.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json(),
    };
    emit(&text, args.output.as_deref())
}

fn recommend(args: RecommendArgs) -> Result<()> {
    let model_file = ModelFile::load(&args.model)?;
    let ratings = commands::read_ratings(&args.ratings)?;
    let rec = commands::recommend_from_file(&model_file, &ratings, args.k.get(), args.top_terms)?;
    emit(&commands::recommendation_json(&rec), None)
}

fn serve(args: ServeArgs) -> Result<()> {
    let bundle = EngineBundle::load(&BundlePaths {
        model: args.model,
        items: args.items,
        features: args.features,
        coherence: args.coherence,
    })?;
    let sessions = SessionStore::open(&args.ratings_log, bundle.model().item_ids().iter().cloned())?;
    log::info!("ratings log {}", sessions.path().display());
    let state = AppState {
        bundle: Arc::new(bundle),
        sessions: Arc::new(sessions),
    };

    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.bind)
            .await
            .with_context(|| format!("binding {}", args.bind))?;
        let addr = listener.local_addr()?;
        let mut out = std::io::stdout().lock();
        writeln!(out, "listening on http://{addr}")?;
        out.flush()?;
        drop(out);
        server::serve(listener, state).await?;
        Ok(())
    })
}

fn export(args: ExportArgs) -> Result<()> {
    let model_file = ModelFile::load(&args.model)?;
    emit(&(model_file.to_json() + "\n"), args.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Sweep(a) => sweep(a),
        Command::Recommend(a) => recommend(a),
        Command::Serve(a) => serve(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use facerec::config::{parse_grid, Algorithm, DatabaseSource, ExperimentConfig};
use facerec::error::{Error, Result, Stage};
use facerec::model_io::save_model;
use facerec::pipeline::{
    dump_depths, emit_constancy, emit_grid, emit_records, load_database, run_grid, run_on_database, write_grid_csv,
};
use facerec_core::classify::Metric;
use facerec_core::wavelet::Family;

#[derive(Parser)]
#[command(name = "facerec", version, about = "Shape-based face recognition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on one split and classify the rest.
    Run(RunArgs),
    /// Run every config of a grid file and write one CSV row per config.
    Grid {
        #[arg(long)]
        configs: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative errors of images from their class mean in LDA space.
    Constancy {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
        /// Include the test images, not only the training set.
        #[arg(long)]
        all_images: bool,
    },
}

#[derive(Args)]
struct Overrides {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Database root, or `synthetic` / `synthetic-fixed`.
    #[arg(long)]
    db: Option<String>,
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    train_per_class: Option<usize>,
    #[arg(long)]
    metric: Option<Metric>,
    #[arg(long)]
    mu_scale: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Per-test-image CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    save_model: Option<PathBuf>,
    /// Directory for the recovered depth maps as PGM.
    #[arg(long)]
    depth_dump: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_text(&read(path)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(db) = &self.db {
            cfg.database = db
                .parse::<DatabaseSource>()
                .map_err(|message| Error::Config { line: 0, message })?;
        }
        if let Some(a) = self.algo {
            cfg.algorithm = a;
        }
        if let Some(f) = self.family {
            cfg.family = f;
        }
        if let Some(l) = self.levels {
            cfg.levels = l;
        }
        if let Some(n) = self.train_per_class {
            cfg.split.n_train_per_class = n;
        }
        if let Some(m) = self.metric {
            cfg.metric = m;
        }
        if let Some(mu) = self.mu_scale {
            cfg.mu_scale = mu;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(s) = self.seed {
            cfg.split.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = args.overrides.resolve().map_err(|e| e.in_stage(Stage::Config))?;
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    let db = load_database(&cfg)?;
    if let Some(dir) = &args.depth_dump {
        dump_depths(&cfg, &db, dir)?;
    }
    let report = run_on_database(&cfg, &db)?;
    println!(
        "{} on {}: {}/{} correct, {:.1}% in {} ms",
        cfg.algorithm,
        cfg.database,
        report.correct,
        report.total,
        report.recognition_percent(),
        report.duration.as_millis()
    );
    if let Some(out) = &cfg.output {
        emit_records(&report, out).map_err(|e| e.in_stage(Stage::Output))?;
    }
    if let Some(path) = &args.save_model {
        save_model(&report.model, path).map_err(|e| e.in_stage(Stage::Output))?;
    }
    Ok(())
}

fn grid(configs: &Path, out: Option<&Path>) -> Result<()> {
    let configs = parse_grid(&read(configs)?).map_err(|e| e.in_stage(Stage::Config))?;
    let results = run_grid(&configs);
    for (cfg, r) in configs.iter().zip(&results) {
        match r {
            Ok(r) => eprintln!("{} {}: {:.1}%", cfg.database, cfg.algorithm, r.recognition_percent()),
            Err(e) => eprintln!("{} {}: error [{}]: {e}", cfg.database, cfg.algorithm, stage_name(e)),
        }
    }
    match out {
        Some(path) => emit_grid(&configs, &results, path),
        None => write_grid_csv(&configs, &results, std::io::stdout().lock()),
    }
    .map_err(|e| e.in_stage(Stage::Output))
}

fn constancy(overrides: &Overrides, out: &Path, all_images: bool) -> Result<()> {
    let cfg = overrides.resolve().map_err(|e| e.in_stage(Stage::Config))?;
    let db = load_database(&cfg)?;
    let report = run_on_database(&cfg, &db)?;
    emit_constancy(&report, out, all_images).map_err(|e| e.in_stage(Stage::Output))?;
    println!("max training relative error {:.4}", report.max_training_constancy());
    Ok(())
}

fn stage_name(e: &Error) -> String {
    e.stage().map_or_else(|| "run".to_string(), |s| s.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Grid { configs, out } => grid(&configs, out.as_deref()),
        Command::Constancy {
            overrides,
            out,
            all_images,
        } => constancy(&overrides, &out, all_images),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let detail = match &e {
                Error::Stage { source, .. } => source.to_string(),
                other => other.to_string(),
            };
            eprintln!("error [{}]: {detail}", stage_name(&e));
            ExitCode::FAILURE
        }
    }
}

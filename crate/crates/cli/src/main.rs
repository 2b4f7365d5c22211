use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fxtopo_cli::config::PipelineConfig;
use fxtopo_cli::error::{AtStage, Stage, StageError};
use fxtopo_cli::{plot, run_pipeline, sensitivity};

#[derive(Parser)]
#[command(name = "fxtopo", version, about = "Statistical vs. topological clustering of FX reference rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the report tree.
    Run(Common),
    /// Run only the (d, tau, eps_max) sensitivity grid.
    Sensitivity(Common),
    /// Re-render SVG figures from an existing report directory.
    Plot {
        #[arg(long)]
        output: PathBuf,
    },
    /// Parse and check a config file without running anything.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Report directory (overrides `output_dir`).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<PipelineConfig, StageError> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(o) = &self.output {
            cfg.output_dir = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, StageError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(StageError::msg(Stage::Config, "--threads must be >= 1"));
            }
            b = b.num_threads(n);
        }
        b.build().at(Stage::Config)
    }
}

fn execute(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.load()?;
            let (dir, result) = c.pool()?.install(|| run_pipeline(&cfg))?;
            for r in &result.evaluation.rows {
                println!(
                    "{:<12} {:<11} k={} silhouette={:.3} CH={:.3}",
                    r.method, r.feature_space, r.k, r.silhouette, r.calinski_harabasz
                );
            }
            println!("report written to {}", dir.display());
        }
        Command::Sensitivity(c) => {
            let cfg = c.load()?;
            let (dir, report) = c.pool()?.install(|| sensitivity::run_and_write(&cfg))?;
            for r in &report.rows {
                let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
                println!(
                    "{:<32} mantel={} ari={} nmi={} {}",
                    r.param_change,
                    f(r.mantel),
                    f(r.ari),
                    f(r.nmi),
                    r.status
                );
            }
            println!("sensitivity report written to {}", dir.display());
        }
        Command::Plot { output } => {
            let files = plot::render_plots(&output)?;
            println!("{} figures written under {}", files.len(), output.display());
        }
        Command::ValidateConfig { config } => {
            let cfg = PipelineConfig::load(&config)?;
            println!(
                "config ok: {} currencies, (d, tau) = ({}, {}), k = {}, {} sensitivity rows",
                cfg.currencies.len(),
                cfg.embed.window,
                cfg.embed.delay,
                cfg.k,
                cfg.sensitivity.grid.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

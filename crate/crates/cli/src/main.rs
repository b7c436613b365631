use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use bvc3d::bvc::ModelName;
use bvc3d::config::{load_table, Overrides, RunConfig};
use bvc3d::experiment::{self, Phase, Progress, SuitePlan};
use clap::{Args, Parser, Subcommand};

/// Boundary-vector-cell place-cell simulator.
#[derive(Parser)]
#[command(name = "bvc3d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial: exploration with learning, then a recorded sampling walk.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory [default: runs/<model>-env<k>]
        #[arg(long, env = "BVC3D_OUT")]
        out: Option<PathBuf>,
    },
    /// Bin a trace and compute modality and aliasing metrics.
    Analyze {
        /// Trace file written by `run`.
        trace: PathBuf,
        /// Check the trace against this configuration instead of the echo
        /// stored next to it.
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory [default: <trace dir>/analysis]
        #[arg(long, env = "BVC3D_OUT")]
        out: Option<PathBuf>,
    },
    /// Render an analysis or suite directory to PPM images.
    Render {
        dir: PathBuf,
        /// Output directory [default: <dir>/render]
        #[arg(long, env = "BVC3D_OUT")]
        out: Option<PathBuf>,
    },
    /// Run, analyze and tabulate every model in every environment.
    Suite {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, env = "BVC3D_OUT", default_value = "suite")]
        out: PathBuf,
        /// Trials run concurrently [default: available cores]
        #[arg(long, env = "BVC3D_THREADS")]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long, env = "BVC3D_CONFIG")]
    config: Option<PathBuf>,
    /// Model preset: 2d, 3d01, 3d02 or 3d3.
    #[arg(long, env = "BVC3D_MODEL")]
    model: Option<ModelName>,
    /// Environment preset 1-4 (central wall tilt 0, 30, 45, 60 degrees).
    #[arg(long, env = "BVC3D_ENV")]
    env: Option<u8>,
    #[arg(long, env = "BVC3D_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "BVC3D_EXPLORATION_STEPS")]
    exploration_steps: Option<usize>,
    #[arg(long, env = "BVC3D_SAMPLING_STEPS")]
    sampling_steps: Option<usize>,
}

impl ConfigArgs {
    fn is_empty(&self) -> bool {
        self.config.is_none()
            && self.model.is_none()
            && self.env.is_none()
            && self.seed.is_none()
            && self.exploration_steps.is_none()
            && self.sampling_steps.is_none()
    }

    fn overrides(&self) -> Overrides {
        Overrides {
            model: self.model,
            env: self.env,
            seed: self.seed,
            exploration_steps: self.exploration_steps,
            sampling_steps: self.sampling_steps,
        }
    }

    fn table(&self) -> Result<Option<toml::Table>> {
        Ok(match &self.config {
            Some(p) => Some(load_table(p)?),
            None => None,
        })
    }

    fn resolve(&self) -> Result<RunConfig> {
        Ok(RunConfig::resolve(self.table()?.as_ref(), &self.overrides())?)
    }
}

fn print_progress(label: &str, p: &Progress) {
    let phase = match p.phase {
        Phase::Exploration => "exploration",
        Phase::Sampling => "sampling",
    };
    println!(
        "[{label}] {phase} {}/{} coverage {:.1}% active {:.1}%",
        p.step,
        p.total,
        100.0 * p.coverage,
        100.0 * p.active_fraction
    );
}

fn run(config: &ConfigArgs, out: Option<PathBuf>) -> Result<()> {
    let config = config.resolve()?;
    let label = experiment::trial_dir_name(&config);
    let out = out.unwrap_or_else(|| Path::new("runs").join(&label));
    experiment::run_trial(&config, &out, &mut |p| print_progress(&label, p))?;
    println!("wrote {} (digest {})", out.display(), config.digest());
    Ok(())
}

fn analyze(trace: &Path, config: &ConfigArgs, out: Option<PathBuf>) -> Result<()> {
    let dir = trace.parent().unwrap_or(Path::new("."));
    let config = if config.is_empty() {
        experiment::load_trial_config(dir)?
    } else {
        config.resolve()?
    };
    let analysis = experiment::analyze(trace, &config)?;
    let out = out.unwrap_or_else(|| dir.join(experiment::ANALYSIS_DIR));
    experiment::write_analysis(&analysis, &out)?;
    let s = &analysis.summary;
    println!(
        "{} env {}: frac_mi_gt0 {:.3} avg_mi_nonzero {:.3} frac_mi_gt1 {:.3} msai {:.5} coverage {:.3}",
        s.model, s.environment, s.frac_mi_gt0, s.avg_mi_nonzero, s.frac_mi_gt1, s.msai, s.coverage
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn render(dir: &Path, out: Option<PathBuf>) -> Result<()> {
    let out = out.unwrap_or_else(|| dir.join("render"));
    let summary = dir.join(experiment::SUITE_SUMMARY_FILE);
    if summary.exists() {
        let rows = experiment::read_suite_summary(&summary)?;
        experiment::write_suite_outputs(&rows, dir)?;
        for r in &rows {
            let trial = dir.join(format!("{}-env{}", r.model, r.environment));
            let label = trial.file_name().map(|n| n.to_os_string()).unwrap_or_default();
            experiment::render_analysis(&trial.join(experiment::ANALYSIS_DIR), &out.join(label))?;
        }
    } else if dir.join("sai.txt").exists() {
        experiment::render_analysis(dir, &out)?;
    } else {
        bail!("{} is neither an analysis nor a suite directory", dir.display());
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn suite(config: &ConfigArgs, out: &Path, threads: Option<usize>) -> Result<()> {
    let mut table = config.table()?.unwrap_or_default();
    let plan = SuitePlan::take_from(&mut table)?;
    let configs = plan.configs(Some(&table), &config.overrides())?;
    let threads = match threads {
        Some(0) => bail!(bvc3d::Error::Config("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let rows = experiment::run_suite(&configs, out, threads, &|c, p| {
        if p.step == p.total {
            print_progress(&experiment::trial_dir_name(c), p)
        }
    })?;
    println!("{}", experiment::SUMMARY_HEADER);
    for r in &rows {
        println!("{}", r.csv());
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<bvc3d::Error>() {
        Some(e) if e.is_config() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => run(config, out.clone()),
        Command::Analyze { trace, config, out } => analyze(trace, config, out.clone()),
        Command::Render { dir, out } => render(dir, out.clone()),
        Command::Suite { config, out, threads } => suite(config, out, *threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

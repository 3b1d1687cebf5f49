use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use urnlab::acceptance::{run_suite, SuiteContext};
use urnlab::config::RunConfig;
use urnlab::diagnostics::{decompose, renlund_conditions};
use urnlab::oracle::{exact_distribution, exact_moments, DEFAULT_BUDGET};
use urnlab::urn::Recording;
use urnlab::{Error, IncrementForm, ModelMoments, Profile};

#[derive(Parser)]
#[command(
    name = "urnlab",
    version,
    about = "Multi-drawing urn with random addition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the asymptotic profile of a model.
    Theory(Common),
    /// Run one trajectory and write it as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Keep every step, including the draws.
        #[arg(long)]
        full: bool,
    },
    /// Exact law of (W_n, B_n) at the horizon.
    Oracle(Common),
    /// Stochastic-approximation decomposition of one trajectory.
    Diagnose(Common),
    /// Replicated experiment with a JSON report and a per-checkpoint CSV.
    Experiment(Common),
    /// Run the acceptance suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Only criteria with this id or tag.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Use the increments as printed instead of the exact ones.
    #[arg(long, hide = true)]
    paper_variant: bool,
}

impl Common {
    fn form(&self) -> IncrementForm {
        if self.paper_variant {
            IncrementForm::Printed
        } else {
            IncrementForm::Exact
        }
    }

    fn load(&self) -> Result<RunConfig, Failure> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Failure::Config("config: --config PATH is required".into()))?;
        let mut cfg = RunConfig::from_path(path)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        Ok(cfg)
    }
}

enum Failure {
    Config(String),
    Runtime(String),
    Acceptance,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Acceptance => 1,
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. }
            | Error::Overflow
            | Error::Replica { .. }
            | Error::TooFewSamples { .. }
            | Error::ThinTrajectory => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(format!("{e:#}"))
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    config: Option<&'a Path>,
    out: &'a Path,
    seed: Option<u64>,
    version: &'a str,
    duration_secs: f64,
    exit_code: u8,
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("output");
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    serde_json::to_string_pretty(&value).expect("valid value") + "\n"
}

fn budget(cfg: &RunConfig) -> Result<usize, Failure> {
    match std::env::var("URNLAB_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("URNLAB_BUDGET: cannot parse {v:?}"))),
        Err(_) => Ok(cfg.budget.unwrap_or(DEFAULT_BUDGET)),
    }
}

fn emit(out: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = out.join(name);
    write_atomic(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn theory(c: &Common) -> Result<Option<u64>, Failure> {
    let cfg = c.load()?;
    let profile = Profile::of(&cfg.urn_model()?);
    let json = to_json(&profile);
    print!("{json}");
    emit(&c.out, "profile.json", &json)?;
    Ok(None)
}

fn simulate(c: &Common, full: bool) -> Result<Option<u64>, Failure> {
    let cfg = c.load()?;
    let model = cfg.urn_model()?;
    let recording = if full {
        Recording::Full
    } else {
        let mut marks = vec![0, cfg.horizon];
        marks.extend(&cfg.checkpoints);
        Recording::Checkpoints(marks)
    };
    let traj = model.run(cfg.initial(), cfg.horizon, cfg.seed, recording)?;
    let csv = if full {
        traj.full_csv()?
    } else {
        traj.checkpoint_csv()
    };
    emit(&c.out, "trajectory.csv", &csv)?;
    Ok(Some(cfg.seed))
}

fn oracle(c: &Common) -> Result<Option<u64>, Failure> {
    let cfg = c.load()?;
    let model = cfg.urn_model()?;
    let sd = exact_distribution(&model, cfg.w0, cfg.b0, cfg.horizon, budget(&cfg)?)?;
    emit(&c.out, "distribution.csv", &sd.to_csv())?;
    emit(&c.out, "moments.json", &to_json(&exact_moments(&sd)))?;
    Ok(None)
}

fn diagnose(c: &Common) -> Result<Option<u64>, Failure> {
    let cfg = c.load()?;
    let model = cfg.urn_model()?;
    let traj = model.run(cfg.initial(), cfg.horizon, cfg.seed, Recording::Full)?;
    let sa = decompose(&traj, &ModelMoments::of(&model), c.form())?;
    let renlund = renlund_conditions(&traj, &model, c.form())?;
    emit(&c.out, "sa.csv", &sa.to_csv())?;
    emit(&c.out, "renlund.json", &to_json(&renlund))?;
    Ok(Some(cfg.seed))
}

fn experiment(c: &Common) -> Result<Option<u64>, Failure> {
    let cfg = c.load()?;
    let exp = cfg.experiment()?;
    let report = urnlab::harness::run_experiment(&exp, cfg.workers)?;
    emit(&c.out, "report.json", &(report.to_json() + "\n"))?;
    emit(&c.out, "report.csv", &report.to_csv())?;
    Ok(Some(cfg.seed))
}

fn verify(c: &Common, only: Option<&str>) -> Result<Option<u64>, Failure> {
    let ctx = SuiteContext::new(c.form(), c.workers);
    let verdicts = run_suite(&ctx, only);
    if verdicts.is_empty() {
        return Err(Failure::Config(format!(
            "only: no criterion matches {:?}",
            only.unwrap_or("")
        )));
    }
    for v in &verdicts {
        print!("{v}");
    }
    let failed = verdicts.iter().filter(|v| !v.pass()).count();
    println!(
        "{} of {} criteria passed",
        verdicts.len() - failed,
        verdicts.len()
    );
    emit(&c.out, "verdicts.json", &to_json(&verdicts))?;
    if failed > 0 {
        Err(Failure::Acceptance)
    } else {
        Ok(None)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, common, result) = match &cli.command {
        Command::Theory(c) => ("theory", c, theory(c)),
        Command::Simulate { common, full } => ("simulate", common, simulate(common, *full)),
        Command::Oracle(c) => ("oracle", c, oracle(c)),
        Command::Diagnose(c) => ("diagnose", c, diagnose(c)),
        Command::Experiment(c) => ("experiment", c, experiment(c)),
        Command::Verify { common, only } => ("verify", common, verify(common, only.as_deref())),
    };
    let (code, seed) = match result {
        Ok(seed) => (0, seed),
        Err(f) => {
            match &f {
                Failure::Config(msg) => eprintln!("config error: {msg}"),
                Failure::Runtime(msg) => eprintln!("runtime error: {msg}"),
                Failure::Acceptance => eprintln!("acceptance failed"),
            }
            (f.code(), common.seed)
        }
    };
    let manifest = RunManifest {
        subcommand: name,
        config: common.config.as_deref(),
        out: &common.out,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        duration_secs: start.elapsed().as_secs_f64(),
        exit_code: code,
    };
    if let Err(e) = write_atomic(&common.out.join("manifest.json"), &to_json(&manifest)) {
        eprintln!("runtime error: {e:#}");
        return ExitCode::from(if code == 0 { 3 } else { code });
    }
    ExitCode::from(code)
}

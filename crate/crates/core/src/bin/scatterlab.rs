//! Command-line front end: one subcommand per experiment kind.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use filament_scatter::harness::{exit_code, run_experiment, Config, ExperimentConfig, Kind};

#[derive(Parser)]
#[command(
    name = "scatterlab",
    version,
    about = "Scattering laboratory for perturbed self-similar vortex filaments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// INI-style experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    /// directory for CSV series, report.json and manifest.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// seed for randomized data families (overrides data.seed)
    #[arg(long)]
    seed: Option<u64>,
    /// suppress the per-check summary on stdout
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    LinearEvolve(Common),
    LinearScatter(Common),
    NonlinearEvolve(Common),
    NonlinearScatter(Common),
    Modes(Common),
    /// linear or nonlinear wave operator with a round-trip check
    WaveOp {
        #[arg(value_parser = ["linear", "nonlinear"])]
        which: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    Curve(Common),
    CornerAngle(Common),
    Sweep(Common),
}

fn main() -> ExitCode {
    // usage errors exit 1: clap's default 2 is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let (kind, common, which) = match cli.command {
        Command::LinearEvolve(c) => (Kind::LinearEvolve, c, None),
        Command::LinearScatter(c) => (Kind::LinearScatter, c, None),
        Command::NonlinearEvolve(c) => (Kind::NonlinearEvolve, c, None),
        Command::NonlinearScatter(c) => (Kind::NonlinearScatter, c, None),
        Command::Modes(c) => (Kind::Modes, c, None),
        Command::WaveOp { which, common } => (Kind::WaveOp, common, which),
        Command::Curve(c) => (Kind::Curve, c, None),
        Command::CornerAngle(c) => (Kind::CornerAngle, c, None),
        Command::Sweep(c) => (Kind::Sweep, c, None),
    };
    let outcome = (|| {
        let mut raw = match &common.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(w) = which {
            raw.set("waveop.kind", w);
        }
        let cfg = ExperimentConfig::from_config(raw, Some(kind), common.seed)?;
        run_experiment(&cfg, common.out.as_deref())
    })();
    let code = exit_code(&outcome);
    match &outcome {
        Ok(r) if !common.quiet => {
            for c in &r.checks {
                let v = c.value.map_or("null".to_string(), |v| format!("{v:.6e}"));
                let rel = serde_json::to_value(c.relation).unwrap();
                println!(
                    "{} {} = {v} {} {:?}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    rel.as_str().unwrap(),
                    c.bound
                );
            }
            println!(
                "{}: {}",
                r.experiment,
                if r.passed { "passed" } else { "check failed" }
            );
        }
        Ok(_) => {}
        Err(e) => eprintln!("scatterlab: {e}"),
    }
    ExitCode::from(code as u8)
}

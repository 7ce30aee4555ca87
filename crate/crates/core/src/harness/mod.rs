//! Experiment orchestration: INI configs, initial-data families, checked
//! reports with provenance, and dispatch to the numerical modules.

pub mod config;
pub mod data;
mod experiments;
pub mod report;

use std::path::Path;

use serde::Serialize;

pub use config::Config;
pub use data::{initial_data, DataSpec, Family};
pub use report::{exit_code, Check, Relation, ScatterReport, SCHEMA};

use crate::error::{Error, Result};
use crate::field::Grid;
use crate::params::{Params, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    LinearEvolve,
    LinearScatter,
    NonlinearEvolve,
    NonlinearScatter,
    Modes,
    WaveOp,
    Curve,
    CornerAngle,
    Sweep,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::LinearEvolve,
        Kind::LinearScatter,
        Kind::NonlinearEvolve,
        Kind::NonlinearScatter,
        Kind::Modes,
        Kind::WaveOp,
        Kind::Curve,
        Kind::CornerAngle,
        Kind::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::LinearEvolve => "linear-evolve",
            Kind::LinearScatter => "linear-scatter",
            Kind::NonlinearEvolve => "nonlinear-evolve",
            Kind::NonlinearScatter => "nonlinear-scatter",
            Kind::Modes => "modes",
            Kind::WaveOp => "wave-op",
            Kind::Curve => "curve",
            Kind::CornerAngle => "corner-angle",
            Kind::Sweep => "sweep",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown experiment kind `{s}`")))
    }
}

/// Geometric time ladder `start·ratio^k` up to `end`, with the ratio given
/// as points per octave or per decade.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Ladder {
    pub start: f64,
    pub end: f64,
    pub ratio: f64,
}

impl Ladder {
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn times(&self) -> Vec<f64> {
        crate::fit::geometric_ladder(self.start, self.end, self.ratio())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub params: Params,
    pub grid: Grid,
    pub data: DataSpec,
    pub ladder: Ladder,
    pub seed: u64,
    pub raw: Config,
}

impl ExperimentConfig {
    /// `kind` (from the command line) must agree with the file's
    /// `experiment` key when both are present; `seed` overrides `data.seed`.
    pub fn from_config(
        raw: Config,
        kind: Option<Kind>,
        seed: Option<u64>,
    ) -> Result<ExperimentConfig> {
        let file_kind = raw.get("experiment").map(str::parse::<Kind>).transpose()?;
        let kind = match (kind, file_kind) {
            (Some(k), Some(f)) if k != f => {
                return Err(Error::config(format!(
                    "config is for `{}`, not `{}`",
                    f.name(),
                    k.name()
                )))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::config("no experiment kind given")),
        };
        let params = Params::new(
            raw.f64_or("params.a", 0.5)?,
            raw.f64_or("params.gamma", 0.0)?,
            raw.f64_or("params.delta", 0.1)?,
            Sign::parse(raw.str_or("params.sign", "focusing"))?,
            raw.f64_or("params.t0", 1.0)?,
            raw.f64_or("params.t_max", 1e4)?,
        )?;
        let grid = Grid::new(
            raw.f64_or("grid.half_length", 32.0)?,
            raw.usize_or("grid.n", 256)?,
        )?;
        let seed = match seed {
            Some(s) => s,
            None => raw.parsed_or("data.seed", 0u64)?,
        };
        let data = DataSpec::from_config(&raw, seed)?;
        let ratio = match raw.get("ladder.per_decade") {
            Some(_) => 10f64.powf(1.0 / raw.f64_or("ladder.per_decade", 0.0)?),
            None => 2f64.powf(1.0 / raw.f64_or("ladder.per_octave", 8.0)?),
        };
        let ladder = Ladder {
            start: raw.f64_or("ladder.start", params.t0)?,
            end: raw.f64_or("ladder.end", params.t_max)?,
            ratio,
        };
        if !(ladder.start > 0.0 && ladder.end > ladder.start && ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::config(
                "ladder needs 0 < start < end and a positive point density",
            ));
        }
        Ok(ExperimentConfig {
            kind,
            params,
            grid,
            data,
            ladder,
            seed,
            raw,
        })
    }

    pub fn load(path: &Path, kind: Option<Kind>, seed: Option<u64>) -> Result<ExperimentConfig> {
        ExperimentConfig::from_config(Config::load(path)?, kind, seed)
    }

    pub fn parse(text: &str, kind: Option<Kind>, seed: Option<u64>) -> Result<ExperimentConfig> {
        ExperimentConfig::from_config(Config::parse(text)?, kind, seed)
    }
}

/// Run one experiment; with `out` set, write its CSV series, `report.json`
/// and `manifest.json` there.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ScatterReport> {
    let mut dir = report::OutDir::new(out)?;
    let outcome = experiments::dispatch(cfg, &mut dir)?;
    let passed = outcome.checks.iter().all(|c| c.passed);
    let report = ScatterReport {
        schema: SCHEMA,
        experiment: cfg.kind.name().to_string(),
        config_hash: cfg.raw.hash(),
        seed: cfg.seed,
        crate_version: env!("CARGO_PKG_VERSION"),
        passed,
        checks: outcome.checks,
        metrics: outcome.metrics,
        files: dir.files.clone(),
        unused_config_keys: cfg.raw.unused_keys(),
    };
    dir.finish(&report)?;
    Ok(report)
}

//! Run configuration, experiment orchestration and report files.
//!
//! Every subcommand builds a [`ReportBundle`] holding point estimates, the
//! raw count tables they came from and a list of acceptance checks. Writing
//! the bundle produces `summary.json`, `counts_*.csv` and `trace_*.csv`.

mod experiments;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::devmodel::{DeviceParams, SourceMode};
use crate::error::{Error, Result};
use crate::estim::{write_counts_csv, CountsTable};
use crate::protocol::EventTrace;

pub use experiments::{
    cmd_bell, cmd_check_waveplates, cmd_conversion, cmd_ghz, cmd_heating, cmd_herald, cmd_ion_photon, cmd_ramsey,
    cmd_storage, cmd_teleport, collect_heralds, storage_fidelity_model, HeraldSample, TARGETS,
};

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    IonPhoton,
    Bell,
    Storage,
    Teleport,
    Ghz,
    Heating,
    Ramsey,
    Conversion,
    Herald,
    CheckWaveplates,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::IonPhoton,
        Experiment::Bell,
        Experiment::Storage,
        Experiment::Teleport,
        Experiment::Ghz,
        Experiment::Heating,
        Experiment::Ramsey,
        Experiment::Conversion,
        Experiment::Herald,
        Experiment::CheckWaveplates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::IonPhoton => "ion-photon",
            Experiment::Bell => "bell",
            Experiment::Storage => "storage",
            Experiment::Teleport => "teleport",
            Experiment::Ghz => "ghz",
            Experiment::Heating => "heating",
            Experiment::Ramsey => "ramsey",
            Experiment::Conversion => "conversion",
            Experiment::Herald => "herald",
            Experiment::CheckWaveplates => "check-waveplates",
        }
    }

    /// Shots per setting when the config leaves `shots` unset.
    pub fn default_shots(self) -> u64 {
        match self {
            Experiment::Ramsey => 1_000,
            _ => 100_000,
        }
    }

    /// Trials when the config leaves `trials` unset: successful trials per
    /// setting for the heralded experiments, raw trials for `herald`.
    pub fn default_trials(self) -> u64 {
        match self {
            Experiment::Ghz => 2_200,
            Experiment::Teleport => 1_400,
            Experiment::Herald => 100_000,
            _ => 0,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config {
                path: "experiment".into(),
                reason: format!("unknown experiment `{s}`"),
            })
    }
}

/// Parsed run configuration. Every key is optional; device keys default to
/// the calibrated values, and `shots`/`trials` to per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceParams,
    pub experiment: Option<Experiment>,
    pub shots: Option<u64>,
    pub trials: Option<u64>,
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Overrides `device.source_mode`.
    pub source_mode: Option<SourceMode>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.device.validate().map_err(|e| match e {
            Error::Parameter { name, detail } => Error::Config {
                path: format!("device.{name}"),
                reason: detail,
            },
            other => other,
        })?;
        for (path, v) in [("shots", self.shots), ("trials", self.trials)] {
            if v == Some(0) {
                return Err(Error::Config {
                    path: path.into(),
                    reason: "must be positive".into(),
                });
            }
        }
        Ok(())
    }

    /// Device parameters with the top-level source override applied.
    pub fn params(&self) -> DeviceParams {
        let mut p = self.device.clone();
        if let Some(mode) = self.source_mode {
            p.source_mode = mode;
        }
        p
    }

    pub fn shots_for(&self, e: Experiment) -> u64 {
        self.shots.unwrap_or(e.default_shots())
    }

    pub fn trials_for(&self, e: Experiment) -> u64 {
        self.trials.unwrap_or(e.default_trials())
    }
}

/// Parses a config from JSON text; schema errors carry the offending key path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        reason: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}

/// A point estimate with an optional standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

/// One acceptance comparison `|value − target| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_owned(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        }
    }

    /// Passes when `value ≥ target`; `tolerance` is unused and reported as 0.
    pub fn at_least(name: &str, value: f64, target: f64) -> Self {
        Check {
            name: name.to_owned(),
            value,
            target,
            tolerance: 0.0,
            pass: value >= target,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        if self.tolerance > 0.0 {
            let tol = if self.tolerance < 1e-4 {
                format!("{:e}", self.tolerance)
            } else {
                self.tolerance.to_string()
            };
            write!(f, "{verdict} {}: {:.6} (target {} ± {tol})", self.name, self.value, self.target)
        } else {
            write!(f, "{verdict} {}: {:.6} (target ≥ {})", self.name, self.value, self.target)
        }
    }
}

/// Everything one subcommand produced.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub experiment: Option<Experiment>,
    pub estimates: BTreeMap<String, Estimate>,
    /// Extra structured detail for `summary.json`.
    pub details: BTreeMap<String, serde_json::Value>,
    /// Count tables keyed by file stem: `counts_<stem>.csv`.
    pub counts: BTreeMap<String, Vec<CountsTable>>,
    /// Event traces keyed by file stem: `trace_<stem>.csv`.
    pub traces: BTreeMap<String, EventTrace>,
    /// Extra CSV text keyed by file stem: `trace_<stem>.csv`.
    pub trace_tables: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

impl ReportBundle {
    pub fn new(e: Experiment) -> Self {
        ReportBundle {
            experiment: Some(e),
            ..Default::default()
        }
    }

    pub fn estimate(&mut self, name: &str, value: f64, stderr: Option<f64>) {
        self.estimates.insert(name.to_owned(), Estimate { value, stderr });
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.estimates.get(name).map(|e| e.value)
    }

    pub fn detail(&mut self, name: &str, v: impl Serialize) -> Result<()> {
        self.details.insert(name.to_owned(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    /// One line: overall verdict and the experiment name.
    pub fn verdict_line(&self) -> String {
        let name = self.experiment.map(|e| e.name()).unwrap_or("run");
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            format!("PASS {name} ({} checks)", self.checks.len())
        } else {
            format!("FAIL {name} ({} of {} checks failed: {})", failed.len(), self.checks.len(), failed.join(", "))
        }
    }

    /// The JSON summary: config snapshot, seed, code version, estimates,
    /// details and checks.
    pub fn summary(&self, config: &RunConfig) -> Result<serde_json::Value> {
        let mut files: Vec<String> = self.counts.keys().map(|k| format!("counts_{k}.csv")).collect();
        files.extend(self.traces.keys().chain(self.trace_tables.keys()).map(|k| format!("trace_{k}.csv")));
        Ok(serde_json::json!({
            "experiment": self.experiment.map(|e| e.name()),
            "verdict": if self.passed() { "PASS" } else { "FAIL" },
            "master_seed": config.master_seed,
            "code_version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "estimates": self.estimates,
            "details": self.details,
            "checks": self.checks,
            "tables": files,
        }))
    }

    pub fn write(&self, dir: &Path, config: &RunConfig) -> Result<()> {
        fs::create_dir_all(dir)?;
        let summary = self.summary(config)?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        for (stem, tables) in &self.counts {
            let f = BufWriter::new(File::create(dir.join(format!("counts_{stem}.csv")))?);
            write_counts_csv(f, tables)?;
        }
        for (stem, trace) in &self.traces {
            let f = BufWriter::new(File::create(dir.join(format!("trace_{stem}.csv")))?);
            trace.write_csv(f)?;
        }
        for (stem, text) in &self.trace_tables {
            fs::write(dir.join(format!("trace_{stem}.csv")), text)?;
        }
        Ok(())
    }
}

/// Runs one experiment; errors name the experiment as their stage.
pub fn run_experiment(e: Experiment, config: &RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let out = match e {
        Experiment::IonPhoton => cmd_ion_photon(config),
        Experiment::Bell => cmd_bell(config),
        Experiment::Storage => cmd_storage(config),
        Experiment::Teleport => cmd_teleport(config),
        Experiment::Ghz => cmd_ghz(config),
        Experiment::Heating => cmd_heating(config),
        Experiment::Ramsey => cmd_ramsey(config),
        Experiment::Conversion => cmd_conversion(config),
        Experiment::Herald => cmd_herald(config),
        Experiment::CheckWaveplates => cmd_check_waveplates(config),
    };
    out.map_err(|err| err.at_stage(e.name()))
}

//! Configuration, dispatch, and report output for command-line runs.

pub mod quantities;
pub mod record;
pub mod verify;

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgon::find_witness;
use crate::numerics::montecarlo::Experiment;
use crate::sampling::{count_kgons, Seed};

pub use quantities::{lookup, Quantity, QUANTITIES};
pub use record::{Method, Report, ResultRecord, ARTIFACT_VERSION, CSV_COLUMNS, SCHEMA_VERSION, Z_GATE};

/// Environment variable read for the seed when none is given.
pub const SEED_ENV: &str = "BROKENSTICK_SEED";
pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Exact,
    Estimate,
    Verify,
    Witness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Estimate => "estimate",
            Command::Verify => "verify",
            Command::Witness => "witness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::invalid("format", format!("expected json or csv, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Params {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<u64>,
    pub a0: Option<f64>,
    pub sides: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub quantity: Option<String>,
    pub params: Params,
    pub samples: u64,
    pub seed: Seed,
    pub workers: usize,
    pub format: Format,
    /// Standard output when absent.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            quantity: None,
            params: Params::default(),
            samples: DEFAULT_SAMPLES,
            seed: Seed(DEFAULT_SEED),
            workers: 1,
            format: Format::Json,
            out: None,
        }
    }

    pub fn experiment(&self) -> Experiment {
        Experiment::new(self.seed, self.samples).with_workers(self.workers)
    }
}

fn witness_records(p: &Params) -> Result<Vec<ResultRecord>> {
    let k = p.k.ok_or_else(|| Error::invalid("k", "witness needs --k"))?;
    let n = p.n.ok_or_else(|| Error::invalid("n", "witness needs --n"))?;
    let m = p.m.ok_or_else(|| Error::invalid("m", "witness needs --m"))?;
    let pieces = find_witness(k, n, m)?;
    let count = count_kgons(pieces.lengths(), k)?;
    let list: Vec<String> = pieces.lengths().iter().map(|x| x.to_string()).collect();
    Ok(vec![ResultRecord::within(
        "witness",
        &format!("k={k};n={n};m={m}"),
        Method::Construction,
        count as f64,
        m as f64,
        0.0,
    )
    .note(list.join(" "))])
}

/// Executes one configured command and assembles its report.
pub fn run(config: &RunConfig) -> Result<Report> {
    let quantity = || {
        config
            .quantity
            .as_deref()
            .ok_or_else(|| Error::invalid("quantity", format!("{} needs a quantity", config.command.name())))
    };
    let records = match config.command {
        Command::Exact => quantities::exact(quantity()?, &config.params)?,
        Command::Estimate => quantities::estimate(quantity()?, &config.params, &config.experiment())?,
        Command::Verify => verify::verify(&config.experiment())?,
        Command::Witness => witness_records(&config.params)?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.to_string(),
        command: config.command.name().to_string(),
        quantity: config.quantity.clone(),
        seed: config.seed,
        samples: config.samples,
        workers: config.workers,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(command: Command, quantity: &str) -> RunConfig {
        let mut c = RunConfig::new(command);
        c.quantity = Some(quantity.to_string());
        c.samples = 20_000;
        c
    }

    #[test]
    fn exact_p_triangle() {
        let r = run(&config(Command::Exact, "p-triangle")).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].value, 0.25);
        assert_eq!(r.records[0].reference, Some(0.25));
        assert!(r.all_pass());
    }

    #[test]
    fn every_registered_quantity_runs() {
        let mut p = Params {
            k: Some(3),
            n: Some(4),
            m: Some(1),
            a0: Some(0.02),
            sides: None,
        };
        for q in QUANTITIES {
            p.sides = match q.id {
                "heron-area" => Some(vec![0.4, 0.4, 0.2]),
                "brahmagupta-area" => Some(vec![0.1, 0.2, 0.3, 0.35]),
                _ => Some(vec![0.2, 0.3, 0.25, 0.25]),
            };
            for (enabled, command) in [(q.exact, Command::Exact), (q.estimate, Command::Estimate)] {
                let mut c = config(command, q.id);
                c.samples = 2000;
                c.params = p.clone();
                let result = run(&c);
                if enabled {
                    let report = result.unwrap_or_else(|e| panic!("{} {}: {e}", command.name(), q.id));
                    assert!(!report.records.is_empty(), "{}", q.id);
                } else {
                    assert!(result.is_err(), "{} should reject {}", q.id, command.name());
                }
            }
        }
    }

    #[test]
    fn unknown_quantity() {
        assert!(matches!(
            run(&config(Command::Estimate, "p-square")),
            Err(Error::UnknownQuantity(_))
        ));
        assert!(run(&RunConfig::new(Command::Exact)).is_err());
    }

    #[test]
    fn missing_parameter_names_it() {
        let err = run(&config(Command::Estimate, "p-kgon")).unwrap_err();
        assert!(err.to_string().contains("--k"), "{err}");
    }

    #[test]
    fn witness_command() {
        let mut c = RunConfig::new(Command::Witness);
        c.params = Params {
            k: Some(3),
            n: Some(4),
            m: Some(2),
            ..Params::default()
        };
        let r = run(&c).unwrap();
        assert_eq!(r.records[0].value, 2.0);
        assert!(r.all_pass());
    }

    #[test]
    fn estimate_is_deterministic_across_workers() {
        let mut c = config(Command::Estimate, "chords");
        c.params.n = Some(3);
        let a = run(&c).unwrap();
        c.workers = 4;
        let b = run(&c).unwrap();
        assert_eq!(a.records, b.records);
    }
}

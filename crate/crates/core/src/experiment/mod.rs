//! Experiment drivers behind the command-line tool: error-versus-lambda
//! sweeps, box level diagrams and the per-order cost benchmark. All of them
//! produce plain rows that serialize to CSV.

mod bench;
mod csvio;
mod levels;
mod sweep;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::SystemKind;

pub use bench::{benchmark_order_scaling, BenchConfig, BenchMethod, BenchRow};
pub use csvio::{
    format_float, read_bench_csv, read_levels_csv, read_sweep_csv, write_bench_csv,
    write_levels_csv, write_sweep_csv, BENCH_HEADER, LEVELS_HEADER, SWEEP_HEADER,
};
pub use levels::{run_levels, LevelRow, LevelsConfig};
pub use sweep::{run_sweep, SweepConfig, SweepRow};

/// `|E_ref|` at or below this leaves the relative error blank.
pub const REL_ERROR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Iterative,
    Rspt,
    BwptSc,
    BwptPrior,
    QdIterative,
    QdSecond,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Iterative,
        Method::Rspt,
        Method::BwptSc,
        Method::BwptPrior,
        Method::QdIterative,
        Method::QdSecond,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Iterative => "iterative",
            Method::Rspt => "rspt",
            Method::BwptSc => "bwpt_sc",
            Method::BwptPrior => "bwpt_prior",
            Method::QdIterative => "qd_iterative",
            Method::QdSecond => "qd_second",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Method::Iterative | Method::QdIterative)
    }

    pub fn needs_model_space(self) -> bool {
        matches!(self, Method::QdIterative | Method::QdSecond)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}'")))
    }
}

/// `steps + 1` evenly spaced points from `min` to `max` inclusive.
pub fn lambda_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidInput("lambda bounds must be finite".into()));
    }
    if max < min {
        return Err(Error::InvalidInput(format!(
            "lambda-max {max} is below lambda-min {min}"
        )));
    }
    if steps == 0 {
        return Ok(vec![min]);
    }
    let span = max - min;
    Ok((0..=steps)
        .map(|i| {
            if i == steps {
                max
            } else {
                min + span * (i as f64) / (steps as f64)
            }
        })
        .collect())
}

/// Default `(min, max, steps)`: 0..5 by 0.1 for the oscillator and
/// -10..50 by 0.5 for the box.
pub fn default_lambda_range(system: SystemKind) -> (f64, f64, usize) {
    match system {
        SystemKind::Oscillator => (0.0, 5.0, 50),
        SystemKind::CosineBox => (-10.0, 50.0, 120),
    }
}

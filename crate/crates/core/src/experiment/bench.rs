//! Per-order cost of the iterative variant against the literal
//! Brillouin-Wigner nested sums. Runs on the calling thread only.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{ModelSystem, SystemKind};
use crate::nondegenerate::{bwpt, BwStrategy, IterativeSolver, MAX_BW_ORDER};
use crate::partition::{partition, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    Iterative,
    BwptNaive,
}

impl BenchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchMethod::Iterative => "iterative",
            BenchMethod::BwptNaive => "bwpt_naive",
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iterative" => Ok(BenchMethod::Iterative),
            "bwpt_naive" => Ok(BenchMethod::BwptNaive),
            _ => Err(Error::InvalidInput(format!(
                "unknown benchmark method '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub system: SystemKind,
    pub partition: Scheme,
    pub lambda: f64,
    pub n_basis: usize,
    pub target: usize,
    /// Last iterate timed for the iterative variant.
    pub k_max: usize,
    /// Last order timed for the nested sums; order 5 costs `N^4`.
    pub bw_max_order: usize,
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Oscillator,
            partition: Scheme::EpsteinNesbet,
            lambda: 1.0,
            n_basis: 200,
            target: 0,
            k_max: 20,
            bw_max_order: 4,
            repetitions: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub method: BenchMethod,
    pub order_or_k: usize,
    pub n_basis: usize,
    pub repetitions: usize,
    /// Median time to reach this order or iterate from scratch.
    pub wall_time_ns: u64,
    /// Median time of the last step for the iterative variant, difference
    /// of consecutive medians for the nested sums.
    pub incremental_time_ns: i64,
}

fn median(samples: &mut [u64]) -> u64 {
    samples.sort_unstable();
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

/// Times iterates `2..=k_max` of the iterative variant and orders
/// `2..=bw_max_order` of the nested-sum series after one untimed warmup pass.
pub fn benchmark_order_scaling(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.repetitions < 5 {
        return Err(Error::InvalidInput(format!(
            "at least 5 repetitions are needed, got {}",
            config.repetitions
        )));
    }
    if config.k_max < 2 {
        return Err(Error::InvalidInput("k-max must be at least 2".into()));
    }
    if !(2..=MAX_BW_ORDER).contains(&config.bw_max_order) {
        return Err(Error::InvalidOrder {
            order: config.bw_max_order,
            min: 2,
            max: MAX_BW_ORDER,
        });
    }
    let sys = ModelSystem::build(config.system, config.n_basis, config.lambda)?;
    let p = partition(&sys, config.partition);
    let n = config.target;

    // step_times[r][k - 2] is the time of the step producing E^(k)
    let time_iterative = || -> Result<Vec<u64>> {
        let mut solver = IterativeSolver::new(&p, n)?;
        (2..=config.k_max)
            .map(|_| {
                let start = Instant::now();
                solver.step()?;
                Ok(start.elapsed().as_nanos() as u64)
            })
            .collect()
    };
    let time_bw = |order: usize| -> Result<u64> {
        let start = Instant::now();
        std::hint::black_box(bwpt(&p, n, order, BwStrategy::PriorOrder)?);
        Ok(start.elapsed().as_nanos() as u64)
    };

    time_iterative()?;
    for order in 2..=config.bw_max_order {
        time_bw(order)?;
    }

    let step_times: Vec<Vec<u64>> = (0..config.repetitions)
        .map(|_| time_iterative())
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for k in 2..=config.k_max {
        let i = k - 2;
        let mut steps: Vec<u64> = step_times.iter().map(|r| r[i]).collect();
        let mut totals: Vec<u64> = step_times.iter().map(|r| r[..=i].iter().sum()).collect();
        rows.push(BenchRow {
            method: BenchMethod::Iterative,
            order_or_k: k,
            n_basis: config.n_basis,
            repetitions: config.repetitions,
            wall_time_ns: median(&mut totals),
            incremental_time_ns: median(&mut steps) as i64,
        });
    }

    let mut previous = 0u64;
    for order in 2..=config.bw_max_order {
        let mut samples: Vec<u64> = (0..config.repetitions)
            .map(|_| time_bw(order))
            .collect::<Result<_>>()?;
        let total = median(&mut samples);
        rows.push(BenchRow {
            method: BenchMethod::BwptNaive,
            order_or_k: order,
            n_basis: config.n_basis,
            repetitions: config.repetitions,
            wall_time_ns: total,
            incremental_time_ns: total as i64 - previous as i64,
        });
        previous = total;
    }
    Ok(rows)
}

use std::time::Instant;

use rayon::prelude::*;

use super::{Method, REL_ERROR_FLOOR};
use crate::error::{Error, Result};
use crate::model::{ModelSystem, SystemKind, MIN_BASIS};
use crate::nondegenerate::{
    bwpt_detailed, iterative_variant, rspt, BwStrategy, DEFAULT_K_MAX, DEFAULT_TOL,
};
use crate::partition::{partition, PartitionedSystem, Scheme};
use crate::quasidegenerate::{
    build_model_space, qd_iterate, qd_second_order, select_model_space, DEFAULT_RATIO_THRESHOLD,
};
use crate::reference::reference_energy;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub system: SystemKind,
    pub partition: Scheme,
    pub methods: Vec<Method>,
    /// Order for the series methods, iterate index for the iterative ones.
    pub orders: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub n_basis: usize,
    /// Target state label.
    pub target: usize,
    /// Explicit model space; selected per lambda from the separation
    /// condition when absent.
    pub model_space: Option<Vec<usize>>,
    pub ratio_threshold: f64,
    /// Early-stop tolerance for the iterative methods.
    pub tol: f64,
    /// Largest iterate index accepted in `orders` for the iterative methods.
    pub k_max: usize,
}

impl SweepConfig {
    pub fn new(system: SystemKind) -> Self {
        Self {
            system,
            partition: Scheme::EpsteinNesbet,
            methods: vec![Method::Iterative],
            orders: vec![2],
            lambdas: vec![1.0],
            n_basis: system.default_basis(),
            target: system.ground_label(),
            model_space: None,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            tol: DEFAULT_TOL,
            k_max: DEFAULT_K_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.methods.is_empty() {
            return bad("no methods requested".into());
        }
        if self.orders.is_empty() && self.methods.iter().any(|&m| m != Method::QdSecond) {
            return bad("no orders requested".into());
        }
        if self.orders.contains(&0) {
            return bad("orders start at 1".into());
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !l.is_finite()) {
            return bad("lambda grid must be nonempty and finite".into());
        }
        if self.n_basis < MIN_BASIS {
            return Err(Error::BasisTooSmall {
                n_basis: self.n_basis,
                min: MIN_BASIS,
            });
        }
        let first = self.system.first_label();
        let last = first + self.n_basis - 1;
        if !(first..=last).contains(&self.target) {
            return Err(Error::StateOutOfRange {
                label: self.target,
                first,
                last,
            });
        }
        if let Some(ms) = &self.model_space {
            if !ms.contains(&self.target) {
                return Err(Error::TargetNotInModelSpace {
                    target: self.target,
                });
            }
            if let Some(&l) = ms.iter().find(|&&l| !(first..=last).contains(&l)) {
                return Err(Error::StateOutOfRange {
                    label: l,
                    first,
                    last,
                });
            }
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return bad(format!("tolerance must be nonnegative, got {}", self.tol));
        }
        if self.methods.iter().any(|m| m.is_iterative()) {
            if let Some(&k) = self.orders.iter().find(|&&k| k > self.k_max) {
                return bad(format!("iterate {k} exceeds k-max {}", self.k_max));
            }
        }
        if self.ratio_threshold.is_nan() || self.ratio_threshold <= 1.0 {
            return bad("model-space ratio threshold must exceed 1".into());
        }
        Ok(())
    }
}

/// One record of a sweep. Fields that do not apply are `None` and are
/// written as empty CSV cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub system: SystemKind,
    pub partition: Scheme,
    pub method: Method,
    pub order_or_k: usize,
    pub energy: Option<f64>,
    pub reference: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_ns: Option<u64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn new(config: &SweepConfig, lambda: f64, method: Method, order: usize) -> Self {
        Self {
            lambda,
            system: config.system,
            partition: config.partition,
            method,
            order_or_k: order,
            energy: None,
            reference: None,
            abs_error: None,
            rel_error: None,
            iterations: None,
            wall_time_ns: None,
            error: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// Same row with the timing field cleared, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ns: None,
            ..self.clone()
        }
    }
}

/// Runs every (lambda, method, order) combination. Solver failures land in
/// the row's `error` field; only an invalid configuration is an `Err`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let rows: Vec<Vec<SweepRow>> = config
        .lambdas
        .par_iter()
        .map(|&lambda| sweep_point(config, lambda))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn jobs(config: &SweepConfig) -> Vec<(Method, usize)> {
    let mut jobs = Vec::new();
    for &method in &config.methods {
        if method == Method::QdSecond {
            jobs.push((method, 2));
        } else {
            jobs.extend(config.orders.iter().map(|&k| (method, k)));
        }
    }
    jobs
}

fn sweep_point(config: &SweepConfig, lambda: f64) -> Vec<SweepRow> {
    let jobs = jobs(config);
    let sys = match ModelSystem::build(config.system, config.n_basis, lambda) {
        Ok(sys) => sys,
        Err(e) => {
            return jobs
                .into_iter()
                .map(|(m, k)| {
                    let mut row = SweepRow::new(config, lambda, m, k);
                    row.error = Some(e.to_string());
                    row
                })
                .collect();
        }
    };
    let p = partition(&sys, config.partition);
    let reference = reference_energy(&sys, config.target);

    jobs.into_iter()
        .map(|(method, order)| {
            let mut row = SweepRow::new(config, lambda, method, order);
            let start = Instant::now();
            let outcome = solve(config, &p, method, order);
            let elapsed = start.elapsed().as_nanos() as u64;
            match outcome {
                Ok((energy, iterations)) => {
                    row.energy = Some(energy);
                    row.iterations = iterations;
                    row.wall_time_ns = Some(elapsed);
                    match &reference {
                        Ok(r) => {
                            let abs = (energy - r).abs();
                            row.reference = Some(*r);
                            row.abs_error = Some(abs);
                            row.rel_error = (r.abs() > REL_ERROR_FLOOR).then(|| abs / r.abs());
                        }
                        Err(e) => row.error = Some(format!("reference: {e}")),
                    }
                }
                Err(e) => {
                    row.error = Some(e.to_string());
                    row.reference = reference.as_ref().ok().copied();
                }
            }
            row
        })
        .collect()
}

fn solve(
    config: &SweepConfig,
    p: &PartitionedSystem,
    method: Method,
    order: usize,
) -> Result<(f64, Option<usize>)> {
    let n = config.target;
    match method {
        Method::Iterative => {
            let trace = iterative_variant(p, n, order, config.tol)?;
            let e = trace.energy(order).unwrap_or_else(|| trace.final_energy());
            Ok((e, Some(trace.iterations_used)))
        }
        Method::Rspt => Ok((rspt(p, n, order)?.total(), None)),
        Method::BwptSc => {
            let s = bwpt_detailed(p, n, order, BwStrategy::SelfConsistent)?;
            Ok((s.energy, Some(s.evaluations)))
        }
        Method::BwptPrior => Ok((
            bwpt_detailed(p, n, order, BwStrategy::PriorOrder)?.energy,
            None,
        )),
        Method::QdIterative | Method::QdSecond => {
            let indices = match &config.model_space {
                Some(ms) => ms.clone(),
                None => select_model_space(p, n, config.ratio_threshold)?,
            };
            let setup = build_model_space(p, &indices, n)?;
            if method == Method::QdSecond {
                return Ok((qd_second_order(&setup)?, None));
            }
            let trace = qd_iterate(&setup, order, config.tol)?;
            let e = trace.energy(order).unwrap_or_else(|| trace.final_energy());
            Ok((e, Some(trace.iterations_used)))
        }
    }
}

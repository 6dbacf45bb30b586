use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::DEFAULT_BOX_BASIS;
use crate::reference::box_levels;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelsConfig {
    pub lambdas: Vec<f64>,
    /// Number of lowest levels reported per lambda.
    pub levels: usize,
    pub n_basis: usize,
}

impl Default for LevelsConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.0],
            levels: 4,
            n_basis: 2 * DEFAULT_BOX_BASIS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRow {
    pub lambda: f64,
    /// Box state label, starting at 1.
    pub n: usize,
    pub energy: f64,
}

/// Lowest box levels for every lambda on the grid, by dense diagonalization.
pub fn run_levels(config: &LevelsConfig) -> Result<Vec<LevelRow>> {
    if config.levels == 0 {
        return Err(Error::InvalidInput("level count must be positive".into()));
    }
    if config.lambdas.is_empty() || config.lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidInput(
            "lambda grid must be nonempty and finite".into(),
        ));
    }
    let per_lambda: Vec<Vec<LevelRow>> = config
        .lambdas
        .par_iter()
        .map(|&lambda| {
            let levels = box_levels(config.n_basis, lambda, config.levels)?;
            Ok(levels
                .into_iter()
                .enumerate()
                .map(|(i, energy)| LevelRow {
                    lambda,
                    n: i + 1,
                    energy,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_lambda.into_iter().flatten().collect())
}

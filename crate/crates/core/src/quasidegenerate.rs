//! Quasi-degenerate extension: diagonalize a small model space exactly, then
//! iterate against the complement.
//!
//! The model-space block of `D + W` is diagonalized to give correct
//! zeroth-order states `phi_i = sum_j rotation[j][i] psi_j` with energies
//! `script_e[i]`. Couplings to the complement are rotated into
//! `vbar[i][l] = sum_j rotation[j][i] W_{j,l}`. After the rotation there is
//! no direct mixing inside the model space, and the exact relations become
//!
//! ```text
//! E        = script_e[n] + sum_l vbar[n][l] c_l
//! c_l      = (vbar[n][l] + sum_{j != n} vbar[j][l] cbar_j + sum_m W_lm c_m) / (E - D_l)
//! cbar_j   = sum_m vbar[j][m] c_m / (E - script_e[j])
//! ```
//!
//! iterated with `c^(0) = 0`, `cbar^(0) = cbar^(1) = 0`, `E^(1) = script_e[n]`.
//!
//! `W` already carries the coupling strength, so no extra power of lambda
//! is applied anywhere in this module.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::nondegenerate::residual_of_vector;
use crate::partition::{PartitionedSystem, Scheme};
use crate::reference::symmetric_eigen;

pub const DEFAULT_RATIO_THRESHOLD: f64 = 10.0;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct QdSetup<'a> {
    system: &'a PartitionedSystem,
    /// Model-space labels, ascending.
    pub indices: Vec<usize>,
    /// Columns are the correct zeroth-order states in the model-space basis.
    pub rotation: Matrix,
    pub script_e: Vec<f64>,
    /// `d x (N - d)` rotated couplings to the complement.
    pub vbar: Matrix,
    /// Complement labels, ascending.
    pub complement: Vec<usize>,
    /// Column of `rotation` that continues the target state.
    pub n_local: usize,
    pub target: usize,
    positions: Vec<usize>,
    complement_positions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QdIterationTrace {
    /// `energies[k - 1]` is `E^(k)`.
    pub energies: Vec<f64>,
    /// `c'_ln` over the complement, in `complement` order.
    pub outer_coeffs: Vec<f64>,
    /// `cbar'_jn` over the model space; the `n_local` slot is 0.
    pub inner_coeffs: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    pub residual_norm: f64,
}

impl QdIterationTrace {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trace holds E^(1)")
    }

    /// `E^(k)`, or the converged energy when the iteration stopped before `k`.
    pub fn energy(&self, k: usize) -> Option<f64> {
        match k.checked_sub(1).and_then(|i| self.energies.get(i)) {
            Some(&e) => Some(e),
            None if k >= 1 && self.converged => Some(self.final_energy()),
            None => None,
        }
    }
}

pub fn build_model_space<'a>(
    p: &'a PartitionedSystem,
    indices: &[usize],
    target: usize,
) -> Result<QdSetup<'a>> {
    if p.scheme() != Scheme::EpsteinNesbet {
        return Err(Error::UnsupportedScheme);
    }
    let mut labels = indices.to_vec();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != indices.len() {
        return Err(Error::InvalidModelSpace("duplicate state".into()));
    }
    if labels.is_empty() {
        return Err(Error::InvalidModelSpace("empty".into()));
    }
    if labels.len() >= p.n_basis() {
        return Err(Error::InvalidModelSpace(
            "model space must leave a nonempty complement".into(),
        ));
    }
    let positions = labels
        .iter()
        .map(|&l| p.position(l))
        .collect::<Result<Vec<_>>>()?;
    let target_local = labels
        .iter()
        .position(|&l| l == target)
        .ok_or(Error::TargetNotInModelSpace { target })?;

    let d = labels.len();
    let w = p.w();
    let block = Matrix::from_fn(d, d, |i, j| {
        if i == j {
            p.d()[positions[i]]
        } else {
            w[(positions[i], positions[j])]
        }
    });
    let spectrum = symmetric_eigen(&block, true)?;
    let mut rotation = spectrum.eigenvectors.expect("vectors requested");
    let script_e = spectrum.eigenvalues;

    // sign convention: nonnegative weight on each column's dominant state
    for col in 0..d {
        let dominant = (0..d)
            .max_by(|&a, &b| {
                rotation[(a, col)]
                    .abs()
                    .total_cmp(&rotation[(b, col)].abs())
            })
            .unwrap();
        if rotation[(dominant, col)] < 0.0 {
            for row in 0..d {
                rotation[(row, col)] = -rotation[(row, col)];
            }
        }
    }

    // the continuing column carries the largest weight on the target state
    let mut ranked: Vec<usize> = (0..d).collect();
    ranked.sort_by(|&a, &b| {
        rotation[(target_local, b)]
            .abs()
            .total_cmp(&rotation[(target_local, a)].abs())
            .then(a.cmp(&b))
    });
    let n_local = ranked[0];
    if d > 1
        && (rotation[(target_local, ranked[0])].abs() - rotation[(target_local, ranked[1])].abs())
            .abs()
            < TIE_TOL
    {
        return Err(Error::TargetAmbiguous { target });
    }

    let complement_positions: Vec<usize> = (0..p.n_basis())
        .filter(|m| !positions.contains(m))
        .collect();
    let complement = complement_positions.iter().map(|&m| p.label(m)).collect();
    let vbar = Matrix::from_fn(d, complement_positions.len(), |i, l| {
        let m = complement_positions[l];
        (0..d)
            .map(|j| rotation[(j, i)] * w[(positions[j], m)])
            .sum()
    });

    Ok(QdSetup {
        system: p,
        indices: labels,
        rotation,
        script_e,
        vbar,
        complement,
        n_local,
        target,
        positions,
        complement_positions,
    })
}

impl QdSetup<'_> {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn system(&self) -> &PartitionedSystem {
        self.system
    }

    /// `rotation^T * block * rotation`, which is diagonal up to round-off.
    pub fn rotated_block(&self) -> Matrix {
        let p = self.system;
        let d = self.dim();
        let block = Matrix::from_fn(d, d, |i, j| {
            if i == j {
                p.d()[self.positions[i]]
            } else {
                p.w()[(self.positions[i], self.positions[j])]
            }
        });
        self.rotation
            .transpose()
            .matmul(&block)
            .matmul(&self.rotation)
    }

    fn complement_inverse(&self, energy: f64) -> Result<Vec<f64>> {
        let p = self.system;
        let eps = p.guard();
        self.complement_positions
            .iter()
            .map(|&m| {
                let gap = energy - p.d()[m];
                if gap.abs() < eps || gap == 0.0 {
                    Err(Error::SmallDenominator {
                        n: self.target,
                        m: p.label(m),
                        gap,
                    })
                } else {
                    Ok(1.0 / gap)
                }
            })
            .collect()
    }

    fn model_inverse(&self, energy: f64) -> Result<Vec<f64>> {
        let eps = self.system.guard();
        (0..self.dim())
            .map(|j| {
                if j == self.n_local {
                    return Ok(0.0);
                }
                let gap = energy - self.script_e[j];
                if gap.abs() < eps || gap == 0.0 {
                    Err(Error::SmallDenominator {
                        n: self.target,
                        m: self.indices[j],
                        gap,
                    })
                } else {
                    Ok(1.0 / gap)
                }
            })
            .collect()
    }

    /// Residual of the full eigen-equation in the original basis, with the
    /// target correct zeroth-order component fixed to 1.
    pub fn residual(&self, outer: &[f64], inner: &[f64], energy: f64) -> f64 {
        let p = self.system;
        let mut c = vec![0.0; p.n_basis()];
        for (a, &pos) in self.positions.iter().enumerate() {
            c[pos] = (0..self.dim())
                .map(|j| {
                    let weight = if j == self.n_local { 1.0 } else { inner[j] };
                    self.rotation[(a, j)] * weight
                })
                .sum();
        }
        for (l, &pos) in self.complement_positions.iter().enumerate() {
            c[pos] = outer[l];
        }
        residual_of_vector(p.d(), p.w(), &c, energy)
    }
}

/// Second-order energy `script_e[n] + sum_l vbar[n][l]^2 / (script_e[n] - D_l)`.
pub fn qd_second_order(setup: &QdSetup) -> Result<f64> {
    let e = setup.script_e[setup.n_local];
    let inv = setup.complement_inverse(e)?;
    let row = setup.vbar.row(setup.n_local);
    Ok(e + row.iter().zip(&inv).map(|(v, i)| v * v * i).sum::<f64>())
}

pub fn qd_iterate(setup: &QdSetup, k_max: usize, tol: f64) -> Result<QdIterationTrace> {
    let p = setup.system;
    let w = p.w();
    let nl = setup.n_local;
    let d = setup.dim();
    let nc = setup.complement_positions.len();
    let base = setup.script_e[nl];
    let vbar_n = setup.vbar.row(nl);

    // coupling block restricted to the complement
    let w_cc = Matrix::from_fn(nc, nc, |l, m| {
        w[(setup.complement_positions[l], setup.complement_positions[m])]
    });

    let mut outer = vec![0.0; nc];
    let mut inner = vec![0.0; d];
    let mut next_outer = vec![0.0; nc];
    let mut energies = vec![base];
    let mut converged = false;
    let mut k = 1;
    while energies.len() < k_max.max(1) {
        let energy = *energies.last().unwrap();
        let inv_c = setup.complement_inverse(energy)?;
        for l in 0..nc {
            let mut num = vbar_n[l] + dot(w_cc.row(l), &outer);
            for j in (0..d).filter(|&j| j != nl) {
                num += setup.vbar[(j, l)] * inner[j];
            }
            next_outer[l] = num * inv_c[l];
        }
        // the inner update uses the previous outer coefficients; the first
        // one is pinned to zero
        let next_inner: Vec<f64> = if k == 1 {
            vec![0.0; d]
        } else {
            let inv_m = setup.model_inverse(energy)?;
            (0..d)
                .map(|j| {
                    if j == nl {
                        0.0
                    } else {
                        dot(setup.vbar.row(j), &outer) * inv_m[j]
                    }
                })
                .collect()
        };
        std::mem::swap(&mut outer, &mut next_outer);
        inner = next_inner;
        let updated = base + dot(vbar_n, &outer);
        energies.push(updated);
        k += 1;
        if (updated - energy).abs() < tol {
            converged = true;
            break;
        }
    }
    let residual_norm = setup.residual(&outer, &inner, *energies.last().unwrap());
    Ok(QdIterationTrace {
        iterations_used: energies.len() - 1,
        energies,
        outer_coeffs: outer,
        inner_coeffs: inner,
        converged,
        residual_norm,
    })
}

/// `{n}` together with every state `m` where `|D_m - D_n| < threshold |W_nm|`.
pub fn select_model_space(
    p: &PartitionedSystem,
    n: usize,
    ratio_threshold: f64,
) -> Result<Vec<usize>> {
    if ratio_threshold.is_nan() || ratio_threshold <= 1.0 {
        return Err(Error::InvalidInput(format!(
            "ratio threshold must exceed 1, got {ratio_threshold}"
        )));
    }
    let pos = p.position(n)?;
    let dn = p.d()[pos];
    Ok((0..p.n_basis())
        .filter(|&m| m == pos || (p.d()[m] - dn).abs() < ratio_threshold * p.w()[(pos, m)].abs())
        .map(|m| p.label(m))
        .collect())
}

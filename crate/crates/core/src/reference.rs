//! Ground-truth energies: the closed-form perturbed oscillator and a dense
//! cyclic Jacobi eigensolver for truncated Hamiltonians.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{build_cosine_box, ModelSystem, SystemKind};

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    ClosedForm,
    DenseDiag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: Option<Matrix>,
    pub source: SpectrumSource,
}

/// `sqrt(1 + lambda) (n + 1/2)`.
pub fn exact_oscillator_energy(n: usize, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= -1.0 {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "oscillator requires lambda > -1",
        });
    }
    Ok((1.0 + lambda).sqrt() * (n as f64 + 0.5))
}

/// Full eigendecomposition of `diag(d) + w`.
pub fn dense_eigensolve(d: &[f64], w: &Matrix) -> Result<ReferenceSpectrum> {
    let mut h = w.clone();
    for (i, x) in d.iter().enumerate() {
        h[(i, i)] += x;
    }
    symmetric_eigen(&h, true)
}

/// Eigenvalues only.
pub fn dense_eigenvalues(h: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigen(h, false).map(|s| s.eigenvalues)
}

/// Cyclic Jacobi with exact zeroing of each rotated pair. Converges when the
/// off-diagonal Frobenius norm falls to machine precision relative to the
/// whole matrix.
pub fn symmetric_eigen(h: &Matrix, want_vectors: bool) -> Result<ReferenceSpectrum> {
    if !h.is_square() {
        return Err(Error::InvalidInput(
            "eigensolver needs a square matrix".into(),
        ));
    }
    if !h.is_symmetric(1e-12) {
        return Err(Error::InvalidInput(
            "eigensolver needs a symmetric matrix".into(),
        ));
    }
    let n = h.rows();
    let mut a = h.clone();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let norm = a.frobenius_norm();
    let target = f64::EPSILON * norm;

    let mut converged = n <= 1 || norm == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::EigenNonConvergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = v.map(|v| Matrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok(ReferenceSpectrum {
        eigenvalues,
        eigenvectors,
        source: SpectrumSource::DenseDiag,
    })
}

/// `A <- J^T A J` for the rotation in the (p, q) plane.
fn rotate(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Reference energy of state `label`. The oscillator uses the closed form;
/// the box is diagonalized in a basis twice the size of `sys`.
pub fn reference_energy(sys: &ModelSystem, label: usize) -> Result<f64> {
    sys.position(label)?;
    match sys.kind() {
        SystemKind::Oscillator => exact_oscillator_energy(label, sys.lambda()),
        SystemKind::CosineBox => {
            let big = build_cosine_box(2 * sys.n_basis(), sys.lambda())?;
            let levels = dense_eigenvalues(&big.hamiltonian())?;
            Ok(levels[label - 1])
        }
    }
}

/// Lowest `count` box levels at `lambda` from a dense diagonalization in
/// `n_basis` states.
pub fn box_levels(n_basis: usize, lambda: f64, count: usize) -> Result<Vec<f64>> {
    if count > n_basis {
        return Err(Error::InvalidInput(format!(
            "requested {count} levels from a basis of {n_basis}"
        )));
    }
    let sys = build_cosine_box(n_basis, lambda)?;
    let mut levels = dense_eigenvalues(&sys.hamiltonian())?;
    levels.truncate(count);
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::model::build_harmonic_oscillator;

    fn max_residual(h: &Matrix, spec: &ReferenceSpectrum) -> f64 {
        let vecs = spec.eigenvectors.as_ref().unwrap();
        (0..h.rows())
            .map(|i| {
                let v = vecs.column(i);
                let hv = h.matvec(&v);
                let r: Vec<f64> = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| a - spec.eigenvalues[i] * b)
                    .collect();
                norm2(&r)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn closed_form_values() {
        assert!(
            (exact_oscillator_energy(0, 1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-8
        );
        assert_eq!(exact_oscillator_energy(0, 0.0).unwrap(), 0.5);
        assert!((exact_oscillator_energy(1, 50.0).unwrap() - 10.712_143).abs() < 1e-6);
        assert!(exact_oscillator_energy(0, -1.0).is_err());
    }

    #[test]
    fn diagonal_input() {
        let s = dense_eigensolve(&[3.0, 1.0, 2.0], &Matrix::zeros(3, 3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let w02 = 2f64.sqrt() / 4.0;
        let w = Matrix::from_rows(&[&[0.0, w02], &[w02, 0.0]]);
        let s = dense_eigensolve(&[0.75, 3.75], &w).unwrap();
        // roots of (0.75 - E)(3.75 - E) = 1/8
        let lo = 2.25 - 2.375f64.sqrt();
        assert!((s.eigenvalues[0] - lo).abs() < 1e-14);
        assert!((s.eigenvalues[1] - (4.5 - lo)).abs() < 1e-14);
        assert!((s.eigenvalues[0] - 0.708_896_5).abs() < 1e-7);
    }

    #[test]
    fn oscillator_lowest_level_matches_closed_form() {
        let sys = build_harmonic_oscillator(80, 1.0).unwrap();
        let s = symmetric_eigen(&sys.hamiltonian(), true).unwrap();
        assert!((s.eigenvalues[0] - 0.5 * 2f64.sqrt()).abs() < 1e-8);
        let h = sys.hamiltonian();
        assert!(max_residual(&h, &s) < 1e-10 * h.frobenius_norm());
    }

    #[test]
    fn oscillator_truncation_error_decreases_with_basis() {
        for lambda in [0.5, 1.0, 5.0] {
            let exact = exact_oscillator_energy(2, lambda).unwrap();
            let errs: Vec<f64> = [40, 80, 160]
                .iter()
                .map(|&n| {
                    let sys = build_harmonic_oscillator(n, lambda).unwrap();
                    (dense_eigenvalues(&sys.hamiltonian()).unwrap()[2] - exact).abs()
                })
                .collect();
            assert!(
                errs[1] <= errs[0] && errs[2] <= errs[1].max(1e-12),
                "{lambda}: {errs:?}"
            );
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let sys = build_cosine_box(40, 17.0).unwrap();
        let h = sys.hamiltonian();
        let ours = dense_eigenvalues(&h).unwrap();
        let na = nalgebra::DMatrix::from_fn(40, 40, |i, j| h[(i, j)]);
        let mut theirs: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn box_reference_values() {
        let sys = build_cosine_box(20, 0.0).unwrap();
        let e = reference_energy(&sys, 1).unwrap();
        assert!((e - 4.934_802_2).abs() < 1e-7);
        let osc = build_harmonic_oscillator(20, 1.0).unwrap();
        assert!(
            (reference_energy(&osc, 0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8
        );
    }

    #[test]
    fn box_gap_ratio_at_lambda_forty() {
        // A 4000-point finite-difference discretization gives
        // (E2 - E1)/(E3 - E1) = 0.248996 here; the pair only becomes
        // "almost degenerate" (< 0.1) past lambda ~ 85.
        let levels = box_levels(120, 40.0, 3).unwrap();
        let ratio = (levels[1] - levels[0]) / (levels[2] - levels[0]);
        assert!((ratio - 0.248_996).abs() < 1e-5, "{ratio}");
        let levels = box_levels(120, 100.0, 3).unwrap();
        assert!((levels[1] - levels[0]) / (levels[2] - levels[0]) < 0.1);
    }

    #[test]
    fn box_reference_is_stable_under_basis_doubling() {
        for lambda in [-10.0, 5.0, 40.0] {
            let a = box_levels(120, lambda, 3).unwrap();
            let b = box_levels(240, lambda, 3).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9, "{lambda}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let h = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(symmetric_eigen(&h, false).is_err());
    }
}

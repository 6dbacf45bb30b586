//! The alternating coefficient/energy iteration.
//!
//! Starting from `c^(0) = 0` and `E^(1) = D_n + W_nn`, each step performs
//!
//! ```text
//! c^(k)_m  = (W_mn + sum_{l != n} W_ml c^(k-1)_l) / (E^(k) - D_m)    m != n
//! E^(k+1)  = D_n + W_nn + sum_{m != n} W_nm c^(k)_m
//! ```
//!
//! which costs one matrix-vector product. The first two energies coincide
//! with the first- and second-order Rayleigh-Schrodinger results.

use crate::error::Result;
use crate::linalg::dot;
use crate::partition::PartitionedSystem;

use super::residual_at;

pub const DEFAULT_K_MAX: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub n: usize,
    /// `energies[k - 1]` is `E^(k)`.
    pub energies: Vec<f64>,
    /// Final `c'_mn` by basis position; the target slot is 0.
    pub coefficients: Vec<f64>,
    /// `||(H - E) c||_2` at the final energy and coefficients, `c_nn = 1`.
    pub residual_norm: f64,
    pub converged: bool,
    /// Number of coefficient/energy updates performed.
    pub iterations_used: usize,
}

impl IterationTrace {
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

/// Step-by-step driver for the iteration.
#[derive(Debug, Clone)]
pub struct IterativeSolver<'a> {
    p: &'a PartitionedSystem,
    pos: usize,
    coeffs: Vec<f64>,
    next: Vec<f64>,
    energies: Vec<f64>,
}

impl<'a> IterativeSolver<'a> {
    pub fn new(p: &'a PartitionedSystem, n: usize) -> Result<Self> {
        let pos = p.position(n)?;
        let nb = p.n_basis();
        Ok(Self {
            p,
            pos,
            coeffs: vec![0.0; nb],
            next: vec![0.0; nb],
            energies: vec![p.first_order_energy(pos)],
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self) -> f64 {
        *self.energies.last().unwrap()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// One coefficient update followed by one energy update. Returns the new
    /// energy.
    pub fn step(&mut self) -> Result<f64> {
        let p = self.p;
        let pos = self.pos;
        let w = p.w();
        let energy = self.energy();
        let inv = p.inverse_denominators(pos, energy)?;
        for m in 0..p.n_basis() {
            self.next[m] = if m == pos {
                0.0
            } else {
                (w[(m, pos)] + dot(w.row(m), &self.coeffs)) * inv[m]
            };
        }
        std::mem::swap(&mut self.coeffs, &mut self.next);
        let updated = p.first_order_energy(pos) + dot(w.row(pos), &self.coeffs);
        self.energies.push(updated);
        Ok(updated)
    }

    pub fn residual(&self) -> f64 {
        residual_at(self.p, self.pos, &self.coeffs, self.energy())
    }

    fn into_trace(self, converged: bool) -> IterationTrace {
        let residual_norm = self.residual();
        IterationTrace {
            n: self.p.label(self.pos),
            iterations_used: self.energies.len() - 1,
            energies: self.energies,
            coefficients: self.coeffs,
            residual_norm,
            converged,
        }
    }
}

/// Runs the iteration until `|E^(k+1) - E^(k)| < tol` or `k_max` energies
/// have been produced. Running out of iterations is reported through
/// `converged = false`, not as an error.
pub fn iterative_variant(
    p: &PartitionedSystem,
    n: usize,
    k_max: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let mut solver = IterativeSolver::new(p, n)?;
    let mut converged = false;
    while solver.energies.len() < k_max.max(1) {
        let before = solver.energy();
        let after = solver.step()?;
        if (after - before).abs() < tol {
            converged = true;
            break;
        }
    }
    Ok(solver.into_trace(converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{build_cosine_box, build_harmonic_oscillator};
    use crate::nondegenerate::rspt;
    use crate::partition::{partition, Scheme};
    use crate::reference::dense_eigenvalues;

    fn oscillator(lambda: f64, n_basis: usize, scheme: Scheme) -> PartitionedSystem {
        partition(&build_harmonic_oscillator(n_basis, lambda).unwrap(), scheme)
    }

    #[test]
    fn second_iterate_is_rs2() {
        let p = oscillator(1.0, 80, Scheme::EpsteinNesbet);
        let t = iterative_variant(&p, 0, 2, 0.0).unwrap();
        assert_eq!(t.energies.len(), 2);
        assert_eq!(t.energies[0], 0.75);
        assert!((t.energies[1] - 0.708_333_333_333_333_3).abs() < 1e-15);
    }

    #[test]
    fn converges_to_lowest_eigenvalue() {
        let p = oscillator(1.0, 80, Scheme::EpsteinNesbet);
        let t = iterative_variant(&p, 0, 100, 1e-12).unwrap();
        assert!(t.converged);
        let exact = dense_eigenvalues(&p.hamiltonian()).unwrap()[0];
        assert!((t.final_energy() - exact).abs() < 1e-10);
        assert!(t.residual_norm < 1e-8);
    }

    #[test]
    fn unperturbed_converges_after_one_step() {
        let sys = build_cosine_box(10, 0.0).unwrap();
        let p = partition(&sys, Scheme::EpsteinNesbet);
        let t = iterative_variant(&p, 2, 50, 1e-12).unwrap();
        assert!(t.converged);
        assert_eq!(t.iterations_used, 1);
        assert!(t.energies.iter().all(|&e| e == sys.energy0(2).unwrap()));
        assert_eq!(t.energy(7), Some(sys.energy0(2).unwrap()));
    }

    #[test]
    fn standard_scheme_first_iterate() {
        let p = oscillator(0.4, 30, Scheme::Standard);
        let t = iterative_variant(&p, 1, 5, 0.0).unwrap();
        assert_eq!(t.energies[0], 1.5 + 0.4 * 0.75);
        assert!(!t.converged);
        assert_eq!(t.energy(6), None);
        // the standard first iterate already carries W_nn into the denominators
        let (d, w) = (p.d(), p.w());
        let second = t.energies[0]
            + (0..30)
                .filter(|&m| m != 1)
                .map(|m| w[(1, m)] * w[(m, 1)] / (t.energies[0] - d[m]))
                .sum::<f64>();
        assert!((t.energies[1] - second).abs() < 1e-13);
        let rs = rspt(&p, 1, 2).unwrap();
        assert!((t.energies[1] - rs.total()).abs() > 1e-6);
    }

    #[test]
    fn rs_consistency_on_the_box() {
        for lambda in [-7.0, 3.0, 25.0] {
            let p = partition(
                &build_cosine_box(40, lambda).unwrap(),
                Scheme::EpsteinNesbet,
            );
            for n in 1..=4 {
                let t = iterative_variant(&p, n, 2, 0.0).unwrap();
                let rs = rspt(&p, n, 2).unwrap();
                assert!((t.energies[1] - rs.total()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn stepping_matches_batch() {
        let p = partition(&build_cosine_box(20, 10.0).unwrap(), Scheme::EpsteinNesbet);
        let mut s = IterativeSolver::new(&p, 1).unwrap();
        for _ in 0..9 {
            s.step().unwrap();
        }
        let t = iterative_variant(&p, 1, 10, 0.0).unwrap();
        assert_eq!(s.energies(), t.energies.as_slice());
    }

    #[test]
    fn collision_with_a_diagonal_is_an_error() {
        use crate::linalg::Matrix;
        // E^(2) = W_01 * W_10 / (0 - D_1) = 1 lands exactly on D_2
        let w = Matrix::from_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let p =
            PartitionedSystem::from_parts(Scheme::EpsteinNesbet, vec![0.0, -1.0, 1.0], w, 1.0, 0)
                .unwrap();
        let t = iterative_variant(&p, 0, 3, 0.0);
        assert!(
            matches!(t, Err(Error::SmallDenominator { n: 0, m: 2, .. })),
            "{t:?}"
        );
    }
}

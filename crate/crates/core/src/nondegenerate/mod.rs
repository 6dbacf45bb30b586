//! Nondegenerate perturbation theory on a partitioned Hamiltonian.
//!
//! Coefficient vectors are full-length and indexed by basis position; the
//! target slot holds 0 and is read as `c'_nn = 1` wherever a full state
//! vector is assembled. State arguments named `n` are quantum-number labels.

mod bwpt;
mod iterative;
mod rspt;

pub use bwpt::{
    bw_series_matvec, bw_series_naive, bwpt, bwpt_detailed, BwSolution, BwStrategy, MAX_BW_ORDER,
};
pub use iterative::{
    iterative_variant, IterationTrace, IterativeSolver, DEFAULT_K_MAX, DEFAULT_TOL,
};
pub use rspt::{rs_coefficient_corrections, rspt, EnergySeries, MAX_RS_ORDER};

use crate::linalg::{norm2, Matrix};
use crate::partition::PartitionedSystem;

/// `||(D + W - E) c||_2` with `c_n` fixed to 1.
pub fn residual(
    p: &PartitionedSystem,
    n: usize,
    coeffs: &[f64],
    energy: f64,
) -> crate::Result<f64> {
    let pos = p.position(n)?;
    Ok(residual_at(p, pos, coeffs, energy))
}

pub(crate) fn residual_at(p: &PartitionedSystem, pos: usize, coeffs: &[f64], energy: f64) -> f64 {
    let mut c = coeffs.to_vec();
    c[pos] = 1.0;
    residual_of_vector(p.d(), p.w(), &c, energy)
}

pub(crate) fn residual_of_vector(d: &[f64], w: &Matrix, c: &[f64], energy: f64) -> f64 {
    let mut r = w.matvec(c);
    for (i, ri) in r.iter_mut().enumerate() {
        *ri += (d[i] - energy) * c[i];
    }
    norm2(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_cosine_box, build_harmonic_oscillator};
    use crate::partition::{partition, Scheme};
    use crate::reference::dense_eigensolve;

    #[test]
    fn exact_eigenpair_has_zero_residual() {
        let sys = build_cosine_box(30, 12.0).unwrap();
        let p = partition(&sys, Scheme::EpsteinNesbet);
        let spec = dense_eigensolve(p.d(), p.w()).unwrap();
        let v = spec.eigenvectors.unwrap().column(0);
        let c: Vec<f64> = v.iter().map(|x| x / v[0]).collect();
        let r = residual(&p, 1, &c, spec.eigenvalues[0]).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn unperturbed_unit_vector() {
        let sys = build_harmonic_oscillator(10, 0.0).unwrap();
        let p = partition(&sys, Scheme::EpsteinNesbet);
        assert_eq!(residual(&p, 3, &[0.0; 10], 3.5).unwrap(), 0.0);
    }

    #[test]
    fn first_order_residual_is_second_order_in_lambda() {
        // with c = c^(1) and E = E^(2), the residual is O(lambda^2)
        let res = |lambda: f64| {
            let sys = build_cosine_box(30, lambda).unwrap();
            let p = partition(&sys, Scheme::EpsteinNesbet);
            let trace = iterative_variant(&p, 1, 2, 0.0).unwrap();
            residual(&p, 1, &trace.coefficients, trace.energies[1]).unwrap()
        };
        let ratio = res(0.02) / res(0.01);
        assert!((2.0..=8.0).contains(&ratio), "{ratio}");
    }
}

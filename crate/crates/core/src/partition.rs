//! Splitting `H = D + W` into a diagonal part and a residual coupling.
//!
//! Under Epstein-Nesbet partitioning `D` carries the whole diagonal
//! `E0_m + lambda V_mm` and `W` is strictly off-diagonal. Under the standard
//! scheme `D = E0` and `W = lambda V` keeps its diagonal. Every solver in the
//! crate works on this (D, W) pair, so the two schemes share code paths.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{label_to_position, ModelSystem, SystemKind};

/// Relative size of the small-denominator guard: `eps = GUARD_SCALE * max|D|`.
pub const GUARD_SCALE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    EpsteinNesbet,
    Standard,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::EpsteinNesbet => "en",
            Scheme::Standard => "standard",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "en" | "epstein_nesbet" => Ok(Scheme::EpsteinNesbet),
            "standard" => Ok(Scheme::Standard),
            other => Err(Error::InvalidInput(format!("unknown partition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedSystem {
    scheme: Scheme,
    kind: Option<SystemKind>,
    first_label: usize,
    d: Vec<f64>,
    w: Matrix,
    lambda: f64,
}

pub fn partition(sys: &ModelSystem, scheme: Scheme) -> PartitionedSystem {
    let lambda = sys.lambda();
    let n = sys.n_basis();
    let v = sys.v();
    let (d, w) = match scheme {
        Scheme::EpsteinNesbet => {
            let d = (0..n).map(|m| sys.e0()[m] + lambda * v[(m, m)]).collect();
            let w = Matrix::from_fn(n, n, |l, m| if l == m { 0.0 } else { lambda * v[(l, m)] });
            (d, w)
        }
        Scheme::Standard => (sys.e0().to_vec(), v.scaled(lambda)),
    };
    PartitionedSystem {
        scheme,
        kind: Some(sys.kind()),
        first_label: sys.first_label(),
        d,
        w,
        lambda,
    }
}

impl PartitionedSystem {
    /// Assembles a partitioned system from raw parts, for problems that do
    /// not come from one of the built-in models.
    pub fn from_parts(
        scheme: Scheme,
        d: Vec<f64>,
        w: Matrix,
        lambda: f64,
        first_label: usize,
    ) -> Result<Self> {
        let n = d.len();
        if n == 0 || w.rows() != n || w.cols() != n {
            return Err(Error::InvalidInput(format!(
                "coupling matrix is {}x{} but diagonal has {n} entries",
                w.rows(),
                w.cols()
            )));
        }
        if !w.is_symmetric(1e-13) {
            return Err(Error::InvalidInput(
                "coupling matrix is not symmetric".into(),
            ));
        }
        if scheme == Scheme::EpsteinNesbet && (0..n).any(|m| w[(m, m)] != 0.0) {
            return Err(Error::InvalidInput(
                "Epstein-Nesbet coupling must have a zero diagonal".into(),
            ));
        }
        Ok(Self {
            scheme,
            kind: None,
            first_label,
            d,
            w,
            lambda,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn kind(&self) -> Option<SystemKind> {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_basis(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn first_label(&self) -> usize {
        self.first_label
    }

    pub fn position(&self, label: usize) -> Result<usize> {
        label_to_position(label, self.first_label, self.n_basis())
    }

    pub fn label(&self, position: usize) -> usize {
        position + self.first_label
    }

    /// First-order energy of the state at `pos`: `D_n + W_nn`.
    pub fn first_order_energy(&self, pos: usize) -> f64 {
        self.d[pos] + self.w[(pos, pos)]
    }

    pub fn guard(&self) -> f64 {
        GUARD_SCALE * self.d.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }

    /// Fails with `SmallDenominator` if `energy` sits within the guard of any
    /// `D_m`, `m != target`. Returns the inverse denominators `1/(E - D_m)`
    /// with a zero in the target slot.
    pub fn inverse_denominators(&self, target: usize, energy: f64) -> Result<Vec<f64>> {
        let eps = self.guard();
        self.d
            .iter()
            .enumerate()
            .map(|(m, &dm)| {
                if m == target {
                    return Ok(0.0);
                }
                let gap = energy - dm;
                if gap.abs() < eps || gap == 0.0 {
                    return Err(Error::SmallDenominator {
                        n: self.label(target),
                        m: self.label(m),
                        gap,
                    });
                }
                Ok(1.0 / gap)
            })
            .collect()
    }

    /// `D + W` as a dense matrix.
    pub fn hamiltonian(&self) -> Matrix {
        let mut h = self.w.clone();
        for (i, d) in self.d.iter().enumerate() {
            h[(i, i)] += d;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_cosine_box, build_harmonic_oscillator};
    use proptest::prelude::*;

    #[test]
    fn epstein_nesbet_oscillator() {
        let sys = build_harmonic_oscillator(10, 1.0).unwrap();
        let p = partition(&sys, Scheme::EpsteinNesbet);
        assert_eq!(p.d()[0], 0.75);
        assert_eq!(p.d()[2], 3.75);
        assert_eq!(p.w()[(0, 0)], 0.0);
        for m in 0..10 {
            assert_eq!(p.d()[m], (m as f64 + 0.5) * 1.5);
        }
    }

    #[test]
    fn standard_oscillator() {
        let sys = build_harmonic_oscillator(10, 1.0).unwrap();
        let p = partition(&sys, Scheme::Standard);
        assert_eq!(p.d()[0], 0.5);
        assert_eq!(p.w()[(0, 0)], 0.25);
        assert_eq!(p.first_order_energy(0), 0.75);
    }

    #[test]
    fn schemes_coincide_at_zero_coupling() {
        for sys in [
            build_harmonic_oscillator(12, 0.0).unwrap(),
            build_cosine_box(12, 0.0).unwrap(),
        ] {
            let en = partition(&sys, Scheme::EpsteinNesbet);
            let st = partition(&sys, Scheme::Standard);
            assert_eq!(en.d(), sys.e0());
            assert_eq!(st.d(), sys.e0());
            assert_eq!(en.w().max_abs(), 0.0);
            assert_eq!(st.w().max_abs(), 0.0);
        }
    }

    #[test]
    fn small_denominator_names_the_pair() {
        let sys = build_cosine_box(6, 1.0).unwrap();
        let p = partition(&sys, Scheme::EpsteinNesbet);
        let err = p.inverse_denominators(0, p.d()[2]).unwrap_err();
        assert_eq!(
            err,
            Error::SmallDenominator {
                n: 1,
                m: 3,
                gap: 0.0
            }
        );
    }

    #[test]
    fn from_parts_rejects_bad_input() {
        let w = Matrix::from_rows(&[&[1.0, 0.5], &[0.5, 0.0]]);
        assert!(PartitionedSystem::from_parts(
            Scheme::EpsteinNesbet,
            vec![0.0, 1.0],
            w.clone(),
            1.0,
            0
        )
        .is_err());
        assert!(PartitionedSystem::from_parts(Scheme::Standard, vec![0.0, 1.0], w, 1.0, 0).is_ok());
        let asym = Matrix::from_rows(&[&[0.0, 0.5], &[0.4, 0.0]]);
        assert!(
            PartitionedSystem::from_parts(Scheme::Standard, vec![0.0, 1.0], asym, 1.0, 0).is_err()
        );
    }

    proptest! {
        #[test]
        fn reconstruction_identity(lambda in -0.9f64..10.0, box_sys in any::<bool>(), en in any::<bool>()) {
            let sys = if box_sys {
                build_cosine_box(16, lambda).unwrap()
            } else {
                build_harmonic_oscillator(16, lambda).unwrap()
            };
            let scheme = if en { Scheme::EpsteinNesbet } else { Scheme::Standard };
            let p = partition(&sys, scheme);
            let h = sys.hamiltonian();
            let rebuilt = p.hamiltonian();
            for l in 0..16 {
                for m in 0..16 {
                    let tol = 1e-13 * h[(l, m)].abs().max(1.0);
                    prop_assert!((rebuilt[(l, m)] - h[(l, m)]).abs() <= tol);
                    prop_assert_eq!(p.w()[(l, m)], p.w()[(m, l)]);
                }
                if en {
                    prop_assert_eq!(p.w()[(l, l)], 0.0);
                } else {
                    prop_assert_eq!(p.d()[l], sys.e0()[l]);
                }
            }
        }
    }
}

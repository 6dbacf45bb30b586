//! Truncated-basis model Hamiltonians.
//!
//! Units are fixed at hbar = mu = omega = L = 1. Two systems are provided:
//!
//! * the harmonic oscillator perturbed by `lambda * x^2 / 2`, states labelled
//!   from 0, whose exact spectrum is `sqrt(1 + lambda) (n + 1/2)`;
//! * the particle in a unit box with walls at `x = +-1/2` perturbed by
//!   `lambda * cos(pi x)`, states labelled from 1.
//!
//! Matrices are stored by basis position (0-based); labels convert through
//! [`SystemKind::first_label`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MIN_BASIS: usize = 4;
pub const DEFAULT_OSCILLATOR_BASIS: usize = 80;
pub const DEFAULT_BOX_BASIS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Oscillator,
    CosineBox,
}

impl SystemKind {
    /// Quantum number of the lowest retained state.
    pub fn first_label(self) -> usize {
        match self {
            SystemKind::Oscillator => 0,
            SystemKind::CosineBox => 1,
        }
    }

    pub fn default_basis(self) -> usize {
        match self {
            SystemKind::Oscillator => DEFAULT_OSCILLATOR_BASIS,
            SystemKind::CosineBox => DEFAULT_BOX_BASIS,
        }
    }

    pub fn ground_label(self) -> usize {
        self.first_label()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Oscillator => "oscillator",
            SystemKind::CosineBox => "box",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oscillator" => Ok(SystemKind::Oscillator),
            "box" | "cosine_box" => Ok(SystemKind::CosineBox),
            other => Err(Error::InvalidInput(format!("unknown system '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSystem {
    kind: SystemKind,
    e0: Vec<f64>,
    v: Matrix,
    lambda: f64,
}

impl ModelSystem {
    pub fn build(kind: SystemKind, n_basis: usize, lambda: f64) -> Result<Self> {
        match kind {
            SystemKind::Oscillator => build_harmonic_oscillator(n_basis, lambda),
            SystemKind::CosineBox => build_cosine_box(n_basis, lambda),
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn n_basis(&self) -> usize {
        self.e0.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Zeroth-order energies by basis position.
    pub fn e0(&self) -> &[f64] {
        &self.e0
    }

    /// Perturbation matrix `V` by basis position (without `lambda`).
    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn first_label(&self) -> usize {
        self.kind.first_label()
    }

    pub fn last_label(&self) -> usize {
        self.first_label() + self.n_basis() - 1
    }

    pub fn position(&self, label: usize) -> Result<usize> {
        label_to_position(label, self.first_label(), self.n_basis())
    }

    /// Zeroth-order energy of the state with quantum number `label`.
    pub fn energy0(&self, label: usize) -> Result<f64> {
        Ok(self.e0[self.position(label)?])
    }

    /// `V_lm` addressed by quantum numbers.
    pub fn element(&self, l: usize, m: usize) -> Result<f64> {
        Ok(self.v[(self.position(l)?, self.position(m)?)])
    }

    /// Full Hamiltonian matrix `E0 + lambda V`.
    pub fn hamiltonian(&self) -> Matrix {
        let mut h = self.v.scaled(self.lambda);
        for (i, e) in self.e0.iter().enumerate() {
            h[(i, i)] += e;
        }
        h
    }

    /// Same system at a different perturbation strength.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        validate_lambda(self.kind, lambda)?;
        Ok(Self {
            lambda,
            ..self.clone()
        })
    }
}

pub(crate) fn label_to_position(label: usize, first: usize, n_basis: usize) -> Result<usize> {
    if label < first || label - first >= n_basis {
        return Err(Error::StateOutOfRange {
            label,
            first,
            last: first + n_basis - 1,
        });
    }
    Ok(label - first)
}

fn validate_basis(n_basis: usize) -> Result<()> {
    if n_basis < MIN_BASIS {
        return Err(Error::BasisTooSmall {
            n_basis,
            min: MIN_BASIS,
        });
    }
    Ok(())
}

fn validate_lambda(kind: SystemKind, lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "must be finite",
        });
    }
    if kind == SystemKind::Oscillator && lambda <= -1.0 {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "oscillator requires lambda > -1",
        });
    }
    Ok(())
}

/// Oscillator with `V = x^2 / 2` in its own eigenbasis, `n_basis` states from 0.
pub fn build_harmonic_oscillator(n_basis: usize, lambda: f64) -> Result<ModelSystem> {
    validate_basis(n_basis)?;
    validate_lambda(SystemKind::Oscillator, lambda)?;
    let e0 = (0..n_basis).map(|m| m as f64 + 0.5).collect();
    let v = Matrix::from_fn(n_basis, n_basis, oscillator_element);
    Ok(ModelSystem {
        kind: SystemKind::Oscillator,
        e0,
        v,
        lambda,
    })
}

/// Closed-form `<l| x^2/2 |m>` from the ladder operators.
pub fn oscillator_element(l: usize, m: usize) -> f64 {
    let (lo, hi) = if l <= m { (l, m) } else { (m, l) };
    match hi - lo {
        0 => (2.0 * lo as f64 + 1.0) / 4.0,
        2 => (((lo + 1) * (lo + 2)) as f64).sqrt() / 4.0,
        _ => 0.0,
    }
}

/// Unit box with `V = cos(pi x)`, `n_basis` states labelled from 1.
pub fn build_cosine_box(n_basis: usize, lambda: f64) -> Result<ModelSystem> {
    validate_basis(n_basis)?;
    validate_lambda(SystemKind::CosineBox, lambda)?;
    let e0 = (1..=n_basis)
        .map(|n| (n * n) as f64 * PI * PI / 2.0)
        .collect();
    let v = Matrix::from_fn(n_basis, n_basis, |i, j| box_element(i + 1, j + 1));
    Ok(ModelSystem {
        kind: SystemKind::CosineBox,
        e0,
        v,
        lambda,
    })
}

/// Closed-form `<m| cos(pi x) |n>` for box labels `m, n >= 1`:
/// `(2/pi) [1/(1 - (m-n)^2) - 1/(1 - (m+n)^2)]` when `m + n` is even, else 0.
pub fn box_element(m: usize, n: usize) -> f64 {
    debug_assert!(m >= 1 && n >= 1);
    if (m + n) % 2 == 1 {
        return 0.0;
    }
    let diff = m.abs_diff(n) as f64;
    let sum = (m + n) as f64;
    (2.0 / PI) * (1.0 / (1.0 - diff * diff) - 1.0 / (1.0 - sum * sum))
}

//! Gauss-Legendre quadrature with panel refinement.
//!
//! Used as an independent check on the closed-form matrix elements of the
//! model systems: the integrals are evaluated directly from the basis
//! wavefunctions rather than from ladder-operator or trigonometric algebra.

use crate::error::{Error, Result};
use crate::model::SystemKind;

/// Points per panel.
pub const DEFAULT_RULE_ORDER: usize = 20;
/// Refinement stops once two successive panel doublings agree this closely.
pub const REFINEMENT_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 1 << 14;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1], found by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "rule order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_panels(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(&f, lo, lo + h)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Doubles the panel count until successive estimates differ by less than `tol`.
pub fn integrate_refined(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rule: &GaussLegendre,
    tol: f64,
) -> Result<f64> {
    let mut panels = 4;
    let mut prev = rule.integrate_panels(&f, a, b, panels);
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = rule.integrate_panels(&f, a, b, panels);
        change = (next - prev).abs();
        if change < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        panels,
        last_change: change,
    })
}

/// Normalized Hermite function `psi_n(x)` for the unit oscillator, by the
/// stable three-term recurrence.
pub fn oscillator_wavefunction(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Unit-box eigenfunction for label `n >= 1` in the shifted coordinate
/// `u = x + 1/2`, with `u` in `[0, 1]`.
pub fn box_wavefunction(n: usize, u: f64) -> f64 {
    std::f64::consts::SQRT_2 * (n as f64 * std::f64::consts::PI * u).sin()
}

/// Half-width of the truncated oscillator domain. Twelve suffices up to
/// `n = 12`; higher states get ten units of margin past the turning point.
pub fn oscillator_domain(max_label: usize) -> f64 {
    let turning = (2.0 * max_label as f64 + 1.0).sqrt();
    12.0_f64.max(turning + 10.0)
}

/// `<m|V|n>` evaluated by quadrature. Labels follow the system's own
/// convention: oscillator states start at 0, box states at 1.
pub fn quadrature_matrix_element(kind: SystemKind, m: usize, n: usize) -> Result<f64> {
    let rule = GaussLegendre::new(DEFAULT_RULE_ORDER);
    match kind {
        SystemKind::Oscillator => {
            let half_width = oscillator_domain(m.max(n));
            let f = |x: f64| {
                oscillator_wavefunction(m, x) * 0.5 * x * x * oscillator_wavefunction(n, x)
            };
            integrate_refined(f, -half_width, half_width, &rule, REFINEMENT_TOL)
        }
        SystemKind::CosineBox => {
            if m == 0 || n == 0 {
                return Err(Error::StateOutOfRange {
                    label: 0,
                    first: 1,
                    last: usize::MAX,
                });
            }
            // cos(pi x) = sin(pi u) for u = x + 1/2
            let f = |u: f64| {
                box_wavefunction(m, u) * (std::f64::consts::PI * u).sin() * box_wavefunction(n, u)
            };
            integrate_refined(f, 0.0, 1.0, &rule, REFINEMENT_TOL)
        }
    }
}

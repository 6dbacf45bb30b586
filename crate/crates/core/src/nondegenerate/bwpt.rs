//! Brillouin-Wigner energies from the truncated series
//!
//! ```text
//! E = D_n + W_nn + sum_{k=2}^{order} sum_{m1..m(k-1) != n}
//!       W_n,m1 W_m1,m2 ... W_m(k-1),n / ((E - D_m1) ... (E - D_m(k-1)))
//! ```
//!
//! The order-k term is evaluated literally as k-1 nested loops, so its cost
//! grows as `N^(k-1)`. [`bw_series_matvec`] gives the same number through
//! repeated matrix-vector products and exists to cross-check it.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::partition::PartitionedSystem;

pub const MAX_BW_ORDER: usize = 5;
const FIXED_POINT_TOL: f64 = 1e-13;
const MAX_FIXED_POINT_ITERS: usize = 500;
const MIN_DAMPING: f64 = 1.0 / 64.0;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BwStrategy {
    /// Solve `E = rhs(E)` for the truncated series.
    SelfConsistent,
    /// Evaluate the truncated series once at the previous order's energy.
    PriorOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BwSolution {
    pub energy: f64,
    /// Series evaluations spent on the solve.
    pub evaluations: usize,
    pub bracketed: bool,
}

fn check_order(order: usize) -> Result<()> {
    if !(1..=MAX_BW_ORDER).contains(&order) {
        return Err(Error::InvalidOrder {
            order,
            min: 1,
            max: MAX_BW_ORDER,
        });
    }
    Ok(())
}

/// Right-hand side of the truncated series at `energy`, by nested loops.
pub fn bw_series_naive(p: &PartitionedSystem, n: usize, order: usize, energy: f64) -> Result<f64> {
    check_order(order)?;
    let pos = p.position(n)?;
    series_naive(p, pos, order, energy)
}

fn series_naive(p: &PartitionedSystem, pos: usize, order: usize, energy: f64) -> Result<f64> {
    let inv = p.inverse_denominators(pos, energy)?;
    let mut total = p.first_order_energy(pos);
    for k in 2..=order {
        total += chain(p, &inv, pos, pos, k - 1);
    }
    Ok(total)
}

/// Sum over all paths `from -> m1 -> ... -> m_depth -> target` with every
/// intermediate state different from the target.
fn chain(p: &PartitionedSystem, inv: &[f64], target: usize, from: usize, depth: usize) -> f64 {
    let w = p.w();
    if depth == 0 {
        return w[(from, target)];
    }
    let row = w.row(from);
    let mut sum = 0.0;
    for m in 0..p.n_basis() {
        if m == target {
            continue;
        }
        sum += row[m] * inv[m] * chain(p, inv, target, m, depth - 1);
    }
    sum
}

/// Same series as [`bw_series_naive`], evaluated with `order - 1` products
/// of `W` against the resolvent-weighted vector.
pub fn bw_series_matvec(p: &PartitionedSystem, n: usize, order: usize, energy: f64) -> Result<f64> {
    check_order(order)?;
    let pos = p.position(n)?;
    let inv = p.inverse_denominators(pos, energy)?;
    let w = p.w();
    let nb = p.n_basis();
    let mut total = p.first_order_energy(pos);
    // u_m = W_mn / (E - D_m)
    let mut u: Vec<f64> = (0..nb).map(|m| w[(m, pos)] * inv[m]).collect();
    for k in 2..=order {
        total += dot(w.row(pos), &u);
        if k < order {
            u = (0..nb).map(|m| dot(w.row(m), &u) * inv[m]).collect();
        }
    }
    Ok(total)
}

pub fn bwpt(p: &PartitionedSystem, n: usize, order: usize, strategy: BwStrategy) -> Result<f64> {
    bwpt_detailed(p, n, order, strategy).map(|s| s.energy)
}

pub fn bwpt_detailed(
    p: &PartitionedSystem,
    n: usize,
    order: usize,
    strategy: BwStrategy,
) -> Result<BwSolution> {
    check_order(order)?;
    let pos = p.position(n)?;
    match strategy {
        BwStrategy::PriorOrder => {
            let mut energy = p.first_order_energy(pos);
            for k in 2..=order {
                energy = series_naive(p, pos, k, energy)?;
            }
            Ok(BwSolution {
                energy,
                evaluations: order - 1,
                bracketed: false,
            })
        }
        BwStrategy::SelfConsistent => solve_self_consistent(p, pos, order),
    }
}

fn solve_self_consistent(p: &PartitionedSystem, pos: usize, order: usize) -> Result<BwSolution> {
    let start = p.first_order_energy(pos);
    if order == 1 {
        return Ok(BwSolution {
            energy: start,
            evaluations: 0,
            bracketed: false,
        });
    }
    let rhs = |e: f64| series_naive(p, pos, order, e);

    // damped fixed point, started at the first-order energy
    let mut energy = start;
    let mut damping: f64 = 1.0;
    let mut prev_step: f64 = 0.0;
    let mut evaluations = 0;
    for _ in 0..MAX_FIXED_POINT_ITERS {
        // a denominator collision sends us to the bracketing fallback
        let Ok(value) = rhs(energy) else { break };
        evaluations += 1;
        let step = value - energy;
        if step.abs() <= FIXED_POINT_TOL * energy.abs().max(1.0) {
            return Ok(BwSolution {
                energy: value,
                evaluations,
                bracketed: false,
            });
        }
        if prev_step != 0.0 && step.signum() != prev_step.signum() {
            damping = (damping * 0.5).max(MIN_DAMPING);
        }
        prev_step = step;
        energy += damping * step;
        if !energy.is_finite() {
            break;
        }
    }

    bracket_root(p, pos, order, start).map(|(energy, extra)| BwSolution {
        energy,
        evaluations: evaluations + extra,
        bracketed: true,
    })
}

/// Bisection for `rhs(E) - E = 0` inside the open interval between the
/// nearest `D_m` below and above the start, searching outward from the start
/// so the root found is the one continuous with zero coupling.
fn bracket_root(
    p: &PartitionedSystem,
    pos: usize,
    order: usize,
    start: f64,
) -> Result<(f64, usize)> {
    let d = p.d();
    let below = d
        .iter()
        .enumerate()
        .filter(|&(m, &x)| m != pos && x < start)
        .map(|(_, &x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    let above = d
        .iter()
        .enumerate()
        .filter(|&(m, &x)| m != pos && x > start)
        .map(|(_, &x)| x)
        .fold(f64::INFINITY, f64::min);
    let spread = 1.0 + p.w().row(pos).iter().map(|x| x.abs()).sum::<f64>() * 10.0;
    let lo_limit = if below.is_finite() {
        below
    } else {
        start - spread
    };
    let hi_limit = if above.is_finite() {
        above
    } else {
        start + spread
    };

    let evaluations = std::cell::Cell::new(0);
    let g = |e: f64| -> Option<f64> {
        evaluations.set(evaluations.get() + 1);
        series_naive(p, pos, order, e).ok().map(|v| v - e)
    };
    let non_convergence = Error::NonConvergence {
        what: "self-consistent Brillouin-Wigner solve",
        iterations: MAX_FIXED_POINT_ITERS,
    };

    let g_start = g(start).ok_or(non_convergence.clone())?;
    if g_start == 0.0 {
        return Ok((start, evaluations.get()));
    }
    // alternately probe points approaching each pole geometrically
    let mut bracket = None;
    let (mut prev_lo, mut prev_hi) = (start, start);
    for j in 1..=52 {
        let frac = 1.0 - 0.5f64.powi(j);
        for (side, limit) in [(0, lo_limit), (1, hi_limit)] {
            let x = start + (limit - start) * frac;
            if let Some(gx) = g(x) {
                if gx.signum() != g_start.signum() {
                    let prev = if side == 0 { prev_lo } else { prev_hi };
                    bracket = Some(if x < prev { (x, prev) } else { (prev, x) });
                    break;
                }
            }
            if side == 0 {
                prev_lo = x;
            } else {
                prev_hi = x;
            }
        }
        if bracket.is_some() {
            break;
        }
    }
    let (mut a, mut b) = bracket.ok_or(non_convergence.clone())?;
    let mut ga = g(a).ok_or(non_convergence.clone())?;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid).ok_or(non_convergence.clone())?;
        if gm == 0.0 {
            return Ok((mid, evaluations.get()));
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b), evaluations.get()))
}

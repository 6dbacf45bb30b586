//! Rayleigh-Schrodinger energies through fourth order.
//!
//! The coefficient corrections follow the recursion
//!
//! ```text
//! c1_m = W_mn / (D_n - D_m)
//! c2_m = (sum_l W_ml c1_l - E1 c1_m) / (D_n - D_m)
//! c3_m = (sum_l W_ml c2_l - E1 c2_m - E2 c1_m) / (D_n - D_m)
//! Ek+1 = sum_m W_nm ck_m
//! ```
//!
//! with `E1 = W_nn` (zero under Epstein-Nesbet) and all sums over `l, m != n`.
//! Under Epstein-Nesbet this is term for term the usual `e2`, `e3` and `e4`
//! including the `-e2 sum |W_nm|^2 / (D_n - D_m)^2` renormalization piece.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::partition::PartitionedSystem;

pub const MAX_RS_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub n: usize,
    /// `D_n + W_nn`.
    pub e1: f64,
    /// Corrections of order 2, 3, 4 (those beyond the requested order are 0).
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    /// `cumulative[k - 1]` is the energy through order `k`.
    pub cumulative: Vec<f64>,
}

impl EnergySeries {
    pub fn order(&self) -> usize {
        self.cumulative.len()
    }

    /// Energy through order `k` (1-based).
    pub fn energy(&self, k: usize) -> Option<f64> {
        k.checked_sub(1)
            .and_then(|i| self.cumulative.get(i))
            .copied()
    }

    pub fn total(&self) -> f64 {
        *self
            .cumulative
            .last()
            .expect("series has at least one term")
    }
}

/// Order-by-order coefficient corrections `c1, c2, ...` up to `order - 1`
/// terms, the pieces that feed the energy through `order`.
pub fn rs_coefficient_corrections(
    p: &PartitionedSystem,
    n: usize,
    order: usize,
) -> Result<Vec<Vec<f64>>> {
    let pos = p.position(n)?;
    let (corrections, _) = corrections_and_energies(p, pos, order)?;
    Ok(corrections)
}

fn corrections_and_energies(
    p: &PartitionedSystem,
    pos: usize,
    order: usize,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if !(1..=MAX_RS_ORDER).contains(&order) {
        return Err(Error::InvalidOrder {
            order,
            min: 1,
            max: MAX_RS_ORDER,
        });
    }
    let w = p.w();
    // 1/(D_n - D_m): the same guard as the energy-dependent solvers, at E = D_n
    let inv = p.inverse_denominators(pos, p.d()[pos])?;
    let n_basis = p.n_basis();

    // energy corrections: index k holds E^(k) for k >= 1
    let mut e_corr = vec![0.0, w[(pos, pos)]];
    let mut corrections: Vec<Vec<f64>> = Vec::with_capacity(order.saturating_sub(1));

    for k in 1..order {
        let mut c = vec![0.0; n_basis];
        for m in 0..n_basis {
            if m == pos {
                continue;
            }
            let mut num = if k == 1 {
                w[(m, pos)]
            } else {
                dot(w.row(m), &corrections[k - 2])
            };
            // - sum_{j=1}^{k-1} E^(j) c^(k-j)_m
            for j in 1..k {
                num -= e_corr[j] * corrections[k - j - 1][m];
            }
            c[m] = num * inv[m];
        }
        e_corr.push(dot(w.row(pos), &c));
        corrections.push(c);
    }
    Ok((corrections, e_corr))
}

pub fn rspt(p: &PartitionedSystem, n: usize, order: usize) -> Result<EnergySeries> {
    let pos = p.position(n)?;
    let (_, e_corr) = corrections_and_energies(p, pos, order)?;
    let e1 = p.d()[pos] + e_corr[1];
    let mut cumulative = Vec::with_capacity(order);
    let mut acc = e1;
    cumulative.push(acc);
    for &e in &e_corr[2..] {
        acc += e;
        cumulative.push(acc);
    }
    let get = |k: usize| e_corr.get(k).copied().unwrap_or(0.0);
    Ok(EnergySeries {
        n,
        e1,
        e2: get(2),
        e3: get(3),
        e4: get(4),
        cumulative,
    })
}

//! Shot budgets and closed-form error references.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::ReadoutErrorModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetQuery {
    pub epsilon: f64,
    pub eta: f64,
    pub m: u64,
}

impl BudgetQuery {
    pub fn new(epsilon: f64, eta: f64, m: u64) -> Result<Self> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(epsilon) {
            return Err(Error::InvalidQuery(format!("epsilon={epsilon} outside (0,1)")));
        }
        if !open(eta) {
            return Err(Error::InvalidQuery(format!("eta={eta} outside (0,1)")));
        }
        if m == 0 {
            return Err(Error::InvalidQuery("m must be positive".into()));
        }
        Ok(Self { epsilon, eta, m })
    }

    /// Query for an `n`-qubit register (`m = 2^n − 1`).
    pub fn for_qubits(epsilon: f64, eta: f64, n: u32) -> Result<Self> {
        if n == 0 || n > 62 {
            return Err(Error::InvalidQuery(format!("n={n} outside 1..=62")));
        }
        Self::new(epsilon, eta, (1u64 << n) - 1)
    }
}

/// Shots per grid point guaranteeing `P(|p_i − w_i| ≥ ε) ≤ η` for every `i`:
/// `⌈(48m² + 4m(2m+1)ε) / ((2m+1)²ε²) · ln(m/η)⌉`.
pub fn theorem1_shots(q: &BudgetQuery) -> u64 {
    let m = q.m as f64;
    let period = 2.0 * m + 1.0;
    let eps = q.epsilon;
    let n = (48.0 * m * m + 4.0 * m * period * eps) / (period * period * eps * eps) * (m / q.eta).ln();
    n.ceil() as u64
}

/// Uniform bound `16m / ((2m+1)² N)` on `Var(p_i)` with `N` shots per grid point.
pub fn variance_bound(m: u64, shots_per_grid: u64) -> f64 {
    let m = m as f64;
    let period = 2.0 * m + 1.0;
    16.0 * m / (period * period * shots_per_grid as f64)
}

/// Exact direct-readout TV error for basis state `|index⟩` on `n` qubits.
///
/// The state survives readout with probability `(1−e0)^{#zeros}(1−e1)^{#ones}`
/// and the TV distance from a point mass is one minus that. Symmetric rates
/// reduce to `1 − (1−ξ)^n`.
pub fn direct_error_closed_form(n: u32, model: &ReadoutErrorModel, index: &BigUint) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    if index.bits() > n as u64 {
        return Err(Error::IndexOutOfRange {
            index: index.to_string(),
            n,
        });
    }
    let ones = index.count_ones();
    let zeros = n as u64 - ones;
    let log_stay = zeros as f64 * (-model.e0()).ln_1p() + ones as f64 * (-model.e1()).ln_1p();
    Ok(-log_stay.exp_m1())
}

/// The binomial-sum form `½(1 − (1−ξ)^n + Σ_{k≥1} C(n,k)(1−ξ)^{n−k} ξ^k)`,
/// evaluated term by term.
pub fn direct_error_binomial_sum(n: u32, xi: f64) -> f64 {
    let stay = (1.0 - xi).powi(n as i32);
    let mut coeff = 1.0f64;
    let mut tail = 0.0;
    for k in 1..=n {
        coeff *= (n - k + 1) as f64 / k as f64;
        tail += coeff * (1.0 - xi).powi((n - k) as i32) * xi.powi(k as i32);
    }
    0.5 * (1.0 - stay + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotsReport {
    pub n: u32,
    pub m: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub shots_per_grid: u64,
    pub total_shots: u128,
    pub variance_bound: f64,
}

/// Budget summary printed by the `shots-bound` command.
pub fn shots_report(n: u32, epsilon: f64, eta: f64) -> Result<ShotsReport> {
    let q = BudgetQuery::for_qubits(epsilon, eta, n)?;
    let shots = theorem1_shots(&q);
    Ok(ShotsReport {
        n,
        m: q.m,
        epsilon,
        eta,
        shots_per_grid: shots,
        total_shots: shots as u128 * q.m as u128,
        variance_bound: variance_bound(q.m, shots),
    })
}

//! Trapezoidal inverse-Fourier decoding of ancilla estimates.
//!
//! With `L = 2m + 1` and `Ã_k` the ancilla read-0 estimate at `x_k`:
//!
//! ```text
//! p_0 = (1 − 2m + 4 Σ_k Ã_k) / L
//! p_i = 4 (1 + 2 Σ_k Ã_k cos 2i·x_k) / L      (i ≠ 0)
//! ```
//!
//! Outputs are raw: they may be negative and always sum to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{cosine_sums, cosine_table};
use crate::grid::GridSpec;
use crate::state::SparsePopulations;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct AncillaEstimates {
    grid: GridSpec,
    values: Vec<f64>,
}

impl AncillaEstimates {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != grid.m() {
            return Err(Error::DimensionMismatch {
                expected: grid.m() as usize,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidRate {
                name: "A",
                value: *v,
                reason: "ancilla probabilities must lie in [0, 1]",
            });
        }
        Ok(Self { grid, values })
    }

    /// Skips the `[0, 1]` range check, for probing the decoder's algebra on
    /// unphysical inputs.
    pub fn unchecked(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != grid.m() {
            return Err(Error::DimensionMismatch {
                expected: grid.m() as usize,
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateSource {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedPopulations {
    pub n: u32,
    pub values: Vec<f64>,
    pub source: EstimateSource,
    pub shots_per_grid: Option<u64>,
}

impl DecodedPopulations {
    fn exact(n: u32, values: Vec<f64>) -> Self {
        Self {
            n,
            values,
            source: EstimateSource::Exact,
            shots_per_grid: None,
        }
    }

    pub fn with_source(mut self, source: EstimateSource, shots_per_grid: Option<u64>) -> Self {
        self.source = source;
        self.shots_per_grid = shots_per_grid;
        self
    }

    /// Clips negatives to zero and renormalizes. Not applied by default.
    pub fn clipped(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().map(|p| p.max(0.0)).collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            v.iter_mut().for_each(|p| *p /= total);
        }
        v
    }
}

/// `g_m(i) = Σ_{k=1..m} cos(2i·x_k)`: `m` when `(2m+1) | i`, else `−½`.
pub fn g_m(i: u64, m: u64) -> f64 {
    if i % (2 * m + 1) == 0 {
        m as f64
    } else {
        -0.5
    }
}

fn assemble(m: u64, total: f64, cos_sums: impl Iterator<Item = f64>) -> Vec<f64> {
    let period = (2 * m + 1) as f64;
    let mut out = Vec::with_capacity(m as usize + 1);
    out.push((1.0 - 2.0 * m as f64 + 4.0 * total) / period);
    out.extend(cos_sums.map(|s| 4.0 * (1.0 + 2.0 * s) / period));
    out
}

/// Reference `O(m²)` decoder.
pub fn decode_naive(est: &AncillaEstimates) -> DecodedPopulations {
    let m = est.grid.m();
    let period = est.grid.period();
    let table = cosine_table(period as usize);
    let a = &est.values;
    let sum_for = |i: u64| -> f64 {
        a.iter()
            .enumerate()
            .map(|(idx, &v)| {
                let k = idx as u64 + 1;
                v * table[((i as u128 * k as u128) % period as u128) as usize]
            })
            .sum()
    };
    #[cfg(feature = "parallel")]
    let sums: Vec<f64> = (1..=m).into_par_iter().map(sum_for).collect();
    #[cfg(not(feature = "parallel"))]
    let sums: Vec<f64> = (1..=m).map(sum_for).collect();
    let total: f64 = a.iter().sum();
    DecodedPopulations::exact(est.grid.n(), assemble(m, total, sums.into_iter()))
}

/// `O(m log m)` decoder through one length-`(2m+1)` transform.
pub fn decode_fast(est: &AncillaEstimates) -> DecodedPopulations {
    let m = est.grid.m() as usize;
    let period = est.grid.period() as usize;
    let mut seq = Vec::with_capacity(m + 1);
    seq.push(0.0);
    seq.extend_from_slice(&est.values);
    let sums = cosine_sums(&seq, period, m + 1);
    let total: f64 = est.values.iter().sum();
    DecodedPopulations::exact(est.grid.n(), assemble(m as u64, total, sums.into_iter().skip(1)))
}

/// Total-variation error `½ Σ_i |p_i − w_i|` over raw decoder output.
pub fn tv_error(decoded: &[f64], truth: &[f64]) -> Result<f64> {
    if decoded.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: decoded.len(),
        });
    }
    Ok(0.5 * decoded.iter().zip(truth).map(|(p, w)| (p - w).abs()).sum::<f64>())
}

/// [`tv_error`] against a sparse truth, without densifying it.
pub fn tv_error_sparse(decoded: &[f64], truth: &SparsePopulations) -> Result<f64> {
    let dim = 1usize
        .checked_shl(truth.n())
        .filter(|_| truth.n() < usize::BITS)
        .ok_or(Error::DimensionMismatch {
            expected: usize::MAX,
            got: decoded.len(),
        })?;
    if decoded.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: decoded.len(),
        });
    }
    let mut total: f64 = decoded.iter().map(|p| p.abs()).sum();
    for (index, w) in truth.iter() {
        let p = decoded[usize::try_from(index).expect("index within dense length")];
        total += (p - w).abs() - p.abs();
    }
    Ok(0.5 * total)
}

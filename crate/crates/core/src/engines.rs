//! End-to-end readout pipelines.
//!
//! Direct readout measures every qubit and is charged readout noise only.
//! Compression readout charges `G` depolarizing gates plus single-qubit
//! readout noise on the ancilla, then decodes. Both come in exact
//! (infinite-shot) and sampled flavours; compression readout also has a
//! closed-form sparse engine that never enumerates the grid.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::bounds::direct_error_closed_form;
use crate::decoder::{decode_fast, tv_error, tv_error_sparse, AncillaEstimates, EstimateSource};
use crate::error::{Error, Result};
use crate::grid::{ancilla_profile, build_grid, Architecture, GridSpec};
use crate::noise::{apply_readout_transition, depolarizing_fidelity, AncillaTransform, NoiseModel, ReadoutErrorModel};
use crate::rng::{binomial, multinomial, Lane, StreamKey};
use crate::state::{qubits_for_len, SparsePopulations};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Supports larger than this are handed to the dense engine.
pub const SPARSE_SUPPORT_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotPlan {
    pub total_shots: u64,
    pub per_grid: Vec<u64>,
}

impl ShotPlan {
    /// Splits `total` as evenly as possible; the first `total mod m` grid
    /// points get one extra shot.
    pub fn new(total: u64, grid_points: u64) -> Result<Self> {
        if total < grid_points || grid_points == 0 {
            return Err(Error::TooFewShots {
                shots: total,
                grid_points,
            });
        }
        let base = total / grid_points;
        let extra = total % grid_points;
        let per_grid = (0..grid_points).map(|k| base + u64::from(k < extra)).collect();
        Ok(Self {
            total_shots: total,
            per_grid,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Compression,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Compression => "compression",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultMeta {
    pub n: u32,
    pub readout: ReadoutErrorModel,
    pub gamma: f64,
    pub architecture: Option<Architecture>,
    pub gate_count: Option<u64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub repetition: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutResult {
    pub method: Method,
    pub source: EstimateSource,
    /// Decoded (compression) or empirical/noisy (direct) distribution;
    /// absent when the engine worked in closed form.
    pub distribution: Option<Vec<f64>>,
    pub tv_error: f64,
    pub meta: ResultMeta,
}

/// Gate count charged for `architecture` on `n` qubits, honoring any override.
pub fn effective_gate_count(noise: &NoiseModel, architecture: Architecture, n: u32) -> u64 {
    noise.gate.gate_count(architecture.gate_count(n))
}

/// Infinite-shot direct readout: the read distribution is `Q^{⊗n}·a`.
pub fn direct_readout_exact(populations: &[f64], readout: &ReadoutErrorModel) -> Result<ReadoutResult> {
    readout.validate()?;
    let n = qubits_for_len(populations.len())?;
    let noisy = apply_readout_transition(populations, readout)?;
    let e = tv_error(&noisy, populations)?;
    Ok(ReadoutResult {
        method: Method::Direct,
        source: EstimateSource::Exact,
        distribution: Some(noisy),
        tv_error: e,
        meta: meta(n, readout, 0.0, None, None, None, None, None),
    })
}

/// Direct readout for sparse inputs: closed form for basis states, dense
/// evaluation otherwise (requires `n ≤ cap`).
pub fn direct_readout_exact_sparse(
    populations: &SparsePopulations,
    readout: &ReadoutErrorModel,
    cap: u32,
) -> Result<ReadoutResult> {
    readout.validate()?;
    if let Some(index) = populations.as_basis() {
        let e = direct_error_closed_form(populations.n(), readout, index)?;
        return Ok(ReadoutResult {
            method: Method::Direct,
            source: EstimateSource::Exact,
            distribution: None,
            tv_error: e,
            meta: meta(populations.n(), readout, 0.0, None, None, None, None, None),
        });
    }
    direct_readout_exact(&populations.to_dense(cap)?, readout)
}

/// Finite-shot direct readout: one multinomial over `Q^{⊗n}·a`.
pub fn direct_readout_sampled(
    populations: &[f64],
    readout: &ReadoutErrorModel,
    total_shots: u64,
    seed: u64,
    repetition: u32,
) -> Result<ReadoutResult> {
    readout.validate()?;
    if total_shots == 0 {
        return Err(Error::TooFewShots {
            shots: 0,
            grid_points: 1,
        });
    }
    let n = qubits_for_len(populations.len())?;
    let noisy = apply_readout_transition(populations, readout)?;
    let mut rng = StreamKey::new(seed, repetition, Lane::Direct).rng();
    let counts = multinomial(&mut rng, total_shots, &noisy);
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total_shots as f64).collect();
    let e = tv_error(&freq, populations)?;
    Ok(ReadoutResult {
        method: Method::Direct,
        source: EstimateSource::Sampled,
        distribution: Some(freq),
        tv_error: e,
        meta: meta(n, readout, 0.0, None, None, Some(total_shots), Some(seed), Some(repetition)),
    })
}

fn compression_setup(
    populations: &[f64],
    noise: &NoiseModel,
    architecture: Architecture,
) -> Result<(u32, GridSpec, u64, Vec<f64>)> {
    noise.validate()?;
    let n = qubits_for_len(populations.len())?;
    let grid = build_grid(n)?;
    let gates = effective_gate_count(noise, architecture, n);
    let transform = AncillaTransform::new(&noise.readout, depolarizing_fidelity(noise.gate.gamma, gates));
    let noisy: Vec<f64> = ancilla_profile(populations, &grid)?
        .into_iter()
        .map(|a| transform.apply(a))
        .collect();
    Ok((n, grid, gates, noisy))
}

/// Infinite-shot compression readout over the full grid.
pub fn compression_readout_exact(
    populations: &[f64],
    noise: &NoiseModel,
    architecture: Architecture,
) -> Result<ReadoutResult> {
    let (n, grid, gates, noisy) = compression_setup(populations, noise, architecture)?;
    let decoded = decode_fast(&AncillaEstimates::new(grid, noisy)?);
    let e = tv_error(&decoded.values, populations)?;
    Ok(ReadoutResult {
        method: Method::Compression,
        source: EstimateSource::Exact,
        distribution: Some(decoded.values),
        tv_error: e,
        meta: meta(n, &noise.readout, noise.gate.gamma, Some(architecture), Some(gates), None, None, None),
    })
}

/// Finite-shot compression readout. Grid point `k` draws
/// `Binomial(N_k, Ã(x_k))` from its own substream, so the result does not
/// depend on evaluation order.
pub fn compression_readout_sampled(
    populations: &[f64],
    noise: &NoiseModel,
    architecture: Architecture,
    total_shots: u64,
    seed: u64,
    repetition: u32,
) -> Result<ReadoutResult> {
    let (n, grid, gates, noisy) = compression_setup(populations, noise, architecture)?;
    let plan = ShotPlan::new(total_shots, grid.m())?;
    let draw = |(idx, &p): (usize, &f64)| -> f64 {
        let shots = plan.per_grid[idx];
        let mut rng = StreamKey::new(seed, repetition, Lane::Grid(idx as u64 + 1)).rng();
        binomial(&mut rng, shots, p) as f64 / shots as f64
    };
    #[cfg(feature = "parallel")]
    let estimates: Vec<f64> = if noisy.len() >= 4096 {
        noisy.par_iter().enumerate().map(draw).collect()
    } else {
        noisy.iter().enumerate().map(draw).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let estimates: Vec<f64> = noisy.iter().enumerate().map(draw).collect();

    let per_grid = (total_shots % grid.m() == 0).then(|| total_shots / grid.m());
    let decoded = decode_fast(&AncillaEstimates::new(grid, estimates)?).with_source(EstimateSource::Sampled, per_grid);
    let e = tv_error(&decoded.values, populations)?;
    Ok(ReadoutResult {
        method: Method::Compression,
        source: EstimateSource::Sampled,
        distribution: Some(decoded.values),
        tv_error: e,
        meta: meta(
            n,
            &noise.readout,
            noise.gate.gamma,
            Some(architecture),
            Some(gates),
            Some(total_shots),
            Some(seed),
            Some(repetition),
        ),
    })
}

/// Closed-form compression readout for sparse populations at any `n`.
///
/// The noisy profile is `Ã = s·A + t` and the decoder is affine with
/// `decode(A) = w` and `decode(1) = e_0`, so
/// `p_i = s·w_i + t·δ_{i0} + (1 − s − t)·c_i` where `c = decode(0)`:
/// `c_0 = (1 − 2m)/(2m+1)` and `c_i = 4/(2m+1)`. Every index outside the
/// support shares one value, which makes the TV sum `O(|support|)`.
pub fn compression_readout_sparse_exact(
    populations: &SparsePopulations,
    noise: &NoiseModel,
    gate_count: u64,
    cap: u32,
) -> Result<ReadoutResult> {
    noise.validate()?;
    let n = populations.n();
    if populations.support_len() > SPARSE_SUPPORT_LIMIT {
        if n <= cap {
            let mut noise = *noise;
            noise.gate.gate_count_override = Some(gate_count);
            return compression_readout_exact(&populations.to_dense(cap)?, &noise, Architecture::FullyConnected);
        }
        return Err(Error::ClosedFormUnavailable(format!(
            "support of {} entries exceeds the sparse limit",
            populations.support_len()
        )));
    }
    let t = AncillaTransform::new(&noise.readout, depolarizing_fidelity(noise.gate.gamma, gate_count));
    let (slope, offset) = (t.slope, t.offset);
    let rest = 1.0 - slope - offset;

    // 1/(2m+1) = u/(1−u) with u = 2^{-(n+1)}; stays finite for any n
    let u = (-(n as f64 + 1.0)).exp2();
    let c_zero = (3.0 * u - 1.0) / (1.0 - u);
    let c_other = 4.0 * u / (1.0 - u);

    let zero = BigUint::zero();
    let mut touched: u64 = 0;
    let mut total = 0.0;
    let mut zero_seen = false;
    for (index, w) in populations.iter() {
        let p = if *index == zero {
            zero_seen = true;
            slope * w + offset + rest * c_zero
        } else {
            slope * w + rest * c_other
        };
        total += (p - w).abs();
        touched += 1;
    }
    if !zero_seen {
        total += (offset + rest * c_zero).abs();
        touched += 1;
    }
    // (2^n − touched) indices at p = rest·c_other, i.e. rest·(2 − 4·touched·u)/(1−u)
    let off_mass = (2.0 - 4.0 * touched as f64 * u) / (1.0 - u);
    total += rest.abs() * off_mass;

    Ok(ReadoutResult {
        method: Method::Compression,
        source: EstimateSource::Exact,
        distribution: None,
        tv_error: 0.5 * total,
        meta: meta(n, &noise.readout, noise.gate.gamma, None, Some(gate_count), None, None, None),
    })
}

/// Dense compression readout for sparse inputs, reporting E without densifying the truth.
pub fn compression_readout_exact_for_sparse(
    populations: &SparsePopulations,
    noise: &NoiseModel,
    architecture: Architecture,
    cap: u32,
) -> Result<ReadoutResult> {
    let dense = populations.to_dense(cap)?;
    let mut r = compression_readout_exact(&dense, noise, architecture)?;
    if let Some(d) = &r.distribution {
        r.tv_error = tv_error_sparse(d, populations)?;
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn meta(
    n: u32,
    readout: &ReadoutErrorModel,
    gamma: f64,
    architecture: Option<Architecture>,
    gate_count: Option<u64>,
    shots: Option<u64>,
    seed: Option<u64>,
    repetition: Option<u32>,
) -> ResultMeta {
    ResultMeta {
        n,
        readout: *readout,
        gamma,
        architecture,
        gate_count,
        shots,
        seed,
        repetition,
    }
}

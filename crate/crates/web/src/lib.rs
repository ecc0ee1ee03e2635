//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use compression_readout::engines::{
    compression_readout_exact, compression_readout_sampled, compression_readout_sparse_exact,
    direct_readout_exact, direct_readout_exact_sparse, direct_readout_sampled, effective_gate_count,
};
use compression_readout::experiments::runner::mean_sem;
use compression_readout::grid::{ancilla_profile as ideal_profile, build_grid, Architecture};
use compression_readout::noise::{noisy_ancilla_probability, NoiseModel, ReadoutErrorModel};
use compression_readout::state::{make_state_with, State, StateSpec, DEFAULT_DENSE_CAP};
use compression_readout::{Error, Result};

/// Largest register the page will simulate densely.
pub const DENSE_LIMIT: u32 = 14;

fn spec(kind: &str, seed: u64) -> Result<StateSpec> {
    Ok(match kind {
        "all-ones" => StateSpec::AllOnes,
        "all-zeros" => StateSpec::AllZeros,
        "uniform" => StateSpec::Uniform,
        "haar" => StateSpec::Haar { seed: Some(seed) },
        other => return Err(Error::Config(format!("unknown state '{other}'"))),
    })
}

fn noise(xi: f64, gamma: f64) -> Result<NoiseModel> {
    NoiseModel::new(ReadoutErrorModel::symmetric(xi)?, gamma)
}

fn dense(kind: &str, n: u32, seed: u64) -> Result<Vec<f64>> {
    if n > DENSE_LIMIT {
        return Err(Error::Config(format!("n = {n} exceeds the demo limit of {DENSE_LIMIT}")));
    }
    make_state_with(&spec(kind, seed)?, n, DEFAULT_DENSE_CAP, seed)?.dense_populations(DEFAULT_DENSE_CAP)
}

/// Ideal and noisy ancilla profile over the grid, plus the decoded populations.
/// `shots = 0` decodes the infinite-shot profile.
pub fn profile(n: u32, state: &str, seed: u64, xi: f64, gamma: f64, shots: u64) -> Result<Value> {
    let w = dense(state, n, seed)?;
    let grid = build_grid(n)?;
    let model = noise(xi, gamma)?;
    let arch = Architecture::FullyConnected;
    let gates = effective_gate_count(&model, arch, n);
    let ideal = ideal_profile(&w, &grid)?;
    let noisy: Vec<f64> = ideal
        .iter()
        .map(|a| noisy_ancilla_probability(*a, &model.readout, model.gate.gamma, gates))
        .collect();
    let result = if shots == 0 {
        compression_readout_exact(&w, &model, arch)?
    } else {
        compression_readout_sampled(&w, &model, arch, shots, seed, 0)?
    };
    Ok(json!({
        "x": grid.points().collect::<Vec<_>>(),
        "ideal": ideal,
        "noisy": noisy,
        "truth": w,
        "decoded": result.distribution,
        "tv_error": result.tv_error,
    }))
}

/// Infinite-shot error of both methods for `n = 1..=n_max`.
pub fn curves(state: &str, seed: u64, xi: f64, gamma: f64, architecture: &str, n_max: u32) -> Result<Value> {
    let model = noise(xi, gamma)?;
    let arch: Architecture = architecture.parse()?;
    let spec = spec(state, seed)?;
    let limit = if spec.is_sparse() { n_max.min(1000) } else { n_max.min(DENSE_LIMIT) };
    let (mut ns, mut direct, mut compression) = (Vec::new(), Vec::new(), Vec::new());
    for n in 1..=limit {
        let (d, c) = match make_state_with(&spec, n, DEFAULT_DENSE_CAP, seed)? {
            State::Sparse(s) => (
                direct_readout_exact_sparse(&s, &model.readout, DEFAULT_DENSE_CAP)?.tv_error,
                compression_readout_sparse_exact(&s, &model, effective_gate_count(&model, arch, n), DEFAULT_DENSE_CAP)?
                    .tv_error,
            ),
            State::Dense(a) => {
                let w = a.populations();
                (
                    direct_readout_exact(&w, &model.readout)?.tv_error,
                    compression_readout_exact(&w, &model, arch)?.tv_error,
                )
            }
        };
        ns.push(n);
        direct.push(d);
        compression.push(c);
    }
    Ok(json!({ "n": ns, "direct": direct, "compression": compression }))
}

/// Mean sampled error of both methods over a 1-2-5 shot ladder up to `10^7`.
pub fn convergence(n: u32, state: &str, seed: u64, xi: f64, gamma: f64, reps: u32) -> Result<Value> {
    let w = dense(state, n, seed)?;
    let model = noise(xi, gamma)?;
    let arch = Architecture::FullyConnected;
    let m = (1u64 << n) - 1;
    let ladder: Vec<u64> = (0..7u32)
        .flat_map(|p| [1, 2, 5].map(|k| k * 10u64.pow(p) * 100))
        .filter(|s| *s >= m && *s <= 10_000_000)
        .collect();
    let reps = reps.max(1);
    let (mut direct, mut compression, mut direct_sem, mut compression_sem) = (vec![], vec![], vec![], vec![]);
    for &shots in &ladder {
        let mut d = Vec::with_capacity(reps as usize);
        let mut c = Vec::with_capacity(reps as usize);
        for r in 0..reps {
            d.push(direct_readout_sampled(&w, &model.readout, shots, seed, r)?.tv_error);
            c.push(compression_readout_sampled(&w, &model, arch, shots, seed, r)?.tv_error);
        }
        let (dm, ds) = mean_sem(&d);
        let (cm, cs) = mean_sem(&c);
        direct.push(dm);
        direct_sem.push(ds);
        compression.push(cm);
        compression_sem.push(cs);
    }
    Ok(json!({
        "shots": ladder,
        "direct": direct,
        "direct_sem": direct_sem,
        "compression": compression,
        "compression_sem": compression_sem,
        "exact_direct": direct_readout_exact(&w, &model.readout)?.tv_error,
        "exact_compression": compression_readout_exact(&w, &model, arch)?.tv_error,
    }))
}

fn to_js(v: Result<Value>) -> std::result::Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = ancillaProfile)]
pub fn ancilla_profile(n: u32, state: &str, seed: u64, xi: f64, gamma: f64, shots: u64) -> std::result::Result<String, JsError> {
    to_js(profile(n, state, seed, xi, gamma, shots))
}

#[wasm_bindgen(js_name = errorCurves)]
pub fn error_curves(
    state: &str,
    seed: u64,
    xi: f64,
    gamma: f64,
    architecture: &str,
    n_max: u32,
) -> std::result::Result<String, JsError> {
    to_js(curves(state, seed, xi, gamma, architecture, n_max))
}

#[wasm_bindgen(js_name = shotConvergence)]
pub fn shot_convergence(n: u32, state: &str, seed: u64, xi: f64, gamma: f64, reps: u32) -> std::result::Result<String, JsError> {
    to_js(convergence(n, state, seed, xi, gamma, reps))
}

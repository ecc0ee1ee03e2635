//! Sweep execution. Cells run in parallel and are merged in table order.

use rand::RngCore;

use super::config::{AdvantageMapConfig, ExperimentConfig, MapAxis, Refinement, Task};
use super::output::{ResultRecord, ResultTable};
use crate::engines::{
    compression_readout_exact, compression_readout_sampled, compression_readout_sparse_exact,
    direct_readout_exact, direct_readout_exact_sparse, direct_readout_sampled, effective_gate_count,
};
use crate::error::{Error, Result};
use crate::grid::{build_grid, Architecture};
use crate::noise::{device_profile, NoiseModel, ReadoutErrorModel};
use crate::rng::{cell_seed, Lane, StreamKey};
use crate::state::{make_state_with, State, StateSpec};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const STATE_SALT: u64 = 0x5EED_57A7_E000_0001;
const DEFAULT_MAP_SHOTS: u64 = 1_000_000;

/// Mean and standard error (sample standard deviation over `√R`).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Per-repetition errors for both methods at one sweep cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellOutcome {
    pub direct: Vec<f64>,
    pub compression: Vec<f64>,
    pub direct_exact: Vec<f64>,
    pub compression_exact: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    n: u32,
    noise: NoiseModel,
    shots: Option<u64>,
    state_seed: u64,
    sample_seed: u64,
}

fn resamples_per_rep(spec: &StateSpec) -> bool {
    matches!(spec, StateSpec::Haar { seed: None })
}

/// State used in repetition `rep`; unseeded Haar specs draw from the
/// `State` lane of `state_seed`.
pub fn repetition_state(spec: &StateSpec, n: u32, cap: u32, state_seed: u64, rep: u32) -> Result<State> {
    let haar_seed = StreamKey::new(state_seed, rep, Lane::State).rng().next_u64();
    make_state_with(spec, n, cap, haar_seed)
}

fn prepare_state(cfg: &ExperimentConfig, n: u32, state_seed: u64, rep: u32) -> Result<State> {
    repetition_state(&cfg.state, n, cfg.dense_cap, state_seed, rep)
}

fn exact_pair(state: &State, noise: &NoiseModel, arch: Architecture, cap: u32) -> Result<(f64, f64)> {
    match state {
        State::Sparse(s) => {
            let d = direct_readout_exact_sparse(s, &noise.readout, cap)?;
            let gates = effective_gate_count(noise, arch, s.n());
            let c = compression_readout_sparse_exact(s, noise, gates, cap)?;
            Ok((d.tv_error, c.tv_error))
        }
        State::Dense(a) => {
            let pops = a.populations();
            let d = direct_readout_exact(&pops, &noise.readout)?;
            let c = compression_readout_exact(&pops, noise, arch)?;
            Ok((d.tv_error, c.tv_error))
        }
    }
}

fn evaluate(cfg: &ExperimentConfig, cell: &Cell, want_exact: bool) -> Result<CellOutcome> {
    let reps = cfg.repetitions;
    let per_rep = resamples_per_rep(&cfg.state);
    let distinct = if per_rep { reps } else { 1 };
    let states = (0..distinct)
        .map(|r| prepare_state(cfg, cell.n, cell.state_seed, r))
        .collect::<Result<Vec<_>>>()?;
    let mut out = CellOutcome::default();
    if want_exact {
        for s in &states {
            let (d, c) = exact_pair(s, &cell.noise, cfg.architecture, cfg.dense_cap)?;
            out.direct_exact.push(d);
            out.compression_exact.push(c);
        }
    }
    if let Some(shots) = cell.shots {
        for r in 0..reps {
            let state = &states[if per_rep { r as usize } else { 0 }];
            let pops = state.dense_populations(cfg.dense_cap)?;
            let d = direct_readout_sampled(&pops, &cell.noise.readout, shots, cell.sample_seed, r)?;
            let c = compression_readout_sampled(&pops, &cell.noise, cfg.architecture, shots, cell.sample_seed, r)?;
            out.direct.push(d.tv_error);
            out.compression.push(c.tv_error);
        }
    }
    Ok(out)
}

fn evaluate_all(cfg: &ExperimentConfig, cells: &[Cell], want_exact: bool) -> Result<Vec<CellOutcome>> {
    #[cfg(feature = "parallel")]
    return cells.par_iter().map(|c| evaluate(cfg, c, want_exact)).collect();
    #[cfg(not(feature = "parallel"))]
    cells.iter().map(|c| evaluate(cfg, c, want_exact)).collect()
}

/// Runs `cfg`, on a dedicated pool of `threads` workers when given.
/// Output does not depend on the thread count.
pub fn run(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ResultTable> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    if let Some(k) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        return pool.install(|| dispatch(cfg));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    dispatch(cfg)
}

fn dispatch(cfg: &ExperimentConfig) -> Result<ResultTable> {
    match cfg.task {
        Task::SweepN | Task::Single => run_sweep_n(cfg),
        Task::SweepShots => run_sweep_shots(cfg),
        Task::AdvantageMap => run_advantage_map(cfg),
        Task::Crossover => run_crossover(cfg),
    }
}

fn state_seed(cfg: &ExperimentConfig, n: u32) -> u64 {
    cell_seed(cfg.seed ^ STATE_SALT, n as u64)
}

fn base_record(cfg: &ExperimentConfig, n: Option<u32>, noise: &NoiseModel, method: &str) -> ResultRecord {
    let readout = noise.readout;
    ResultRecord {
        task: cfg.task.as_str().to_string(),
        n,
        state: cfg.label(),
        method: method.to_string(),
        xi: match readout {
            ReadoutErrorModel::Symmetric { xi } => Some(xi),
            ReadoutErrorModel::Asymmetric { .. } => None,
        },
        e0: Some(readout.e0()),
        e1: Some(readout.e1()),
        gamma: Some(noise.gate.gamma),
        g_mode: match noise.gate.gate_count_override {
            Some(_) => "override".to_string(),
            None => cfg.architecture.to_string(),
        },
        gate_count: n.map(|n| effective_gate_count(noise, cfg.architecture, n)),
        seed: cfg.seed,
        ..Default::default()
    }
}

fn method_rows(
    cfg: &ExperimentConfig,
    cell: &Cell,
    out: &CellOutcome,
    scale: Option<f64>,
) -> Vec<ResultRecord> {
    let mut rows = Vec::with_capacity(2);
    for (method, sampled, exact) in [
        ("direct", &out.direct, &out.direct_exact),
        ("compression", &out.compression, &out.compression_exact),
    ] {
        let values = if cell.shots.is_some() { sampled } else { exact };
        let (mean, sem) = mean_sem(values);
        let mut r = base_record(cfg, Some(cell.n), &cell.noise, method);
        r.shots = cell.shots;
        r.rep_count = values.len() as u32;
        r.mean_e = Some(mean);
        r.sem_e = Some(sem);
        r.exact_e = (!exact.is_empty()).then(|| mean_sem(exact).0);
        r.scale = scale;
        r.rep_e = values.clone();
        rows.push(r);
    }
    rows
}

/// Mean error against `n` at fixed noise, exact and/or at each listed shot total.
pub fn run_sweep_n(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let noise = cfg.noise_model()?;
    let mut cells = Vec::new();
    for n in cfg.n_values() {
        let seed = state_seed(cfg, n);
        if cfg.mode.exact() {
            cells.push((n, None, seed));
        }
        if cfg.mode.sampled() {
            cells.extend(cfg.shots.iter().map(|&s| (n, Some(s), seed)));
        }
    }
    let cells: Vec<Cell> = cells
        .into_iter()
        .enumerate()
        .map(|(i, (n, shots, state_seed))| Cell {
            n,
            noise,
            shots,
            state_seed,
            sample_seed: cell_seed(cfg.seed, i as u64),
        })
        .collect();
    let outcomes = evaluate_all(cfg, &cells, true)?;
    Ok(ResultTable {
        rows: cells
            .iter()
            .zip(&outcomes)
            .flat_map(|(c, o)| method_rows(cfg, c, o, None))
            .collect(),
    })
}

fn check_ladder(ladder: &[u64], n: u32) -> Result<()> {
    let m = build_grid(n)?.m();
    if let Some(&s) = ladder.iter().find(|&&s| s < m) {
        return Err(Error::TooFewShots {
            shots: s,
            grid_points: m,
        });
    }
    Ok(())
}

/// Mean error against total shot count.
pub fn run_sweep_shots(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let noise = cfg.noise_model()?;
    let mut cells = Vec::new();
    for n in cfg.n_values() {
        check_ladder(&cfg.shots, n)?;
        for &s in &cfg.shots {
            cells.push(Cell {
                n,
                noise,
                shots: Some(s),
                state_seed: state_seed(cfg, n),
                sample_seed: cell_seed(cfg.seed, cells.len() as u64),
            });
        }
    }
    let outcomes = evaluate_all(cfg, &cells, true)?;
    Ok(ResultTable {
        rows: cells
            .iter()
            .zip(&outcomes)
            .flat_map(|(c, o)| method_rows(cfg, c, o, None))
            .collect(),
    })
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::Config(format!("degenerate grid [{lo}, {hi}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

fn map_readout(map: &AdvantageMapConfig, base: &NoiseModel, value: f64) -> Result<ReadoutErrorModel> {
    match map.axis {
        MapAxis::GammaXi => ReadoutErrorModel::symmetric(value),
        MapAxis::GammaScale => base.readout.scaled(value),
    }
}

/// Direct-to-compression error ratio over a (γ, readout) grid.
///
/// Emits `direct`, `compression` and `ratio` rows per cell (`ratio ≥ 1`
/// marks a compression advantage), then one `marker:<device>` row per
/// requested device at its published coordinates.
pub fn run_advantage_map(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let map = cfg
        .advantage_map
        .as_ref()
        .ok_or_else(|| Error::Config("missing [advantage_map] table".into()))?;
    let base = cfg.noise_model()?;
    let gammas = log_space(map.gamma[0], map.gamma[1], map.gamma_points)?;
    let axis = log_space(map.readout[0], map.readout[1], map.readout_points)?;
    if gammas.iter().any(|g| *g >= 1.0) {
        return Err(Error::Config("gamma axis must stay below 1".into()));
    }
    let shots = if cfg.mode.sampled() {
        Some(cfg.shots.first().copied().unwrap_or(DEFAULT_MAP_SHOTS))
    } else {
        None
    };
    let mut cells = Vec::new();
    let mut scales = Vec::new();
    for n in cfg.n_values() {
        if let Some(s) = shots {
            check_ladder(&[s], n)?;
        }
        for &v in &axis {
            let readout = map_readout(map, &base, v)?;
            for &g in &gammas {
                let mut noise = base;
                noise.readout = readout;
                noise.gate.gamma = g;
                noise.validate()?;
                cells.push(Cell {
                    n,
                    noise,
                    shots,
                    state_seed: state_seed(cfg, n),
                    sample_seed: cell_seed(cfg.seed, cells.len() as u64),
                });
                scales.push(matches!(map.axis, MapAxis::GammaScale).then_some(v));
            }
        }
    }
    let outcomes = evaluate_all(cfg, &cells, true)?;
    let mut rows = Vec::with_capacity(cells.len() * 3 + map.markers.len());
    for ((c, o), scale) in cells.iter().zip(&outcomes).zip(&scales) {
        let pair = method_rows(cfg, c, o, *scale);
        let mut ratio = base_record(cfg, Some(c.n), &c.noise, "ratio");
        ratio.shots = c.shots;
        ratio.scale = *scale;
        ratio.rep_count = pair[0].rep_count;
        ratio.ratio = Some(pair[0].mean_e.unwrap_or(f64::NAN) / pair[1].mean_e.unwrap_or(f64::NAN));
        rows.extend(pair);
        rows.push(ratio);
    }
    for name in &map.markers {
        let dev = device_profile(name)?;
        let readout = match map.axis {
            MapAxis::GammaXi => dev.symmetric(),
            MapAxis::GammaScale => dev.asymmetric()?,
        };
        let noise = NoiseModel::new(readout, dev.gamma)?;
        let mut r = base_record(cfg, None, &noise, &format!("marker:{}", dev.name));
        r.scale = matches!(map.axis, MapAxis::GammaScale).then_some(1.0);
        rows.push(r);
    }
    Ok(ResultTable { rows })
}

/// Smallest shot count at which mean compression error is no larger than
/// mean direct error, from paired ladder means. `None` when the ladder
/// never crosses.
pub fn crossing_point(shots: &[u64], direct: &[f64], compression: &[f64], refine: Refinement) -> Option<f64> {
    let diff: Vec<f64> = compression.iter().zip(direct).map(|(c, d)| c - d).collect();
    let idx = diff.iter().position(|d| *d <= 0.0)?;
    if idx == 0 || refine == Refinement::Ladder {
        return Some(shots[idx] as f64);
    }
    let (lo, hi) = ((shots[idx - 1] as f64).ln(), (shots[idx] as f64).ln());
    let (dlo, dhi) = (diff[idx - 1], diff[idx]);
    Some((lo + (hi - lo) * dlo / (dlo - dhi)).exp())
}

/// First shot count at which `means` drops to `threshold`, interpolating
/// linearly in `log N` between ladder rungs.
pub fn shots_to_reach(shots: &[u64], means: &[f64], threshold: f64) -> Option<f64> {
    let idx = means.iter().position(|m| *m <= threshold)?;
    if idx == 0 {
        return Some(shots[0] as f64);
    }
    let (lo, hi) = ((shots[idx - 1] as f64).ln(), (shots[idx] as f64).ln());
    let (mlo, mhi) = (means[idx - 1], means[idx]);
    Some((lo + (hi - lo) * (mlo - threshold) / (mlo - mhi)).exp())
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Crossover shot count per `n` and a log-linear fit `log10 N_adv = s·n + c`.
///
/// Ladder rungs below `m` are skipped for that `n`. Rows: the per-rung
/// method means, one `crossover` row per `n` (empty `shots` when the ladder
/// never crosses), and a final `fit` row.
pub fn run_crossover(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let noise = cfg.noise_model()?;
    let refine = cfg.crossover.as_ref().map(|c| c.refine).unwrap_or_default();
    let mut cells = Vec::new();
    let mut spans = Vec::new();
    for n in cfg.n_values() {
        let m = build_grid(n)?.m();
        let start = cells.len();
        for &s in cfg.shots.iter().filter(|&&s| s >= m) {
            cells.push(Cell {
                n,
                noise,
                shots: Some(s),
                state_seed: state_seed(cfg, n),
                sample_seed: cell_seed(cfg.seed, cells.len() as u64),
            });
        }
        spans.push((n, start..cells.len()));
    }
    let outcomes = evaluate_all(cfg, &cells, false)?;
    let mut rows = Vec::new();
    let mut fit_points = (Vec::new(), Vec::new());
    for (n, span) in spans {
        let mut ladder = Vec::new();
        let mut direct = Vec::new();
        let mut compression = Vec::new();
        for i in span {
            let pair = method_rows(cfg, &cells[i], &outcomes[i], None);
            ladder.push(cells[i].shots.expect("sampled cell"));
            direct.push(pair[0].mean_e.expect("mean present"));
            compression.push(pair[1].mean_e.expect("mean present"));
            rows.extend(pair);
        }
        let crossing = crossing_point(&ladder, &direct, &compression, refine);
        let mut r = base_record(cfg, Some(n), &noise, "crossover");
        r.rep_count = cfg.repetitions;
        r.shots = crossing.map(|v| v.round() as u64);
        if let Some(v) = crossing {
            fit_points.0.push(n as f64);
            fit_points.1.push(v.log10());
        }
        rows.push(r);
    }
    let mut fit = base_record(cfg, None, &noise, "fit");
    fit.rep_count = cfg.repetitions;
    if let Some((s, c)) = linear_fit(&fit_points.0, &fit_points.1) {
        fit.slope = Some(s);
        fit.intercept = Some(c);
    }
    rows.push(fit);
    Ok(ResultTable { rows })
}

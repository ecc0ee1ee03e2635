use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use compression_readout::bounds::shots_report;
use compression_readout::engines::{
    compression_readout_exact, compression_readout_sampled, compression_readout_sparse_exact,
    direct_readout_exact, direct_readout_exact_sparse, direct_readout_sampled, effective_gate_count, ReadoutResult,
};
use compression_readout::experiments::{repetition_state, run, ExperimentConfig, Format, RunMetadata};
use compression_readout::grid::{build_encoding_circuit, build_grid};
use compression_readout::state::State;
use compression_readout::{Error, Result};

#[derive(Parser)]
#[command(name = "compression-readout", version, about = "Compression readout versus direct readout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one (state, noise, method, shots) configuration and print JSON.
    Simulate(SimulateArgs),
    /// Error against qubit count.
    SweepN(Common),
    /// Error against total shot count.
    SweepShots(Common),
    /// Direct/compression error ratio over a noise-rate grid.
    AdvantageMap(Common),
    /// Shot count at which compression overtakes direct readout.
    Crossover(Common),
    /// Per-grid-point shot budget for a target accuracy and confidence.
    ShotsBound(BoundArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Device profile name.
    #[arg(long)]
    profile: Option<String>,
    /// Config override `dotted.key=value`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Qubit count.
    #[arg(long)]
    n: Option<u32>,
    /// all-ones, all-zeros, uniform, haar, haar:SEED or basis:INDEX.
    #[arg(long)]
    state: Option<String>,
    /// direct, compression or both.
    #[arg(long, default_value = "both")]
    method: String,
    /// Total shots; exact (infinite-shot) mode when absent.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    e0: Option<f64>,
    #[arg(long)]
    e1: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// fully-connected, nearest-neighbor-walk or paper-count.
    #[arg(long)]
    architecture: Option<String>,
    /// Write the encoding CircuitPlan at grid point `--grid-point` as JSON.
    #[arg(long, value_name = "PATH")]
    dump_circuit: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    grid_point: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

const SIMULATE_BASE: &str = "task = \"single\"\nn = [3]\n[state]\nkind = \"all-zeros\"\n";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            report("usage", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(e.kind(), &e.to_string());
            ExitCode::from(1)
        }
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::SweepN(c) => sweep("sweep-n", c),
        Command::SweepShots(c) => sweep("sweep-shots", c),
        Command::AdvantageMap(c) => sweep("advantage-map", c),
        Command::Crossover(c) => sweep("crossover", c),
        Command::ShotsBound(b) => {
            let report = shots_report(b.n, b.epsilon, b.eta)?;
            emit(b.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
        }
    }
}

fn quoted(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}

fn common_overrides(task: &str, c: &Common) -> Vec<String> {
    let mut o = c.overrides.clone();
    o.push(format!("task={}", quoted(task)));
    if let Some(s) = c.seed {
        o.push(format!("seed={s}"));
    }
    if let Some(p) = &c.profile {
        o.push(format!("noise.profile={}", quoted(p)));
    }
    o
}

fn load(c: &Common, overrides: &[String], fallback: Option<&str>) -> Result<ExperimentConfig> {
    match (&c.config, fallback) {
        (Some(path), _) => ExperimentConfig::load(path, overrides),
        (None, Some(base)) => ExperimentConfig::from_toml_with_overrides(base, overrides),
        (None, None) => Err(Error::Config("--config is required".into())),
    }
}

fn resolve_format(c: &Common, cfg: &ExperimentConfig, out: Option<&Path>) -> Format {
    c.format.or(cfg.format).unwrap_or_else(|| match out.and_then(|p| p.extension()) {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    })
}

fn sweep(task: &str, c: Common) -> Result<()> {
    let cfg = load(&c, &common_overrides(task, &c), None)?;
    let table = run(&cfg, c.threads)?;
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let out = c.out.clone().or_else(|| cfg.output.clone());
    let format = resolve_format(&c, &cfg, out.as_deref());
    emit(out.as_deref(), &table.render(format)?)?;
    if let Some(path) = out {
        let mut meta = path.into_os_string();
        meta.push(".meta.json");
        std::fs::write(meta, RunMetadata::new(&cfg).to_json_string()?)?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn state_overrides(spec: &str) -> Result<Vec<String>> {
    let (kind, arg) = spec.split_once(':').map_or((spec, None), |(k, a)| (k, Some(a)));
    let mut o = vec![format!("state={{ kind = {} }}", quoted(kind))];
    match (kind, arg) {
        ("basis", Some(index)) => o.push(format!("state.index={}", quoted(index))),
        ("haar", Some(seed)) => o.push(format!("state.seed={seed}")),
        ("all-ones" | "all-zeros" | "uniform" | "haar", None) => {}
        _ => return Err(Error::Config(format!("unrecognized state '{spec}'"))),
    }
    Ok(o)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut o = common_overrides("single", &a.common);
    if let Some(n) = a.n {
        o.push(format!("n=[{n}]"));
    }
    if let Some(s) = &a.state {
        o.extend(state_overrides(s)?);
    }
    for (key, v) in [("xi", a.xi), ("e0", a.e0), ("e1", a.e1), ("gamma", a.gamma)] {
        if let Some(v) = v {
            o.push(format!("noise.{key}={v:?}"));
        }
    }
    if a.e0.is_some() || a.e1.is_some() {
        o.push("noise.readout=\"asymmetric\"".into());
    }
    if let Some(arch) = &a.architecture {
        o.push(format!("architecture={}", quoted(arch)));
    }
    if let Some(s) = a.shots {
        o.push(format!("shots=[{s}]"));
    }
    let cfg = load(&a.common, &o, Some(SIMULATE_BASE))?;
    let n = cfg.n_values()[0];
    let shots = a.shots.or_else(|| cfg.mode.sampled().then(|| cfg.shots.first().copied()).flatten());
    let noise = cfg.noise_model()?;
    let state = repetition_state(&cfg.state, n, cfg.dense_cap, cfg.seed, 0)?;

    if let Some(path) = &a.dump_circuit {
        let grid = build_grid(n)?;
        if a.grid_point == 0 || a.grid_point > grid.m() {
            return Err(Error::Config(format!("grid point {} outside 1..={}", a.grid_point, grid.m())));
        }
        let plan = build_encoding_circuit(n, grid.x(a.grid_point), cfg.architecture)?;
        std::fs::write(path, serde_json::to_string_pretty(&plan)? + "\n")?;
    }

    let (direct, compression) = match a.method.as_str() {
        "direct" => (true, false),
        "compression" => (false, true),
        "both" => (true, true),
        other => return Err(Error::Config(format!("unknown method '{other}'"))),
    };
    let mut results: Vec<ReadoutResult> = Vec::new();
    match (shots, &state) {
        (Some(total), _) => {
            let pops = state.dense_populations(cfg.dense_cap)?;
            if direct {
                results.push(direct_readout_sampled(&pops, &noise.readout, total, cfg.seed, 0)?);
            }
            if compression {
                results.push(compression_readout_sampled(&pops, &noise, cfg.architecture, total, cfg.seed, 0)?);
            }
        }
        (None, State::Sparse(s)) => {
            if direct {
                results.push(direct_readout_exact_sparse(s, &noise.readout, cfg.dense_cap)?);
            }
            if compression {
                let gates = effective_gate_count(&noise, cfg.architecture, n);
                results.push(compression_readout_sparse_exact(s, &noise, gates, cfg.dense_cap)?);
            }
        }
        (None, State::Dense(amp)) => {
            let pops = amp.populations();
            if direct {
                results.push(direct_readout_exact(&pops, &noise.readout)?);
            }
            if compression {
                results.push(compression_readout_exact(&pops, &noise, cfg.architecture)?);
            }
        }
    }
    let text = if results.len() == 1 {
        serde_json::to_string_pretty(&results[0])?
    } else {
        serde_json::to_string_pretty(&results)?
    };
    emit(a.common.out.as_deref(), &(text + "\n"))
}

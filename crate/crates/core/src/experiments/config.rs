//! Declarative experiment configuration (TOML) with `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Architecture;
use crate::noise::{device_profile, GateNoiseModel, NoiseModel, ReadoutErrorModel};
use crate::state::{StateSpec, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SweepN,
    SweepShots,
    AdvantageMap,
    Crossover,
    Single,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::SweepN => "sweep-n",
            Task::SweepShots => "sweep-shots",
            Task::AdvantageMap => "advantage-map",
            Task::Crossover => "crossover",
            Task::Single => "single",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Sampled,
    #[default]
    Both,
}

impl Mode {
    pub fn exact(self) -> bool {
        matches!(self, Mode::Exact | Mode::Both)
    }

    pub fn sampled(self) -> bool {
        matches!(self, Mode::Sampled | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutSymmetry {
    #[default]
    Symmetric,
    Asymmetric,
}

/// Noise settings: a device profile, then field-by-field overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub profile: Option<String>,
    #[serde(default)]
    pub readout: ReadoutSymmetry,
    pub xi: Option<f64>,
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    pub gamma: Option<f64>,
}

impl NoiseConfig {
    pub fn resolve(&self) -> Result<NoiseModel> {
        let profile = self.profile.as_deref().map(device_profile).transpose()?;
        let gamma = self.gamma.or(profile.as_ref().map(|p| p.gamma)).unwrap_or(0.0);
        let readout = match self.readout {
            ReadoutSymmetry::Symmetric => {
                let xi = self.xi.or(profile.as_ref().map(|p| p.xi)).unwrap_or(0.0);
                ReadoutErrorModel::symmetric(xi)?
            }
            ReadoutSymmetry::Asymmetric => {
                let base = match (&profile, self.e0, self.e1) {
                    (_, Some(e0), Some(e1)) => (e0, e1),
                    (Some(p), e0, e1) => {
                        let m = p.asymmetric()?;
                        (e0.unwrap_or(m.e0()), e1.unwrap_or(m.e1()))
                    }
                    (None, e0, e1) => (e0.unwrap_or(0.0), e1.unwrap_or(0.0)),
                };
                ReadoutErrorModel::asymmetric(base.0, base.1)?
            }
        };
        Ok(NoiseModel {
            readout,
            gate: GateNoiseModel {
                gamma,
                gate_count_override: None,
            },
        })
        .and_then(|m: NoiseModel| m.validate().map(|_| m))
    }
}

/// Qubit counts: an explicit list or an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NSelection {
    List(Vec<u32>),
    Range {
        from: u32,
        to: u32,
        #[serde(default = "one_u32")]
        step: u32,
    },
}

fn one_u32() -> u32 {
    1
}

impl NSelection {
    pub fn values(&self) -> Vec<u32> {
        match self {
            NSelection::List(v) => v.clone(),
            NSelection::Range { from, to, step } => (*from..=*to).step_by((*step).max(1) as usize).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapAxis {
    /// Depolarizing probability against symmetric flip rate.
    #[default]
    GammaXi,
    /// Depolarizing probability against a scale `k` on asymmetric base rates.
    GammaScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageMapConfig {
    #[serde(default)]
    pub axis: MapAxis,
    /// `[min, max]` depolarizing probability, log-spaced.
    pub gamma: [f64; 2],
    #[serde(default = "default_points")]
    pub gamma_points: usize,
    /// `[min, max]` of the readout axis (`ξ` or scale `k`), log-spaced.
    pub readout: [f64; 2],
    #[serde(default = "default_points")]
    pub readout_points: usize,
    #[serde(default)]
    pub markers: Vec<String>,
}

fn default_points() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refinement {
    /// First ladder rung where compression is at least as accurate.
    #[default]
    Ladder,
    /// Log-linear interpolation of the error difference between rungs.
    Interpolate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverConfig {
    #[serde(default)]
    pub refine: Refinement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub name: Option<String>,
    /// Free-text note on reductions relative to the full-scale experiment.
    #[serde(default)]
    pub notes: Option<String>,
    pub state: StateSpec,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default = "default_architecture")]
    pub architecture: Architecture,
    #[serde(default)]
    pub gate_count: Option<u64>,
    pub n: NSelection,
    #[serde(default)]
    pub shots: Vec<u64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "one_u32")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub dense_cap: u32,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub advantage_map: Option<AdvantageMapConfig>,
    #[serde(default)]
    pub crossover: Option<CrossoverConfig>,
}

fn default_architecture() -> Architecture {
    Architecture::FullyConnected
}

fn default_cap() -> u32 {
    DEFAULT_DENSE_CAP
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses TOML after applying `dotted.key=value` overrides to the document.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text)?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(doc).try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        Self::from_toml_with_overrides(&std::fs::read_to_string(path)?, overrides)
    }

    pub fn n_values(&self) -> Vec<u32> {
        self.n.values()
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        let mut m = self.noise.resolve()?;
        m.gate.gate_count_override = self.gate_count;
        Ok(m)
    }

    pub fn label(&self) -> String {
        self.state.label()
    }

    pub fn validate(&self) -> Result<()> {
        let ns = self.n_values();
        if ns.is_empty() {
            return Err(Error::Config("n selection is empty".into()));
        }
        if ns.contains(&0) {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        self.noise_model()?;
        match self.task {
            Task::SweepShots | Task::Crossover => {
                if self.shots.is_empty() {
                    return Err(Error::Config("shot ladder is empty".into()));
                }
                if self.shots.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("shot ladder must be strictly increasing".into()));
                }
            }
            Task::AdvantageMap => {
                let map = self
                    .advantage_map
                    .as_ref()
                    .ok_or_else(|| Error::Config("advantage-map task needs an [advantage_map] table".into()))?;
                for name in &map.markers {
                    device_profile(name)?;
                }
            }
            _ => {}
        }
        if self.task == Task::Crossover && self.repetitions < 10 {
            return Err(Error::Config("crossover needs at least 10 repetitions".into()));
        }
        if self.mode == Mode::Sampled && self.shots.is_empty() && self.task == Task::SweepN {
            return Err(Error::Config("sampled mode needs a shot list".into()));
        }
        Ok(())
    }
}

/// Sets `path.to.key` in `doc` to `value`, parsed as a TOML value when
/// possible and as a bare string otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut table = doc;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path '{key}' crosses a non-table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

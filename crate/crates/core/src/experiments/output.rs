//! Result rows and their CSV/JSON serialization.
//!
//! Every task writes the same column set, in this order:
//!
//! ```text
//! task,n,state,method,shots,xi,e0,e1,gamma,G_mode,rep_count,mean_E,sem_E,exact_E,seed,G,scale,ratio,slope,intercept,rep_E
//! ```
//!
//! Empty cells mean "not applicable". `rep_E` holds the per-repetition
//! errors joined by `;`. Floats use the shortest round-trip representation,
//! so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Format};
use crate::state::StateSpec;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 21] = [
    "task", "n", "state", "method", "shots", "xi", "e0", "e1", "gamma", "G_mode", "rep_count", "mean_E", "sem_E",
    "exact_E", "seed", "G", "scale", "ratio", "slope", "intercept", "rep_E",
];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultRecord {
    pub task: String,
    pub n: Option<u32>,
    pub state: String,
    pub method: String,
    pub shots: Option<u64>,
    pub xi: Option<f64>,
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(rename = "G_mode")]
    pub g_mode: String,
    pub rep_count: u32,
    #[serde(rename = "mean_E")]
    pub mean_e: Option<f64>,
    #[serde(rename = "sem_E")]
    pub sem_e: Option<f64>,
    #[serde(rename = "exact_E")]
    pub exact_e: Option<f64>,
    pub seed: u64,
    #[serde(rename = "G")]
    pub gate_count: Option<u64>,
    pub scale: Option<f64>,
    pub ratio: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    #[serde(rename = "rep_E")]
    pub rep_e: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRecord>,
}

impl ResultTable {
    /// Rows for one method at one `n`, in table order.
    pub fn select<'a>(&'a self, method: &'a str, n: u32) -> impl Iterator<Item = &'a ResultRecord> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.method == method && r.n == Some(n))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record(csv_fields(r))?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.rows)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv_string(),
            Format::Json => self.to_json_string(),
        }
    }
}

/// Writes `table` to `path` in `format`.
pub fn write_results(table: &ResultTable, path: &Path, format: Format) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    std::fs::write(path, table.render(format)?)?;
    Ok(())
}

/// Run description written next to a result file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a> {
    pub columns: &'static [&'static str],
    /// Whether random states are redrawn for every repetition or fixed.
    pub state_policy: &'static str,
    /// Advantage-map lattice, e.g. `20x20 log`.
    pub map_grid: Option<String>,
    pub config: &'a ExperimentConfig,
}

impl<'a> RunMetadata<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Self {
        let state_policy = match config.state {
            StateSpec::Haar { seed: None } => "haar-resampled-per-repetition",
            StateSpec::Haar { seed: Some(_) } => "haar-fixed-seed",
            _ => "deterministic",
        };
        let map_grid = config
            .advantage_map
            .as_ref()
            .map(|m| format!("{}x{} log", m.gamma_points, m.readout_points));
        Self {
            columns: &COLUMNS,
            state_policy,
            map_grid,
            config,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn float(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn int<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_fields(r: &ResultRecord) -> Vec<String> {
    let mut reps = String::new();
    for (i, v) in r.rep_e.iter().enumerate() {
        if i > 0 {
            reps.push(';');
        }
        write!(reps, "{v:?}").expect("write to string");
    }
    vec![
        r.task.clone(),
        int(r.n),
        r.state.clone(),
        r.method.clone(),
        int(r.shots),
        float(r.xi),
        float(r.e0),
        float(r.e1),
        float(r.gamma),
        r.g_mode.clone(),
        r.rep_count.to_string(),
        float(r.mean_e),
        float(r.sem_e),
        float(r.exact_e),
        r.seed.to_string(),
        int(r.gate_count),
        float(r.scale),
        float(r.ratio),
        float(r.slope),
        float(r.intercept),
        reps,
    ]
}

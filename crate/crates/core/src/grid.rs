//! Fourier sampling grid, encoding circuits and the ideal ancilla profile.
//!
//! For an `n`-qubit register the grid has `m = 2^n − 1` angles
//! `x_k = kπ/(2m+1)`, `k = 1..=m`. The encoding circuit rotates an ancilla
//! so that basis state `|i⟩` leaves it in `cos(i·x)|0⟩ + sin(i·x)|1⟩`, giving
//! the ancilla `|0⟩`-probability `A(x) = Σ_i w_i cos²(i·x)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::cosine_sums;
use crate::state::{AmplitudeState, SparsePopulations};

/// Largest register for which the grid count `2^n − 1` is tracked exactly.
pub const MAX_GRID_QUBITS: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: u32,
    m: u64,
}

impl GridSpec {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of grid points, `2^n − 1`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Period of the trapezoidal rule, `2m + 1`.
    pub fn period(&self) -> u64 {
        2 * self.m + 1
    }

    /// Angle of grid point `k` (1-based).
    pub fn x(&self, k: u64) -> f64 {
        debug_assert!((1..=self.m).contains(&k));
        k as f64 * PI / self.period() as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.m).map(|k| self.x(k))
    }
}

pub fn build_grid(n: u32) -> Result<GridSpec> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    if n > MAX_GRID_QUBITS {
        return Err(Error::DenseCapExceeded {
            n,
            cap: MAX_GRID_QUBITS,
        });
    }
    Ok(GridSpec {
        n,
        m: (1u64 << n) - 1,
    })
}

/// `A(x) = Σ_i w_i cos²(i·x)` over a dense population vector.
pub fn ideal_ancilla_probability(populations: &[f64], x: f64) -> f64 {
    populations
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(i, &w)| w * (i as f64 * x).rem_euclid(TAU).cos().powi(2))
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `A(x)` over sparse populations in `O(|support|)`.
///
/// Indices beyond 2^53 lose precision in the product `i·x`; use
/// [`sparse_ancilla_probability_on_grid`] for exact grid evaluation.
pub fn sparse_ancilla_probability(populations: &SparsePopulations, x: f64) -> f64 {
    populations
        .iter()
        .map(|(i, w)| {
            let i = i.to_f64().unwrap_or(f64::INFINITY);
            w * (i * x).rem_euclid(TAU).cos().powi(2)
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `A(x_k)` at grid point `k` with the phase `i·k mod (2m+1)` reduced exactly.
pub fn sparse_ancilla_probability_on_grid(
    populations: &SparsePopulations,
    grid: &GridSpec,
    k: u64,
) -> f64 {
    let period = grid.period();
    populations
        .iter()
        .map(|(i, w)| {
            let residue = ((i % period).to_u64().unwrap() as u128 * k as u128 % period as u128) as f64;
            w * (PI * residue / period as f64).cos().powi(2)
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `A(x_k)` for every grid point `k = 1..=m`, in `O(m log m)`.
///
/// Uses `A(x) = ½(1 + Σ_i w_i cos 2ix)` and one length-`(2m+1)` transform.
pub fn ancilla_profile(populations: &[f64], grid: &GridSpec) -> Result<Vec<f64>> {
    let dim = grid.m as usize + 1;
    if populations.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: populations.len(),
        });
    }
    let period = grid.period() as usize;
    let sums = cosine_sums(populations, period, dim);
    Ok(sums[1..]
        .iter()
        .map(|c| (0.5 * (1.0 + c)).clamp(0.0, 1.0))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    /// One controlled rotation per data qubit, all targeting the ancilla.
    FullyConnected,
    /// Ancilla walks down a linear chain by SWAPs.
    NearestNeighborWalk,
    /// Counts-only mode carrying the published nearest-neighbor compilation budget.
    PaperCount,
}

impl Architecture {
    /// Two-qubit gate count `G` used for depolarizing accounting.
    pub fn gate_count(self, n: u32) -> u64 {
        let n = n as u64;
        match self {
            Architecture::FullyConnected => n,
            Architecture::NearestNeighborWalk => 2 * n - 1,
            Architecture::PaperCount => n * (n + 1) / 2,
        }
    }

    pub fn depth(self, n: u32) -> u64 {
        let n = n as u64;
        match self {
            Architecture::FullyConnected => n,
            Architecture::NearestNeighborWalk => 2 * n - 1,
            // The compiled depth is quoted both as 2n−1 and as "no more than 2n".
            Architecture::PaperCount => 2 * n - 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::FullyConnected => "fully-connected",
            Architecture::NearestNeighborWalk => "nearest-neighbor-walk",
            Architecture::PaperCount => "paper-count",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fully-connected" => Ok(Architecture::FullyConnected),
            "nearest-neighbor-walk" => Ok(Architecture::NearestNeighborWalk),
            "paper-count" => Ok(Architecture::PaperCount),
            other => Err(Error::UnknownArchitecture(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// Conditioned on the control being `|1⟩`, maps the target
    /// `|0⟩ → cos θ|0⟩ + sin θ|1⟩` (a Y rotation by `2θ`).
    ControlledRotation,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// `(control, target)` for rotations; unordered pair for swaps.
    /// Indices are physical positions `0..=n`.
    pub qubits: (usize, usize),
    /// Rotation `θ` in radians, reduced into `[0, 2π)`.
    pub angle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitPlan {
    pub architecture: Architecture,
    pub n: u32,
    pub gates: Vec<Gate>,
    pub two_qubit_count: u64,
    pub depth: u64,
    /// Physical position of the ancilla before and after the circuit.
    pub ancilla_in: usize,
    pub ancilla_out: usize,
    /// Physical position of each data qubit `j` after the circuit.
    pub data_out: Vec<usize>,
}

impl CircuitPlan {
    pub fn has_gates(&self) -> bool {
        self.architecture != Architecture::PaperCount
    }
}

/// Builds the encoding circuit at angle `x`.
///
/// Positions `0..n` hold the data qubits and position `n` the ancilla.
pub fn build_encoding_circuit(n: u32, x: f64, architecture: Architecture) -> Result<CircuitPlan> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    let nq = n as usize;
    let theta = |j: usize| -> f64 {
        // 2^j scaling is exact in binary floating point
        let scaled = x * (1u64 << j.min(63)) as f64;
        scaled.rem_euclid(TAU)
    };
    let rotation = |control: usize, target: usize, j: usize| Gate {
        kind: GateKind::ControlledRotation,
        qubits: (control, target),
        angle: Some(theta(j)),
    };
    let (gates, ancilla_out, data_out) = match architecture {
        Architecture::FullyConnected => {
            let gates = (0..nq).map(|j| rotation(j, nq, j)).collect();
            (gates, nq, (0..nq).collect())
        }
        Architecture::NearestNeighborWalk => {
            let mut gates = Vec::with_capacity(2 * nq - 1);
            for j in (0..nq).rev() {
                gates.push(rotation(j, j + 1, j));
                if j > 0 {
                    gates.push(Gate {
                        kind: GateKind::Swap,
                        qubits: (j, j + 1),
                        angle: None,
                    });
                }
            }
            (gates, 1, std::iter::once(0).chain(2..=nq).collect())
        }
        Architecture::PaperCount => (Vec::new(), nq, (0..nq).collect()),
    };
    Ok(CircuitPlan {
        architecture,
        n,
        gates,
        two_qubit_count: architecture.gate_count(n),
        depth: architecture.depth(n),
        ancilla_in: nq,
        ancilla_out,
        data_out,
    })
}

/// Statevector simulation of `plan` on `|ψ⟩|0⟩`, returning the ancilla's
/// `|0⟩`-probability.
pub fn simulate_circuit_ancilla(state: &AmplitudeState, plan: &CircuitPlan) -> Result<f64> {
    if !plan.has_gates() {
        return Err(Error::NoGateList);
    }
    if state.n() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: 1usize << plan.n,
            got: state.amplitudes().len(),
        });
    }
    // ancilla starts in |0⟩ at position n, so the data index is the full index
    let mut v = vec![Complex64::new(0.0, 0.0); 1usize << (plan.n + 1)];
    v[..state.amplitudes().len()].copy_from_slice(state.amplitudes());

    for gate in &plan.gates {
        let (a, b) = gate.qubits;
        let (ma, mb) = (1usize << a, 1usize << b);
        match gate.kind {
            GateKind::ControlledRotation => {
                let (s, c) = gate.angle.unwrap_or(0.0).sin_cos();
                for idx in 0..v.len() {
                    if idx & ma != 0 && idx & mb == 0 {
                        let (z, o) = (v[idx], v[idx | mb]);
                        v[idx] = z * c - o * s;
                        v[idx | mb] = z * s + o * c;
                    }
                }
            }
            GateKind::Swap => {
                for idx in 0..v.len() {
                    if idx & ma != 0 && idx & mb == 0 {
                        v.swap(idx, idx ^ ma ^ mb);
                    }
                }
            }
        }
    }
    let anc = 1usize << plan.ancilla_out;
    Ok(v.iter()
        .enumerate()
        .filter(|(idx, _)| idx & anc == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

//! Readout bit-flip and gate depolarizing noise.
//!
//! Gate noise is tracked through the scalar survival fidelity
//! `f = (1 − γ)^G`. The decoder only ever sees the ancilla marginal, and the
//! maximally mixed state contributes exactly ½ to it, so after `G` noisy gates
//! the ancilla reads `f·A + (1 − f)/2` regardless of register size.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::qubits_for_len;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReadoutErrorModel {
    /// Each measured bit flips with probability `xi`.
    Symmetric { xi: f64 },
    /// `e0 = P(read 1 | 0)`, `e1 = P(read 0 | 1)`.
    Asymmetric { e0: f64, e1: f64 },
}

impl ReadoutErrorModel {
    pub const NOISELESS: Self = ReadoutErrorModel::Symmetric { xi: 0.0 };

    pub fn symmetric(xi: f64) -> Result<Self> {
        let m = ReadoutErrorModel::Symmetric { xi };
        m.validate()?;
        Ok(m)
    }

    pub fn asymmetric(e0: f64, e1: f64) -> Result<Self> {
        let m = ReadoutErrorModel::Asymmetric { e0, e1 };
        m.validate()?;
        Ok(m)
    }

    pub fn e0(&self) -> f64 {
        match *self {
            ReadoutErrorModel::Symmetric { xi } => xi,
            ReadoutErrorModel::Asymmetric { e0, .. } => e0,
        }
    }

    pub fn e1(&self) -> f64 {
        match *self {
            ReadoutErrorModel::Symmetric { xi } => xi,
            ReadoutErrorModel::Asymmetric { e1, .. } => e1,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.e0() == self.e1()
    }

    /// Every rate must lie in `[0, 0.5)`.
    pub fn validate(&self) -> Result<()> {
        check_flip_rate("e0", self.e0())?;
        check_flip_rate("e1", self.e1())
    }

    /// Scales both rates by `k` (readout-scale axis of asymmetric advantage maps).
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let m = match *self {
            ReadoutErrorModel::Symmetric { xi } => ReadoutErrorModel::Symmetric { xi: k * xi },
            ReadoutErrorModel::Asymmetric { e0, e1 } => ReadoutErrorModel::Asymmetric {
                e0: k * e0,
                e1: k * e1,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for ReadoutErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadoutErrorModel::Symmetric { xi } => write!(f, "symmetric(xi={xi})"),
            ReadoutErrorModel::Asymmetric { e0, e1 } => write!(f, "asymmetric(e0={e0}, e1={e1})"),
        }
    }
}

fn check_flip_rate(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..0.5).contains(&value) {
        return Err(Error::InvalidRate {
            name,
            value,
            reason: "flip rates must lie in [0, 0.5)",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateNoiseModel {
    pub gamma: f64,
    #[serde(default)]
    pub gate_count_override: Option<u64>,
}

impl GateNoiseModel {
    pub const NOISELESS: Self = GateNoiseModel {
        gamma: 0.0,
        gate_count_override: None,
    };

    pub fn new(gamma: f64) -> Result<Self> {
        let m = GateNoiseModel {
            gamma,
            gate_count_override: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidRate {
                name: "gamma",
                value: self.gamma,
                reason: "depolarizing probability must lie in [0, 1)",
            });
        }
        Ok(())
    }

    /// Gate count to charge: the override if set, else `default`.
    pub fn gate_count(&self, default: u64) -> u64 {
        self.gate_count_override.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout: ReadoutErrorModel,
    pub gate: GateNoiseModel,
}

impl NoiseModel {
    pub const NOISELESS: Self = NoiseModel {
        readout: ReadoutErrorModel::NOISELESS,
        gate: GateNoiseModel::NOISELESS,
    };

    pub fn new(readout: ReadoutErrorModel, gamma: f64) -> Result<Self> {
        readout.validate()?;
        Ok(NoiseModel {
            readout,
            gate: GateNoiseModel::new(gamma)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.readout.validate()?;
        self.gate.validate()
    }
}

/// Survival fidelity `(1 − γ)^G` after `G` depolarizing gates.
pub fn depolarizing_fidelity(gamma: f64, gates: u64) -> f64 {
    if gates == 0 || gamma == 0.0 {
        return 1.0;
    }
    (gates as f64 * (-gamma).ln_1p()).exp()
}

/// The ancilla read-0 probability is affine in the ideal one:
/// `Ã = slope·A + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaTransform {
    pub slope: f64,
    pub offset: f64,
}

impl AncillaTransform {
    pub fn new(readout: &ReadoutErrorModel, fidelity: f64) -> Self {
        let (e0, e1) = (readout.e0(), readout.e1());
        let contrast = 1.0 - e0 - e1;
        AncillaTransform {
            slope: contrast * fidelity,
            offset: e1 + contrast * (1.0 - fidelity) / 2.0,
        }
    }

    pub fn apply(&self, a_ideal: f64) -> f64 {
        (self.slope * a_ideal + self.offset).clamp(0.0, 1.0)
    }
}

/// Probability of reading the ancilla as 0 after depolarizing then bit-flip noise.
pub fn noisy_ancilla_probability(a_ideal: f64, readout: &ReadoutErrorModel, gamma: f64, gates: u64) -> f64 {
    let f = depolarizing_fidelity(gamma, gates);
    let a_dep = f * a_ideal + (1.0 - f) / 2.0;
    ((1.0 - readout.e0()) * a_dep + readout.e1() * (1.0 - a_dep)).clamp(0.0, 1.0)
}

/// `Q^{⊗n}·p` by `n` single-qubit sweeps, never forming the `2^n × 2^n` matrix.
///
/// Per qubit, `Q` has columns `(1 − e0, e0)` and `(e1, 1 − e1)`.
pub fn apply_readout_transition(populations: &[f64], model: &ReadoutErrorModel) -> Result<Vec<f64>> {
    let n = qubits_for_len(populations.len())?;
    let mut p = populations.to_vec();
    let (e0, e1) = (model.e0(), model.e1());
    if e0 == 0.0 && e1 == 0.0 {
        return Ok(p);
    }
    for j in 0..n {
        let bit = 1usize << j;
        for idx in 0..p.len() {
            if idx & bit == 0 {
                let (zero, one) = (p[idx], p[idx | bit]);
                p[idx] = (1.0 - e0) * zero + e1 * one;
                p[idx | bit] = e0 * zero + (1.0 - e1) * one;
            }
        }
    }
    Ok(p)
}

/// Depolarizing probability from an average gate error: `γ = e / (1 − 1/D²)`.
pub fn gate_error_to_depolarizing(error: f64, dim: u32) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidRate {
            name: "D",
            value: dim as f64,
            reason: "Hilbert-space dimension must be at least 2",
        });
    }
    if !(0.0..1.0).contains(&error) {
        return Err(Error::InvalidRate {
            name: "e",
            value: error,
            reason: "gate error must lie in [0, 1)",
        });
    }
    let d2 = (dim as f64).powi(2);
    Ok(error / (1.0 - 1.0 / d2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceProfile {
    pub name: &'static str,
    pub gamma: f64,
    pub xi: f64,
    asymmetric_rates: Option<(f64, f64)>,
}

pub const DEVICE_NAMES: [&str; 5] = [
    "zuchongzhi-2.0",
    "zuchongzhi-2.1",
    "sycamore-2019",
    "sycamore-2021",
    "h1-2",
];

impl DeviceProfile {
    pub fn symmetric(&self) -> ReadoutErrorModel {
        ReadoutErrorModel::Symmetric { xi: self.xi }
    }

    pub fn asymmetric(&self) -> Result<ReadoutErrorModel> {
        self.asymmetric_rates
            .map(|(e0, e1)| ReadoutErrorModel::Asymmetric { e0, e1 })
            .ok_or_else(|| Error::AsymmetricUnavailable(self.name.to_string()))
    }

    pub fn has_asymmetric(&self) -> bool {
        self.asymmetric_rates.is_some()
    }
}

/// Published calibration rates of five processors.
pub fn device_profile(name: &str) -> Result<DeviceProfile> {
    let (name, gamma, xi, asym) = match name {
        "zuchongzhi-2.0" => ("zuchongzhi-2.0", 0.006293, 0.0452, Some((0.0346, 0.0608))),
        "zuchongzhi-2.1" => ("zuchongzhi-2.1", 0.0064, 0.0226, Some((0.0148, 0.0303))),
        "sycamore-2019" => ("sycamore-2019", 0.006613, 0.038, Some((0.018, 0.051))),
        "sycamore-2021" => ("sycamore-2021", 0.006613, 0.019, Some((0.009, 0.0255))),
        "h1-2" => ("h1-2", 0.002453, 0.0039, None),
        other => return Err(Error::UnknownDevice(other.to_string())),
    };
    Ok(DeviceProfile {
        name,
        gamma,
        xi,
        asymmetric_rates: asym,
    })
}

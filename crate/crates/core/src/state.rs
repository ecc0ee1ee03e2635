//! Input states for readout.
//!
//! Basis indices follow `i = Σ_j b_j 2^j`: qubit `j` carries bit weight `2^j`.
//! Dense states hold `2^n` complex amplitudes and are capped at
//! [`DEFAULT_DENSE_CAP`] qubits unless a larger cap is passed explicitly.
//! Sparse populations carry arbitrary-precision indices and have no cap.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{box_muller, Lane, StreamKey};

pub const DEFAULT_DENSE_CAP: u32 = 24;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl AmplitudeState {
    /// Wraps an already-normalized amplitude vector of length `2^n`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalizable(format!("squared norm {norm}")));
        }
        Ok(Self { n, amplitudes })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        qubits_for_len(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotNormalizable(format!("squared norm {norm}")));
        }
        let scale = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Self::new(amplitudes)
    }

    pub fn basis(n: u32, index: u64, cap: u32) -> Result<Self> {
        check_dense(n, cap)?;
        let dim = 1usize << n;
        if index >= dim as u64 {
            return Err(Error::IndexOutOfRange {
                index: index.to_string(),
                n,
            });
        }
        let mut amplitudes = vec![Complex64::zero(); dim];
        amplitudes[index as usize] = Complex64::one();
        Ok(Self { n, amplitudes })
    }

    pub fn uniform(n: u32, cap: u32) -> Result<Self> {
        check_dense(n, cap)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n,
            amplitudes: vec![a; dim],
        })
    }

    /// Haar-random pure state: `2^n` complex standard normals, normalized.
    pub fn haar(n: u32, seed: u64, cap: u32) -> Result<Self> {
        check_dense(n, cap)?;
        let mut rng = StreamKey::new(seed, 0, Lane::State).rng();
        let amplitudes = (0..1usize << n)
            .map(|_| {
                let (re, im) = box_muller(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(amplitudes)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn populations(&self) -> Vec<f64> {
        populations(self)
    }
}

/// `|α_i|²` for every basis state.
pub fn populations(state: &AmplitudeState) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Sparse population vector: basis index → weight, phases discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePopulations {
    n: u32,
    entries: BTreeMap<BigUint, f64>,
}

impl SparsePopulations {
    pub fn new(n: u32, entries: BTreeMap<BigUint, f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        let limit = BigUint::one() << n as usize;
        let mut total = 0.0;
        for (index, &w) in &entries {
            if *index >= limit {
                return Err(Error::IndexOutOfRange {
                    index: index.to_string(),
                    n,
                });
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::NotNormalizable(format!("weight {w} outside [0,1]")));
            }
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalizable(format!("weights sum to {total}")));
        }
        Ok(Self { n, entries })
    }

    /// Builds from nonnegative weights that need not sum to one.
    pub fn normalized<I>(n: u32, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, f64)>,
    {
        let mut entries = BTreeMap::new();
        for (index, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NotNormalizable(format!("weight {w}")));
            }
            if entries.insert(index.clone(), w).is_some() {
                return Err(Error::NotNormalizable(format!("duplicate index {index}")));
            }
        }
        let total: f64 = entries.values().sum();
        if total <= 0.0 {
            return Err(Error::NotNormalizable("weights sum to zero".into()));
        }
        entries.retain(|_, w| *w > 0.0);
        entries.values_mut().for_each(|w| *w /= total);
        Self::new(n, entries)
    }

    pub fn basis(n: u32, index: BigUint) -> Result<Self> {
        Self::new(n, BTreeMap::from([(index, 1.0)]))
    }

    pub fn all_zeros(n: u32) -> Result<Self> {
        Self::basis(n, BigUint::zero())
    }

    pub fn all_ones(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        Self::basis(n, (BigUint::one() << n as usize) - 1u32)
    }

    pub fn from_dense(p: &[f64]) -> Result<Self> {
        let n = qubits_for_len(p.len())?;
        let entries = p
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (BigUint::from(i), w))
            .collect();
        Self::new(n, entries)
    }

    pub fn to_dense(&self, cap: u32) -> Result<Vec<f64>> {
        check_dense(self.n, cap)?;
        let mut out = vec![0.0; 1usize << self.n];
        for (index, &w) in &self.entries {
            out[index.to_usize().expect("index below dense cap")] = w;
        }
        Ok(out)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, f64)> {
        self.entries.iter().map(|(i, &w)| (i, w))
    }

    pub fn weight(&self, index: &BigUint) -> f64 {
        self.entries.get(index).copied().unwrap_or(0.0)
    }

    /// The single basis index, if this is a point mass.
    pub fn as_basis(&self) -> Option<&BigUint> {
        match self.entries.iter().next() {
            Some((i, &w)) if self.entries.len() == 1 && w == 1.0 => Some(i),
            _ => None,
        }
    }
}

/// Declarative state description, as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateSpec {
    Basis {
        index: BasisIndex,
    },
    AllOnes,
    AllZeros,
    Uniform,
    /// Haar-random; without a seed the caller supplies one per repetition.
    Haar {
        #[serde(default)]
        seed: Option<u64>,
    },
    ExplicitAmplitudes {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    ExplicitPopulations {
        entries: Vec<(BasisIndex, f64)>,
    },
}

impl StateSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, StateSpec::Haar { .. })
    }

    pub fn is_sparse(&self) -> bool {
        matches!(
            self,
            StateSpec::Basis { .. }
                | StateSpec::AllOnes
                | StateSpec::AllZeros
                | StateSpec::ExplicitPopulations { .. }
        )
    }

    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match self {
            StateSpec::Basis { index } => format!("basis-{}", index.0),
            StateSpec::AllOnes => "all-ones".into(),
            StateSpec::AllZeros => "all-zeros".into(),
            StateSpec::Uniform => "uniform".into(),
            StateSpec::Haar { .. } => "haar".into(),
            StateSpec::ExplicitAmplitudes { .. } => "explicit-amplitudes".into(),
            StateSpec::ExplicitPopulations { .. } => "explicit-populations".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Dense(AmplitudeState),
    Sparse(SparsePopulations),
}

impl State {
    pub fn n(&self) -> u32 {
        match self {
            State::Dense(s) => s.n(),
            State::Sparse(s) => s.n(),
        }
    }

    pub fn dense_populations(&self, cap: u32) -> Result<Vec<f64>> {
        match self {
            State::Dense(s) => Ok(s.populations()),
            State::Sparse(s) => s.to_dense(cap),
        }
    }

    pub fn sparse_populations(&self) -> Result<SparsePopulations> {
        match self {
            State::Dense(s) => SparsePopulations::from_dense(&s.populations()),
            State::Sparse(s) => Ok(s.clone()),
        }
    }
}

/// Builds a state with the default dense cap; an unseeded Haar spec uses seed 0.
pub fn make_state(spec: &StateSpec, n: u32) -> Result<State> {
    make_state_with(spec, n, DEFAULT_DENSE_CAP, 0)
}

pub fn make_state_with(spec: &StateSpec, n: u32, cap: u32, haar_seed: u64) -> Result<State> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    Ok(match spec {
        StateSpec::Basis { index } => State::Sparse(SparsePopulations::basis(n, index.0.clone())?),
        StateSpec::AllOnes => State::Sparse(SparsePopulations::all_ones(n)?),
        StateSpec::AllZeros => State::Sparse(SparsePopulations::all_zeros(n)?),
        StateSpec::Uniform => State::Dense(AmplitudeState::uniform(n, cap)?),
        StateSpec::Haar { seed } => State::Dense(AmplitudeState::haar(n, seed.unwrap_or(haar_seed), cap)?),
        StateSpec::ExplicitAmplitudes { re, im } => {
            check_dense(n, cap)?;
            let dim = 1usize << n;
            if re.len() != dim || !(im.is_empty() || im.len() == dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: re.len(),
                });
            }
            let amps = re
                .iter()
                .enumerate()
                .map(|(i, &r)| Complex64::new(r, im.get(i).copied().unwrap_or(0.0)))
                .collect();
            State::Dense(AmplitudeState::normalized(amps)?)
        }
        StateSpec::ExplicitPopulations { entries } => State::Sparse(SparsePopulations::normalized(
            n,
            entries.iter().map(|(i, w)| (i.0.clone(), *w)),
        )?),
    })
}

fn check_dense(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    if n > cap || n >= usize::BITS {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    Ok(())
}

pub(crate) fn qubits_for_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// Arbitrary-precision basis index; accepts an integer or a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub BigUint);

impl From<u64> for BasisIndex {
    fn from(v: u64) -> Self {
        Self(BigUint::from(v))
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for BasisIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BasisIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Self(BigUint::from(v))),
            Raw::Str(s) => s
                .parse::<BigUint>()
                .map(Self)
                .map_err(serde::de::Error::custom),
        }
    }
}

//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by a
//! [`StreamKey`]: the 64-bit master seed selects the key, and
//! `(repetition, lane)` selects one of 2^64 independent ChaCha streams under
//! that key. A result therefore depends only on its key and never on which
//! worker thread produced it or in which order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Which consumer a stream belongs to inside one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lane {
    /// Random state preparation (Haar draws).
    State,
    /// Direct-readout multinomial.
    Direct,
    /// Compression-readout grid point `k` (1-based).
    Grid(u64),
}

impl Lane {
    fn code(self) -> u64 {
        match self {
            Lane::State => u32::MAX as u64,
            Lane::Direct => u32::MAX as u64 - 1,
            Lane::Grid(k) => {
                debug_assert!(k < (u32::MAX as u64 - 1));
                k
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: u64,
    pub repetition: u32,
    pub lane: Lane,
}

impl StreamKey {
    pub fn new(master: u64, repetition: u32, lane: Lane) -> Self {
        Self {
            master,
            repetition,
            lane,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(((self.repetition as u64) << 32) | self.lane.code());
        rng
    }
}

/// SplitMix64 finalizer, used to derive per-cell master seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Master seed for sweep cell `index` under a run-level seed.
pub fn cell_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1)))
}

/// Uniform in the open interval (0, 1), 53 bits.
fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}

/// One pair of independent standard normals by the Box–Muller transform.
pub fn box_muller<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Binomial(trials, p) draw; `p` is clamped into [0, 1].
pub fn binomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    if trials == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return trials;
    }
    Binomial::new(trials, p)
        .expect("probability already clamped")
        .sample(rng)
}

/// Multinomial counts over `probs` by sequential conditional binomials.
///
/// `probs` need not be exactly normalized; the last category absorbs the
/// remaining trials.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_trials = trials;
    let mut remaining_mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining_trials == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_trials;
            break;
        }
        let conditional = if remaining_mass > 0.0 {
            p / remaining_mass
        } else {
            0.0
        };
        let c = binomial(rng, remaining_trials, conditional);
        counts[i] = c;
        remaining_trials -= c;
        remaining_mass -= p;
    }
    counts
}

//! Compression readout: estimate every basis-state population of an `n`-qubit
//! register from single-ancilla measurements on a Fourier grid, and compare it
//! with direct multi-qubit readout under bit-flip and depolarizing noise.

pub mod bounds;
pub mod decoder;
pub mod engines;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod grid;
pub mod noise;
pub mod rng;
pub mod state;

pub use error::{Error, Result};

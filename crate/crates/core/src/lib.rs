//! Achievable rates of line-of-sight MIMO links whose receivers quantize each
//! antenna's I and Q branch with a single comparator, and which add receive
//! antennas (spatial oversampling) to recover the information the quantizer
//! discards.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: array layouts (ULA, URA, best-known square packings) and the
//!   spherical-wave channel between them.
//! - [`signal`]: QAM alphabets, enumerated transmit ensembles, noise, and the
//!   1-bit I/Q quantizer.
//! - [`infotheory`]: quadrant probabilities and the rate engines (exact and
//!   Monte-Carlo quantized MI, unquantized discrete-input MI, Gaussian
//!   capacity, and the noiseless limit).
//! - [`experiments`]: configuration, sweeps, CSV output, and the stored
//!   reference curves used for regression.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod infotheory;
pub mod signal;

pub use error::{Error, Result};
pub use geometry::{
    AntennaArray, ArrayKind, ChannelMatrix, LinkGeometry, PackingCatalog, Position,
};
pub use infotheory::{Engine, MIResult, QuadrantTable};
pub use num_complex::Complex64;
pub use signal::{
    Constellation, ConstellationKind, InputEnsemble, NoiseModel, Quadrant, SignVector,
};

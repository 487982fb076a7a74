//! Rate engines for the 1-bit quantized and unquantized LOS MIMO channel.
//!
//! All quantized engines work from a [`QuadrantTable`]: with noise covariance
//! `σ² I`, `p(y_Q | x)` factorizes over antennas and, per antenna, over the
//! real and imaginary comparator.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::signal::InputEnsemble;

mod capacity;
mod entropy;
mod exact;
mod highsnr;
mod montecarlo;
mod quadrant;

pub use capacity::{gaussian_capacity, log_det_hpd};
pub use entropy::{entropy_bits, entropy_term, CompensatedSum};
pub use exact::{mi_quantized_exact, mi_quantized_exact_capped, output_distribution, EXACT_MAX_RX};
pub use highsnr::{
    high_snr_mi, unique_decodability_check, zero_threshold, DecodabilityReport, ZERO_THRESHOLD_REL,
};
pub use montecarlo::{
    mi_quantized_mc, mi_unquantized_discrete_mc, McSettings, MC_BLOCK, MIN_MC_SAMPLES,
};
pub use quadrant::{positive_probability, quadrant_probabilities, QuadrantTable};

/// Which estimator produced a rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    Mc,
    McUnquantized,
    Capacity,
    HighSnr,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Mc => "mc",
            Engine::McUnquantized => "mc_unquantized",
            Engine::Capacity => "capacity",
            Engine::HighSnr => "high_snr",
        }
    }

    /// Engines whose value is a quantized-output rate.
    pub fn is_quantized(self) -> bool {
        matches!(self, Engine::Exact | Engine::Mc | Engine::HighSnr)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "exact" => Ok(Engine::Exact),
            "mc" => Ok(Engine::Mc),
            "mc_unquantized" => Ok(Engine::McUnquantized),
            "capacity" => Ok(Engine::Capacity),
            "high_snr" => Ok(Engine::HighSnr),
            _ => Err(Error::Config(format!("unknown engine `{s}`"))),
        }
    }
}

/// A rate in bits per channel use and the engine that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MIResult {
    pub bpcu: f64,
    pub engine: Engine,
    /// Standard error of the estimate, zero for deterministic engines.
    pub stderr: f64,
    /// Monte-Carlo sample count, zero for deterministic engines.
    pub samples: usize,
    pub wallclock: Duration,
}

impl MIResult {
    pub(crate) fn deterministic(bpcu: f64, engine: Engine, wallclock: Duration) -> Self {
        Self {
            bpcu,
            engine,
            stderr: 0.0,
            samples: 0,
            wallclock,
        }
    }
}

/// `H(X) = -Σ p log2 p` of the ensemble priors.
pub fn source_entropy(ensemble: &InputEnsemble) -> f64 {
    entropy_bits(ensemble.priors())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{build_constellation, enumerate_inputs};

    #[test]
    fn source_entropy_of_uniform_ensembles() {
        let q4 = build_constellation("qam4").unwrap();
        let q16 = build_constellation("qam16").unwrap();
        assert!((source_entropy(&enumerate_inputs(&q4, 2).unwrap()) - 4.0).abs() < 1e-12);
        assert!((source_entropy(&enumerate_inputs(&q16, 2).unwrap()) - 8.0).abs() < 1e-12);
        assert!((source_entropy(&enumerate_inputs(&q4, 4).unwrap()) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn engine_names_round_trip() {
        for e in [
            Engine::Exact,
            Engine::Mc,
            Engine::McUnquantized,
            Engine::Capacity,
            Engine::HighSnr,
        ] {
            assert_eq!(e.as_str().parse::<Engine>().unwrap(), e);
        }
        assert!("auto".parse::<Engine>().is_err());
    }
}

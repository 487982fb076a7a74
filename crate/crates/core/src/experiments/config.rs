use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    packed_positions, ula_positions, ura_positions, AntennaArray, ArrayKind, PackingCatalog,
};
use crate::infotheory::{Engine, EXACT_MAX_RX};
use crate::signal::{enumerate_inputs, Constellation, ConstellationKind, InputEnsemble};

pub const DEFAULT_QUANTIZED_SAMPLES: usize = 200_000;
pub const DEFAULT_UNQUANTIZED_SAMPLES: usize = 100_000;

/// Tolerance when checking that `S · N` is an integer.
const INTEGER_TOL: f64 = 1e-9;

/// Transmit array description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxSpec {
    pub kind: ArrayKind,
    /// Segment length (ULA) or square side (URA, packed), meters.
    pub aperture: f64,
    pub count: usize,
}

/// Receive array description; exactly one of `s` and `counts` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RxSpec {
    pub kind: ArrayKind,
    pub aperture: f64,
    /// Spatial sampling factors `S = M / N` to sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    /// Receive antenna counts to sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    /// Packing catalog file replacing the built-in one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packing_catalog: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Link distance, meters.
    pub distance: f64,
    /// Carrier wavelength, meters.
    pub wavelength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub constellation: ConstellationKind,
    pub snr_db: Vec<f64>,
}

/// Engine selection; `Auto` picks the exact engine up to its antenna cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Auto,
    Exact,
    Mc,
    McUnquantized,
    Capacity,
    HighSnr,
}

impl EngineChoice {
    pub fn resolve(self, m_rx: usize, exact_max_rx: usize) -> Engine {
        match self {
            EngineChoice::Auto if m_rx <= exact_max_rx => Engine::Exact,
            EngineChoice::Auto => Engine::Mc,
            EngineChoice::Exact => Engine::Exact,
            EngineChoice::Mc => Engine::Mc,
            EngineChoice::McUnquantized => Engine::McUnquantized,
            EngineChoice::Capacity => Engine::Capacity,
            EngineChoice::HighSnr => Engine::HighSnr,
        }
    }
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineChoice::Auto => f.write_str("auto"),
            other => {
                let e = other.resolve(0, 0);
                write!(f, "{e}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSpec {
    pub kind: EngineChoice,
    /// Monte-Carlo samples per point; engine default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_max_rx: Option<usize>,
}

/// One sweep as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub tx: TxSpec,
    pub rx: RxSpec,
    pub channel: ChannelSpec,
    pub signal: SignalSpec,
    pub engine: EngineSpec,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// A receive layout of the sweep.
#[derive(Clone, Debug)]
pub struct RxPoint {
    pub s_factor: f64,
    pub m_rx: usize,
    pub array: AntennaArray,
}

/// A validated config with arrays and ensembles instantiated.
#[derive(Clone, Debug)]
pub struct NormalizedConfig {
    pub name: String,
    pub tx: AntennaArray,
    pub rx: Vec<RxPoint>,
    pub distance: f64,
    pub wavelength: f64,
    pub constellation: Constellation,
    pub ensemble: InputEnsemble,
    pub snr_db: Vec<f64>,
    pub engine: EngineChoice,
    pub exact_max_rx: usize,
    pub samples: Option<usize>,
    pub seed: u64,
    /// Non-fatal observations, e.g. a receive point without oversampling.
    pub notes: Vec<String>,
}

impl NormalizedConfig {
    /// Sample budget for `engine`, falling back to the per-engine default.
    pub fn samples_for(&self, engine: Engine) -> usize {
        match engine {
            Engine::Mc => self.samples.unwrap_or(DEFAULT_QUANTIZED_SAMPLES),
            Engine::McUnquantized => self.samples.unwrap_or(DEFAULT_UNQUANTIZED_SAMPLES),
            _ => 0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn build_array(
    kind: ArrayKind,
    aperture: f64,
    count: usize,
    catalog: &PackingCatalog,
) -> Result<AntennaArray> {
    match kind {
        ArrayKind::Ula => ula_positions(aperture, count),
        ArrayKind::Ura => ura_positions(aperture, count),
        ArrayKind::Packed => packed_positions(aperture, count, catalog),
        ArrayKind::Custom => Err(Error::Config(
            "custom arrays cannot be described in a config file".into(),
        )),
    }
}

/// Checks a config and instantiates its arrays and input ensemble.
///
/// Uses the built-in packing catalog unless the receive spec names a file.
pub fn validate_config(cfg: &ExperimentConfig) -> Result<NormalizedConfig> {
    match &cfg.rx.packing_catalog {
        Some(path) => validate_config_with(cfg, &PackingCatalog::load(path)?),
        None => validate_config_with(cfg, PackingCatalog::builtin()),
    }
}

pub fn validate_config_with(
    cfg: &ExperimentConfig,
    catalog: &PackingCatalog,
) -> Result<NormalizedConfig> {
    if cfg.name.trim().is_empty() {
        return Err(Error::Config("experiment name is empty".into()));
    }
    if cfg.name.contains([',', '"', '\n', '\r']) {
        return Err(Error::Config(
            "experiment name may not contain commas, quotes, or newlines".into(),
        ));
    }
    positive("tx.aperture", cfg.tx.aperture)?;
    positive("rx.aperture", cfg.rx.aperture)?;
    positive("channel.distance", cfg.channel.distance)?;
    positive("channel.wavelength", cfg.channel.wavelength)?;
    if cfg.tx.count == 0 {
        return Err(Error::Config("tx.count must be at least 1".into()));
    }
    if cfg.signal.snr_db.is_empty() {
        return Err(Error::Config("signal.snr_db is empty".into()));
    }
    if let Some(bad) = cfg.signal.snr_db.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("SNR {bad} is not finite")));
    }
    let n_tx = cfg.tx.count;
    let tx = build_array(cfg.tx.kind, cfg.tx.aperture, n_tx, catalog)?;

    let pairs: Vec<(f64, usize)> = match (&cfg.rx.s, &cfg.rx.counts) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either rx.s or rx.counts, not both".into(),
            ))
        }
        (None, None) => return Err(Error::Config("rx needs either s or counts".into())),
        (Some(s), None) => s
            .iter()
            .map(|&s| Ok((s, receive_count(s, n_tx)?)))
            .collect::<Result<_>>()?,
        (None, Some(c)) => c
            .iter()
            .map(|&m| {
                if m == 0 {
                    Err(Error::Config(
                        "receive antenna count must be at least 1".into(),
                    ))
                } else {
                    Ok((m as f64 / n_tx as f64, m))
                }
            })
            .collect::<Result<_>>()?,
    };
    if pairs.is_empty() {
        return Err(Error::Config("receive sweep is empty".into()));
    }

    let mut notes = Vec::new();
    let mut rx = Vec::with_capacity(pairs.len());
    for (s_factor, m_rx) in pairs {
        if m_rx == n_tx {
            notes.push(format!("S = {s_factor}: no oversampling (M = N = {n_tx})"));
        }
        rx.push(RxPoint {
            s_factor,
            m_rx,
            array: build_array(cfg.rx.kind, cfg.rx.aperture, m_rx, catalog)?,
        });
    }

    let constellation = Constellation::new(cfg.signal.constellation)?;
    let ensemble = enumerate_inputs(&constellation, n_tx)?;
    let exact_max_rx = cfg.engine.exact_max_rx.unwrap_or(EXACT_MAX_RX);
    if let Some(samples) = cfg.engine.samples {
        if samples < crate::infotheory::MIN_MC_SAMPLES {
            return Err(Error::TooFewSamples {
                got: samples,
                min: crate::infotheory::MIN_MC_SAMPLES,
            });
        }
    }
    Ok(NormalizedConfig {
        name: cfg.name.clone(),
        tx,
        rx,
        distance: cfg.channel.distance,
        wavelength: cfg.channel.wavelength,
        constellation,
        ensemble,
        snr_db: cfg.signal.snr_db.clone(),
        engine: cfg.engine.kind,
        exact_max_rx,
        samples: cfg.engine.samples,
        seed: cfg.engine.seed,
        notes,
    })
}

/// `M = S · N`, which must be a positive integer.
pub fn receive_count(s_factor: f64, n_tx: usize) -> Result<usize> {
    let m = s_factor * n_tx as f64;
    let rounded = m.round();
    if !(s_factor.is_finite() && s_factor > 0.0)
        || (m - rounded).abs() > INTEGER_TOL
        || rounded < 1.0
    {
        return Err(Error::Config(format!(
            "S = {s_factor} with N = {n_tx} gives M = {m}, not a positive integer"
        )));
    }
    Ok(rounded as usize)
}

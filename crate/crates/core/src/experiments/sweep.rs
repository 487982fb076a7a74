use std::time::Duration;

use rayon::prelude::*;

use super::config::{NormalizedConfig, RxPoint};
use crate::error::Result;
use crate::geometry::{los_channel, LinkGeometry};
use crate::infotheory::{
    gaussian_capacity, high_snr_mi, mi_quantized_exact_capped, mi_quantized_mc,
    mi_unquantized_discrete_mc, Engine, MIResult, McSettings,
};
use crate::signal::{name_hash, stream_id, NoiseModel};

/// One line of the results CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    /// `+inf` for the noiseless-limit engine.
    pub snr_db: f64,
    pub s_factor: f64,
    pub m_rx: usize,
    pub n_tx: usize,
    pub engine: Engine,
    pub mi_bpcu: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// A sweep point whose engine refused to run.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub s_factor: f64,
    pub m_rx: usize,
    pub snr_db: f64,
    pub engine: Engine,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    /// Engine wallclock of each row, parallel to `rows`.
    pub wallclock: Vec<Duration>,
    pub failures: Vec<PointFailure>,
}

/// Random stream of the point at `(snr_index, s_index)` of experiment `name`.
pub fn point_stream(name: &str, snr_index: usize, s_index: usize) -> u64 {
    stream_id(&[name_hash(name), snr_index as u64, s_index as u64])
}

/// Evaluates one sweep point.
pub fn evaluate_point(
    cfg: &NormalizedConfig,
    rx: &RxPoint,
    engine: Engine,
    snr_db: f64,
    stream: u64,
) -> Result<MIResult> {
    let geom = LinkGeometry::new(
        cfg.tx.clone(),
        rx.array.clone(),
        cfg.distance,
        cfg.wavelength,
    )?;
    let h = los_channel(&geom);
    if engine == Engine::HighSnr {
        return high_snr_mi(&h, &cfg.ensemble);
    }
    let noise = NoiseModel::from_snr_db(snr_db)?;
    let settings = McSettings::new(cfg.samples_for(engine), cfg.seed, stream);
    match engine {
        Engine::Exact => mi_quantized_exact_capped(&h, &cfg.ensemble, &noise, cfg.exact_max_rx),
        Engine::Mc => mi_quantized_mc(&h, &cfg.ensemble, &noise, settings),
        Engine::McUnquantized => mi_unquantized_discrete_mc(&h, &cfg.ensemble, &noise, settings),
        Engine::Capacity => gaussian_capacity(&h, &noise),
        Engine::HighSnr => unreachable!(),
    }
}

/// Runs every `(S, SNR)` point, S-major, in config order.
///
/// The noiseless-limit engine ignores the SNR grid and yields one row per S.
/// Points run in parallel; each owns its random stream, so the output does not
/// depend on scheduling.
pub fn run_sweep(cfg: &NormalizedConfig) -> SweepOutput {
    let mut jobs = Vec::new();
    for (si, rx) in cfg.rx.iter().enumerate() {
        let engine = cfg.engine.resolve(rx.m_rx, cfg.exact_max_rx);
        if engine == Engine::HighSnr {
            jobs.push((si, 0, f64::INFINITY, engine));
        } else {
            for (ki, &snr) in cfg.snr_db.iter().enumerate() {
                jobs.push((si, ki, snr, engine));
            }
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(si, ki, snr, engine)| {
            let rx = &cfg.rx[si];
            let out = evaluate_point(cfg, rx, engine, snr, point_stream(&cfg.name, ki, si));
            (rx, snr, engine, out)
        })
        .collect();
    let mut output = SweepOutput::default();
    for (rx, snr_db, engine, out) in results {
        match out {
            Ok(r) => {
                output.wallclock.push(r.wallclock);
                output.rows.push(ResultRow {
                    experiment: cfg.name.clone(),
                    snr_db,
                    s_factor: rx.s_factor,
                    m_rx: rx.m_rx,
                    n_tx: cfg.tx.len(),
                    engine: r.engine,
                    mi_bpcu: r.bpcu,
                    stderr: r.stderr,
                    samples: r.samples,
                    seed: cfg.seed,
                })
            }
            Err(e) => output.failures.push(PointFailure {
                s_factor: rx.s_factor,
                m_rx: rx.m_rx,
                snr_db,
                engine,
                message: e.to_string(),
            }),
        }
    }
    output
}

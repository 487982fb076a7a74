//! Exact `I(X; Y_Q)` by enumerating all `4^M` output patterns.
//!
//! `p(y_Q)` is accumulated block by block: the top antennas fix a block of
//! the output index space, and within the block every input's conditional
//! distribution is expanded as a tensor product of its per-antenna quadrant
//! rows. Each block is computed independently and the block entropies are
//! combined in index order, so the result does not depend on the number of
//! worker threads.

use std::time::Instant;

use rayon::prelude::*;

use super::entropy::{entropy_term, CompensatedSum};
use super::quadrant::QuadrantTable;
use super::{Engine, MIResult};
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::signal::{InputEnsemble, NoiseModel};

/// Default receive-array cap of the exact engine; run time grows as `|X| 4^M`.
pub const EXACT_MAX_RX: usize = 12;

/// Antennas expanded inside one block; blocks hold `4^BLOCK_ANTENNAS` patterns.
const BLOCK_ANTENNAS: usize = 7;

pub fn mi_quantized_exact(
    h: &ChannelMatrix,
    ensemble: &InputEnsemble,
    noise: &NoiseModel,
) -> Result<MIResult> {
    mi_quantized_exact_capped(h, ensemble, noise, EXACT_MAX_RX)
}

pub fn mi_quantized_exact_capped(
    h: &ChannelMatrix,
    ensemble: &InputEnsemble,
    noise: &NoiseModel,
    cap: usize,
) -> Result<MIResult> {
    let start = Instant::now();
    if h.m_rx() > cap.min(31) {
        return Err(Error::ExactCapExceeded { m: h.m_rx(), cap });
    }
    let table = QuadrantTable::build(&h.canonical_rows(), ensemble, noise)?;
    let h_y = output_entropy(&table, ensemble.priors());
    let h_y_given_x = conditional_entropy(&table, ensemble.priors());
    let bpcu = (h_y - h_y_given_x).max(0.0);
    Ok(MIResult::deterministic(
        bpcu,
        Engine::Exact,
        start.elapsed(),
    ))
}

/// `H(Y_Q | X) = Σ_x p(x) Σ_m H(row_{x,m})`.
fn conditional_entropy(table: &QuadrantTable, priors: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, &p) in priors.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let per_x: CompensatedSum = table
            .rows_of(x)
            .iter()
            .flat_map(|row| row.iter().map(|&q| entropy_term(q)))
            .sum();
        acc += p * per_x.value();
    }
    acc.value()
}

fn output_entropy(table: &QuadrantTable, priors: &[f64]) -> f64 {
    let m = table.m_rx();
    let low = m.min(BLOCK_ANTENNAS);
    let blocks = 1usize << (2 * (m - low));
    let partial: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut acc = vec![0.0; 1 << (2 * low)];
            accumulate_block(table, priors, low, block, &mut acc);
            acc.iter()
                .map(|&p| entropy_term(p))
                .sum::<CompensatedSum>()
                .value()
        })
        .collect();
    partial.into_iter().sum::<CompensatedSum>().value()
}

/// Adds `p(x) p(y_Q | x)` for every pattern of `block` into `acc`.
///
/// Antennas `0..low` vary inside the block (antenna 0 least significant);
/// antennas `low..M` are fixed by the base-4 digits of `block`.
fn accumulate_block(
    table: &QuadrantTable,
    priors: &[f64],
    low: usize,
    block: usize,
    acc: &mut [f64],
) {
    let m = table.m_rx();
    let mut cur = Vec::with_capacity(acc.len() / 4);
    let mut next = Vec::with_capacity(acc.len() / 4);
    for (x, &p) in priors.iter().enumerate() {
        let rows = table.rows_of(x);
        let mut prefix = p;
        for (j, row) in rows[low..m].iter().enumerate() {
            prefix *= row[(block >> (2 * j)) & 3];
        }
        if prefix == 0.0 {
            continue;
        }
        cur.clear();
        cur.push(prefix);
        for row in rows[1..low].iter().rev() {
            next.clear();
            for &v in &cur {
                next.extend(row.iter().map(|&q| v * q));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        let row0 = &rows[0];
        for (chunk, &v) in acc.chunks_exact_mut(4).zip(&cur) {
            for (slot, &q) in chunk.iter_mut().zip(row0) {
                *slot += v * q;
            }
        }
    }
}

/// Full output distribution `p(y_Q)` indexed by packed sign vector.
///
/// Intended for small arrays and diagnostics; allocates `4^M` doubles.
pub fn output_distribution(table: &QuadrantTable, priors: &[f64]) -> Vec<f64> {
    let m = table.m_rx();
    let mut out = vec![0.0; 1 << (2 * m)];
    accumulate_block(table, priors, m, 0, &mut out);
    out
}

//! The noiseless limit of the quantized channel.
//!
//! As `σ → 0` each real dimension of `μ_x` deterministically fixes its
//! comparator output, except dimensions sitting on the decision boundary,
//! which resolve to either sign with probability ½.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;

use super::entropy::{entropy_term, CompensatedSum};
use super::{Engine, MIResult};
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::signal::InputEnsemble;

/// Boundary threshold relative to the largest real dimension of any `μ_x`.
pub const ZERO_THRESHOLD_REL: f64 = 1e-9;

/// Most boundary dimensions allowed for a single input (2^k output patterns).
const MAX_BOUNDARY_DIMS: u32 = 26;

/// Absolute threshold below which a real dimension of `μ_x` counts as zero.
pub fn zero_threshold(means: &[Complex64]) -> f64 {
    let scale = means
        .iter()
        .map(|m| m.re.abs().max(m.im.abs()))
        .fold(0.0, f64::max);
    ZERO_THRESHOLD_REL * scale
}

/// Deterministic bits of the pattern plus the bit positions left undecided.
fn noiseless_pattern(mu: &[Complex64], threshold: f64) -> (u64, Vec<u32>) {
    let mut bits = 0u64;
    let mut free = Vec::new();
    for (m, s) in mu.iter().enumerate() {
        // quadrant digit = 2 * (re < 0) + (im < 0), antenna m at bits 2m..2m+2
        for (value, bit) in [(s.re, 2 * m as u32 + 1), (s.im, 2 * m as u32)] {
            if value.abs() <= threshold {
                free.push(bit);
            } else if value < 0.0 {
                bits |= 1 << bit;
            }
        }
    }
    (bits, free)
}

fn validate(h: &ChannelMatrix, ensemble: &InputEnsemble) -> Result<Vec<Complex64>> {
    if h.m_rx() > 32 {
        return Err(Error::Config(format!(
            "high-SNR analysis packs at most 32 antennas, got {}",
            h.m_rx()
        )));
    }
    if ensemble.n_tx() != h.n_tx() {
        return Err(Error::Dimension {
            expected: h.n_tx(),
            got: ensemble.n_tx(),
        });
    }
    ensemble.means(h)
}

/// `I(X; Y_Q)` in the limit `σ → 0` with the ½ rule on boundary dimensions.
pub fn high_snr_mi(h: &ChannelMatrix, ensemble: &InputEnsemble) -> Result<MIResult> {
    let start = Instant::now();
    let means = validate(h, ensemble)?;
    let m_rx = h.m_rx();
    let threshold = zero_threshold(&means);
    let mut output: BTreeMap<u64, f64> = BTreeMap::new();
    let mut h_cond = CompensatedSum::new();
    for (x, &p) in ensemble.priors().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let (base, free) = noiseless_pattern(&means[x * m_rx..(x + 1) * m_rx], threshold);
        let k = free.len() as u32;
        if k > MAX_BOUNDARY_DIMS {
            return Err(Error::Config(format!(
                "input {x} has {k} boundary dimensions, more than {MAX_BOUNDARY_DIMS}"
            )));
        }
        h_cond += p * f64::from(k);
        let share = p / (1u64 << k) as f64;
        for combo in 0..1u64 << k {
            let mut pattern = base;
            for (i, &bit) in free.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    pattern |= 1 << bit;
                }
            }
            *output.entry(pattern).or_insert(0.0) += share;
        }
    }
    let h_y: CompensatedSum = output.values().map(|&p| entropy_term(p)).sum();
    let bpcu = (h_y.value() - h_cond.value()).max(0.0);
    Ok(MIResult::deterministic(
        bpcu,
        Engine::HighSnr,
        start.elapsed(),
    ))
}

/// Inputs that a noiseless 1-bit receiver cannot tell apart.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecodabilityReport {
    /// Pairs `(x, x')`, `x < x'`, with identical noiseless sign patterns.
    pub collisions: Vec<(usize, usize)>,
    /// Inputs with at least one real dimension of `μ_x` on the decision boundary.
    pub zero_dimension_inputs: Vec<usize>,
    /// Number of distinct noiseless sign patterns.
    pub distinct_patterns: usize,
}

impl DecodabilityReport {
    /// Inputs whose pattern repeats an earlier input's.
    pub fn duplicate_inputs(&self, ensemble_len: usize) -> usize {
        ensemble_len - self.distinct_patterns
    }

    pub fn is_uniquely_decodable(&self) -> bool {
        self.collisions.is_empty() && self.zero_dimension_inputs.is_empty()
    }
}

/// Lists colliding noiseless sign patterns and inputs with boundary dimensions.
///
/// Boundary dimensions take the quantizer's sign convention (zero maps to `+`)
/// when patterns are compared.
pub fn unique_decodability_check(
    h: &ChannelMatrix,
    ensemble: &InputEnsemble,
) -> Result<DecodabilityReport> {
    let means = validate(h, ensemble)?;
    let m_rx = h.m_rx();
    let threshold = zero_threshold(&means);
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut report = DecodabilityReport::default();
    for x in 0..ensemble.len() {
        let (pattern, free) = noiseless_pattern(&means[x * m_rx..(x + 1) * m_rx], threshold);
        if !free.is_empty() {
            report.zero_dimension_inputs.push(x);
        }
        groups.entry(pattern).or_default().push(x);
    }
    report.distinct_patterns = groups.len();
    for members in groups.values() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                report.collisions.push((a, b));
            }
        }
    }
    report.collisions.sort_unstable();
    Ok(report)
}

//! Monte-Carlo rate estimators.
//!
//! Samples are drawn in fixed blocks of [`MC_BLOCK`]; block `b` uses its own
//! ChaCha stream derived from `(settings.stream, b)`. Block sums are combined
//! in block order, so an estimate depends only on the seed, the stream, and
//! the sample count, not on how rayon schedules the blocks.

use std::f64::consts::LN_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;

use super::entropy::CompensatedSum;
use super::quadrant::QuadrantTable;
use super::{Engine, MIResult};
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::signal::{add_noise, stream_id, stream_rng, InputEnsemble, NoiseModel, Quadrant};

pub const MIN_MC_SAMPLES: usize = 1_000;
pub const MC_BLOCK: usize = 4_096;

/// Sample budget and random stream assignment of one estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    pub stream: u64,
}

impl McSettings {
    pub fn new(samples: usize, seed: u64, stream: u64) -> Self {
        Self {
            samples,
            seed,
            stream,
        }
    }
}

/// Running first and second moments of the per-sample information density.
#[derive(Clone, Copy, Default)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
    n: usize,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
        self.n += 1;
    }

    fn merge(mut self, other: &Moments) -> Moments {
        self.sum += other.sum.value();
        self.sum_sq += other.sum_sq.value();
        self.n += other.n;
        self
    }

    fn mean_and_stderr(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum.value() / n;
        let var = ((self.sum_sq.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

enum InputSampler {
    Uniform(usize),
    Weighted(WeightedIndex<f64>),
}

impl InputSampler {
    fn new(priors: &[f64]) -> Result<Self> {
        let first = priors[0];
        if priors.iter().all(|&p| p == first) {
            Ok(InputSampler::Uniform(priors.len()))
        } else {
            WeightedIndex::new(priors)
                .map(InputSampler::Weighted)
                .map_err(|e| Error::Config(format!("invalid priors: {e}")))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            InputSampler::Uniform(n) => rng.gen_range(0..*n),
            InputSampler::Weighted(w) => w.sample(rng),
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples,
            min: MIN_MC_SAMPLES,
        });
    }
    Ok(())
}

/// Runs `per_sample` over all blocks and reduces the moments in block order.
fn run_blocks<S, F>(settings: &McSettings, per_sample: F) -> Moments
where
    S: Default,
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut S) -> f64 + Sync,
{
    let blocks = settings.samples.div_ceil(MC_BLOCK);
    let partial: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(settings.samples - b * MC_BLOCK);
            let mut rng = stream_rng(settings.seed, stream_id(&[settings.stream, b as u64]));
            let mut scratch = S::default();
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(per_sample(&mut rng, &mut scratch));
            }
            m
        })
        .collect();
    partial
        .iter()
        .fold(Moments::default(), |acc, m| acc.merge(m))
}

/// Per-input law of the `2M` independent comparators, arranged to split off
/// the most likely sign pattern.
///
/// Comparator `j` is the real (`j = 2m`) or imaginary (`j = 2m + 1`) branch of
/// antenna `m`. Given `y != y*`, the first comparator to leave its likely sign
/// is `k` with probability `prod_{j<k} (1 - q_j) q_k / (1 - p*)`; the others
/// after it are then free.
struct ModalSplit {
    two_m: usize,
    /// Likely sign of each comparator, `true` for `+`.
    likely_positive: Vec<bool>,
    /// Probability of the unlikely sign.
    flip: Vec<f64>,
    /// Running sums of the first-flip weights.
    cumulative: Vec<f64>,
    /// `p(y* | x)`.
    p_modal: Vec<f64>,
}

impl ModalSplit {
    fn new(table: &QuadrantTable) -> Self {
        let (n_x, m_rx) = (table.n_inputs(), table.m_rx());
        let two_m = 2 * m_rx;
        let mut split = ModalSplit {
            two_m,
            likely_positive: Vec::with_capacity(n_x * two_m),
            flip: Vec::with_capacity(n_x * two_m),
            cumulative: Vec::with_capacity(n_x * two_m),
            p_modal: Vec::with_capacity(n_x),
        };
        for x in 0..n_x {
            let mut stay = 1.0;
            let mut acc = 0.0;
            for row in table.rows_of(x) {
                // the smaller side is summed directly so tiny flip chances survive
                let (re_pos, re_neg) = (row[0] + row[1], row[2] + row[3]);
                let (im_pos, im_neg) = (row[0] + row[2], row[1] + row[3]);
                for (pos, neg) in [(re_pos, re_neg), (im_pos, im_neg)] {
                    let q = pos.min(neg);
                    split.likely_positive.push(pos >= neg);
                    split.flip.push(q);
                    acc += stay * q;
                    split.cumulative.push(acc);
                    stay *= 1.0 - q;
                }
            }
            split.p_modal.push(stay);
        }
        split
    }

    fn modal(&self, x: usize, out: &mut Vec<Quadrant>) {
        let signs = &self.likely_positive[x * self.two_m..(x + 1) * self.two_m];
        out.clear();
        out.extend(
            signs
                .chunks_exact(2)
                .map(|s| Quadrant::from_signs(s[0], s[1])),
        );
    }

    /// Probability of leaving `y*`, and a pattern drawn from `p(y | x, y != y*)`.
    fn draw_other<R: Rng>(&self, x: usize, rng: &mut R, out: &mut Vec<Quadrant>) -> f64 {
        let range = x * self.two_m..(x + 1) * self.two_m;
        let (signs, flip, cumulative) = (
            &self.likely_positive[range.clone()],
            &self.flip[range.clone()],
            &self.cumulative[range],
        );
        let rest = cumulative[self.two_m - 1];
        if rest <= 0.0 {
            return 0.0;
        }
        let u = rng.gen::<f64>() * rest;
        let first = cumulative
            .iter()
            .position(|&c| c > u)
            .unwrap_or(self.two_m - 1);
        let mut bits = [true; 2];
        out.clear();
        for j in 0..self.two_m {
            bits[j % 2] = if j < first {
                signs[j]
            } else if j == first {
                !signs[j]
            } else {
                // likely sign with probability 1 - q_j
                signs[j] != (rng.gen::<f64>() < flip[j])
            };
            if j % 2 == 1 {
                out.push(Quadrant::from_signs(bits[0], bits[1]));
            }
        }
        rest
    }
}

/// Estimates `E[log2 p(y_Q | x) / p(y_Q)]` with both probabilities evaluated
/// exactly from the quadrant table.
///
/// Each draw of `x` contributes its most likely pattern `y*` with exact weight
/// `p(y* | x)`, and one pattern drawn from the law conditioned on `y != y*`
/// with weight `1 - p(y* | x)`. The estimate stays unbiased, and patterns too
/// rare to be sampled at high SNR still enter through their exact mass.
pub fn mi_quantized_mc(
    h: &ChannelMatrix,
    ensemble: &InputEnsemble,
    noise: &NoiseModel,
    settings: McSettings,
) -> Result<MIResult> {
    let start = Instant::now();
    check_samples(settings.samples)?;
    let h = h.canonical_rows();
    let table = QuadrantTable::build(&h, ensemble, noise)?;
    let split = ModalSplit::new(&table);
    let priors = ensemble.priors();
    let sampler = InputSampler::new(priors)?;

    let moments = run_blocks(&settings, |rng, y: &mut Vec<Quadrant>| {
        let x = sampler.draw(rng);
        let rest = split.draw_other(x, rng, y);
        let other = if rest > 0.0 {
            rest * information_density(&table, priors, x, y)
        } else {
            0.0
        };
        split.modal(x, y);
        split.p_modal[x] * information_density(&table, priors, x, y) + other
    });
    let (bpcu, stderr) = moments.mean_and_stderr();
    Ok(MIResult {
        bpcu,
        engine: Engine::Mc,
        stderr,
        samples: settings.samples,
        wallclock: start.elapsed(),
    })
}

/// `log2 p(y|x) - log2 p(y)`, switching to the log domain when products underflow.
fn information_density(
    table: &QuadrantTable,
    priors: &[f64],
    x: usize,
    pattern: &[Quadrant],
) -> f64 {
    let p_cond = table.conditional_digits(x, pattern);
    let mut p_out = 0.0;
    for (xp, &prior) in priors.iter().enumerate() {
        if prior > 0.0 {
            p_out += prior * table.conditional_digits(xp, pattern);
        }
    }
    if p_cond > f64::MIN_POSITIVE && p_out > f64::MIN_POSITIVE {
        return (p_cond / p_out).log2();
    }
    let log_cond = |xp: usize| -> f64 {
        table
            .rows_of(xp)
            .iter()
            .zip(pattern)
            .map(|(row, q)| row[q.index()].ln())
            .sum()
    };
    let terms: Vec<f64> = priors
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(xp, &p)| p.ln() + log_cond(xp))
        .collect();
    (log_cond(x) - log_sum_exp(&terms)) / LN_2
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Estimates the unquantized `I(X; Y)` as `E[log2 p(x | y) - log2 p(x)]`, with
/// the exact Gaussian posterior over the ensemble in log-sum-exp form.
pub fn mi_unquantized_discrete_mc(
    h: &ChannelMatrix,
    ensemble: &InputEnsemble,
    noise: &NoiseModel,
    settings: McSettings,
) -> Result<MIResult> {
    let start = Instant::now();
    check_samples(settings.samples)?;
    if ensemble.n_tx() != h.n_tx() {
        return Err(Error::Dimension {
            expected: h.n_tx(),
            got: ensemble.n_tx(),
        });
    }
    let h = h.canonical_rows();
    let means = ensemble.means(&h)?;
    let m_rx = h.m_rx();
    let priors = ensemble.priors();
    let log_priors: Vec<f64> = priors.iter().map(|p| p.ln()).collect();
    let sampler = InputSampler::new(priors)?;
    let inv_s2 = noise.sigma2().recip();

    let moments = run_blocks(&settings, |rng, n: &mut Vec<Complex64>| {
        let x = sampler.draw(rng);
        n.clear();
        n.resize(m_rx, Complex64::new(0.0, 0.0));
        add_noise(n, noise, rng);
        let mu_x = &means[x * m_rx..(x + 1) * m_rx];
        // exponent of p(x') p(y|x') up to the common Gaussian constant
        let exponent = |xp: usize| -> f64 {
            let mu = &means[xp * m_rx..(xp + 1) * m_rx];
            let dist: f64 = mu_x
                .iter()
                .zip(mu)
                .zip(n.iter())
                .map(|((a, b), w)| (a - b + w).norm_sqr())
                .sum();
            log_priors[xp] - dist * inv_s2
        };
        let mut max = f64::NEG_INFINITY;
        let mut exps = Vec::with_capacity(priors.len());
        for (xp, &prior) in priors.iter().enumerate() {
            let e = if prior > 0.0 {
                exponent(xp)
            } else {
                f64::NEG_INFINITY
            };
            max = max.max(e);
            exps.push(e);
        }
        let lse = max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
        let own = -n.iter().map(|w| w.norm_sqr()).sum::<f64>() * inv_s2;
        (own - lse) / LN_2
    });
    let (bpcu, stderr) = moments.mean_and_stderr();
    Ok(MIResult {
        bpcu,
        engine: Engine::McUnquantized,
        stderr,
        samples: settings.samples,
        wallclock: start.elapsed(),
    })
}

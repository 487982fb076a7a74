//! Helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use losmimo_core::geometry::{los_channel, packed_positions, ula_positions, ura_positions};
use losmimo_core::infotheory::{
    gaussian_capacity, high_snr_mi, mi_quantized_exact, mi_quantized_mc,
    mi_unquantized_discrete_mc, output_distribution, source_entropy, zero_threshold, McSettings,
    QuadrantTable,
};
use losmimo_core::signal::{build_constellation, enumerate_inputs, SignVector};
use losmimo_core::{
    ChannelMatrix, Complex64, InputEnsemble, LinkGeometry, NoiseModel, PackingCatalog,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// `I(X; Y_Q)` by direct summation over all `4^M` sign patterns, each
/// probability an explicit product of normal CDF differences.
pub fn naive_quantized_mi(h: &ChannelMatrix, ensemble: &InputEnsemble, sigma2: f64) -> f64 {
    let std = Normal::new(0.0, (sigma2 / 2.0).sqrt()).unwrap();
    let m_rx = h.m_rx();
    // P(component in [lo, hi]) for the negative or positive half line
    let band = |mean: f64, negative: bool| {
        if negative {
            std.cdf(0.0 - mean)
        } else {
            1.0 - std.cdf(0.0 - mean)
        }
    };
    let cond: Vec<Vec<f64>> = (0..ensemble.len())
        .map(|x| {
            let mu = h.apply(ensemble.vector(x)).unwrap();
            (0..4u64.pow(m_rx as u32))
                .map(|y| {
                    let mut p = 1.0;
                    for (m, mean) in mu.iter().enumerate() {
                        let digit = (y >> (2 * m)) & 3;
                        p *= band(mean.re, digit & 2 != 0) * band(mean.im, digit & 1 != 0);
                    }
                    p
                })
                .collect()
        })
        .collect();
    let n_y = cond[0].len();
    let p_y: Vec<f64> = (0..n_y)
        .map(|y| {
            (0..ensemble.len())
                .map(|x| ensemble.prior(x) * cond[x][y])
                .sum()
        })
        .collect();
    let mut mi = 0.0;
    for (x, row) in cond.iter().enumerate() {
        for (&p, &py) in row.iter().zip(&p_y) {
            if p > 0.0 {
                mi += ensemble.prior(x) * p * (p / py).log2();
            }
        }
    }
    mi
}

/// A randomized LOS link drawn from a seed.
#[derive(Clone, Debug)]
pub struct Link {
    pub h: ChannelMatrix,
    pub ensemble: InputEnsemble,
    pub snr_db: f64,
    pub label: String,
}

fn random_priors(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// LOS link with random layout, alphabet, priors and SNR, at most `max_rx`
/// receive antennas.
pub fn random_link(seed: u64, max_rx: usize) -> Link {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tx_layout = rng.gen_range(0..3);
    let n_tx = [1, 2, 4][tx_layout];
    let qam = if n_tx == 4 || rng.gen_bool(0.5) {
        "qam4"
    } else {
        "qam16"
    };
    let tx_aperture = rng.gen_range(0.3..0.8);
    let tx = if n_tx == 4 {
        ura_positions(tx_aperture, 4).unwrap()
    } else {
        ula_positions(tx_aperture, n_tx).unwrap()
    };
    let m_rx = rng.gen_range(1..=max_rx);
    let packed = rng.gen_bool(0.5);
    let rx_aperture = rng.gen_range(0.3..0.8);
    let rx = if packed {
        packed_positions(rx_aperture, m_rx, PackingCatalog::builtin()).unwrap()
    } else {
        ula_positions(rx_aperture, m_rx).unwrap()
    };
    let distance = rng.gen_range(50.0..150.0);
    let wavelength = rng.gen_range(0.004..0.006);
    let h = los_channel(&LinkGeometry::new(tx, rx, distance, wavelength).unwrap());
    let uniform = enumerate_inputs(&build_constellation(qam).unwrap(), n_tx).unwrap();
    let skewed = rng.gen_bool(0.3);
    let ensemble = if skewed {
        let vectors: Vec<Complex64> = uniform.vectors().flatten().copied().collect();
        let priors = random_priors(&mut rng, uniform.len());
        InputEnsemble::new(n_tx, vectors, priors).unwrap()
    } else {
        uniform
    };
    let snr_db = rng.gen_range(-10.0..25.0);
    let label = format!(
        "seed {seed}: N={n_tx} {qam}{} M={m_rx} {} R={distance:.1} lambda={wavelength:.4} SNR={snr_db:.2}",
        if skewed { " (skewed)" } else { "" },
        if packed { "packed" } else { "ula" },
    );
    Link {
        h,
        ensemble,
        snr_db,
        label,
    }
}

/// Smallest distance of a non-boundary mean dimension to the decision
/// threshold, in per-dimension noise standard deviations.
pub fn boundary_margin(h: &ChannelMatrix, ensemble: &InputEnsemble, noise: &NoiseModel) -> f64 {
    let means = ensemble.means(h).unwrap();
    let zero = zero_threshold(&means);
    means
        .iter()
        .flat_map(|m| [m.re.abs(), m.im.abs()])
        .filter(|v| *v > zero)
        .fold(f64::INFINITY, f64::min)
        / noise.per_dim_std()
}

fn rows(h: &ChannelMatrix, keep: &[usize]) -> ChannelMatrix {
    let entries = keep
        .iter()
        .flat_map(|&m| h.row(m).iter().copied())
        .collect();
    ChannelMatrix::from_rows(keep.len(), h.n_tx(), entries).unwrap()
}

pub const MC_SAMPLES: usize = 20_000;

/// Absolute slack for patterns too rare to appear in any affordable sample;
/// their mass is invisible to the sample standard error.
pub const MC_RARE_EVENT_FLOOR: f64 = 1e-6;

/// Checks the structural properties of the rate engines on one link and
/// returns a description of every violation.
pub fn property_violations(link: &Link, seed: u64) -> Vec<String> {
    let mut bad = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            bad.push(format!("{}: {what}", link.label));
        }
    };
    let (h, e) = (&link.h, &link.ensemble);
    let noise = NoiseModel::from_snr_db(link.snr_db).unwrap();
    let exact = mi_quantized_exact(h, e, &noise).unwrap().bpcu;
    let m_rx = h.m_rx();

    // normalization of p(y|x) and p(y)
    let table = QuadrantTable::build(h, e, &noise).unwrap();
    let p_y = output_distribution(&table, e.priors());
    let total: f64 = p_y.iter().sum();
    check((total - 1.0).abs() < 1e-12, format!("sum p(y) = {total}"));
    for x in [0, e.len() / 2, e.len() - 1] {
        let s: f64 = (0..p_y.len() as u64)
            .map(|y| table.conditional(x, &SignVector::unpack(y, m_rx)))
            .sum();
        check((s - 1.0).abs() < 1e-12, format!("sum p(y|x={x}) = {s}"));
    }

    // bounds
    let hx = source_entropy(e);
    check(exact >= 0.0, format!("negative rate {exact}"));
    check(
        exact <= hx.min(2.0 * m_rx as f64) + 1e-12,
        format!("rate {exact} above min(H(X)={hx}, 2M)"),
    );

    // scale invariance
    for c in [0.25, 3.0] {
        let scaled_noise = NoiseModel::new(noise.sigma2() * c * c).unwrap();
        let scaled = mi_quantized_exact(&h.scaled(c), e, &scaled_noise)
            .unwrap()
            .bpcu;
        check(
            (scaled - exact).abs() < 1e-9,
            format!("scale {c}: {scaled} vs {exact}"),
        );
    }

    // receive permutation invariance
    let order: Vec<usize> = (0..m_rx).rev().collect();
    let permuted = mi_quantized_exact(&h.permute_rows(&order).unwrap(), e, &noise)
        .unwrap()
        .bpcu;
    check(
        (permuted - exact).abs() < 1e-12,
        format!("permuted {permuted} vs {exact}"),
    );
    let rotated: Vec<usize> = (0..m_rx).map(|m| (m + 1) % m_rx).collect();
    let settings = McSettings::new(MC_SAMPLES, seed, 1);
    let mc_a = mi_quantized_mc(h, e, &noise, settings).unwrap();
    let mc_b = mi_quantized_mc(&h.permute_rows(&rotated).unwrap(), e, &noise, settings).unwrap();
    check(
        mc_a.bpcu == mc_b.bpcu,
        format!(
            "MC not permutation invariant: {} vs {}",
            mc_a.bpcu, mc_b.bpcu
        ),
    );

    // antenna superset monotonicity
    if m_rx > 1 {
        let drop = (seed as usize) % m_rx;
        let keep: Vec<usize> = (0..m_rx).filter(|&m| m != drop).collect();
        let subset = mi_quantized_exact(&rows(h, &keep), e, &noise).unwrap().bpcu;
        check(
            subset <= exact + 1e-12,
            format!("subset {subset} above superset {exact}"),
        );
    }

    // data processing: quantized below unquantized, unquantized below Gaussian capacity
    let unq =
        mi_unquantized_discrete_mc(h, e, &noise, McSettings::new(MC_SAMPLES, seed, 2)).unwrap();
    check(
        exact <= unq.bpcu + 3.0 * unq.stderr + 1e-12,
        format!(
            "quantized {exact} above unquantized {} (stderr {})",
            unq.bpcu, unq.stderr
        ),
    );
    let uniform_power = e.priors().iter().all(|&p| (p - e.prior(0)).abs() < 1e-15);
    if uniform_power {
        let cap = gaussian_capacity(h, &noise).unwrap().bpcu;
        check(
            exact <= cap + 1e-12,
            format!("quantized {exact} above capacity {cap}"),
        );
    }

    // Monte-Carlo agrees with the exact value
    check(
        (mc_a.bpcu - exact).abs() <= 3.0 * mc_a.stderr + MC_RARE_EVENT_FLOOR,
        format!("MC {} vs exact {exact}, stderr {}", mc_a.bpcu, mc_a.stderr),
    );

    // noiseless limit; a mean within a few sigma of a threshold at 60 dB has
    // not yet reached it, so such links are compared where it is 8 sigma away
    let (snr, at_high, limit) = noiseless_comparison(h, e);
    check(
        (at_high - limit).abs() < 1e-3,
        format!("{snr:.1} dB {at_high} vs limit {limit}"),
    );
    bad
}

/// Margin, in per-dimension sigmas at 60 dB, beyond which 60 dB counts as noiseless.
pub const RESOLVED_MARGIN: f64 = 5.0;

/// SNR used for the noiseless-limit comparison, the exact rate there, and the limit.
pub fn noiseless_comparison(h: &ChannelMatrix, e: &InputEnsemble) -> (f64, f64, f64) {
    let margin = boundary_margin(h, e, &NoiseModel::from_snr_db(60.0).unwrap());
    let snr = if margin >= RESOLVED_MARGIN {
        60.0
    } else {
        60.0 + 20.0 * (8.0 / margin).log10()
    };
    let at_high = mi_quantized_exact(h, e, &NoiseModel::from_snr_db(snr).unwrap())
        .unwrap()
        .bpcu;
    (snr, at_high, high_snr_mi(h, e).unwrap().bpcu)
}

/// A small instance for the oracle comparison: random complex gains (or a
/// degenerate channel with means on the decision boundary), `N <= 2`, `M <= 3`.
pub fn oracle_instance(seed: u64) -> (ChannelMatrix, InputEnsemble, NoiseModel, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n_tx = rng.gen_range(1..=2);
    let m_rx = rng.gen_range(1..=3);
    let degenerate = seed.is_multiple_of(5);
    let entries: Vec<Complex64> = (0..m_rx * n_tx)
        .map(|_| {
            if degenerate {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(
                    rng.gen_range(0.2..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            }
        })
        .collect();
    let h = ChannelMatrix::from_rows(m_rx, n_tx, entries).unwrap();
    let qam = if rng.gen_bool(0.5) { "qam4" } else { "qam16" };
    let uniform = enumerate_inputs(&build_constellation(qam).unwrap(), n_tx).unwrap();
    let ensemble = if rng.gen_bool(0.4) {
        let vectors: Vec<Complex64> = uniform.vectors().flatten().copied().collect();
        let priors = random_priors(&mut rng, uniform.len());
        InputEnsemble::new(n_tx, vectors, priors).unwrap()
    } else {
        uniform
    };
    let snr = rng.gen_range(-10.0..30.0);
    let label = format!(
        "seed {seed}: N={n_tx} M={m_rx} {qam} SNR={snr:.2}{}",
        if degenerate { " degenerate" } else { "" }
    );
    (h, ensemble, NoiseModel::from_snr_db(snr).unwrap(), label)
}

/// Largest |exact - naive| over `count` oracle instances, with its label.
pub fn oracle_worst_gap(count: u64) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for seed in 0..count {
        let (h, e, noise, label) = oracle_instance(seed);
        let exact = mi_quantized_exact(&h, &e, &noise).unwrap().bpcu;
        let naive = naive_quantized_mi(&h, &e, noise.sigma2());
        let gap = (exact - naive).abs();
        if gap >= worst.0 {
            worst = (gap, label);
        }
    }
    worst
}

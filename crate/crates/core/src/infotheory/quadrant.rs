use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::signal::{InputEnsemble, NoiseModel, Quadrant, SignVector};

/// `P(Re{y} > 0)` for `y ~ CN(mean, σ²)` along one real dimension.
///
/// Each real dimension has standard deviation `σ/√2`, so
/// `P(y_r > 0) = ½ erfc(-μ_r / σ)`.
#[inline]
pub fn positive_probability(mean: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc(-mean / sigma)
}

/// Probabilities of the four sign quadrants, ordered `++, +-, -+, --`
/// (real sign first).
pub fn quadrant_probabilities(mean: Complex64, sigma2: f64) -> Result<[f64; 4]> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::NoiseVariance(sigma2));
    }
    Ok(quadrant_row(mean, sigma2.sqrt()))
}

#[inline]
fn quadrant_row(mean: Complex64, sigma: f64) -> [f64; 4] {
    let re_pos = positive_probability(mean.re, sigma);
    let re_neg = positive_probability(-mean.re, sigma);
    let im_pos = positive_probability(mean.im, sigma);
    let im_neg = positive_probability(-mean.im, sigma);
    [
        re_pos * im_pos,
        re_pos * im_neg,
        re_neg * im_pos,
        re_neg * im_neg,
    ]
}

/// Per (input vector, receive antenna) quadrant probabilities.
#[derive(Clone, Debug)]
pub struct QuadrantTable {
    rows: Vec<[f64; 4]>,
    m_rx: usize,
}

impl QuadrantTable {
    pub fn build(h: &ChannelMatrix, ensemble: &InputEnsemble, noise: &NoiseModel) -> Result<Self> {
        if ensemble.n_tx() != h.n_tx() {
            return Err(Error::Dimension {
                expected: h.n_tx(),
                got: ensemble.n_tx(),
            });
        }
        let sigma = noise.sigma2().sqrt();
        let rows = ensemble
            .means(h)?
            .into_iter()
            .map(|mu| quadrant_row(mu, sigma))
            .collect();
        Ok(Self {
            rows,
            m_rx: h.m_rx(),
        })
    }

    pub fn m_rx(&self) -> usize {
        self.m_rx
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.len() / self.m_rx
    }

    /// Quadrant row for input `x` at antenna `m`.
    #[inline]
    pub fn row(&self, x: usize, m: usize) -> &[f64; 4] {
        &self.rows[x * self.m_rx + m]
    }

    /// All antenna rows of input `x`.
    #[inline]
    pub fn rows_of(&self, x: usize) -> &[[f64; 4]] {
        &self.rows[x * self.m_rx..(x + 1) * self.m_rx]
    }

    /// `p(y_Q | x)` as the product of the selected per-antenna entries.
    pub fn conditional(&self, x: usize, y: &SignVector) -> f64 {
        assert_eq!(y.len(), self.m_rx);
        self.rows_of(x)
            .iter()
            .zip(&y.0)
            .map(|(row, q)| row[q.index()])
            .product()
    }

    /// Same as [`conditional`](Self::conditional) for a pattern given as digits.
    #[inline]
    pub(crate) fn conditional_digits(&self, x: usize, digits: &[Quadrant]) -> f64 {
        self.rows_of(x)
            .iter()
            .zip(digits)
            .map(|(row, q)| row[q.index()])
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{los_channel, ula_positions, LinkGeometry};
    use crate::signal::{build_constellation, enumerate_inputs};

    /// Simpson's rule over `[-L, 0]` and `[0, L]` for the standard normal density.
    fn phi_by_quadrature(z: f64) -> f64 {
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let simpson = |a: f64, b: f64, n: usize| {
            let h = (b - a) / n as f64;
            let mut s = density(a) + density(b);
            for i in 1..n {
                s += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        simpson(-12.0, z, 20_000)
    }

    /// 2D Simpson integration of the bivariate density over the positive quadrant.
    fn positive_quadrant_by_quadrature(mu: Complex64, sigma2: f64) -> f64 {
        let s = (sigma2 / 2.0).sqrt();
        let n = 800;
        let (a, b) = (0.0, mu.re.abs().max(mu.im.abs()) + 12.0 * s);
        let h = (b - a) / n as f64;
        let w = |i: usize| {
            if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut total = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let (u, v) = (a + i as f64 * h, a + j as f64 * h);
                let d = ((u - mu.re).powi(2) + (v - mu.im).powi(2)) / (2.0 * s * s);
                total += w(i) * w(j) * (-d).exp();
            }
        }
        total * h * h / 9.0 / (2.0 * std::f64::consts::PI * s * s)
    }

    #[test]
    fn zero_mean_is_uniform() {
        for s2 in [0.01, 1.0, 100.0] {
            let p = quadrant_probabilities(Complex64::new(0.0, 0.0), s2).unwrap();
            assert!(p.iter().all(|&v| (v - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn vanishing_noise_is_deterministic() {
        let p = quadrant_probabilities(Complex64::new(1.0, 1.0), 1e-12).unwrap();
        assert_eq!(p, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_std_matches_quadrature() {
        // σ² = 2 gives unit standard deviation per real dimension.
        let mu = Complex64::new(1.0, 1.0);
        let p = quadrant_probabilities(mu, 2.0).unwrap();
        let phi1 = phi_by_quadrature(1.0);
        assert!((phi1 * phi1 - 0.707_860_981).abs() < 1e-8);
        assert!((p[0] - phi1 * phi1).abs() < 1e-10);
        let q = positive_quadrant_by_quadrature(mu, 2.0);
        assert!((p[0] - q).abs() < 1e-9, "{} vs {}", p[0], q);
        let q = positive_quadrant_by_quadrature(Complex64::new(-0.4, 2.3), 0.7);
        let p = quadrant_probabilities(Complex64::new(-0.4, 2.3), 0.7).unwrap();
        assert!((p[0] - q).abs() < 1e-9);
    }

    #[test]
    fn nonpositive_variance_rejected() {
        assert!(quadrant_probabilities(Complex64::new(1.0, 0.0), 0.0).is_err());
        assert!(quadrant_probabilities(Complex64::new(1.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn table_rows_normalized_and_factorized() {
        let tx = ula_positions(0.5, 2).unwrap();
        let rx = ula_positions(0.5, 5).unwrap();
        let h = los_channel(&LinkGeometry::new(tx, rx, 100.0, 0.005).unwrap());
        let e = enumerate_inputs(&build_constellation("qam16").unwrap(), 2).unwrap();
        let noise = NoiseModel::from_snr_db(3.0).unwrap();
        let t = QuadrantTable::build(&h, &e, &noise).unwrap();
        let sigma = noise.sigma2().sqrt();
        let means = e.means(&h).unwrap();
        for x in 0..e.len() {
            for m in 0..5 {
                let row = t.row(x, m);
                assert!(row.iter().all(|&p| p >= 0.0));
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let mu = means[x * 5 + m];
                let re = positive_probability(mu.re, sigma);
                let im = positive_probability(mu.im, sigma);
                assert!((row[0] - re * im).abs() < 1e-15);
                assert!((row[3] - (1.0 - re) * (1.0 - im)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_input_rows_are_uniform() {
        let tx = ula_positions(0.5, 1).unwrap();
        let rx = ula_positions(0.5, 3).unwrap();
        let h = los_channel(&LinkGeometry::new(tx, rx, 100.0, 0.005).unwrap());
        let e = InputEnsemble::new(1, vec![Complex64::new(0.0, 0.0)], vec![1.0]).unwrap();
        let t = QuadrantTable::build(&h, &e, &NoiseModel::new(0.3).unwrap()).unwrap();
        for m in 0..3 {
            assert_eq!(t.row(0, m), &[0.25; 4]);
        }
    }

    #[test]
    fn conditionals_sum_to_one_over_patterns() {
        let tx = ula_positions(0.5, 2).unwrap();
        let rx = ula_positions(0.5, 6).unwrap();
        let h = los_channel(&LinkGeometry::new(tx, rx, 100.0, 0.005).unwrap());
        let e = enumerate_inputs(&build_constellation("qam4").unwrap(), 2).unwrap();
        let t = QuadrantTable::build(&h, &e, &NoiseModel::from_snr_db(5.0).unwrap()).unwrap();
        for x in 0..e.len() {
            let total: f64 = (0..4u64.pow(6))
                .map(|i| t.conditional(x, &SignVector::unpack(i, 6)))
                .sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

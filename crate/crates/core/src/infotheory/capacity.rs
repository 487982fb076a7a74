use std::time::Instant;

use num_complex::Complex64;

use super::{Engine, MIResult};
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::signal::NoiseModel;

/// Unquantized capacity with Gaussian input and equal power per transmit antenna,
/// `log2 det(I_M + H Hᴴ / (N σ²))`.
///
/// Evaluated through the smaller of the two Gram matrices (`det(I + A Aᴴ) =
/// det(I + Aᴴ A)`).
pub fn gaussian_capacity(h: &ChannelMatrix, noise: &NoiseModel) -> Result<MIResult> {
    let start = Instant::now();
    let (m, n) = (h.m_rx(), h.n_tx());
    let scale = (n as f64 * noise.sigma2()).recip();
    let dim = m.min(n);
    let mut gram = vec![Complex64::new(0.0, 0.0); dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let v: Complex64 = if m <= n {
                // (H Hᴴ)_ab
                (0..n).map(|k| h.get(a, k) * h.get(b, k).conj()).sum()
            } else {
                // (Hᴴ H)_ab
                (0..m).map(|k| h.get(k, a).conj() * h.get(k, b)).sum()
            };
            gram[a * dim + b] = v * scale;
        }
        gram[a * dim + a] += 1.0;
    }
    let bpcu = log_det_hpd(&gram, dim)? / std::f64::consts::LN_2;
    Ok(MIResult::deterministic(
        bpcu,
        Engine::Capacity,
        start.elapsed(),
    ))
}

/// Natural log-determinant of a Hermitian positive-definite matrix via Cholesky.
pub fn log_det_hpd(a: &[Complex64], dim: usize) -> Result<f64> {
    if a.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            got: a.len(),
        });
    }
    let mut l = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut log_det = 0.0;
    for j in 0..dim {
        let mut d = a[j * dim + j].re;
        for k in 0..j {
            d -= l[j * dim + k].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::Config("matrix is not positive definite".into()));
        }
        let ljj = d.sqrt();
        l[j * dim + j] = Complex64::new(ljj, 0.0);
        log_det += 2.0 * ljj.ln();
        for i in j + 1..dim {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k].conj();
            }
            l[i * dim + j] = s / ljj;
        }
    }
    Ok(log_det)
}

//! Transmit alphabets, enumerated input ensembles, noise, and the 1-bit I/Q quantizer.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;

/// Default bound on `|A|^N` for [`enumerate_inputs`].
pub const DEFAULT_ENSEMBLE_CAP: usize = 65_536;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Qam4,
    Qam16,
    Custom,
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstellationKind::Qam4 => "qam4",
            ConstellationKind::Qam16 => "qam16",
            ConstellationKind::Custom => "custom",
        })
    }
}

impl FromStr for ConstellationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "qam4" | "4qam" | "qpsk" => Ok(ConstellationKind::Qam4),
            "qam16" | "16qam" => Ok(ConstellationKind::Qam16),
            _ => Err(Error::Constellation(format!("unknown constellation `{s}`"))),
        }
    }
}

/// Unit-average-power complex alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Result<Self> {
        match kind {
            ConstellationKind::Qam4 => Ok(Self::square_qam(1, kind)),
            ConstellationKind::Qam16 => Ok(Self::square_qam(2, kind)),
            ConstellationKind::Custom => Err(Error::Constellation(
                "custom constellations are built with Constellation::custom".into(),
            )),
        }
    }

    /// Gray-labelled square QAM with `bits_per_axis` bits on each of I and Q.
    /// Index bits are `[I bits | Q bits]`.
    fn square_qam(bits_per_axis: u32, kind: ConstellationKind) -> Self {
        let levels = 1usize << bits_per_axis;
        // Gray code g maps to amplitude level 2*rank - (levels - 1).
        let amplitude = |bits: usize| -> f64 {
            let mut rank = bits;
            let mut shift = bits >> 1;
            while shift != 0 {
                rank ^= shift;
                shift >>= 1;
            }
            (2 * rank) as f64 - (levels - 1) as f64
        };
        let power = 2.0 * (levels * levels - 1) as f64 / 3.0;
        let scale = power.sqrt().recip();
        let points = (0..levels * levels)
            .map(|i| {
                Complex64::new(amplitude(i >> bits_per_axis), amplitude(i & (levels - 1))) * scale
            })
            .collect();
        Self { kind, points }
    }

    /// Arbitrary alphabet, rescaled to unit average power.
    pub fn custom(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Constellation("no points".into()));
        }
        if points
            .iter()
            .any(|p| !(p.re.is_finite() && p.im.is_finite()))
        {
            return Err(Error::Constellation("non-finite point".into()));
        }
        for (i, a) in points.iter().enumerate() {
            if points[i + 1..].iter().any(|b| a == b) {
                return Err(Error::Constellation(format!("duplicate point {a}")));
            }
        }
        let power = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        if power <= 0.0 {
            return Err(Error::Constellation("zero average power".into()));
        }
        let scale = power.sqrt().recip();
        Ok(Self {
            kind: ConstellationKind::Custom,
            points: points.into_iter().map(|p| p * scale).collect(),
        })
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn average_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Parses a constellation name and builds it.
pub fn build_constellation(name: &str) -> Result<Constellation> {
    Constellation::new(name.parse()?)
}

/// Finite set of transmit vectors with their prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct InputEnsemble {
    vectors: Vec<Complex64>,
    priors: Vec<f64>,
    n_tx: usize,
}

impl InputEnsemble {
    /// Explicit ensemble; `vectors` holds `priors.len()` rows of `n_tx` entries.
    pub fn new(n_tx: usize, vectors: Vec<Complex64>, priors: Vec<f64>) -> Result<Self> {
        if n_tx == 0 || priors.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                got: 0,
            });
        }
        if vectors.len() != n_tx * priors.len() {
            return Err(Error::Dimension {
                expected: n_tx * priors.len(),
                got: vectors.len(),
            });
        }
        if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Config("priors must be non-negative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("priors sum to {total}, not 1")));
        }
        Ok(Self {
            vectors,
            priors,
            n_tx,
        })
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i * self.n_tx..(i + 1) * self.n_tx]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Complex64]> {
        self.vectors.chunks_exact(self.n_tx)
    }

    pub fn prior(&self, i: usize) -> f64 {
        self.priors[i]
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `E[x xᴴ]` as a row-major `N × N` matrix, summed exactly over the ensemble.
    pub fn covariance(&self) -> Vec<Complex64> {
        let n = self.n_tx;
        let mut cov = vec![Complex64::new(0.0, 0.0); n * n];
        for (x, &p) in self.vectors().zip(&self.priors) {
            for a in 0..n {
                for b in 0..n {
                    cov[a * n + b] += x[a] * x[b].conj() * p;
                }
            }
        }
        cov
    }

    /// Noiseless receive means `μ_x = H x`, row-major `|X| × M`.
    pub fn means(&self, h: &ChannelMatrix) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.len() * h.m_rx());
        for x in self.vectors() {
            out.extend(h.apply(x)?);
        }
        Ok(out)
    }
}

/// All `|A|^N` vectors over `c`, scaled by `1/√N`, uniform priors,
/// lexicographic in constellation index with the first antenna most significant.
pub fn enumerate_inputs(c: &Constellation, n_tx: usize) -> Result<InputEnsemble> {
    enumerate_inputs_capped(c, n_tx, DEFAULT_ENSEMBLE_CAP)
}

pub fn enumerate_inputs_capped(
    c: &Constellation,
    n_tx: usize,
    cap: usize,
) -> Result<InputEnsemble> {
    if n_tx == 0 {
        return Err(Error::Dimension {
            expected: 1,
            got: 0,
        });
    }
    let size = (c.len() as u128)
        .checked_pow(n_tx as u32)
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::EnsembleTooLarge { size, cap });
    }
    let size = size as usize;
    let scale = (n_tx as f64).sqrt().recip();
    let mut vectors = Vec::with_capacity(size * n_tx);
    let mut digits = vec![0usize; n_tx];
    for _ in 0..size {
        vectors.extend(digits.iter().map(|&d| c.points()[d] * scale));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < c.len() {
                break;
            }
            *d = 0;
        }
    }
    InputEnsemble::new(n_tx, vectors, vec![1.0 / size as f64; size])
}

/// Circularly-symmetric complex Gaussian noise with variance `sigma2` per antenna.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::NoiseVariance(sigma2));
        }
        Ok(Self { sigma2 })
    }

    /// Unit transmit power over noise power: `SNR = 10 log10(1/σ²)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(10f64.powf(-snr_db / 10.0))
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn snr_db(&self) -> f64 {
        -10.0 * self.sigma2.log10()
    }

    /// Standard deviation of each real dimension.
    pub fn per_dim_std(&self) -> f64 {
        (self.sigma2 / 2.0).sqrt()
    }
}

/// Output of one antenna's I/Q comparator pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Quadrant {
    /// `Re > 0`, `Im > 0`
    PosPos = 0,
    PosNeg = 1,
    NegPos = 2,
    NegNeg = 3,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::PosPos,
        Quadrant::PosNeg,
        Quadrant::NegPos,
        Quadrant::NegNeg,
    ];

    pub fn from_signs(re_positive: bool, im_positive: bool) -> Self {
        Self::ALL[(usize::from(!re_positive) << 1) | usize::from(!im_positive)]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// `(re_sign, im_sign)` in `{-1, +1}`.
    pub fn signs(self) -> (i8, i8) {
        let s = |neg: bool| if neg { -1 } else { 1 };
        (s(self.index() & 2 != 0), s(self.index() & 1 != 0))
    }
}

/// Quantized receive vector, one quadrant per antenna.
///
/// Packs into `Σ_m q_m 4^m` with antenna 0 in the least significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<Quadrant>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pack(&self) -> u64 {
        assert!(self.len() <= 32, "sign vectors pack at most 32 antennas");
        self.0
            .iter()
            .rev()
            .fold(0u64, |acc, q| (acc << 2) | q.index() as u64)
    }

    pub fn unpack(index: u64, m_rx: usize) -> Self {
        assert!(m_rx <= 32, "sign vectors pack at most 32 antennas");
        SignVector(
            (0..m_rx)
                .map(|m| Quadrant::ALL[((index >> (2 * m)) & 3) as usize])
                .collect(),
        )
    }
}

/// Sign of real and imaginary part per antenna; an exact zero maps to `+1`.
pub fn quantize_1bit(y: &[Complex64]) -> SignVector {
    SignVector(
        y.iter()
            .map(|s| Quadrant::from_signs(s.re >= 0.0, s.im >= 0.0))
            .collect(),
    )
}

/// `H x + n` with `n ~ CN(0, σ² I)`, drawing real then imaginary part per antenna.
pub fn sample_received<R: Rng + ?Sized>(
    h: &ChannelMatrix,
    x: &[Complex64],
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mut y = h.apply(x)?;
    add_noise(&mut y, noise, rng);
    Ok(y)
}

pub(crate) fn add_noise<R: Rng + ?Sized>(y: &mut [Complex64], noise: &NoiseModel, rng: &mut R) {
    let std = noise.per_dim_std();
    for s in y {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * std, im * std);
    }
}

/// Independent generator for one named stream under a run seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Combines stream coordinates into one stream id (splitmix64 chaining).
pub fn stream_id(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c909, |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

/// Stable 64-bit FNV-1a hash, used to turn experiment names into stream coordinates.
pub fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::array::AntennaArray;
use crate::error::{Error, Result};

/// Transmit and receive arrays facing each other broadside across `distance`.
///
/// Both arrays are centered on the boresight axis; array coordinates are
/// transverse offsets from that axis.
#[derive(Clone, Debug)]
pub struct LinkGeometry {
    pub tx: AntennaArray,
    pub rx: AntennaArray,
    distance: f64,
    wavelength: f64,
}

impl LinkGeometry {
    pub fn new(tx: AntennaArray, rx: AntennaArray, distance: f64, wavelength: f64) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::Geometry(format!(
                "link distance must be positive, got {distance}"
            )));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::Geometry(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            tx,
            rx,
            distance,
            wavelength,
        })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Path length between transmit antenna `n` and receive antenna `m`.
    pub fn path_length(&self, m: usize, n: usize) -> f64 {
        let r = &self.rx.positions()[m];
        let t = &self.tx.positions()[n];
        let du = t.u - r.u;
        let dv = t.v - r.v;
        (self.distance * self.distance + du * du + dv * dv).sqrt()
    }
}

/// Row-major `M × N` complex channel, rows indexed by receive antenna.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    entries: Vec<Complex64>,
    m_rx: usize,
    n_tx: usize,
}

impl ChannelMatrix {
    pub fn from_rows(m_rx: usize, n_tx: usize, entries: Vec<Complex64>) -> Result<Self> {
        if m_rx == 0 || n_tx == 0 {
            return Err(Error::Dimension {
                expected: 1,
                got: 0,
            });
        }
        if entries.len() != m_rx * n_tx {
            return Err(Error::Dimension {
                expected: m_rx * n_tx,
                got: entries.len(),
            });
        }
        Ok(Self {
            entries,
            m_rx,
            n_tx,
        })
    }

    pub fn m_rx(&self) -> usize {
        self.m_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.n_tx + n]
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.entries[m * self.n_tx..(m + 1) * self.n_tx]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `H x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n_tx {
            return Err(Error::Dimension {
                expected: self.n_tx,
                got: x.len(),
            });
        }
        Ok((0..self.m_rx)
            .map(|m| self.row(m).iter().zip(x).map(|(h, s)| h * s).sum())
            .collect())
    }

    pub fn scaled(&self, c: f64) -> ChannelMatrix {
        ChannelMatrix {
            entries: self.entries.iter().map(|h| h * c).collect(),
            ..*self
        }
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<ChannelMatrix> {
        if order.len() != self.m_rx || order.iter().any(|&i| i >= self.m_rx) {
            return Err(Error::Dimension {
                expected: self.m_rx,
                got: order.len(),
            });
        }
        let entries = order
            .iter()
            .flat_map(|&m| self.row(m).iter().copied())
            .collect();
        Ok(ChannelMatrix { entries, ..*self })
    }

    /// Rows sorted by the bit patterns of their entries.
    ///
    /// Any row permutation of the same channel maps to the same canonical
    /// matrix, bit for bit.
    pub fn canonical_rows(&self) -> ChannelMatrix {
        let key = |m: usize| -> Vec<(u64, u64)> {
            self.row(m)
                .iter()
                .map(|h| (h.re.to_bits(), h.im.to_bits()))
                .collect()
        };
        let mut order: Vec<usize> = (0..self.m_rx).collect();
        order.sort_by_cached_key(|&m| key(m));
        self.permute_rows(&order).expect("order is a permutation")
    }
}

/// Spherical-wave line-of-sight channel, `H[m][n] = exp(-j 2π r_mn / λ)`.
///
/// Path gains are identical across antenna pairs and taken as one.
pub fn los_channel(geom: &LinkGeometry) -> ChannelMatrix {
    let m_rx = geom.rx.len();
    let n_tx = geom.tx.len();
    let mut entries = Vec::with_capacity(m_rx * n_tx);
    for m in 0..m_rx {
        for n in 0..n_tx {
            let cycles = geom.path_length(m, n) / geom.wavelength();
            // Whole wavelengths carry no phase; reduce before scaling by 2π.
            let phase = -TAU * (cycles - cycles.round());
            entries.push(Complex64::from_polar(1.0, phase));
        }
    }
    ChannelMatrix {
        entries,
        m_rx,
        n_tx,
    }
}

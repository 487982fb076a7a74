use std::fmt;

use serde::{Deserialize, Serialize};

use super::packing::PackingCatalog;
use crate::error::{Error, Result};

/// Containment tolerance for positions against the declared aperture, in meters.
const APERTURE_TOL: f64 = 1e-12;

/// A point in the plane transverse to the link axis, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub u: f64,
    pub v: f64,
}

impl Position {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }

    pub fn offset(&self, du: f64, dv: f64) -> Position {
        Position::new(self.u + du, self.v + dv)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayKind {
    Ula,
    Ura,
    Packed,
    Custom,
}

impl fmt::Display for ArrayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArrayKind::Ula => "ula",
            ArrayKind::Ura => "ura",
            ArrayKind::Packed => "packed",
            ArrayKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Ordered antenna positions of one side of the link.
///
/// The positions lie inside a segment (ULA) or square of side `aperture`
/// centered on the boresight axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AntennaArray {
    positions: Vec<Position>,
    aperture: f64,
    kind: ArrayKind,
}

impl AntennaArray {
    /// Builds an array from arbitrary positions, checking the array invariants.
    pub fn custom(positions: Vec<Position>, aperture: f64) -> Result<Self> {
        Self::checked(positions, aperture, ArrayKind::Custom)
    }

    fn checked(positions: Vec<Position>, aperture: f64, kind: ArrayKind) -> Result<Self> {
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(Error::Geometry(format!(
                "aperture must be positive, got {aperture}"
            )));
        }
        if positions.is_empty() {
            return Err(Error::Geometry("array has no antennas".into()));
        }
        let half = aperture / 2.0 + APERTURE_TOL;
        for (i, p) in positions.iter().enumerate() {
            if !(p.u.is_finite() && p.v.is_finite()) {
                return Err(Error::Geometry(format!(
                    "antenna {i} has non-finite position"
                )));
            }
            if p.u.abs() > half || p.v.abs() > half {
                return Err(Error::Geometry(format!(
                    "antenna {i} at ({}, {}) lies outside the {aperture} m aperture",
                    p.u, p.v
                )));
            }
        }
        if positions.len() > 1 && min_pairwise_distance(&positions) <= 0.0 {
            return Err(Error::Geometry("antenna positions are not distinct".into()));
        }
        Ok(Self {
            positions,
            aperture,
            kind,
        })
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Largest extent (segment length or square side) in meters.
    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    /// Smallest distance between any two antennas, `f64::INFINITY` for a single antenna.
    pub fn min_spacing(&self) -> f64 {
        min_pairwise_distance(&self.positions)
    }

    /// Same array shifted rigidly in the transverse plane. The result is a
    /// custom array whose aperture grows to keep the shifted points inside it.
    pub fn translated(&self, du: f64, dv: f64) -> Result<Self> {
        let positions: Vec<_> = self.positions.iter().map(|p| p.offset(du, dv)).collect();
        let reach = positions
            .iter()
            .map(|p| p.u.abs().max(p.v.abs()))
            .fold(0.0, f64::max);
        Self::custom(positions, self.aperture.max(2.0 * reach))
    }

    /// Same antennas in a different order; `order[i]` names the antenna placed at slot `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: order.len(),
            });
        }
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Geometry("order is not a permutation".into()));
            }
        }
        Ok(Self {
            positions: order.iter().map(|&i| self.positions[i]).collect(),
            aperture: self.aperture,
            kind: self.kind,
        })
    }
}

/// Minimum distance over all antenna pairs.
pub fn min_pairwise_distance(points: &[Position]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(a.distance(b));
        }
    }
    best
}

/// Uniform linear array along the `u` axis with its endpoints at `±aperture/2`.
///
/// A single antenna sits at the segment center.
pub fn ula_positions(aperture: f64, count: usize) -> Result<AntennaArray> {
    if count == 0 {
        return Err(Error::Geometry("ULA needs at least one antenna".into()));
    }
    let positions = if count == 1 {
        vec![Position::new(0.0, 0.0)]
    } else {
        let spacing = aperture / (count - 1) as f64;
        (0..count)
            .map(|i| Position::new(-aperture / 2.0 + spacing * i as f64, 0.0))
            .collect()
    };
    AntennaArray::checked(positions, aperture, ArrayKind::Ula)
}

/// Square `k × k` grid spanning the `aperture × aperture` square, row by row in `v`.
pub fn ura_positions(aperture: f64, count: usize) -> Result<AntennaArray> {
    let side = integer_sqrt(count).ok_or_else(|| {
        Error::Geometry(format!(
            "URA needs a perfect-square antenna count, got {count}"
        ))
    })?;
    let coord = |i: usize| {
        if side == 1 {
            0.0
        } else {
            -aperture / 2.0 + aperture * i as f64 / (side - 1) as f64
        }
    };
    let positions = (0..side)
        .flat_map(|row| (0..side).map(move |col| (row, col)))
        .map(|(row, col)| Position::new(coord(col), coord(row)))
        .collect();
    AntennaArray::checked(positions, aperture, ArrayKind::Ura)
}

/// Best-known square packing from `catalog`, scaled to `aperture` and centered.
///
/// Catalog ordering and orientation are kept as stored.
pub fn packed_positions(
    aperture: f64,
    count: usize,
    catalog: &PackingCatalog,
) -> Result<AntennaArray> {
    let unit = catalog.get(count).ok_or(Error::MissingPacking(count))?;
    let positions = unit
        .iter()
        .map(|&[x, y]| Position::new((x - 0.5) * aperture, (y - 0.5) * aperture))
        .collect();
    AntennaArray::checked(positions, aperture, ArrayKind::Packed)
}

fn integer_sqrt(n: usize) -> Option<usize> {
    if n == 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

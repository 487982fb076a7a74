//! Best-known packings of points in the unit square.
//!
//! The catalog is a plain text file with one record per line,
//! `M x1 y1 x2 y2 … xM yM`, coordinates in `[0, 1]`, and `#` comment lines.
//! Loading validates every record: the point count, the coordinate range,
//! distinctness, and (for counts with a known optimum) the minimum distance.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/packings.txt");

/// Tolerance on the declared minimum distance of a record.
pub const MIN_DISTANCE_TOL: f64 = 1e-9;

/// Best-known maximum minimum distance of `M` points in the unit square,
/// indexed by `M - 2`.
const BEST_KNOWN_MIN_DISTANCE: [f64; 19] = [
    std::f64::consts::SQRT_2,
    1.035_276_180_410_083, // sqrt(6) - sqrt(2)
    1.0,
    std::f64::consts::FRAC_1_SQRT_2,
    0.600_925_212_577_331_5, // sqrt(13) / 6
    0.535_898_384_862_245_4, // 4 - 2 sqrt(3)
    0.517_638_090_205_041_5, // (sqrt(6) - sqrt(2)) / 2
    0.5,
    0.421_279_543_983_903_4,
    0.398_207_310_236_844_2,
    0.388_730_126_323_02, // sqrt(34) / 15
    0.366_096_007_696_425,
    0.348_915_260_374_019,
    0.341_081_377_402_108_9,
    1.0 / 3.0,
    0.306_153_985_300_332_4,
    0.300_462_606_288_665_8,
    0.289_541_991_994_981,
    0.286_611_652_351_681_6,
];

/// Declared minimum pairwise distance for `count` unit-square points, if tabulated.
pub fn declared_min_distance(count: usize) -> Option<f64> {
    count
        .checked_sub(2)
        .and_then(|i| BEST_KNOWN_MIN_DISTANCE.get(i).copied())
}

/// Map from point count to unit-square coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PackingCatalog {
    entries: BTreeMap<usize, Vec<[f64; 2]>>,
}

impl PackingCatalog {
    /// The catalog shipped with the crate (M = 1…20).
    pub fn builtin() -> &'static PackingCatalog {
        static CATALOG: OnceLock<PackingCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            PackingCatalog::parse(BUILTIN).expect("builtin packing catalog is valid")
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut catalog = PackingCatalog::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::CatalogParse { line, msg };
            let mut tokens = body.split_whitespace();
            let count: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|&m| m > 0)
                .ok_or_else(|| err("expected a positive point count".into()))?;
            let values = tokens
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| err(format!("bad coordinate `{t}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != 2 * count {
                return Err(err(format!(
                    "expected {} coordinates for {count} points, found {}",
                    2 * count,
                    values.len()
                )));
            }
            let points = values.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            if catalog.entries.contains_key(&count) {
                return Err(err(format!("duplicate record for {count} points")));
            }
            catalog.insert(count, points).map_err(|e| match e {
                Error::CatalogParse { msg, .. } => err(msg),
                other => other,
            })?;
        }
        Ok(catalog)
    }

    /// Adds or replaces a record after validating it.
    pub fn insert(&mut self, count: usize, points: Vec<[f64; 2]>) -> Result<()> {
        let err = |msg: String| Error::CatalogParse { line: 0, msg };
        if points.len() != count || count == 0 {
            return Err(err(format!(
                "record for {count} points has {} points",
                points.len()
            )));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !p.iter().all(|c| c.is_finite() && (0.0..=1.0).contains(c)))
        {
            return Err(err(format!(
                "point ({}, {}) outside the unit square",
                p[0], p[1]
            )));
        }
        let dmin = unit_min_distance(&points);
        if count > 1 && dmin <= 0.0 {
            return Err(err("points are not distinct".into()));
        }
        if let Some(declared) = declared_min_distance(count) {
            if (dmin - declared).abs() > MIN_DISTANCE_TOL {
                return Err(err(format!(
                    "minimum distance {dmin} differs from the best-known {declared}"
                )));
            }
        }
        self.entries.insert(count, points);
        Ok(())
    }

    pub fn get(&self, count: usize) -> Option<&[[f64; 2]]> {
        self.entries.get(&count).map(Vec::as_slice)
    }

    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Minimum pairwise distance of unit-square points (`INFINITY` for fewer than two).
pub fn unit_min_distance(points: &[[f64; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

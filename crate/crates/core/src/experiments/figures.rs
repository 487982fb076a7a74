use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Deserialize;

use super::config::{
    validate_config, ChannelSpec, EngineChoice, EngineSpec, ExperimentConfig, RxSpec, SignalSpec,
    TxSpec, DEFAULT_UNQUANTIZED_SAMPLES,
};
use super::csvio::format_sig9;
use super::sweep::{run_sweep, PointFailure, ResultRow};
use crate::error::{Error, Result};
use crate::geometry::ArrayKind;
use crate::signal::ConstellationKind;

const REFERENCE_CSV: &str = include_str!("../../data/reference_curves.csv");

pub const LINK_DISTANCE: f64 = 100.0;
pub const WAVELENGTH: f64 = 0.005;
/// Side of the square arrays and length of the ULAs of the SNR sweeps.
pub const ARRAY_SIDE: f64 = 0.5;
/// SNR of the oversampling sweep.
pub const OVERSAMPLING_SNR_DB: f64 = 20.0;

pub const CAPACITY_TOL: f64 = 1e-5;
pub const QUANTIZED_TOL: f64 = 0.02;
/// Curves whose receive packings leave the reference sensitive to antenna placement.
pub const PLACEMENT_SENSITIVE_TOL: f64 = 0.05;
pub const UNQUANTIZED_TOL: f64 = 0.05;
/// Standard errors allowed on top of the fixed Monte-Carlo tolerance.
pub const UNQUANTIZED_SIGMAS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    /// Whether the x axis is `S` (at fixed SNR) rather than SNR.
    pub fn sweeps_s(self) -> bool {
        self == FigureId::Fig6
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureId::Fig3a => "1D Tx (N=2), 1D Rx, 4-QAM",
            FigureId::Fig3b => "1D Tx (N=2), 1D Rx, 16-QAM",
            FigureId::Fig4a => "1D Tx (N=2), packed 2D Rx, 4-QAM",
            FigureId::Fig4b => "1D Tx (N=2), packed 2D Rx, 16-QAM",
            FigureId::Fig5 => "URA Tx (N=4), packed 2D Rx, 4-QAM",
            FigureId::Fig6 => "Rate versus S at 20 dB",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// A stored reference value.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ReferencePoint {
    pub figure: FigureId,
    pub curve: String,
    pub s: f64,
    pub snr_db: f64,
    pub value: f64,
}

pub fn reference_points() -> &'static [ReferencePoint] {
    static POINTS: OnceLock<Vec<ReferencePoint>> = OnceLock::new();
    POINTS.get_or_init(|| {
        csv::Reader::from_reader(REFERENCE_CSV.as_bytes())
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .expect("embedded reference curves parse")
    })
}

pub fn figure_reference(id: FigureId) -> impl Iterator<Item = &'static ReferencePoint> {
    reference_points().iter().filter(move |p| p.figure == id)
}

/// How far a reproduced value may stray from its reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// `max(floor, sigmas · stderr)`.
    Statistical {
        floor: f64,
        sigmas: f64,
    },
}

impl Tolerance {
    pub fn bound(self, stderr: f64) -> f64 {
        match self {
            Tolerance::Absolute(t) => t,
            Tolerance::Statistical { floor, sigmas } => floor.max(sigmas * stderr),
        }
    }
}

/// Tolerance of a reference point, with an optional override for the rate curves.
pub fn tolerance_for(
    figure: FigureId,
    curve: &str,
    s: f64,
    rate_override: Option<f64>,
) -> Tolerance {
    if curve == "capacity" {
        return Tolerance::Absolute(CAPACITY_TOL);
    }
    if curve == "unquantized" {
        return Tolerance::Statistical {
            floor: rate_override.unwrap_or(UNQUANTIZED_TOL),
            sigmas: UNQUANTIZED_SIGMAS,
        };
    }
    if let Some(t) = rate_override {
        return Tolerance::Absolute(t);
    }
    let eight_antennas = matches!(figure, FigureId::Fig4a | FigureId::Fig4b) && s == 4.0;
    let packed_fig6 = figure == FigureId::Fig6 && !curve.starts_with("1dx1d");
    if eight_antennas || packed_fig6 {
        Tolerance::Absolute(PLACEMENT_SENSITIVE_TOL)
    } else {
        Tolerance::Absolute(QUANTIZED_TOL)
    }
}

/// One curve of a figure and the sweep that regenerates it.
#[derive(Clone, Debug)]
pub struct CurveSpec {
    pub curve: String,
    pub config: ExperimentConfig,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureOptions {
    pub seed: u64,
    /// Replaces the rate tolerances (capacity keeps its own).
    pub tolerance: Option<f64>,
    pub unquantized_samples: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: None,
            unquantized_samples: DEFAULT_UNQUANTIZED_SAMPLES,
        }
    }
}

struct Layout {
    tx: TxSpec,
    rx_kind: ArrayKind,
    rx_aperture: f64,
}

fn snr_layout(id: FigureId) -> (Layout, ConstellationKind) {
    let ula2 = TxSpec {
        kind: ArrayKind::Ula,
        aperture: ARRAY_SIDE,
        count: 2,
    };
    let (tx, rx_kind, qam) = match id {
        FigureId::Fig3a => (ula2, ArrayKind::Ula, ConstellationKind::Qam4),
        FigureId::Fig3b => (ula2, ArrayKind::Ula, ConstellationKind::Qam16),
        FigureId::Fig4a => (ula2, ArrayKind::Packed, ConstellationKind::Qam4),
        FigureId::Fig4b => (ula2, ArrayKind::Packed, ConstellationKind::Qam16),
        FigureId::Fig5 => (
            TxSpec {
                kind: ArrayKind::Ura,
                aperture: ARRAY_SIDE,
                count: 4,
            },
            ArrayKind::Packed,
            ConstellationKind::Qam4,
        ),
        FigureId::Fig6 => unreachable!(),
    };
    (
        Layout {
            tx,
            rx_kind,
            rx_aperture: ARRAY_SIDE,
        },
        qam,
    )
}

/// Layout and alphabet of an oversampling curve such as `1dx2d_qam16`.
fn oversampling_layout(curve: &str) -> Result<(Layout, ConstellationKind)> {
    let (dims, qam) = curve
        .split_once('_')
        .ok_or_else(|| Error::Config(format!("malformed curve name `{curve}`")))?;
    let qam: ConstellationKind = qam.parse()?;
    let line = std::f64::consts::FRAC_1_SQRT_2;
    let ula2 = TxSpec {
        kind: ArrayKind::Ula,
        aperture: line,
        count: 2,
    };
    let layout = match dims {
        "1dx1d" => Layout {
            tx: ula2,
            rx_kind: ArrayKind::Ula,
            rx_aperture: line,
        },
        "1dx2d" => Layout {
            tx: ula2,
            rx_kind: ArrayKind::Packed,
            rx_aperture: ARRAY_SIDE,
        },
        "2dx2d" => Layout {
            tx: TxSpec {
                kind: ArrayKind::Ura,
                aperture: ARRAY_SIDE,
                count: 4,
            },
            rx_kind: ArrayKind::Packed,
            rx_aperture: ARRAY_SIDE,
        },
        _ => return Err(Error::Config(format!("unknown array pairing in `{curve}`"))),
    };
    Ok((layout, qam))
}

fn make_config(
    name: String,
    layout: Layout,
    qam: ConstellationKind,
    s: Vec<f64>,
    snr_db: Vec<f64>,
    engine: EngineSpec,
) -> ExperimentConfig {
    ExperimentConfig {
        name,
        tx: layout.tx,
        rx: RxSpec {
            kind: layout.rx_kind,
            aperture: layout.rx_aperture,
            s: Some(s),
            counts: None,
            packing_catalog: None,
        },
        channel: ChannelSpec {
            distance: LINK_DISTANCE,
            wavelength: WAVELENGTH,
        },
        signal: SignalSpec {
            constellation: qam,
            snr_db,
        },
        engine,
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Sweeps regenerating every curve of a figure on the reference grid.
pub fn figure_curves(id: FigureId, opts: &FigureOptions) -> Result<Vec<CurveSpec>> {
    let reference: Vec<_> = figure_reference(id).collect();
    let curves = distinct_names(&reference);
    let mut specs = Vec::new();
    for curve in curves {
        let pts: Vec<_> = reference.iter().filter(|p| p.curve == curve).collect();
        let s = distinct(pts.iter().map(|p| p.s));
        let snr = distinct(pts.iter().map(|p| p.snr_db));
        let (layout, qam) = if id.sweeps_s() {
            oversampling_layout(&curve)?
        } else {
            snr_layout(id)
        };
        let (kind, samples) = match curve.as_str() {
            "capacity" => (EngineChoice::Capacity, None),
            "unquantized" => (EngineChoice::McUnquantized, Some(opts.unquantized_samples)),
            _ => (EngineChoice::Auto, None),
        };
        let engine = EngineSpec {
            kind,
            samples,
            seed: opts.seed,
            exact_max_rx: None,
        };
        let name = format!("{id}_{curve}");
        specs.push(CurveSpec {
            config: make_config(name, layout, qam, s, snr, engine),
            curve,
        });
    }
    Ok(specs)
}

fn distinct_names(points: &[&ReferencePoint]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in points {
        if !out.contains(&p.curve) {
            out.push(p.curve.clone());
        }
    }
    out
}

/// One line of the deviation report.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub figure: FigureId,
    pub curve: String,
    pub s: f64,
    pub snr_db: f64,
    /// `NaN` when the point could not be computed.
    pub ours: f64,
    pub paper: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub within_tol: bool,
}

#[derive(Clone, Debug)]
pub struct FigureRun {
    pub figure: FigureId,
    /// Curve name of each row, parallel to `rows`.
    pub curves: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub deviations: Vec<Deviation>,
    pub failures: Vec<PointFailure>,
}

impl FigureRun {
    pub fn all_within_tolerance(&self) -> bool {
        self.deviations.iter().all(|d| d.within_tol)
    }

    pub fn curve_deviations<'a>(
        &'a self,
        curve: &'a str,
    ) -> impl Iterator<Item = &'a Deviation> + 'a {
        self.deviations.iter().filter(move |d| d.curve == curve)
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Regenerates a figure and compares it with the stored reference.
pub fn reproduce_figure(id: FigureId, opts: &FigureOptions) -> Result<FigureRun> {
    let mut run = FigureRun {
        figure: id,
        curves: Vec::new(),
        rows: Vec::new(),
        deviations: Vec::new(),
        failures: Vec::new(),
    };
    for spec in figure_curves(id, opts)? {
        let out = run_sweep(&validate_config(&spec.config)?);
        run.curves
            .extend(std::iter::repeat_n(spec.curve.clone(), out.rows.len()));
        run.rows.extend(out.rows);
        run.failures.extend(out.failures);
    }
    for p in figure_reference(id) {
        let row = run
            .rows
            .iter()
            .zip(&run.curves)
            .find(|(r, c)| **c == p.curve && same(r.s_factor, p.s) && same(r.snr_db, p.snr_db))
            .map(|(r, _)| r);
        let (ours, stderr) = row.map_or((f64::NAN, 0.0), |r| (r.mi_bpcu, r.stderr));
        let tolerance = tolerance_for(id, &p.curve, p.s, opts.tolerance).bound(stderr);
        let delta = ours - p.value;
        run.deviations.push(Deviation {
            figure: id,
            curve: p.curve.clone(),
            s: p.s,
            snr_db: p.snr_db,
            ours,
            paper: p.value,
            delta,
            tolerance,
            within_tol: delta.abs() <= tolerance,
        });
    }
    Ok(run)
}

pub const DEVIATION_HEADER: [&str; 8] = [
    "figure",
    "curve",
    "s",
    "snr_db",
    "ours",
    "paper",
    "delta",
    "within_tol",
];

pub fn write_deviation_report<W: Write>(deviations: &[Deviation], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(DEVIATION_HEADER)?;
    for d in deviations {
        w.write_record([
            d.figure.to_string(),
            d.curve.clone(),
            format!("{}", d.s),
            format!("{}", d.snr_db),
            format_sig9(d.ours),
            format_sig9(d.paper),
            format_sig9(d.delta),
            d.within_tol.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_deviation_report(deviations: &[Deviation], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_deviation_report(deviations, std::io::BufWriter::new(file))
}

/// Rows of one curve, for plotting.
pub fn curve_series(run: &FigureRun, curve: &str) -> Vec<(f64, f64)> {
    run.rows
        .iter()
        .zip(&run.curves)
        .filter(|(_, c)| *c == curve)
        .map(|(r, _)| {
            (
                if run.figure.sweeps_s() {
                    r.s_factor
                } else {
                    r.snr_db
                },
                r.mi_bpcu,
            )
        })
        .collect()
}

//! Shared fixtures for the engine benchmarks.

use losmimo_core::geometry::{los_channel, packed_positions, ula_positions};
use losmimo_core::signal::{build_constellation, enumerate_inputs};
use losmimo_core::{ChannelMatrix, InputEnsemble, LinkGeometry, PackingCatalog, Result};

/// A two-antenna ULA transmitter facing a receiver of `m_rx` antennas, 100 m
/// away at 5 mm wavelength, with a 0.5 m aperture on both sides.
pub fn ula_link(
    m_rx: usize,
    packed_rx: bool,
    constellation: &str,
) -> Result<(ChannelMatrix, InputEnsemble)> {
    let tx = ula_positions(0.5, 2)?;
    let rx = if packed_rx {
        packed_positions(0.5, m_rx, PackingCatalog::builtin())?
    } else {
        ula_positions(0.5, m_rx)?
    };
    let h = los_channel(&LinkGeometry::new(tx, rx, 100.0, 0.005)?);
    let ensemble = enumerate_inputs(&build_constellation(constellation)?, 2)?;
    Ok((h, ensemble))
}

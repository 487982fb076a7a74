//! Antenna array layouts and the line-of-sight channel they induce.

mod array;
mod channel;
mod packing;

pub use array::{
    min_pairwise_distance, packed_positions, ula_positions, ura_positions, AntennaArray, ArrayKind,
    Position,
};
pub use channel::{los_channel, ChannelMatrix, LinkGeometry};
pub use packing::{declared_min_distance, unit_min_distance, PackingCatalog, MIN_DISTANCE_TOL};

//! Radio environment maps.
//!
//! A map is a raster of average uplink SINR values ([`SinrGrid`]). Ground
//! truth comes from a log-distance path-loss model, one independent
//! correlated shadowing field per base station and full-load co-channel
//! interference. Estimated maps are built from sparse measurements with
//! Gaussian-process regression on path-loss-compensated residuals. Bitrates
//! follow from a [`BitrateTable`] of spectral efficiencies.

mod bitrate;
mod fft;
mod gpr;
mod grid;
mod layout;
mod link;
mod shadowing;

pub use bitrate::{bitrate_at, sinr_to_bitrate, BitrateTable, Channel};
pub use gpr::{estimate_rem_gpr, sample_measurements, ExpKernel, GpRegressor, Measurement};
pub use grid::{GridSpec, RemKind, SinrGrid};
pub use layout::BsLayout;
pub use link::{
    ground_truth_rem, path_loss_db, path_loss_rem, sinr_db_from_powers, Interference, LinkBudget, PathLoss,
};
pub use shadowing::{generate_shadowing, ShadowingSampler, MAX_EMBEDDING_CELLS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("grid of {cells} cells exceeds the shadowing generator limit")]
    ResourceLimit { cells: usize },
    #[error("position ({x}, {y}) is outside the map")]
    OutOfBounds { x: f64, y: f64 },
    #[error("two measurements share the position ({x}, {y})")]
    DuplicateMeasurement { x: f64, y: f64 },
    #[error("kernel matrix is not positive definite")]
    SingularKernel,
    #[error("invalid bitrate table: {0}")]
    InvalidTable(&'static str),
}

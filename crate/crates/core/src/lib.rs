//! Simulation and scheduling core for mobility-aware federated learning over
//! radio environment maps.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs and seeds; file formats, configuration and the
//! command-line runner live in the `vremfl` crate.
//!
//! Layout:
//! - [`rem`]: path loss, correlated shadowing, ground-truth SINR maps,
//!   Gaussian-process map estimation and the SINR-to-bitrate table.
//! - [`mobility`]: synthetic Manhattan-grid trajectories, trace
//!   interpolation and look-ahead windows.
//! - [`fl`]: the least-squares learning task, local gradient descent,
//!   aggregation and the convergence proxies.
//! - [`scheduler`]: step optimization, local customization, priority
//!   scheduling and the benchmark policies.
//! - [`sim`]: the slotted round engine and experiment metrics.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod fl;
pub mod geom;
pub(crate) mod math;
pub mod mobility;
pub mod rem;
pub mod rng;
pub mod scheduler;
pub mod sim;

pub use geom::{Bounds, Point};

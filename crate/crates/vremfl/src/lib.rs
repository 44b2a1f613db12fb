//! Configuration, file formats and the command-line runner around
//! [`vremfl_core`].
//!
//! - [`config`]: the TOML experiment file and its validation.
//! - [`formats`]: rasters, traces, datasets, bid logs and metrics.
//! - [`runner`]: environment assembly and (parallel) experiment execution.
//! - [`cli`]: the `vremfl` command.

pub mod cli;
pub mod config;
pub mod formats;
pub mod runner;

pub use config::Config;

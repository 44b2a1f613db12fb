//! Link budget, path loss and ground-truth SINR maps.

use alloc::vec::Vec;

use super::{BsLayout, GridSpec, RemError, RemKind, ShadowingSampler, SinrGrid};
use crate::geom::Point;
use crate::math;
use crate::rng::{stream_rng, Stream};

/// Uplink link budget shared by every vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub carrier_freq_hz: f64,
    /// Per-client bandwidth.
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub bs_height_m: f64,
    pub vehicle_height_m: f64,
    pub shadowing_std_db: f64,
    pub decorrelation_m: f64,
}

impl Default for LinkBudget {
    /// 3.5 GHz carrier, ten 360 kHz resource blocks, 23 dBm vehicles,
    /// 6 dB noise figure, 25 m / 1.5 m antennas, 6 dB shadowing over 25 m.
    fn default() -> Self {
        Self {
            carrier_freq_hz: 3.5e9,
            bandwidth_hz: 3.6e6,
            tx_power_dbm: 23.0,
            noise_figure_db: 6.0,
            bs_height_m: 25.0,
            vehicle_height_m: 1.5,
            shadowing_std_db: 6.0,
            decorrelation_m: 25.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), RemError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.carrier_freq_hz) {
            return Err(RemError::InvalidParameter("carrier_freq_hz must be positive"));
        }
        if !positive(self.bandwidth_hz) {
            return Err(RemError::InvalidParameter("bandwidth_hz must be positive"));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_figure_db.is_finite() {
            return Err(RemError::InvalidParameter("tx power and noise figure must be finite"));
        }
        if !positive(self.bs_height_m) || !positive(self.vehicle_height_m) {
            return Err(RemError::InvalidParameter("antenna heights must be positive"));
        }
        if !(self.shadowing_std_db >= 0.0) || !self.shadowing_std_db.is_finite() {
            return Err(RemError::InvalidParameter("shadowing_std_db must be non-negative"));
        }
        if !positive(self.decorrelation_m) {
            return Err(RemError::InvalidParameter("decorrelation_m must be positive"));
        }
        Ok(())
    }

    /// Thermal noise over the client bandwidth plus the noise figure, in dBm.
    pub fn noise_power_dbm(&self) -> f64 {
        -174.0 + math::lin_to_db(self.bandwidth_hz) + self.noise_figure_db
    }

    pub fn path_loss(&self) -> PathLoss {
        PathLoss::urban_microcell(self.carrier_freq_hz)
    }

    /// 3-D distance between a BS at `bs` and a vehicle at `p`.
    pub fn distance_3d(&self, bs: &Point, p: &Point) -> f64 {
        math::hypot(bs.distance(p), self.bs_height_m - self.vehicle_height_m)
    }
}

/// Log-distance path loss `A + 10 n log10(d)`, `d` in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub intercept_db: f64,
    pub exponent: f64,
}

impl PathLoss {
    /// Urban-microcell constants: `A = 32.4 + 20 log10(f_GHz)`, `n = 2.1`.
    pub fn urban_microcell(carrier_freq_hz: f64) -> Self {
        Self { intercept_db: 32.4 + 20.0 * math::log10(carrier_freq_hz / 1e9), exponent: 2.1 }
    }

    /// Distances below 1 m are clamped to 1 m.
    pub fn loss_db(&self, distance_3d: f64) -> f64 {
        let d = if distance_3d > 1.0 { distance_3d } else { 1.0 };
        self.intercept_db + 10.0 * self.exponent * math::log10(d)
    }
}

/// Path loss for the budget's carrier; see [`PathLoss::loss_db`].
pub fn path_loss_db(distance_3d: f64, budget: &LinkBudget) -> f64 {
    budget.path_loss().loss_db(distance_3d)
}

/// Co-channel interference model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interference {
    /// Every non-serving BS contributes its received power.
    #[default]
    FullLoad,
    /// Noise only.
    Disabled,
}

/// SINR (dB) for a serving signal and a set of interfering powers, all dBm.
pub fn sinr_db_from_powers(signal_dbm: f64, noise_dbm: f64, interferers_dbm: impl IntoIterator<Item = f64>) -> f64 {
    let denom_mw = interferers_dbm.into_iter().fold(math::db_to_lin(noise_dbm), |acc, i| acc + math::db_to_lin(i));
    signal_dbm - math::lin_to_db(denom_mw)
}

fn sinr_map(
    layout: &BsLayout,
    budget: &LinkBudget,
    grid: &GridSpec,
    interference: Interference,
    shadowing: Option<&[Vec<f64>]>,
    kind: RemKind,
) -> Result<SinrGrid, RemError> {
    let pl = budget.path_loss();
    let noise = budget.noise_power_dbm();
    let mut rx = alloc::vec![0.0; layout.len()];
    let mut values = Vec::with_capacity(grid.n_cells());
    for (cell, p) in grid.centers().enumerate() {
        for (b, bs) in layout.positions().iter().enumerate() {
            let shadow = shadowing.map_or(0.0, |f| f[b][cell]);
            rx[b] = budget.tx_power_dbm - pl.loss_db(budget.distance_3d(bs, &p)) - shadow;
        }
        let serving = layout.nearest(&p);
        let others = rx
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != serving && interference == Interference::FullLoad)
            .map(|(_, &v)| v);
        values.push(sinr_db_from_powers(rx[serving], noise, others));
    }
    SinrGrid::new(*grid, kind, values)
}

/// Ground-truth map: nearest-BS association, an independent shadowing
/// field per BS (seeded from `seed` and the BS index), noise plus the
/// configured interference.
pub fn ground_truth_rem(
    layout: &BsLayout,
    budget: &LinkBudget,
    grid: &GridSpec,
    seed: u64,
    interference: Interference,
) -> Result<SinrGrid, RemError> {
    budget.validate()?;
    layout.validate(grid)?;
    let sampler = ShadowingSampler::new(grid, budget.shadowing_std_db, budget.decorrelation_m)?;
    let fields: Vec<Vec<f64>> =
        (0..layout.len()).map(|b| sampler.sample(&mut stream_rng(seed, Stream::Shadowing, b as u64))).collect();
    sinr_map(layout, budget, grid, interference, Some(&fields), RemKind::GroundTruth)
}

/// Deterministic part of the map (no shadowing); the prior mean used when
/// estimating maps from measurements.
pub fn path_loss_rem(
    layout: &BsLayout,
    budget: &LinkBudget,
    grid: &GridSpec,
    interference: Interference,
) -> Result<SinrGrid, RemError> {
    budget.validate()?;
    layout.validate(grid)?;
    sinr_map(layout, budget, grid, interference, None, RemKind::Estimated)
}

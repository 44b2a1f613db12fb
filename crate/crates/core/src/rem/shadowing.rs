//! Correlated log-normal shadowing.
//!
//! Fields are zero-mean Gaussian with covariance `std^2 exp(-d / d_c)` at
//! every pair of cell centers. Samples come from circulant embedding: the
//! grid is embedded in a power-of-two torus large enough for the embedded
//! covariance to be non-negative definite, so the sampled field has the
//! exact target covariance on the grid.

use alloc::vec::Vec;
use nalgebra::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::fft::fft2;
use super::{GridSpec, RemError};
use crate::math;
use crate::rng::{stream_rng, Stream};

/// Largest torus (in cells) the generator will allocate.
pub const MAX_EMBEDDING_CELLS: usize = 1 << 22;

/// Reusable sampler for one grid and one covariance.
#[derive(Debug, Clone)]
pub struct ShadowingSampler {
    width: usize,
    height: usize,
    rows: usize,
    cols: usize,
    /// `sqrt(eigenvalue / (rows * cols))` per torus frequency.
    scale: Vec<f64>,
}

impl ShadowingSampler {
    pub fn new(grid: &GridSpec, std_db: f64, decorrelation_m: f64) -> Result<Self, RemError> {
        if !(std_db >= 0.0) || !std_db.is_finite() {
            return Err(RemError::InvalidParameter("shadowing std must be non-negative"));
        }
        if !(decorrelation_m > 0.0) || !decorrelation_m.is_finite() {
            return Err(RemError::InvalidParameter("decorrelation distance must be positive"));
        }
        let mut cols = (2 * grid.width).next_power_of_two();
        let mut rows = (2 * grid.height).next_power_of_two();
        let var = std_db * std_db;
        loop {
            if rows * cols > MAX_EMBEDDING_CELLS {
                return Err(RemError::ResourceLimit { cells: grid.n_cells() });
            }
            let mut buf = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let dy = r.min(rows - r) as f64 * grid.cell_size;
                for c in 0..cols {
                    let dx = c.min(cols - c) as f64 * grid.cell_size;
                    let cov = var * math::exp(-math::hypot(dx, dy) / decorrelation_m);
                    buf.push(Complex::new(cov, 0.0));
                }
            }
            fft2(&mut buf, rows, cols);
            let max = buf.iter().fold(0.0_f64, |m, v| m.max(v.re));
            let min = buf.iter().fold(f64::INFINITY, |m, v| m.min(v.re));
            if min >= -1e-9 * max.max(f64::MIN_POSITIVE) {
                let norm = (rows * cols) as f64;
                let scale = buf.iter().map(|v| math::sqrt(v.re.max(0.0) / norm)).collect();
                return Ok(Self { width: grid.width, height: grid.height, rows, cols, scale });
            }
            // Not non-negative definite yet: enlarge the torus.
            rows *= 2;
            cols *= 2;
        }
    }

    /// One field realization, row-major over the grid.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(s * re, s * im)
            })
            .collect();
        fft2(&mut buf, self.rows, self.cols);
        let mut out = Vec::with_capacity(self.width * self.height);
        for r in 0..self.height {
            out.extend(buf[r * self.cols..r * self.cols + self.width].iter().map(|v| v.re));
        }
        out
    }

    pub fn embedding_size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// One shadowing field (dB) over `grid`, deterministic for a fixed seed.
pub fn generate_shadowing(grid: &GridSpec, std_db: f64, decorrelation_m: f64, seed: u64) -> Result<Vec<f64>, RemError> {
    let sampler = ShadowingSampler::new(grid, std_db, decorrelation_m)?;
    Ok(sampler.sample(&mut stream_rng(seed, Stream::Shadowing, 0)))
}

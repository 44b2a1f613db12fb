//! Map estimation from sparse measurements.
//!
//! Each measurement is turned into a residual against the path-loss-only
//! prior map, one zero-mean GP with an exponential kernel is fitted per BS
//! service area, and the posterior mean residual is added back to the prior.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::seq::index;

use super::{BsLayout, RemError, RemKind, SinrGrid};
use crate::geom::Point;
use crate::math;
use crate::rng::{stream_rng, Stream};

/// A SINR sample taken at a known position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub position: Point,
    pub sinr: f64,
}

/// `variance * exp(-d / length)`, plus `nugget` on the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpKernel {
    pub variance: f64,
    pub length: f64,
    pub nugget: f64,
}

impl ExpKernel {
    pub fn new(std: f64, length: f64) -> Self {
        Self { variance: std * std, length, nugget: 0.0 }
    }

    pub fn eval(&self, d: f64) -> f64 {
        self.variance * math::exp(-d / self.length)
    }

    fn validate(&self) -> Result<(), RemError> {
        if !(self.variance > 0.0) || !(self.length > 0.0) || !(self.nugget >= 0.0) {
            return Err(RemError::InvalidParameter("kernel needs variance > 0, length > 0, nugget >= 0"));
        }
        Ok(())
    }
}

/// Zero-mean GP conditioned on exact (or nugget-noisy) observations.
#[derive(Debug, Clone)]
pub struct GpRegressor {
    points: Vec<Point>,
    weights: DVector<f64>,
    kernel: ExpKernel,
}

impl GpRegressor {
    pub fn fit(points: &[Point], values: &[f64], kernel: ExpKernel) -> Result<Self, RemError> {
        kernel.validate()?;
        if points.len() != values.len() {
            return Err(RemError::InvalidParameter("points and values differ in length"));
        }
        check_distinct(points)?;
        let n = points.len();
        let k = DMatrix::from_fn(n, n, |i, j| {
            let v = kernel.eval(points[i].distance(&points[j]));
            if i == j {
                v + kernel.nugget
            } else {
                v
            }
        });
        let chol = k.cholesky().ok_or(RemError::SingularKernel)?;
        let weights = chol.solve(&DVector::from_column_slice(values));
        Ok(Self { points: points.to_vec(), weights, kernel })
    }

    /// Posterior mean at `p`.
    pub fn predict(&self, p: &Point) -> f64 {
        self.points.iter().zip(self.weights.iter()).map(|(x, w)| self.kernel.eval(x.distance(p)) * w).sum()
    }
}

fn check_distinct(points: &[Point]) -> Result<(), RemError> {
    let mut sorted: Vec<Point> = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(RemError::DuplicateMeasurement { x: w[0].x, y: w[0].y });
        }
    }
    Ok(())
}

/// Posterior-mean map given `prior` (path-loss-only SINR) and measurements.
/// BS areas with no measurement keep the prior.
pub fn estimate_rem_gpr(
    prior: &SinrGrid,
    layout: &BsLayout,
    measurements: &[Measurement],
    kernel: ExpKernel,
) -> Result<SinrGrid, RemError> {
    kernel.validate()?;
    let points: Vec<Point> = measurements.iter().map(|m| m.position).collect();
    check_distinct(&points)?;
    let spec = *prior.spec();
    let mut values = prior.values().to_vec();
    for b in 0..layout.len() {
        let mut pts = Vec::new();
        let mut res = Vec::new();
        for m in measurements.iter().filter(|m| layout.nearest(&m.position) == b) {
            pts.push(m.position);
            res.push(m.sinr - prior.sinr_at(&m.position)?);
        }
        if pts.is_empty() {
            continue;
        }
        let gp = GpRegressor::fit(&pts, &res, kernel)?;
        for (cell, p) in spec.centers().enumerate() {
            if layout.nearest(&p) == b {
                values[cell] += gp.predict(&p);
            }
        }
    }
    SinrGrid::new(spec, RemKind::Estimated, values)
}

/// Sector (of `sectors` equal angular sectors, the first starting at angle
/// zero) in which `p` lies as seen from `bs`.
fn sector_of(bs: &Point, p: &Point, sectors: usize) -> usize {
    let tau = 2.0 * core::f64::consts::PI;
    let mut ang = math::atan2(p.y - bs.y, p.x - bs.x);
    if ang < 0.0 {
        ang += tau;
    }
    ((ang / tau * sectors as f64) as usize).min(sectors - 1)
}

/// Up to `per_sector` distinct cell-center measurements of `truth`, drawn
/// uniformly inside each sector of each BS service area.
pub fn sample_measurements(
    truth: &SinrGrid,
    layout: &BsLayout,
    per_sector: usize,
    sectors: usize,
    seed: u64,
) -> Vec<Measurement> {
    let spec = truth.spec();
    let sectors = sectors.max(1);
    let mut buckets: Vec<Vec<usize>> = alloc::vec![Vec::new(); layout.len() * sectors];
    for (cell, p) in spec.centers().enumerate() {
        let b = layout.nearest(&p);
        let s = sector_of(&layout.positions()[b], &p, sectors);
        buckets[b * sectors + s].push(cell);
    }
    let mut out = Vec::new();
    for (i, cells) in buckets.iter().enumerate() {
        let take = per_sector.min(cells.len());
        if take == 0 {
            continue;
        }
        let mut rng = stream_rng(seed, Stream::Measurements, i as u64);
        let mut picked: Vec<usize> = index::sample(&mut rng, cells.len(), take).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|k| {
            let cell = cells[k];
            Measurement { position: spec.center_of(cell), sinr: truth.values()[cell] }
        }));
    }
    out
}

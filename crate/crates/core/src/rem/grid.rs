use alloc::vec::Vec;

use super::RemError;
use crate::geom::{Bounds, Point};
use crate::math;

/// Regular raster over the map, `width` cells along x and `height` along y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Point,
    pub cell_size: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(origin: Point, cell_size: f64, width: usize, height: usize) -> Result<Self, RemError> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(RemError::InvalidParameter("cell_size must be positive"));
        }
        if width == 0 || height == 0 {
            return Err(RemError::InvalidParameter("grid must have at least one cell"));
        }
        if !origin.x.is_finite() || !origin.y.is_finite() {
            return Err(RemError::InvalidParameter("grid origin must be finite"));
        }
        Ok(Self { origin, cell_size, width, height })
    }

    pub fn n_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(
            self.origin,
            Point::new(
                self.origin.x + self.width as f64 * self.cell_size,
                self.origin.y + self.height as f64 * self.cell_size,
            ),
        )
    }

    /// Row-major index of cell `(ix, iy)`.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.origin.x + (ix as f64 + 0.5) * self.cell_size,
            self.origin.y + (iy as f64 + 0.5) * self.cell_size,
        )
    }

    /// Center of the cell with row-major index `idx`.
    pub fn center_of(&self, idx: usize) -> Point {
        self.cell_center(idx % self.width, idx / self.width)
    }

    fn axis_index(coord: f64, origin: f64, cell: f64, n: usize) -> Option<usize> {
        let rel = (coord - origin) / cell;
        if !(rel >= 0.0) || rel > n as f64 {
            return None;
        }
        // The far edge belongs to the last cell.
        Some((math::floor(rel) as usize).min(n - 1))
    }

    /// Row-major index of the cell containing `p`; edges are inclusive.
    pub fn cell_index(&self, p: &Point) -> Option<usize> {
        let ix = Self::axis_index(p.x, self.origin.x, self.cell_size, self.width)?;
        let iy = Self::axis_index(p.y, self.origin.y, self.cell_size, self.height)?;
        Some(self.index(ix, iy))
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.n_cells()).map(move |i| self.center_of(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemKind {
    GroundTruth,
    Estimated,
}

/// Location-to-SINR map: one average SINR value (dB) per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrGrid {
    spec: GridSpec,
    kind: RemKind,
    sinr: Vec<f64>,
}

impl SinrGrid {
    pub fn new(spec: GridSpec, kind: RemKind, sinr: Vec<f64>) -> Result<Self, RemError> {
        if sinr.len() != spec.n_cells() {
            return Err(RemError::InvalidParameter("SINR values do not match the grid size"));
        }
        if sinr.iter().any(|v| !v.is_finite()) {
            return Err(RemError::InvalidParameter("SINR values must be finite"));
        }
        Ok(Self { spec, kind, sinr })
    }

    /// Grid with the same SINR in every cell.
    pub fn uniform(spec: GridSpec, kind: RemKind, sinr_db: f64) -> Result<Self, RemError> {
        Self::new(spec, kind, alloc::vec![sinr_db; spec.n_cells()])
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> RemKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.sinr
    }

    pub fn cell(&self, ix: usize, iy: usize) -> f64 {
        self.sinr[self.spec.index(ix, iy)]
    }

    pub fn sinr_at(&self, p: &Point) -> Result<f64, RemError> {
        self.spec.cell_index(p).map(|i| self.sinr[i]).ok_or(RemError::OutOfBounds { x: p.x, y: p.y })
    }

    pub fn with_kind(mut self, kind: RemKind) -> Self {
        self.kind = kind;
        self
    }
}

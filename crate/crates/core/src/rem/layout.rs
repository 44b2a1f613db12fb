use alloc::vec::Vec;

use super::{GridSpec, RemError};
use crate::geom::{Bounds, Point};
use crate::math;

/// Base-station sites.
#[derive(Debug, Clone, PartialEq)]
pub struct BsLayout {
    positions: Vec<Point>,
    inter_site_distance: f64,
}

impl BsLayout {
    pub fn new(positions: Vec<Point>, inter_site_distance: f64) -> Result<Self, RemError> {
        if positions.is_empty() {
            return Err(RemError::InvalidParameter("layout needs at least one BS"));
        }
        if !(inter_site_distance > 0.0) || !inter_site_distance.is_finite() {
            return Err(RemError::InvalidParameter("inter_site_distance must be positive"));
        }
        for (i, a) in positions.iter().enumerate() {
            if !a.x.is_finite() || !a.y.is_finite() {
                return Err(RemError::InvalidParameter("BS positions must be finite"));
            }
            if positions[..i].iter().any(|b| b == a) {
                return Err(RemError::InvalidParameter("BS positions must be pairwise distinct"));
            }
        }
        Ok(Self { positions, inter_site_distance })
    }

    /// Hexagonal lattice with one site at the center of `bounds`.
    pub fn hexagonal(bounds: Bounds, isd: f64) -> Result<Self, RemError> {
        Self::hexagonal_at(bounds, isd, bounds.center())
    }

    /// Hexagonal lattice through `anchor`, keeping every site within one
    /// inter-site distance of `bounds`. Rows are `isd·√3/2` apart and odd
    /// rows are shifted by `isd/2`.
    pub fn hexagonal_at(bounds: Bounds, isd: f64, anchor: Point) -> Result<Self, RemError> {
        if !(isd > 0.0) || !isd.is_finite() || !bounds.is_valid() {
            return Err(RemError::InvalidParameter("hexagonal layout needs a positive isd"));
        }
        if !anchor.x.is_finite() || !anchor.y.is_finite() {
            return Err(RemError::InvalidParameter("lattice anchor must be finite"));
        }
        let row_step = isd * math::sqrt(3.0) / 2.0;
        let (lo, hi) =
            (Point::new(bounds.min.x - isd, bounds.min.y - isd), Point::new(bounds.max.x + isd, bounds.max.y + isd));
        let r0 = math::ceil((lo.y - anchor.y) / row_step) as i64;
        let r1 = math::floor((hi.y - anchor.y) / row_step) as i64;
        let mut sites = Vec::new();
        for r in r0..=r1 {
            let y = anchor.y + r as f64 * row_step;
            let x0 = anchor.x + if r.rem_euclid(2) == 1 { isd / 2.0 } else { 0.0 };
            let q0 = math::ceil((lo.x - x0) / isd) as i64;
            let q1 = math::floor((hi.x - x0) / isd) as i64;
            for q in q0..=q1 {
                sites.push(Point::new(x0 + q as f64 * isd, y));
            }
        }
        Self::new(sites, isd)
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn inter_site_distance(&self) -> f64 {
        self.inter_site_distance
    }

    /// Index of the closest site; ties go to the lower index.
    pub fn nearest(&self, p: &Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, bs) in self.positions.iter().enumerate() {
            let d = bs.distance(p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Every cell center must lie within one inter-site distance of a site.
    pub fn validate(&self, grid: &GridSpec) -> Result<(), RemError> {
        let uncovered = grid.centers().any(|p| {
            let b = self.nearest(&p);
            self.positions[b].distance(&p) > self.inter_site_distance
        });
        if uncovered {
            return Err(RemError::InvalidParameter("BS layout does not cover the grid"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hexagonal_cluster_over_600m_square() {
        let b = Bounds::new(Point::new(0.0, 0.0), Point::new(600.0, 600.0));
        let layout = BsLayout::hexagonal(b, 600.0).unwrap();
        // rows at y = 300 (3 sites) and 300 ± 519.6 (4 sites each)
        assert_eq!(layout.len(), 11);
        assert!(layout.positions().contains(&Point::new(300.0, 300.0)));
        assert!(layout.positions().contains(&Point::new(-300.0, 300.0)));
        let g = GridSpec::new(Point::new(0.0, 0.0), 10.0, 60, 60).unwrap();
        layout.validate(&g).unwrap();
    }

    #[test]
    fn lattice_spacing_is_the_isd() {
        let b = Bounds::new(Point::new(0.0, 0.0), Point::new(600.0, 600.0));
        let l = BsLayout::hexagonal_at(b, 600.0, Point::new(17.0, -40.0)).unwrap();
        for (i, a) in l.positions().iter().enumerate() {
            let nn = l
                .positions()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.distance(a))
                .fold(f64::INFINITY, f64::min);
            assert!((nn - 600.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_duplicates_and_gaps() {
        let p = Point::new(1.0, 1.0);
        assert!(BsLayout::new(alloc::vec![p, p], 10.0).is_err());
        let far = BsLayout::new(alloc::vec![Point::new(0.0, 0.0)], 50.0).unwrap();
        let g = GridSpec::new(Point::new(0.0, 0.0), 10.0, 20, 20).unwrap();
        assert!(far.validate(&g).is_err());
    }

    #[test]
    fn nearest_breaks_ties_low() {
        let l = BsLayout::new(alloc::vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0)], 10.0).unwrap();
        assert_eq!(l.nearest(&Point::new(5.0, 3.0)), 0);
        assert_eq!(l.nearest(&Point::new(5.1, 3.0)), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn any_anchor_keeps_every_cell_near_a_site(ax in -2000.0f64..2000.0, ay in -2000.0f64..2000.0) {
                let g = GridSpec::new(Point::new(0.0, 0.0), 10.0, 60, 60).unwrap();
                let l = BsLayout::hexagonal_at(g.bounds(), 600.0, Point::new(ax, ay)).unwrap();
                // covering radius of the lattice is isd/√3
                let r = 600.0 / libm::sqrt(3.0) + 1e-6;
                for p in g.centers() {
                    prop_assert!(l.positions()[l.nearest(&p)].distance(&p) <= r);
                }
            }
        }
    }
}

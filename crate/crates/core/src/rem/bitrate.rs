//! SINR to bitrate conversion.

use alloc::vec::Vec;

use super::{RemError, SinrGrid};
use crate::geom::Point;
use crate::math;

/// Piecewise-linear spectral efficiency (bit/s/Hz) as a function of SINR
/// (dB). Zero below the first breakpoint, flat above the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct BitrateTable {
    breakpoints: Vec<(f64, f64)>,
}

impl BitrateTable {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self, RemError> {
        if breakpoints.is_empty() {
            return Err(RemError::InvalidTable("no breakpoints"));
        }
        if breakpoints.iter().any(|(s, e)| !s.is_finite() || !e.is_finite() || *e < 0.0) {
            return Err(RemError::InvalidTable("entries must be finite and efficiencies non-negative"));
        }
        for w in breakpoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(RemError::InvalidTable("SINR breakpoints must be strictly increasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(RemError::InvalidTable("spectral efficiency must be non-decreasing"));
            }
        }
        Ok(Self { breakpoints })
    }

    /// `factor * log2(1 + SINR)` capped at `cap`, sampled every `step_db`
    /// from `floor_db` up to the first breakpoint that reaches the cap.
    pub fn truncated_shannon(floor_db: f64, factor: f64, cap: f64, step_db: f64) -> Result<Self, RemError> {
        if !(step_db > 0.0) || !(factor > 0.0) || !(cap > 0.0) || !floor_db.is_finite() {
            return Err(RemError::InvalidTable("bad truncated Shannon parameters"));
        }
        let mut bp = Vec::new();
        for i in 0.. {
            let s = floor_db + i as f64 * step_db;
            let e = factor * math::log2(1.0 + math::db_to_lin(s));
            if e >= cap {
                bp.push((s, cap));
                break;
            }
            bp.push((s, e));
        }
        Self::new(bp)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Spectral efficiency in bit/s/Hz.
    pub fn efficiency(&self, sinr_db: f64) -> f64 {
        let bp = &self.breakpoints;
        if !(sinr_db >= bp[0].0) {
            return 0.0;
        }
        let last = bp[bp.len() - 1];
        if sinr_db >= last.0 {
            return last.1;
        }
        // first breakpoint strictly above sinr_db; exists and is > 0
        let hi = bp.partition_point(|(s, _)| *s <= sinr_db);
        let (s0, e0) = bp[hi - 1];
        let (s1, e1) = bp[hi];
        e0 + (e1 - e0) * (sinr_db - s0) / (s1 - s0)
    }
}

impl Default for BitrateTable {
    /// 0.75 log2(1 + SINR), zero below -5 dB, capped at 7.4 bit/s/Hz, with
    /// breakpoints every 0.1 dB.
    fn default() -> Self {
        let mut bp = Vec::new();
        for i in 0.. {
            let s = (i as f64 - 50.0) / 10.0;
            let e = 0.75 * math::log2(1.0 + math::db_to_lin(s));
            if e >= 7.4 {
                bp.push((s, 7.4));
                break;
            }
            bp.push((s, e));
        }
        Self::new(bp).expect("default table is valid")
    }
}

/// Bitrate in bit/s for bandwidth `bandwidth_hz`.
pub fn sinr_to_bitrate(sinr_db: f64, bandwidth_hz: f64, table: &BitrateTable) -> f64 {
    bandwidth_hz * table.efficiency(sinr_db)
}

/// Bitrate at `position` according to `rem`.
pub fn bitrate_at(rem: &SinrGrid, position: &Point, bandwidth_hz: f64, table: &BitrateTable) -> Result<f64, RemError> {
    Ok(sinr_to_bitrate(rem.sinr_at(position)?, bandwidth_hz, table))
}

/// Table, bandwidth and the global rescale factor applied after the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub table: BitrateTable,
    pub bandwidth_hz: f64,
    pub rescale: f64,
}

impl Channel {
    pub fn bitrate(&self, sinr_db: f64) -> f64 {
        self.rescale * sinr_to_bitrate(sinr_db, self.bandwidth_hz, &self.table)
    }

    /// Rescaled bitrate at `p`; zero outside the map.
    pub fn bitrate_at(&self, rem: &SinrGrid, p: &Point) -> f64 {
        rem.sinr_at(p).map_or(0.0, |s| self.bitrate(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rem::{GridSpec, RemKind};

    #[test]
    fn default_table_reference_points() {
        let t = BitrateTable::default();
        assert_eq!(sinr_to_bitrate(-5.01, 3.6e6, &t), 0.0);
        assert_eq!(sinr_to_bitrate(-40.0, 3.6e6, &t), 0.0);
        // 0 dB is a breakpoint: 3.6e6 * 0.75 * log2(2)
        assert!((sinr_to_bitrate(0.0, 3.6e6, &t) - 2.7e6).abs() < 1e-6);
        assert_eq!(t.efficiency(80.0), 7.4);
        let between = t.efficiency(10.05);
        assert!(between > t.efficiency(10.0) && between < t.efficiency(10.1));
    }

    #[test]
    fn matches_truncated_shannon_builder() {
        let a = BitrateTable::default();
        let b = BitrateTable::truncated_shannon(-5.0, 0.75, 7.4, 0.1).unwrap();
        assert_eq!(a.breakpoints().len(), b.breakpoints().len());
        for (x, y) in a.breakpoints().iter().zip(b.breakpoints()) {
            assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_invalid_tables() {
        assert!(BitrateTable::new(alloc::vec![]).is_err());
        assert!(BitrateTable::new(alloc::vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(BitrateTable::new(alloc::vec![(0.0, 2.0), (1.0, 1.0)]).is_err());
        assert!(BitrateTable::new(alloc::vec![(0.0, -1.0)]).is_err());
    }

    #[test]
    fn bitrate_at_uses_the_cell_value() {
        let g = GridSpec::new(Point::new(0.0, 0.0), 10.0, 5, 5).unwrap();
        let vals: Vec<f64> = (0..25).map(|i| i as f64 - 5.0).collect();
        let rem = SinrGrid::new(g, RemKind::GroundTruth, vals).unwrap();
        let t = BitrateTable::default();
        let c = g.cell_center(3, 2);
        assert_eq!(bitrate_at(&rem, &c, 3.6e6, &t).unwrap(), sinr_to_bitrate(8.0, 3.6e6, &t));
        assert!(bitrate_at(&rem, &Point::new(60.0, 0.0), 3.6e6, &t).is_err());

        let flat = SinrGrid::uniform(g, RemKind::Estimated, 12.0).unwrap();
        let first = bitrate_at(&flat, &Point::new(0.0, 0.0), 3.6e6, &t).unwrap();
        for p in g.centers() {
            assert_eq!(bitrate_at(&flat, &p, 3.6e6, &t).unwrap(), first);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bitrate_is_monotone_and_non_negative(a in -60.0f64..60.0, b in -60.0f64..60.0) {
                let t = BitrateTable::default();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let rl = sinr_to_bitrate(lo, 3.6e6, &t);
                let rh = sinr_to_bitrate(hi, 3.6e6, &t);
                prop_assert!(rl >= 0.0);
                prop_assert!(rl <= rh);
            }
        }
    }
}

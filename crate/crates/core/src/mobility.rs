//! Vehicle trajectories at slot resolution.
//!
//! Synthetic trajectories follow a Manhattan street grid with random turns
//! at intersections and a uniform speed per leg. Recorded traces are
//! linearly interpolated onto the slot clock.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand::Rng;
use thiserror::Error;

use crate::geom::{Bounds, Point};
use crate::math;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MobilityError {
    #[error("invalid mobility config: {0}")]
    InvalidConfig(&'static str),
}

/// Positions of one vehicle, one per slot starting at `start_slot`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub vehicle_id: u32,
    pub start_slot: u64,
    positions: Vec<Point>,
}

impl Trajectory {
    pub fn new(vehicle_id: u32, start_slot: u64, positions: Vec<Point>) -> Self {
        Self { vehicle_id, start_slot, positions }
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

    /// First slot after the trajectory.
    pub fn end_slot(&self) -> u64 {
        self.start_slot + self.positions.len() as u64
    }

    pub fn position_at(&self, slot: u64) -> Option<Point> {
        let rel = slot.checked_sub(self.start_slot)?;
        self.positions.get(rel as usize).copied()
    }

    /// True when every slot in `start..start + len` has a position.
    pub fn covers(&self, start: u64, len: u64) -> bool {
        start >= self.start_slot && start + len <= self.end_slot()
    }

    /// Largest per-slot displacement.
    pub fn max_step(&self) -> f64 {
        self.positions.windows(2).map(|w| w[0].distance(&w[1])).fold(0.0, f64::max)
    }
}

/// Positions for slots `t..=t + d`. The window is cut short (never padded)
/// at the end of the trajectory; it is empty when `t` is outside it.
pub fn planned_window(trajectory: &Trajectory, t: u64, d: u64) -> &[Point] {
    let Some(rel) = t.checked_sub(trajectory.start_slot) else {
        return &[];
    };
    let pos = trajectory.positions();
    let rel = rel as usize;
    if rel >= pos.len() {
        return &[];
    }
    let end = (rel as u64 + d + 1).min(pos.len() as u64) as usize;
    &pos[rel..end]
}

/// Synthetic Manhattan-grid mobility.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub bounds: Bounds,
    pub block_m: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub n_vehicles: usize,
    pub seed: u64,
    pub horizon_slots: u64,
    pub slot_s: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            bounds: Bounds::new(Point::new(0.0, 0.0), Point::new(600.0, 600.0)),
            block_m: 100.0,
            speed_min: 8.0,
            speed_max: 14.0,
            n_vehicles: 1000,
            seed: 0,
            horizon_slots: 3600,
            slot_s: 1.0,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<(), MobilityError> {
        if !self.bounds.is_valid() {
            return Err(MobilityError::InvalidConfig("bounds must have positive extent"));
        }
        if !(self.block_m > 0.0) || !self.block_m.is_finite() {
            return Err(MobilityError::InvalidConfig("block_m must be positive"));
        }
        if self.bounds.width() < self.block_m || self.bounds.height() < self.block_m {
            return Err(MobilityError::InvalidConfig("bounds too small for one street block"));
        }
        if !(self.speed_min > 0.0) || !(self.speed_max >= self.speed_min) || !self.speed_max.is_finite() {
            return Err(MobilityError::InvalidConfig("speed range must satisfy 0 < min <= max"));
        }
        if !(self.slot_s > 0.0) || !self.slot_s.is_finite() {
            return Err(MobilityError::InvalidConfig("slot duration must be positive"));
        }
        if self.horizon_slots == 0 {
            return Err(MobilityError::InvalidConfig("horizon_slots must be positive"));
        }
        Ok(())
    }
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

struct Walker {
    node: (i64, i64),
    dir: usize,
    progress: f64,
    speed: f64,
}

fn pick_speed<R: Rng>(cfg: &MobilityConfig, rng: &mut R) -> f64 {
    if cfg.speed_max > cfg.speed_min {
        rng.random_range(cfg.speed_min..=cfg.speed_max)
    } else {
        cfg.speed_min
    }
}

fn pick_dir<R: Rng>(node: (i64, i64), nodes: (i64, i64), avoid: Option<usize>, rng: &mut R) -> usize {
    let mut options = [0usize; 4];
    let mut n = 0;
    for (d, (dx, dy)) in DIRS.iter().enumerate() {
        let next = (node.0 + dx, node.1 + dy);
        let inside = next.0 >= 0 && next.0 <= nodes.0 && next.1 >= 0 && next.1 <= nodes.1;
        if inside && Some(d) != avoid {
            options[n] = d;
            n += 1;
        }
    }
    // Every intersection of a grid with at least one block per axis has a
    // non-reversing exit.
    options[rng.random_range(0..n)]
}

/// `n_vehicles` trajectories covering slots `0..horizon_slots`; vehicle ids
/// are `0..n_vehicles`.
pub fn synth_trajectories(cfg: &MobilityConfig) -> Result<Vec<Trajectory>, MobilityError> {
    cfg.validate()?;
    let nodes =
        (math::floor(cfg.bounds.width() / cfg.block_m) as i64, math::floor(cfg.bounds.height() / cfg.block_m) as i64);
    let origin = cfg.bounds.min;
    let at = |w: &Walker| {
        let (dx, dy) = DIRS[w.dir];
        Point::new(
            origin.x + w.node.0 as f64 * cfg.block_m + dx as f64 * w.progress,
            origin.y + w.node.1 as f64 * cfg.block_m + dy as f64 * w.progress,
        )
    };
    let mut out = Vec::with_capacity(cfg.n_vehicles);
    for v in 0..cfg.n_vehicles {
        let mut rng = stream_rng(cfg.seed, Stream::Mobility, v as u64);
        let node = (rng.random_range(0..=nodes.0), rng.random_range(0..=nodes.1));
        let dir = pick_dir(node, nodes, None, &mut rng);
        let mut w = Walker { node, dir, progress: 0.0, speed: pick_speed(cfg, &mut rng) };
        let mut positions = Vec::with_capacity(cfg.horizon_slots as usize);
        for _ in 0..cfg.horizon_slots {
            positions.push(at(&w));
            let mut left = cfg.slot_s;
            while left > 0.0 {
                let to_end = (cfg.block_m - w.progress) / w.speed;
                if to_end > left {
                    w.progress += w.speed * left;
                    left = 0.0;
                } else {
                    left -= to_end;
                    let (dx, dy) = DIRS[w.dir];
                    w.node = (w.node.0 + dx, w.node.1 + dy);
                    w.dir = pick_dir(w.node, nodes, Some((w.dir + 2) % 4), &mut rng);
                    w.progress = 0.0;
                    w.speed = pick_speed(cfg, &mut rng);
                }
            }
        }
        out.push(Trajectory::new(v as u32, 0, positions));
    }
    Ok(out)
}

/// One timestamped position fix from a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceFix {
    pub vehicle_id: u32,
    pub time_s: f64,
    pub position: Point,
}

/// A vehicle left out of the interpolated output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exclusion {
    pub vehicle_id: u32,
    /// In-bounds fixes that remained for the vehicle.
    pub fixes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceLoad {
    pub trajectories: Vec<Trajectory>,
    pub excluded: Vec<Exclusion>,
    /// Fixes dropped for lying outside the bounds.
    pub dropped_fixes: usize,
}

/// Interpolates fixes onto the slot clock `t0 + k * slot_s`, where `t0` is
/// the earliest in-bounds fix. Vehicles with fewer than two in-bounds fixes,
/// or whose fixes span no slot boundary, are excluded.
pub fn interpolate_traces(fixes: &[TraceFix], slot_s: f64, bounds: &Bounds) -> Result<TraceLoad, MobilityError> {
    if !(slot_s > 0.0) || !slot_s.is_finite() {
        return Err(MobilityError::InvalidConfig("slot duration must be positive"));
    }
    let mut per_vehicle: BTreeMap<u32, Vec<(f64, Point)>> = BTreeMap::new();
    let mut dropped = 0;
    for f in fixes {
        per_vehicle.entry(f.vehicle_id).or_default();
        if bounds.contains(&f.position) && f.time_s.is_finite() {
            per_vehicle.get_mut(&f.vehicle_id).unwrap().push((f.time_s, f.position));
        } else {
            dropped += 1;
        }
    }
    let t0 = per_vehicle
        .values()
        .filter(|v| v.len() >= 2)
        .flat_map(|v| v.iter().map(|(t, _)| *t))
        .fold(f64::INFINITY, f64::min);

    let mut trajectories = Vec::new();
    let mut excluded = Vec::new();
    for (id, mut fx) in per_vehicle {
        fx.sort_by(|a, b| a.0.total_cmp(&b.0));
        fx.dedup_by(|b, a| a.0 == b.0);
        if fx.len() < 2 {
            excluded.push(Exclusion { vehicle_id: id, fixes: fx.len() });
            continue;
        }
        let rel: Vec<f64> = fx.iter().map(|(t, _)| *t - t0).collect();
        let k_start = math::ceil(rel[0] / slot_s) as u64;
        let k_end = math::floor(rel[rel.len() - 1] / slot_s) as u64;
        if k_end < k_start {
            excluded.push(Exclusion { vehicle_id: id, fixes: fx.len() });
            continue;
        }
        let mut seg = 0;
        let mut positions = Vec::with_capacity((k_end - k_start + 1) as usize);
        for k in k_start..=k_end {
            let r = k as f64 * slot_s;
            while seg + 2 < rel.len() && rel[seg + 1] <= r {
                seg += 1;
            }
            let (r0, r1) = (rel[seg], rel[seg + 1]);
            let p =
                if r >= r1 { fx[seg + 1].1 } else { fx[seg].1.lerp(&fx[seg + 1].1, ((r - r0) / (r1 - r0)).max(0.0)) };
            positions.push(p);
        }
        trajectories.push(Trajectory::new(id, k_start, positions));
    }
    Ok(TraceLoad { trajectories, excluded, dropped_fixes: dropped })
}

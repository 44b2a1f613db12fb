//! Slotted round execution.
//!
//! Bids are formed against the estimated map while uploads accrue bits at
//! the ground-truth rate along the actual trajectory. A round ends at the
//! last delivery, or at the deadline if any scheduled vehicle misses it.

use alloc::vec::Vec;
use nalgebra::DVector;
use rand::Rng;
use thiserror::Error;

use crate::fl::{aggregate, closed_form_optimum, gen_synthetic, log_spaced, FlError, LsTask, ProxyConstants};
use crate::geom::Point;
use crate::math;
use crate::mobility::{planned_window, MobilityError, Trajectory};
use crate::rem::{
    estimate_rem_gpr, ground_truth_rem, path_loss_rem, sample_measurements, BsLayout, Channel, ExpKernel, GridSpec,
    Interference, LinkBudget, RemError, SinrGrid,
};
use crate::rng::{stream_rng, Stream};
use crate::scheduler::{
    central_optimize, customize_local, fedavg_sample, priority, round_slots, schedule, top_m, BidParams, ComputeMode,
    ParticipationBid, Policy, PriorityState, RoundPlan, RoundRobin, SchedulerError, SchedulerWeights, SlotAllocation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Rem(#[from] RemError),
    #[error(transparent)]
    Fl(#[from] FlError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error("no round scheduled any vehicle")]
    NoScheduledRounds,
}

/// Which map vehicles consult when bidding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemMode {
    GroundTruth,
    /// GPR estimate from this many measurements per BS sector.
    Estimated {
        per_sector: usize,
    },
}

impl Default for RemMode {
    fn default() -> Self {
        RemMode::Estimated { per_sector: 250 }
    }
}

/// Where the BS lattice sits relative to the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SitePhase {
    /// One site at the map center.
    Centered,
    /// Lattice translated by a uniform draw over one lattice period, so the
    /// map is a random window onto an unbounded deployment.
    #[default]
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioConfig {
    pub grid: GridSpec,
    pub inter_site_distance: f64,
    pub site_phase: SitePhase,
    pub budget: LinkBudget,
    pub interference: Interference,
    pub sectors: usize,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { origin: Point::new(0.0, 0.0), cell_size: 10.0, width: 60, height: 60 },
            inter_site_distance: 600.0,
            site_phase: SitePhase::Random,
            budget: LinkBudget::default(),
            interference: Interference::FullLoad,
            sectors: 3,
        }
    }
}

/// Ground truth and prior for one seed.
#[derive(Debug, Clone)]
pub struct RadioMaps {
    pub layout: BsLayout,
    pub truth: SinrGrid,
    pub prior: SinrGrid,
}

impl RadioMaps {
    pub fn build(cfg: &RadioConfig, seed: u64) -> Result<Self, SimError> {
        let bounds = cfg.grid.bounds();
        let isd = cfg.inter_site_distance;
        let layout = match cfg.site_phase {
            SitePhase::Centered => BsLayout::hexagonal(bounds, isd)?,
            SitePhase::Random => {
                let mut rng = stream_rng(seed, Stream::Layout, 0);
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                let c = bounds.center();
                // the lattice repeats every isd along x and every two rows along y
                let anchor = Point::new(c.x + u * isd, c.y + v * isd * math::sqrt(3.0));
                BsLayout::hexagonal_at(bounds, isd, anchor)?
            }
        };
        let truth = ground_truth_rem(&layout, &cfg.budget, &cfg.grid, seed, cfg.interference)?;
        let prior = path_loss_rem(&layout, &cfg.budget, &cfg.grid, cfg.interference)?;
        Ok(Self { layout, truth, prior })
    }

    /// Map vehicles bid against under `mode`.
    pub fn estimate(&self, cfg: &RadioConfig, mode: RemMode, seed: u64) -> Result<SinrGrid, SimError> {
        match mode {
            RemMode::GroundTruth => Ok(self.truth.clone()),
            RemMode::Estimated { per_sector } => {
                let m = sample_measurements(&self.truth, &self.layout, per_sector, cfg.sectors, seed);
                let kernel = ExpKernel::new(cfg.budget.shadowing_std_db, cfg.budget.decorrelation_m);
                Ok(estimate_rem_gpr(&self.prior, &self.layout, &m, kernel)?)
            }
        }
    }
}

/// Rescaled bitrate per map cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMap {
    spec: GridSpec,
    rates: Vec<f64>,
}

impl RateMap {
    pub fn new(rem: &SinrGrid, channel: &Channel) -> Self {
        Self { spec: *rem.spec(), rates: rem.values().iter().map(|s| channel.bitrate(*s)).collect() }
    }

    pub fn from_rates(spec: GridSpec, rates: Vec<f64>) -> Result<Self, SimError> {
        if rates.len() != spec.n_cells() || rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(SimError::InvalidConfig("rates must be finite, non-negative and one per cell"));
        }
        Ok(Self { spec, rates })
    }

    /// Bit/s at `p`; zero outside the map.
    pub fn rate_at(&self, p: &Point) -> f64 {
        self.spec.cell_index(p).map_or(0.0, |i| self.rates[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataConfig {
    pub dim: usize,
    pub samples_per_vehicle: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub lambda: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { dim: 25, samples_per_vehicle: 10, sigma_min: 1e-2, sigma_max: 1.0, lambda: 1e-4 }
    }
}

/// Local tasks (one per vehicle, in vehicle order) and reference optima.
#[derive(Debug, Clone)]
pub struct FlData {
    pub tasks: Vec<LsTask>,
    /// Regularized optimum of the pooled problem; distances are taken to it.
    pub theta_opt: DVector<f64>,
    /// Generating parameter.
    pub theta_star: DVector<f64>,
}

impl FlData {
    pub fn build(cfg: &DataConfig, vehicle_ids: &[u32], seed: u64) -> Result<Self, SimError> {
        if cfg.dim == 0 || cfg.samples_per_vehicle == 0 || vehicle_ids.is_empty() {
            return Err(SimError::InvalidConfig("data needs a dimension, samples and vehicles"));
        }
        if !(cfg.sigma_min > 0.0) || !(cfg.sigma_max >= cfg.sigma_min) {
            return Err(SimError::InvalidConfig("spectrum bounds must satisfy 0 < min <= max"));
        }
        let sigma = log_spaced(cfg.sigma_min, cfg.sigma_max, cfg.dim);
        let n = vehicle_ids.len();
        let mut data = gen_synthetic(cfg.samples_per_vehicle * n, &sigma, n, seed)?;
        for (d, id) in data.datasets.iter_mut().zip(vehicle_ids) {
            d.vehicle_id = *id;
        }
        let theta_opt = closed_form_optimum(&data.datasets, cfg.lambda)?;
        let tasks = data.datasets.into_iter().map(|d| LsTask::new(d, cfg.lambda)).collect::<Result<_, _>>()?;
        Ok(Self { tasks, theta_opt, theta_star: data.theta_star })
    }
}

/// Everything a run reads but never mutates.
#[derive(Debug, Clone)]
pub struct Environment {
    pub truth: RateMap,
    pub estimate: RateMap,
    pub trajectories: Vec<Trajectory>,
    pub data: FlData,
}

impl Environment {
    /// Trajectories must have strictly increasing ids and line up with the
    /// tasks.
    pub fn new(
        truth: RateMap,
        estimate: RateMap,
        trajectories: Vec<Trajectory>,
        data: FlData,
    ) -> Result<Self, SimError> {
        if trajectories.len() != data.tasks.len() {
            return Err(SimError::InvalidConfig("one task per trajectory required"));
        }
        if trajectories.windows(2).any(|w| w[0].vehicle_id >= w[1].vehicle_id) {
            return Err(SimError::InvalidConfig("trajectory ids must be strictly increasing"));
        }
        if trajectories.iter().zip(&data.tasks).any(|(t, k)| t.vehicle_id != k.dataset().vehicle_id) {
            return Err(SimError::InvalidConfig("task owners must match trajectory ids"));
        }
        Ok(Self { truth, estimate, trajectories, data })
    }

    pub fn n_vehicles(&self) -> usize {
        self.trajectories.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub tau: f64,
    pub k_max: f64,
    pub t_cpu_min: u32,
    pub max_scheduled: usize,
    pub rounds: u32,
    /// Stop once the clock reaches this many seconds.
    pub horizon_s: Option<f64>,
    pub b_bits: f64,
    pub weights: SchedulerWeights,
    pub proxy: ProxyConstants,
    pub s_v: u32,
    pub policy: Policy,
    pub compute: ComputeMode,
    /// Look-ahead `D` in slots; defaults to one round.
    pub lookahead_slots: Option<u32>,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            k_max: 100.0,
            t_cpu_min: 1,
            max_scheduled: 30,
            rounds: 30,
            horizon_s: None,
            b_bits: 3200.0,
            weights: SchedulerWeights::default(),
            proxy: ProxyConstants::default(),
            s_v: 1,
            policy: Policy::VremFl,
            compute: ComputeMode::Adjusted,
            lookahead_slots: None,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(SimError::InvalidConfig("tau must be positive"));
        }
        if self.t_cpu_min == 0 {
            return Err(SimError::InvalidConfig("t_cpu_min must be at least 1"));
        }
        if !self.k_max.is_finite() || round_slots(self.k_max, self.tau) <= self.t_cpu_min {
            return Err(SimError::InvalidConfig("k_max must leave a transmission slot after t_cpu_min"));
        }
        if self.max_scheduled == 0 {
            return Err(SimError::InvalidConfig("max_scheduled must be at least 1"));
        }
        if !(self.b_bits > 0.0) || !self.b_bits.is_finite() {
            return Err(SimError::InvalidConfig("b_bits must be positive"));
        }
        if self.s_v == 0 {
            return Err(SimError::InvalidConfig("s_v must be at least 1"));
        }
        if let Some(h) = self.horizon_s {
            if !(h > 0.0) {
                return Err(SimError::InvalidConfig("horizon must be positive"));
            }
        }
        self.weights.validate()?;
        self.proxy.validate()?;
        Ok(())
    }

    pub fn round_slots(&self) -> u32 {
        round_slots(self.k_max, self.tau)
    }

    /// Trajectory length needed to keep every vehicle active for the whole run.
    pub fn required_slots(&self) -> u64 {
        (self.rounds as u64 + 1) * self.round_slots() as u64
    }
}

/// What a scheduled vehicle actually did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleOutcome {
    pub vehicle_id: u32,
    pub bid: ParticipationBid,
    /// Allocation executed; differs from the bid only for benchmark picks
    /// with an infeasible bid.
    pub executed: SlotAllocation,
    /// Upload completion in seconds, `k_max` when missed.
    pub latency_s: f64,
    pub delivered: bool,
    pub tx_slots: u32,
    pub gd_steps: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u32,
    pub wall_start_s: f64,
    pub wall_end_s: f64,
    /// Scheduled ids in ascending order.
    pub scheduled: Vec<u32>,
    /// Bids of every active vehicle, ascending id.
    pub bids: Vec<ParticipationBid>,
    pub outcomes: Vec<VehicleOutcome>,
    pub theta: DVector<f64>,
    pub dist_sq: f64,
}

impl RoundRecord {
    pub fn n_scheduled(&self) -> usize {
        self.scheduled.len()
    }

    pub fn n_delivered(&self) -> usize {
        self.outcomes.iter().filter(|o| o.delivered).count()
    }

    pub fn tx_slots(&self) -> u64 {
        self.outcomes.iter().map(|o| o.tx_slots as u64).sum()
    }

    pub fn gd_steps(&self) -> u64 {
        self.outcomes.iter().map(|o| o.gd_steps as u64).sum()
    }

    pub fn duration_s(&self) -> f64 {
        self.wall_end_s - self.wall_start_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentMetrics {
    pub records: Vec<RoundRecord>,
    pub initial_dist_sq: f64,
    pub max_scheduled: usize,
}

impl ExperimentMetrics {
    /// Clock at the end of the last round.
    pub fn total_latency_s(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.wall_end_s)
    }

    pub fn total_tx_slots(&self) -> u64 {
        self.records.iter().map(|r| r.tx_slots()).sum()
    }

    pub fn total_gd_steps(&self) -> u64 {
        self.records.iter().map(|r| r.gd_steps()).sum()
    }

    pub fn final_dist_sq(&self) -> f64 {
        self.records.last().map_or(self.initial_dist_sq, |r| r.dist_sq)
    }

    pub fn tx_rate(&self) -> Result<f64, SimError> {
        compute_tx_rate(&self.records, self.max_scheduled)
    }
}

/// Mean over rounds with a non-empty schedule of `delivered / m`.
pub fn compute_tx_rate(records: &[RoundRecord], m: usize) -> Result<f64, SimError> {
    let rates: Vec<f64> =
        records.iter().filter(|r| r.n_scheduled() > 0).map(|r| r.n_delivered() as f64 / m as f64).collect();
    if rates.is_empty() {
        return Err(SimError::NoScheduledRounds);
    }
    Ok(rates.iter().sum::<f64>() / rates.len() as f64)
}

/// Mutable run state over a borrowed environment.
#[derive(Debug, Clone)]
pub struct Simulation<'e> {
    env: &'e Environment,
    cfg: SimConfig,
    theta: DVector<f64>,
    clock: u64,
    round: u32,
    priority: PriorityState,
    rr: RoundRobin,
}

impl<'e> Simulation<'e> {
    pub fn new(env: &'e Environment, cfg: SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        Ok(Self {
            env,
            cfg,
            theta: DVector::zeros(env.data.theta_opt.len()),
            clock: 0,
            round: 0,
            priority: PriorityState::new(env.n_vehicles()),
            rr: RoundRobin::default(),
        })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn clock_s(&self) -> f64 {
        self.clock as f64 * self.cfg.tau
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn dist_sq(&self) -> f64 {
        (&self.theta - &self.env.data.theta_opt).norm_squared()
    }

    fn select(&mut self, active: &[bool], bids: &[Option<ParticipationBid>], s0: u64) -> Vec<usize> {
        let env = self.env;
        let m = self.cfg.max_scheduled;
        let idx = |ids: Vec<u32>| ids.into_iter().map(|i| i as usize).collect::<Vec<_>>();
        let active_idx = (0..active.len()).filter(|&v| active[v]);
        match self.cfg.policy {
            Policy::VremFl => {
                let p: Vec<(u32, f64)> = active_idx
                    .map(|v| {
                        let b = bids[v].as_ref().unwrap();
                        (v as u32, priority(b.cost, self.priority.fairness(v), self.cfg.weights.w_a))
                    })
                    .collect();
                idx(schedule(&p, m))
            }
            Policy::Fairness => {
                let p: Vec<(u32, f64)> = active_idx.map(|v| (v as u32, self.priority.fairness(v))).collect();
                idx(top_m(&p, m))
            }
            Policy::FedAvg => {
                let ids: Vec<u32> = active_idx.map(|v| v as u32).collect();
                let mut rng = stream_rng(self.cfg.seed, Stream::Scheduler, self.round as u64);
                idx(fedavg_sample(&ids, m, &mut rng))
            }
            Policy::RoundRobin => self.rr.next(active, m),
            Policy::CentrSnr => {
                let p: Vec<(u32, f64)> = active_idx
                    .map(|v| {
                        let pos = env.trajectories[v].position_at(s0).unwrap();
                        (v as u32, env.estimate.rate_at(&pos))
                    })
                    .collect();
                idx(top_m(&p, m))
            }
        }
    }

    /// Runs one round and advances the clock.
    pub fn run_round(&mut self) -> RoundRecord {
        let env = self.env;
        let cfg = self.cfg;
        let ks = cfg.round_slots();
        let s0 = self.clock;
        let n = env.n_vehicles();
        let active: Vec<bool> = env.trajectories.iter().map(|t| t.covers(s0, ks as u64)).collect();

        let plan = RoundPlan {
            round: self.round,
            h_star: central_optimize(cfg.max_scheduled, cfg.proxy.c),
            k_max: cfg.k_max,
            max_scheduled: cfg.max_scheduled,
            t_cpu_min: cfg.t_cpu_min,
            tau: cfg.tau,
        };
        let params = BidParams {
            plan,
            b_bits: cfg.b_bits,
            s_v: cfg.s_v,
            proxy: cfg.proxy,
            w_tx: cfg.weights.w_tx,
            compute: cfg.compute,
        };
        let lookahead = cfg.lookahead_slots.unwrap_or(ks) as u64;
        let bids: Vec<Option<ParticipationBid>> = (0..n)
            .map(|v| {
                if !active[v] {
                    return None;
                }
                let traj = &env.trajectories[v];
                let forecast: Vec<f64> = planned_window(traj, s0, lookahead)
                    .iter()
                    .take(ks as usize)
                    .map(|p| env.estimate.rate_at(p))
                    .collect();
                let task = &env.data.tasks[v];
                let g = task.grad_norm(&self.theta);
                Some(customize_local(traj.vehicle_id, Some(g), task.condition_number(), &forecast, &params))
            })
            .collect();

        let mut chosen = self.select(&active, &bids, s0);
        chosen.sort_unstable();

        let mut outcomes = Vec::with_capacity(chosen.len());
        let mut locals = Vec::with_capacity(chosen.len());
        let mut delivered_flags = alloc::vec![false; n];
        for &v in &chosen {
            let traj = &env.trajectories[v];
            let task = &env.data.tasks[v];
            let bid = bids[v].unwrap();
            let executed = bid.allocation.unwrap_or_else(|| {
                let t_cpu = bid.h_v.div_ceil(cfg.s_v).clamp(cfg.t_cpu_min, ks - 1);
                SlotAllocation {
                    t_cpu,
                    idle_len: 0,
                    tx_start: t_cpu + 1,
                    t_tx: ks - t_cpu,
                    latency: ks as f64 * cfg.tau,
                }
            });
            let mut steps = bid.h_v.min(cfg.s_v * executed.t_cpu);
            if cfg.compute == ComputeMode::MaxSteps {
                steps += cfg.s_v * executed.idle_len;
            }
            let local = task.local_gd(&self.theta, steps);

            let mut bits = 0.0;
            let mut tx_slots = 0;
            let mut delivered_at = None;
            for k in executed.tx_start..=ks {
                let pos = traj.position_at(s0 + k as u64 - 1).unwrap();
                bits += env.truth.rate_at(&pos) * cfg.tau;
                tx_slots += 1;
                if bits >= cfg.b_bits {
                    delivered_at = Some(k);
                    break;
                }
            }
            let delivered = delivered_at.is_some();
            delivered_flags[v] = delivered;
            if delivered {
                locals.push((local, task.dataset().n_samples() as f64));
            }
            outcomes.push(VehicleOutcome {
                vehicle_id: traj.vehicle_id,
                bid,
                executed,
                latency_s: delivered_at.map_or(cfg.k_max, |k| k as f64 * cfg.tau),
                delivered,
                tx_slots,
                gd_steps: steps,
            });
        }

        let pairs: Vec<(&DVector<f64>, f64)> = locals.iter().map(|(t, w)| (t, *w)).collect();
        if let Some(theta) = aggregate(&pairs) {
            self.theta = theta;
        }
        self.priority.record_round(&delivered_flags);

        let duration = if chosen.is_empty() {
            cfg.t_cpu_min
        } else if outcomes.iter().all(|o| o.delivered) {
            outcomes.iter().map(|o| o.executed.tx_start + o.tx_slots - 1).max().unwrap()
        } else {
            ks
        };
        let record = RoundRecord {
            round: self.round,
            wall_start_s: s0 as f64 * cfg.tau,
            wall_end_s: (s0 + duration as u64) as f64 * cfg.tau,
            scheduled: chosen.iter().map(|&v| env.trajectories[v].vehicle_id).collect(),
            bids: bids.into_iter().flatten().collect(),
            outcomes,
            theta: self.theta.clone(),
            dist_sq: self.dist_sq(),
        };
        self.clock += duration as u64;
        self.round += 1;
        record
    }

    /// True once the round budget or the wall-clock horizon is spent.
    pub fn finished(&self) -> bool {
        self.round >= self.cfg.rounds || self.cfg.horizon_s.is_some_and(|h| self.clock_s() >= h)
    }
}

pub fn run_experiment(env: &Environment, cfg: &SimConfig) -> Result<ExperimentMetrics, SimError> {
    let mut sim = Simulation::new(env, *cfg)?;
    let initial_dist_sq = sim.dist_sq();
    let mut records = Vec::new();
    while !sim.finished() {
        records.push(sim.run_round());
    }
    Ok(ExperimentMetrics { records, initial_dist_sq, max_scheduled: cfg.max_scheduled })
}

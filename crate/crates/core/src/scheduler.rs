//! Round planning, per-vehicle bids and client selection.
//!
//! The server picks a target step count `H*`; each vehicle refines it
//! against its local convergence proxy, reserves leading slots for
//! computation and then searches its bitrate forecast for the cheapest
//! upload window. The server ranks the resulting bids. Benchmark policies
//! ignore bids entirely.

use alloc::vec::Vec;
use rand::Rng;
use thiserror::Error;

use crate::fl::{local_proxy, ProxyConstants};
use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedulerError {
    #[error("invalid scheduler parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("unknown policy `{0}`")]
    UnknownPolicy(alloc::string::String),
}

/// Whole slots in a round of `k_max` seconds.
pub fn round_slots(k_max: f64, tau: f64) -> u32 {
    math::floor(k_max / tau + 1e-9) as u32
}

/// Per-round constants shared by every vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundPlan {
    pub round: u32,
    pub h_star: f64,
    pub k_max: f64,
    pub max_scheduled: usize,
    pub t_cpu_min: u32,
    pub tau: f64,
}

impl RoundPlan {
    pub fn validate(&self) -> Result<(), SchedulerError> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(SchedulerError::InvalidParameter("tau must be positive"));
        }
        if self.max_scheduled == 0 {
            return Err(SchedulerError::InvalidParameter("max_scheduled must be at least 1"));
        }
        if self.t_cpu_min == 0 {
            return Err(SchedulerError::InvalidParameter("t_cpu_min must be at least 1"));
        }
        if !(self.k_max >= self.tau * self.t_cpu_min as f64) || !self.k_max.is_finite() {
            return Err(SchedulerError::InvalidParameter("k_max must cover t_cpu_min slots"));
        }
        if !(self.h_star >= 1.0) {
            return Err(SchedulerError::InvalidParameter("h_star must be at least 1"));
        }
        Ok(())
    }

    pub fn slots(&self) -> u32 {
        round_slots(self.k_max, self.tau)
    }
}

/// Slot layout of one vehicle's round. Slots are numbered from 1.
/// Computation uses `1..=t_cpu`, transmission `tx_start..tx_start + t_tx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotAllocation {
    pub t_cpu: u32,
    pub idle_len: u32,
    pub tx_start: u32,
    pub t_tx: u32,
    /// `(tx_start − 1 + t_tx)·τ`, in seconds.
    pub latency: f64,
}

impl SlotAllocation {
    /// Last transmission slot.
    pub fn end_slot(&self) -> u32 {
        self.tx_start + self.t_tx - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticipationBid {
    pub vehicle_id: u32,
    /// `+∞` when no allocation meets the deadline.
    pub cost: f64,
    pub allocation: Option<SlotAllocation>,
    /// Refined local step count before any slot reduction.
    pub h_v: u32,
}

impl ParticipationBid {
    pub fn infeasible(vehicle_id: u32, h_v: u32) -> Self {
        Self { vehicle_id, cost: f64::INFINITY, allocation: None, h_v }
    }

    pub fn is_feasible(&self) -> bool {
        self.allocation.is_some()
    }

    /// Steps that fit in the allocated computation slots.
    pub fn steps(&self, s_v: u32) -> u32 {
        self.allocation.map_or(0, |a| self.h_v.min(s_v * a.t_cpu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerWeights {
    pub w_tx: f64,
    pub w_a: f64,
}

impl Default for SchedulerWeights {
    fn default() -> Self {
        Self { w_tx: 0.5, w_a: 0.0 }
    }
}

impl SchedulerWeights {
    pub fn validate(&self) -> Result<(), SchedulerError> {
        if !(0.0..=1.0).contains(&self.w_tx) {
            return Err(SchedulerError::InvalidParameter("w_tx must lie in [0, 1]"));
        }
        if !(self.w_a >= 0.0) || !self.w_a.is_finite() {
            return Err(SchedulerError::InvalidParameter("w_a must be non-negative"));
        }
        Ok(())
    }
}

/// Scheduling frequency and age of information per vehicle index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityState {
    rounds: u32,
    delivered: Vec<u32>,
    aoi: Vec<u32>,
}

impl PriorityState {
    pub fn new(n_vehicles: usize) -> Self {
        Self { rounds: 0, delivered: alloc::vec![0; n_vehicles], aoi: alloc::vec![1; n_vehicles] }
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn times_delivered(&self, v: usize) -> u32 {
        self.delivered[v]
    }

    /// `(1 + deliveries) / (1 + rounds)`.
    pub fn frequency(&self, v: usize) -> f64 {
        (1.0 + self.delivered[v] as f64) / (1.0 + self.rounds as f64)
    }

    pub fn aoi(&self, v: usize) -> u32 {
        self.aoi[v]
    }

    pub fn fairness(&self, v: usize) -> f64 {
        fairness(self.frequency(v), self.aoi[v] as f64)
    }

    /// Closes a round; `delivered[v]` marks vehicles whose model reached
    /// the server.
    pub fn record_round(&mut self, delivered: &[bool]) {
        assert_eq!(delivered.len(), self.aoi.len());
        self.rounds += 1;
        for (v, &ok) in delivered.iter().enumerate() {
            if ok {
                self.delivered[v] += 1;
                self.aoi[v] = 0;
            } else {
                self.aoi[v] += 1;
            }
        }
    }
}

/// `√(C / (1 + 1/M))`, the minimizer of the continuous global proxy.
pub fn central_optimize(m: usize, c: f64) -> f64 {
    math::sqrt(c / (1.0 + 1.0 / m as f64))
}

fn refine_objective(h: u32, grad_norm: f64, kappa: f64, h_star: f64, rho1: f64, rho2: f64) -> f64 {
    let d = h as f64 - h_star;
    local_proxy(grad_norm, kappa, h) + rho1 * h as f64 / grad_norm + rho2 * d * d
}

/// Integer step count minimizing
/// `Θ(H) + ρ1·H/‖g‖ + ρ2·(H − H*)²` over `h_min..=h_max`, smaller `H` on ties.
/// Returns `h_min` for a zero gradient or when `h_min ≥ h_max`, and `h_max`
/// when both penalties vanish.
pub fn refine_local_steps(
    grad_norm: f64,
    kappa: f64,
    h_star: f64,
    proxy: &ProxyConstants,
    h_min: u32,
    h_max: u32,
) -> u32 {
    if !(grad_norm > 0.0) || !grad_norm.is_finite() || h_min >= h_max {
        return h_min;
    }
    if proxy.rho1 == 0.0 && proxy.rho2 == 0.0 {
        // Θ alone strictly decreases but underflows to zero well before h_max.
        return h_max;
    }
    let mut best = h_min;
    let mut best_val = refine_objective(h_min, grad_norm, kappa, h_star, proxy.rho1, proxy.rho2);
    for h in h_min + 1..=h_max {
        let v = refine_objective(h, grad_norm, kappa, h_star, proxy.rho1, proxy.rho2);
        if v < best_val {
            best = h;
            best_val = v;
        }
    }
    best
}

/// Cheapest upload window after `t_cpu` computation slots.
///
/// `forecast[k − 1]` is the expected bitrate (bit/s) in slot `k`; slots
/// beyond the forecast carry nothing. The window must end by slot
/// `⌊k_max/τ⌋`. Cost is `(1 − w_tx)·K + w_tx·T_tx` with `K` in seconds.
pub fn optimize_transmission(
    t_cpu: u32,
    forecast: &[f64],
    b_bits: f64,
    k_max: f64,
    tau: f64,
    w_tx: f64,
) -> Option<SlotAllocation> {
    let k_slots = (round_slots(k_max, tau) as usize).min(forecast.len());
    let mut best: Option<(f64, SlotAllocation)> = None;
    for start in t_cpu as usize + 1..=k_slots {
        let mut acc = 0.0;
        for end in start..=k_slots {
            acc += forecast[end - 1] * tau;
            if acc >= b_bits {
                let t_tx = (end - start + 1) as u32;
                let latency = end as f64 * tau;
                let cost = (1.0 - w_tx) * latency + w_tx * t_tx as f64;
                let alloc = SlotAllocation {
                    t_cpu,
                    idle_len: (start - 1) as u32 - t_cpu,
                    tx_start: start as u32,
                    t_tx,
                    latency,
                };
                let better = match &best {
                    None => true,
                    Some((c, a)) => cost < *c || (cost == *c && t_tx < a.t_tx),
                };
                if better {
                    best = Some((cost, alloc));
                }
                break;
            }
        }
    }
    best.map(|(_, a)| a)
}

fn tx_cost(a: &SlotAllocation, w_tx: f64) -> f64 {
    (1.0 - w_tx) * a.latency + w_tx * a.t_tx as f64
}

/// How a vehicle chooses its local step count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComputeMode {
    /// Refine against the local proxy.
    #[default]
    Adjusted,
    /// Always `s_v·T_cpu_min`.
    MinSteps,
    /// Bid as `Adjusted`, then spend idle slots on extra steps.
    MaxSteps,
}

/// Inputs shared by every vehicle in a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidParams {
    pub plan: RoundPlan,
    pub b_bits: f64,
    pub s_v: u32,
    pub proxy: ProxyConstants,
    pub w_tx: f64,
    pub compute: ComputeMode,
}

/// One vehicle's bid. `grad_norm` is `None` when the vehicle cannot
/// evaluate its gradient; it then targets `max(⌈H*⌉, s_v·T_cpu_min)`.
/// Computation slots start at `⌈H_v/s_v⌉` and shrink one at a time until an
/// upload window fits or `T_cpu` would drop below `T_cpu_min`.
pub fn customize_local(
    vehicle_id: u32,
    grad_norm: Option<f64>,
    kappa: f64,
    forecast: &[f64],
    p: &BidParams,
) -> ParticipationBid {
    let plan = &p.plan;
    let h_min = p.s_v * plan.t_cpu_min;
    let h_v = match (p.compute, grad_norm) {
        (ComputeMode::MinSteps, _) => h_min,
        (_, Some(g)) => refine_local_steps(g, kappa, plan.h_star, &p.proxy, h_min, p.s_v * plan.slots()),
        (_, None) => (math::ceil(plan.h_star) as u32).max(h_min),
    };
    let mut t_cpu = h_v.div_ceil(p.s_v);
    while t_cpu >= plan.t_cpu_min {
        if let Some(a) = optimize_transmission(t_cpu, forecast, p.b_bits, plan.k_max, plan.tau, p.w_tx) {
            return ParticipationBid { vehicle_id, cost: tx_cost(&a, p.w_tx), allocation: Some(a), h_v };
        }
        t_cpu -= 1;
    }
    ParticipationBid::infeasible(vehicle_id, h_v)
}

/// `1/f + A`.
pub fn fairness(f: f64, aoi: f64) -> f64 {
    1.0 / f + aoi
}

/// `1/cost + w_A·F`, or −1 for an infeasible bid.
pub fn priority(cost: f64, fairness: f64, w_a: f64) -> f64 {
    if cost.is_finite() {
        1.0 / cost + w_a * fairness
    } else {
        -1.0
    }
}

/// The `m` highest scores, ties to the lower id, best first.
pub fn top_m(scores: &[(u32, f64)], m: usize) -> Vec<u32> {
    let mut sorted: Vec<(u32, f64)> = scores.iter().copied().filter(|(_, s)| !s.is_nan()).collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    sorted.into_iter().take(m).map(|(id, _)| id).collect()
}

/// Top-`m` among positive priorities.
pub fn schedule(priorities: &[(u32, f64)], m: usize) -> Vec<u32> {
    let positive: Vec<(u32, f64)> = priorities.iter().copied().filter(|(_, p)| *p > 0.0).collect();
    top_m(&positive, m)
}

/// Selection rule for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    VremFl,
    Fairness,
    FedAvg,
    RoundRobin,
    CentrSnr,
}

impl Policy {
    pub const ALL: [Policy; 5] =
        [Policy::VremFl, Policy::Fairness, Policy::FedAvg, Policy::RoundRobin, Policy::CentrSnr];

    pub fn name(self) -> &'static str {
        match self {
            Policy::VremFl => "vremfl",
            Policy::Fairness => "fairness",
            Policy::FedAvg => "fedavg",
            Policy::RoundRobin => "round_robin",
            Policy::CentrSnr => "centr_snr",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, SchedulerError> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| SchedulerError::UnknownPolicy(name.into()))
    }

    pub fn uses_bids(self) -> bool {
        self == Policy::VremFl
    }
}

impl core::fmt::Display for Policy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cyclic selection over vehicle indices, skipping inactive ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundRobin {
    cursor: usize,
}

impl RoundRobin {
    pub fn next(&mut self, active: &[bool], m: usize) -> Vec<usize> {
        let n = active.len();
        let mut out = Vec::new();
        for step in 0..n {
            if out.len() == m {
                break;
            }
            let v = (self.cursor + step) % n;
            if active[v] {
                out.push(v);
            }
        }
        if let Some(&last) = out.last() {
            self.cursor = (last + 1) % n;
        }
        out
    }
}

/// Uniform sample of `min(m, |ids|)` ids without replacement, sorted.
pub fn fedavg_sample<R: Rng>(ids: &[u32], m: usize, rng: &mut R) -> Vec<u32> {
    let k = m.min(ids.len());
    let mut out: Vec<u32> = rand::seq::index::sample(rng, ids.len(), k).into_iter().map(|i| ids[i]).collect();
    out.sort_unstable();
    out
}

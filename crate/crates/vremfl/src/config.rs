//! Experiment configuration.
//!
//! One TOML file with a section per module. Every key has a default, so an
//! empty file describes the least-squares experiment at full scale:
//! 1000 vehicles, 30 scheduled per round, 30 rounds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vremfl_core::fl::ProxyConstants;
use vremfl_core::mobility::MobilityConfig;
use vremfl_core::rem::{GridSpec, Interference, LinkBudget};
use vremfl_core::scheduler::{ComputeMode, Policy, SchedulerWeights};
use vremfl_core::sim::{DataConfig, RadioConfig, RemMode, SimConfig, SitePhase};
use vremfl_core::{Bounds, Point};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub sweep: SweepSection,
    pub radio: RadioSection,
    pub rem: RemSection,
    pub mobility: MobilitySection,
    pub data: DataSection,
    pub sim: SimSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    /// Not written to manifests, so a rerun can target any directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Policies for `compare`.
    pub policies: Vec<PolicyName>,
    pub dump_dataset: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            name: "ls".into(),
            out_dir: None,
            seeds: vec![0],
            policies: vec![PolicyName::Vremfl, PolicyName::Fairness, PolicyName::Fedavg, PolicyName::RoundRobin],
            dump_dataset: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    Vremfl,
    Fairness,
    Fedavg,
    RoundRobin,
    CentrSnr,
}

impl From<PolicyName> for Policy {
    fn from(p: PolicyName) -> Self {
        match p {
            PolicyName::Vremfl => Policy::VremFl,
            PolicyName::Fairness => Policy::Fairness,
            PolicyName::Fedavg => Policy::FedAvg,
            PolicyName::RoundRobin => Policy::RoundRobin,
            PolicyName::CentrSnr => Policy::CentrSnr,
        }
    }
}

impl From<Policy> for PolicyName {
    fn from(p: Policy) -> Self {
        match p {
            Policy::VremFl => PolicyName::Vremfl,
            Policy::Fairness => PolicyName::Fairness,
            Policy::FedAvg => PolicyName::Fedavg,
            Policy::RoundRobin => PolicyName::RoundRobin,
            Policy::CentrSnr => PolicyName::CentrSnr,
        }
    }
}

/// Parses a policy name, listing the valid ones on failure.
pub fn parse_policy(name: &str) -> Result<Policy, ConfigError> {
    Policy::from_name(name).map_err(|_| {
        let valid: Vec<&str> = Policy::ALL.iter().map(|p| p.name()).collect();
        invalid("policy", format!("unknown policy '{name}'; valid policies: {}", valid.join(", ")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputeName {
    #[default]
    Adjusted,
    MinSteps,
    MaxSteps,
}

impl From<ComputeName> for ComputeMode {
    fn from(c: ComputeName) -> Self {
        match c {
            ComputeName::Adjusted => ComputeMode::Adjusted,
            ComputeName::MinSteps => ComputeMode::MinSteps,
            ComputeName::MaxSteps => ComputeMode::MaxSteps,
        }
    }
}

/// Parameter varied by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Policy,
    WTx,
    /// Vehicles scheduled per round.
    M,
    RemSamples,
    Lambda,
    Compute,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] =
        [SweepAxis::Policy, SweepAxis::WTx, SweepAxis::M, SweepAxis::RemSamples, SweepAxis::Lambda, SweepAxis::Compute];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Policy => "policy",
            SweepAxis::WTx => "w_tx",
            SweepAxis::M => "m",
            SweepAxis::RemSamples => "rem_samples",
            SweepAxis::Lambda => "lambda",
            SweepAxis::Compute => "compute",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|a| a.name() == name).ok_or_else(|| {
            let valid: Vec<&str> = Self::ALL.iter().map(|a| a.name()).collect();
            invalid("sweep.axis", format!("unknown axis '{name}'; valid axes: {}", valid.join(", ")))
        })
    }

    /// Whether changing this axis changes the environment (maps, data).
    pub fn affects_environment(self) -> bool {
        matches!(self, SweepAxis::RemSamples | SweepAxis::Lambda)
    }

    /// Sets this axis to `value` in `cfg`.
    pub fn apply(self, cfg: &mut Config, value: &str) -> Result<(), ConfigError> {
        let num = |field: &str| value.parse::<f64>().map_err(|_| invalid(field, format!("'{value}' is not a number")));
        let int = |field: &str| {
            value.parse::<usize>().map_err(|_| invalid(field, format!("'{value}' is not a non-negative integer")))
        };
        match self {
            SweepAxis::Policy => {
                cfg.sim.policy = parse_policy(value)
                    .map_err(|e| match e {
                        ConfigError::Invalid { reason, .. } => invalid("sweep.values", reason),
                        other => other,
                    })?
                    .into()
            }
            SweepAxis::WTx => cfg.sim.w_tx = num("sweep.values")?,
            SweepAxis::M => cfg.sim.max_scheduled = int("sweep.values")?,
            SweepAxis::RemSamples => {
                cfg.rem.mode = RemModeName::Estimated;
                cfg.rem.samples_per_sector = int("sweep.values")?;
            }
            SweepAxis::Lambda => cfg.data.lambda = num("sweep.values")?,
            SweepAxis::Compute => {
                cfg.sim.compute = match value {
                    "adjusted" => ComputeName::Adjusted,
                    "min_steps" => ComputeName::MinSteps,
                    "max_steps" => ComputeName::MaxSteps,
                    _ => {
                        return Err(invalid(
                            "sweep.values",
                            format!("unknown compute mode '{value}'; valid modes: adjusted, min_steps, max_steps"),
                        ))
                    }
                }
            }
        }
        Ok(())
    }
}

/// A sweep value as written in TOML; numbers and names are both accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Int(v) => write!(f, "{v}"),
            SweepValue::Float(v) => write!(f, "{v}"),
            SweepValue::Text(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    pub values: Vec<SweepValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SitePhaseName {
    Centered,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceName {
    FullLoad,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub origin_x_m: f64,
    pub origin_y_m: f64,
    pub cell_size_m: f64,
    pub width: usize,
    pub height: usize,
    pub inter_site_distance_m: f64,
    pub site_phase: SitePhaseName,
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub bs_height_m: f64,
    pub vehicle_height_m: f64,
    pub shadowing_std_db: f64,
    pub decorrelation_m: f64,
    pub interference: InterferenceName,
    pub sectors: usize,
    /// Multiplies every bitrate after the table lookup.
    pub rescale: f64,
    /// Two-column SINR (dB) to spectral efficiency table; built-in if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bitrate_table: Option<PathBuf>,
}

impl Default for RadioSection {
    fn default() -> Self {
        let r = RadioConfig::default();
        let b = r.budget;
        Self {
            origin_x_m: r.grid.origin.x,
            origin_y_m: r.grid.origin.y,
            cell_size_m: r.grid.cell_size,
            width: r.grid.width,
            height: r.grid.height,
            inter_site_distance_m: r.inter_site_distance,
            site_phase: SitePhaseName::Random,
            carrier_freq_hz: b.carrier_freq_hz,
            bandwidth_hz: b.bandwidth_hz,
            tx_power_dbm: b.tx_power_dbm,
            noise_figure_db: b.noise_figure_db,
            bs_height_m: b.bs_height_m,
            vehicle_height_m: b.vehicle_height_m,
            shadowing_std_db: b.shadowing_std_db,
            decorrelation_m: b.decorrelation_m,
            interference: InterferenceName::FullLoad,
            sectors: r.sectors,
            rescale: 2e-5,
            bitrate_table: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemModeName {
    GroundTruth,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemSection {
    /// Map vehicles bid against.
    pub mode: RemModeName,
    pub samples_per_sector: usize,
    /// Estimates written by `generate-rem`.
    pub sample_counts: Vec<usize>,
    /// Load the ground truth from a raster instead of generating it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_file: Option<PathBuf>,
    /// Load the bidding map from a raster instead of estimating it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate_file: Option<PathBuf>,
}

impl Default for RemSection {
    fn default() -> Self {
        Self {
            mode: RemModeName::Estimated,
            samples_per_sector: 250,
            sample_counts: vec![100, 150, 250],
            truth_file: None,
            estimate_file: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityModel {
    WaypointGrid,
    TraceFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilitySection {
    pub model: MobilityModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<PathBuf>,
    pub n_vehicles: usize,
    pub block_m: f64,
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
}

impl Default for MobilitySection {
    fn default() -> Self {
        let m = MobilityConfig::default();
        Self {
            model: MobilityModel::WaypointGrid,
            trace_file: None,
            n_vehicles: m.n_vehicles,
            block_m: m.block_m,
            speed_min_mps: m.speed_min,
            speed_max_mps: m.speed_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub dim: usize,
    pub samples_per_vehicle: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub lambda: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        let d = DataConfig::default();
        Self {
            dim: d.dim,
            samples_per_vehicle: d.samples_per_vehicle,
            sigma_min: d.sigma_min,
            sigma_max: d.sigma_max,
            lambda: d.lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub tau_s: f64,
    pub k_max_s: f64,
    pub t_cpu_min: u32,
    pub max_scheduled: usize,
    pub rounds: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_s: Option<f64>,
    pub b_bits: f64,
    pub w_tx: f64,
    pub w_a: f64,
    pub c: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub s_v: u32,
    pub policy: PolicyName,
    pub compute: ComputeName,
    /// Look-ahead in slots; one round if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lookahead_slots: Option<u32>,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::default();
        Self {
            tau_s: s.tau,
            k_max_s: s.k_max,
            t_cpu_min: s.t_cpu_min,
            max_scheduled: s.max_scheduled,
            rounds: s.rounds,
            horizon_s: s.horizon_s,
            b_bits: s.b_bits,
            w_tx: s.weights.w_tx,
            w_a: s.weights.w_a,
            c: s.proxy.c,
            rho1: s.proxy.rho1,
            rho2: s.proxy.rho2,
            s_v: s.s_v,
            policy: s.policy.into(),
            compute: ComputeName::Adjusted,
            lookahead_slots: s.lookahead_slots,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {v}")))
    }
}

fn at_least_one(field: &str, v: u64) -> Result<(), ConfigError> {
    if v >= 1 {
        Ok(())
    } else {
        Err(invalid(field, "must be at least 1"))
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads and validates `path`. Relative file references inside the
    /// config resolve against the config's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Makes relative file references absolute with respect to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.radio.bitrate_table);
        fix(&mut self.rem.truth_file);
        fix(&mut self.rem.estimate_file);
        fix(&mut self.mobility.trace_file);
        fix(&mut self.experiment.out_dir);
    }

    /// Checks every field before any computation; errors name the field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let e = &self.experiment;
        if e.seeds.is_empty() {
            return Err(invalid("experiment.seeds", "must list at least one seed"));
        }
        if e.name.is_empty() {
            return Err(invalid("experiment.name", "must not be empty"));
        }

        let r = &self.radio;
        finite("radio.origin_x_m", r.origin_x_m)?;
        finite("radio.origin_y_m", r.origin_y_m)?;
        positive("radio.cell_size_m", r.cell_size_m)?;
        at_least_one("radio.width", r.width as u64)?;
        at_least_one("radio.height", r.height as u64)?;
        positive("radio.inter_site_distance_m", r.inter_site_distance_m)?;
        positive("radio.carrier_freq_hz", r.carrier_freq_hz)?;
        positive("radio.bandwidth_hz", r.bandwidth_hz)?;
        finite("radio.tx_power_dbm", r.tx_power_dbm)?;
        finite("radio.noise_figure_db", r.noise_figure_db)?;
        positive("radio.bs_height_m", r.bs_height_m)?;
        positive("radio.vehicle_height_m", r.vehicle_height_m)?;
        non_negative("radio.shadowing_std_db", r.shadowing_std_db)?;
        positive("radio.decorrelation_m", r.decorrelation_m)?;
        at_least_one("radio.sectors", r.sectors as u64)?;
        positive("radio.rescale", r.rescale)?;

        let m = &self.mobility;
        at_least_one("mobility.n_vehicles", m.n_vehicles as u64)?;
        positive("mobility.block_m", m.block_m)?;
        positive("mobility.speed_min_mps", m.speed_min_mps)?;
        positive("mobility.speed_max_mps", m.speed_max_mps)?;
        if m.speed_max_mps < m.speed_min_mps {
            return Err(invalid("mobility.speed_max_mps", "must not be below speed_min_mps"));
        }
        if m.model == MobilityModel::TraceFile && m.trace_file.is_none() {
            return Err(invalid("mobility.trace_file", "required when model = \"trace_file\""));
        }

        let d = &self.data;
        at_least_one("data.dim", d.dim as u64)?;
        at_least_one("data.samples_per_vehicle", d.samples_per_vehicle as u64)?;
        positive("data.sigma_min", d.sigma_min)?;
        positive("data.sigma_max", d.sigma_max)?;
        if d.sigma_max < d.sigma_min {
            return Err(invalid("data.sigma_max", "must not be below sigma_min"));
        }
        non_negative("data.lambda", d.lambda)?;

        let s = &self.sim;
        positive("sim.tau_s", s.tau_s)?;
        positive("sim.k_max_s", s.k_max_s)?;
        at_least_one("sim.t_cpu_min", s.t_cpu_min as u64)?;
        if vremfl_core::scheduler::round_slots(s.k_max_s, s.tau_s) <= s.t_cpu_min {
            return Err(invalid("sim.k_max_s", "must leave at least one transmission slot after t_cpu_min"));
        }
        at_least_one("sim.max_scheduled", s.max_scheduled as u64)?;
        if let Some(h) = s.horizon_s {
            positive("sim.horizon_s", h)?;
        }
        positive("sim.b_bits", s.b_bits)?;
        if !(0.0..=1.0).contains(&s.w_tx) {
            return Err(invalid("sim.w_tx", format!("must lie in [0, 1], got {}", s.w_tx)));
        }
        non_negative("sim.w_a", s.w_a)?;
        positive("sim.c", s.c)?;
        non_negative("sim.rho1", s.rho1)?;
        non_negative("sim.rho2", s.rho2)?;
        at_least_one("sim.s_v", s.s_v as u64)?;
        if let Some(d) = s.lookahead_slots {
            at_least_one("sim.lookahead_slots", d as u64)?;
        }

        if let Some(axis) = self.sweep.axis {
            for v in &self.sweep.values {
                let mut probe = self.clone();
                axis.apply(&mut probe, &v.to_string())?;
                probe.sweep.axis = None;
                probe.validate().map_err(|err| match err {
                    ConfigError::Invalid { field, reason } => {
                        invalid("sweep.values", format!("value {v} makes {field} invalid: {reason}"))
                    }
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    /// The resolved configuration as TOML, without the output directory.
    pub fn manifest(&self) -> String {
        let mut c = self.clone();
        c.experiment.out_dir = None;
        toml::to_string(&c).expect("config serializes")
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        let r = &self.radio;
        GridSpec::new(Point::new(r.origin_x_m, r.origin_y_m), r.cell_size_m, r.width, r.height)
            .map_err(|e| invalid("radio", e.to_string()))
    }

    pub fn radio_config(&self) -> Result<RadioConfig, ConfigError> {
        let r = &self.radio;
        let budget = LinkBudget {
            carrier_freq_hz: r.carrier_freq_hz,
            bandwidth_hz: r.bandwidth_hz,
            tx_power_dbm: r.tx_power_dbm,
            noise_figure_db: r.noise_figure_db,
            bs_height_m: r.bs_height_m,
            vehicle_height_m: r.vehicle_height_m,
            shadowing_std_db: r.shadowing_std_db,
            decorrelation_m: r.decorrelation_m,
        };
        budget.validate().map_err(|e| invalid("radio", e.to_string()))?;
        Ok(RadioConfig {
            grid: self.grid()?,
            inter_site_distance: r.inter_site_distance_m,
            site_phase: match r.site_phase {
                SitePhaseName::Centered => SitePhase::Centered,
                SitePhaseName::Random => SitePhase::Random,
            },
            budget,
            interference: match r.interference {
                InterferenceName::FullLoad => Interference::FullLoad,
                InterferenceName::Disabled => Interference::Disabled,
            },
            sectors: r.sectors,
        })
    }

    pub fn rem_mode(&self) -> RemMode {
        match self.rem.mode {
            RemModeName::GroundTruth => RemMode::GroundTruth,
            RemModeName::Estimated => RemMode::Estimated { per_sector: self.rem.samples_per_sector },
        }
    }

    pub fn data_config(&self) -> DataConfig {
        let d = &self.data;
        DataConfig {
            dim: d.dim,
            samples_per_vehicle: d.samples_per_vehicle,
            sigma_min: d.sigma_min,
            sigma_max: d.sigma_max,
            lambda: d.lambda,
        }
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig {
        let s = &self.sim;
        SimConfig {
            tau: s.tau_s,
            k_max: s.k_max_s,
            t_cpu_min: s.t_cpu_min,
            max_scheduled: s.max_scheduled,
            rounds: s.rounds,
            horizon_s: s.horizon_s,
            b_bits: s.b_bits,
            weights: SchedulerWeights { w_tx: s.w_tx, w_a: s.w_a },
            proxy: ProxyConstants { c: s.c, rho1: s.rho1, rho2: s.rho2 },
            s_v: s.s_v,
            policy: s.policy.into(),
            compute: s.compute.into(),
            lookahead_slots: s.lookahead_slots,
            seed,
        }
    }

    /// Slots of trajectory the run can consume.
    pub fn horizon_slots(&self) -> u64 {
        let sim = self.sim_config(0);
        let by_rounds = sim.required_slots();
        match self.sim.horizon_s {
            Some(h) => by_rounds.min((h / self.sim.tau_s).ceil() as u64 + 2 * sim.round_slots() as u64),
            None => by_rounds,
        }
    }

    pub fn mobility_config(&self, bounds: Bounds, seed: u64) -> MobilityConfig {
        let m = &self.mobility;
        MobilityConfig {
            bounds,
            block_m: m.block_m,
            speed_min: m.speed_min_mps,
            speed_max: m.speed_max_mps,
            n_vehicles: m.n_vehicles,
            seed,
            horizon_slots: self.horizon_slots(),
            slot_s: self.sim.tau_s,
        }
    }

    /// Sweep values as strings, in file order.
    pub fn sweep_values(&self) -> Vec<String> {
        self.sweep.values.iter().map(|v| v.to_string()).collect()
    }
}

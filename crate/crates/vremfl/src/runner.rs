//! Environment assembly and experiment execution.
//!
//! Seeds run on worker threads; results come back in (value, seed) order,
//! so every output file is independent of scheduling.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;
use vremfl_core::mobility::{interpolate_traces, synth_trajectories, Trajectory};
use vremfl_core::rem::{BitrateTable, Channel, SinrGrid};
use vremfl_core::sim::{run_experiment, Environment, ExperimentMetrics, FlData, RadioMaps, RateMap, RemMode, SimError};

use crate::config::{Config, ConfigError, MobilityModel, SweepAxis};
use crate::formats::{self, FormatError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl RunError {
    /// 2 for configuration problems, 3 for everything found while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, RunError> {
    File::open(path).map(BufReader::new).map_err(|source| RunError::Io { path: path.into(), source })
}

fn fmt_err(path: &Path) -> impl FnOnce(FormatError) -> RunError + '_ {
    move |source| RunError::Format { path: path.into(), source }
}

/// Writes `path` through a buffered writer, creating parent directories.
pub fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> Result<(), FormatError>,
) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.into(), source })?;
    }
    let file = File::create(path).map_err(|source| RunError::Io { path: path.into(), source })?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(fmt_err(path))?;
    w.flush().map_err(|source| RunError::Io { path: path.into(), source })
}

pub fn channel(cfg: &Config) -> Result<Channel, RunError> {
    let table = match &cfg.radio.bitrate_table {
        Some(p) => formats::read_bitrate_table(open(p)?).map_err(fmt_err(p))?,
        None => BitrateTable::default(),
    };
    Ok(Channel { table, bandwidth_hz: cfg.radio.bandwidth_hz, rescale: cfg.radio.rescale })
}

fn load_raster(path: &Path, cfg: &Config) -> Result<SinrGrid, RunError> {
    let rem = formats::read_raster(open(path)?).map_err(fmt_err(path))?;
    if *rem.spec() != cfg.grid()? {
        return Err(RunError::Input(format!("{}: raster grid does not match [radio]", path.display())));
    }
    Ok(rem)
}

/// Ground truth and the map vehicles bid against.
pub struct Maps {
    pub radio: RadioMaps,
    pub estimate: SinrGrid,
}

pub fn build_maps(cfg: &Config, seed: u64) -> Result<Maps, RunError> {
    let radio_cfg = cfg.radio_config()?;
    let mut radio = RadioMaps::build(&radio_cfg, seed)?;
    if let Some(p) = &cfg.rem.truth_file {
        radio.truth = load_raster(p, cfg)?;
    }
    let estimate = match &cfg.rem.estimate_file {
        Some(p) => load_raster(p, cfg)?,
        None => radio.estimate(&radio_cfg, cfg.rem_mode(), seed)?,
    };
    Ok(Maps { radio, estimate })
}

/// Estimated maps for each configured sample count.
pub fn estimates(cfg: &Config, maps: &RadioMaps, seed: u64) -> Result<Vec<(usize, SinrGrid)>, RunError> {
    let radio_cfg = cfg.radio_config()?;
    cfg.rem
        .sample_counts
        .iter()
        .map(|&k| Ok((k, maps.estimate(&radio_cfg, RemMode::Estimated { per_sector: k }, seed)?)))
        .collect()
}

pub fn trajectories(cfg: &Config, seed: u64) -> Result<Vec<Trajectory>, RunError> {
    let bounds = cfg.grid()?.bounds();
    match cfg.mobility.model {
        MobilityModel::WaypointGrid => {
            synth_trajectories(&cfg.mobility_config(bounds, seed)).map_err(|e| RunError::Sim(e.into()))
        }
        MobilityModel::TraceFile => {
            let p = cfg.mobility.trace_file.as_ref().expect("validated");
            let fixes = formats::read_traces(open(p)?).map_err(fmt_err(p))?;
            let load = interpolate_traces(&fixes, cfg.sim.tau_s, &bounds).map_err(|e| RunError::Sim(e.into()))?;
            if load.trajectories.is_empty() {
                return Err(RunError::Input(format!("{}: no vehicle has a usable trajectory", p.display())));
            }
            Ok(load.trajectories)
        }
    }
}

pub fn build_environment(cfg: &Config, seed: u64) -> Result<Environment, RunError> {
    let ch = channel(cfg)?;
    let maps = build_maps(cfg, seed)?;
    let trajs = trajectories(cfg, seed)?;
    let ids: Vec<u32> = trajs.iter().map(|t| t.vehicle_id).collect();
    let data = FlData::build(&cfg.data_config(), &ids, seed)?;
    Ok(Environment::new(RateMap::new(&maps.radio.truth, &ch), RateMap::new(&maps.estimate, &ch), trajs, data)?)
}

/// One experiment of a sweep.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub value: String,
    pub seed: u64,
    pub metrics: ExperimentMetrics,
    pub env: Option<std::sync::Arc<Environment>>,
}

/// Maps `f` over `items` on up to `available_parallelism` threads, keeping
/// input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every item ran")).collect()
}

/// Runs `cfg` once per seed and, when `axis` is given, once per value.
/// Output is value-major, seeds in the given order. `keep_env` retains the
/// environment of each run for later dumps.
pub fn run_sweep(
    cfg: &Config,
    axis: Option<SweepAxis>,
    values: &[String],
    seeds: &[u64],
    keep_env: bool,
) -> Result<Vec<RunOutput>, RunError> {
    let values: Vec<String> = if axis.is_some() { values.to_vec() } else { vec![String::new()] };
    let mut variants = Vec::with_capacity(values.len());
    for v in &values {
        let mut c = cfg.clone();
        if let Some(a) = axis {
            a.apply(&mut c, v)?;
        }
        c.sweep.axis = None;
        c.validate()?;
        variants.push(c);
    }
    let shared_env = axis.is_none_or(|a| !a.affects_environment());

    let per_seed = par_map(seeds, |&seed| -> Result<Vec<RunOutput>, RunError> {
        let mut out = Vec::with_capacity(variants.len());
        let mut env = None;
        for (c, v) in variants.iter().zip(&values) {
            if env.is_none() || !shared_env {
                env = Some(std::sync::Arc::new(build_environment(c, seed)?));
            }
            let e = env.as_ref().unwrap();
            let metrics = run_experiment(e, &c.sim_config(seed))?;
            out.push(RunOutput { value: v.clone(), seed, metrics, env: keep_env.then(|| e.clone()) });
        }
        Ok(out)
    });
    let per_seed: Vec<Vec<RunOutput>> = per_seed.into_iter().collect::<Result<_, _>>()?;
    let mut columns: Vec<std::vec::IntoIter<RunOutput>> = per_seed.into_iter().map(Vec::into_iter).collect();
    let mut out = Vec::with_capacity(values.len() * seeds.len());
    for _ in 0..values.len() {
        for col in columns.iter_mut() {
            out.push(col.next().expect("one run per value"));
        }
    }
    Ok(out)
}

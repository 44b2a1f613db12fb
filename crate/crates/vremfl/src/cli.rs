//! Command-line interface.
//!
//! Every command writes `manifest.toml` with the fully resolved
//! configuration, command-line overrides included, so
//! `<command> --config OUT/manifest.toml --out OTHER` reproduces OUT
//! byte for byte.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use vremfl_core::scheduler::Policy;

use crate::config::{parse_policy, Config, ConfigError, SweepAxis, SweepValue};
use crate::formats::{self, Labelled};
use crate::runner::{self, RunError, RunOutput};

#[derive(Debug, Parser)]
#[command(name = "vremfl", version, about = "Federated learning over vehicles on a radio environment map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed to run; repeat for several. Overrides `experiment.seeds`.
    #[arg(long = "seed", value_name = "N")]
    seeds: Vec<u64>,
    /// Output directory. Overrides `experiment.out_dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the ground-truth map and one estimate per sample count.
    GenerateRem {
        #[command(flatten)]
        common: Common,
    },
    /// Run one experiment per seed.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scheduling policy. Overrides `sim.policy`.
        #[arg(long, value_name = "NAME")]
        policy: Option<String>,
    },
    /// Run several policies on the same environments.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Policy to include; repeat for several. Overrides `experiment.policies`.
        #[arg(long = "policy", value_name = "NAME")]
        policies: Vec<String>,
    },
    /// Vary one parameter over a list of values.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// policy, w_tx, m, rem_samples, lambda or compute. Overrides `sweep.axis`.
        #[arg(long, value_name = "NAME")]
        axis: Option<String>,
        /// Comma-separated values. Overrides `sweep.values`.
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        values: Vec<String>,
        /// Policy for every run of the sweep. Overrides `sim.policy`.
        #[arg(long, value_name = "NAME")]
        policy: Option<String>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let kind = if e.exit_code() == 2 { "config error" } else { "error" };
            eprintln!("vremfl: {kind}: {e}");
            e.exit_code()
        }
    }
}

fn config_err(field: &str, reason: impl Into<String>) -> RunError {
    RunError::Config(ConfigError::Invalid { field: field.into(), reason: reason.into() })
}

/// Loads the config, applies the shared flags and resolves the output dir.
fn prepare(common: &Common) -> Result<(Config, PathBuf), RunError> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if !common.seeds.is_empty() {
        cfg.experiment.seeds = common.seeds.clone();
    }
    let out =
        common.out.clone().or_else(|| cfg.experiment.out_dir.clone()).ok_or_else(|| {
            config_err("experiment.out_dir", "no output directory; pass --out or set it in the config")
        })?;
    cfg.validate()?;
    Ok((cfg, out))
}

fn write_manifest(out: &Path, cfg: &Config) -> Result<(), RunError> {
    let text = cfg.manifest();
    runner::write_file(&out.join("manifest.toml"), |w| Ok(std::io::Write::write_all(w, text.as_bytes())?))
}

fn dispatch(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::GenerateRem { common } => {
            let (cfg, out) = prepare(&common)?;
            write_manifest(&out, &cfg)?;
            generate_rem(&cfg, &out)
        }
        Command::Run { common, policy } => {
            let (mut cfg, out) = prepare(&common)?;
            if let Some(p) = policy {
                cfg.sim.policy = parse_policy(&p)?.into();
            }
            write_manifest(&out, &cfg)?;
            let runs = runner::run_sweep(&cfg, None, &[], &cfg.experiment.seeds, cfg.experiment.dump_dataset)?;
            let policy: Policy = cfg.sim.policy.into();
            for r in &runs {
                write_run(&out.join(format!("seed_{}", r.seed)), r, policy)?;
                println!(
                    "seed {}: {} rounds, {} s, {} tx slots, {} GD steps, final dist_sq {}",
                    r.seed,
                    r.metrics.records.len(),
                    r.metrics.total_latency_s(),
                    r.metrics.total_tx_slots(),
                    r.metrics.total_gd_steps(),
                    r.metrics.final_dist_sq()
                );
            }
            Ok(())
        }
        Command::Compare { common, policies } => {
            let (mut cfg, out) = prepare(&common)?;
            if !policies.is_empty() {
                cfg.experiment.policies =
                    policies.iter().map(|p| parse_policy(p).map(Into::into)).collect::<Result<_, _>>()?;
            }
            if cfg.experiment.policies.len() < 2 {
                return Err(config_err("experiment.policies", "compare needs at least two policies"));
            }
            write_manifest(&out, &cfg)?;
            let names: Vec<String> =
                cfg.experiment.policies.iter().map(|p| Policy::from(*p).name().to_string()).collect();
            let runs = runner::run_sweep(&cfg, Some(SweepAxis::Policy), &names, &cfg.experiment.seeds, false)?;
            write_sweep(&out, "compare", "policy", &runs)
        }
        Command::Sweep { common, axis, values, policy } => {
            let (mut cfg, out) = prepare(&common)?;
            if let Some(a) = axis {
                cfg.sweep.axis = Some(SweepAxis::from_name(&a)?);
            }
            if !values.is_empty() {
                cfg.sweep.values = values.into_iter().map(SweepValue::Text).collect();
            }
            if let Some(p) = policy {
                cfg.sim.policy = parse_policy(&p)?.into();
            }
            let axis = cfg.sweep.axis.ok_or_else(|| config_err("sweep.axis", "pass --axis or set it in the config"))?;
            if cfg.sweep.values.is_empty() {
                return Err(config_err("sweep.values", "pass --values or set them in the config"));
            }
            cfg.validate()?;
            write_manifest(&out, &cfg)?;
            let runs = runner::run_sweep(&cfg, Some(axis), &cfg.sweep_values(), &cfg.experiment.seeds, false)?;
            write_sweep(&out, "sweep", axis.name(), &runs)
        }
    }
}

fn generate_rem(cfg: &Config, out: &Path) -> Result<(), RunError> {
    let seeds = &cfg.experiment.seeds;
    let built = runner::par_map(seeds, |&seed| -> Result<_, RunError> {
        let maps = runner::build_maps(cfg, seed)?;
        let est = runner::estimates(cfg, &maps.radio, seed)?;
        Ok((maps, est))
    });
    for (seed, b) in seeds.iter().zip(built) {
        let (maps, est) = b?;
        let dir = out.join(format!("seed_{seed}"));
        runner::write_file(&dir.join("truth.rem"), |w| Ok(formats::write_raster(w, &maps.radio.truth)?))?;
        runner::write_file(&dir.join("prior.rem"), |w| Ok(formats::write_raster(w, &maps.radio.prior)?))?;
        for (k, rem) in &est {
            runner::write_file(&dir.join(format!("estimate_{k}.rem")), |w| Ok(formats::write_raster(w, rem)?))?;
        }
        runner::write_file(&dir.join("sites.csv"), |w| {
            writeln!(w, "x_m,y_m")?;
            for p in maps.radio.layout.positions() {
                writeln!(w, "{},{}", p.x, p.y)?;
            }
            Ok(())
        })?;
        println!("seed {seed}: {} sites, {} estimates in {}", maps.radio.layout.len(), est.len(), dir.display());
    }
    Ok(())
}

fn write_run(dir: &Path, r: &RunOutput, policy: Policy) -> Result<(), RunError> {
    let recs = &r.metrics.records;
    runner::write_file(&dir.join("metrics.csv"), |w| formats::write_metrics(w, recs))?;
    runner::write_file(&dir.join("bids.csv"), |w| formats::write_bids(w, recs))?;
    let summary = formats::summary(&r.metrics, policy, r.seed);
    runner::write_file(&dir.join("summary.txt"), |w| Ok(w.write_all(summary.as_bytes())?))?;
    if let Some(env) = &r.env {
        let ds: Vec<_> = env.data.tasks.iter().map(|t| t.dataset()).collect();
        runner::write_file(&dir.join("dataset.csv"), |w| formats::write_dataset(w, &ds))?;
    }
    Ok(())
}

fn write_sweep(out: &Path, stem: &str, axis: &str, runs: &[RunOutput]) -> Result<(), RunError> {
    let labelled: Vec<Labelled<'_>> =
        runs.iter().map(|r| Labelled { value: &r.value, seed: r.seed, metrics: &r.metrics }).collect();
    runner::write_file(&out.join(format!("{stem}_series.csv")), |w| formats::write_series(w, axis, &labelled))?;
    runner::write_file(&out.join(format!("{stem}_totals.csv")), |w| formats::write_totals(w, axis, &labelled))?;
    runner::write_file(&out.join(format!("{stem}_medians.csv")), |w| formats::write_medians(w, axis, &labelled))?;
    for r in runs {
        println!(
            "{axis} {} seed {}: {} s, {} tx slots, {} GD steps, final dist_sq {}",
            r.value,
            r.seed,
            r.metrics.total_latency_s(),
            r.metrics.total_tx_slots(),
            r.metrics.total_gd_steps(),
            r.metrics.final_dist_sq()
        );
    }
    Ok(())
}

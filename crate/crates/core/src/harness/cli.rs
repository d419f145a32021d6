//! Command-line front end. Exit codes: 0 success, 1 invalid input or failed check, 2 blow-up.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use super::checkpoint::Checkpoint;
use super::config::{load_config, RunConfig};
use super::output::{series_csv, with_workers, RunManifest, Summary};
use super::smooth_bump;
use super::verify::{format_table, run_verify_suite};
use crate::coupling::{d_n, shifted_flow_check, CouplingConfig, CouplingRecord, CouplingStepper};
use crate::dynamics::{energy, FlowStepper, SimConfig};
use crate::ergodics::{
    birkhoff_average, cadence_stride, continue_observing, observable_registry, observe_trajectory, record_observables,
    two_start_convergence, ObservableSeries, TwoStartPlan, OBSERVABLE_XALPHA,
};
use crate::error::{Error, Result};
use crate::noise::stationary_moment_report;
use crate::spectral::PairField;

#[derive(Parser, Debug)]
#[command(name = "sdnlw", version, about = "Stochastic damped nonlinear wave laboratory on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trajectory and write its observable series.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Write a checkpoint of the final state here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Monte Carlo moments of the stochastic convolution against the stationary law.
    StickStats {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long = "N", default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Couple the flows from 0 and a perturbed start through the Girsanov shift.
    Couple {
        #[command(flatten)]
        run: RunArgs,
        /// Amplitude of the smooth bump added to the second start.
        #[arg(long, default_value_t = 0.5)]
        u2_perturbation: f64,
        /// Stopping threshold M; omitted means never stop.
        #[arg(long)]
        threshold: Option<f64>,
        /// Also simulate the shifted flow and report the identity residual.
        #[arg(long)]
        residual_check: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Compare long-run averages from two starts over a seed ensemble.
    Ergodic {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        bump: f64,
        /// Skip the coupled d_n estimate.
        #[arg(long)]
        no_coupling: bool,
    },
    /// Check the analytic identities and print a table.
    Verify,
    /// Continue a run from a checkpoint.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        /// New horizon.
        #[arg(long = "T")]
        horizon: f64,
        /// Step size of the continuation; must equal the stored one.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        observables: Option<Vec<String>>,
        /// Write a checkpoint of the final state here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
        }
        if let Some(t) = self.horizon {
            cfg.sim.horizon = t;
        }
        if let Some(dt) = self.dt {
            cfg.sim.dt = dt;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        cfg.sim.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Simulate { run, checkpoint } => simulate(&run.resolve()?, checkpoint.as_deref()),
        Command::StickStats { s, n, samples, seed, output_dir } => stick_stats(s, n, samples, seed, output_dir),
        Command::Couple { run, u2_perturbation, threshold, residual_check, checkpoint } => {
            couple(&run.resolve()?, u2_perturbation, threshold, residual_check, checkpoint.as_deref())
        }
        Command::Ergodic { run, seeds, burn_in, bump, no_coupling } => {
            ergodic(&run.resolve()?, seeds, burn_in, bump, no_coupling)
        }
        Command::Verify => verify(),
        Command::Resume { checkpoint, horizon, dt, output_dir, observables, save } => {
            resume(&checkpoint, horizon, dt, output_dir, observables, save.as_deref())
        }
    }
}

const CADENCE: f64 = 0.25;

fn simulate(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<i32> {
    let sim = cfg.sim;
    let observables = observable_registry(sim.alpha).select(&cfg.observables)?;
    let mut manifest = RunManifest::start("simulate", cfg, vec![sim.seed]);
    let stepper = FlowStepper::new(sim)?;
    let (state, series) = observe_trajectory(&stepper, PairField::zeros(sim.grid()?), sim.horizon, CADENCE, &observables)?;
    let averages = averages_of(&series, state.t)?;
    manifest.emit(&cfg.output_dir, "series.csv", series_csv(&series)?.as_bytes())?;
    let body = json!({ "t": state.t, "steps": state.step, "energy": energy(&state.v), "averages": averages });
    let summary = Summary::new("simulate", cfg, &body)?;
    manifest.emit(&cfg.output_dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
    if let Some(path) = checkpoint {
        Checkpoint::Flow(state.clone()).save(path)?;
    }
    manifest.finish(&cfg.output_dir)?;
    println!("simulate: t = {:.6}, steps = {}, E(v) = {:.6e}", state.t, state.step, energy(&state.v));
    Ok(0)
}

fn averages_of(series: &[ObservableSeries], t: f64) -> Result<serde_json::Map<String, serde_json::Value>> {
    let mut out = serde_json::Map::new();
    for s in series {
        let value = if s.len() > 1 && t > s.times[0] { birkhoff_average(s, t)? } else { s.values[0] };
        out.insert(s.name.clone(), json!(value));
    }
    Ok(out)
}

fn stick_stats(s: f64, n: usize, samples: usize, seed: u64, output_dir: Option<PathBuf>) -> Result<i32> {
    let report = stationary_moment_report(s, n, samples, seed)?;
    let drifting = report.drifting_modes().count();
    println!("stick-stats: s = {s}, N = {n}, samples = {samples}, modes = {}, drifting = {drifting}", report.modes.len());
    if let Some(dir) = output_dir {
        let cfg = RunConfig { sim: SimConfig { s, seed, ..SimConfig::with_n(n) }, ..RunConfig::default() };
        let mut manifest = RunManifest::start("stick-stats", &cfg, vec![seed]);
        let summary = Summary::new("stick-stats", &cfg, &report)?;
        manifest.emit(&dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
        manifest.finish(&dir)?;
    }
    Ok(0)
}

fn couple(
    cfg: &RunConfig,
    amplitude: f64,
    threshold: Option<f64>,
    residual_check: bool,
    checkpoint: Option<&Path>,
) -> Result<i32> {
    let sim = cfg.sim;
    let grid = sim.grid()?;
    let cc = CouplingConfig::default();
    let u1 = PairField::zeros(grid);
    let u2 = smooth_bump(grid, amplitude)?;
    let mut rec = CouplingRecord::new(u1.clone(), u2.clone(), sim, cc)?;
    if let Some(m) = threshold {
        rec = rec.with_monitor(m)?;
    }
    let stepper = CouplingStepper::new(sim)?;
    let names = ["w_h1", "gap_h1", "d_1", "hcost", "log_density", "epsilon"];
    let mut cols: Vec<ObservableSeries> = names.iter().map(|n| ObservableSeries::new(*n)).collect();
    let stride = ((CADENCE / sim.dt).round() as u64).max(1);
    let sample = |rec: &CouplingRecord, cols: &mut [ObservableSeries]| -> Result<()> {
        let gap = &rec.diff_linear + &rec.w;
        let values = [
            rec.w.h1_norm(),
            gap.h1_norm(),
            d_n(&gap, &PairField::zeros(grid), 1, sim.alpha, &OBSERVABLE_XALPHA)?,
            rec.hcost,
            rec.log_density,
            rec.last_epsilon,
        ];
        for (c, v) in cols.iter_mut().zip(values) {
            c.push(rec.t(), v);
        }
        Ok(())
    };
    sample(&rec, &mut cols)?;
    for _ in 0..sim.steps() {
        stepper.step(&mut rec)?;
        if rec.reference.step % stride == 0 {
            sample(&rec, &mut cols)?;
        }
    }
    let residual = if residual_check {
        let r = shifted_flow_check(&u1, &u2, sim, &cc, sim.horizon)?;
        Some(json!({ "final": r.final_residual(), "max_relative": r.max_relative() }))
    } else {
        None
    };
    let mut manifest = RunManifest::start("couple", cfg, vec![sim.seed]);
    manifest.emit(&cfg.output_dir, "coupling.csv", series_csv(&cols)?.as_bytes())?;
    let body = json!({
        "t": rec.t(),
        "u2_perturbation": amplitude,
        "hcost": rec.hcost,
        "log_density": rec.log_density,
        "w_h1": rec.w.h1_norm(),
        "stopped_at": rec.monitor.stopped_at,
        "shifted_flow_residual": residual,
    });
    let summary = Summary::new("couple", cfg, &body)?;
    manifest.emit(&cfg.output_dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
    if let Some(path) = checkpoint {
        Checkpoint::Coupling(rec.clone()).save(path)?;
    }
    manifest.finish(&cfg.output_dir)?;
    println!("couple: t = {:.6}, h-cost = {:e}, |w| = {:.6e}", rec.t(), rec.hcost, rec.w.h1_norm());
    Ok(0)
}

fn ergodic(cfg: &RunConfig, seeds: u64, burn_in: Option<f64>, bump: f64, no_coupling: bool) -> Result<i32> {
    let sim = cfg.sim;
    let grid = sim.grid()?;
    let observables = observable_registry(sim.alpha).select(&cfg.observables)?;
    let seed_list: Vec<u64> = (0..seeds).map(|k| sim.seed + k).collect();
    let mut plan = TwoStartPlan::new(sim, seed_list.clone(), sim.horizon);
    if let Some(b) = burn_in {
        plan.burn_in = b;
    }
    if no_coupling {
        plan.coupling = None;
    }
    let u2 = smooth_bump(grid, bump)?;
    let report = with_workers(|| two_start_convergence(&PairField::zeros(grid), &u2, &observables, &plan))??;
    let mut manifest = RunManifest::start("ergodic", cfg, seed_list);
    if !report.coupled_dn.is_empty() {
        let mut dn = ObservableSeries::new("coupled_dn");
        for &(t, d) in &report.coupled_dn {
            dn.push(t, d);
        }
        manifest.emit(&cfg.output_dir, "coupled_dn.csv", series_csv(&[dn])?.as_bytes())?;
    }
    let summary = Summary::new("ergodic", cfg, &report)?;
    manifest.emit(&cfg.output_dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
    manifest.finish(&cfg.output_dir)?;
    for c in &report.comparisons {
        println!(
            "ergodic: {:<16} avg1 = {:.6e}  avg2 = {:.6e}  diff = {:.3e}  stderr = {:.3e}  z = {:.2}",
            c.name, c.start1.mean, c.start2.mean, c.difference, c.combined_stderr, c.z_score()
        );
    }
    if let Some(d) = report.final_dn() {
        println!("ergodic: coupled d_n at T = {d:.3e}");
    }
    Ok(0)
}

fn verify() -> Result<i32> {
    let checks = run_verify_suite()?;
    print!("{}", format_table(&checks));
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
}

fn resume(
    path: &Path,
    horizon: f64,
    dt: Option<f64>,
    output_dir: Option<PathBuf>,
    observables: Option<Vec<String>>,
    save: Option<&Path>,
) -> Result<i32> {
    let cp = Checkpoint::load(path)?;
    let stored = *cp.config();
    let requested = SimConfig { dt: dt.unwrap_or(stored.dt), horizon, ..stored };
    cp.check_resume(&requested)?;
    if horizon < cp.t() {
        return Err(Error::InvalidArgument(format!("horizon {horizon} lies before the checkpoint time {}", cp.t())));
    }
    let mut cfg = RunConfig { sim: requested, ..RunConfig::default() };
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    if let Some(obs) = observables {
        cfg.observables = obs;
    }
    let mut manifest = RunManifest::start("resume", &cfg, vec![requested.seed]);
    let next = match cp {
        Checkpoint::Flow(mut state) => {
            state.config = requested;
            let obs = observable_registry(requested.alpha).select(&cfg.observables)?;
            let stepper = FlowStepper::new(requested)?;
            let mut series: Vec<ObservableSeries> = obs.iter().map(|o| ObservableSeries::new(o.name())).collect();
            if state.step % cadence_stride(CADENCE, requested.dt)? == 0 {
                record_observables(&state, &obs, &mut series);
            }
            continue_observing(&stepper, &mut state, horizon, CADENCE, &obs, &mut series)?;
            manifest.emit(&cfg.output_dir, "series.csv", series_csv(&series)?.as_bytes())?;
            let body = json!({ "t": state.t, "steps": state.step, "energy": energy(&state.v) });
            let summary = Summary::new("resume", &cfg, &body)?;
            manifest.emit(&cfg.output_dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
            println!("resume: t = {:.6}, steps = {}, E(v) = {:.6e}", state.t, state.step, energy(&state.v));
            Checkpoint::Flow(state)
        }
        Checkpoint::Coupling(mut rec) => {
            rec.reference.config = requested;
            let stepper = CouplingStepper::with_noise(
                requested,
                crate::dynamics::NoiseSource::for_config(&requested)?,
                &rec.config,
            )?;
            let remaining = ((horizon - rec.t()) / requested.dt - 1e-9).ceil().max(0.0) as u64;
            for _ in 0..remaining {
                stepper.step(&mut rec)?;
            }
            let body = json!({ "t": rec.t(), "hcost": rec.hcost, "log_density": rec.log_density, "w_h1": rec.w.h1_norm() });
            let summary = Summary::new("resume", &cfg, &body)?;
            manifest.emit(&cfg.output_dir, "summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
            println!("resume: t = {:.6}, h-cost = {:e}", rec.t(), rec.hcost);
            Checkpoint::Coupling(rec)
        }
    };
    if let Some(path) = save {
        next.save(path)?;
    }
    manifest.finish(&cfg.output_dir)?;
    Ok(0)
}

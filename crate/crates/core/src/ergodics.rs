//! Time averages, ensemble statistics and convergence experiments.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{d_n, CouplingConfig, CouplingRecord, CouplingStepper};
use crate::dynamics::{FlowState, FlowStepper, NoiseSource, SimConfig};
use crate::error::{Error, Result};
use crate::propagator::{weighted_sup_norm, XAlphaConfig};
use crate::spectral::{lp_mean_norm, pair_norm, PairField};

/// Exponent of the Lebesgue norm in the Z-proxy.
pub const Z_PROXY_EXPONENT: f64 = 16.0;

/// Cheap time grid used by observables that need an `X^α` norm.
pub const OBSERVABLE_XALPHA: XAlphaConfig = XAlphaConfig { t_star: 8.0, dt: 0.5, pad: 2 };

pub type ObservableFn = Arc<dyn Fn(&PairField) -> f64 + Send + Sync>;

/// A named real functional of the state.
#[derive(Clone)]
pub struct Observable {
    name: String,
    f: ObservableFn,
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl Fn(&PairField) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, state: &PairField) -> f64 {
        (self.f)(state)
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).finish()
    }
}

/// Named observables, with the built-ins preinstalled.
#[derive(Clone, Debug)]
pub struct ObservableRegistry {
    entries: BTreeMap<String, Observable>,
}

impl ObservableRegistry {
    /// `mean_u`, `mean_u2`, `mean_u4`, `clipped_h_alpha` and `dn_ref` (to the zero state, `n = 1`).
    pub fn builtin(alpha: f64) -> Self {
        let mut reg = Self { entries: BTreeMap::new() };
        reg.register(Observable::new("mean_u", |v| v.u.mean()));
        reg.register(Observable::new("mean_u2", |v| v.u.l2_norm().powi(2)));
        reg.register(Observable::new("mean_u4", |v| lp_mean_norm(&v.u.physical(), 4.0).powi(4)));
        reg.register(Observable::new("clipped_h_alpha", move |v| pair_norm(v, alpha, 2.0).min(1.0)));
        reg.with_reference(PairField::zeros(crate::spectral::SpectralGrid::with_default_resolution(1)), 1, alpha)
    }

    /// Replaces `dn_ref` by `d_n(·, reference)`; grids are matched at evaluation time.
    pub fn with_reference(mut self, reference: PairField, n: u32, alpha: f64) -> Self {
        self.register(Observable::new("dn_ref", move |v| {
            let r = if reference.grid() == v.grid() { reference.clone() } else { PairField::zeros(v.grid()) };
            d_n(v, &r, n, alpha, &OBSERVABLE_XALPHA).unwrap_or(f64::NAN)
        }));
        self
    }

    pub fn register(&mut self, observable: Observable) {
        self.entries.insert(observable.name.clone(), observable);
    }

    pub fn get(&self, name: &str) -> Result<Observable> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Observable>> {
        names.iter().map(|n| self.get(n.as_ref())).collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// The built-in observables at regularity `alpha`.
pub fn observable_registry(alpha: f64) -> ObservableRegistry {
    ObservableRegistry::builtin(alpha)
}

/// Values of one observable at increasing sample times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), times: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(1/(t - t₀)) ∫_{t₀}^{t} F` at every sample time, by the trapezoid rule; the
    /// first entry is the first value.
    pub fn running_average(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut integral = 0.0;
        for i in 0..self.len() {
            if i == 0 {
                out.push(self.values[0]);
                continue;
            }
            integral += 0.5 * (self.values[i] + self.values[i - 1]) * (self.times[i] - self.times[i - 1]);
            out.push(integral / (self.times[i] - self.times[0]));
        }
        out
    }

    /// Values at times `≥ t_min`.
    pub fn after(&self, t_min: f64) -> &[f64] {
        let start = self.times.partition_point(|&t| t < t_min);
        &self.values[start..]
    }
}

/// `(1/(T - t₀)) ∫_{t₀}^{T} F` by the trapezoid rule, interpolating linearly inside the last interval.
pub fn birkhoff_average(series: &ObservableSeries, horizon: f64) -> Result<f64> {
    let (Some(&t0), Some(&t_last)) = (series.times.first(), series.times.last()) else {
        return Err(Error::InvalidArgument("empty observable series".into()));
    };
    if !(horizon > t0) || horizon > t_last + 1e-9 * t_last.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "average horizon {horizon} outside the sampled interval ({t0}, {t_last}]"
        )));
    }
    let mut integral = 0.0;
    for i in 1..series.len() {
        let (ta, tb) = (series.times[i - 1], series.times[i]);
        let (fa, fb) = (series.values[i - 1], series.values[i]);
        if ta >= horizon {
            break;
        }
        if tb <= horizon {
            integral += 0.5 * (fa + fb) * (tb - ta);
        } else {
            let fh = fa + (fb - fa) * (horizon - ta) / (tb - ta);
            integral += 0.5 * (fa + fh) * (horizon - ta);
        }
    }
    Ok(integral / (horizon - t0))
}

/// Runs one trajectory and samples the observables at `t = 0`, every `cadence`, and at the end.
pub fn observe_trajectory(
    stepper: &FlowStepper,
    u0: PairField,
    horizon: f64,
    cadence: f64,
    observables: &[Observable],
) -> Result<(FlowState, Vec<ObservableSeries>)> {
    let mut state = stepper.start(u0)?;
    let mut series: Vec<ObservableSeries> = observables.iter().map(|o| ObservableSeries::new(o.name())).collect();
    record_observables(&state, observables, &mut series);
    continue_observing(stepper, &mut state, horizon, cadence, observables, &mut series)?;
    Ok((state, series))
}

/// Appends the current values of `observables` to `series`.
pub fn record_observables(state: &FlowState, observables: &[Observable], series: &mut [ObservableSeries]) {
    let full = state.full_flow();
    for (s, o) in series.iter_mut().zip(observables) {
        s.push(state.t, o.eval(&full));
    }
}

/// Steps to `t_end`, sampling whenever the step counter is a multiple of the cadence
/// and once more at the end if that landed off the grid.
/// Sample times therefore do not depend on where a run was restarted.
pub fn continue_observing(
    stepper: &FlowStepper,
    state: &mut FlowState,
    t_end: f64,
    cadence: f64,
    observables: &[Observable],
    series: &mut [ObservableSeries],
) -> Result<()> {
    let stride = cadence_stride(cadence, stepper.config().dt)?;
    let remaining = steps_for(t_end - state.t, stepper.config().dt);
    for _ in 0..remaining {
        stepper.step(state)?;
        if state.step % stride == 0 {
            record_observables(state, observables, series);
        }
    }
    if remaining > 0 && state.step % stride != 0 {
        record_observables(state, observables, series);
    }
    Ok(())
}

/// Number of steps between samples.
pub fn cadence_stride(cadence: f64, dt: f64) -> Result<u64> {
    if !(cadence > 0.0) {
        return Err(Error::InvalidArgument(format!("sampling cadence must be positive, got {cadence}")));
    }
    Ok(((cadence / dt).round() as u64).max(1))
}

fn steps_for(horizon: f64, dt: f64) -> u64 {
    (horizon / dt - 1e-9).ceil().max(0.0) as u64
}

/// Mean and error bar of one observable across an ensemble of stationary series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub name: String,
    pub members: usize,
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// Integrated autocorrelation time in units of the sampling interval.
    pub tau_int: f64,
    /// `samples / (2 τ_int)`.
    pub ess: f64,
    /// `sqrt(variance / ess)`.
    pub stderr: f64,
    /// Spread of per-member means, `sd / sqrt(members)`; `NaN` for one member.
    pub between_member_stderr: f64,
}

/// Window constant of the automatic windowing rule `W ≥ c τ_int(W)`.
const SOKAL_WINDOW: f64 = 5.0;

/// Pools the members' samples; autocorrelations are averaged across members.
pub fn summarize(name: impl Into<String>, members: &[&[f64]]) -> Result<EnsembleSummary> {
    let samples: usize = members.iter().map(|m| m.len()).sum();
    if samples < 2 || members.iter().any(|m| m.is_empty()) {
        return Err(Error::InvalidArgument("ensemble summary needs nonempty members and two samples".into()));
    }
    let mean = members.iter().flat_map(|m| m.iter()).sum::<f64>() / samples as f64;
    let max_lag = members.iter().map(|m| m.len()).max().unwrap_or(1) - 1;
    let acov = |lag: usize| -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for m in members.iter().filter(|m| m.len() > lag) {
            sum += (0..m.len() - lag).map(|t| (m[t] - mean) * (m[t + lag] - mean)).sum::<f64>();
            count += m.len();
        }
        sum / count.max(1) as f64
    };
    let c0 = acov(0);
    let variance = c0 * samples as f64 / (samples - 1) as f64;
    let mut tau = 0.5;
    if c0 > 0.0 {
        for lag in 1..=max_lag {
            tau += acov(lag) / c0;
            if lag as f64 >= SOKAL_WINDOW * tau {
                break;
            }
        }
    }
    let tau_int = tau.max(0.5);
    let ess = samples as f64 / (2.0 * tau_int);
    let member_means: Vec<f64> = members.iter().map(|m| m.iter().sum::<f64>() / m.len() as f64).collect();
    let between_member_stderr = if member_means.len() > 1 {
        let k = member_means.len() as f64;
        let mm = member_means.iter().sum::<f64>() / k;
        (member_means.iter().map(|x| (x - mm).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        f64::NAN
    };
    Ok(EnsembleSummary {
        name: name.into(),
        members: members.len(),
        samples,
        mean,
        variance,
        tau_int,
        ess,
        stderr: (variance / ess).sqrt(),
        between_member_stderr,
    })
}

/// Settings of a two-start experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStartPlan {
    /// Configuration shared by all runs; its seed is replaced per member.
    pub sim: SimConfig,
    pub seeds: Vec<u64>,
    pub horizon: f64,
    /// Samples before this time are discarded from averages.
    pub burn_in: f64,
    pub cadence: f64,
    /// Coupling used for the `d_n` upper bound; `None` skips it.
    pub coupling: Option<CouplingConfig>,
    pub dn_n: u32,
    /// Time between `d_n` evaluations of the coupled pair.
    pub dn_cadence: f64,
}

impl TwoStartPlan {
    pub fn new(sim: SimConfig, seeds: Vec<u64>, horizon: f64) -> Self {
        Self {
            sim,
            seeds,
            horizon,
            burn_in: horizon / 4.0,
            cadence: 0.25,
            coupling: Some(CouplingConfig::default()),
            dn_n: 10,
            dn_cadence: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableComparison {
    pub name: String,
    pub start1: EnsembleSummary,
    pub start2: EnsembleSummary,
    pub difference: f64,
    pub combined_stderr: f64,
}

impl ObservableComparison {
    pub fn z_score(&self) -> f64 {
        if self.combined_stderr > 0.0 {
            self.difference.abs() / self.combined_stderr
        } else if self.difference == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStartReport {
    pub comparisons: Vec<ObservableComparison>,
    /// `(t, mean over seeds of d_n(Φ_t(u1⁰, ξ), Φ_t(u2⁰, ξ + h)))`.
    pub coupled_dn: Vec<(f64, f64)>,
    /// Mean over seeds of `∫‖h‖²`.
    pub mean_hcost: Option<f64>,
}

impl TwoStartReport {
    pub fn final_dn(&self) -> Option<f64> {
        self.coupled_dn.last().map(|&(_, d)| d)
    }
}

struct MemberRun {
    series1: Vec<ObservableSeries>,
    series2: Vec<ObservableSeries>,
    dn: Vec<(f64, f64)>,
    hcost: f64,
}

/// Ensembles started from `u1⁰` and `u2⁰` with the same seeds, compared
/// through long-run averages, plus the coupled `d_n` from the shift construction.
pub fn two_start_convergence(
    u1: &PairField,
    u2: &PairField,
    observables: &[Observable],
    plan: &TwoStartPlan,
) -> Result<TwoStartReport> {
    if plan.seeds.is_empty() {
        return Err(Error::InvalidArgument("two-start experiment needs at least one seed".into()));
    }
    if !(plan.burn_in >= 0.0 && plan.burn_in < plan.horizon) {
        return Err(Error::InvalidArgument("burn-in must lie in [0, horizon)".into()));
    }
    let runs: Vec<Result<MemberRun>> =
        plan.seeds.par_iter().map(|&seed| run_member(u1, u2, observables, plan, seed)).collect();
    let runs: Vec<MemberRun> = runs.into_iter().collect::<Result<_>>()?;
    let mut comparisons = Vec::with_capacity(observables.len());
    for (j, o) in observables.iter().enumerate() {
        let a: Vec<&[f64]> = runs.iter().map(|r| r.series1[j].after(plan.burn_in)).collect();
        let b: Vec<&[f64]> = runs.iter().map(|r| r.series2[j].after(plan.burn_in)).collect();
        let start1 = summarize(o.name(), &a)?;
        let start2 = summarize(o.name(), &b)?;
        comparisons.push(ObservableComparison {
            name: o.name().to_string(),
            difference: start1.mean - start2.mean,
            combined_stderr: (start1.stderr.powi(2) + start2.stderr.powi(2)).sqrt(),
            start1,
            start2,
        });
    }
    let mut coupled_dn = Vec::new();
    let mut mean_hcost = None;
    if plan.coupling.is_some() {
        let k = runs.len() as f64;
        for (i, &(t, _)) in runs[0].dn.iter().enumerate() {
            coupled_dn.push((t, runs.iter().map(|r| r.dn[i].1).sum::<f64>() / k));
        }
        mean_hcost = Some(runs.iter().map(|r| r.hcost).sum::<f64>() / k);
    }
    Ok(TwoStartReport { comparisons, coupled_dn, mean_hcost })
}

fn run_member(
    u1: &PairField,
    u2: &PairField,
    observables: &[Observable],
    plan: &TwoStartPlan,
    seed: u64,
) -> Result<MemberRun> {
    let sim = SimConfig { seed, ..plan.sim };
    let stride = cadence_stride(plan.cadence, sim.dt)?;
    let dn_stride = cadence_stride(plan.dn_cadence, sim.dt)?;
    let steps = steps_for(plan.horizon, sim.dt);
    let record = |t: f64, full: &PairField, series: &mut Vec<ObservableSeries>| {
        for (s, o) in series.iter_mut().zip(observables) {
            s.push(t, o.eval(full));
        }
    };
    let fresh = || observables.iter().map(|o| ObservableSeries::new(o.name())).collect::<Vec<_>>();
    let (mut series1, mut series2) = (fresh(), fresh());
    let flow = FlowStepper::new(sim)?;
    let mut second = flow.start(u2.clone())?;
    record(0.0, &second.full_flow(), &mut series2);
    let mut dn = Vec::new();
    let mut hcost = 0.0;
    match plan.coupling {
        Some(cc) => {
            let stepper = CouplingStepper::with_noise(sim, NoiseSource::for_config(&sim)?, &cc)?;
            let mut rec = CouplingRecord::new(u1.clone(), u2.clone(), sim, cc)?;
            record(0.0, &rec.reference.full_flow(), &mut series1);
            dn.push((0.0, d_n(&rec.reference.full_flow(), &rec.coupled_flow(), plan.dn_n, sim.alpha, &OBSERVABLE_XALPHA)?));
            for k in 1..=steps {
                stepper.step(&mut rec)?;
                flow.step(&mut second)?;
                if k % stride == 0 {
                    record(rec.t(), &rec.reference.full_flow(), &mut series1);
                    record(second.t, &second.full_flow(), &mut series2);
                }
                if k % dn_stride == 0 {
                    let diff = &rec.diff_linear + &rec.w;
                    let d = d_n(&diff, &PairField::zeros(diff.grid()), plan.dn_n, sim.alpha, &OBSERVABLE_XALPHA)?;
                    dn.push((rec.t(), d));
                }
            }
            hcost = rec.hcost;
        }
        None => {
            let mut first = flow.start(u1.clone())?;
            record(0.0, &first.full_flow(), &mut series1);
            for k in 1..=steps {
                flow.step(&mut first)?;
                flow.step(&mut second)?;
                if k % stride == 0 {
                    record(first.t, &first.full_flow(), &mut series1);
                    record(second.t, &second.full_flow(), &mut series2);
                }
            }
        }
    }
    Ok(MemberRun { series1, series2, dn, hcost })
}

/// `sup_t e^{t/8} ‖S(t)Ψ‖_{𝒲^{α,16}}` on [`OBSERVABLE_XALPHA`], standing in for the Hölder-type norm of the stick.
pub fn z_proxy_norm(stick: &PairField, alpha: f64) -> Result<f64> {
    let cfg = OBSERVABLE_XALPHA;
    Ok(weighted_sup_norm(stick, alpha, Z_PROXY_EXPONENT, &cfg.time_grid(), cfg.t_star, cfg.pad)?.value())
}

/// One row of the tightness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TightnessRow {
    pub radius: f64,
    /// Fraction of samples with `‖Ψ‖_{Z-proxy} + ‖v‖_{ℋ^{1+α}} > R`.
    pub fraction: f64,
    pub fraction_times_radius: f64,
}

/// Exceedance fractions of `‖Ψ‖_{Z-proxy} + ‖v‖_{ℋ^{1+α}}` over a radius grid.
pub fn krylov_bogolyubov_diagnostic(states: &[FlowState], radii: &[f64], alpha: f64) -> Result<Vec<TightnessRow>> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("tightness diagnostic needs samples".into()));
    }
    let sizes: Vec<f64> = states
        .iter()
        .map(|s| Ok(z_proxy_norm(&s.stick.value, alpha)? + pair_norm(&s.v, 1.0 + alpha, 2.0)))
        .collect::<Result<_>>()?;
    Ok(radii
        .iter()
        .map(|&radius| {
            let fraction = sizes.iter().filter(|&&x| x > radius).count() as f64 / sizes.len() as f64;
            TightnessRow { radius, fraction, fraction_times_radius: fraction * radius }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralField, SpectralGrid};

    #[test]
    fn builtins_on_constants() {
        let reg = observable_registry(0.25);
        let g = SpectralGrid::with_default_resolution(2);
        let c = PairField::position(SpectralField::constant(g, 1.5));
        assert!((reg.get("mean_u").unwrap().eval(&c) - 1.5).abs() < 1e-15);
        assert!((reg.get("mean_u2").unwrap().eval(&c) - 2.25).abs() < 1e-14);
        assert!((reg.get("mean_u4").unwrap().eval(&c) - 1.5f64.powi(4)).abs() < 1e-12);
        assert_eq!(reg.get("clipped_h_alpha").unwrap().eval(&c), 1.0);
        assert_eq!(reg.get("dn_ref").unwrap().eval(&PairField::zeros(g)), 0.0);
        assert!(matches!(reg.get("energy"), Err(Error::UnknownObservable(_))));
        assert_eq!(reg.names().count(), 5);
    }

    #[test]
    fn birkhoff_of_constants_and_interpolation() {
        let mut s = ObservableSeries::new("one");
        for k in 0..=8 {
            s.push(k as f64 * 0.25, 1.0);
        }
        assert!((birkhoff_average(&s, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((birkhoff_average(&s, 1.1).unwrap() - 1.0).abs() < 1e-15);
        assert!(birkhoff_average(&s, 3.0).is_err());
        let mut lin = ObservableSeries::new("t");
        for k in 0..=4 {
            lin.push(k as f64, k as f64);
        }
        assert!((birkhoff_average(&lin, 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((birkhoff_average(&lin, 2.5).unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(*lin.running_average().last().unwrap(), 2.0);
    }

    #[test]
    fn summary_of_white_noise_has_unit_tau() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>() - 0.5).collect();
        let s = summarize("x", &[&xs]).unwrap();
        assert!((s.tau_int - 0.5).abs() < 0.1, "{s:?}");
        assert!((s.variance - 1.0 / 12.0).abs() < 0.003);
        assert!(s.mean.abs() < 5.0 * s.stderr);
    }

    #[test]
    fn summary_of_ar1_recovers_tau() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let phi: f64 = 0.8;
        let mut x = 0.0;
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                x = phi * x + rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal);
                x
            })
            .collect();
        let s = summarize("ar1", &[&xs]).unwrap();
        let exact = 0.5 * (1.0 + phi) / (1.0 - phi);
        assert!((s.tau_int - exact).abs() < 0.1 * exact, "{} vs {exact}", s.tau_int);
    }

    #[test]
    fn identical_starts_agree_exactly() {
        let sim = SimConfig { dt: 0.05, ..SimConfig::with_n(2) };
        let g = sim.grid().unwrap();
        let u = PairField::position(SpectralField::constant(g, 0.3));
        let reg = observable_registry(sim.alpha);
        let obs = reg.select(&["mean_u2", "clipped_h_alpha"]).unwrap();
        let mut plan = TwoStartPlan::new(sim, vec![1, 2], 2.0);
        plan.coupling = None;
        let report = two_start_convergence(&u, &u, &obs, &plan).unwrap();
        for c in &report.comparisons {
            assert_eq!(c.difference, 0.0);
        }
    }

    #[test]
    fn tightness_table_shape() {
        let sim = SimConfig { dt: 0.05, ..SimConfig::with_n(2) };
        let stepper = FlowStepper::new(sim).unwrap();
        let mut state = stepper.start(PairField::zeros(sim.grid().unwrap())).unwrap();
        let mut states = Vec::new();
        stepper.run_until(&mut state, 1.0, |s| states.push(s.clone())).unwrap();
        let rows = krylov_bogolyubov_diagnostic(&states, &[0.0, 0.5, 1.0, 2.0], sim.alpha).unwrap();
        assert_eq!(rows[0].fraction, 1.0);
        assert!(rows.windows(2).all(|w| w[1].fraction <= w[0].fraction));
    }
}

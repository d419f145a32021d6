//! Time integration of the remainder `v` in `Φ_t = S(t)u0 + Ψ_t + v_t`.
//!
//! The remainder solves `v_tt + v_t + (1 - Δ)v = -P_{≤N} 𝒩_γ(S(t)u0 + Ψ + v)`
//! with `v(0) = 0`. Every scheme treats the linear part exactly through the
//! per-mode propagator, and the stick `Ψ` is advanced from the same white-noise
//! increments so that the whole state is driven by one path of `ξ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::noise::{BrownianPath, NoiseIncrement, StickForcing, StickStepper, StochConvState};
use crate::propagator::{apply_s, forcing_weights, PropagatorTable};
use crate::renormalization::{cubic_coefficients, renormalized_cube, CubicCoefficients};
use crate::spectral::{PairField, SpectralField, SpectralGrid};

/// Norm above which a trajectory is declared blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// Time-stepping scheme for the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Lawson scheme `v ← S(δ)(v - δ(0, 𝒩))`, order 1.
    Lawson,
    /// Exponential Euler with exact weights `∫₀^δ S(r) dr`, order 1.
    #[default]
    Etd1,
    /// Exponential midpoint on half increments, order 2 without noise.
    Midpoint,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Lawson => "lawson",
            Integrator::Etd1 => "etd1",
            Integrator::Midpoint => "midpoint",
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Integrator::Midpoint => 2,
            _ => 1,
        }
    }

    fn needs_halves(&self) -> bool {
        matches!(self, Integrator::Midpoint)
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lawson" => Ok(Integrator::Lawson),
            "etd1" | "etd" | "euler" | "1" => Ok(Integrator::Etd1),
            "midpoint" | "2" => Ok(Integrator::Midpoint),
            other => Err(format!("unknown integrator `{other}` (expected lawson, etd1 or midpoint)")),
        }
    }
}

/// Parameters of one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Spectral truncation `N`.
    pub n: usize,
    /// Physical grid side used for products.
    pub m: usize,
    pub s: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub integrator: Integrator,
    /// When false the nonlinearity is switched off and `v ≡ 0`.
    pub cubic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 8,
            m: SpectralGrid::default_resolution(8),
            s: 1.0,
            gamma: 0.0,
            alpha: 0.25,
            dt: 0.01,
            horizon: 1.0,
            seed: 0,
            integrator: Integrator::Etd1,
            cubic: true,
        }
    }
}

impl SimConfig {
    /// Default parameters at truncation `n` with the matching grid.
    pub fn with_n(n: usize) -> Self {
        Self { n, m: SpectralGrid::default_resolution(n), ..Self::default() }
    }

    /// Every violated constraint, so all of them can be reported at once.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(ConfigIssue::new("N", "truncation must be at least 1"));
        }
        if self.m < 4 * self.n + 1 {
            out.push(ConfigIssue::new(
                "M_pad",
                format!("grid side {} cannot resolve cubic products at N={} (need ≥ {})", self.m, self.n, 4 * self.n + 1),
            ));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            out.push(ConfigIssue::new("s", format!("need s > 0, got {}", self.s)));
        }
        let alpha_cap = self.s.min(1.0 / 3.0);
        if !(self.alpha > 0.0 && self.alpha < alpha_cap) {
            out.push(ConfigIssue::new(
                "alpha",
                format!("need 0 < alpha < min(s, 1/3) = {alpha_cap:.6}, got {}", self.alpha),
            ));
        }
        if !self.gamma.is_finite() {
            out.push(ConfigIssue::new("gamma", "must be finite"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            out.push(ConfigIssue::new("dt", format!("need a positive finite step, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            out.push(ConfigIssue::new("T", format!("need a nonnegative finite horizon, got {}", self.horizon)));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(issues))
        }
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.n, self.m)
    }

    /// Number of steps needed to reach the horizon.
    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt - 1e-9).ceil().max(0.0) as u64
    }
}

/// State of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u0: PairField,
    /// `S(t)u0`, advanced alongside the other components.
    pub linear: PairField,
    pub stick: StochConvState,
    pub v: PairField,
    pub t: f64,
    pub step: u64,
    pub config: SimConfig,
}

impl FlowState {
    /// Canonical start: `Ψ_0 = 0`, `v_0 = 0`.
    pub fn new(u0: PairField, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        if u0.grid() != grid {
            return Err(Error::GridMismatch(format!(
                "initial data on N={}, M={} but config asks for N={}, M={}",
                u0.grid().n(),
                u0.grid().m(),
                grid.n(),
                grid.m()
            )));
        }
        Ok(Self {
            linear: u0.clone(),
            u0,
            stick: StochConvState::new(grid, config.seed),
            v: PairField::zeros(grid),
            t: 0.0,
            step: 0,
            config,
        })
    }

    pub fn grid(&self) -> SpectralGrid {
        self.v.grid()
    }

    /// `Φ_t = S(t)u0 + Ψ_t + v_t`.
    pub fn full_flow(&self) -> PairField {
        let mut out = &self.linear + &self.stick.value;
        out += &self.v;
        out
    }

    /// Coefficients `a, b, c` of the current expansion point.
    pub fn coefficients(&self) -> Result<CubicCoefficients> {
        cubic_coefficients(&self.u0, &self.stick.value.u, self.t, self.config.gamma)
    }
}

/// `Φ_t` of a state.
pub fn full_flow(state: &FlowState) -> PairField {
    state.full_flow()
}

/// `P_{≤N}[v³ + a v² + b v + c]`.
pub fn nonlinearity(v: &PairField, coeffs: &CubicCoefficients) -> Result<SpectralField> {
    let grid = v.grid();
    if grid != coeffs.grid() {
        return Err(Error::GridMismatch("remainder and coefficients live on different grids".into()));
    }
    let n = grid.n() as i64;
    let samples = v.u.project_leq(n).physical();
    let values: Vec<f64> = samples.iter().enumerate().map(|(j, &x)| coeffs.eval_at(j, x)).collect();
    Ok(SpectralField::from_physical(grid, &values))
}

/// `P_{≤N} 𝒩_γ(f)` for a field already truncated to `[-N, N]²`.
pub(crate) fn truncated_cube(f: &SpectralField, gamma: f64) -> SpectralField {
    let values: Vec<f64> = f.physical().into_iter().map(|w| renormalized_cube(w, gamma)).collect();
    SpectralField::from_physical(f.grid(), &values)
}

/// Noise supplied to one step.
#[derive(Debug, Clone, PartialEq)]
pub enum StepNoise {
    Whole(NoiseIncrement),
    /// Increments over the two halves of the step.
    Halves(NoiseIncrement, NoiseIncrement),
}

impl StepNoise {
    pub fn full(&self) -> NoiseIncrement {
        match self {
            StepNoise::Whole(i) => i.clone(),
            StepNoise::Halves(a, b) => a.join(b),
        }
    }

    pub fn negated(&self) -> StepNoise {
        match self {
            StepNoise::Whole(i) => StepNoise::Whole(i.negated()),
            StepNoise::Halves(a, b) => StepNoise::Halves(a.negated(), b.negated()),
        }
    }

    /// Adds a deterministic forcing `h` held over the step: `Δξ ↦ Δξ + h·δ`.
    pub fn shifted(&self, h: &SpectralField) -> StepNoise {
        let add = |i: &NoiseIncrement| {
            let mut out = i.clone();
            out.field.axpy(i.dt, h);
            out
        };
        match self {
            StepNoise::Whole(i) => StepNoise::Whole(add(i)),
            StepNoise::Halves(a, b) => StepNoise::Halves(add(a), add(b)),
        }
    }
}

/// Where a run gets its white-noise increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSource {
    /// `ξ = 0`.
    Silent,
    /// A Brownian path whose base resolution divides the step.
    Path(BrownianPath),
}

impl NoiseSource {
    /// The default path for a configuration: base resolution `dt`, or `dt/2`
    /// for schemes that need half increments.
    pub fn for_config(config: &SimConfig) -> Result<Self> {
        let base = if config.integrator.needs_halves() { config.dt / 2.0 } else { config.dt };
        Ok(NoiseSource::Path(BrownianPath::new(config.grid()?, config.seed, base)))
    }
}

/// Precomputed tables for stepping one configuration.
#[derive(Debug, Clone)]
pub struct FlowStepper {
    config: SimConfig,
    grid: SpectralGrid,
    table: PropagatorTable,
    half_table: PropagatorTable,
    stick: StickStepper,
    half_stick: StickStepper,
    etd: Vec<(f64, f64)>,
    noise: NoiseSource,
    /// log2 of `dt / base_dt` of the noise path.
    level: u32,
}

impl FlowStepper {
    pub fn new(config: SimConfig) -> Result<Self> {
        Self::with_noise(config, NoiseSource::for_config(&config)?)
    }

    pub fn with_noise(config: SimConfig, noise: NoiseSource) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let level = match &noise {
            NoiseSource::Silent => 0,
            NoiseSource::Path(path) => {
                if path.grid != grid {
                    return Err(Error::GridMismatch("noise path grid differs from the configuration".into()));
                }
                let ratio = config.dt / path.base_dt;
                let level = ratio.round().max(1.0).log2().round() as u32;
                if (path.step_dt(level) - config.dt).abs() > 1e-9 * config.dt {
                    return Err(Error::InvalidArgument(format!(
                        "step {} is not a power-of-two multiple of the path resolution {}",
                        config.dt, path.base_dt
                    )));
                }
                if config.integrator.needs_halves() && level == 0 {
                    return Err(Error::InvalidArgument(
                        "midpoint stepping needs a noise path resolved at dt/2".into(),
                    ));
                }
                level
            }
        };
        let etd = grid.modes().map(|mode| forcing_weights(mode.bracket(), config.dt)).collect();
        Ok(Self {
            config,
            grid,
            table: PropagatorTable::new(grid, config.dt),
            half_table: PropagatorTable::new(grid, config.dt / 2.0),
            stick: StickStepper::new(grid, config.dt, config.s)?,
            half_stick: StickStepper::new(grid, config.dt / 2.0, config.s)?,
            etd,
            noise,
            level,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn noise(&self) -> &NoiseSource {
        &self.noise
    }

    pub fn propagator(&self) -> &PropagatorTable {
        &self.table
    }

    pub fn stick_stepper(&self) -> &StickStepper {
        &self.stick
    }

    /// `(∫₀^δ m₁₂, ∫₀^δ m₂₂)` per storage index.
    pub(crate) fn etd_weights(&self) -> &[(f64, f64)] {
        &self.etd
    }

    /// Fresh state at `t = 0`.
    pub fn start(&self, u0: PairField) -> Result<FlowState> {
        FlowState::new(u0, self.config)
    }

    /// Noise of step `k` of the run.
    pub fn step_noise(&self, k: u64) -> StepNoise {
        match &self.noise {
            NoiseSource::Silent => {
                if self.config.integrator.needs_halves() {
                    let half = NoiseIncrement::zero(self.grid, self.config.dt / 2.0);
                    StepNoise::Halves(half.clone(), half)
                } else {
                    StepNoise::Whole(NoiseIncrement::zero(self.grid, self.config.dt))
                }
            }
            NoiseSource::Path(path) => {
                if self.config.integrator.needs_halves() {
                    let (first, full) = path.split_increment(k, self.level);
                    let second = NoiseIncrement { field: &full.field - &first.field, dt: first.dt };
                    StepNoise::Halves(first, second)
                } else {
                    StepNoise::Whole(path.increment(k, self.level))
                }
            }
        }
    }

    /// Advances one step with the run's own noise.
    pub fn step(&self, state: &mut FlowState) -> Result<()> {
        let noise = self.step_noise(state.step);
        self.step_with(state, &noise)
    }

    /// Advances one step with supplied noise.
    pub fn step_with(&self, state: &mut FlowState, noise: &StepNoise) -> Result<()> {
        if state.grid() != self.grid {
            return Err(Error::GridMismatch("state grid differs from the stepper".into()));
        }
        let gamma = self.config.gamma;
        let dt = self.config.dt;
        let n = self.grid.n() as i64;
        let cube = |lin: &PairField, psi: &PairField, v: &PairField| -> SpectralField {
            let mut w = &lin.u + &psi.u;
            w += &v.u;
            truncated_cube(&w.project_leq(n), gamma)
        };
        match self.config.integrator {
            Integrator::Lawson | Integrator::Etd1 => {
                let full = noise.full();
                if self.config.cubic {
                    let nl = cube(&state.linear, &state.stick.value, &state.v);
                    if self.config.integrator == Integrator::Lawson {
                        state.v.ut.axpy(-dt, &nl);
                        self.table.apply_in_place(&mut state.v);
                    } else {
                        self.table.apply_in_place(&mut state.v);
                        let (u, ut) = (state.v.u.coeffs_mut(), state.v.ut.coeffs_mut());
                        for (i, c) in nl.coeffs().iter().enumerate() {
                            let (w12, w22) = self.etd[i];
                            u[i] -= c * w12;
                            ut[i] -= c * w22;
                        }
                    }
                }
                self.stick.step(&mut state.stick, StickForcing::Shared(&full))?;
                self.table.apply_in_place(&mut state.linear);
            }
            Integrator::Midpoint => {
                let StepNoise::Halves(first, second) = noise else {
                    return Err(Error::InvalidArgument("midpoint stepping needs half-step increments".into()));
                };
                let mut stick_mid = state.stick.clone();
                self.half_stick.step(&mut stick_mid, StickForcing::Shared(first))?;
                if self.config.cubic {
                    let nl0 = cube(&state.linear, &state.stick.value, &state.v);
                    let mut v_mid = state.v.clone();
                    v_mid.ut.axpy(-dt / 2.0, &nl0);
                    self.half_table.apply_in_place(&mut v_mid);
                    let lin_mid = self.half_table.apply(&state.linear);
                    let nl_mid = cube(&lin_mid, &stick_mid.value, &v_mid);
                    let mut kick = PairField::zeros(self.grid);
                    kick.ut.axpy(-dt, &nl_mid);
                    self.half_table.apply_in_place(&mut kick);
                    self.table.apply_in_place(&mut state.v);
                    state.v += &kick;
                }
                self.half_stick.step(&mut stick_mid, StickForcing::Shared(second))?;
                state.stick = stick_mid;
                self.table.apply_in_place(&mut state.linear);
            }
        }
        state.step += 1;
        state.t += dt;
        check_blow_up(state)
    }

    /// Steps until `t_end` (rounded to whole steps), calling `observe` after every step.
    pub fn run_until(
        &self,
        state: &mut FlowState,
        t_end: f64,
        mut observe: impl FnMut(&FlowState),
    ) -> Result<()> {
        let remaining = ((t_end - state.t) / self.config.dt - 1e-9).ceil().max(0.0) as u64;
        for _ in 0..remaining {
            self.step(state)?;
            observe(state);
        }
        Ok(())
    }
}

fn check_blow_up(state: &FlowState) -> Result<()> {
    let norm = state.v.h1_norm().max(state.stick.value.h1_norm());
    if !norm.is_finite() || !state.v.is_finite() {
        return Err(Error::BlowUp { t: state.t, reason: "non-finite remainder".into() });
    }
    if norm > BLOW_UP_THRESHOLD {
        return Err(Error::BlowUp { t: state.t, reason: format!("ℋ¹ norm {norm:.3e} exceeds {BLOW_UP_THRESHOLD:e}") });
    }
    Ok(())
}

/// One step of the configured scheme with the given noise.
pub fn v_step(state: &FlowState, noise: &StepNoise) -> Result<FlowState> {
    let stepper = FlowStepper::with_noise(state.config, NoiseSource::Silent)?;
    let mut next = state.clone();
    stepper.step_with(&mut next, noise)?;
    Ok(next)
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `E = ½∫w_t² + ½∫w² + ½∫|∇w|² + ¼∫w⁴ + ⅛∫(w + w_t)²` with `w = π₁v`, `w_t = π₂v`.
pub fn energy(v: &PairField) -> f64 {
    let grid = v.grid();
    let mut quad = 0.0;
    for (i, mode) in grid.modes().enumerate() {
        let w = v.u.coeffs()[i];
        let wt = v.ut.coeffs()[i];
        quad += 0.5 * wt.norm_sqr() + 0.5 * (1.0 + mode.laplacian_symbol()) * w.norm_sqr() + 0.125 * (w + wt).norm_sqr();
    }
    let quartic = mean_of(&v.u.physical().iter().map(|x| x.powi(4)).collect::<Vec<_>>());
    quad + 0.25 * quartic
}

/// `F(w) = E(w) - ⅛∫w_t² + ⅓∫a w³`.
pub fn modified_energy_f(v: &PairField, coeffs: &CubicCoefficients) -> Result<f64> {
    if v.grid() != coeffs.grid() {
        return Err(Error::GridMismatch("remainder and coefficients live on different grids".into()));
    }
    let wt_sq: f64 = v.ut.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let w = v.u.physical();
    let a = coeffs.a_samples();
    let cubic = mean_of(&w.iter().zip(&a).map(|(x, a)| a * x * x * x).collect::<Vec<_>>());
    Ok(energy(v) - 0.125 * wt_sq + cubic / 3.0)
}

/// How the restarted leg of [`restart_check`] is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartLeg {
    pub integrator: Integrator,
    /// The leg uses steps `dt / 2^refine`.
    pub refine: u32,
}

impl RestartLeg {
    /// Same scheme and step as the continuous run.
    pub fn same(config: &SimConfig) -> Self {
        Self { integrator: config.integrator, refine: 0 }
    }
}

/// Outcome of comparing a continuous run with one restarted at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartResidual {
    pub t: f64,
    pub h: f64,
    pub dt: f64,
    /// `‖Φ_{t+h} - [S(h)Φ_t + Ψ_{t,t+h} + v_{t,t+h}]‖_{ℋ¹}`.
    pub residual: f64,
    pub flow_norm: f64,
}

/// Runs `[0, t+h]` in one go and again with a restart at `t` from initial
/// data `Φ_t`, both driven by one Brownian path, and measures the discrepancy
/// at `t+h`.
///
/// With [`RestartLeg::same`] the two runs agree to round-off, since every
/// scheme here is Markov in the full state. A refined or different leg
/// exposes the discretisation error of the restart identity, which then
/// vanishes at the order of the coarser scheme.
pub fn restart_check(u0: &PairField, config: SimConfig, t: f64, h: f64, leg: RestartLeg) -> Result<RestartResidual> {
    config.validate()?;
    let grid = config.grid()?;
    let leg_dt = config.dt / f64::from(1u32 << leg.refine);
    let leg_config = SimConfig { integrator: leg.integrator, dt: leg_dt, ..config };
    let halves = |c: &SimConfig| if c.integrator.needs_halves() { 2.0 } else { 1.0 };
    let base = (config.dt / halves(&config)).min(leg_dt / halves(&leg_config));
    let path = NoiseSource::Path(BrownianPath::new(grid, config.seed, base));
    let main = FlowStepper::with_noise(config, path)?;
    let leg_stepper = FlowStepper::with_noise(leg_config, path)?;
    let k_t = (t / config.dt).round() as u64;
    let k_h = (h / config.dt).round() as u64;
    let mut state = main.start(u0.clone())?;
    for _ in 0..k_t {
        main.step(&mut state)?;
    }
    let mut restarted = FlowState::new(state.full_flow(), leg_config)?;
    restarted.t = state.t;
    restarted.step = k_t << leg.refine;
    for _ in 0..k_h {
        main.step(&mut state)?;
    }
    for _ in 0..(k_h << leg.refine) {
        leg_stepper.step(&mut restarted)?;
    }
    let continuous = state.full_flow();
    let diff = &continuous - &restarted.full_flow();
    Ok(RestartResidual {
        t: k_t as f64 * config.dt,
        h: k_h as f64 * config.dt,
        dt: config.dt,
        residual: diff.h1_norm(),
        flow_norm: continuous.h1_norm(),
    })
}

/// `S(t)u0` for a state's initial data.
pub fn linear_part(state: &FlowState) -> PairField {
    apply_s(&state.u0, state.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config(n: usize) -> SimConfig {
        SimConfig { dt: 0.02, horizon: 0.4, ..SimConfig::with_n(n) }
    }

    #[test]
    fn validation_collects_every_issue() {
        let bad = SimConfig { n: 0, s: -1.0, alpha: 0.5, dt: 0.0, ..SimConfig::default() };
        let keys: Vec<String> = bad.issues().into_iter().map(|i| i.key).collect();
        for key in ["N", "s", "alpha", "dt"] {
            assert!(keys.iter().any(|k| k == key), "missing {key} in {keys:?}");
        }
        assert!(SimConfig::default().validate().is_ok());
        let small_s = SimConfig { s: 0.1, alpha: 0.2, ..SimConfig::default() };
        assert!(small_s.issues().iter().any(|i| i.key == "alpha"));
    }

    #[test]
    fn integrator_names_round_trip() {
        for i in [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint] {
            assert_eq!(i.name().parse::<Integrator>().unwrap(), i);
        }
        assert!("rk4".parse::<Integrator>().is_err());
    }

    #[test]
    fn zero_is_a_fixed_point() {
        for integrator in [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint] {
            let cfg = SimConfig { integrator, ..config(3) };
            let stepper = FlowStepper::with_noise(cfg, NoiseSource::Silent).unwrap();
            let mut state = stepper.start(PairField::zeros(cfg.grid().unwrap())).unwrap();
            stepper.run_until(&mut state, 0.4, |_| {}).unwrap();
            assert_eq!(state.full_flow(), PairField::zeros(cfg.grid().unwrap()));
        }
    }

    #[test]
    fn flow_at_time_zero_is_initial_data() {
        let cfg = config(3);
        let u0 = PairField::position(SpectralField::random(cfg.grid().unwrap(), &mut ChaCha8Rng::seed_from_u64(2), 2.0));
        let state = FlowState::new(u0.clone(), cfg).unwrap();
        assert_eq!(full_flow(&state), u0);
    }

    #[test]
    fn linear_dynamics_leave_remainder_zero() {
        let cfg = SimConfig { cubic: false, ..config(3) };
        let stepper = FlowStepper::new(cfg).unwrap();
        let u0 = PairField::position(SpectralField::cosine(cfg.grid().unwrap(), ModeIndex::new(1, 1), 1.0).unwrap());
        let mut state = stepper.start(u0.clone()).unwrap();
        stepper.run_until(&mut state, 0.4, |_| {}).unwrap();
        assert_eq!(state.v.h1_norm(), 0.0);
        let direct = &apply_s(&u0, state.t) + &state.stick.value;
        assert!((&direct - &state.full_flow()).h1_norm() < 1e-12);
    }

    #[test]
    fn nonlinearity_of_constants() {
        let g = SpectralGrid::with_default_resolution(2);
        let zero = cubic_coefficients(&PairField::zeros(g), &SpectralField::zeros(g), 0.0, 0.0).unwrap();
        let k = 1.3;
        let nl = nonlinearity(&PairField::position(SpectralField::constant(g, k)), &zero).unwrap();
        assert!((nl.mean() - k * k * k).abs() < 1e-12);
        let cc = cubic_coefficients(&PairField::zeros(g), &SpectralField::constant(g, 0.7), 0.0, 0.2).unwrap();
        let nl0 = nonlinearity(&PairField::zeros(g), &cc).unwrap();
        assert!((&nl0 - &cc.c()).l2_norm() < 1e-14);
    }

    #[test]
    fn energy_of_constant_pair() {
        let g = SpectralGrid::with_default_resolution(2);
        let v = PairField::new(SpectralField::constant(g, 1.0), SpectralField::zeros(g)).unwrap();
        assert!((energy(&v) - 0.875).abs() < 1e-14);
        let (c, d) = (0.6, -1.1);
        let v = PairField::new(SpectralField::constant(g, c), SpectralField::constant(g, d)).unwrap();
        let expected = d * d / 2.0 + c * c / 2.0 + c.powi(4) / 4.0 + (c + d).powi(2) / 8.0;
        assert!((energy(&v) - expected).abs() < 1e-14);
        assert_eq!(energy(&PairField::zeros(g)), 0.0);
    }

    #[test]
    fn modified_energy_without_a() {
        let g = SpectralGrid::with_default_resolution(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = PairField::new(SpectralField::random(g, &mut rng, 1.5), SpectralField::random(g, &mut rng, 0.5)).unwrap();
        let zero = cubic_coefficients(&PairField::zeros(g), &SpectralField::zeros(g), 0.0, 0.0).unwrap();
        let wt_sq = v.ut.l2_norm().powi(2);
        assert!((modified_energy_f(&v, &zero).unwrap() - (energy(&v) - wt_sq / 8.0)).abs() < 1e-12);
        assert_eq!(modified_energy_f(&PairField::zeros(g), &zero).unwrap(), 0.0);
    }

    #[test]
    fn same_scheme_restart_is_exact() {
        let cfg = config(3);
        let u0 = PairField::position(SpectralField::cosine(cfg.grid().unwrap(), ModeIndex::new(1, 0), 0.5).unwrap());
        for integrator in [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint] {
            let cfg = SimConfig { integrator, ..cfg };
            let r = restart_check(&u0, cfg, 0.2, 0.2, RestartLeg::same(&cfg)).unwrap();
            assert!(r.residual < 1e-12 * r.flow_norm.max(1.0), "{integrator}: {r:?}");
        }
        let leg = RestartLeg { integrator: Integrator::Lawson, refine: 1 };
        assert_eq!(restart_check(&u0, cfg, 0.2, 0.0, leg).unwrap().residual, 0.0);
        let linear = SimConfig { cubic: false, ..cfg };
        let r = restart_check(&u0, linear, 0.2, 0.2, RestartLeg::same(&linear)).unwrap();
        assert!(r.residual < 1e-13, "{r:?}");
    }

    #[test]
    fn blow_up_is_reported() {
        let cfg = SimConfig { dt: 0.5, gamma: 0.0, ..config(2) };
        let stepper = FlowStepper::with_noise(cfg, NoiseSource::Silent).unwrap();
        let u0 = PairField::position(SpectralField::constant(cfg.grid().unwrap(), 50.0));
        let mut state = stepper.start(u0).unwrap();
        let err = stepper.run_until(&mut state, 50.0, |_| {}).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }
}

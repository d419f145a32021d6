//! Asymptotic coupling of two solutions through a Girsanov shift of the noise.
//!
//! For initial data `u1⁰`, `u2⁰` with difference `ũ⁰`, the shift system `w`
//! is built so that `Φ_t(u2⁰, ξ + h) = Φ_t(u1⁰, ξ) + S(t)ũ⁰ + w(t)`, where
//! `h` is an adapted drift and `w` contracts. The mollified product uses the
//! heat kernel `ρ_ε` at a state-dependent scale `ε(w)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{FlowState, FlowStepper, NoiseSource, SimConfig, StepNoise};
use crate::error::{Error, Result};
use crate::noise::NoiseIncrement;
use crate::propagator::{xalpha_norm, XAlphaConfig};
use crate::renormalization::renormalized_cube;
use crate::spectral::{lp_mean_norm, pair_norm, sobolev_norm_padded, PairField, SpectralField, SpectralGrid};

/// Heat-kernel mollification `f ∗ ρ_ε`, the multiplier `e^{-ε|2πn|²}`.
pub fn mollify(f: &SpectralField, eps: f64) -> Result<SpectralField> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("mollifier scale must be nonnegative, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.apply_multiplier(|mode| (-eps * mode.laplacian_symbol()).exp()))
}

/// Mollifier scale `ε(w)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MollifierScale(pub f64);

impl MollifierScale {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The four norms entering `ε(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpsilonNorms {
    /// `‖w(t)‖_{ℋ¹}`.
    pub w_h1: f64,
    /// `‖ũ⁰‖_{X^α}`.
    pub diff_xalpha: f64,
    /// `‖u1(t)‖_{X^α}`.
    pub u1_xalpha: f64,
    /// `‖Q(u1, w + S(t)ũ⁰)‖_{W^{α, 2/(1-α)}}`.
    pub q_norm: f64,
}

impl EpsilonNorms {
    fn total(&self) -> f64 {
        1.0 + self.w_h1 + self.diff_xalpha + self.u1_xalpha + self.q_norm
    }
}

/// Parameters of the coupling construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    /// The constant `C ≥ 1` in `ε(w)`.
    pub c_univ: f64,
    /// `ε = C^{-prefactor_power/α} (1 + …)^{-base_power/α}`.
    pub prefactor_power: f64,
    pub base_power: f64,
    /// Time grid for `X^α` norms inside `ε`.
    pub xalpha: XAlphaConfig,
    /// Time between re-evaluations of `‖u1(t)‖_{X^α}`; zero means every step.
    pub xalpha_refresh: f64,
    /// Quadrature padding for the `W^{α, 2/(1-α)}` norm of `Q`.
    pub pad: usize,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            c_univ: 1.0,
            prefactor_power: 2.0,
            base_power: 4.0,
            xalpha: XAlphaConfig { t_star: 8.0, dt: 0.5, pad: 2 },
            xalpha_refresh: 0.5,
            pad: 2,
        }
    }
}

impl CouplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_univ >= 1.0) {
            return Err(Error::InvalidArgument(format!("coupling constant must be at least 1, got {}", self.c_univ)));
        }
        if !(self.prefactor_power >= 0.0 && self.base_power >= 0.0) {
            return Err(Error::InvalidArgument("mollifier exponents must be nonnegative".into()));
        }
        if !(self.xalpha_refresh >= 0.0) {
            return Err(Error::InvalidArgument("X^α refresh interval must be nonnegative".into()));
        }
        Ok(())
    }
}

/// `ε = C^{-p/α}(1 + ‖w‖ + ‖ũ⁰‖ + ‖u1‖ + ‖Q‖)^{-q/α}`.
pub fn epsilon_scale(config: &CouplingConfig, alpha: f64, norms: &EpsilonNorms) -> MollifierScale {
    let pre = config.c_univ.powf(-config.prefactor_power / alpha);
    MollifierScale(pre * norms.total().powf(-config.base_power / alpha))
}

/// Running maxima of the stick norms that define `τ_M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauMonitor {
    pub threshold: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Running max of `‖Ψ‖_{𝒲^{α,4/α}}`, `‖:Ψ²:_γ‖_{L⁴}`, `‖:Ψ³:_γ‖_{L²}`.
    pub running_max: [f64; 3],
    pub stopped_at: Option<f64>,
}

impl TauMonitor {
    /// `threshold = f64::INFINITY` never stops.
    pub fn new(threshold: f64, alpha: f64, gamma: f64) -> Result<Self> {
        if !(threshold >= 0.0) {
            return Err(Error::InvalidArgument(format!("stopping threshold must be nonnegative, got {threshold}")));
        }
        Ok(Self { threshold, alpha, gamma, running_max: [0.0; 3], stopped_at: None })
    }

    pub fn stopped(&self) -> bool {
        self.stopped_at.is_some()
    }

    /// The three stick norms at one time.
    pub fn norms(&self, stick: &PairField) -> [f64; 3] {
        let psi = stick.u.physical();
        let sq: Vec<f64> = psi.iter().map(|p| p * p - self.gamma).collect();
        let cube: Vec<f64> = psi.iter().map(|&p| renormalized_cube(p, self.gamma)).collect();
        [pair_norm(stick, self.alpha, 4.0 / self.alpha), lp_mean_norm(&sq, 4.0), lp_mean_norm(&cube, 2.0)]
    }

    /// Records the stick at time `t`; returns whether the path is stopped.
    pub fn observe(&mut self, t: f64, stick: &PairField) -> bool {
        if self.stopped() {
            return true;
        }
        if self.threshold.is_infinite() {
            return false;
        }
        let norms = self.norms(stick);
        for (m, x) in self.running_max.iter_mut().zip(norms) {
            *m = m.max(x);
        }
        if self.running_max.iter().any(|&m| m > self.threshold) {
            self.stopped_at = Some(t);
        }
        self.stopped()
    }
}

/// Reference flow, shift system and Girsanov bookkeeping of one coupling run.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingRecord {
    /// `Φ_t(u1⁰, ξ)`.
    pub reference: FlowState,
    pub w: PairField,
    /// `ũ⁰ = u2⁰ - u1⁰`.
    pub diff0: PairField,
    /// `S(t)ũ⁰`.
    pub diff_linear: PairField,
    pub diff_xalpha: f64,
    pub u1_xalpha: f64,
    /// Current shift `h(t)`, frozen once `τ_M` has passed.
    pub h: SpectralField,
    /// `∫₀^t ‖h‖²_{L²} dr`.
    pub hcost: f64,
    /// `log 𝓔(h)` accumulated along the path.
    pub log_density: f64,
    pub last_epsilon: f64,
    pub monitor: TauMonitor,
    pub config: CouplingConfig,
}

impl CouplingRecord {
    /// Starts with `w⁰ = 0` and a monitor that never stops.
    pub fn new(u1: PairField, u2: PairField, sim: SimConfig, config: CouplingConfig) -> Result<Self> {
        config.validate()?;
        if u1.grid() != u2.grid() {
            return Err(Error::GridMismatch("coupled initial data live on different grids".into()));
        }
        let reference = FlowState::new(u1.clone(), sim)?;
        let grid = reference.grid();
        let diff0 = &u2 - &u1;
        let diff_xalpha = xalpha_norm(&diff0, sim.alpha, &config.xalpha)?.value();
        let u1_xalpha = xalpha_norm(&u1, sim.alpha, &config.xalpha)?.value();
        Ok(Self {
            reference,
            w: PairField::zeros(grid),
            diff_linear: diff0.clone(),
            diff0,
            diff_xalpha,
            u1_xalpha,
            h: SpectralField::zeros(grid),
            hcost: 0.0,
            log_density: 0.0,
            last_epsilon: f64::NAN,
            monitor: TauMonitor::new(f64::INFINITY, sim.alpha, sim.gamma)?,
            config,
        })
    }

    pub fn with_monitor(mut self, threshold: f64) -> Result<Self> {
        self.monitor = TauMonitor::new(threshold, self.reference.config.alpha, self.reference.config.gamma)?;
        Ok(self)
    }

    pub fn t(&self) -> f64 {
        self.reference.t
    }

    pub fn grid(&self) -> SpectralGrid {
        self.reference.grid()
    }

    /// `Φ_t(u1⁰, ξ) + S(t)ũ⁰ + w(t)`, the coupled second solution.
    pub fn coupled_flow(&self) -> PairField {
        let mut out = self.reference.full_flow();
        out += &self.diff_linear;
        out += &self.w;
        out
    }

    /// `ε(w)` at the current time.
    pub fn epsilon_scale(&self) -> MollifierScale {
        self.shift_terms().map(|t| MollifierScale(t.epsilon)).unwrap_or(MollifierScale(f64::NAN))
    }

    /// `h(t)` evaluated afresh from the current state.
    pub fn shift_h(&self) -> Result<SpectralField> {
        Ok(self.shift_terms()?.h)
    }

    fn shift_terms(&self) -> Result<ShiftTerms> {
        let sim = &self.reference.config;
        let grid = self.grid();
        let n = grid.n() as i64;
        let wide = SpectralGrid::new(2 * grid.n(), grid.m())?;
        let u1 = self.reference.full_flow();
        let d = &self.w.u + &self.diff_linear.u;
        let a = u1.u.project_leq(n).physical();
        let b = d.project_leq(n).physical();
        let q_samples: Vec<f64> = if sim.cubic {
            a.iter().zip(&b).map(|(x, y)| 3.0 * (x * x - sim.gamma) + 3.0 * x * y + y * y).collect()
        } else {
            vec![0.0; a.len()]
        };
        let q = SpectralField::from_physical(wide, &q_samples);
        let norms = EpsilonNorms {
            w_h1: self.w.h1_norm(),
            diff_xalpha: self.diff_xalpha,
            u1_xalpha: self.u1_xalpha,
            q_norm: sobolev_norm_padded(&q, sim.alpha, 2.0 / (1.0 - sim.alpha), self.config.pad),
        };
        let epsilon = epsilon_scale(&self.config, sim.alpha, &norms).value();
        let q_smooth = mollify(&q, epsilon)?.physical();
        let d_smooth = (&self.w.u + &mollify(&self.diff_linear.u, epsilon)?).project_leq(n).physical();
        let kept: Vec<f64> = q_smooth.iter().zip(&d_smooth).map(|(x, y)| x * y).collect();
        let removed: Vec<f64> = q_samples.iter().zip(&b).map(|(x, y)| x * y).collect();
        let g = SpectralField::from_physical(grid, &kept);
        let forcing = &g - &SpectralField::from_physical(grid, &removed);
        let h = g.bracket_multiplier(sim.s).scaled(std::f64::consts::FRAC_1_SQRT_2);
        Ok(ShiftTerms { epsilon, forcing, h })
    }
}

struct ShiftTerms {
    epsilon: f64,
    /// `P_{≤N}[-Q·(π₁w + π₁S(t)ũ⁰) + (Q∗ρ_ε)(π₁w + π₁S(t)ũ⁰∗ρ_ε)]`.
    forcing: SpectralField,
    h: SpectralField,
}

/// Advances a [`CouplingRecord`] and reports the noise each step used.
#[derive(Debug, Clone)]
pub struct CouplingStepper {
    flow: FlowStepper,
    refresh_every: u64,
}

impl CouplingStepper {
    pub fn new(sim: SimConfig) -> Result<Self> {
        Self::with_noise(sim, NoiseSource::for_config(&sim)?, &CouplingConfig::default())
    }

    pub fn with_noise(sim: SimConfig, noise: NoiseSource, config: &CouplingConfig) -> Result<Self> {
        config.validate()?;
        let flow = FlowStepper::with_noise(sim, noise)?;
        let refresh_every = ((config.xalpha_refresh / sim.dt).round() as u64).max(1);
        Ok(Self { flow, refresh_every })
    }

    pub fn flow(&self) -> &FlowStepper {
        &self.flow
    }

    /// One step of `w`, the reference flow and the density; returns the noise of the step
    /// and the shift `h` held over it.
    pub fn step(&self, rec: &mut CouplingRecord) -> Result<(StepNoise, SpectralField)> {
        let k = rec.reference.step;
        let noise = self.flow.step_noise(k);
        self.step_with(rec, noise)
    }

    pub fn step_with(&self, rec: &mut CouplingRecord, noise: StepNoise) -> Result<(StepNoise, SpectralField)> {
        let sim = *self.flow.config();
        let dt = sim.dt;
        let k = rec.reference.step;
        let stopped = rec.monitor.stopped();
        if !stopped {
            if k % self.refresh_every == 0 && k > 0 {
                rec.u1_xalpha = xalpha_norm(&rec.reference.full_flow(), sim.alpha, &rec.config.xalpha)?.value();
            }
            let terms = rec.shift_terms()?;
            rec.last_epsilon = terms.epsilon;
            rec.h = terms.h;
            self.flow.propagator().apply_in_place(&mut rec.w);
            let (u, ut) = (rec.w.u.coeffs_mut(), rec.w.ut.coeffs_mut());
            for (i, c) in terms.forcing.coeffs().iter().enumerate() {
                let (w12, w22) = self.flow.etd_weights()[i];
                u[i] += c * w12;
                ut[i] += c * w22;
            }
            if !rec.w.is_finite() {
                return Err(Error::BlowUp { t: rec.t() + dt, reason: "non-finite shift system".into() });
            }
        }
        let full = noise.full();
        let h_sq = rec.h.l2_norm().powi(2);
        rec.log_density += rec.h.inner(&full.field) - 0.5 * h_sq * dt;
        rec.hcost += h_sq * dt;
        self.flow.step_with(&mut rec.reference, &noise)?;
        if !stopped {
            self.flow.propagator().apply_in_place(&mut rec.diff_linear);
            rec.monitor.observe(rec.reference.t, &rec.reference.stick.value);
        }
        Ok((noise, rec.h.clone()))
    }
}

/// `exp(Σ_k ⟨h_k, Δξ_k⟩ - ½ Σ_k ‖h_k‖² δ_k)` for a left-point (adapted) shift path.
pub fn girsanov_density(h_path: &[SpectralField], noise: &[NoiseIncrement]) -> Result<f64> {
    Ok(log_girsanov_density(h_path, noise)?.exp())
}

pub fn log_girsanov_density(h_path: &[SpectralField], noise: &[NoiseIncrement]) -> Result<f64> {
    if h_path.len() != noise.len() {
        return Err(Error::InvalidArgument(format!(
            "{} shift values for {} noise increments",
            h_path.len(),
            noise.len()
        )));
    }
    let mut log = 0.0;
    for (h, incr) in h_path.iter().zip(noise) {
        if h.grid() != incr.grid() {
            return Err(Error::GridMismatch("shift and noise live on different grids".into()));
        }
        log += h.inner(&incr.field) - 0.5 * h.l2_norm().powi(2) * incr.dt;
    }
    Ok(log)
}

/// Upper bound on `E|e^X - 1|` for `E e^X = 1`, given `E|X|^p` and a cut `L > 0`:
/// `2(1 - e^{-L} + e^{-L} L^{-p} E|X|^p)`, capped at 2.
pub fn tv_bound(p: f64, moment: f64, l: f64) -> Result<f64> {
    if !(p >= 1.0) || !(moment >= 0.0) || !(l > 0.0) {
        return Err(Error::InvalidArgument(format!("tv_bound needs p ≥ 1, E|X|^p ≥ 0, L > 0 (got {p}, {moment}, {l})")));
    }
    let theta = (-l).exp();
    Ok((2.0 * (1.0 - theta + theta * l.powf(-p) * moment)).min(2.0))
}

/// `d_n(x, y) = 1 ∧ n‖x - y‖_{X^α}`.
pub fn d_n(x: &PairField, y: &PairField, n: u32, alpha: f64, config: &XAlphaConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("d_n needs n ≥ 1".into()));
    }
    let norm = xalpha_norm(&(x - y), alpha, config)?.value();
    Ok((f64::from(n) * norm).min(1.0))
}

/// Residual of `Φ_t(u2⁰, ξ + h) = Φ_t(u1⁰, ξ) + S(t)ũ⁰ + w(t)` along one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedFlowResidual {
    pub dt: f64,
    pub times: Vec<f64>,
    /// `‖LHS - RHS‖_{ℋ¹}` after each step.
    pub residual: Vec<f64>,
    /// `‖Φ_t(u2⁰, ξ + h)‖_{ℋ¹}` after each step.
    pub state_norm: Vec<f64>,
}

impl ShiftedFlowResidual {
    pub fn final_residual(&self) -> f64 {
        self.residual.last().copied().unwrap_or(0.0)
    }

    /// Largest residual relative to the largest state norm.
    pub fn max_relative(&self) -> f64 {
        let scale = self.state_norm.iter().fold(0.0_f64, |m, &x| m.max(x)).max(f64::MIN_POSITIVE);
        self.residual.iter().fold(0.0_f64, |m, &x| m.max(x)) / scale
    }
}

/// Simulates the shifted flow from `u2⁰` driven by `ξ + h` next to the coupling
/// record from `u1⁰`, with `sim.seed` fixing `ξ`.
pub fn shifted_flow_check(
    u1: &PairField,
    u2: &PairField,
    sim: SimConfig,
    config: &CouplingConfig,
    horizon: f64,
) -> Result<ShiftedFlowResidual> {
    let stepper = CouplingStepper::with_noise(sim, NoiseSource::for_config(&sim)?, config)?;
    let mut rec = CouplingRecord::new(u1.clone(), u2.clone(), sim, *config)?;
    let lhs_stepper = FlowStepper::with_noise(sim, NoiseSource::Silent)?;
    let mut lhs = FlowState::new(u2.clone(), sim)?;
    let steps = (horizon / sim.dt - 1e-9).ceil().max(0.0) as u64;
    let mut out = ShiftedFlowResidual { dt: sim.dt, times: Vec::new(), residual: Vec::new(), state_norm: Vec::new() };
    for _ in 0..steps {
        let (noise, h) = stepper.step(&mut rec)?;
        lhs_stepper.step_with(&mut lhs, &noise.shifted(&h))?;
        let left = lhs.full_flow();
        out.times.push(lhs.t);
        out.residual.push((&left - &rec.coupled_flow()).h1_norm());
        out.state_norm.push(left.h1_norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sim(n: usize) -> SimConfig {
        SimConfig { dt: 0.02, ..SimConfig::with_n(n) }
    }

    #[test]
    fn mollifier_basics() {
        let g = SpectralGrid::with_default_resolution(3);
        let c = SpectralField::constant(g, 2.5);
        assert_eq!(mollify(&c, 0.3).unwrap(), c);
        let f = SpectralField::random(g, &mut ChaCha8Rng::seed_from_u64(1), 0.5);
        assert_eq!(mollify(&f, 0.0).unwrap(), f);
        assert!(mollify(&f, -1e-3).is_err());
        let twice = mollify(&mollify(&f, 1e-3).unwrap(), 2e-3).unwrap();
        let once = mollify(&f, 3e-3).unwrap();
        for (a, b) in twice.coeffs().iter().zip(once.coeffs()) {
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn epsilon_scaling_laws() {
        let cfg = CouplingConfig::default();
        assert_eq!(epsilon_scale(&cfg, 0.25, &EpsilonNorms::default()).value(), 1.0);
        let norms = EpsilonNorms { w_h1: 0.3, diff_xalpha: 1.0, u1_xalpha: 2.0, q_norm: 0.5 };
        let base = epsilon_scale(&cfg, 0.25, &norms).value();
        let doubled = epsilon_scale(&CouplingConfig { c_univ: 2.0, ..cfg }, 0.25, &norms).value();
        assert!((doubled / base - 2f64.powf(-2.0 / 0.25)).abs() < 1e-12 * 2f64.powf(-8.0));
        let bigger = EpsilonNorms { q_norm: 0.6, ..norms };
        assert!(epsilon_scale(&cfg, 0.25, &bigger).value() <= base);
    }

    #[test]
    fn identical_data_never_shift() {
        let cfg = sim(3);
        let u = PairField::position(SpectralField::cosine(cfg.grid().unwrap(), ModeIndex::new(1, 0), 0.5).unwrap());
        let stepper = CouplingStepper::new(cfg).unwrap();
        let mut rec = CouplingRecord::new(u.clone(), u, cfg, CouplingConfig::default()).unwrap();
        for _ in 0..10 {
            let (_, h) = stepper.step(&mut rec).unwrap();
            assert_eq!(h.l2_norm(), 0.0);
        }
        assert_eq!(rec.w.h1_norm(), 0.0);
        assert_eq!(rec.hcost, 0.0);
        assert_eq!(rec.log_density, 0.0);
    }

    #[test]
    fn shifted_flow_exact_without_difference_or_cubic() {
        let cfg = sim(2);
        let g = cfg.grid().unwrap();
        let u1 = PairField::position(SpectralField::cosine(g, ModeIndex::new(1, 1), 0.4).unwrap());
        let same = shifted_flow_check(&u1, &u1, cfg, &CouplingConfig::default(), 0.2).unwrap();
        assert!(same.residual.iter().all(|&r| r < 1e-13));
        let u2 = PairField::position(SpectralField::cosine(g, ModeIndex::new(0, 1), 0.3).unwrap());
        let linear = SimConfig { cubic: false, ..cfg };
        let lin = shifted_flow_check(&u1, &u2, linear, &CouplingConfig::default(), 0.2).unwrap();
        assert!(lin.residual.iter().all(|&r| r < 1e-13), "{:?}", lin.residual);
    }

    #[test]
    fn zero_shift_has_unit_density() {
        let g = SpectralGrid::with_default_resolution(2);
        let noise: Vec<NoiseIncrement> =
            (0..5).map(|k| crate::noise::sample_increment(g, 0.1, 3, k).unwrap()).collect();
        let h = vec![SpectralField::zeros(g); 5];
        assert_eq!(girsanov_density(&h, &noise).unwrap(), 1.0);
        assert!(girsanov_density(&h[..4], &noise).is_err());
    }

    #[test]
    fn tv_bound_edges() {
        let l: f64 = 1.3;
        assert!((tv_bound(1.0, 0.0, l).unwrap() - 2.0 * (1.0 - (-l).exp())).abs() < 1e-15);
        assert!((tv_bound(1.0, 0.2, 60.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(tv_bound(1.0, 50.0, 0.01).unwrap() <= 2.0);
        assert!(tv_bound(0.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn dn_saturates() {
        let g = SpectralGrid::with_default_resolution(2);
        let x = PairField::position(SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap());
        let cfg = XAlphaConfig::default();
        assert_eq!(d_n(&x, &x, 3, 0.2, &cfg).unwrap(), 0.0);
        assert_eq!(d_n(&x, &PairField::zeros(g), 1000, 0.2, &cfg).unwrap(), 1.0);
        assert!(d_n(&x, &x, 0, 0.2, &cfg).is_err());
    }

    #[test]
    fn monitor_extremes() {
        let g = SpectralGrid::with_default_resolution(2);
        let stick = PairField::position(SpectralField::cosine(g, ModeIndex::new(1, 0), 0.1).unwrap());
        let mut never = TauMonitor::new(f64::INFINITY, 0.2, 0.0).unwrap();
        assert!(!never.observe(1.0, &stick));
        let mut zero = TauMonitor::new(0.0, 0.2, 0.0).unwrap();
        assert!(zero.observe(0.5, &stick));
        assert_eq!(zero.stopped_at, Some(0.5));
        assert!(TauMonitor::new(-1.0, 0.2, 0.0).is_err());
    }
}

//! Discrete space-time white noise and the stochastic convolution.
//!
//! Per lattice mode `n ≠ 0` a white-noise increment over a step of length `δ`
//! is a complex Gaussian with `E|Δξ̂(n)|² = δ` (real and imaginary parts each
//! `δ/2`), `Δξ̂(-n) = conj Δξ̂(n)`, and the zero mode is real with variance `δ`.
//! The stochastic convolution `Ψ` solves the linear damped wave equation forced
//! by `√2⟨∇⟩^{-s}ξ` in the velocity component.
//!
//! Random numbers come from ChaCha8 keyed by the seed, with the stream chosen
//! by `(purpose, step)` and a fixed 8-word block per mode, so any mode of any
//! step can be regenerated independently of evaluation order.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::PropagatorTable;
use crate::spectral::{ModeIndex, PairField, SpectralField, SpectralGrid};

const PURPOSE_INCREMENT: u64 = 0;
const PURPOSE_EXACT: u64 = 1;
const WORDS_PER_SLOT: u128 = 8;

/// Seed plus the number of steps already drawn: enough to regenerate a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngLineage {
    pub seed: u64,
    pub step: u64,
}

impl RngLineage {
    pub fn new(seed: u64) -> Self {
        Self { seed, step: 0 }
    }
}

/// Counter-addressed Gaussian source.
#[derive(Debug, Clone)]
pub(crate) struct CounterNormals {
    rng: ChaCha8Rng,
}

impl CounterNormals {
    pub(crate) fn new(seed: u64, purpose: u64, step: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((purpose << 60) ^ step);
        Self { rng }
    }

    /// Four standard normals belonging to `slot`, independent of other slots.
    pub(crate) fn slot(&mut self, slot: usize) -> [f64; 4] {
        self.rng.set_word_pos(slot as u128 * WORDS_PER_SLOT);
        self.next_block()
    }

    /// Four normals of the slot following the last one read.
    pub(crate) fn next_block(&mut self) -> [f64; 4] {
        let words = [self.rng.next_u64(), self.rng.next_u64(), self.rng.next_u64(), self.rng.next_u64()];
        let (a, b) = box_muller(words[0], words[1]);
        let (c, d) = box_muller(words[2], words[3]);
        [a, b, c, d]
    }
}

fn unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(x: u64, y: u64) -> (f64, f64) {
    let r = (-2.0 * unit_open(x).ln()).sqrt();
    let theta = std::f64::consts::TAU * unit_open(y);
    (r * theta.cos(), r * theta.sin())
}

/// Per-mode white-noise increments for one step of length `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub field: SpectralField,
    pub dt: f64,
}

impl NoiseIncrement {
    pub fn zero(grid: SpectralGrid, dt: f64) -> Self {
        Self { field: SpectralField::zeros(grid), dt }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.field.grid()
    }

    /// Concatenation of two consecutive increments.
    pub fn join(&self, next: &NoiseIncrement) -> NoiseIncrement {
        NoiseIncrement { field: &self.field + &next.field, dt: self.dt + next.dt }
    }

    pub fn negated(&self) -> NoiseIncrement {
        NoiseIncrement { field: -&self.field, dt: self.dt }
    }
}

/// Draws the increment of step `step` from the counter stream of `seed`.
pub fn sample_increment(grid: SpectralGrid, dt: f64, seed: u64, step: u64) -> Result<NoiseIncrement> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("noise step must be positive, got {dt}")));
    }
    let mut normals = CounterNormals::new(seed, PURPOSE_INCREMENT, step);
    let half = (dt / 2.0).sqrt();
    let full = dt.sqrt();
    let mut field = SpectralField::zeros(grid);
    let coeffs = field.coeffs_mut();
    for idx in grid.half_indices() {
        let g = normals.next_block();
        if grid.mode_at(idx).is_zero() {
            coeffs[idx] = Complex64::new(full * g[0], 0.0);
        } else {
            let z = Complex64::new(half * g[0], half * g[1]);
            coeffs[idx] = z;
            coeffs[grid.mirror(idx)] = z.conj();
        }
    }
    Ok(NoiseIncrement { field, dt })
}

/// One coefficient `Δξ̂(mode)` of the increment of `step`, drawn by random access.
///
/// Equal to the corresponding coefficient of [`sample_increment`].
pub fn sample_increment_mode(grid: SpectralGrid, dt: f64, seed: u64, step: u64, mode: ModeIndex) -> Result<Complex64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("noise step must be positive, got {dt}")));
    }
    let idx = grid
        .index(mode)
        .ok_or_else(|| Error::InvalidArgument(format!("mode ({}, {}) outside the lattice", mode.k1, mode.k2)))?;
    let centre = grid.len() / 2;
    let (slot, conj) = match idx.cmp(&centre) {
        std::cmp::Ordering::Greater => (idx - centre - 1, false),
        std::cmp::Ordering::Equal => (centre, false),
        std::cmp::Ordering::Less => (grid.mirror(idx) - centre - 1, true),
    };
    let g = CounterNormals::new(seed, PURPOSE_INCREMENT, step).slot(slot);
    if idx == centre {
        return Ok(Complex64::new(dt.sqrt() * g[0], 0.0));
    }
    let half = (dt / 2.0).sqrt();
    let z = Complex64::new(half * g[0], half * g[1]);
    Ok(if conj { z.conj() } else { z })
}

/// A fixed Brownian path sampled at resolution `base_dt`.
///
/// Coarser increments at `level` are sums of `2^level` consecutive base
/// increments, so runs at `δ, δ/2, δ/4, …` see the same realisation of `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    pub grid: SpectralGrid,
    pub seed: u64,
    pub base_dt: f64,
    /// `-1` replays the mirrored path `-ξ`.
    pub sign: f64,
}

impl BrownianPath {
    pub fn new(grid: SpectralGrid, seed: u64, base_dt: f64) -> Self {
        Self { grid, seed, base_dt, sign: 1.0 }
    }

    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn step_dt(&self, level: u32) -> f64 {
        self.base_dt * f64::from(1u32 << level)
    }

    /// Increment over `[k·δ_L, (k+1)·δ_L)` with `δ_L = base_dt · 2^level`.
    pub fn increment(&self, k: u64, level: u32) -> NoiseIncrement {
        let width = 1u64 << level;
        let mut field = SpectralField::zeros(self.grid);
        for j in k * width..(k + 1) * width {
            let base = sample_increment(self.grid, self.base_dt, self.seed, j).expect("positive base step");
            field += &base.field;
        }
        if self.sign != 1.0 {
            field = &field * self.sign;
        }
        NoiseIncrement { field, dt: self.step_dt(level) }
    }

    /// First-half and full increments of step `k` at `level ≥ 1`.
    pub fn split_increment(&self, k: u64, level: u32) -> (NoiseIncrement, NoiseIncrement) {
        assert!(level >= 1, "split increments need level ≥ 1");
        let first = self.increment(2 * k, level - 1);
        let second = self.increment(2 * k + 1, level - 1);
        let full = first.join(&second);
        (first, full)
    }
}

/// Per-mode 2×2 covariance `Σ_n(δ)` of the stochastic convolution over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCovariance {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

impl StepCovariance {
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.s11 + self.s22);
        let diff = 0.5 * (self.s11 - self.s22);
        let r = (diff * diff + self.s12 * self.s12).sqrt();
        (mean - r, mean + r)
    }

    /// Lower-triangular factor `(l11, l21, l22)` with `L Lᵀ = Σ`.
    pub fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.s11.max(0.0).sqrt();
        let l21 = if l11 > 0.0 { self.s12 / l11 } else { 0.0 };
        let l22 = (self.s22 - l21 * l21).max(0.0).sqrt();
        (l11, l21, l22)
    }

    fn scaled(self, a: f64) -> Self {
        Self { s11: a * self.s11, s12: a * self.s12, s22: a * self.s22 }
    }
}

/// Forcing amplitude `√2⟨n⟩^{-s}` of mode `n`.
pub fn forcing_amplitude(mode: ModeIndex, s: f64) -> f64 {
    std::f64::consts::SQRT_2 * mode.bracket().powf(-s)
}

/// `Σ_n(δ) = 2⟨n⟩^{-2s} ∫₀^δ e^{-r} m(r) m(r)ᵀ dr` with
/// `m(r) = (sin(ωr)/ω, cos(ωr) - sin(ωr)/(2ω))`, `ω = ⟨n⟩`.
///
/// `dt = f64::INFINITY` gives the stationary covariance.
pub fn step_covariance(mode: ModeIndex, dt: f64, s: f64) -> StepCovariance {
    let sigma_sq = forcing_amplitude(mode, s).powi(2);
    unit_step_covariance(mode.bracket(), dt).scaled(sigma_sq)
}

/// The integral `∫₀^δ e^{-r} m mᵀ dr` for frequency `ω`.
pub(crate) fn unit_step_covariance(omega: f64, dt: f64) -> StepCovariance {
    assert!(dt >= 0.0, "covariance step must be nonnegative");
    let k = 2.0 * omega;
    let (sin2, sincos, cos2) = if dt.is_infinite() {
        let denom = 1.0 + k * k;
        let ic = 1.0 / denom;
        let is = k / denom;
        ((1.0 - ic) / 2.0, is / 2.0, (1.0 + ic) / 2.0)
    } else if dt * k.max(1.0) < 0.5 {
        gauss_legendre_moments(omega, dt)
    } else {
        let e = (-dt).exp();
        let (sk, ck) = (k * dt).sin_cos();
        let i0 = -(-dt).exp_m1();
        let ic = (1.0 - e * (ck - k * sk)) / (1.0 + k * k);
        let is = (k - e * (sk + k * ck)) / (1.0 + k * k);
        ((i0 - ic) / 2.0, is / 2.0, (i0 + ic) / 2.0)
    };
    StepCovariance {
        s11: sin2 / (omega * omega),
        s12: sincos / omega - sin2 / (2.0 * omega * omega),
        s22: cos2 - sincos / omega + sin2 / (4.0 * omega * omega),
    }
}

fn gauss_legendre_moments(omega: f64, dt: f64) -> (f64, f64, f64) {
    let (nodes, weights) = gauss_legendre_16();
    let half = dt / 2.0;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        let r = half * (x + 1.0);
        let (s, co) = (omega * r).sin_cos();
        let e = (-r).exp() * w * half;
        a += e * s * s;
        b += e * s * co;
        c += e * co * co;
    }
    (a, b, c)
}

fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut nodes = [0.0; N];
        let mut weights = [0.0; N];
        for i in 0..N {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(N, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(N, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Value of the stochastic convolution `Ψ_t` and the randomness that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StochConvState {
    pub value: PairField,
    pub t: f64,
    pub lineage: RngLineage,
}

impl StochConvState {
    /// `Ψ_0 = 0`.
    pub fn new(grid: SpectralGrid, seed: u64) -> Self {
        Self { value: PairField::zeros(grid), t: 0.0, lineage: RngLineage::new(seed) }
    }
}

/// How one step of the stochastic convolution is driven.
#[derive(Debug, Clone, Copy)]
pub enum StickForcing<'a> {
    /// Gaussian with covariance `Σ_n(δ)` from the state's own counter stream; exact in law.
    Exact,
    /// First-order update from supplied white-noise increments, so that other
    /// objects can be driven by the same realisation.
    Shared(&'a NoiseIncrement),
}

/// Precomputed per-mode data for stepping `Ψ` with a fixed step `dt`.
#[derive(Debug, Clone)]
pub struct StickStepper {
    propagator: PropagatorTable,
    amplitude: Vec<f64>,
    cholesky: Vec<(f64, f64, f64)>,
    s: f64,
}

impl StickStepper {
    pub fn new(grid: SpectralGrid, dt: f64, s: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("stick step must be positive, got {dt}")));
        }
        let propagator = PropagatorTable::new(grid, dt);
        let amplitude = grid.modes().map(|m| forcing_amplitude(m, s)).collect();
        let cholesky = grid.modes().map(|m| step_covariance(m, dt, s).cholesky()).collect();
        Ok(Self { propagator, amplitude, cholesky, s })
    }

    pub fn dt(&self) -> f64 {
        self.propagator.dt()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn propagator(&self) -> &PropagatorTable {
        &self.propagator
    }

    /// `√2⟨n⟩^{-s}` per storage index.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitude
    }

    /// `(0, √2⟨∇⟩^{-s} f)`.
    pub fn forcing_pair(&self, f: &SpectralField) -> PairField {
        let mut ut = f.clone();
        for (c, a) in ut.coeffs_mut().iter_mut().zip(&self.amplitude) {
            *c *= *a;
        }
        PairField { u: SpectralField::zeros(f.grid()), ut }
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &mut StochConvState, forcing: StickForcing<'_>) -> Result<()> {
        let grid = state.value.grid();
        if grid != self.propagator.grid() {
            return Err(Error::GridMismatch("stick state and stepper grids differ".into()));
        }
        match forcing {
            StickForcing::Shared(incr) => {
                if incr.grid() != grid {
                    return Err(Error::GridMismatch("noise increment grid differs from stick grid".into()));
                }
                if (incr.dt - self.dt()).abs() > 1e-12 * self.dt() {
                    return Err(Error::InvalidArgument(format!(
                        "increment spans {} but the stepper uses {}",
                        incr.dt,
                        self.dt()
                    )));
                }
                state.value.ut.axpy(1.0, &self.forcing_pair(&incr.field).ut);
                self.propagator.apply_in_place(&mut state.value);
            }
            StickForcing::Exact => {
                self.propagator.apply_in_place(&mut state.value);
                let mut normals = CounterNormals::new(state.lineage.seed, PURPOSE_EXACT, state.lineage.step);
                let (u, ut) = (state.value.u.coeffs_mut(), state.value.ut.coeffs_mut());
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                for idx in grid.half_indices() {
                    let g = normals.next_block();
                    let (l11, l21, l22) = self.cholesky[idx];
                    let (z1, z2) = if grid.mode_at(idx).is_zero() {
                        (Complex64::new(g[0], 0.0), Complex64::new(g[2], 0.0))
                    } else {
                        (Complex64::new(g[0], g[1]) * inv_sqrt2, Complex64::new(g[2], g[3]) * inv_sqrt2)
                    };
                    let eta_u = z1 * l11;
                    let eta_ut = z1 * l21 + z2 * l22;
                    u[idx] += eta_u;
                    ut[idx] += eta_ut;
                    let mirror = grid.mirror(idx);
                    if mirror != idx {
                        u[mirror] = u[idx].conj();
                        ut[mirror] = ut[idx].conj();
                    }
                }
            }
        }
        state.t += self.dt();
        state.lineage.step += 1;
        Ok(())
    }
}

/// One step of the stochastic convolution; see [`StickStepper`] for repeated use.
pub fn stick_step(state: &StochConvState, dt: f64, s: f64, forcing: StickForcing<'_>) -> Result<StochConvState> {
    let stepper = StickStepper::new(state.value.grid(), dt, s)?;
    let mut next = state.clone();
    stepper.step(&mut next, forcing)?;
    Ok(next)
}

/// Long-time second moments of one mode of `Ψ`.
#[derive(Debug, Clone, Serialize)]
pub struct ModeMoments {
    pub mode: ModeIndex,
    /// Empirical `E|û(n)|²` at each report time.
    pub var_u: Vec<f64>,
    pub stderr_u: Vec<f64>,
    /// Empirical `E|∂ₜû(n)|²` at each report time.
    pub var_ut: Vec<f64>,
    pub stderr_ut: Vec<f64>,
    /// Stationary values `Σ₁₁(∞)`, `Σ₂₂(∞)`.
    pub stationary_u: f64,
    pub stationary_ut: f64,
    /// Set when two report times differ by more than five combined standard errors.
    pub drifts: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryReport {
    pub s: f64,
    pub n: usize,
    pub samples: usize,
    pub times: Vec<f64>,
    pub modes: Vec<ModeMoments>,
}

impl StationaryReport {
    pub fn drifting_modes(&self) -> impl Iterator<Item = &ModeMoments> {
        self.modes.iter().filter(|m| m.drifts)
    }
}

/// Per-mode variances of `Ψ_t` at `t ∈ {10, 20, 40}` over independent exact paths.
pub fn stationary_moment_report(s: f64, n: usize, n_samples: usize, seed: u64) -> Result<StationaryReport> {
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {n_samples}")));
    }
    let grid = SpectralGrid::with_default_resolution(n);
    let times = vec![10.0, 20.0, 40.0];
    let steppers = [
        StickStepper::new(grid, 10.0, s)?,
        StickStepper::new(grid, 10.0, s)?,
        StickStepper::new(grid, 20.0, s)?,
    ];
    let reps: Vec<usize> = grid.half_indices().collect();
    let mut sum_u = vec![[0.0; 3]; reps.len()];
    let mut sq_u = vec![[0.0; 3]; reps.len()];
    let mut sum_ut = vec![[0.0; 3]; reps.len()];
    let mut sq_ut = vec![[0.0; 3]; reps.len()];
    for sample in 0..n_samples {
        let mut state = StochConvState::new(grid, seed.wrapping_add(sample as u64));
        for (k, stepper) in steppers.iter().enumerate() {
            stepper.step(&mut state, StickForcing::Exact)?;
            for (r, &idx) in reps.iter().enumerate() {
                let a = state.value.u.coeffs()[idx].norm_sqr();
                let b = state.value.ut.coeffs()[idx].norm_sqr();
                sum_u[r][k] += a;
                sq_u[r][k] += a * a;
                sum_ut[r][k] += b;
                sq_ut[r][k] += b * b;
            }
        }
    }
    let ns = n_samples as f64;
    let moments = |sum: &[f64; 3], sq: &[f64; 3]| -> (Vec<f64>, Vec<f64>) {
        (0..3)
            .map(|k| {
                let mean = sum[k] / ns;
                let var = (sq[k] / ns - mean * mean).max(0.0) * ns / (ns - 1.0);
                (mean, (var / ns).sqrt())
            })
            .unzip()
    };
    let drifting = |v: &[f64], se: &[f64]| {
        (0..3).any(|i| {
            (i + 1..3).any(|j| (v[i] - v[j]).abs() > 5.0 * (se[i] * se[i] + se[j] * se[j]).sqrt())
        })
    };
    let modes = reps
        .iter()
        .enumerate()
        .map(|(r, &idx)| {
            let mode = grid.mode_at(idx);
            let (var_u, stderr_u) = moments(&sum_u[r], &sq_u[r]);
            let (var_ut, stderr_ut) = moments(&sum_ut[r], &sq_ut[r]);
            let stationary = step_covariance(mode, f64::INFINITY, s);
            let drifts = drifting(&var_u, &stderr_u) || drifting(&var_ut, &stderr_ut);
            ModeMoments {
                mode,
                var_u,
                stderr_u,
                var_ut,
                stderr_ut,
                stationary_u: stationary.s11,
                stationary_ut: stationary.s22,
                drifts,
            }
        })
        .collect();
    Ok(StationaryReport { s, n, samples: n_samples, times, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential_draws() {
        let mut seq = CounterNormals::new(9, PURPOSE_EXACT, 4);
        let blocks: Vec<[f64; 4]> = (0..5).map(|_| seq.next_block()).collect();
        let mut random = CounterNormals::new(9, PURPOSE_EXACT, 4);
        for k in [3usize, 0, 4, 1] {
            assert_eq!(random.slot(k), blocks[k]);
        }
    }

    #[test]
    fn single_modes_match_full_draw() {
        let grid = SpectralGrid::with_default_resolution(3);
        let full = sample_increment(grid, 0.02, 11, 6).unwrap();
        for mode in grid.modes() {
            assert_eq!(sample_increment_mode(grid, 0.02, 11, 6, mode).unwrap(), full.field.coeff(mode));
        }
        assert!(sample_increment_mode(grid, 0.02, 11, 6, ModeIndex::new(4, 0)).is_err());
    }

    #[test]
    fn increments_are_hermitian_with_real_mean() {
        let grid = SpectralGrid::with_default_resolution(3);
        let incr = sample_increment(grid, 0.01, 5, 17).unwrap();
        assert!(incr.field.is_hermitian());
        assert_eq!(incr.field.coeff(ModeIndex::ZERO).im, 0.0);
        for mode in grid.modes() {
            assert_eq!(incr.field.coeff(-mode) - incr.field.coeff(mode).conj(), Complex64::new(0.0, 0.0));
        }
        assert!(sample_increment(grid, 0.0, 5, 0).is_err());
    }

    #[test]
    fn same_seed_same_path() {
        let grid = SpectralGrid::with_default_resolution(2);
        let a = BrownianPath::new(grid, 3, 0.01);
        let b = BrownianPath::new(grid, 3, 0.01);
        assert_eq!(a.increment(12, 2), b.increment(12, 2));
        assert_ne!(a.increment(12, 2), BrownianPath::new(grid, 4, 0.01).increment(12, 2));
        let (first, full) = a.split_increment(5, 1);
        assert_eq!(first, a.increment(10, 0));
        assert_eq!(full.field, &a.increment(10, 0).field + &a.increment(11, 0).field);
    }

    #[test]
    fn small_step_limit_forces_velocity_only() {
        let mode = ModeIndex::new(1, 2);
        let s = 0.7;
        let dt = 1e-7;
        let cov = step_covariance(mode, dt, s);
        let scale = 2.0 * mode.bracket().powf(-2.0 * s);
        assert!((cov.s22 / dt - scale).abs() < 1e-5 * scale);
        assert!(cov.s11 / dt < 1e-10);
        assert!(cov.s12.abs() / dt < 1e-6);
    }

    #[test]
    fn stationary_position_variance_closed_form() {
        for &(k1, k2, s) in &[(0, 0, 0.0), (1, 0, 1.0), (2, 3, 0.5)] {
            let mode = ModeIndex::new(k1, k2);
            let cov = step_covariance(mode, f64::INFINITY, s);
            let expected = mode.bracket().powf(-2.0 * s) / (1.0 + mode.laplacian_symbol());
            assert!((cov.s11 - expected).abs() < 1e-14 * expected.max(1.0));
        }
    }

    #[test]
    fn covariance_branches_agree_at_switch() {
        for &(omega, dt) in &[(3.0f64, 0.5f64 / 6.0), (0.9, 0.45), (10.0, 0.02)] {
            let k = 2.0 * omega;
            let (e, (sk, ck)) = ((-dt).exp(), (k * dt).sin_cos());
            let i0 = -(-dt).exp_m1();
            let ic = (1.0 - e * (ck - k * sk)) / (1.0 + k * k);
            let is = (k - e * (sk + k * ck)) / (1.0 + k * k);
            let (a, b, c) = gauss_legendre_moments(omega, dt);
            assert!((a - (i0 - ic) / 2.0).abs() < 1e-15);
            assert!((b - is / 2.0).abs() < 1e-15);
            assert!((c - (i0 + ic) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn report_rejects_few_samples() {
        assert!(stationary_moment_report(1.0, 2, 50, 0).is_err());
    }
}

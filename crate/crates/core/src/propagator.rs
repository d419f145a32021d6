//! Exact damped-wave semigroup `S(t)` acting mode by mode, and the `X^α` norm.
//!
//! For each frequency the linear equation `ü + u̇ + (1 - Δ)u = 0` has
//! characteristic roots `-1/2 ± i⟨n⟩`, so `S(t)` is an explicit 2×2 real matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{combine_lp, pair_norm_padded, ModeIndex, PairField, SpectralGrid, DEFAULT_NORM_PADDING};

/// 2×2 action of `S(t)` on `(û(n), ∂ₜû(n))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl ModeMatrix {
    pub const IDENTITY: ModeMatrix = ModeMatrix { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    #[inline]
    pub fn apply(&self, u: Complex64, ut: Complex64) -> (Complex64, Complex64) {
        (u * self.m11 + ut * self.m12, u * self.m21 + ut * self.m22)
    }

    pub fn compose(&self, rhs: &ModeMatrix) -> ModeMatrix {
        ModeMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn max_abs_diff(&self, other: &ModeMatrix) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// `sin(tω)/ω`, with a series branch when `tω` is tiny.
#[inline]
pub(crate) fn sinc_ratio(t: f64, omega: f64) -> f64 {
    let x = t * omega;
    if x.abs() < 1e-4 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / omega
    }
}

/// `S(t)` restricted to a mode of frequency `ω = ⟨n⟩`.
pub fn damped_wave_matrix(omega: f64, t: f64) -> ModeMatrix {
    debug_assert!(t >= 0.0, "propagator time must be nonnegative");
    let decay = (-0.5 * t).exp();
    let c = (t * omega).cos();
    let s_over = sinc_ratio(t, omega);
    let s = s_over * omega;
    ModeMatrix {
        m11: decay * (c + 0.5 * s_over),
        m12: decay * s_over,
        m21: -decay * (omega + 0.25 / omega) * s,
        m22: decay * (c - 0.5 * s_over),
    }
}

pub fn mode_matrix(mode: ModeIndex, t: f64) -> ModeMatrix {
    damped_wave_matrix(mode.bracket(), t)
}

/// `∫₀^δ S(r) dr` applied to `(0, 1)`: the first-order exponential quadrature
/// weights `(∫ m₁₂, ∫ m₂₂)` for a forcing frozen over one step.
pub fn forcing_weights(omega: f64, dt: f64) -> (f64, f64) {
    let m = damped_wave_matrix(omega, dt);
    // m₂₂ = d/dr m₁₂, and m₁₂ solves ÿ + ẏ + (ω² + 1/4) y = 0 with y(0)=0, ẏ(0)=1.
    let omega0_sq = omega * omega + 0.25;
    let int_m12 = if dt * omega0_sq.sqrt() < 1e-2 {
        // Taylor series of m₁₂: r - r²/2 + (1-ω₀²) r³/6 + (2ω₀²-1) r⁴/24.
        let d2 = dt * dt;
        d2 / 2.0 - d2 * dt / 6.0 + (1.0 - omega0_sq) * d2 * d2 / 24.0
            + (2.0 * omega0_sq - 1.0) * d2 * d2 * dt / 120.0
    } else {
        (1.0 - m.m22 - m.m12) / omega0_sq
    };
    (int_m12, m.m12)
}

/// Per-mode matrices of `S(δ)` for one grid, reused across time steps.
#[derive(Debug, Clone)]
pub struct PropagatorTable {
    grid: SpectralGrid,
    dt: f64,
    matrices: Vec<ModeMatrix>,
}

impl PropagatorTable {
    pub fn new(grid: SpectralGrid, dt: f64) -> Self {
        let matrices = grid.modes().map(|mode| mode_matrix(mode, dt)).collect();
        Self { grid, dt, matrices }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn matrix(&self, index: usize) -> &ModeMatrix {
        &self.matrices[index]
    }

    pub fn apply(&self, v: &PairField) -> PairField {
        let mut out = v.clone();
        self.apply_in_place(&mut out);
        out
    }

    pub fn apply_in_place(&self, v: &mut PairField) {
        assert_eq!(v.grid(), self.grid, "propagator table applied on a foreign grid");
        let (u, ut) = (v.u.coeffs_mut(), v.ut.coeffs_mut());
        for ((a, b), m) in u.iter_mut().zip(ut.iter_mut()).zip(&self.matrices) {
            let (na, nb) = m.apply(*a, *b);
            *a = na;
            *b = nb;
        }
    }
}

/// `S(t)v`, multiplying each mode by its [`ModeMatrix`].
pub fn apply_s(v: &PairField, t: f64) -> PairField {
    assert!(t >= 0.0, "propagator time must be nonnegative");
    if t == 0.0 {
        return v.clone();
    }
    let grid = v.grid();
    let mut out = v.clone();
    let (u, ut) = (out.u.coeffs_mut(), out.ut.coeffs_mut());
    for (i, (a, b)) in u.iter_mut().zip(ut.iter_mut()).enumerate() {
        let m = mode_matrix(grid.mode_at(i), t);
        let (na, nb) = m.apply(*a, *b);
        *a = na;
        *b = nb;
    }
    out
}

/// Sampling of the supremum defining `‖·‖_{X^α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XAlphaConfig {
    /// Last sampled time; beyond it only the certified tail bound is used.
    pub t_star: f64,
    /// Uniform spacing of the sampled times on `[0, t_star]`.
    pub dt: f64,
    /// Quadrature padding for the `L^{2/α}` norms.
    pub pad: usize,
}

impl Default for XAlphaConfig {
    fn default() -> Self {
        Self { t_star: 40.0, dt: 0.25, pad: DEFAULT_NORM_PADDING }
    }
}

impl XAlphaConfig {
    pub fn time_grid(&self) -> Vec<f64> {
        let steps = (self.t_star / self.dt).round().max(0.0) as usize;
        (0..=steps).map(|k| k as f64 * self.dt).collect()
    }
}

/// Result of an `X^α` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XAlphaNorm {
    /// `max_k e^{t_k/8} ‖S(t_k)v‖_{𝒲^{α,2/α}}` over the sampled times.
    pub sampled_sup: f64,
    /// Time at which the sampled maximum is attained.
    pub argmax: f64,
    /// Upper bound for `sup_{t > T*} e^{t/8} ‖S(t)v‖` from per-mode `e^{-t/2}` decay.
    pub tail_bound: f64,
}

impl XAlphaNorm {
    /// The larger of the sampled supremum and the tail bound.
    pub fn value(&self) -> f64 {
        self.sampled_sup.max(self.tail_bound)
    }
}

/// `‖v‖_{X^α} = sup_{t≥0} e^{t/8} ‖S(t)v‖_{𝒲^{α,2/α}}` on the default time grid.
pub fn xalpha_norm(v: &PairField, alpha: f64, config: &XAlphaConfig) -> Result<XAlphaNorm> {
    xalpha_norm_on_grid(v, alpha, &config.time_grid(), config.t_star, config.pad)
}

/// `X^α` norm sampled at `t_grid`, with a tail bound certified beyond `t_star`.
///
/// The tail uses `‖g‖_{L^p} ≤ Σ_n |ĝ(n)|` together with entrywise bounds on the
/// mode matrices, so it is valid but generally loose.
pub fn xalpha_norm_on_grid(
    v: &PairField,
    alpha: f64,
    t_grid: &[f64],
    t_star: f64,
    pad: usize,
) -> Result<XAlphaNorm> {
    weighted_sup_norm(v, alpha, 2.0 / alpha, t_grid, t_star, pad)
}

/// `sup_t e^{t/8} ‖S(t)v‖_{𝒲^{α,p}}` sampled at `t_grid`, for any exponent `p ≥ 1`.
pub fn weighted_sup_norm(
    v: &PairField,
    alpha: f64,
    p: f64,
    t_grid: &[f64],
    t_star: f64,
    pad: usize,
) -> Result<XAlphaNorm> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("X^α time grid is empty".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("X^α needs 0 < α < 1, got {alpha}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("L^p exponent must lie in [1, ∞), got {p}")));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] < 0.0 {
        return Err(Error::InvalidArgument("X^α time grid must be increasing and nonnegative".into()));
    }
    let mut sampled_sup = 0.0;
    let mut argmax = t_grid[0];
    let mut state = apply_s(v, t_grid[0]);
    let mut prev_t = t_grid[0];
    for &t in t_grid {
        if t > prev_t {
            state = apply_s(&state, t - prev_t);
            prev_t = t;
        }
        let value = (t / 8.0).exp() * pair_norm_padded(&state, alpha, p, pad);
        if value > sampled_sup {
            sampled_sup = value;
            argmax = t;
        }
    }
    Ok(XAlphaNorm { sampled_sup, argmax, tail_bound: tail_bound(v, alpha, p, t_star) })
}

/// `sup_{t > t_star} e^{t/8} ‖S(t)v‖_{𝒲^{α,2/α}}` bounded via absolute coefficient sums.
pub fn xalpha_tail_bound(v: &PairField, alpha: f64, t_star: f64) -> f64 {
    tail_bound(v, alpha, 2.0 / alpha, t_star)
}

fn tail_bound(v: &PairField, alpha: f64, p: f64, t_star: f64) -> f64 {
    let grid = v.grid();
    let (mut a1, mut a2) = (0.0, 0.0);
    for (i, mode) in grid.modes().enumerate() {
        let omega = mode.bracket();
        let (u, ut) = (v.u.coeffs()[i].norm(), v.ut.coeffs()[i].norm());
        let diag = 1.0 + 0.5 / omega;
        a1 += omega.powf(alpha) * (diag * u + ut / omega);
        a2 += omega.powf(alpha - 1.0) * ((omega + 0.25 / omega) * u + diag * ut);
    }
    (-0.375 * t_star).exp() * combine_lp(a1, a2, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralField;
    use std::f64::consts::PI;

    #[test]
    fn identity_at_time_zero() {
        for k in 0..5 {
            let m = mode_matrix(ModeIndex::new(k, 2 * k - 3), 0.0);
            assert_eq!(m, ModeMatrix::IDENTITY);
        }
    }

    #[test]
    fn zero_mode_full_period() {
        let omega = 0.75_f64.sqrt();
        let t = 2.0 * PI / omega;
        assert!((t - 4.0 * PI / 3.0_f64.sqrt()).abs() < 1e-14);
        let m = mode_matrix(ModeIndex::ZERO, t);
        let expected = (-2.0 * PI / 3.0_f64.sqrt()).exp();
        assert!((expected - 0.026_579_93).abs() < 1e-8);
        assert!(m.max_abs_diff(&ModeMatrix { m11: expected, m12: 0.0, m21: 0.0, m22: expected }) < 1e-12);
    }

    #[test]
    fn determinant_is_wronskian() {
        for &(k1, k2) in &[(0, 0), (1, 0), (3, -2), (8, 8)] {
            for &t in &[1e-6, 0.3, 1.0, 7.5, 30.0] {
                let m = mode_matrix(ModeIndex::new(k1, k2), t);
                assert!((m.det() - (-t).exp()).abs() < 1e-12, "n=({k1},{k2}) t={t}");
            }
        }
    }

    #[test]
    fn forcing_weights_match_quadrature() {
        for &omega in &[0.75_f64.sqrt(), 7.0, 60.0] {
            for &dt in &[1e-5, 1e-3, 0.01, 0.3] {
                let (w1, w2) = forcing_weights(omega, dt);
                let n = 4000;
                let h = dt / n as f64;
                let (mut q1, mut q2) = (0.0, 0.0);
                for k in 0..=n {
                    let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    let m = damped_wave_matrix(omega, k as f64 * h);
                    q1 += w * m.m12;
                    q2 += w * m.m22;
                }
                q1 *= h / 3.0;
                q2 *= h / 3.0;
                assert!((w1 - q1).abs() <= 1e-10 * dt.max(q1.abs()), "ω={omega} δ={dt}: {w1} vs {q1}");
                assert!((w2 - q2).abs() <= 1e-10 * dt.max(q2.abs()), "ω={omega} δ={dt}: {w2} vs {q2}");
            }
        }
    }

    #[test]
    fn empty_time_grid_is_an_error() {
        let v = PairField::zeros(SpectralGrid::with_default_resolution(2));
        assert!(xalpha_norm_on_grid(&v, 0.3, &[], 1.0, 2).is_err());
    }

    #[test]
    fn xalpha_of_zero_and_lower_bound() {
        let g = SpectralGrid::with_default_resolution(3);
        let cfg = XAlphaConfig::default();
        assert_eq!(xalpha_norm(&PairField::zeros(g), 0.3, &cfg).unwrap().value(), 0.0);
        let v = PairField::position(SpectralField::cosine(g, ModeIndex::new(1, 1), 0.7).unwrap());
        let x = xalpha_norm(&v, 0.3, &cfg).unwrap();
        assert!(x.sampled_sup >= pair_norm_padded(&v, 0.3, 2.0 / 0.3, 2));
        assert!(x.tail_bound < 1e-5 * x.sampled_sup);
    }
}

//! Wick-renormalised powers of the stochastic convolution and the polynomial
//! coefficients of the remainder equation.
//!
//! With `𝒩_γ(w) = w³ - 3γw` and `w = u_N + Ψ_N + v`, expanding in `v` gives
//! `𝒩_γ(w) = v³ + a v² + b v + c`. Products are formed pointwise on the
//! physical grid of the [`SpectralGrid`] and re-truncated to `[-N, N]²`.

use crate::error::{Error, Result};
use crate::noise::step_covariance;
use crate::propagator::apply_s;
use crate::spectral::{PairField, SpectralField, SpectralGrid};

/// `𝒩_γ(w) = w³ - 3γw`, evaluated pointwise.
#[inline]
pub fn renormalized_cube(w: f64, gamma: f64) -> f64 {
    w * (w * w - 3.0 * gamma)
}

/// `Ψ`, `:Ψ²:_γ = Ψ² - γ` and `:Ψ³:_γ = Ψ³ - 3γΨ` on the truncated lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct WickPowers {
    pub psi: SpectralField,
    pub psi2: SpectralField,
    pub psi3: SpectralField,
    pub gamma: f64,
}

pub fn wick_powers(psi: &SpectralField, gamma: f64) -> Result<WickPowers> {
    let grid = psi.grid();
    grid.ensure_product_resolution(3)?;
    let x = psi.physical();
    let sq: Vec<f64> = x.iter().map(|p| p * p - gamma).collect();
    let cube: Vec<f64> = x.iter().map(|&p| renormalized_cube(p, gamma)).collect();
    Ok(WickPowers {
        psi: psi.clone(),
        psi2: SpectralField::from_physical(grid, &sq),
        psi3: SpectralField::from_physical(grid, &cube),
        gamma,
    })
}

/// Coefficients `a, b, c` of `v ↦ 𝒩_γ(u_N + Ψ_N + v)`.
///
/// `a` has band `N` but `b` and `c` have bands `2N` and `3N`; all three are
/// kept as samples on the physical grid so that `P_{≤N}(v³ + a v² + b v + c)`
/// is exact. The accessors return their `P_{≤N}` projections.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicCoefficients {
    grid: SpectralGrid,
    gamma: f64,
    base: Vec<f64>,
}

impl CubicCoefficients {
    /// Coefficients around the pointwise base field `w₀ = u_N + Ψ_N`.
    pub fn from_base(base: &SpectralField, gamma: f64) -> Result<Self> {
        let grid = base.grid();
        grid.ensure_product_resolution(3)?;
        Ok(Self { grid, gamma, base: base.physical() })
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `u_N + Ψ_N` on the physical grid.
    pub fn base_samples(&self) -> &[f64] {
        &self.base
    }

    pub fn a_samples(&self) -> Vec<f64> {
        self.base.iter().map(|w| 3.0 * w).collect()
    }

    pub fn b_samples(&self) -> Vec<f64> {
        self.base.iter().map(|w| 3.0 * (w * w - self.gamma)).collect()
    }

    pub fn c_samples(&self) -> Vec<f64> {
        self.base.iter().map(|&w| renormalized_cube(w, self.gamma)).collect()
    }

    pub fn a(&self) -> SpectralField {
        SpectralField::from_physical(self.grid, &self.a_samples())
    }

    pub fn b(&self) -> SpectralField {
        SpectralField::from_physical(self.grid, &self.b_samples())
    }

    pub fn c(&self) -> SpectralField {
        SpectralField::from_physical(self.grid, &self.c_samples())
    }

    /// `v³ + a v² + b v + c` at one sample, given `v` there.
    #[inline]
    pub(crate) fn eval_at(&self, j: usize, v: f64) -> f64 {
        renormalized_cube(self.base[j] + v, self.gamma)
    }
}

/// `a, b, c` for linear data `u0` propagated to time `t` and stick value `psi`.
pub fn cubic_coefficients(u0: &PairField, psi: &SpectralField, t: f64, gamma: f64) -> Result<CubicCoefficients> {
    if u0.grid() != psi.grid() {
        return Err(Error::GridMismatch("initial data and stick live on different grids".into()));
    }
    let n = psi.grid().n() as i64;
    let base = &apply_s(u0, t).u.project_leq(n) + &psi.project_leq(n);
    CubicCoefficients::from_base(&base, gamma)
}

/// `Q(u1, v) = 3((π₁u1)² - γ) + 3 π₁u1 π₁v + (π₁v)²`, so that
/// `𝒩_γ(u1 + v) - 𝒩_γ(u1) = Q · π₁v`.
pub fn quadratic_q(u1: &PairField, v: &PairField, gamma: f64) -> Result<SpectralField> {
    let grid = u1.grid();
    Ok(SpectralField::from_physical(grid, &quadratic_q_samples(u1, v, gamma)?))
}

/// Samples of `Q` on the physical grid, before truncation.
pub(crate) fn quadratic_q_samples(u1: &PairField, v: &PairField, gamma: f64) -> Result<Vec<f64>> {
    if u1.grid() != v.grid() {
        return Err(Error::GridMismatch("quadratic form arguments live on different grids".into()));
    }
    u1.grid().ensure_product_resolution(2)?;
    let a = u1.u.physical();
    let b = v.u.physical();
    Ok(a.iter().zip(&b).map(|(x, y)| 3.0 * (x * x - gamma) + 3.0 * x * y + y * y).collect())
}

/// Stationary variance `Σ_n Var û(n)` of the truncated stick, a natural choice of `γ`.
pub fn stationary_gamma(s: f64, n: usize) -> f64 {
    let grid = SpectralGrid::with_default_resolution(n);
    grid.modes().map(|mode| step_covariance(mode, f64::INFINITY, s).s11).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::with_default_resolution(n)
    }

    fn assert_const(f: &SpectralField, value: f64) {
        assert!((f.mean() - value).abs() < 1e-12, "mean {} vs {value}", f.mean());
        let rest: f64 = f.coeffs().iter().enumerate().filter(|(i, _)| *i != f.grid().len() / 2).map(|(_, c)| c.norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn wick_powers_of_constant() {
        let w = wick_powers(&SpectralField::constant(grid(2), 2.0), 1.0).unwrap();
        assert_const(&w.psi2, 3.0);
        assert_const(&w.psi3, 2.0);
    }

    #[test]
    fn wick_square_of_cosine() {
        let g = grid(3);
        let psi = SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap();
        let w = wick_powers(&psi, 0.5).unwrap();
        for mode in g.modes() {
            let expected = if mode == ModeIndex::new(2, 0) || mode == ModeIndex::new(-2, 0) { 0.25 } else { 0.0 };
            assert!((w.psi2.coeff(mode).re - expected).abs() < 1e-14);
            assert!(w.psi2.coeff(mode).im.abs() < 1e-14);
        }
    }

    #[test]
    fn unrenormalised_case_matches_products() {
        let g = grid(3);
        let psi = SpectralField::random(g, &mut ChaCha8Rng::seed_from_u64(1), 1.0);
        let w = wick_powers(&psi, 0.0).unwrap();
        let sq = crate::spectral::dealiased_product(&psi, &psi, None).unwrap();
        let cube = crate::spectral::dealiased_product(&psi, &psi, Some(&psi)).unwrap();
        assert!((&w.psi2 - &sq).l2_norm() < 1e-12);
        assert!((&w.psi3 - &cube).l2_norm() < 1e-12);
    }

    #[test]
    fn coefficients_for_constant_stick() {
        let g = grid(2);
        let k = 1.7;
        let cc = cubic_coefficients(&PairField::zeros(g), &SpectralField::constant(g, k), 0.0, 0.0).unwrap();
        assert_const(&cc.a(), 3.0 * k);
        assert_const(&cc.b(), 3.0 * k * k);
        assert_const(&cc.c(), k * k * k);
        let unit = PairField::position(SpectralField::constant(g, 1.0));
        let cc = cubic_coefficients(&unit, &SpectralField::zeros(g), 0.0, 0.0).unwrap();
        assert_const(&cc.a(), 3.0);
        assert_const(&cc.b(), 3.0);
        assert_const(&cc.c(), 1.0);
    }

    #[test]
    fn zero_data_gives_zero_coefficients() {
        let g = grid(2);
        let cc = cubic_coefficients(&PairField::zeros(g), &SpectralField::zeros(g), 3.0, 0.0).unwrap();
        assert_eq!(cc.a().l2_norm() + cc.b().l2_norm() + cc.c().l2_norm(), 0.0);
    }

    #[test]
    fn q_of_constants() {
        let g = grid(2);
        let one = PairField::position(SpectralField::constant(g, 1.0));
        assert_const(&quadratic_q(&one, &one, 0.0).unwrap(), 7.0);
        let q = quadratic_q(&one, &PairField::zeros(g), 0.4).unwrap();
        assert_const(&q, 3.0 * (1.0 - 0.4));
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = PairField::zeros(grid(2));
        let b = PairField::zeros(grid(3));
        assert!(quadratic_q(&a, &b, 0.0).is_err());
        assert!(cubic_coefficients(&a, &SpectralField::zeros(grid(3)), 0.0, 0.0).is_err());
    }

    #[test]
    fn stationary_gamma_grows_with_truncation() {
        let a = stationary_gamma(0.5, 2);
        let b = stationary_gamma(0.5, 4);
        assert!(a > 0.0 && b > a);
    }
}

//! Fourier-lattice representation of real fields on the unit torus `T² = [0,1]²`.
//!
//! A field is stored through its coefficients `f̂(n)` on the square lattice
//! `[-N, N]²`, with `f(x) = Σ_n f̂(n) e^{2πi n·x}`. Real fields carry Hermitian
//! coefficients, `f̂(-n) = conj f̂(n)`. Every constructor and operation in this
//! module keeps that symmetry exact.

mod fft;

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use fft::{analyze, symmetrize, synthesize, synthesize_pair};

/// Default padding factor for `L^p` quadrature with `p ≠ 2`.
pub const DEFAULT_NORM_PADDING: usize = 2;

/// A lattice point `n = (n₁, n₂) ∈ ℤ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k1: i64,
    pub k2: i64,
}

impl ModeIndex {
    pub const ZERO: ModeIndex = ModeIndex { k1: 0, k2: 0 };

    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    pub fn max_abs(&self) -> i64 {
        self.k1.abs().max(self.k2.abs())
    }

    pub fn norm_sq(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2) as f64
    }

    /// `|2πn|²`, the symbol of `-Δ`.
    pub fn laplacian_symbol(&self) -> f64 {
        4.0 * PI * PI * self.norm_sq()
    }

    /// `⟨n⟩ = (3/4 + |2πn|²)^{1/2}`, the symbol of `⟨∇⟩`.
    pub fn bracket(&self) -> f64 {
        (0.75 + self.laplacian_symbol()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }
}

impl Neg for ModeIndex {
    type Output = ModeIndex;
    fn neg(self) -> ModeIndex {
        ModeIndex::new(-self.k1, -self.k2)
    }
}

/// Truncation `N` of the coefficient lattice together with the side `M` of the
/// physical grid used for products and quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralGrid {
    n: usize,
    m: usize,
}

impl SpectralGrid {
    /// Requires `m ≥ 2n+1` so that truncated fields are exactly representable.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let required = 2 * n + 1;
        if m < required {
            return Err(Error::Resolution { n, m, required });
        }
        Ok(Self { n, m })
    }

    /// Grid with `M = 4N+2`, large enough for alias-free cubic products.
    pub fn with_default_resolution(n: usize) -> Self {
        Self { n, m: Self::default_resolution(n) }
    }

    pub fn default_resolution(n: usize) -> usize {
        4 * n + 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of lattice points per axis, `2N+1`.
    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, mode: ModeIndex) -> bool {
        mode.max_abs() <= self.n as i64
    }

    pub fn index(&self, mode: ModeIndex) -> Option<usize> {
        if !self.contains(mode) {
            return None;
        }
        let n = self.n as i64;
        Some(((mode.k1 + n) as usize) * self.side() + (mode.k2 + n) as usize)
    }

    pub fn mode_at(&self, index: usize) -> ModeIndex {
        let side = self.side();
        let n = self.n as i64;
        ModeIndex::new((index / side) as i64 - n, (index % side) as i64 - n)
    }

    /// All lattice points in storage order.
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..self.len()).map(move |i| self.mode_at(i))
    }

    /// Storage indices of one representative per `{n, -n}` pair, zero mode last.
    ///
    /// Indices below the centre are exactly the modes whose mirror lies above it.
    pub fn half_indices(&self) -> impl Iterator<Item = usize> {
        let len = self.len();
        (len / 2 + 1..len).chain(std::iter::once(len / 2))
    }

    /// Storage index of `-n` given the storage index of `n`.
    pub fn mirror(&self, index: usize) -> usize {
        self.len() - 1 - index
    }

    pub(crate) fn ensure_product_resolution(&self, factors: usize) -> Result<()> {
        let required = (factors + 1) * self.n + 1;
        if self.m < required {
            return Err(Error::Resolution { n: self.n, m: self.m, required });
        }
        Ok(())
    }
}

/// One real scalar field on `T²`, stored as Hermitian Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: SpectralGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// The constant field `f ≡ c`.
    pub fn constant(grid: SpectralGrid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[grid.len() / 2] = Complex64::new(c, 0.0);
        f
    }

    /// `amplitude · cos(2π n·x)`.
    pub fn cosine(grid: SpectralGrid, mode: ModeIndex, amplitude: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        if mode.is_zero() {
            f.set_mode(mode, Complex64::new(amplitude, 0.0))?;
        } else {
            f.set_mode(mode, Complex64::new(amplitude / 2.0, 0.0))?;
        }
        Ok(f)
    }

    /// Restores coefficients bit for bit; the caller vouches for the Hermitian symmetry.
    pub(crate) fn from_raw_coeffs(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from raw coefficients, symmetrising them to exact Hermitian form.
    pub fn from_coeffs(grid: SpectralGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        symmetrize(&mut coeffs, grid.n());
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from a coefficient rule evaluated on one half of the lattice;
    /// the other half is filled by conjugation.
    pub fn from_fn(grid: SpectralGrid, mut rule: impl FnMut(ModeIndex) -> Complex64) -> Self {
        let mut f = Self::zeros(grid);
        for idx in grid.half_indices() {
            let mode = grid.mode_at(idx);
            let mut c = rule(mode);
            if mode.is_zero() {
                c.im = 0.0;
            }
            f.coeffs[idx] = c;
            f.coeffs[grid.mirror(idx)] = c.conj();
        }
        f
    }

    /// Random Hermitian field whose coefficients are standard complex Gaussians
    /// scaled by `⟨n⟩^{-decay}`.
    pub fn random<R: Rng + ?Sized>(grid: SpectralGrid, rng: &mut R, decay: f64) -> Self {
        Self::from_fn(grid, |mode| {
            let scale = mode.bracket().powf(-decay);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if mode.is_zero() { 0.0 } else { rng.sample(StandardNormal) };
            Complex64::new(re, im) * scale
        })
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `f̂(n)`; zero outside the lattice.
    pub fn coeff(&self, mode: ModeIndex) -> Complex64 {
        self.grid.index(mode).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Sets `f̂(n) = value` and `f̂(-n) = conj(value)`. At `n = 0` the imaginary
    /// part is dropped.
    pub fn set_mode(&mut self, mode: ModeIndex, value: Complex64) -> Result<()> {
        let idx = self.grid.index(mode).ok_or_else(|| {
            Error::InvalidArgument(format!("mode {mode:?} outside lattice of half-width {}", self.grid.n()))
        })?;
        if mode.is_zero() {
            self.coeffs[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[idx] = value;
            self.coeffs[self.grid.mirror(idx)] = value.conj();
        }
        Ok(())
    }

    /// True when `f̂(-n) = conj f̂(n)` holds exactly and the mean is real.
    pub fn is_hermitian(&self) -> bool {
        let len = self.coeffs.len();
        (0..len).all(|i| self.coeffs[i] == self.coeffs[len - 1 - i].conj())
    }

    /// The spatial mean `f̂(0)`.
    pub fn mean(&self) -> f64 {
        self.coeffs[self.grid.len() / 2].re
    }

    /// `∫ f g dx`, by Plancherel.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum()
    }

    /// `‖f‖_{L²}` by Plancherel.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Sharp projection `P_{≤N}` onto the square `max_j |n_j| ≤ N`; `N = -1` gives zero.
    pub fn project_leq(&self, n: i64) -> Self {
        assert!(n >= -1, "projection level must be at least -1");
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if self.grid.mode_at(i).max_abs() > n {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Applies a real radial multiplier `n ↦ symbol(n)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(ModeIndex) -> f64) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            *c *= symbol(self.grid.mode_at(i));
        }
        out
    }

    /// `⟨∇⟩^σ f`, multiplying each coefficient by `⟨n⟩^σ`.
    pub fn bracket_multiplier(&self, sigma: f64) -> Self {
        if sigma == 0.0 {
            return self.clone();
        }
        self.apply_multiplier(|mode| mode.bracket().powf(sigma))
    }

    /// Samples on the `m × m` physical grid. Requires `m ≥ 2N+1`.
    pub fn to_physical(&self, m: usize) -> Result<Array2<f64>> {
        let required = self.grid.side();
        if m < required {
            return Err(Error::Resolution { n: self.grid.n(), m, required });
        }
        let values = synthesize(self.grid.n(), &self.coeffs, m);
        Ok(Array2::from_shape_vec((m, m), values).expect("m×m buffer"))
    }

    /// Samples on the grid's own physical resolution.
    pub fn physical(&self) -> Vec<f64> {
        synthesize(self.grid.n(), &self.coeffs, self.grid.m())
    }

    /// Inverse of [`SpectralField::to_physical`]: coefficients on `grid` of real
    /// samples on a square array of side at least `2N+1`.
    pub fn to_spectral(grid: SpectralGrid, values: &Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::InvalidArgument(format!("physical array must be square, got {rows}×{cols}")));
        }
        if rows < grid.side() {
            return Err(Error::Resolution { n: grid.n(), m: rows, required: grid.side() });
        }
        let flat: Vec<f64> = values.iter().copied().collect();
        Ok(Self { grid, coeffs: analyze(&flat, rows, grid.n()) })
    }

    /// Truncated coefficients of real samples on the grid's physical resolution.
    pub(crate) fn from_physical(grid: SpectralGrid, values: &[f64]) -> Self {
        Self { grid, coeffs: analyze(values, grid.m(), grid.n()) }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self * a
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "axpy across grids");
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    fn zip_with(&self, other: &SpectralField, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "binary operation across grids");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(*a, *b)).collect();
        Self { grid: self.grid, coeffs }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

/// A phase-space point `(u, ∂ₜu)` on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PairField {
    pub u: SpectralField,
    pub ut: SpectralField,
}

impl PairField {
    pub fn new(u: SpectralField, ut: SpectralField) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::GridMismatch(format!(
                "pair components on {:?} and {:?}",
                u.grid(),
                ut.grid()
            )));
        }
        Ok(Self { u, ut })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Self { u: SpectralField::zeros(grid), ut: SpectralField::zeros(grid) }
    }

    /// `(u, 0)`.
    pub fn position(u: SpectralField) -> Self {
        let ut = SpectralField::zeros(u.grid());
        Self { u, ut }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.u.grid()
    }

    pub fn project_leq(&self, n: i64) -> Self {
        Self { u: self.u.project_leq(n), ut: self.ut.project_leq(n) }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.ut.is_finite()
    }

    pub fn is_hermitian(&self) -> bool {
        self.u.is_hermitian() && self.ut.is_hermitian()
    }

    pub fn axpy(&mut self, a: f64, other: &PairField) {
        self.u.axpy(a, &other.u);
        self.ut.axpy(a, &other.ut);
    }

    /// `‖·‖_{ℋ¹}`, i.e. `(‖⟨∇⟩u‖²_{L²} + ‖u_t‖²_{L²})^{1/2}`.
    pub fn h1_norm(&self) -> f64 {
        pair_norm(self, 1.0, 2.0)
    }
}

impl Add for &PairField {
    type Output = PairField;
    fn add(self, rhs: &PairField) -> PairField {
        PairField { u: &self.u + &rhs.u, ut: &self.ut + &rhs.ut }
    }
}

impl Sub for &PairField {
    type Output = PairField;
    fn sub(self, rhs: &PairField) -> PairField {
        PairField { u: &self.u - &rhs.u, ut: &self.ut - &rhs.ut }
    }
}

impl Neg for &PairField {
    type Output = PairField;
    fn neg(self) -> PairField {
        PairField { u: -&self.u, ut: -&self.ut }
    }
}

impl Mul<f64> for &PairField {
    type Output = PairField;
    fn mul(self, a: f64) -> PairField {
        PairField { u: &self.u * a, ut: &self.ut * a }
    }
}

impl AddAssign<&PairField> for PairField {
    fn add_assign(&mut self, rhs: &PairField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&PairField> for PairField {
    fn sub_assign(&mut self, rhs: &PairField) {
        self.axpy(-1.0, rhs);
    }
}

/// Exact coefficients of `f·g` (or `f·g·h`) on the truncated lattice.
///
/// The grid's physical resolution must satisfy `M ≥ 3N+1` for two factors and
/// `M ≥ 4N+1` for three, so no aliased frequency lands inside `[-N, N]²`.
pub fn dealiased_product(
    f: &SpectralField,
    g: &SpectralField,
    h: Option<&SpectralField>,
) -> Result<SpectralField> {
    let grid = f.grid();
    if g.grid() != grid || h.is_some_and(|h| h.grid() != grid) {
        return Err(Error::GridMismatch("product factors live on different grids".into()));
    }
    grid.ensure_product_resolution(if h.is_some() { 3 } else { 2 })?;
    let (mut prod, gv) = synthesize_pair(grid.n(), f.coeffs(), g.coeffs(), grid.m());
    for (p, q) in prod.iter_mut().zip(&gv) {
        *p *= q;
    }
    if let Some(h) = h {
        let hv = h.physical();
        for (p, q) in prod.iter_mut().zip(&hv) {
            *p *= q;
        }
    }
    Ok(SpectralField::from_physical(grid, &prod))
}

/// `(mean |v|^p)^{1/p}` over equally weighted samples of the unit torus.
pub(crate) fn lp_mean_norm(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    if p == 2.0 {
        return (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    }
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    // Scale by the peak so large exponents stay representable.
    let s: f64 = values.iter().map(|v| (v.abs() / peak).powf(p)).sum::<f64>() / n;
    peak * s.powf(1.0 / p)
}

/// `‖⟨∇⟩^α f‖_{L^p}` with the default quadrature padding.
pub fn sobolev_norm(f: &SpectralField, alpha: f64, p: f64) -> f64 {
    sobolev_norm_padded(f, alpha, p, DEFAULT_NORM_PADDING)
}

/// `‖⟨∇⟩^α f‖_{L^p}`. For `p = 2` this is the exact Plancherel sum; otherwise the
/// `L^p` integral is a trapezoidal quadrature on a grid of side `pad·(2N+1)`.
pub fn sobolev_norm_padded(f: &SpectralField, alpha: f64, p: f64, pad: usize) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "L^p exponent must lie in [1, ∞)");
    let grid = f.grid();
    if p == 2.0 {
        return grid
            .modes()
            .zip(f.coeffs())
            .map(|(mode, c)| mode.bracket().powf(2.0 * alpha) * c.norm_sqr())
            .sum::<f64>()
            .sqrt();
    }
    let m = pad.max(1) * grid.side();
    let weighted = f.bracket_multiplier(alpha);
    lp_mean_norm(&synthesize(grid.n(), weighted.coeffs(), m), p)
}

/// `‖(u, u_t)‖_{𝒲^{α,p}} = (‖⟨∇⟩^α u‖_p^p + ‖⟨∇⟩^{α-1} u_t‖_p^p)^{1/p}`.
pub fn pair_norm(v: &PairField, alpha: f64, p: f64) -> f64 {
    pair_norm_padded(v, alpha, p, DEFAULT_NORM_PADDING)
}

pub fn pair_norm_padded(v: &PairField, alpha: f64, p: f64, pad: usize) -> f64 {
    let a = sobolev_norm_padded(&v.u, alpha, p, pad);
    let b = sobolev_norm_padded(&v.ut, alpha - 1.0, p, pad);
    combine_lp(a, b, p)
}

pub(crate) fn combine_lp(a: f64, b: f64, p: f64) -> f64 {
    let peak = a.max(b);
    if peak == 0.0 {
        return 0.0;
    }
    peak * ((a / peak).powf(p) + (b / peak).powf(p)).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::with_default_resolution(n)
    }

    #[test]
    fn projection_edge_cases() {
        let g = grid(4);
        let f = SpectralField::cosine(g, ModeIndex::new(3, 0), 1.0).unwrap();
        assert_eq!(f.project_leq(2), SpectralField::zeros(g));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = SpectralField::random(g, &mut rng, 0.5);
        assert_eq!(r.project_leq(-1), SpectralField::zeros(g));
        assert_eq!(r.project_leq(4), r);
        assert_eq!(r.project_leq(10), r);
    }

    #[test]
    fn bracket_multiplier_values() {
        let g = grid(2);
        let c = SpectralField::constant(g, 1.0).bracket_multiplier(1.0);
        assert!((c.coeff(ModeIndex::ZERO).re - 0.75_f64.sqrt()).abs() < 1e-15);
        assert!((0.75_f64.sqrt() - 0.8660254).abs() < 1e-7);

        let f = SpectralField::cosine(g, ModeIndex::new(1, 0), 2.0).unwrap();
        let scaled = f.bracket_multiplier(-2.0);
        let expected = 1.0 / (0.75 + 4.0 * PI * PI);
        assert!((expected - 0.024858_05).abs() < 1e-8);
        assert!((scaled.coeff(ModeIndex::new(1, 0)).re - expected).abs() < 1e-15);
        assert_eq!(f.bracket_multiplier(0.0), f);
    }

    #[test]
    fn physical_samples_of_simple_fields() {
        let g = grid(3);
        let c = SpectralField::constant(g, 2.5).to_physical(9).unwrap();
        assert!(c.iter().all(|v| (v - 2.5).abs() < 1e-14));

        let m = 11;
        let f = SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap();
        let phys = f.to_physical(m).unwrap();
        for j1 in 0..m {
            for j2 in 0..m {
                let expected = (2.0 * PI * j1 as f64 / m as f64).cos();
                assert!((phys[[j1, j2]] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn too_coarse_physical_grid_is_rejected() {
        let g = grid(3);
        let f = SpectralField::constant(g, 1.0);
        assert!(matches!(f.to_physical(6), Err(Error::Resolution { required: 7, .. })));
        assert!(SpectralGrid::new(3, 6).is_err());
    }

    #[test]
    fn cube_of_cosine() {
        let g = grid(3);
        let f = SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap();
        let cube = dealiased_product(&f, &f, Some(&f)).unwrap();
        for mode in g.modes() {
            let expected = match (mode.k1.abs(), mode.k2) {
                (1, 0) => 3.0 / 8.0,
                (3, 0) => 1.0 / 8.0,
                _ => 0.0,
            };
            assert!((cube.coeff(mode).re - expected).abs() < 1e-14, "{mode:?}");
            assert!(cube.coeff(mode).im.abs() < 1e-14);
        }
    }

    #[test]
    fn product_of_constants() {
        let g = grid(2);
        let p = dealiased_product(&SpectralField::constant(g, 3.0), &SpectralField::constant(g, -2.0), None)
            .unwrap();
        assert!((p.mean() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn triple_product_needs_padding() {
        let g = SpectralGrid::new(4, 14).unwrap();
        let f = SpectralField::constant(g, 1.0);
        assert!(dealiased_product(&f, &f, None).is_ok());
        assert!(matches!(dealiased_product(&f, &f, Some(&f)), Err(Error::Resolution { required: 17, .. })));
    }

    #[test]
    fn sobolev_norm_simple_cases() {
        let g = grid(3);
        let c = SpectralField::constant(g, -2.0);
        for &(alpha, p) in &[(0.0, 2.0), (1.0, 2.0), (0.3, 4.0), (-0.7, 6.5)] {
            let expected = 2.0 * 0.75_f64.powf(alpha / 2.0);
            assert!((sobolev_norm(&c, alpha, p) - expected).abs() < 1e-13, "α={alpha} p={p}");
        }
        let f = SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap();
        assert!((sobolev_norm(&f, 0.0, 2.0) - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pair_norm_cases() {
        let g = grid(3);
        assert_eq!(pair_norm(&PairField::zeros(g), 0.5, 3.0), 0.0);
        let c = SpectralField::constant(g, 1.5);
        let pair = PairField::position(c.clone());
        assert!((pair_norm(&pair, 0.3, 5.0) - sobolev_norm(&c, 0.3, 5.0)).abs() < 1e-14);
        let cos = SpectralField::cosine(g, ModeIndex::new(1, 0), 1.0).unwrap();
        let vel = PairField::new(SpectralField::zeros(g), cos).unwrap();
        assert!((pair_norm(&vel, 1.0, 2.0) - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pair_requires_shared_grid() {
        let a = SpectralField::zeros(grid(2));
        let b = SpectralField::zeros(grid(3));
        assert!(matches!(PairField::new(a, b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn half_indices_cover_lattice() {
        let g = grid(3);
        let mut seen = vec![false; g.len()];
        for idx in g.half_indices() {
            assert!(!seen[idx]);
            seen[idx] = true;
            seen[g.mirror(idx)] = true;
            assert_eq!(g.mode_at(g.mirror(idx)), -g.mode_at(idx));
        }
        assert!(seen.into_iter().all(|s| s));
    }
}

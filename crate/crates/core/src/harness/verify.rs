//! Self-test suite of analytic identities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coupling::{mollify, CouplingConfig, CouplingRecord, CouplingStepper};
use crate::dynamics::{energy, nonlinearity, restart_check, Integrator, RestartLeg, SimConfig};
use crate::error::Result;
use crate::noise::step_covariance;
use crate::propagator::{apply_s, mode_matrix};
use crate::renormalization::CubicCoefficients;
use crate::spectral::{dealiased_product, ModeIndex, PairField, SpectralField, SpectralGrid};

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &'static str, error: f64, tolerance: f64) -> Self {
        Self { name, error, tolerance, passed: error <= tolerance }
    }
}

pub fn run_verify_suite() -> Result<Vec<IdentityCheck>> {
    Ok(vec![
        IdentityCheck::new("semigroup S(t)S(r) = S(t+r)", semigroup_error(8, 10)?, 1e-11),
        IdentityCheck::new("det S(t) = exp(-t)", determinant_error(8), 1e-12),
        IdentityCheck::new("dealiased product vs direct convolution", product_error(3)?, 1e-12),
        IdentityCheck::new("cubic coefficients vs Wick expansion", wick_error(3)?, 1e-11),
        IdentityCheck::new("mollifier composition", mollifier_error(6)?, 1e-15),
        IdentityCheck::new("step covariance vs Simpson quadrature", covariance_error(4), 1e-10),
        IdentityCheck::new("same-scheme restart", restart_error()?, 1e-12),
        IdentityCheck::new("zero shift for equal data", zero_shift_cost()?, 0.0),
        IdentityCheck::new("energy of u = 1", (energy(&constant_pair(1.0)) - 0.875).abs(), 1e-14),
    ])
}

pub fn format_table(checks: &[IdentityCheck]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = format!("{:<width$}  {:>10}  {:>10}  result\n", "check", "error", "tolerance");
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  {:>10.3e}  {:>10.1e}  {}\n",
            c.name,
            c.error,
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_pair(grid: SpectralGrid, r: &mut ChaCha8Rng) -> PairField {
    PairField::new(SpectralField::random(grid, r, 1.0), SpectralField::random(grid, r, 0.0)).expect("same grid")
}

fn constant_pair(c: f64) -> PairField {
    PairField::position(SpectralField::constant(SpectralGrid::with_default_resolution(2), c))
}

fn semigroup_error(n: usize, cases: usize) -> Result<f64> {
    use rand::Rng;
    let grid = SpectralGrid::with_default_resolution(n);
    let mut r = rng(11);
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let v = random_pair(grid, &mut r);
        let (t, s) = (r.gen_range(0.0..3.0), r.gen_range(0.0..3.0));
        let diff = &apply_s(&apply_s(&v, s), t) - &apply_s(&v, t + s);
        worst = worst.max(diff.h1_norm() / v.h1_norm());
    }
    Ok(worst)
}

fn determinant_error(n: usize) -> f64 {
    let grid = SpectralGrid::with_default_resolution(n);
    let mut worst = 0.0_f64;
    for t in [0.1, 1.0, 5.0] {
        for mode in grid.modes() {
            worst = worst.max((mode_matrix(mode, t).det() - (-t as f64).exp()).abs());
        }
    }
    worst
}

fn product_error(n: usize) -> Result<f64> {
    let grid = SpectralGrid::with_default_resolution(n);
    let mut r = rng(12);
    let (f, g, h) =
        (SpectralField::random(grid, &mut r, 0.5), SpectralField::random(grid, &mut r, 0.5), SpectralField::random(grid, &mut r, 0.5));
    let fast = dealiased_product(&f, &g, Some(&h))?;
    let fg = direct_convolution(&f, &g, 2 * n as i64);
    let mut worst = 0.0_f64;
    for k in grid.modes() {
        let mut sum = num_complex::Complex64::new(0.0, 0.0);
        for q in grid.modes() {
            let p = ModeIndex::new(k.k1 - q.k1, k.k2 - q.k2);
            if let Some(c) = fg.get(&p) {
                sum += c * h.coeff(q);
            }
        }
        worst = worst.max((fast.coeff(k) - sum).norm());
    }
    Ok(worst)
}

fn direct_convolution(f: &SpectralField, g: &SpectralField, band: i64) -> std::collections::HashMap<ModeIndex, num_complex::Complex64> {
    let mut out = std::collections::HashMap::new();
    for p in f.grid().modes() {
        for q in g.grid().modes() {
            let k = ModeIndex::new(p.k1 + q.k1, p.k2 + q.k2);
            if k.max_abs() <= band {
                *out.entry(k).or_insert(num_complex::Complex64::new(0.0, 0.0)) += f.coeff(p) * g.coeff(q);
            }
        }
    }
    out
}

fn wick_error(n: usize) -> Result<f64> {
    let grid = SpectralGrid::with_default_resolution(n);
    let mut r = rng(13);
    let gamma = 0.37;
    let psi = SpectralField::random(grid, &mut r, 0.5);
    let v = random_pair(grid, &mut r);
    let w = &v.u;
    let coeffs = CubicCoefficients::from_base(&psi, gamma)?;
    let fast = nonlinearity(&v, &coeffs)?;
    let mut expansion = dealiased_product(w, w, Some(w))?;
    expansion.axpy(3.0, &dealiased_product(&psi, w, Some(w))?);
    expansion.axpy(3.0, &dealiased_product(&psi, &psi, Some(w))?);
    expansion.axpy(-3.0 * gamma, w);
    expansion.axpy(1.0, &dealiased_product(&psi, &psi, Some(&psi))?);
    expansion.axpy(-3.0 * gamma, &psi);
    Ok((&fast - &expansion).max_abs_coeff())
}

fn mollifier_error(n: usize) -> Result<f64> {
    let grid = SpectralGrid::with_default_resolution(n);
    let f = SpectralField::random(grid, &mut rng(14), 0.5);
    let mut worst = 0.0_f64;
    for (a, b) in [(1e-3, 2e-3), (0.01, 0.005), (1e-15, 0.02)] {
        let twice = mollify(&mollify(&f, a)?, b)?;
        let once = mollify(&f, a + b)?;
        worst = worst.max((&twice - &once).max_abs_coeff() / f.max_abs_coeff());
    }
    Ok(worst)
}

/// Composite Simpson rule for `2⟨n⟩^{-2s} ∫₀^δ e^{-r} m mᵀ dr`.
pub fn simpson_covariance(mode: ModeIndex, dt: f64, s: f64, panels: usize) -> [f64; 3] {
    let omega = mode.bracket();
    let sigma_sq = 2.0 * omega.powf(-2.0 * s);
    let h = dt / (2 * panels) as f64;
    let mut acc = [0.0; 3];
    for i in 0..=2 * panels {
        let r = i as f64 * h;
        let weight = if i == 0 || i == 2 * panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let (sn, cs) = (omega * r).sin_cos();
        let m1 = sn / omega;
        let m2 = cs - sn / (2.0 * omega);
        let e = (-r).exp() * weight;
        acc[0] += e * m1 * m1;
        acc[1] += e * m1 * m2;
        acc[2] += e * m2 * m2;
    }
    acc.map(|x| x * h / 3.0 * sigma_sq)
}

fn covariance_error(n: usize) -> f64 {
    let grid = SpectralGrid::with_default_resolution(n);
    let mut worst = 0.0_f64;
    for s in [0.5, 1.0] {
        for dt in [0.1, 0.003] {
            for mode in grid.modes() {
                let c = step_covariance(mode, dt, s);
                let q = simpson_covariance(mode, dt, s, 2000);
                let scale = c.s11.abs().max(c.s22.abs());
                for (a, b) in [c.s11, c.s12, c.s22].iter().zip(q) {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
        }
    }
    worst
}

fn restart_error() -> Result<f64> {
    let mut worst = 0.0_f64;
    for integrator in [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint] {
        let sim = SimConfig { dt: 0.02, seed: 4, integrator, ..SimConfig::with_n(4) };
        let u0 = &random_pair(sim.grid()?, &mut rng(15)) * 0.3;
        let r = restart_check(&u0, sim, 0.5, 0.3, RestartLeg::same(&sim))?;
        worst = worst.max(r.residual / r.flow_norm);
    }
    Ok(worst)
}

fn zero_shift_cost() -> Result<f64> {
    let sim = SimConfig { dt: 0.05, seed: 2, ..SimConfig::with_n(3) };
    let u = &random_pair(sim.grid()?, &mut rng(16)) * 0.3;
    let stepper = CouplingStepper::new(sim)?;
    let mut rec = CouplingRecord::new(u.clone(), u, sim, CouplingConfig::default())?;
    for _ in 0..20 {
        stepper.step(&mut rec)?;
    }
    Ok(rec.hcost + rec.w.h1_norm() + rec.log_density.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds() {
        let checks = run_verify_suite().unwrap();
        let table = format_table(&checks);
        assert!(checks.iter().all(|c| c.passed), "{table}");
        assert_eq!(table.lines().count(), checks.len() + 1);
    }

    #[test]
    fn simpson_oracle_is_converged() {
        let mode = ModeIndex::new(2, -1);
        let a = simpson_covariance(mode, 0.1, 1.0, 500);
        let b = simpson_covariance(mode, 0.1, 1.0, 1000);
        assert!((a[0] - b[0]).abs() < 1e-14 * a[0].abs().max(1e-30) + 1e-18);
    }
}

//! Square 2D transforms between lattice coefficients and physical samples.
//!
//! Physical samples live on the uniform `m × m` grid `x_j = j / m` of the unit
//! torus, stored row-major with the first index along `x₁`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn with_plans<R>(m: usize, f: impl FnOnce(&Plans) -> R) -> R {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        let plans = map.entry(m).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans { forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) }
        });
        f(plans)
    })
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// Unnormalised in-place 2D DFT. The inverse direction uses `e^{+2πi jk/m}`.
pub(crate) fn fft2(buf: &mut [Complex64], m: usize, inverse: bool) {
    debug_assert_eq!(buf.len(), m * m);
    with_plans(m, |plans| {
        let plan = if inverse { &plans.inverse } else { &plans.forward };
        plan.process(buf);
        transpose_square(buf, m);
        plan.process(buf);
        transpose_square(buf, m);
    });
}

#[inline]
fn wrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Complex samples of `Σ c(k) e^{2πi k·x}` for coefficients on `[-band, band]²`.
///
/// Lattice points that coincide modulo `m` are summed, so sampling stays exact
/// even when the band exceeds what the grid can resolve.
pub(crate) fn synthesize_complex(band: usize, coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let side = 2 * band + 1;
    debug_assert_eq!(coeffs.len(), side * side);
    let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
    let b = band as i64;
    for (i, chunk) in coeffs.chunks_exact(side).enumerate() {
        let row = wrap(i as i64 - b, m) * m;
        for (j, c) in chunk.iter().enumerate() {
            buf[row + wrap(j as i64 - b, m)] += *c;
        }
    }
    fft2(&mut buf, m, true);
    buf
}

/// Real samples of a Hermitian coefficient set on `[-band, band]²`.
pub(crate) fn synthesize(band: usize, coeffs: &[Complex64], m: usize) -> Vec<f64> {
    synthesize_complex(band, coeffs, m).into_iter().map(|z| z.re).collect()
}

/// Samples of two real fields from a single complex transform (`f + i g`).
pub(crate) fn synthesize_pair(
    band: usize,
    f: &[Complex64],
    g: &[Complex64],
    m: usize,
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let packed: Vec<Complex64> = f.iter().zip(g).map(|(a, b)| a + i * b).collect();
    let buf = synthesize_complex(band, &packed, m);
    buf.into_iter().map(|z| (z.re, z.im)).unzip()
}

/// Fourier coefficients on `[-band, band]²` of real samples on the `m × m` grid.
///
/// The result is made exactly Hermitian. Requires `2·band + 1 ≤ m`.
pub(crate) fn analyze(values: &[f64], m: usize, band: usize) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), m * m);
    debug_assert!(2 * band < m);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, m, false);
    let scale = 1.0 / (m * m) as f64;
    let side = 2 * band + 1;
    let b = band as i64;
    let mut out = Vec::with_capacity(side * side);
    for k1 in -b..=b {
        let row = wrap(k1, m) * m;
        for k2 in -b..=b {
            out.push(buf[row + wrap(k2, m)] * scale);
        }
    }
    symmetrize(&mut out, band);
    out
}

/// Forces `c(-k) = conj(c(k))` by averaging, with a real zero mode.
pub(crate) fn symmetrize(coeffs: &mut [Complex64], band: usize) {
    let len = coeffs.len();
    debug_assert_eq!(len, (2 * band + 1) * (2 * band + 1));
    // Index of -k is (len - 1 - idx) for the row-major centred lattice.
    for idx in 0..len / 2 {
        let mirror = len - 1 - idx;
        let avg = (coeffs[idx] + coeffs[mirror].conj()) * 0.5;
        coeffs[idx] = avg;
        coeffs[mirror] = avg.conj();
    }
    coeffs[len / 2].im = 0.0;
}

//! Configuration, checkpoints, outputs and the command-line front end.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod output;
pub mod verify;

pub use checkpoint::Checkpoint;
pub use cli::cli_main;
pub use config::{load_config, parse_config, RunConfig};
pub use output::{series_csv, worker_count, with_workers, RunManifest, Summary, SUMMARY_SCHEMA};
pub use verify::{format_table, run_verify_suite, IdentityCheck};

use ndarray::Array2;

use crate::error::Result;
use crate::spectral::{PairField, SpectralField, SpectralGrid};

/// `amplitude · exp(cos 2πx + cos 2πy - 2)` at rest, truncated to the grid.
pub fn smooth_bump(grid: SpectralGrid, amplitude: f64) -> Result<PairField> {
    let m = grid.m();
    let tau = std::f64::consts::TAU;
    let values = Array2::from_shape_fn((m, m), |(i, j)| {
        let (x, y) = (i as f64 / m as f64, j as f64 / m as f64);
        amplitude * ((tau * x).cos() + (tau * y).cos() - 2.0).exp()
    });
    Ok(PairField::position(SpectralField::to_spectral(grid, &values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_real_and_peaked() {
        let g = SpectralGrid::with_default_resolution(4);
        let b = smooth_bump(g, 0.8).unwrap();
        assert!(b.is_hermitian());
        assert_eq!(b.ut.l2_norm(), 0.0);
        let x = b.u.physical();
        assert!((x[0] - 0.8).abs() < 1e-3, "{}", x[0]);
        assert!(x.iter().all(|&v| v <= 0.8 + 1e-3));
    }
}

//! The damped wave propagator mode by mode: semigroup law, determinant, decay.

use sdnlw::propagator::mode_matrix;
use sdnlw::spectral::ModeIndex;

fn main() {
    println!("{:>8} {:>6} {:>12} {:>12} {:>14}", "mode", "t", "det", "e^-t", "semigroup err");
    for (k1, k2) in [(0, 0), (1, 0), (2, 3), (8, -5)] {
        let mode = ModeIndex::new(k1, k2);
        for t in [0.5, 2.0, 10.0] {
            let m = mode_matrix(mode, t);
            let split = mode_matrix(mode, 0.3 * t).compose(&mode_matrix(mode, 0.7 * t));
            println!(
                "{:>8} {:>6} {:>12.4e} {:>12.4e} {:>14.2e}",
                format!("({k1},{k2})"),
                t,
                m.det(),
                (-t).exp(),
                split.max_abs_diff(&m)
            );
        }
    }
}

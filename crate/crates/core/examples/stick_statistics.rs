//! Exact sampling of the stochastic convolution and its stationary second moments.
//!
//! `cargo run --release --example stick_statistics -- 0.5` picks the smoothing exponent.

use sdnlw::noise::stationary_moment_report;
use sdnlw::renormalization::stationary_gamma;

fn main() -> sdnlw::Result<()> {
    let s: f64 = std::env::args().nth(1).map_or(1.0, |a| a.parse().expect("s must be a number"));
    let report = stationary_moment_report(s, 3, 2000, 1)?;
    println!("s = {s}, gamma(N=3) = {:.6}", stationary_gamma(s, 3));
    println!("{:>8} {:>12} {:>12} {:>12}", "mode", "E|u|^2", "stationary", "z");
    for m in report.modes.iter().filter(|m| m.mode.k1 >= 0 && m.mode.k2 >= 0) {
        let last = m.var_u.len() - 1;
        let z = (m.var_u[last] - m.stationary_u) / m.stderr_u[last];
        println!(
            "{:>8} {:>12.5e} {:>12.5e} {:>12.2}",
            format!("({},{})", m.mode.k1, m.mode.k2),
            m.var_u[last],
            m.stationary_u,
            z
        );
    }
    println!("drifting modes: {}", report.drifting_modes().count());
    Ok(())
}

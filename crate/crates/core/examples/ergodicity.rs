//! Long-run averages from two starts over a small seed ensemble, plus the tightness table.

use sdnlw::dynamics::{FlowStepper, SimConfig};
use sdnlw::ergodics::{krylov_bogolyubov_diagnostic, observable_registry, two_start_convergence, TwoStartPlan};
use sdnlw::harness::smooth_bump;
use sdnlw::spectral::PairField;

fn main() -> sdnlw::Result<()> {
    let sim = SimConfig { dt: 0.02, ..SimConfig::with_n(4) };
    let grid = sim.grid()?;
    let names = ["mean_u2", "clipped_h_alpha"].map(String::from);
    let observables = observable_registry(sim.alpha).select(&names)?;
    let plan = TwoStartPlan::new(sim, (0..6).collect(), 40.0);
    let report = two_start_convergence(&PairField::zeros(grid), &smooth_bump(grid, 1.0)?, &observables, &plan)?;
    for c in &report.comparisons {
        println!(
            "{:>16}: {:.5} vs {:.5}, z = {:.2}",
            c.name,
            c.start1.mean,
            c.start2.mean,
            c.z_score()
        );
    }
    println!("coupled d_n at T: {:.3e}", report.final_dn().unwrap_or(f64::NAN));

    let states = (0..32)
        .map(|seed| {
            let stepper = FlowStepper::new(SimConfig { seed, ..sim })?;
            let mut state = stepper.start(PairField::zeros(grid))?;
            stepper.run_until(&mut state, 5.0, |_| {})?;
            Ok(state)
        })
        .collect::<sdnlw::Result<Vec<_>>>()?;
    let radii = [1.0, 4.0, 16.0, 64.0, 256.0];
    for row in krylov_bogolyubov_diagnostic(&states, &radii, sim.alpha)? {
        println!("R = {:>6}: P(size > R) = {:.3}, R P = {:.3}", row.radius, row.fraction, row.fraction_times_radius);
    }
    Ok(())
}

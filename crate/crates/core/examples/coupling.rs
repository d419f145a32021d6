//! Girsanov coupling of the flows from rest and from a bump: the gap closes while
//! the shift cost stays finite.

use sdnlw::coupling::{CouplingConfig, CouplingRecord, CouplingStepper};
use sdnlw::dynamics::SimConfig;
use sdnlw::harness::smooth_bump;
use sdnlw::spectral::PairField;

fn main() -> sdnlw::Result<()> {
    let sim = SimConfig { seed: 3, ..SimConfig::with_n(4) };
    let grid = sim.grid()?;
    let mut rec =
        CouplingRecord::new(PairField::zeros(grid), smooth_bump(grid, 0.8)?, sim, CouplingConfig::default())?;
    let stepper = CouplingStepper::new(sim)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "|gap|_H1", "|w|_H1", "h-cost");
    let per_unit = (1.0 / sim.dt).round() as u64;
    for k in 0..=20 * per_unit {
        if k % (2 * per_unit) == 0 {
            let gap = &rec.diff_linear + &rec.w;
            println!("{:>6.1} {:>12.4e} {:>12.4e} {:>12.4e}", rec.t(), gap.h1_norm(), rec.w.h1_norm(), rec.hcost);
        }
        stepper.step(&mut rec)?;
    }
    Ok(())
}

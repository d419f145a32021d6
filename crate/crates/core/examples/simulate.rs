//! One trajectory of the renormalised cubic wave equation with running averages.

use sdnlw::dynamics::{energy, FlowStepper, SimConfig};
use sdnlw::ergodics::{birkhoff_average, observable_registry, observe_trajectory};
use sdnlw::harness::smooth_bump;

fn main() -> sdnlw::Result<()> {
    let sim = SimConfig { seed: 42, horizon: 20.0, ..SimConfig::with_n(6) };
    let names = ["mean_u", "mean_u2", "mean_u4"].map(String::from);
    let observables = observable_registry(sim.alpha).select(&names)?;
    let stepper = FlowStepper::new(sim)?;
    let u0 = smooth_bump(sim.grid()?, 1.0)?;
    let (state, series) = observe_trajectory(&stepper, u0, sim.horizon, 0.25, &observables)?;
    println!("t = {:.2} after {} steps, E(v) = {:.4e}", state.t, state.step, energy(&state.v));
    for s in &series {
        println!("{:>8}: final {:>12.5e}, time average {:>12.5e}", s.name, s.values[s.len() - 1], birkhoff_average(s, state.t)?);
    }
    Ok(())
}

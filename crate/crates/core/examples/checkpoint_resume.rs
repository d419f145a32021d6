//! Save a run halfway, load it back and check the continuation is bit-identical.

use sdnlw::dynamics::{FlowStepper, SimConfig};
use sdnlw::harness::{smooth_bump, Checkpoint};

fn main() -> sdnlw::Result<()> {
    let sim = SimConfig { seed: 9, ..SimConfig::with_n(4) };
    let stepper = FlowStepper::new(sim)?;
    let start = stepper.start(smooth_bump(sim.grid()?, 0.5)?)?;
    let mut half = start.clone();
    stepper.run_until(&mut half, 2.0, |_| {})?;

    let path = std::env::temp_dir().join("sdnlw-example.ckpt");
    Checkpoint::Flow(half).save(&path)?;
    let Checkpoint::Flow(loaded) = Checkpoint::load(&path)? else {
        unreachable!("a flow checkpoint was written")
    };
    println!("checkpoint: {} bytes at t = {}", std::fs::metadata(&path)?.len(), loaded.t);

    let (mut resumed, mut straight) = (loaded, start);
    stepper.run_until(&mut resumed, 4.0, |_| {})?;
    stepper.run_until(&mut straight, 4.0, |_| {})?;
    println!("identical after resume: {}", resumed == straight);
    std::fs::remove_file(path)?;
    Ok(())
}

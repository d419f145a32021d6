//! Analytic identities the solver must satisfy, as a table.

use sdnlw::harness::{format_table, run_verify_suite};

fn main() -> sdnlw::Result<()> {
    let checks = run_verify_suite()?;
    print!("{}", format_table(&checks));
    if checks.iter().any(|c| !c.passed) {
        std::process::exit(1);
    }
    Ok(())
}

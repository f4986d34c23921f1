//! Checks every commutation relation of the oscillator and its spectrum
//! generating algebra on a truncated Fock space.

use clambda::algebra::AlgebraParams;
use clambda::sga::verify_algebra;

fn main() -> clambda::Result<()> {
    let params = AlgebraParams::new(3, vec![2.0, -2.0, 0.0])?;
    let report = verify_algebra(&params, 64)?;
    println!("lambda = {}, alpha = {:?}, dim = {}", report.lambda, report.alpha, report.dim);
    for c in &report.checks {
        println!(
            "{:<28} residual {:>10.3e}  tolerance {:>8.1e}  {}",
            c.name,
            c.residual,
            c.tolerance,
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}

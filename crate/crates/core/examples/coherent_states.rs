//! Builds |z; mu>, checks it is an eigenvector of J- and compares its
//! normalization with the Mittag-Leffler and Bessel closed forms.

use clambda::algebra::AlgebraParams;
use clambda::coherent::{check_normalization, eigen_residual, kernel, residual_dim, CoherentState};
use num_complex::Complex64;

fn main() -> clambda::Result<()> {
    let z = Complex64::new(1.2, -0.7);
    for params in [
        AlgebraParams::undeformed(3)?,
        AlgebraParams::calogero_vasiliev(1.5)?,
        AlgebraParams::new(4, vec![0.0, 0.0, 30.0, -30.0])?,
    ] {
        for mu in 0..params.lambda() {
            let state = CoherentState::new(&params, z, mu)?;
            let res = eigen_residual(&state, &params, residual_dim(&state))?;
            let norm = check_normalization(&params, z, mu)?;
            println!(
                "lambda={} alpha={:?} mu={mu}: terms {:>3}, |(J- - z)psi| = {res:.2e}, norm errors {:?}",
                params.lambda(),
                params.alpha(),
                state.k_max() + 1,
                norm
            );
        }
        let overlap = kernel(&params, z, 0, Complex64::new(0.4, 0.4), 0)?;
        println!("  <z; 0|0.4+0.4i; 0> = {overlap:.6}");
    }
    Ok(())
}

//! Mandel's Q for the even and odd Calogero-Vasiliev states: closed form
//! against the photon-number oracle.

use clambda::algebra::AlgebraParams;
use clambda::observables::sweep;
use num_complex::Complex64;

fn main() -> clambda::Result<()> {
    let path: Vec<Complex64> = (0..=6).map(|j| Complex64::new(j as f64, 0.0)).collect();
    for alpha0 in [0.0, -0.8, 1.0] {
        let params = AlgebraParams::calogero_vasiliev(alpha0)?;
        for mu in 0..2 {
            println!("alpha0 = {alpha0}, mu = {mu}");
            for p in sweep(&params, mu, &path) {
                let q = p.closed.as_ref().and_then(|c| c.mandel_q);
                let o = p.oracle.as_ref().and_then(|c| c.mandel_q);
                println!("  |z| = {:.1}: Q = {:>10.6?}  oracle {:>10.6?}", p.z.re, q, o);
            }
        }
    }
    Ok(())
}

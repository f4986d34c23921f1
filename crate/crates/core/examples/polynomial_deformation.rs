//! The deformation polynomials f and h, the Casimir eigenvalues and the
//! undeformed (Stirling-number) specialization.

use clambda::algebra::AlgebraParams;
use clambda::sga::{alpha_zero_polynomials, f_polynomial, h_polynomial, unirrep_data};

fn main() -> clambda::Result<()> {
    let params = AlgebraParams::new(3, vec![-0.7, 0.7, 0.0])?;
    let f = f_polynomial(&params);
    let h = h_polynomial(&params);
    for mu in 0..params.lambda() {
        let fc: Vec<f64> = (0..=f.degree()).map(|p| f.coeff(p, mu)).collect();
        let hc: Vec<f64> = (0..=h.degree()).map(|p| h.coeff(p, mu)).collect();
        println!("mu = {mu}: f coefficients {fc:?}");
        println!("        h coefficients {hc:?}");
    }
    for u in unirrep_data(&params) {
        println!("sector {}: c = {:.12}, lowest J0 = {:.6}", u.mu, u.casimir_value, u.lowest_j0);
    }

    let (f0, _) = alpha_zero_polynomials(4)?;
    let coeffs: Vec<f64> = (0..=f0.degree()).map(|p| f0.coeff(p, 0)).collect();
    println!("lambda = 4, alpha = 0: f(J0) coefficients {coeffs:?}");
    Ok(())
}

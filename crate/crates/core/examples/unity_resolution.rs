//! Resolution of unity: closed-form weights, moment conditions, and the
//! diagonal of the integrated projector.

use clambda::algebra::AlgebraParams;
use clambda::measures::{verify_moments, verify_unity, weight_density, UnityOptions, WeightSpec};
use clambda::quadrature::QuadSpec;

fn main() -> clambda::Result<()> {
    let params = AlgebraParams::calogero_vasiliev(-0.5)?;
    for mu in 0..2 {
        let spec = WeightSpec::for_params(&params, mu)?;
        println!("mu = {mu}, family {:?}, h(1) = {:.12}", spec.family(), weight_density(&spec, 1.0)?);
        for m in verify_moments(&spec, [0, 5, 10], &QuadSpec::default())? {
            println!("  k = {:>2}: {:.12e} vs {:.12e} (rel {:.1e})", m.k, m.lhs, m.rhs, m.rel_error);
        }
    }
    for params in [params, AlgebraParams::undeformed(4)?] {
        let r = verify_unity(&params, 20, &UnityOptions::default())?;
        println!("lambda = {}: max |M_nn - 1| = {:.2e}", params.lambda(), r.max_deviation);
    }

    let general = AlgebraParams::new(3, vec![2.0, -2.0, 0.0])?;
    let opts = UnityOptions { experimental_general: true, ..UnityOptions::default() };
    let r = verify_unity(&general, 12, &opts)?;
    println!("lambda = 3, alpha = (2,-2,0), moment rule: max |M_nn - 1| = {:.2e}", r.max_deviation);
    Ok(())
}

//! Second- and fourth-order squeezing along real negative z.

use clambda::algebra::AlgebraParams;
use clambda::observables::{fourth_order, lambda2_asymptotics, squeeze_ratios, uncertainty_bound};
use num_complex::Complex64;

fn main() -> clambda::Result<()> {
    for alpha0 in [0.0, -0.4, 1.0, 3.0] {
        let params = AlgebraParams::calogero_vasiliev(alpha0)?;
        let asy = lambda2_asymptotics(&params)?;
        println!(
            "alpha0 = {alpha0}: bound {:.4}, X -> {:.4}, Y -> {:.4}",
            uncertainty_bound(&params, 0)?,
            asy.x_limit,
            asy.y_limit
        );
        for t in [0.1, 0.5, 1.0, 5.0, 10.0] {
            let z = Complex64::new(-t, 0.0);
            let (x, _) = squeeze_ratios(&params, z, 0)?;
            let y = fourth_order(&params, z, 0)?.y;
            println!("  -z = {t:>4}: X = {x:.6}, Y = {y:.6}");
        }
    }

    let params = AlgebraParams::new(4, vec![0.0, 0.0, 30.0, -30.0])?;
    let (t, y) = (1..=1000)
        .map(|j| {
            let t = j as f64 * 1e-3;
            (t, fourth_order(&params, Complex64::new(-t, 0.0), 0).map(|f| f.y))
        })
        .filter_map(|(t, y)| y.ok().map(|y| (t, y)))
        .fold((0.0, f64::MAX), |best, cur| if cur.1 < best.1 { cur } else { best });
    println!("lambda = 4, alpha = (0,0,30,-30): Y_min = {y:.4} at -z = {t:.3}");
    Ok(())
}

//! The special functions underneath the coherent states and measures.

use clambda::special::{bessel_i, bessel_k, hyp0fq, ln_pochhammer, mittag_leffler, pochhammer};

fn main() -> clambda::Result<()> {
    println!("(0.5)_4 = {}", pochhammer(0.5, 4)?);
    println!("ln (3.2)_50 = {}", ln_pochhammer(3.2, 50)?);
    println!("0F2(;1/3, 2/3; 1) = {}", hyp0fq(&[1.0 / 3.0, 2.0 / 3.0], 1.0)?);
    for (nu, x) in [(0.0, 1.0), (0.5, 2.0), (2.3, 10.0)] {
        println!("I_{nu}({x}) = {:.15e}, K_{nu}({x}) = {:.15e}", bessel_i(nu, x)?, bessel_k(nu, x)?);
    }
    println!("E_{{3,1}}(2) = {}", mittag_leffler(3.0, 1.0, 2.0)?);
    println!("E_{{2,1}}(4) = {} (cosh 2 = {})", mittag_leffler(2.0, 1.0, 4.0)?, 2f64.cosh());
    Ok(())
}

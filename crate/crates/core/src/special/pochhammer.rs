use super::gamma::ln_gamma;
use super::sum::{CompensatedSum, DoubleDouble};
use crate::error::{Error, Result};

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
///
/// Only positive bases are accepted once `k > 0`; every base used by the
/// oscillator is positive.
pub fn pochhammer(a: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    check_base(a)?;
    if k > 400 {
        return Ok(ln_pochhammer(a, k)?.exp());
    }
    let mut p = DoubleDouble::ONE;
    for i in 0..k {
        p = p * DoubleDouble::from_sum(a, i as f64);
    }
    Ok(p.to_f64())
}

/// `ln (a)_k` for `a > 0`.
pub fn ln_pochhammer(a: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    check_base(a)?;
    if k > 2000 {
        return Ok(ln_gamma(a + k as f64) - ln_gamma(a));
    }
    // group factors so each ln() sees a product near the top of the f64 range
    let mut acc = CompensatedSum::new();
    let mut block = DoubleDouble::ONE;
    for i in 0..k {
        block = block * DoubleDouble::from_sum(a, i as f64);
        if block.hi() > 1e250 {
            acc.add(block.hi().ln() + (block.lo() / block.hi()).ln_1p());
            block = DoubleDouble::ONE;
        }
    }
    acc.add(block.hi().ln() + (block.lo() / block.hi()).ln_1p());
    Ok(acc.value())
}

fn check_base(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveBase { a })
    }
}

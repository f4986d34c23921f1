use super::gamma::{ln_gamma_signed, rgamma};
use super::sum::{CompensatedSum, DoubleDouble};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 200_000;

/// Two-parameter Mittag-Leffler function `E_{α,β}(x) = Σ_k x^k / Γ(αk + β)`.
///
/// For integer `α` the terms follow an exact product recurrence carried in
/// double-double; otherwise each term is formed from `ln Γ`.
pub fn mittag_leffler(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Mittag-Leffler parameters must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if alpha == alpha.round() && alpha <= 64.0 {
        Ok(integer_alpha(alpha as usize, beta, x))
    } else {
        Ok(general_alpha(alpha, beta, x))
    }
}

fn integer_alpha(alpha: usize, beta: f64, x: f64) -> f64 {
    let mut term = DoubleDouble::new(rgamma(beta));
    let mut sum = term;
    let mut small = 0;
    for k in 1..MAX_TERMS {
        // Γ(αk+β) / Γ(α(k-1)+β) = Π_{j<α} (α(k-1) + β + j)
        let base = (alpha * (k - 1)) as f64;
        let mut div = DoubleDouble::ONE;
        for j in 0..alpha {
            div = div * DoubleDouble::from_sum(base + j as f64, beta);
        }
        term = term * x / div;
        sum += term;
        if term.hi().abs() < 1e-16 * sum.hi().abs() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum.to_f64()
}

fn general_alpha(alpha: f64, beta: f64, x: f64) -> f64 {
    if x == 0.0 {
        return rgamma(beta);
    }
    let lx = x.abs().ln();
    let mut acc = CompensatedSum::new();
    acc.add(rgamma(beta));
    let mut small = 0;
    for k in 1..MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let (lg, sg) = ln_gamma_signed(arg);
        let sx = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = sx * sg * (k as f64 * lx - lg).exp();
        acc.add(term);
        if term.abs() < 1e-16 * acc.value().abs() && arg > 2.0 {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    acc.value()
}

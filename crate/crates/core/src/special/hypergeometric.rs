//! Generalized hypergeometric series `0F_q(; b_1, ..., b_q; x)`.

use num_complex::Complex64;

use super::sum::{ComplexDD, DoubleDouble};
use crate::error::{Error, Result};

/// Hard cap on the number of series terms; the stopping rule fires long
/// before this for every argument used in the crate.
const MAX_TERMS: usize = 200_000;
/// A term counts as negligible below this fraction of the running sum.
const REL_STOP: f64 = 1e-16;

/// Denominator parameters of a `0F_q` series, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomParams {
    denominators: Vec<f64>,
}

impl HypergeomParams {
    pub fn new(denominators: Vec<f64>) -> Result<Self> {
        if let Some(&b) = denominators.iter().find(|&&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::NonpositiveParameter { b });
        }
        Ok(HypergeomParams { denominators })
    }

    pub fn denominators(&self) -> &[f64] {
        &self.denominators
    }

    /// `k Π_i (b_i + k - 1)`, the ratio between consecutive denominators,
    /// carried in double-double.
    fn step_divisor(&self, k: usize) -> DoubleDouble {
        let km1 = (k - 1) as f64;
        self.denominators
            .iter()
            .fold(DoubleDouble::new(k as f64), |acc, &b| {
                acc * DoubleDouble::from_sum(b, km1)
            })
    }

    /// Series value at a real argument.
    ///
    /// Terms are generated by their ratio and summed in double-double; the
    /// loop stops once two consecutive terms fall below `1e-16` of the sum.
    pub fn eval(&self, x: f64) -> f64 {
        let mut term = DoubleDouble::ONE;
        let mut sum = DoubleDouble::ONE;
        let mut small = 0;
        for k in 1..MAX_TERMS {
            term = term * x / self.step_divisor(k);
            sum += term;
            if term.hi().abs() < REL_STOP * sum.hi().abs() {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
            if !sum.is_finite() {
                break;
            }
        }
        sum.to_f64()
    }

    /// Series value at a complex argument.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut term = ComplexDD::new(Complex64::new(1.0, 0.0));
        let mut sum = term;
        let mut small = 0;
        for k in 1..MAX_TERMS {
            term = term.mul_c64(x).div_real(self.step_divisor(k));
            sum = sum + term;
            let s = sum.norm_f64();
            if term.norm_f64() < REL_STOP * s {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
            if !s.is_finite() {
                break;
            }
        }
        sum.to_c64()
    }

    /// The first `n` partial sums `S_0, ..., S_{n-1}` at a real argument.
    pub fn partial_sums(&self, x: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut term = DoubleDouble::ONE;
        let mut sum = DoubleDouble::ONE;
        for k in 0..n {
            if k > 0 {
                term = term * x / self.step_divisor(k);
                sum += term;
            }
            out.push(sum.to_f64());
        }
        out
    }
}

/// Convenience wrapper: `0F_q(; b; x)`.
pub fn hyp0fq(denominators: &[f64], x: f64) -> Result<f64> {
    Ok(HypergeomParams::new(denominators.to_vec())?.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::bessel_i;
    use crate::special::gamma::gamma;

    #[test]
    fn empty_argument_gives_one() {
        assert_eq!(hyp0fq(&[1.0], 0.0).unwrap(), 1.0);
        assert_eq!(hyp0fq(&[0.3, 2.0, 5.0], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_f_zero_is_exp() {
        let p = HypergeomParams::new(vec![]).unwrap();
        for &x in &[-3.0, 0.5, 10.0] {
            let v = p.eval(x);
            assert!((v / f64::exp(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_denominator() {
        assert!(HypergeomParams::new(vec![1.0, 0.0]).is_err());
        assert!(HypergeomParams::new(vec![-0.5]).is_err());
    }

    #[test]
    fn bessel_i_identity() {
        // 0F1(;b;y) = Γ(b) y^{(1-b)/2} I_{b-1}(2√y)
        for &b in &[0.5, 1.0, 1.5, 2.7] {
            for &y in &[0.0, 0.01, 0.5, 3.0, 10.0, 25.0] {
                let lhs = hyp0fq(&[b], y).unwrap();
                let rhs = if y == 0.0 {
                    1.0
                } else {
                    gamma(b) * y.powf((1.0 - b) / 2.0) * bessel_i(b - 1.0, 2.0 * y.sqrt()).unwrap()
                };
                assert!((lhs / rhs - 1.0).abs() < 1e-10, "b={b} y={y}: {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn matches_high_precision_reference() {
        // mpmath.hyper([], [1/3, 2/3], 4) and hyper([], [0.3, 1.2, 2.5], -7.5)
        let a = hyp0fq(&[1.0 / 3.0, 2.0 / 3.0], 4.0).unwrap();
        assert!((a / 38.966_941_979_493_104 - 1.0).abs() < 1e-14, "{a}");
        let b = hyp0fq(&[0.3, 1.2, 2.5], -7.5).unwrap();
        assert!((b / -4.441_367_573_640_816 - 1.0).abs() < 1e-13, "{b}");
    }

    #[test]
    fn partial_sums_approach_value() {
        let p = HypergeomParams::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let sums = p.partial_sums(4.0, 200);
        assert_eq!(sums[0], 1.0);
        assert!((sums[1] - (1.0 + 4.0 / (1.0 / 3.0 * 2.0 / 3.0))).abs() < 1e-14);
        let v = p.eval(4.0);
        assert!((sums[199] / v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_argument_matches_real_on_axis() {
        let p = HypergeomParams::new(vec![0.75, 1.25]).unwrap();
        let r = p.eval(-3.2);
        let c = p.eval_complex(Complex64::new(-3.2, 0.0));
        assert!((c.re - r).abs() < 1e-15 * r.abs().max(1.0));
        assert_eq!(c.im, 0.0);
    }
}

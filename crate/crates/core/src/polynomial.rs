//! Dense univariate polynomials with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::special::sum::DoubleDouble;

/// `Σ_i c_i x^i`, stored lowest power first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rounds to a double-double (about 32 significant digits).
pub fn to_dd(q: &BigRational) -> DoubleDouble {
    let hi = to_f64(q);
    if !hi.is_finite() {
        return DoubleDouble::new(hi);
    }
    let lo = to_f64(&(q - rational(hi)));
    DoubleDouble::from_sum(hi, lo)
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        RationalPoly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// `x + c`.
    pub fn linear(c: BigRational) -> Self {
        RationalPoly::from_coeffs(vec![c, BigRational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(s x)`.
    pub fn rescale_argument(&self, s: &BigRational) -> Self {
        let mut pow = BigRational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pow);
            pow *= s;
        }
        RationalPoly::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `Π_k (x + c_k)`.
    pub fn product_of_linears<I: IntoIterator<Item = BigRational>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(RationalPoly::one(), |p, c| &p * &RationalPoly::linear(c))
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, o: &RationalPoly) -> RationalPoly {
        self + &(-o)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_linears_expands() {
        // (x + 1)(x - 2) = x² - x - 2
        let p = RationalPoly::product_of_linears([ratio(1, 1), ratio(-2, 1)]);
        assert_eq!(p.coeffs(), &[ratio(-2, 1), ratio(-1, 1), ratio(1, 1)]);
        assert_eq!(p.eval(&ratio(2, 1)), BigRational::zero());
    }

    #[test]
    fn rescale_and_cancel() {
        let p = RationalPoly::product_of_linears([ratio(1, 2)]);
        let q = p.rescale_argument(&ratio(3, 1));
        assert_eq!(q.coeffs(), &[ratio(1, 2), ratio(3, 1)]);
        assert!((&q - &q).is_zero());
        assert_eq!((&q - &q).degree(), 0);
    }

    #[test]
    fn floats_convert_exactly() {
        assert_eq!(rational(0.375), ratio(3, 8));
        assert_eq!(to_f64(&ratio(1, 3)), 1.0 / 3.0);
        let third = to_dd(&ratio(1, 3));
        assert!((third * 3.0 - DoubleDouble::ONE).to_f64().abs() < 1e-31);
    }
}

//! Gamma-function helpers. `ln_gamma` and `gamma` delegate to `libm`; the
//! reciprocal-gamma pair used by the Bessel-K Temme series is built here
//! from the Taylor series of `ln Γ(1 + x)`, which stays accurate as the
//! order tends to an integer.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `1/Γ(x)`, which is entire: zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        let (lg, s) = ln_gamma_signed(x);
        return s * (-lg).exp();
    }
    1.0 / gamma(x)
}

/// `ln k!`.
pub fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(256);
        let mut acc = super::sum::CompensatedSum::new();
        t.push(0.0);
        for i in 1..256 {
            acc.add((i as f64).ln());
            t.push(acc.value());
        }
        t
    });
    table
        .get(k)
        .copied()
        .unwrap_or_else(|| ln_gamma(k as f64 + 1.0))
}

const ZETA_MAX: usize = 80;

/// ζ(k) for integer 2 ≤ k ≤ 80 via Euler–Maclaurin with N = 10.
fn zeta_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_{2j} / (2j)! for j = 1..8
        const B_OVER_FACT: [f64; 8] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 2730.0 / 479_001_600.0,
            7.0 / 6.0 / 87_178_291_200.0,
            -3617.0 / 510.0 / 20_922_789_888_000.0,
        ];
        let n = 10.0_f64;
        let mut t = vec![f64::NAN; ZETA_MAX + 1];
        for (k, slot) in t.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let mut acc = super::sum::CompensatedSum::new();
            for m in (1..10).rev() {
                acc.add((m as f64).powf(-s));
            }
            acc.add(n.powf(1.0 - s) / (s - 1.0));
            acc.add(0.5 * n.powf(-s));
            // rising product s (s+1) ... (s+2j-2)
            let mut rising = s;
            let mut npow = n.powf(-s - 1.0);
            for (j, c) in B_OVER_FACT.iter().enumerate() {
                if j > 0 {
                    rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
                    npow /= n * n;
                }
                acc.add(c * rising * npow);
            }
            *slot = acc.value();
        }
        t
    })
}

/// Riemann ζ at an integer argument `2 ≤ k ≤ 80`.
pub fn zeta_int(k: usize) -> f64 {
    assert!((2..=ZETA_MAX).contains(&k), "zeta_int: k = {k} out of range");
    zeta_table()[k]
}

/// Reciprocal gamma pair used by Temme's method for `|x| <= 1/2`:
///
/// * `gam1 = (1/Γ(1-x) - 1/Γ(1+x)) / (2x)`
/// * `gam2 = (1/Γ(1-x) + 1/Γ(1+x)) / 2`
/// * `1/Γ(1+x)` and `1/Γ(1-x)`
///
/// Uses `ln Γ(1+x) = -γx + Σ_{k≥2} (-1)^k ζ(k) x^k / k`, split into even and
/// odd parts so the difference quotient has no cancellation.
pub(crate) fn temme_gamma_pair(x: f64) -> (f64, f64, f64, f64) {
    debug_assert!(x.abs() <= 0.5 + 1e-12);
    let x2 = x * x;
    let mut even = 0.0;
    let mut odd_over_x = -EULER_GAMMA;
    let mut pow = x2; // x^k for even k, x^(k-1) for odd k
    for k in 2..=ZETA_MAX {
        let term = zeta_int(k) * pow / k as f64;
        if k % 2 == 0 {
            even += term;
        } else {
            odd_over_x -= term;
            pow *= x2;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let odd = odd_over_x * x;
    let sinhc = if odd.abs() < 1e-3 {
        let o2 = odd * odd;
        1.0 + o2 / 6.0 * (1.0 + o2 / 20.0)
    } else {
        odd.sinh() / odd
    };
    let damp = (-even).exp();
    let gam1 = damp * odd_over_x * sinhc;
    let gam2 = damp * odd.cosh();
    let gampl = damp * (-odd).exp();
    let gammi = damp * odd.exp();
    (gam1, gam2, gampl, gammi)
}

/// `πx / sin(πx)`, smooth through zero.
pub(crate) fn pi_x_over_sin(x: f64) -> f64 {
    let px = PI * x;
    if px.abs() < 1e-4 {
        1.0 + px * px / 6.0
    } else {
        px / px.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        assert!((zeta_int(2) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta_int(4) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta_int(3) - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!((zeta_int(40) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn temme_pair_matches_direct_gamma() {
        for &x in &[0.5, 0.3, -0.25, 0.1, -0.45] {
            let (g1, g2, gp, gm) = temme_gamma_pair(x);
            let rp = 1.0 / gamma(1.0 + x);
            let rm = 1.0 / gamma(1.0 - x);
            assert!((gp - rp).abs() < 1e-14, "x={x}");
            assert!((gm - rm).abs() < 1e-14, "x={x}");
            assert!((g1 - (rm - rp) / (2.0 * x)).abs() < 1e-13, "x={x}");
            assert!((g2 - (rm + rp) / 2.0).abs() < 1e-14, "x={x}");
        }
        let (g1, g2, _, _) = temme_gamma_pair(0.0);
        assert!((g1 + EULER_GAMMA).abs() < 1e-16);
        assert_eq!(g2, 1.0);
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(0.5) - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ln_factorial_small_and_large() {
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        assert!((ln_factorial(300) - ln_gamma(301.0)).abs() < 1e-10);
    }
}

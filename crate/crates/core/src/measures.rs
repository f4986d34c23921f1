//! Resolution of unity for the coherent states.
//!
//! The measure is `dρ_μ = N_μ(y) h_μ(y) |z| d|z| dφ` with `y = |z|²/λ^{λ−2}`,
//! and the unity condition reduces to the moment problem
//! `∫ y^k h_μ(y) dy = k! Π_ν (b_ν)_k / (π λ^{λ−2})`.
//! Closed-form densities exist for `λ = 2` (any α) and for `α = 0` (any λ);
//! the general density is a Meijer G-function and is not evaluated.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::AlgebraParams;
use crate::coherent::{denominators, hypergeometric, y_scale};
use crate::error::{Error, Result};
use crate::polynomial::{rational, to_f64};
use crate::quadrature::{integrate_to_infinity, QuadSpec};
use crate::special::bessel::BESSEL_X_MAX;
use crate::special::{bessel_i, bessel_k, gamma, ln_factorial, ln_gamma, ln_pochhammer};

/// Which closed form, if any, describes `h_μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightFamily {
    /// `λ = 2`: modified Bessel `K` density.
    Lambda2AnyAlpha,
    /// `α = 0`: stretched-exponential density.
    AlphaZeroAnyLambda,
    /// Meijer `G^{λ0}_{0λ}`; represented only.
    GeneralMeijerG,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    family: WeightFamily,
    params: AlgebraParams,
    mu: usize,
}

impl WeightSpec {
    pub fn new(family: WeightFamily, params: &AlgebraParams, mu: usize) -> Result<Self> {
        params.check_sector(mu)?;
        match family {
            WeightFamily::Lambda2AnyAlpha if params.lambda() != 2 => {
                return Err(Error::InvalidArgument(format!(
                    "Bessel weight needs lambda = 2, got {}",
                    params.lambda()
                )))
            }
            WeightFamily::AlphaZeroAnyLambda if !params.is_undeformed() => {
                return Err(Error::InvalidArgument(
                    "stretched-exponential weight needs alpha = 0".into(),
                ))
            }
            _ => {}
        }
        Ok(WeightSpec {
            family,
            params: params.clone(),
            mu,
        })
    }

    /// The most specific family that applies (`λ = 2` is preferred).
    pub fn for_params(params: &AlgebraParams, mu: usize) -> Result<Self> {
        let family = if params.lambda() == 2 {
            WeightFamily::Lambda2AnyAlpha
        } else if params.is_undeformed() {
            WeightFamily::AlphaZeroAnyLambda
        } else {
            WeightFamily::GeneralMeijerG
        };
        Self::new(family, params, mu)
    }

    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn is_evaluable(&self) -> bool {
        self.family != WeightFamily::GeneralMeijerG
    }

    /// The single lower parameter `b` of `0F1` when `λ = 2`.
    fn bessel_b(&self) -> f64 {
        denominators(&self.params, self.mu).expect("sector checked")[0]
    }

    /// Exponent `p` with `h_μ(y) ~ y^p` as `y → 0` (up to logarithms).
    fn small_y_exponent(&self) -> f64 {
        match self.family {
            WeightFamily::Lambda2AnyAlpha => (self.bessel_b() - 1.0).min(0.0),
            WeightFamily::AlphaZeroAnyLambda => {
                let l = self.params.lambda() as f64;
                (self.mu as f64 - l + 1.0) / l
            }
            WeightFamily::GeneralMeijerG => f64::NAN,
        }
    }

    /// Integer `m` for the substitution `y = u^m`: at least λ, and large
    /// enough that the zeroth moment integrand is bounded at `u = 0`.
    fn substitution_power(&self) -> f64 {
        let p = self.small_y_exponent();
        (self.params.lambda() as f64).max((1.0 / (1.0 + p)).ceil())
    }

    /// `m u^{m(k+1)−1} h(u^m)`, the moment integrand after `y = u^m`.
    fn moment_integrand(&self, k: usize, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let m = self.substitution_power();
        let ln_u = u.ln();
        let kf = k as f64;
        match self.family {
            WeightFamily::Lambda2AnyAlpha => {
                let b = self.bessel_b();
                let nu = b - 1.0;
                let x = 2.0 * (0.5 * m * ln_u).exp();
                if x > BESSEL_X_MAX {
                    return 0.0;
                }
                let kv = bessel_k(nu, x).expect("x in range");
                let ln_pre = m.ln() + (m * (kf + 1.0) - 1.0 + 0.5 * m * nu) * ln_u
                    + (2.0 / PI).ln()
                    - ln_gamma(b);
                ln_pre.exp() * kv
            }
            WeightFamily::AlphaZeroAnyLambda => {
                let l = self.params.lambda() as f64;
                let mu = self.mu as f64;
                let p = (mu - l + 1.0) / l;
                let ln_val = m.ln() + (mu - l + 2.0) * l.ln() - PI.ln() - ln_factorial(self.mu)
                    + (m * (kf + 1.0 + p) - 1.0) * ln_u
                    - l * (m / l * ln_u).exp();
                ln_val.exp()
            }
            WeightFamily::GeneralMeijerG => f64::NAN,
        }
    }
}

/// `h_μ(y)` for `y > 0`.
///
/// Values whose Bessel argument exceeds the f64 range underflow to zero.
pub fn weight_density(spec: &WeightSpec, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("weight needs y > 0, got {y}")));
    }
    match spec.family {
        WeightFamily::Lambda2AnyAlpha => {
            let b = spec.bessel_b();
            let nu = b - 1.0;
            let x = 2.0 * y.sqrt();
            if x > BESSEL_X_MAX {
                return Ok(0.0);
            }
            Ok(2.0 * y.powf(0.5 * nu) * bessel_k(nu, x)? / (PI * gamma(b)))
        }
        WeightFamily::AlphaZeroAnyLambda => {
            let l = spec.params.lambda() as f64;
            let mu = spec.mu as f64;
            let ln_val = (mu - l + 2.0) * l.ln() - PI.ln() - ln_factorial(spec.mu)
                + (mu - l + 1.0) / l * y.ln()
                - l * y.powf(1.0 / l);
            Ok(ln_val.exp())
        }
        WeightFamily::GeneralMeijerG => Err(Error::NotSupported(
            "Meijer G weight is represented but not evaluated".into(),
        )),
    }
}

/// `λ = 2` radial measure `(2/π) I_ν(2r) K_ν(2r) r` per `dr dφ`,
/// `ν = (α_0 − 1 + 2μ)/2`.
pub fn bessel_measure(params: &AlgebraParams, mu: usize, modulus: f64) -> Result<f64> {
    if params.lambda() != 2 {
        return Err(Error::InvalidArgument("Bessel measure needs lambda = 2".into()));
    }
    params.check_sector(mu)?;
    let nu = (params.alpha()[0] - 1.0 + 2.0 * mu as f64) / 2.0;
    let x = 2.0 * modulus;
    Ok(2.0 / PI * bessel_i(nu, x)? * bessel_k(nu, x)? * modulus)
}

/// `N_μ(y) h_μ(y) |z|`, the radial measure per `d|z| dφ`.
pub fn radial_measure(spec: &WeightSpec, modulus: f64) -> Result<f64> {
    let lambda = spec.params.lambda();
    let y = modulus * modulus / y_scale(lambda);
    let n = hypergeometric(&spec.params, spec.mu)?.eval(y);
    Ok(n * weight_density(spec, y)? * modulus)
}

/// `ln(k! Π_ν (b_ν)_k)`.
fn ln_moment_core(params: &AlgebraParams, mu: usize, k: usize) -> Result<f64> {
    let mut acc = ln_factorial(k);
    for b in denominators(params, mu)? {
        acc += ln_pochhammer(b, k)?;
    }
    Ok(acc)
}

/// `k! Π_ν (b_ν)_k / (π λ^{λ−2})`.
pub fn moment_rhs(params: &AlgebraParams, mu: usize, k: usize) -> Result<f64> {
    let l = params.lambda() as f64;
    Ok((ln_moment_core(params, mu, k)? - PI.ln() - (l - 2.0) * l.ln()).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    /// Neglected tail of the numerical integral.
    pub tail: f64,
}

fn integrate_moment(spec: &WeightSpec, k: usize, quad: &QuadSpec) -> Result<(f64, f64)> {
    if !spec.is_evaluable() {
        return Err(Error::NotSupported(
            "moments of the Meijer G weight are not integrated numerically".into(),
        ));
    }
    let r = integrate_to_infinity(&|u| spec.moment_integrand(k, u), 0.0, quad)?;
    Ok((r.value, r.tail))
}

/// Numerical `∫ y^k h_μ(y) dy` against the closed-form right-hand side.
pub fn verify_moments(
    spec: &WeightSpec,
    ks: impl IntoIterator<Item = usize>,
    quad: &QuadSpec,
) -> Result<Vec<MomentCheck>> {
    ks.into_iter()
        .map(|k| {
            let (lhs, tail) = integrate_moment(spec, k, quad)?;
            let rhs = moment_rhs(&spec.params, spec.mu, k)?;
            Ok(MomentCheck {
                k,
                lhs,
                rhs,
                rel_error: (lhs - rhs).abs() / rhs,
                tail,
            })
        })
        .collect()
}

/// Options for [`verify_unity`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct UnityOptions {
    pub quad: QuadSpec,
    /// Replace the unevaluable Meijer G weight by a Gauss rule built from
    /// its exact moments. Off by default.
    pub experimental_general: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnityReport {
    pub dim_check: usize,
    /// `⟨n|M|n⟩` for `n < dim_check`.
    pub diagonal: Vec<f64>,
    /// Largest `|M_mn − δ_mn|`.
    pub max_deviation: f64,
    pub families: Vec<WeightFamily>,
    /// True when any sector used the experimental moment rule.
    pub experimental: bool,
}

/// `M = Σ_μ ∫ dρ_μ |z;μ⟩⟨z;μ|` on the first `dim_check` Fock states.
///
/// The angular integral is done analytically: it kills every off-diagonal
/// entry and leaves `M_nn = π λ^{λ−2} m_k / (k! Π_ν (b_ν)_k)` for
/// `n = kλ + μ`, where `m_k` is the numerical `k`-th moment of `h_μ`.
pub fn verify_unity(params: &AlgebraParams, dim_check: usize, opts: &UnityOptions) -> Result<UnityReport> {
    let lambda = params.lambda();
    let l = lambda as f64;
    let mut families = Vec::with_capacity(lambda);
    let mut diagonal = vec![0.0; dim_check];
    let mut experimental = false;
    for mu in 0..lambda {
        let spec = WeightSpec::for_params(params, mu)?;
        families.push(spec.family);
        let levels: Vec<usize> = (mu..dim_check).step_by(lambda).collect();
        if levels.is_empty() {
            continue;
        }
        let moments: Vec<f64> = if spec.is_evaluable() {
            (0..levels.len())
                .map(|k| integrate_moment(&spec, k, &opts.quad).map(|r| r.0))
                .collect::<Result<_>>()?
        } else if opts.experimental_general {
            experimental = true;
            let rule = moment_gauss_rule(params, mu, levels.len())?;
            if !rule.positive {
                return Err(Error::QuadratureFailure(format!(
                    "moment sequence for mu = {mu} admits no positive Gauss rule"
                )));
            }
            let scale = 1.0 / (PI * y_scale(lambda));
            (0..levels.len()).map(|k| scale * rule.moment(k)).collect()
        } else {
            return Err(Error::NotSupported(format!(
                "unity check for lambda = {lambda} with nonzero alpha needs the Meijer G weight"
            )));
        };
        for (k, &n) in levels.iter().enumerate() {
            let ln_scale = PI.ln() + (l - 2.0) * l.ln() - ln_moment_core(params, mu, k)?;
            diagonal[n] = moments[k] * ln_scale.exp();
        }
    }
    let max_deviation = diagonal.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    Ok(UnityReport {
        dim_check,
        diagonal,
        max_deviation,
        families,
        experimental,
    })
}

/// Positive quadrature rule `Σ w_j δ(y − y_j)` matching the first `2n`
/// moments of `π λ^{λ−2} h_μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// All recurrence coefficients `b_j > 0`, nodes `> 0` and weights `> 0`.
    pub positive: bool,
}

impl GaussRule {
    pub fn moment(&self, k: usize) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| w * y.powi(k as i32))
            .sum()
    }
}

/// Experimental: `n`-point Gauss rule from the exact moments
/// `k! Π_ν (b_ν)_k`, via the Chebyshev algorithm in rational arithmetic.
pub fn moment_gauss_rule(params: &AlgebraParams, mu: usize, n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss rule needs n >= 1".into()));
    }
    let b: Vec<BigRational> = denominators(params, mu)?
        .into_iter()
        .map(rational)
        .collect();
    let mut moments = Vec::with_capacity(2 * n);
    let mut m = BigRational::one();
    for k in 0..2 * n {
        if k > 0 {
            let kk = BigRational::from_integer((k as i64).into());
            m *= &kk;
            for bv in &b {
                m *= bv + &kk - BigRational::one();
            }
        }
        moments.push(m.clone());
    }
    let (alpha, beta) = chebyshev_recurrence(&moments, n);
    let positive_recurrence = beta.iter().all(|x| x.is_positive());
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            to_f64(&alpha[i])
        } else if i + 1 == j || j + 1 == i {
            to_f64(&beta[i.max(j)]).max(0.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let total = to_f64(&beta[0]);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], total * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let positive =
        positive_recurrence && pairs.iter().all(|&(y, w)| y > 0.0 && w > 0.0);
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        positive,
    })
}

/// Three-term recurrence `(α_j, β_j)`, `j < n`, from moments `m_0..m_{2n−1}`
/// with `β_0 = m_0`.
fn chebyshev_recurrence(m: &[BigRational], n: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let len = 2 * n;
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut prev: Vec<BigRational> = vec![BigRational::zero(); len];
    let mut cur: Vec<BigRational> = m[..len].to_vec();
    alpha.push(&m[1] / &m[0]);
    beta.push(m[0].clone());
    for k in 1..n {
        let mut next = vec![BigRational::zero(); len];
        for l in k..(len - k) {
            next[l] = &cur[l + 1] - &alpha[k - 1] * &cur[l] - &beta[k - 1] * &prev[l];
        }
        if next[k].is_zero() {
            alpha.push(BigRational::zero());
            beta.push(BigRational::zero());
            break;
        }
        alpha.push(&next[k + 1] / &next[k] - &cur[k] / &cur[k - 1]);
        beta.push(&next[k] / &cur[k - 1]);
        prev = cur;
        cur = next;
    }
    while alpha.len() < n {
        alpha.push(BigRational::zero());
        beta.push(BigRational::zero());
    }
    (alpha, beta)
}

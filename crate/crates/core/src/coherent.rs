//! Eigenstates `|z; μ⟩` of `J−` inside each sector `F_μ`.
//!
//! The state is the series `Σ_k c_k |kλ + μ⟩` with
//! `c_k ∝ w^k / sqrt(k! Π_ν (b_ν)_k)`, `w = z / λ^{(λ−2)/2}`, where the
//! `b_ν` are the lower parameters of the normalizing `0F_{λ−1}`:
//! `β̄_1 + 1, …, β̄_μ + 1, β̄_{μ+1}, …, β̄_{λ−1}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};
use crate::sga::build_generators;
use crate::special::sum::CompensatedSum;
use crate::special::{bessel_i, gamma, ln_factorial, ln_pochhammer, mittag_leffler, HypergeomParams};

/// Terms are added until `|t_k|² < TAIL_RATIO · Σ|t_j|²`.
pub const TAIL_RATIO: f64 = 1e-18;
/// Extra terms kept past the tail criterion.
pub const GUARD_TERMS: usize = 5;
const MAX_TERMS: usize = 1_000_000;

/// Lower parameters `β̄_1+1, …, β̄_μ+1, β̄_{μ+1}, …, β̄_{λ−1}` for sector μ.
pub fn denominators(params: &AlgebraParams, mu: usize) -> Result<Vec<f64>> {
    params.check_sector(mu)?;
    Ok((1..params.lambda())
        .map(|nu| {
            if nu <= mu {
                params.beta_bar(nu) + 1.0
            } else {
                params.beta_bar(nu)
            }
        })
        .collect())
}

pub fn hypergeometric(params: &AlgebraParams, mu: usize) -> Result<HypergeomParams> {
    HypergeomParams::new(denominators(params, mu)?)
}

/// `λ^{λ−2}`, the scale between `|z|²` and the series variable `y`.
pub fn y_scale(lambda: usize) -> f64 {
    (lambda as f64).powi(lambda as i32 - 2)
}

/// `y = |z|² / λ^{λ−2}`.
pub fn y_of(lambda: usize, modulus: f64) -> f64 {
    modulus * modulus / y_scale(lambda)
}

/// `N_μ(|z|) = 0F_{λ−1}(b; y)`.
pub fn normalization(params: &AlgebraParams, mu: usize, modulus: f64) -> Result<f64> {
    Ok(hypergeometric(params, mu)?.eval(y_of(params.lambda(), modulus)))
}

/// `ln(k! Π_ν (b_ν)_k)`.
fn ln_denominator(b: &[f64], k: usize) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    acc.add(ln_factorial(k));
    for &bv in b {
        acc.add(ln_pochhammer(bv, k)?);
    }
    Ok(acc.value())
}

/// A normalized coherent state truncated after `k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    lambda: usize,
    mu: usize,
    z: Complex64,
    y: f64,
    /// Normalized coefficients of `|kλ + μ⟩`, `k = 0..=k_max`.
    coeffs: Vec<Complex64>,
    norm_factor: f64,
    /// `ln Σ |t_k|²` of the unnormalized series.
    ln_series_norm: f64,
}

impl CoherentState {
    /// Builds `|z; μ⟩`.
    pub fn new(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite eigenvalue {z}")));
        }
        let lambda = params.lambda();
        let b = denominators(params, mu)?;
        let modulus = z.norm();
        let phase = z.arg();
        let y = y_of(lambda, modulus);

        // ln|t_k| = k ln|w| - ln(k! Π(b)_k)/2
        let mut logs = vec![0.0];
        if modulus > 0.0 {
            let ln_w = modulus.ln() - 0.5 * (lambda as f64 - 2.0) * (lambda as f64).ln();
            let mut running = CompensatedSum::new();
            running.add(1.0);
            let mut guard = 0;
            for k in 1..MAX_TERMS {
                let lt = k as f64 * ln_w - 0.5 * ln_denominator(&b, k)?;
                logs.push(lt);
                let t2 = (2.0 * lt).exp();
                let decreasing = lt < logs[k - 1];
                if guard > 0 {
                    guard += 1;
                    if guard > GUARD_TERMS {
                        break;
                    }
                } else if decreasing && t2 < TAIL_RATIO * running.value() {
                    guard = 1;
                }
                running.add(t2);
            }
        }
        let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scaled: CompensatedSum = logs.iter().map(|&l| (2.0 * (l - peak)).exp()).collect();
        let ln_series_norm = 2.0 * peak + scaled.value().ln();
        let half = 0.5 * ln_series_norm;
        let coeffs = logs
            .iter()
            .enumerate()
            .map(|(k, &l)| Complex64::from_polar((l - half).exp(), k as f64 * phase))
            .collect();
        let hyp = HypergeomParams::new(b)?.eval(y);
        let norm_factor = if hyp.is_finite() {
            hyp
        } else {
            ln_series_norm.exp()
        };
        Ok(CoherentState {
            lambda,
            mu,
            z,
            y,
            coeffs,
            norm_factor,
            ln_series_norm,
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `N_μ(|z|)` from the hypergeometric series.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// `Σ_k |t_k|²` of the unnormalized coefficients.
    pub fn series_norm(&self) -> f64 {
        self.ln_series_norm.exp()
    }

    pub fn ln_series_norm(&self) -> f64 {
        self.ln_series_norm
    }

    /// Largest occupied Fock level.
    pub fn max_level(&self) -> usize {
        self.k_max() * self.lambda + self.mu
    }

    /// `⟨n|z; μ⟩`.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        if n % self.lambda != self.mu {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs
            .get(n / self.lambda)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// The state as a vector over `|0⟩ … |dim−1⟩`.
    pub fn fock_vector(&self, dim: usize) -> Result<Vec<Complex64>> {
        if dim <= self.max_level() {
            return Err(Error::DimTooSmall {
                dim,
                min: self.max_level() + 1,
            });
        }
        Ok((0..dim).map(|n| self.amplitude(n)).collect())
    }

    /// `⟨self|other⟩` from the stored coefficients.
    pub fn inner(&self, other: &CoherentState) -> Complex64 {
        if self.mu != other.mu || self.lambda != other.lambda {
            return Complex64::new(0.0, 0.0);
        }
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let p = a.conj() * b;
            re.add(p.re);
            im.add(p.im);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn dump(&self, params: &AlgebraParams) -> StateDump {
        StateDump {
            lambda: self.lambda,
            alpha: params.alpha().to_vec(),
            z: ComplexPair {
                re: self.z.re,
                im: self.z.im,
            },
            mu: self.mu,
            k_max: self.k_max(),
            y: self.y,
            norm_factor: self.norm_factor,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
}

/// JSON form of a coherent state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateDump {
    pub lambda: usize,
    pub alpha: Vec<f64>,
    pub z: ComplexPair,
    pub mu: usize,
    pub k_max: usize,
    pub y: f64,
    pub norm_factor: f64,
    /// `[re, im]` of the coefficient of `|kλ + μ⟩`.
    pub coeffs: Vec<[f64; 2]>,
}

/// `‖(J− − z)|z; μ⟩‖` with the matrix `J−` on `dim > λ(k_max + 2)` states.
pub fn eigen_residual(state: &CoherentState, params: &AlgebraParams, dim: usize) -> Result<f64> {
    let min = residual_dim(state);
    if dim < min {
        return Err(Error::DimTooSmall { dim, min });
    }
    let g = build_generators(params, dim)?;
    let v = state.fock_vector(dim)?;
    let jv = g.lowering.apply(&v);
    let sq: CompensatedSum = jv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - state.z * b).norm_sqr())
        .collect();
    Ok(sq.value().sqrt())
}

/// `N_μ = μ! E_{λ,μ+1}(λ²|z|²)`, valid for `α = 0`.
pub fn mittag_leffler_normalization(params: &AlgebraParams, mu: usize, modulus: f64) -> Result<f64> {
    params.check_sector(mu)?;
    if !params.is_undeformed() {
        return Err(Error::InvalidArgument("Mittag-Leffler form needs alpha = 0".into()));
    }
    let l = params.lambda() as f64;
    Ok(gamma(mu as f64 + 1.0) * mittag_leffler(l, mu as f64 + 1.0, l * l * modulus * modulus)?)
}

/// `N_μ = Γ(ν+1) |z|^{−ν} I_ν(2|z|)`, `ν = (α_0 − 1 + 2μ)/2`, valid for `λ = 2`.
pub fn bessel_normalization(params: &AlgebraParams, mu: usize, modulus: f64) -> Result<f64> {
    params.check_sector(mu)?;
    if params.lambda() != 2 {
        return Err(Error::InvalidArgument("Bessel form needs lambda = 2".into()));
    }
    let nu = (params.alpha()[0] - 1.0 + 2.0 * mu as f64) / 2.0;
    if modulus == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma(nu + 1.0) * modulus.powf(-nu) * bessel_i(nu, 2.0 * modulus)?)
}

/// Relative errors of the normalization identities at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalizationCheck {
    /// `0F_{λ−1}` against the summed squared coefficients.
    pub series: f64,
    /// Against the Mittag-Leffler form, when `α = 0`.
    pub mittag_leffler: Option<f64>,
    /// Against the Bessel-I form, when `λ = 2`.
    pub bessel: Option<f64>,
}

pub fn check_normalization(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<NormalizationCheck> {
    let state = CoherentState::new(params, z, mu)?;
    let n = normalization(params, mu, z.norm())?;
    let rel = |other: f64| (other - n).abs() / n;
    Ok(NormalizationCheck {
        series: rel(state.series_norm()),
        mittag_leffler: if params.is_undeformed() {
            Some(rel(mittag_leffler_normalization(params, mu, z.norm())?))
        } else {
            None
        },
        bessel: if params.lambda() == 2 {
            Some(rel(bessel_normalization(params, mu, z.norm())?))
        } else {
            None
        },
    })
}

/// Smallest dimension accepted by [`eigen_residual`].
pub fn residual_dim(state: &CoherentState) -> usize {
    (state.lambda() * (state.k_max() + 2) + 1).max(3 * state.lambda())
}

/// `⟨z1; μ1 | z2; μ2⟩` from the closed form.
pub fn kernel(
    params: &AlgebraParams,
    z1: Complex64,
    mu1: usize,
    z2: Complex64,
    mu2: usize,
) -> Result<Complex64> {
    params.check_sector(mu1)?;
    params.check_sector(mu2)?;
    if mu1 != mu2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let hyp = hypergeometric(params, mu1)?;
    let lambda = params.lambda();
    let n1 = hyp.eval(y_of(lambda, z1.norm()));
    let n2 = hyp.eval(y_of(lambda, z2.norm()));
    let cross = hyp.eval_complex(z1.conj() * z2 / y_scale(lambda));
    Ok(cross / (n1 * n2).sqrt())
}

/// `ψ̃_μ(z, z*)`, the coherent-state representation of a Fock-basis vector.
pub fn expand_state(
    params: &AlgebraParams,
    psi: &[Complex64],
    z: Complex64,
    mu: usize,
) -> Result<Complex64> {
    let lambda = params.lambda();
    let b = denominators(params, mu)?;
    let w = z.conj() / y_scale(lambda).sqrt();
    let ln_norm = normalization(params, mu, z.norm())?.ln();
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let mut pow = Complex64::new(1.0, 0.0);
    for (k, n) in (mu..psi.len()).step_by(lambda).enumerate() {
        if k > 0 {
            pow *= w;
        }
        let scale = (-0.5 * (ln_denominator(&b, k)? + ln_norm)).exp();
        let t = pow * psi[n] * scale;
        re.add(t.re);
        im.add(t.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `max ‖|z + δ; μ⟩ − |z; μ⟩‖ / |δ|` over `δ ∈ {h, ih}`.
pub fn continuity_constant(params: &AlgebraParams, z: Complex64, mu: usize, h: f64) -> Result<f64> {
    let base = CoherentState::new(params, z, mu)?;
    let mut worst: f64 = 0.0;
    for d in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
        let moved = CoherentState::new(params, z + d, mu)?;
        let n = base.coeffs.len().max(moved.coeffs.len());
        let sq: CompensatedSum = (0..n)
            .map(|k| {
                let a = base.coeffs.get(k).copied().unwrap_or_default();
                let b = moved.coeffs.get(k).copied().unwrap_or_default();
                (a - b).norm_sqr()
            })
            .collect();
        worst = worst.max(sq.value().sqrt() / h);
    }
    Ok(worst)
}

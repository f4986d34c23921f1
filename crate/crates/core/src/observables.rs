//! Photon statistics and squeezing in the coherent states `|z; μ⟩`.
//!
//! Every quantity has two routes: the closed forms in terms of the
//! normalization ratios `Φ^{μ'}_μ(y) = N_{μ'}/N_μ`, and an oracle that works
//! directly on the Fock amplitudes (photon-number moments from `|c_k|²`,
//! quadrature moments from the `a`, `a†` matrices).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{build_operators, AlgebraParams};
use crate::coherent::{hypergeometric, y_of, CoherentState, ComplexPair};
use crate::error::{Error, Result};
use crate::special::sum::CompensatedSum;

/// Which route produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    ClosedForm,
    Oracle,
}

/// `Φ^{μ'}_μ(y) = 0F_{λ−1}(b_{μ'}; y) / 0F_{λ−1}(b_μ; y)`.
pub fn phi_ratio(params: &AlgebraParams, mu_num: usize, mu_den: usize, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::InvalidArgument(format!("phi ratio needs y >= 0, got {y}")));
    }
    let num = hypergeometric(params, mu_num)?.eval(y);
    let den = hypergeometric(params, mu_den)?.eval(y);
    Ok(num / den)
}

fn beta_bar_product(params: &AlgebraParams, from: usize) -> f64 {
    (from..params.lambda()).map(|nu| params.beta_bar(nu)).product()
}

/// Mandel `Q` from the three-branch closed form.
pub fn mandel_q_closed(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<f64> {
    params.check_sector(mu)?;
    let lambda = params.lambda();
    let l = lambda as f64;
    let y = y_of(lambda, z.norm());
    let bb = |nu: usize| params.beta_bar(nu);
    let phi = |a: usize, b: usize| phi_ratio(params, a, b, y);
    let q = match mu {
        0 => {
            let top = bb(lambda - 1);
            l * (1.0 - top - y * phi(lambda - 1, 0)? / beta_bar_product(params, 1)
                + top * phi(lambda - 2, lambda - 1)?)
                - 1.0
        }
        1 => {
            let b1 = bb(1);
            let p01 = phi(0, 1)?;
            let den = 1.0 / l - b1 + b1 * p01;
            let num = (b1 - 1.0 / l) * (1.0 + l * b1 * p01) - l * b1 * b1 * p01 * p01
                + l * y * phi(lambda - 1, 1)? / beta_bar_product(params, 2);
            num / den
        }
        _ => {
            let m = mu as f64;
            let b = bb(mu);
            let bm = bb(mu - 1);
            let p1 = phi(mu - 1, mu)?;
            let den = m / l - b + b * p1;
            let num = b - m / l + l * b * (b - bm - 1.0 / l) * p1 - l * b * b * p1 * p1
                + l * bm * b * phi(mu - 2, mu)?;
            num / den
        }
    };
    Ok(q)
}

/// Photon-number mean and variance from the stored amplitudes.
pub fn photon_moments(state: &CoherentState) -> (f64, f64) {
    let lambda = state.lambda();
    let mu = state.mu();
    let weights: Vec<f64> = state.coeffs().iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = weights.iter().copied().collect::<CompensatedSum>().value();
    let level = |k: usize| (k * lambda + mu) as f64;
    let mean = weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * level(k))
        .collect::<CompensatedSum>()
        .value()
        / total;
    let var = weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * (level(k) - mean).powi(2))
        .collect::<CompensatedSum>()
        .value()
        / total;
    (mean, var)
}

/// Mandel `Q` from `⟨N⟩`, `⟨N²⟩` summed over the state's amplitudes.
pub fn mandel_q_oracle(state: &CoherentState) -> Result<f64> {
    let (mean, var) = photon_moments(state);
    if mean == 0.0 {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    Ok((var - mean) / mean)
}

/// `⟨H0⟩` in `|z; μ⟩`.
pub fn h0_mean(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<f64> {
    params.check_sector(mu)?;
    let lambda = params.lambda();
    let l = lambda as f64;
    let y = y_of(lambda, z.norm());
    Ok(if mu == 0 {
        l * (0.5 * params.beta_bar(1)
            + y * phi_ratio(params, lambda - 1, 0, y)? / beta_bar_product(params, 1))
    } else {
        l * (0.5 * (params.beta_bar(mu + 1) - params.beta_bar(mu))
            + params.beta_bar(mu) * phi_ratio(params, mu - 1, mu, y)?)
    })
}

/// `⟨H0²⟩` in `|z; 0⟩`.
pub fn h0sq_mean(params: &AlgebraParams, z: Complex64) -> Result<f64> {
    let lambda = params.lambda();
    let l = lambda as f64;
    let y = y_of(lambda, z.norm());
    let b1 = params.beta_bar(1);
    let top = params.beta_bar(lambda - 1);
    let bracket = (1.0 + b1 - top) * phi_ratio(params, lambda - 1, 0, y)?
        + top * phi_ratio(params, lambda - 2, 0, y)?;
    Ok(l * l * (0.25 * b1 * b1 + y * bracket / beta_bar_product(params, 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dispersions {
    pub disp_x: f64,
    pub disp_p: f64,
    pub h0_mean: f64,
}

/// `⟨(Δx)²⟩ = ⟨H0⟩ + δ_{λ2}(z + z*)`, `⟨(Δp)²⟩ = ⟨H0⟩ − δ_{λ2}(z + z*)`.
pub fn dispersions(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<Dispersions> {
    let h = h0_mean(params, z, mu)?;
    let shift = if params.lambda() == 2 { 2.0 * z.re } else { 0.0 };
    Ok(Dispersions {
        disp_x: h + shift,
        disp_p: h - shift,
        h0_mean: h,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VacuumReference {
    pub mu: usize,
    /// `⟨(Δx)²⟩_0 = ⟨(Δp)²⟩_0`.
    pub disp0: f64,
    /// `⟨(Δx)⁴⟩_0`, given for `μ = 0` only.
    pub disp0_4: Option<f64>,
}

/// Dispersions in the sector's lowest state `|μ⟩`.
pub fn vacuum_reference(params: &AlgebraParams, mu: usize) -> Result<VacuumReference> {
    params.check_sector(mu)?;
    let l = params.lambda() as f64;
    let disp0 = 0.5 * l * (params.beta_bar(mu + 1) + params.beta_bar(mu));
    let disp0_4 = (mu == 0).then(|| {
        let b1 = params.beta_bar(1);
        0.25 * l * l * b1 * (b1 + params.beta_bar(2))
    });
    Ok(VacuumReference { mu, disp0, disp0_4 })
}

/// `|⟨[x, p]⟩|²/4 = (λ²/4)(β̄_{μ+1} − β̄_μ)²`, with `β̄_λ = 1`.
pub fn uncertainty_bound(params: &AlgebraParams, mu: usize) -> Result<f64> {
    params.check_sector(mu)?;
    let l = params.lambda() as f64;
    let d = params.beta_bar(mu + 1) - params.beta_bar(mu);
    Ok(0.25 * l * l * d * d)
}

/// `(X, P)`: dispersions over their vacuum values.
pub fn squeeze_ratios(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<(f64, f64)> {
    let d = dispersions(params, z, mu)?;
    let v = vacuum_reference(params, mu)?;
    Ok((d.disp_x / v.disp0, d.disp_p / v.disp0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourthOrder {
    pub x4: f64,
    pub p4: f64,
    /// `⟨(Δx)⁴⟩ / ⟨(Δx)⁴⟩_0`.
    #[serde(rename = "Y")]
    pub y: f64,
    /// `⟨(Δp)⁴⟩ / ⟨(Δp)⁴⟩_0`.
    #[serde(rename = "Q4")]
    pub q4: f64,
    pub h0sq_mean: f64,
}

/// Fourth-order quadrature moments in `|z; 0⟩`.
pub fn fourth_order(params: &AlgebraParams, z: Complex64, mu: usize) -> Result<FourthOrder> {
    if mu != 0 {
        return Err(Error::UnsupportedSector { mu });
    }
    let lambda = params.lambda();
    let l = lambda as f64;
    let b1 = params.beta_bar(1);
    let b2 = params.beta_bar(2);
    let top = params.beta_bar(lambda - 1);
    let h = h0_mean(params, z, 0)?;
    let h2 = h0sq_mean(params, z)?;
    let common = 1.5 * h2 - 0.25 * l * (1.0 + b1 - b2 - top) * h
        + 0.125 * l * l * b1 * (1.0 + b2 - top);
    let re2 = 2.0 * z.re;
    let (plus, minus) = match lambda {
        2 => {
            let sq = 2.0 * (z * z).re;
            (sq + 2.0 * re2 * (h + 1.0), sq - 2.0 * re2 * (h + 1.0))
        }
        4 => (re2, re2),
        _ => (0.0, 0.0),
    };
    let x4 = common + plus;
    let p4 = common + minus;
    let v4 = vacuum_reference(params, 0)?.disp0_4.expect("mu = 0");
    Ok(FourthOrder {
        x4,
        p4,
        y: x4 / v4,
        q4: p4 / v4,
        h0sq_mean: h2,
    })
}

/// Quadrature moments of a state computed with the truncated `a`, `a†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixMoments {
    pub h0_mean: f64,
    pub h0sq_mean: f64,
    pub disp_x: f64,
    pub disp_p: f64,
    pub x4: f64,
    pub p4: f64,
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (a, b) in u.iter().zip(v) {
        let t = a.conj() * b;
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Oracle for [`dispersions`] and [`fourth_order`]: builds `x`, `p` from the
/// ladder matrices on a space four levels above the state's support, so
/// that no applied power reaches the truncation edge.
pub fn matrix_moments(state: &CoherentState, params: &AlgebraParams) -> Result<MatrixMoments> {
    let dim = (state.max_level() + 5).max(2 * params.lambda());
    let ops = build_operators(params, dim)?;
    let psi = state.fock_vector(dim)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a_psi = ops.annihilation.apply(&psi);
    let ad_psi = ops.creation.apply(&psi);
    let i = Complex64::i();
    let quad = |sign: Complex64, phase: Complex64, v: &[Complex64]| -> Vec<Complex64> {
        // phase·(a† + sign·a)/√2 applied to v
        let av = ops.annihilation.apply(v);
        let adv = ops.creation.apply(v);
        adv.iter()
            .zip(&av)
            .map(|(c, a)| phase * s * (c + sign * a))
            .collect()
    };
    let one = Complex64::new(1.0, 0.0);
    let central = |sign: Complex64, phase: Complex64| -> (f64, f64) {
        let q_psi: Vec<Complex64> = ad_psi
            .iter()
            .zip(&a_psi)
            .map(|(c, a)| phase * s * (c + sign * a))
            .collect();
        let mean = dot(&psi, &q_psi).re;
        let d1: Vec<Complex64> = q_psi.iter().zip(&psi).map(|(q, p)| q - mean * p).collect();
        let qd1 = quad(sign, phase, &d1);
        let d2: Vec<Complex64> = qd1.iter().zip(&d1).map(|(q, d)| q - mean * d).collect();
        (dot(&d1, &d1).re, dot(&d2, &d2).re)
    };
    let (disp_x, x4) = central(one, one);
    let (disp_p, p4) = central(-one, i);
    let h_psi = ops.hamiltonian.apply(&psi);
    Ok(MatrixMoments {
        h0_mean: dot(&psi, &h_psi).re,
        h0sq_mean: dot(&h_psi, &h_psi).re,
        disp_x,
        disp_p,
        x4,
        p4,
    })
}

/// All observables of one state by one route.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableReport {
    pub z: ComplexPair,
    pub mu: usize,
    pub n_mean: f64,
    pub n_var: f64,
    /// `None` when `⟨N⟩ = 0` on the oracle route.
    pub mandel_q: Option<f64>,
    pub h0_mean: f64,
    pub h0sq_mean: Option<f64>,
    pub disp_x: f64,
    pub disp_p: f64,
    #[serde(rename = "X")]
    pub x_ratio: f64,
    #[serde(rename = "P")]
    pub p_ratio: f64,
    pub x4: Option<f64>,
    pub p4: Option<f64>,
    #[serde(rename = "Y")]
    pub y_ratio: Option<f64>,
    #[serde(rename = "Q4")]
    pub q4_ratio: Option<f64>,
    pub route: Route,
}

/// Evaluates every observable of `|z; μ⟩` by the chosen route. Fourth-order
/// entries are filled for `μ = 0` only.
pub fn observe(params: &AlgebraParams, z: Complex64, mu: usize, route: Route) -> Result<ObservableReport> {
    params.check_sector(mu)?;
    let vac = vacuum_reference(params, mu)?;
    let state = CoherentState::new(params, z, mu)?;
    let (n_mean, n_var) = photon_moments(&state);
    let report = |mandel_q, h0_mean, h0sq_mean, disp_x: f64, disp_p: f64, x4: Option<f64>, p4: Option<f64>| {
        let v4 = vac.disp0_4;
        ObservableReport {
            z: ComplexPair { re: z.re, im: z.im },
            mu,
            n_mean,
            n_var,
            mandel_q,
            h0_mean,
            h0sq_mean,
            disp_x,
            disp_p,
            x_ratio: disp_x / vac.disp0,
            p_ratio: disp_p / vac.disp0,
            x4,
            p4,
            y_ratio: x4.zip(v4).map(|(a, b)| a / b),
            q4_ratio: p4.zip(v4).map(|(a, b)| a / b),
            route,
        }
    };
    match route {
        Route::ClosedForm => {
            let d = dispersions(params, z, mu)?;
            let f = if mu == 0 { Some(fourth_order(params, z, 0)?) } else { None };
            Ok(report(
                Some(mandel_q_closed(params, z, mu)?),
                d.h0_mean,
                f.map(|f| f.h0sq_mean),
                d.disp_x,
                d.disp_p,
                f.map(|f| f.x4),
                f.map(|f| f.p4),
            ))
        }
        Route::Oracle => {
            let q = match mandel_q_oracle(&state) {
                Ok(q) => Some(q),
                Err(Error::ZeroMeanPhotonNumber) => None,
                Err(e) => return Err(e),
            };
            let m = matrix_moments(&state, params)?;
            let zero = mu == 0;
            Ok(report(
                q,
                m.h0_mean,
                zero.then_some(m.h0sq_mean),
                m.disp_x,
                m.disp_p,
                zero.then_some(m.x4),
                zero.then_some(m.p4),
            ))
        }
    }
}

/// One point of a sweep: both routes, or the error that stopped them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub z: ComplexPair,
    pub mu: usize,
    pub closed: Option<ObservableReport>,
    pub oracle: Option<ObservableReport>,
    /// `|Q_closed − Q_oracle| / max(1, |Q_oracle|)`.
    pub q_disagreement: Option<f64>,
    pub error: Option<String>,
}

fn sweep_point(params: &AlgebraParams, mu: usize, z: Complex64) -> SweepPoint {
    let zp = ComplexPair { re: z.re, im: z.im };
    let both = observe(params, z, mu, Route::ClosedForm)
        .and_then(|c| observe(params, z, mu, Route::Oracle).map(|o| (c, o)));
    match both {
        Ok((c, o)) => {
            let q_disagreement = c
                .mandel_q
                .zip(o.mandel_q)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1.0));
            SweepPoint {
                z: zp,
                mu,
                closed: Some(c),
                oracle: Some(o),
                q_disagreement,
                error: None,
            }
        }
        Err(e) => SweepPoint {
            z: zp,
            mu,
            closed: None,
            oracle: None,
            q_disagreement: None,
            error: Some(e.to_string()),
        },
    }
}

/// Both routes along a path of `z` values, in parallel, in path order.
pub fn sweep(params: &AlgebraParams, mu: usize, z_path: &[Complex64]) -> Vec<SweepPoint> {
    z_path.par_iter().map(|&z| sweep_point(params, mu, z)).collect()
}

/// Leading `λ = 2`, `μ = 0` behaviour of `X` and `Y` along real negative `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lambda2Asymptotics {
    /// `dX/d(−z)` at `z = 0`: `−2/β̄_1`.
    pub x_slope: f64,
    /// `X` as `−z → ∞`: `1/(2β̄_1)`.
    pub x_limit: f64,
    /// `dY/d(−z)` at `z = 0`: `−4/β̄_1`.
    pub y_slope: f64,
    /// `Y` as `−z → ∞`: `3/(4β̄_1(1 + β̄_1))`.
    pub y_limit: f64,
}

pub fn lambda2_asymptotics(params: &AlgebraParams) -> Result<Lambda2Asymptotics> {
    if params.lambda() != 2 {
        return Err(Error::InvalidArgument("asymptotics are for lambda = 2".into()));
    }
    let b = params.beta_bar(1);
    Ok(Lambda2Asymptotics {
        x_slope: -2.0 / b,
        x_limit: 0.5 / b,
        y_slope: -4.0 / b,
        y_limit: 0.75 / (b * (1.0 + b)),
    })
}

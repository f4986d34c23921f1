//! Spectrum generating algebra: `J± = (a†)^λ/λ, a^λ/λ` and `J0 = H0/λ`,
//! the deformation polynomial `f` with `[J+, J−] = f(J0, P_μ)`, the
//! Casimir polynomial `h` with `C = J−J+ + h(J0, P_μ)`, and checks of every
//! identity on truncated matrices.
//!
//! Both polynomials are expanded in exact rational arithmetic, one sector at
//! a time: on `F_μ` every projector-weighted sum collapses to its `μ` term.
//! The polynomial variable is `x = λJ0` during expansion; stored coefficients
//! are those of powers of `J0`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{block_max_abs, block_max_diff, build_operators, AlgebraParams, FockOperator};
use crate::error::{Error, Result};
use crate::polynomial::{ratio, rational, to_dd, to_f64, RationalPoly};
use crate::special::sum::DoubleDouble;
use crate::special::{binomial, stirling_first, STIRLING_MAX};

/// `Σ_μ P_μ Σ_i c[i][μ] J0^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorPolynomial {
    /// `coeffs[i][μ]` multiplies `J0^i` on sector `μ`.
    coeffs: Vec<Vec<f64>>,
    coeffs_dd: Vec<Vec<DoubleDouble>>,
    exact: Vec<RationalPoly>,
}

impl ProjectorPolynomial {
    /// From exact per-sector polynomials in `J0`.
    fn from_sectors(exact: Vec<RationalPoly>, degree: usize) -> Self {
        let coeffs = (0..=degree)
            .map(|i| exact.iter().map(|p| to_f64(&p.coeff(i))).collect())
            .collect();
        let coeffs_dd = (0..=degree)
            .map(|i| exact.iter().map(|p| to_dd(&p.coeff(i))).collect())
            .collect();
        ProjectorPolynomial {
            coeffs,
            coeffs_dd,
            exact,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn sectors(&self) -> usize {
        self.exact.len()
    }

    /// Coefficient of `J0^power` on sector `mu`.
    pub fn coeff(&self, power: usize, mu: usize) -> f64 {
        self.coeffs
            .get(power)
            .map_or(0.0, |row| row[mu % row.len()])
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// Exact polynomial in `J0` for sector `mu`.
    pub fn exact_sector(&self, mu: usize) -> &RationalPoly {
        &self.exact[mu % self.exact.len()]
    }

    /// Value on sector `mu` at `J0 = j0`.
    pub fn evaluate(&self, mu: usize, j0: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, row| acc * j0 + row[mu % row.len()])
    }

    pub fn evaluate_dd(&self, mu: usize, j0: DoubleDouble) -> DoubleDouble {
        self.coeffs_dd
            .iter()
            .rev()
            .fold(DoubleDouble::ZERO, |acc, row| acc * j0 + row[mu % row.len()])
    }

    /// The diagonal operator `Σ_μ P_μ p_μ(J0)`, with `J0` taken from the
    /// diagonal of `j0`.
    pub fn to_operator(&self, j0: &FockOperator, label: impl Into<String>) -> FockOperator {
        let lambda = self.sectors();
        let diag: Vec<DoubleDouble> = j0
            .diagonal_dd()
            .into_iter()
            .enumerate()
            .map(|(n, x)| self.evaluate_dd(n % lambda, x))
            .collect();
        FockOperator::from_diagonal(label, &diag).with_exact_rows(j0.exact_rows())
    }
}

/// Sector label, Casimir eigenvalue and lowest `J0` eigenvalue of one
/// unitary irreducible representation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnirrepData {
    pub mu: usize,
    pub casimir_value: f64,
    pub lowest_j0: f64,
}

/// `J+`, `J−`, `J0` on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct Generators {
    pub raising: FockOperator,
    pub lowering: FockOperator,
    pub weight: FockOperator,
    pub projectors: Vec<FockOperator>,
}

impl Generators {
    pub fn dim(&self) -> usize {
        self.weight.dim()
    }
}

/// Interior block for SGA identities: the top `2λ` basis states are dropped.
pub fn interior_dim(dim: usize, lambda: usize) -> usize {
    dim.saturating_sub(2 * lambda)
}

/// α with the last component re-closed exactly in rationals.
fn exact_alpha(params: &AlgebraParams) -> Vec<BigRational> {
    let lambda = params.lambda();
    let mut alpha: Vec<BigRational> = params.alpha()[..lambda - 1]
        .iter()
        .map(|&a| rational(a))
        .collect();
    let closing = -alpha.iter().fold(BigRational::zero(), |s, a| s + a);
    alpha.push(closing);
    alpha
}

/// `Σ_{m=1}^{count} α_{μ+m}`.
fn alpha_run(alpha: &[BigRational], mu: usize, count: usize) -> BigRational {
    let lambda = alpha.len();
    (1..=count).fold(BigRational::zero(), |s, m| s + &alpha[(mu + m) % lambda])
}

fn half() -> BigRational {
    ratio(1, 2)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(2l + 1 + α_μ + 2 Σ_{m=1}^{l} α_{μ+m}) / 2`.
fn ascending_shift(alpha: &[BigRational], mu: usize, l: usize) -> BigRational {
    (int(2 * l as i64 + 1) + &alpha[mu] + int(2) * alpha_run(alpha, mu, l)) * half()
}

/// `(-2j - 1 + α_μ + 2 Σ_{k=1}^{λ-j-1} α_{μ+k}) / 2`.
fn descending_shift(alpha: &[BigRational], mu: usize, j: usize) -> BigRational {
    let lambda = alpha.len();
    (int(-2 * j as i64 - 1) + &alpha[mu] + int(2) * alpha_run(alpha, mu, lambda - j - 1)) * half()
}

/// Product `Π_{k=1}^{λ-1} (2k - 1 + α_μ + 2 Σ_{l=1}^{k-1} α_{μ+l})` paired
/// with `2λ - 1 - α_μ`, i.e. `λ² 2^λ c_μ`.
fn casimir_numerator(alpha: &[BigRational], mu: usize) -> BigRational {
    let lambda = alpha.len();
    let lead = int(2 * lambda as i64 - 1) - &alpha[mu];
    (1..lambda).fold(lead, |acc, k| {
        acc * (int(2 * k as i64 - 1) + &alpha[mu] + int(2) * alpha_run(alpha, mu, k - 1))
    })
}

/// Converts a polynomial in `x = λJ0` to one in `J0`.
fn in_weight(p: &RationalPoly, lambda: usize) -> RationalPoly {
    p.rescale_argument(&int(lambda as i64))
}

fn f_sector(alpha: &[BigRational], mu: usize) -> RationalPoly {
    let lambda = alpha.len();
    let ascending = |count: usize| {
        RationalPoly::product_of_linears((0..count).map(|l| ascending_shift(alpha, mu, l)))
    };
    let mut bracket = ascending(lambda - 1);
    let lowest = RationalPoly::linear(-(int(1) + &alpha[mu]) * half());
    for i in 1..lambda {
        let descending = RationalPoly::product_of_linears(
            (1..i).map(|j| descending_shift(alpha, mu, j)),
        );
        let term = &(&lowest * &descending) * &ascending(lambda - i - 1);
        bracket = &bracket + &term;
    }
    in_weight(&bracket.scale(&-ratio(1, lambda as i64)), lambda)
}

fn h_sector(alpha: &[BigRational], mu: usize) -> RationalPoly {
    let lambda = alpha.len();
    let lead = (int(2 * lambda as i64 - 1) - &alpha[mu]) * half();
    let product = RationalPoly::product_of_linears(
        std::iter::once(lead).chain((1..lambda).map(|k| {
            (int(2 * k as i64 - 1) + &alpha[mu] + int(2) * alpha_run(alpha, mu, k - 1)) * half()
        })),
    );
    let two_pow = BigRational::from_integer(BigInt::one() << lambda);
    let constant = RationalPoly::constant(casimir_numerator(alpha, mu) / two_pow);
    let lam2 = ratio(1, (lambda * lambda) as i64);
    in_weight(&(&constant - &product).scale(&lam2), lambda)
}

/// Deformation polynomial `f(J0, P_μ)` of degree λ−1.
pub fn f_polynomial(params: &AlgebraParams) -> ProjectorPolynomial {
    let alpha = exact_alpha(params);
    let sectors = (0..params.lambda()).map(|mu| f_sector(&alpha, mu)).collect();
    ProjectorPolynomial::from_sectors(sectors, params.lambda() - 1)
}

/// Casimir polynomial `h(J0, P_μ)` of degree λ.
pub fn h_polynomial(params: &AlgebraParams) -> ProjectorPolynomial {
    let alpha = exact_alpha(params);
    let sectors = (0..params.lambda()).map(|mu| h_sector(&alpha, mu)).collect();
    ProjectorPolynomial::from_sectors(sectors, params.lambda())
}

/// The undeformed (`α = 0`) polynomials from their binomial/Stirling sums.
pub fn alpha_zero_polynomials(lambda: usize) -> Result<(ProjectorPolynomial, ProjectorPolynomial)> {
    if lambda < 2 {
        return Err(Error::InvalidLambda(lambda));
    }
    if lambda > STIRLING_MAX {
        return Err(Error::OutOfRange {
            what: "grading order for Stirling sums",
            value: lambda,
            max: STIRLING_MAX,
        });
    }
    let binom = |i: usize, j: usize| BigRational::from_integer(BigInt::from(binomial(i, j)));
    let stirling = |i: usize| -> Result<BigRational> {
        Ok(BigRational::from_integer(BigInt::from(stirling_first(i, lambda)?)))
    };
    let pow = |base: BigRational, e: usize| (0..e).fold(BigRational::one(), |acc, _| acc * &base);
    let inv_l2 = ratio(1, (lambda * lambda) as i64);

    let mut f = vec![BigRational::zero(); lambda + 1];
    for (j, slot) in f.iter_mut().enumerate() {
        if (lambda - j) % 2 == 0 {
            continue;
        }
        let mut inner = BigRational::zero();
        for i in j..=lambda {
            inner += binom(i, j) * pow(ratio(-1, 2), i - j) * stirling(i)?;
        }
        *slot = int(2) * inner * &inv_l2;
    }
    let mut h = vec![BigRational::zero(); lambda + 1];
    for (j, slot) in h.iter_mut().enumerate().skip(1) {
        let mut inner = BigRational::zero();
        for i in j..=lambda {
            let sign = if (lambda - i) % 2 == 0 { int(1) } else { int(-1) };
            inner += sign * binom(i, j) * pow(half(), i - j) * stirling(i)?;
        }
        *slot = -inner * &inv_l2;
    }
    let fp = in_weight(&RationalPoly::from_coeffs(f), lambda);
    let hp = in_weight(&RationalPoly::from_coeffs(h), lambda);
    Ok((
        ProjectorPolynomial::from_sectors(vec![fp; lambda], lambda - 1),
        ProjectorPolynomial::from_sectors(vec![hp; lambda], lambda),
    ))
}

/// Closed-form Casimir eigenvalue `c_μ` as an exact rational.
pub fn casimir_value_exact(params: &AlgebraParams, mu: usize) -> Result<BigRational> {
    params.check_sector(mu)?;
    let lambda = params.lambda();
    let alpha = exact_alpha(params);
    let denom = BigRational::from_integer(BigInt::from(lambda * lambda) << lambda);
    Ok(casimir_numerator(&alpha, mu) / denom)
}

pub fn casimir_value(params: &AlgebraParams, mu: usize) -> Result<f64> {
    casimir_value_exact(params, mu).map(|q| to_f64(&q))
}

/// One entry per sector.
pub fn unirrep_data(params: &AlgebraParams) -> Vec<UnirrepData> {
    let lambda = params.lambda() as f64;
    (0..params.lambda())
        .map(|mu| UnirrepData {
            mu,
            casimir_value: casimir_value(params, mu).expect("sector in range"),
            lowest_j0: (mu as f64 + params.gamma(mu) + 0.5) / lambda,
        })
        .collect()
}

/// Builds `J+`, `J−`, `J0` for `dim ≥ 3λ`.
pub fn build_generators(params: &AlgebraParams, dim: usize) -> Result<Generators> {
    let lambda = params.lambda();
    if dim < 3 * lambda {
        return Err(Error::DimTooSmall {
            dim,
            min: 3 * lambda,
        });
    }
    let ops = build_operators(params, dim)?;
    let raising = ops
        .creation
        .power(lambda, "J+")
        .divided(lambda as f64, "J+")
        .with_exact_rows(dim - lambda);
    let lowering = raising.adjoint("J-");
    let weight = ops.hamiltonian.divided(lambda as f64, "J0");
    Ok(Generators {
        raising,
        lowering,
        weight,
        projectors: ops.projectors,
    })
}

/// `C = J−J+ + h(J0, P_μ)`.
pub fn casimir(params: &AlgebraParams, dim: usize) -> Result<FockOperator> {
    let g = build_generators(params, dim)?;
    Ok(casimir_from(&g, &h_polynomial(params)))
}

fn casimir_from(g: &Generators, h: &ProjectorPolynomial) -> FockOperator {
    let lr = g.lowering.product(&g.raising, "J-J+");
    let hop = h.to_operator(&g.weight, "h");
    FockOperator::new("C", lr.matrix() + hop.matrix())
        .with_exact_rows(interior_dim(g.dim(), g.projectors.len()))
}

/// `C = J+J− + h − f`.
pub fn casimir_alternate(params: &AlgebraParams, dim: usize) -> Result<FockOperator> {
    let g = build_generators(params, dim)?;
    let rl = g.raising.product(&g.lowering, "J+J-");
    let hop = h_polynomial(params).to_operator(&g.weight, "h");
    let fop = f_polynomial(params).to_operator(&g.weight, "f");
    Ok(FockOperator::new("C'", rl.matrix() + hop.matrix() - fop.matrix())
        .with_exact_rows(interior_dim(dim, params.lambda())))
}

/// Result of one matrix identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    /// Max-norm of the discrepancy on the checked block.
    pub residual: f64,
    /// Max-norm of the larger side, for scale.
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, residual: f64, scale: f64, tolerance: f64) -> Self {
        IdentityCheck {
            name: name.to_string(),
            residual,
            scale,
            tolerance,
            passed: residual < tolerance || (tolerance == 0.0 && residual == 0.0),
        }
    }

    /// `residual / max(1, scale)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }
}

/// All identity checks for one parameter set and dimension.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub lambda: usize,
    pub alpha: Vec<f64>,
    pub dim: usize,
    pub checks: Vec<IdentityCheck>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Identity tolerances.
pub mod tolerance {
    pub const LADDER: f64 = 1e-12;
    pub const SHIFT: f64 = 1e-15;
    pub const WEIGHT: f64 = 1e-10;
    pub const DEFORMATION: f64 = 1e-9;
    pub const CASIMIR_CENTRAL: f64 = 1e-9;
    pub const CASIMIR_FORMS: f64 = 1e-10;
    pub const CASIMIR_SPECTRUM: f64 = 1e-12;
}

fn diag_matrix(values: impl Iterator<Item = f64>, dim: usize) -> DMatrix<DoubleDouble> {
    let v: Vec<f64> = values.collect();
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            DoubleDouble::new(v[i])
        } else {
            DoubleDouble::ZERO
        }
    })
}

/// Runs every oscillator and generator identity.
///
/// Oscillator identities are checked on the leading `dim − λ` block, generator
/// identities on the leading `dim − 2λ` block. Commutators with projectors and
/// the projector resolution are checked on the full matrix and must vanish
/// exactly.
pub fn verify_algebra(params: &AlgebraParams, dim: usize) -> Result<AlgebraReport> {
    let lambda = params.lambda();
    let ops = build_operators(params, dim)?;
    let g = build_generators(params, dim)?;
    let osc = dim - lambda;
    let inner = interior_dim(dim, lambda);
    let mut checks = Vec::new();

    let ad = ops.creation.matrix();
    let a = ops.annihilation.matrix();

    let lhs = ops.number.commutator(&ops.creation);
    checks.push(IdentityCheck::new(
        "[N,a+] = a+",
        block_max_diff(&lhs, ad, osc),
        block_max_abs(ad, osc),
        tolerance::LADDER,
    ));

    let lhs = ops.annihilation.commutator(&ops.creation);
    let rhs = diag_matrix(
        (0..dim).map(|n| 1.0 + params.alpha_at(n)),
        dim,
    );
    checks.push(IdentityCheck::new(
        "[a,a+] = I + sum alpha P",
        block_max_diff(&lhs, &rhs, osc),
        block_max_abs(&rhs, osc),
        tolerance::LADDER,
    ));

    let mut shift: f64 = 0.0;
    for mu in 0..lambda {
        let l = ad * ops.projectors[mu].matrix();
        let r = ops.projectors[(mu + 1) % lambda].matrix() * ad;
        shift = shift.max(block_max_diff(&l, &r, dim));
    }
    checks.push(IdentityCheck::new(
        "a+ P_mu = P_(mu+1) a+",
        shift,
        block_max_abs(ad, dim),
        tolerance::SHIFT,
    ));

    let fn_diag = DMatrix::from_fn(dim, dim, |i, j| if i == j { params.structure_function_dd(i) } else { DoubleDouble::ZERO });
    let fn1_diag = DMatrix::from_fn(dim, dim, |i, j| if i == j { params.structure_function_dd(i + 1) } else { DoubleDouble::ZERO });
    let ada = ad * a;
    let aad = a * ad;
    checks.push(IdentityCheck::new(
        "a+a = F(N)",
        block_max_diff(&ada, &fn_diag, osc),
        block_max_abs(&fn_diag, osc),
        tolerance::LADDER,
    ));
    checks.push(IdentityCheck::new(
        "aa+ = F(N+1)",
        block_max_diff(&aad, &fn1_diag, osc),
        block_max_abs(&fn1_diag, osc),
        tolerance::LADDER,
    ));

    let sum_p = ops
        .projectors
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, p| acc + p.matrix());
    let id = DMatrix::<DoubleDouble>::identity(dim, dim);
    checks.push(IdentityCheck::new(
        "sum P_mu = I",
        block_max_diff(&sum_p, &id, dim),
        1.0,
        0.0,
    ));

    let jp = g.raising.matrix();
    let jm = g.lowering.matrix();
    let raise = g.weight.commutator(&g.raising);
    let lower = g.weight.commutator(&g.lowering);
    checks.push(IdentityCheck::new(
        "[J0,J+] = J+",
        block_max_diff(&raise, jp, inner),
        block_max_abs(jp, inner),
        tolerance::WEIGHT,
    ));
    checks.push(IdentityCheck::new(
        "[J0,J-] = -J-",
        block_max_diff(&lower, &(-jm.clone()), inner),
        block_max_abs(jm, inner),
        tolerance::WEIGHT,
    ));

    let f = f_polynomial(params).to_operator(&g.weight, "f");
    let comm = g.raising.commutator(&g.lowering);
    checks.push(IdentityCheck::new(
        "[J+,J-] = f(J0,P)",
        block_max_diff(&comm, f.matrix(), inner),
        block_max_abs(f.matrix(), inner).max(block_max_abs(&comm, inner)),
        tolerance::DEFORMATION,
    ));

    let mut proj: f64 = 0.0;
    for p in &g.projectors {
        for op in [&g.raising, &g.lowering, &g.weight] {
            proj = proj.max(block_max_abs(&op.commutator(p), dim));
        }
    }
    checks.push(IdentityCheck::new("[J+-,P] = [J0,P] = 0", proj, 1.0, 0.0));

    let h = h_polynomial(params);
    let c = casimir_from(&g, &h);
    let mut central: f64 = 0.0;
    let mut central_scale: f64 = 0.0;
    for op in [&g.raising, &g.lowering, &g.weight] {
        let k = c.commutator(op);
        central = central.max(block_max_abs(&k, inner));
        central_scale = central_scale.max(block_max_abs(&(c.matrix() * op.matrix()), inner));
    }
    checks.push(IdentityCheck::new(
        "[C,J] = 0",
        central,
        central_scale,
        tolerance::CASIMIR_CENTRAL,
    ));

    let rl = g.raising.product(&g.lowering, "J+J-");
    let hop = h.to_operator(&g.weight, "h");
    let c2 = rl.matrix() + hop.matrix() - f.matrix();
    checks.push(IdentityCheck::new(
        "J-J+ + h = J+J- + h - f",
        block_max_diff(c.matrix(), &c2, inner),
        block_max_abs(&rl.matrix().clone(), inner),
        tolerance::CASIMIR_FORMS,
    ));

    let (spectrum, spectrum_scale) = casimir_spectrum_error(params, &c, inner)?;
    checks.push(IdentityCheck::new(
        "diag C = c_mu (relative)",
        spectrum,
        spectrum_scale,
        tolerance::CASIMIR_SPECTRUM,
    ));

    Ok(AlgebraReport {
        lambda,
        alpha: params.alpha().to_vec(),
        dim,
        checks,
    })
}

/// Largest relative deviation of `C`'s diagonal from `c_μ` on the leading
/// `keep` states, and the largest off-diagonal modulus folded in absolutely.
const CASIMIR_ZERO: f64 = 1e-12;

fn casimir_spectrum_error(
    params: &AlgebraParams,
    c: &FockOperator,
    keep: usize,
) -> Result<(f64, f64)> {
    let values: Vec<DoubleDouble> = (0..params.lambda())
        .map(|mu| casimir_value_exact(params, mu).map(|q| to_dd(&q)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..keep {
        for j in 0..keep {
            let z = c.entry_dd(i, j);
            if i == j {
                let want = values[i % params.lambda()];
                let err = (z - want).to_f64().abs();
                let w = want.to_f64().abs();
                // c_mu that vanish for the decimal input are compared absolutely
                worst = worst.max(err / w.max(CASIMIR_ZERO));
                scale = scale.max(w);
            } else {
                worst = worst.max(z.to_f64().abs());
            }
        }
    }
    Ok((worst, scale))
}

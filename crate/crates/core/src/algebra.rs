//! The C_λ-extended oscillator: parameters, structure function, spectrum and
//! truncated Fock-space matrices for `N`, `a`, `a†`, the sector projectors
//! `P_μ` and `H0 = {a, a†}/2`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::sum::{ComplexDD, DoubleDouble};

/// A given α-sum within this distance of zero is closed by recomputing the
/// last component; anything larger is rejected.
pub const ALPHA_SUM_CLOSURE: f64 = 1e-9;

/// Default truncation dimension for matrix realizations.
pub const DEFAULT_DIM: usize = 64;

/// Grading order λ and deformation parameters α_0 … α_{λ-1}, with the
/// derived sequences cached at construction.
///
/// Indices on μ are taken modulo λ everywhere except `beta_bar`, which also
/// accepts μ = λ and returns `β̄_λ = (β_λ + λ)/λ = 1`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct AlgebraParams {
    lambda: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    beta_bar: Vec<f64>,
    gamma: Vec<f64>,
}

/// Wire form of [`AlgebraParams`]: `{"lambda": 3, "alpha": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawParams {
    pub lambda: usize,
    pub alpha: Vec<f64>,
}

impl TryFrom<RawParams> for AlgebraParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        AlgebraParams::new(raw.lambda, raw.alpha)
    }
}

impl From<AlgebraParams> for RawParams {
    fn from(p: AlgebraParams) -> Self {
        RawParams {
            lambda: p.lambda,
            alpha: p.alpha,
        }
    }
}

impl fmt::Debug for AlgebraParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraParams")
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl AlgebraParams {
    /// Validates and normalizes a parameter set.
    pub fn new(lambda: usize, mut alpha: Vec<f64>) -> Result<Self> {
        if lambda < 2 {
            return Err(Error::InvalidLambda(lambda));
        }
        if alpha.len() != lambda {
            return Err(Error::AlphaLength {
                expected: lambda,
                got: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sum: f64 = alpha.iter().sum();
        if sum.abs() > ALPHA_SUM_CLOSURE {
            return Err(Error::SumNotZero { sum });
        }
        alpha[lambda - 1] = 0.0 - alpha[..lambda - 1].iter().sum::<f64>();

        let mut beta = Vec::with_capacity(lambda);
        let mut acc = 0.0;
        for &a in &alpha {
            beta.push(acc);
            acc += a;
        }
        for (mu, &b) in beta.iter().enumerate().skip(1) {
            let value = b + mu as f64;
            if value <= 0.0 {
                return Err(Error::ConditionViolated { mu, value });
            }
        }
        let lf = lambda as f64;
        let mut beta_bar: Vec<f64> = beta
            .iter()
            .enumerate()
            .map(|(mu, &b)| (b + mu as f64) / lf)
            .collect();
        beta_bar.push(1.0);
        let gamma = (0..lambda)
            .map(|mu| 0.5 * (beta[mu] + beta[(mu + 1) % lambda]))
            .collect();
        Ok(AlgebraParams {
            lambda,
            alpha,
            beta,
            beta_bar,
            gamma,
        })
    }

    /// The undeformed oscillator with grading order λ.
    pub fn undeformed(lambda: usize) -> Result<Self> {
        Self::new(lambda, vec![0.0; lambda])
    }

    /// λ = 2 with α = (α_0, -α_0).
    pub fn calogero_vasiliev(alpha0: f64) -> Result<Self> {
        Self::new(2, vec![alpha0, -alpha0])
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// α_μ with μ taken mod λ.
    pub fn alpha_at(&self, mu: usize) -> f64 {
        self.alpha[mu % self.lambda]
    }

    /// β_μ = Σ_{ν<μ} α_ν, μ mod λ.
    pub fn beta(&self, mu: usize) -> f64 {
        self.beta[mu % self.lambda]
    }

    /// β̄_μ = (β_μ + μ)/λ for 0 ≤ μ ≤ λ.
    pub fn beta_bar(&self, mu: usize) -> f64 {
        assert!(mu <= self.lambda, "beta_bar index {mu} > lambda");
        self.beta_bar[mu]
    }

    /// γ_μ = (β_μ + β_{μ+1})/2, μ mod λ.
    pub fn gamma(&self, mu: usize) -> f64 {
        self.gamma[mu % self.lambda]
    }

    pub fn sector(&self, n: usize) -> usize {
        n % self.lambda
    }

    pub fn is_undeformed(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }

    pub fn check_sector(&self, mu: usize) -> Result<()> {
        if mu < self.lambda {
            Ok(())
        } else {
            Err(Error::InvalidSector {
                mu,
                lambda: self.lambda,
            })
        }
    }

    /// F(n) = n + β_{n mod λ}; F(0) = 0.
    pub fn structure_function(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            n as f64 + self.beta(n)
        }
    }

    /// F(n) without rounding the partial sum of α, for the ladder matrices.
    pub fn structure_function_dd(&self, n: usize) -> DoubleDouble {
        if n == 0 {
            return DoubleDouble::ZERO;
        }
        self.alpha[..n % self.lambda]
            .iter()
            .fold(DoubleDouble::new(n as f64), |acc, &a| acc + a)
    }

    /// E_n = n + γ_{n mod λ} + 1/2.
    pub fn energy(&self, n: usize) -> f64 {
        n as f64 + self.gamma(n) + 0.5
    }
}

/// Dense truncated-Fock-space matrix with real double-double entries.
///
/// Every operator in the algebra is real in the number basis; the extra
/// precision keeps products such as `J+J−` (entries growing like `n^λ`)
/// accurate well below one f64 ulp of their magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    label: String,
    matrix: DMatrix<DoubleDouble>,
    /// Leading rows/columns that coincide with the untruncated operator.
    exact_rows: usize,
}

impl FockOperator {
    pub fn new(label: impl Into<String>, matrix: DMatrix<DoubleDouble>) -> Self {
        assert!(matrix.is_square(), "Fock operators are square");
        let exact_rows = matrix.nrows();
        FockOperator {
            label: label.into(),
            matrix,
            exact_rows,
        }
    }

    pub fn from_diagonal(label: impl Into<String>, diag: &[DoubleDouble]) -> Self {
        let d = diag.len();
        let m = DMatrix::from_fn(d, d, |i, j| if i == j { diag[i] } else { DoubleDouble::ZERO });
        Self::new(label, m)
    }

    /// Marks how many leading basis states are untouched by truncation.
    pub fn with_exact_rows(mut self, rows: usize) -> Self {
        self.exact_rows = rows.min(self.dim());
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &DMatrix<DoubleDouble> {
        &self.matrix
    }

    pub fn exact_rows(&self) -> usize {
        self.exact_rows
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)].to_f64()
    }

    pub fn entry_dd(&self, i: usize, j: usize) -> DoubleDouble {
        self.matrix[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i)).collect()
    }

    pub fn diagonal_dd(&self) -> Vec<DoubleDouble> {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).collect()
    }

    /// Rounded to an ordinary complex matrix.
    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.matrix.map(|x| Complex64::new(x.to_f64(), 0.0))
    }

    /// Hermitian conjugate, which for these real matrices is the transpose.
    pub fn adjoint(&self, label: impl Into<String>) -> Self {
        FockOperator::new(label, self.matrix.transpose()).with_exact_rows(self.exact_rows)
    }

    pub fn product(&self, other: &FockOperator, label: impl Into<String>) -> Self {
        FockOperator::new(label, &self.matrix * &other.matrix)
            .with_exact_rows(self.exact_rows.min(other.exact_rows))
    }

    pub fn scaled(&self, s: f64, label: impl Into<String>) -> Self {
        FockOperator::new(label, self.matrix.map(|x| x.mul_f64(s))).with_exact_rows(self.exact_rows)
    }

    pub fn divided(&self, d: f64, label: impl Into<String>) -> Self {
        FockOperator::new(label, self.matrix.map(|x| x.div_f64(d))).with_exact_rows(self.exact_rows)
    }

    pub fn power(&self, k: usize, label: impl Into<String>) -> Self {
        let mut m = DMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            m = &m * &self.matrix;
        }
        FockOperator::new(label, m).with_exact_rows(self.exact_rows)
    }

    /// `[self, other]` as a raw matrix.
    pub fn commutator(&self, other: &FockOperator) -> DMatrix<DoubleDouble> {
        &self.matrix * &other.matrix - &other.matrix * &self.matrix
    }

    /// Applies the operator to a complex column vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|i| {
                let mut acc = ComplexDD::ZERO;
                for (j, &x) in v.iter().enumerate() {
                    let m = self.matrix[(i, j)];
                    if !m.is_zero() {
                        acc = acc + ComplexDD::new(x).mul_dd(m);
                    }
                }
                acc.to_c64()
            })
            .collect()
    }
}

/// Largest entry modulus of `m` on its leading `keep × keep` block.
pub fn block_max_abs(m: &DMatrix<DoubleDouble>, keep: usize) -> f64 {
    let keep = keep.min(m.nrows()).min(m.ncols());
    let mut worst: f64 = 0.0;
    for j in 0..keep {
        for i in 0..keep {
            worst = worst.max(m[(i, j)].to_f64().abs());
        }
    }
    worst
}

/// Largest entry modulus of `a - b` on the leading `keep × keep` block.
pub fn block_max_diff(a: &DMatrix<DoubleDouble>, b: &DMatrix<DoubleDouble>, keep: usize) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let keep = keep.min(a.nrows());
    let mut worst: f64 = 0.0;
    for j in 0..keep {
        for i in 0..keep {
            worst = worst.max((a[(i, j)] - b[(i, j)]).to_f64().abs());
        }
    }
    worst
}

/// `N`, `a`, `a†`, `P_0 … P_{λ-1}` and `H0` on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct OscillatorOperators {
    pub number: FockOperator,
    pub annihilation: FockOperator,
    pub creation: FockOperator,
    pub projectors: Vec<FockOperator>,
    /// `H0 = (a a† + a† a)/2`; its last diagonal entry is truncation-corrupted
    /// (`exact_rows = dim - 1`).
    pub hamiltonian: FockOperator,
}

impl OscillatorOperators {
    pub fn dim(&self) -> usize {
        self.number.dim()
    }
}

/// Builds the oscillator operators for `dim ≥ 2λ` basis states.
pub fn build_operators(params: &AlgebraParams, dim: usize) -> Result<OscillatorOperators> {
    let lambda = params.lambda();
    if dim < 2 * lambda {
        return Err(Error::DimTooSmall {
            dim,
            min: 2 * lambda,
        });
    }
    let number = FockOperator::from_diagonal(
        "N",
        &(0..dim).map(|n| DoubleDouble::new(n as f64)).collect::<Vec<_>>(),
    );
    let a = DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            params.structure_function_dd(j).sqrt()
        } else {
            DoubleDouble::ZERO
        }
    });
    let annihilation = FockOperator::new("a", a);
    let creation = annihilation.adjoint("a+");
    let projectors = (0..lambda)
        .map(|mu| {
            let diag: Vec<DoubleDouble> = (0..dim)
                .map(|n| if n % lambda == mu { DoubleDouble::ONE } else { DoubleDouble::ZERO })
                .collect();
            FockOperator::from_diagonal(format!("P{mu}"), &diag)
        })
        .collect();
    let aad = annihilation.matrix() * creation.matrix();
    let ada = creation.matrix() * annihilation.matrix();
    let hamiltonian =
        FockOperator::new("H0", (aad + ada).map(|x| x.mul_f64(0.5))).with_exact_rows(dim - 1);
    Ok(OscillatorOperators {
        number,
        annihilation,
        creation,
        projectors,
        hamiltonian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn undeformed_oscillator() {
        let p = AlgebraParams::new(2, vec![0.0, 0.0]).unwrap();
        assert_eq!(p.beta(0), 0.0);
        assert_eq!(p.beta(1), 0.0);
        assert_eq!(p.beta_bar(0), 0.0);
        assert_eq!(p.beta_bar(1), 0.5);
        assert_eq!(p.structure_function(5), 5.0);
        assert_eq!(p.energy(3), 3.5);
    }

    #[test]
    fn calogero_vasiliev_relations() {
        let p = AlgebraParams::new(2, vec![1.0, -1.0]).unwrap();
        assert_eq!(p.beta(1), 1.0);
        assert_eq!(p.beta_bar(1), 1.0);
        assert_eq!(p.gamma(0), 0.5);
        assert_eq!(p.gamma(1), 0.5);
        assert_eq!(p.structure_function(1), 2.0);
        // E_n = n + (α_0 + 1)/2
        assert_eq!(p.energy(0), 1.0);
        for n in 0..10 {
            assert_eq!(p.energy(n), n as f64 + 1.0);
            let parity = if n % 2 == 1 { 1.0 } else { 0.0 };
            assert_eq!(p.structure_function(n), n as f64 + parity);
        }
    }

    #[test]
    fn lambda_three_partial_sums() {
        let p = AlgebraParams::new(3, vec![-0.7, 0.7, 0.0]).unwrap();
        assert!(close(p.structure_function(4), 3.3));
        let q = AlgebraParams::new(3, vec![2.0, -2.0, 0.0]).unwrap();
        assert!(close(q.gamma(1), 1.0));
        assert!(close(q.energy(1), 2.5));
    }

    #[test]
    fn condition_violation_reports_sector() {
        let err = AlgebraParams::new(2, vec![-1.5, 1.5]).unwrap_err();
        match err {
            Error::ConditionViolated { mu, value } => {
                assert_eq!(mu, 1);
                assert!(close(value, -0.5));
            }
            e => panic!("unexpected {e:?}"),
        }
        // the boundary β_μ + μ = 0 is rejected as well
        assert!(AlgebraParams::new(2, vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn alpha_closure() {
        let p = AlgebraParams::new(3, vec![0.1, 0.2, -0.3 + 5e-10]).unwrap();
        assert_eq!(p.alpha().iter().sum::<f64>(), 0.0);
        assert!(matches!(
            AlgebraParams::new(3, vec![0.1, 0.2, 0.0]),
            Err(Error::SumNotZero { .. })
        ));
        assert!(matches!(
            AlgebraParams::new(3, vec![0.0, 0.0]),
            Err(Error::AlphaLength { .. })
        ));
        assert!(matches!(
            AlgebraParams::new(1, vec![0.0]),
            Err(Error::InvalidLambda(1))
        ));
        assert!(AlgebraParams::new(2, vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn beta_bar_wraps_to_one() {
        let p = AlgebraParams::new(4, vec![0.5, -1.2, 2.0, -1.3]).unwrap();
        assert_eq!(p.beta_bar(4), 1.0);
        assert!(close(p.beta_bar(3), (0.5 - 1.2 + 2.0 + 3.0) / 4.0));
    }

    #[test]
    fn json_round_trip_uses_fixed_names() {
        let p: AlgebraParams = serde_json::from_str(r#"{"lambda": 3, "alpha": [2, -2, 0]}"#).unwrap();
        assert_eq!(p.lambda(), 3);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"lambda":3,"alpha":[2.0,-2.0,0.0]}"#);
        assert!(serde_json::from_str::<AlgebraParams>(r#"{"lambda": 2, "alpha": [-3, 3]}"#).is_err());
    }

    #[test]
    fn harmonic_annihilator() {
        let ops = build_operators(&AlgebraParams::undeformed(2).unwrap(), 4).unwrap();
        let a = &ops.annihilation;
        for n in 1..4 {
            assert!(close(a.entry(n - 1, n), (n as f64).sqrt()));
        }
    }

    #[test]
    fn deformed_annihilator() {
        let ops = build_operators(&AlgebraParams::calogero_vasiliev(1.0).unwrap(), 4).unwrap();
        let a = &ops.annihilation;
        let want = [2f64.sqrt(), 2f64.sqrt(), 2.0];
        for (n, w) in (1..4).zip(want) {
            assert!(close(a.entry(n - 1, n), w));
        }
    }

    #[test]
    fn dim_too_small() {
        let p = AlgebraParams::undeformed(3).unwrap();
        assert!(matches!(
            build_operators(&p, 5),
            Err(Error::DimTooSmall { dim: 5, min: 6 })
        ));
    }

    #[test]
    fn hamiltonian_diagonal_is_spectrum() {
        let p = AlgebraParams::new(3, vec![-0.7, 0.7, 0.0]).unwrap();
        let ops = build_operators(&p, 12).unwrap();
        let h = ops.hamiltonian.diagonal();
        for (n, &e) in h.iter().enumerate().take(11) {
            assert!(close(e, p.energy(n)), "n={n}");
        }
        assert_eq!(ops.hamiltonian.exact_rows(), 11);
    }
}

//! Scalar special functions used by the oscillator, coherent-state and
//! observable modules.

pub mod bessel;
pub mod combinatorics;
pub mod gamma;
pub mod hypergeometric;
pub mod mittag_leffler;
pub mod pochhammer;
pub mod sum;

pub use bessel::{bessel_i, bessel_k, bessel_k_reflection};
pub use combinatorics::{binomial, double_factorial, stirling_first, STIRLING_MAX};
pub use gamma::{gamma, ln_factorial, ln_gamma, rgamma};
pub use hypergeometric::{hyp0fq, HypergeomParams};
pub use mittag_leffler::mittag_leffler;
pub use pochhammer::{ln_pochhammer, pochhammer};

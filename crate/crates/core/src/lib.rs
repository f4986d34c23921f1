pub mod algebra;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod measures;
pub mod observables;
pub mod polynomial;
pub mod quadrature;
pub mod sga;
pub mod special;

pub use error::{Error, Result};

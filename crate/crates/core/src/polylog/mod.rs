//! Multiple polylogarithms, G-functions, Z-sums and Γ-function expansions.
//!
//! Values are computed in double precision; coefficient algebra (finite
//! Z-sums, Γ-expansion coefficients) is exact.

use num_complex::Complex64;
use thiserror::Error;

mod gamma;
mod gfunc;
mod li;
mod li2;
pub mod series;
mod zsum;

pub use gamma::{euler_gamma, gamma1p_series, gamma_expansion, zeta};
pub use gfunc::{g_func, g_func_with, hoelder, GPath};
pub use li::{hpl, li_direct, li_series, nielsen};
pub use li2::{li2_numeric, BranchSide};
pub use zsum::{zsum, zsum_exact, zsum_product, Upper, ZLetter, ZPairing, ZSum, ZValue};

pub type C64 = Complex64;

/// Default relative tolerance for series truncation.
pub const REL_TOL: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolylogError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergent parameters: {0}")]
    Divergent(String),
    #[error("series did not converge: {0}")]
    NoConvergence(String),
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

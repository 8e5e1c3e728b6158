//! Special functions and quadrature.

pub mod bessel;
pub mod gamma;
pub mod meijer;
pub mod quad;
pub mod sum;

pub use bessel::{bessel_i_scaled, ln_bessel_i_scaled};
pub use gamma::{
    beta_fn, binomial, factorial, gamma, gamma_checked, ln_gamma, lower_incomplete_gamma,
    regularized_lower_gamma, regularized_upper_gamma, upper_incomplete_gamma,
};
pub use meijer::{meijer_g_1012, meijer_g_1112, DeltaSeq};
pub use quad::{quad_semi_infinite, QuadResult, Quadrature};
pub use sum::Neumaier;

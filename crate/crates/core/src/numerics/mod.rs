//! Special functions, root finding, Nelder–Mead and random streams.

pub mod nelder_mead;
pub mod rng;
pub mod roots;
pub mod special;

pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use rng::{rng_uniform, RngStream, UniformGenerator};
pub use roots::{brent_root, RootBracket};
pub use special::{
    beta_quantile, gamma_density, gamma_quantile, ln_gamma, regularized_incomplete_beta,
    regularized_incomplete_gamma, std_normal_cdf, std_normal_pdf, std_normal_quantile,
};

//! Complex special functions and the spherical-analysis kernels built from them.

pub mod gamma;
pub mod hypergeometric;
pub mod spherical;

pub use gamma::{complex_gamma, ln_gamma, recip_gamma};
pub use hypergeometric::gauss_2f1_neg_axis;
pub use spherical::{
    ball_integral, c_function, harish_chandra_phi, inv_c_function, plancherel_density, spherical_estimate_check,
    spherical_function,
};

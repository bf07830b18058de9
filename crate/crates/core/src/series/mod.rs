//! Exact series arithmetic for the 2-typical formal group law.

pub mod fgl;
pub mod multi;
pub mod poly;
pub mod univariate;

pub use fgl::{
    b_coefficient, b_image, fgl_sum, hazewinkel_exp, hazewinkel_log, horizontal_leading_term, log_coefficients,
    phi_w_series, substitute_univariate, two_series, universal_fgl, PhiW,
};
pub use multi::MultiSeries;
pub use poly::{Modulus, RationalPoly, VExp, MAX_GENERATORS};
pub use univariate::{LaurentSeries, SeriesJson, TermJson, TruncatedSeries};

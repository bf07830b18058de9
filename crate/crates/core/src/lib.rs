//! Exact computations for Real-oriented cobordism of Z/2 x Z/2:
//! 2-typical formal group law series, differential tables for the Borel
//! cohomology spectral sequences of stunted projective spaces, a finite
//! window chart engine, and integer pullback algebra.

pub mod chart;
pub mod degree;
pub mod error;
pub mod homalg;
pub mod par;
pub mod patterns;
pub mod series;

pub use degree::RODegree;
pub use error::{Error, Result};

//! Finite-window spectral sequence charts.

pub mod engine;
pub mod f2;
pub mod monomial;
pub mod output;
pub mod rules;
pub mod tate;

pub use engine::*;
pub use monomial::{count_v_monomials, v_monomials, CellKey, Monomial, MonomialJson};
pub use output::{page_json, page_svg, BasisJson, CellJson, PageJson};
pub use rules::{horizontal_lead, page_of_level, Above, Image, RuleBook};
pub use tate::{default_safe_range, expected_rank, tate_rank_check, TateDegree, TateReport, Verdict};

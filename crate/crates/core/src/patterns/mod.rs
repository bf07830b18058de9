//! Combinatorics of the differential tables.

pub mod decompose;
pub mod numbers;
pub mod table;

pub use decompose::{alt_decompose, delta_chain, epsilon_chain, odd_stunted_decomposition, AltDecomposition, Chain, DecompositionForm};
pub use numbers::{ab_numbers, special_starts, st_numbers, Clause, PatternCell};
pub use table::{action, actions, differential_table, pattern_cell, Bottom, DifferentialRule, DifferentialTable, RuleClass};

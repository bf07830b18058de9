//! Integer homological algebra: Smith normal form, presented groups,
//! pullbacks, filtered pullbacks and the assembled corner diagrams.

pub mod assemble;
pub mod filtered;
pub mod group;
pub mod normalize;
pub mod random;
pub mod snf;
pub mod tables;

pub use group::{
    check_map, fiber_product, preimage, pullback_group, short_exact, Exactness, FgAbelianGroup, GroupJson, Presented,
    Pullback,
};
pub use snf::{image_basis, kernel, smith_normal_form, solve, IntMatrix, Snf};
pub use filtered::{check_filtration_condition, filtered_pullback, FilteredAbelianGroup, FilteredPullback, GradedSquare, LemmaCertificate};
pub use random::{cone_suite, lemma_suite, random_square, ConeReport, InstanceReport, RandomSquare, Shape, SuiteReport};
pub use assemble::{
    assemble_diagonal, assemble_offdiagonal, assemble_offdiagonal_table, compare_reports, AssemblyWindow, CornerGroups,
    DegreeReport, OffDiagonalCharts, WindowComparison,
};
pub use normalize::{normalize_ro_degree, DegreeCase, NormalizedDegree};
pub use tables::{BundledTable, CoefficientTable, ToyTable};

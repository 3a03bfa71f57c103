//! Benchmark problem generators.

mod grid;
mod lcp;
mod pde;
mod suite;

pub use grid::{weighted_laplacian, GridSpec};
pub use lcp::{lcp, lcp_brute_force, lcp_brute_force_all, lcp_nonneg, random_monotone_lcp, BRUTE_FORCE_MAX_N};
pub use pde::{
    boundary_distance, combustion, journal_bearing, obstacle, obstacle_height, torsion, BearingParams,
    COMBUSTION_LAMBDA_MAX, DEFAULT_BEARING_HALF_HEIGHT, DEFAULT_COMBUSTION_LAMBDA, DEFAULT_TORSION_LOAD,
};
pub use suite::{small_suite, SuiteCategory, SuiteInstance, SUITE_CERTIFICATION_TOL};

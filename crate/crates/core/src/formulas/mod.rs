//! Closed multiplicity and indicator formulas, and their behaviour in `q`.

pub mod analysis;
pub mod fs;
pub mod multiplicity;

pub use analysis::{analyze_family, degree_analysis, select_theta, Family, InterpReport, ThetaPolicy};
pub use fs::{fs_indicator, fs_indicator_literal, fs_lhs, gamma_one, FsQuery};
pub use multiplicity::{
    closed_multiplicity, split_case_check, torus_part_sum, u_only, MultiplicityQuery, MultiplicityResult, SplitReport,
};

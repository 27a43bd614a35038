//! One-dependent processes: specifications, pattern probabilities,
//! correlations, kernels and closure operations.

pub mod closure;
pub mod kernel;
pub mod pattern;
pub mod prob;
pub mod spec;

#[cfg(test)]
mod tests;

pub use closure::{intersect, particle_hole, particle_hole_region, union, Independence};
pub use kernel::{
    kernel_from_e, kernel_general, kernel_general_matrix, kernel_run_form, kernel_stationary,
    particle_hole_kernel, Kernel, StationaryKernel,
};
pub use pattern::{Pattern, Support, Zeros};
pub use prob::{
    correlation, distribution, pattern_probability, probability_from_kernel,
    probability_from_support, probability_from_zeros, validate_spec, ValidationReport,
};
pub use spec::{ETable, IntervalTable, OneDepSpec, Sequence, SpecFile, SpecKind};

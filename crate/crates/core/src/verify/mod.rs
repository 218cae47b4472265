//! Independent checks of approximate solutions: weak-form residual,
//! finite-volume reference, refinement studies and the empirical constants
//! of the junction estimates.

mod oracle;
mod residual;
mod sampler;
mod study;

pub use oracle::{cell_averages, cell_sampled_zeta, fv_oracle, FvGrid, FvSolution, MAX_CFL};
pub use residual::{default_battery, weak_residual, Bump, ResidualQuadrature, ResidualReport};
pub use sampler::{interaction_estimate_sampler, EstimateConstants, SamplerOptions, SamplerReport};
pub use study::{convergence_study, scenario_oracle, Reference, StudyReport, StudyRow};

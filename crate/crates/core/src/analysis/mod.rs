//! Numerical verification of the BPF analysis: truncation residuals, sine
//! modal machinery, Fourier multipliers, stability inequalities and
//! refinement studies.

pub mod convergence;
pub mod modal;
pub mod multipliers;
pub mod quadrature;
pub mod residuals;
pub mod stability;
pub mod suites;

pub use convergence::{
    compute_errors, convergence_study, convergence_study_problem, error_table, error_table_for,
    fit_rate, reference_on_grid, scheme_comparison, scheme_comparison_for, ComparisonRow,
    ConvergenceRow, ConvergenceTable, Diagonal, ErrorReport, ErrorTable, Norm, NormValues,
    RateFits, ReferenceKind,
};
pub use modal::{
    dirichlet_modal_solution, kernel_lifting, modal_decomposition,
    modal_residual_representation_check, sine_coefficients, KernelLifting, ModalExpansion,
    ModalResidualReport,
};
pub use multipliers::{
    boundary_multiplier, boundary_multiplier_bound, interior_multiplier, interior_multiplier_bound,
    multiplier_sweep, MultiplierSample,
};
pub use residuals::{
    boundary_residuals, convergence_bound, error_equation_check, interior_residual,
    residual_report, ResidualReport,
};
pub use stability::{
    energy_identity, flux_estimate_check, stability_bound_check, FluxReport, StabilityReport,
};
pub use suites::{run_suite, CheckOutcome, Suite, SuiteReport};

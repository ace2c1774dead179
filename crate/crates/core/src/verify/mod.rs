//! Numerical checks of the pointwise inequalities, the derivative formula and
//! the convergence behaviour of the maximal operators.

mod battery;
mod inequalities;
mod report;
mod sequences;

pub use battery::{bump_pairs, run_derivative_battery, run_gradient_battery, run_line_battery, BatteryParams};
pub use inequalities::{
    ball_mask, boundary_band, check_avg_upper_bound, check_decay_bound, check_derivative_formula, check_gradient_bound,
    check_gradient_bound_with, check_line_bound, check_line_bound_pairs, check_splitting, decay_constant,
    derivative_formula, interior_mask, interior_segments, splitting_radius, GradientBoundOptions, GradientFields,
    MIN_SINGLETON_FRACTION,
};
pub use report::{
    Claim, ClaimKind, Constant, ConvergenceReport, InequalityReport, Observable, PointCheck, Requirement, Source,
};
pub use sequences::{
    run_ae_counterexample, run_translate_sequence, run_weak_continuity_demo, run_weak_counterexample_global,
    run_weak_counterexample_local, AeParams, TranslateParams, WeakContinuityParams, WeakGlobalParams, WeakLocalParams,
};

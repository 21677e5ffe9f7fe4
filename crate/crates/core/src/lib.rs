//! Worst-case optimal quadrature for weighted integrals
//! I(f) = \int_0^1 f(x) rho(x) dx with integrands from the Sobolev spaces
//! H^1_0(\[0,1\]) and H^1(\[0,1\]).
//!
//! The crate provides
//! - closed-form worst-case errors and radii of information for the
//!   oscillatory weight exp(-2*pi*i*k*x) ([`oscillatory`]),
//! - the same quantities for arbitrary integrable weights by adaptive
//!   quadrature, together with explicit worst-case certificate functions
//!   ([`density`]),
//! - node-placement optimization with the provable equidistant regime and
//!   a deterministic search below it ([`optimize`]),
//! - the optimal piecewise-linear (spline) quadrature weights
//!   ([`spline`]),
//! - the independent numerical oracle underlying the cross-checks
//!   ([`oracle`]).

mod cheb;
pub mod density;
pub mod optimize;
pub mod oracle;
pub mod oscillatory;
pub mod spline;
pub mod types;

pub use density::{
    certificate_checks, evaluate_certificate, interval_initial_error, radius_general,
    CertificateReport, DensityError, DensityFunction, IntervalSolution, WorstCaseCertificate,
};
pub use optimize::{
    critical_points, objective_f, objective_f_prime, optimal_nodes, regime, scan_radius_over_n,
    small_n_optimizer, solve_x_star, CriticalPoints, EndpointOffset, OptimalityStatus,
    OptimizationResult, OptimizeError, OptimizerConfig, Regime,
};
pub use oracle::OracleError;
pub use oscillatory::{
    asymptotic_scan_fixed_k, asymptotic_scan_fixed_n, equidistant_error_h1, equidistant_error_h10,
    initial_error, interval_error_sq, interval_error_sq_free_end, interval_error_sq_pinned,
    radius_h1, radius_h10, radius_h10_subtractive, AsymptoticRow, InitialError, IntervalErrorKind,
};
pub use spline::{
    apply_rule, error_bound_check, spline_weights_equidistant, spline_weights_general,
    QuadratureRule, SplineError, TestFunction, WeightProvenance,
};
pub use types::{
    equidistant_nodes, make_nodeset, CoreError, Frequency, IntervalRole, NodeSet, Partition,
    SpaceKind,
};

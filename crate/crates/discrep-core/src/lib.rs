//! Solve ill-posed linear operator equations `A u = f` from noisy data `f_δ`
//! by Tikhonov regularization, choosing the regularization parameter ε with a
//! discrepancy principle that accepts *approximate* minimizers of the Tikhonov
//! functional, provided they carry a computable optimality-gap certificate.
//!
//! The pipeline, bottom to top:
//!
//! - [`operator`]: finite-dimensional vectors and linear operators (dense,
//!   diagonal, circular convolution) with adjoints and a cached SVD.
//! - [`tikhonov`]: the functional `F(u) = ‖Au − f_δ‖² + ε‖u‖²`, its exact
//!   SVD-based minimizer, and a conjugate-gradient minimizer that stops as
//!   soon as the gap certificate `‖(A*A + εI)u − A*f_δ‖²/ε` drops below a
//!   requested budget, guaranteeing `F(u) ≤ inf F + budget`.
//! - [`discrepancy`]: the discrepancy function `h(ε) = ‖Au_ε − f_δ‖`, bracket
//!   construction, and bisection on log ε solving `h(ε) = Cδ`.
//! - [`gallery`]: synthetic test problems with known minimal-norm solutions
//!   and exactly scaled noise.

pub mod discrepancy;
pub mod gallery;
pub mod operator;
pub mod tikhonov;

pub use discrepancy::{
    bracket_root, discrepancy_norm, norm_bound_check, solve_for_epsilon, validate_data, Bracket,
    BracketSide, DiscrepancyConfig, DiscrepancyError, PrincipleSolution, ValidData,
};
pub use gallery::{
    make_blur_problem, make_diagonal_problem, make_hilbert_problem, make_noisy, ConditionInfo,
    GalleryError, NoiseDirection, NoisyObservation, ProblemInstance,
};
pub use operator::{LinearOperator, OperatorError, SvdFactors, Vector};
pub use tikhonov::{
    certified_approx_minimize, evaluate_objective, exact_minimize, GapBudget, MinimizerReport,
    RegParam, SolverMode, TikhonovError,
};

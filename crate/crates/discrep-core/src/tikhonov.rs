//! The Tikhonov functional `F(u) = ‖Au − f_δ‖² + ε‖u‖²` and two minimizers.
//!
//! `exact_minimize` is the SVD oracle: the unique minimizer written in filter
//! factors, `u = Σ_i σ_i/(σ_i² + ε) ⟨f_δ, u_i⟩ v_i`.
//!
//! `certified_approx_minimize` runs conjugate gradients on the normal
//! equations `(A*A + εI)u = A*f_δ` from `u₀ = 0` and stops as soon as the
//! computable certificate
//!
//! ```text
//!   ‖(A*A + εI)u − A*f_δ‖² / ε  ≤  budget
//! ```
//!
//! holds. Since `F` is quadratic with Hessian `2(A*A + εI) ⪰ 2εI`,
//! `F(u) − inf F = ¼ ∇F(u)ᵀ(A*A + εI)⁻¹∇F(u) ≤ ‖∇F(u)‖²/(4ε)`, and with
//! `∇F(u) = 2[(A*A + εI)u − A*f_δ]` the stopping test certifies
//! `F(u) ≤ inf F + budget` without ever knowing `inf F`.
//!
//! The iteration is deterministic (fixed start, fixed summation order), so
//! the minimizer is a single-valued function of its inputs and the
//! discrepancy function built on top of it is well defined.

use thiserror::Error;

use crate::operator::{dot, LinearOperator, OperatorError, Vector};

/// Iteration cap multiplier for the CG minimizer: `50 * cols`.
pub const CG_CAP_PER_COL: usize = 50;

#[derive(Debug, Error)]
pub enum TikhonovError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("regularization parameter must be positive and finite, got {0}")]
    BadRegParam(f64),
    #[error("gap budget must be nonnegative and finite, got {0}")]
    BadBudget(f64),
    #[error("gap budget must be strictly positive for the certified minimizer")]
    BudgetNotPositive,
    #[error(
        "CG did not certify the requested gap within {cap} iterations \
         (best certificate {best_certificate:e})"
    )]
    NonConvergence {
        cap: usize,
        best_certificate: f64,
        best: Box<MinimizerReport>,
    },
}

/// Regularization weight `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegParam(f64);

impl RegParam {
    pub fn new(epsilon: f64) -> Result<Self, TikhonovError> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self(epsilon))
        } else {
            Err(TikhonovError::BadRegParam(epsilon))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

/// Allowed optimality gap `F(u) − inf F`; in the discrepancy pipeline this is
/// `(C² − 1 − b)δ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBudget(f64);

impl GapBudget {
    pub fn new(budget: f64) -> Result<Self, TikhonovError> {
        if budget.is_finite() && budget >= 0.0 {
            Ok(Self(budget))
        } else {
            Err(TikhonovError::BadBudget(budget))
        }
    }

    pub fn budget(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    Exact,
    CertifiedApprox,
}

impl SolverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverMode::Exact => "exact",
            SolverMode::CertifiedApprox => "cg",
        }
    }
}

/// A minimizer of `F` together with what we can prove about it.
#[derive(Debug, Clone)]
pub struct MinimizerReport {
    pub u: Vector,
    /// `F(u)`.
    pub objective_value: f64,
    /// Upper bound on `F(u) − inf F`; 0 by convention for the exact mode.
    pub certified_gap_bound: f64,
    pub iterations: usize,
    pub mode: SolverMode,
}

/// `F(u) = ‖Au − f_δ‖² + ε‖u‖²`.
pub fn evaluate_objective(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: RegParam,
    u: &Vector,
) -> Result<f64, TikhonovError> {
    check_data_dim(op, f_delta)?;
    let au = op.apply(u)?;
    let residual_sq: f64 = au
        .as_slice()
        .iter()
        .zip(f_delta.as_slice())
        .map(|(a, f)| (a - f) * (a - f))
        .sum();
    Ok(residual_sq + eps.epsilon() * u.norm_sq())
}

fn check_data_dim(op: &LinearOperator, f_delta: &Vector) -> Result<(), TikhonovError> {
    if f_delta.dim() != op.rows() {
        return Err(TikhonovError::Operator(OperatorError::DimensionMismatch {
            what: "data vector",
            expected: op.rows(),
            got: f_delta.dim(),
        }));
    }
    Ok(())
}

/// The unique minimizer of `F`, via filter factors in the singular basis.
pub fn exact_minimize(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: RegParam,
) -> Result<MinimizerReport, TikhonovError> {
    check_data_dim(op, f_delta)?;
    let svd = op.svd()?;
    let e = eps.epsilon();
    let mut u = vec![0.0; op.cols()];
    for ((sigma, left), right) in svd.singular_values.iter().zip(&svd.left).zip(&svd.right) {
        let filter = sigma / (sigma * sigma + e);
        if filter == 0.0 {
            continue;
        }
        let coeff = filter * f_delta.dot(left);
        for (ui, vi) in u.iter_mut().zip(right.as_slice()) {
            *ui += coeff * vi;
        }
    }
    let u = Vector::from_raw(u);
    let objective_value = evaluate_objective(op, f_delta, eps, &u)?;
    Ok(MinimizerReport {
        u,
        objective_value,
        certified_gap_bound: 0.0,
        iterations: 0,
        mode: SolverMode::Exact,
    })
}

/// CG on the normal equations, stopped by the gap certificate.
///
/// Returns a `u` with `F(u) ≤ inf F + gap.budget()`, certified by
/// `certified_gap_bound = ‖(A*A + εI)u − A*f_δ‖²/ε ≤ gap.budget()`.
pub fn certified_approx_minimize(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: RegParam,
    gap: GapBudget,
) -> Result<MinimizerReport, TikhonovError> {
    certified_approx_minimize_with_cap(op, f_delta, eps, gap, CG_CAP_PER_COL * op.cols())
}

pub(crate) fn certified_approx_minimize_with_cap(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: RegParam,
    gap: GapBudget,
    cap: usize,
) -> Result<MinimizerReport, TikhonovError> {
    check_data_dim(op, f_delta)?;
    if gap.budget() <= 0.0 {
        return Err(TikhonovError::BudgetNotPositive);
    }
    let outcome = cg_normal_equations(op, f_delta, eps.epsilon(), gap.budget(), cap, None);
    let u = Vector::from_raw(outcome.u);
    let objective_value = evaluate_objective(op, f_delta, eps, &u)?;
    let report = MinimizerReport {
        u,
        objective_value,
        certified_gap_bound: outcome.certificate,
        iterations: outcome.iterations,
        mode: SolverMode::CertifiedApprox,
    };
    if outcome.converged {
        Ok(report)
    } else {
        Err(TikhonovError::NonConvergence {
            cap,
            best_certificate: report.certified_gap_bound,
            best: Box::new(report),
        })
    }
}

struct CgOutcome {
    u: Vec<f64>,
    /// `‖(A*A + εI)u − A*f_δ‖²/ε` evaluated on a freshly computed residual.
    certificate: f64,
    iterations: usize,
    converged: bool,
}

/// Test hook: called with every iterate and its freshly evaluated certificate.
type CgObserver<'a> = &'a mut dyn FnMut(&[f64], f64);

/// True normal-equations residual `(A*A + εI)u − g` recomputed from scratch.
fn true_residual(op: &LinearOperator, u: &[f64], g: &[f64], eps: f64) -> Vec<f64> {
    let au = op.apply_slice(u);
    let mut atau = op.adjoint_slice(&au);
    for ((r, ui), gi) in atau.iter_mut().zip(u).zip(g) {
        *r += eps * ui - gi;
    }
    atau
}

fn cg_normal_equations(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: f64,
    budget: f64,
    cap: usize,
    mut observer: Option<CgObserver>,
) -> CgOutcome {
    let g = op.adjoint_slice(f_delta.as_slice());
    let n = g.len();
    let threshold = eps * budget;

    let mut u = vec![0.0; n];
    // At u₀ = 0 the residual is g itself.
    let cert0 = dot(&g, &g) / eps;
    if let Some(obs) = observer.as_deref_mut() {
        obs(&u, cert0);
    }
    if cert0 <= budget {
        return CgOutcome {
            u,
            certificate: cert0,
            iterations: 0,
            converged: true,
        };
    }

    // Recurrence residual r = g − (A*A + εI)u, refreshed on certificate checks.
    let mut r = g.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut best_u = u.clone();
    let mut best_rr = rr;

    for k in 1..=cap {
        let ap = op.apply_slice(&p);
        let mut hp = op.adjoint_slice(&ap);
        for (h, pi) in hp.iter_mut().zip(&p) {
            *h += eps * pi;
        }
        let php = dot(&p, &hp);
        if php <= 0.0 || !php.is_finite() {
            // Search direction lost to rounding; nothing further to gain.
            break;
        }
        let alpha = rr / php;
        for (ui, pi) in u.iter_mut().zip(&p) {
            *ui += alpha * pi;
        }
        for (ri, hi) in r.iter_mut().zip(&hp) {
            *ri -= alpha * hi;
        }
        let mut rr_new = dot(&r, &r);

        if let Some(obs) = observer.as_deref_mut() {
            let tr = true_residual(op, &u, &g, eps);
            obs(&u, dot(&tr, &tr) / eps);
        }

        if rr_new <= threshold {
            // The recurrence residual can drift from the true one; certify
            // against a fresh evaluation before accepting.
            let tr = true_residual(op, &u, &g, eps);
            let true_sq = dot(&tr, &tr);
            if true_sq <= threshold {
                return CgOutcome {
                    u,
                    certificate: true_sq / eps,
                    iterations: k,
                    converged: true,
                };
            }
            // Not actually there: refresh the residual and restart descent.
            r = tr.iter().map(|x| -x).collect();
            rr_new = true_sq;
            p = r.clone();
            rr = rr_new;
            if rr_new < best_rr {
                best_rr = rr_new;
                best_u = u.clone();
            }
            continue;
        }

        if rr_new < best_rr {
            best_rr = rr_new;
            best_u = u.clone();
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }

    // Cap exhausted (or breakdown). Report the best iterate seen with an
    // honestly recomputed certificate.
    let cert_last = {
        let tr = true_residual(op, &u, &g, eps);
        dot(&tr, &tr) / eps
    };
    let cert_best = {
        let tr = true_residual(op, &best_u, &g, eps);
        dot(&tr, &tr) / eps
    };
    let (u, certificate) = if cert_best < cert_last {
        (best_u, cert_best)
    } else {
        (u, cert_last)
    };
    let converged = certificate <= budget;
    CgOutcome {
        u,
        certificate,
        iterations: cap,
        converged,
    }
}

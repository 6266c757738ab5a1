//! The discrepancy principle: pick the regularization weight ε so that the
//! residual of the (possibly approximate) Tikhonov minimizer matches the
//! noise level, `h(δ, ε) := ‖Au_{δ,ε} − f_δ‖ = Cδ` with `C > 1`.
//!
//! The minimizer `u_{δ,ε}` may be any point whose objective lies within
//! `(C² − 1 − b)δ²` of the infimum, which is exactly what the certified CG
//! mode guarantees. Solving proceeds in two phases:
//!
//! 1. bracket: walk ε geometrically until `h < Cδ` on one side and
//!    `h > Cδ` on the other (h tends to `‖f_δ‖ > Cδ` as ε → ∞ and drops
//!    below `Cδ` for small ε whenever the equation is solvable);
//! 2. bisection on log ε until `|h − Cδ| ≤ root_rel_tol · Cδ`.
//!
//! ε(δ) spans many decades as δ shrinks, hence the log-scale bisection. All
//! evaluations are recorded in a trace so callers can audit monotonicity and
//! the theoretical envelope `h² < ε‖y‖² + (C² − b)δ²`.

use thiserror::Error;

use crate::operator::{LinearOperator, Vector};
use crate::tikhonov::{
    certified_approx_minimize, exact_minimize, GapBudget, MinimizerReport, RegParam, SolverMode,
    TikhonovError,
};

/// Bisection iteration cap; the log-scale interval shrinks by 2^200 before
/// this triggers, so reaching it means h is effectively discontinuous at the
/// root (possible in certified-approximate mode, which is monitored).
const BISECT_ITER_CAP: usize = 200;

/// Certified-approximate mode: the engine hands CG a stopping threshold this
/// far below the granted budget `(C² − 1 − b)δ²`. The granted budget is the
/// admissibility bound (the certificate must stay under it, and does); the
/// tighter stopping keeps the jumps that CG's discrete stopping rule leaves
/// in h small next to the root band, so the chosen ε — and with it u_δ —
/// stays stable between the exact and approximate modes.
const CG_STOP_SAFETY: f64 = 1e-4;

/// How much the CG stopping threshold is tightened when bisection still
/// stalls on a jump of h, and how many times. A minimizer with a smaller gap
/// is still inside the tolerance set `F(u) ≤ inf F + budget`, so tightening
/// never leaves the principle; it only shrinks the jumps of h until the root
/// band becomes reachable.
const BUDGET_TIGHTEN_FACTOR: f64 = 100.0;
const MAX_BUDGET_TIGHTENINGS: usize = 5;

/// Slack for [`norm_bound_check`], absorbing the root tolerance band.
pub const NORM_BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    Low,
    High,
}

#[derive(Debug, Error)]
pub enum DiscrepancyError {
    #[error("invalid discrepancy configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("noise level delta must be positive and finite, got {delta}")]
    BadDelta { delta: f64 },
    #[error(
        "assumption violated: ||f_delta|| > C*delta is required, \
         but ||f_delta|| = {f_norm:e} <= C*delta = {c_delta:e} \
         (data is noise-dominated; the principle is not applicable)"
    )]
    AssumptionViolation { f_norm: f64, c_delta: f64 },
    #[error(
        "no bracket for h(eps) = C*delta = {target:e}: after {steps} steps h was still \
         {h:e} at eps = {probed_epsilon:e} ({}); Au = f may be unsolvable at this \
         discretization or delta is underestimated",
        match .side { BracketSide::Low => "h never fell below the target", BracketSide::High => "h never rose above the target" }
    )]
    NoRoot {
        target: f64,
        probed_epsilon: f64,
        h: f64,
        steps: usize,
        side: BracketSide,
    },
    #[error(
        "bisection exhausted without meeting |h - C*delta| <= {band:e}; best iterate has \
         eps = {:e}, h = {:e}", .best.epsilon, .best.discrepancy
    )]
    RootToleranceNotMet {
        band: f64,
        best: Box<PrincipleSolution>,
    },
    #[error(transparent)]
    Minimizer(#[from] TikhonovError),
}

/// Constants and controls for the principle.
///
/// The principle's constraint region is `C > 1`, `b > 0`, `C² > 1 + b`; the
/// defaults sit comfortably inside it (gap factor `C² − 1 − b = 0.75`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyConfig {
    pub c: f64,
    pub b: f64,
    /// Relative half-width of the accepted band around `Cδ`.
    pub root_rel_tol: f64,
    /// First ε probed by the bracket search.
    pub eps_init: f64,
    /// Geometric step of the bracket search.
    pub bracket_factor: f64,
    /// Cap on bracket steps per direction.
    pub max_bracket_steps: usize,
    pub solver_mode: SolverMode,
}

impl Default for DiscrepancyConfig {
    fn default() -> Self {
        Self {
            c: 1.5,
            b: 0.5,
            root_rel_tol: 1e-6,
            eps_init: 1.0,
            bracket_factor: 10.0,
            max_bracket_steps: 200,
            solver_mode: SolverMode::Exact,
        }
    }
}

impl DiscrepancyConfig {
    pub fn validate(&self) -> Result<(), DiscrepancyError> {
        let fail = |reason: String| Err(DiscrepancyError::InvalidConfig { reason });
        if !(self.c.is_finite() && self.c > 1.0) {
            return fail(format!("C must satisfy C > 1, got {}", self.c));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return fail(format!("b must satisfy b > 0, got {}", self.b));
        }
        if self.c * self.c <= 1.0 + self.b {
            return fail(format!(
                "C^2 > 1 + b is required, got C^2 = {} and 1 + b = {}",
                self.c * self.c,
                1.0 + self.b
            ));
        }
        if !(self.root_rel_tol.is_finite() && self.root_rel_tol > 0.0) {
            return fail(format!(
                "root_rel_tol must be positive, got {}",
                self.root_rel_tol
            ));
        }
        if !(self.eps_init.is_finite() && self.eps_init > 0.0) {
            return fail(format!("eps_init must be positive, got {}", self.eps_init));
        }
        if !(self.bracket_factor.is_finite() && self.bracket_factor > 1.0) {
            return fail(format!(
                "bracket_factor must exceed 1, got {}",
                self.bracket_factor
            ));
        }
        if self.max_bracket_steps == 0 {
            return fail("max_bracket_steps must be at least 1".to_string());
        }
        Ok(())
    }

    /// The optimality-gap budget `(C² − 1 − b)δ²` granted to the minimizer.
    pub fn gap_budget(&self, delta: f64) -> f64 {
        (self.c * self.c - 1.0 - self.b) * delta * delta
    }
}

/// Witness that `‖f_δ‖ > Cδ` held for the given data.
#[derive(Debug, Clone, Copy)]
pub struct ValidData {
    pub f_norm: f64,
    pub c_delta: f64,
}

/// The chosen ε(δ) and everything observed on the way there.
#[derive(Debug, Clone)]
pub struct PrincipleSolution {
    pub epsilon: f64,
    pub u_delta: Vector,
    /// `h = ‖Au_δ − f_δ‖` at the chosen ε.
    pub discrepancy: f64,
    /// `(C² − 1 − b)δ²`, the budget granted to the minimizer.
    pub gap_budget_used: f64,
    /// Every (ε, h) evaluated, in evaluation order (bracket then bisection).
    pub bracket_trace: Vec<(f64, f64)>,
    /// Total minimizer iterations summed over all evaluations.
    pub iterations_total: usize,
}

/// Check the principle's data assumption `‖f_δ‖ > Cδ`.
pub fn validate_data(
    f_delta: &Vector,
    delta: f64,
    cfg: &DiscrepancyConfig,
) -> Result<ValidData, DiscrepancyError> {
    cfg.validate()?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(DiscrepancyError::BadDelta { delta });
    }
    let f_norm = f_delta.norm();
    let c_delta = cfg.c * delta;
    if f_norm > c_delta {
        Ok(ValidData { f_norm, c_delta })
    } else {
        Err(DiscrepancyError::AssumptionViolation { f_norm, c_delta })
    }
}

/// Evaluates `h(ε)` through the configured minimizer, accumulating the trace,
/// iteration totals, and the point closest to the target so far.
struct Evaluator<'a> {
    op: &'a LinearOperator,
    /// Dense stand-in when the exact mode meets a convolution operator.
    dense_op: Option<LinearOperator>,
    f_delta: &'a Vector,
    mode: SolverMode,
    /// Gap granted by the principle, `(C² − 1 − b)δ²`; reported as used.
    granted_budget: f64,
    /// Stopping threshold actually handed to the CG minimizer, ≤ granted.
    minimizer_budget: f64,
    target: f64,
    trace: Vec<(f64, f64)>,
    iterations_total: usize,
    best: Option<(f64, f64, f64, MinimizerReport)>, // (|h−target|, ε, h, report)
}

impl<'a> Evaluator<'a> {
    fn new(
        op: &'a LinearOperator,
        f_delta: &'a Vector,
        cfg: &DiscrepancyConfig,
        delta: f64,
        minimizer_budget: f64,
    ) -> Self {
        let dense_op =
            (cfg.solver_mode == SolverMode::Exact && op.is_convolution()).then(|| op.densified());
        Self {
            op,
            dense_op,
            f_delta,
            mode: cfg.solver_mode,
            granted_budget: cfg.gap_budget(delta),
            minimizer_budget,
            target: cfg.c * delta,
            trace: Vec::new(),
            iterations_total: 0,
            best: None,
        }
    }

    fn eval(&mut self, epsilon: f64) -> Result<f64, DiscrepancyError> {
        let op = self.dense_op.as_ref().unwrap_or(self.op);
        let reg = RegParam::new(epsilon)?;
        let report = match self.mode {
            SolverMode::Exact => exact_minimize(op, self.f_delta, reg)?,
            SolverMode::CertifiedApprox => {
                let gap = GapBudget::new(self.minimizer_budget)?;
                certified_approx_minimize(op, self.f_delta, reg, gap)?
            }
        };
        let h = op
            .apply(&report.u)
            .map_err(TikhonovError::from)?
            .dist(self.f_delta);
        self.iterations_total += report.iterations;
        self.trace.push((epsilon, h));
        let dist = (h - self.target).abs();
        if self.best.as_ref().is_none_or(|(d, ..)| dist < *d) {
            self.best = Some((dist, epsilon, h, report));
        }
        Ok(h)
    }

    fn into_solution(self) -> PrincipleSolution {
        let (_, epsilon, h, report) = self.best.expect("at least one evaluation");
        PrincipleSolution {
            epsilon,
            u_delta: report.u,
            discrepancy: h,
            gap_budget_used: self.granted_budget,
            bracket_trace: self.trace,
            iterations_total: self.iterations_total,
        }
    }
}

/// `h(δ, ε) = ‖Au_{δ,ε} − f_δ‖` for a single ε, together with the minimizer
/// report. In certified-approximate mode the minimizer is granted the budget
/// `(C² − 1 − b)δ²`.
pub fn discrepancy_norm(
    op: &LinearOperator,
    f_delta: &Vector,
    eps: RegParam,
    cfg: &DiscrepancyConfig,
    delta: f64,
) -> Result<(f64, MinimizerReport), DiscrepancyError> {
    cfg.validate()?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(DiscrepancyError::BadDelta { delta });
    }
    let mut ev = Evaluator::new(op, f_delta, cfg, delta, cfg.gap_budget(delta));
    let h = ev.eval(eps.epsilon())?;
    let (_, _, _, report) = ev.best.expect("just evaluated");
    Ok((h, report))
}

/// A bracketing pair `h(eps_lo) < Cδ < h(eps_hi)` plus the evaluations that
/// produced it.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub trace: Vec<(f64, f64)>,
}

enum BracketOutcome {
    /// Some evaluation already landed inside the tolerance band.
    RootHit,
    Pair {
        lo: f64,
        hi: f64,
    },
}

fn find_bracket(
    ev: &mut Evaluator,
    cfg: &DiscrepancyConfig,
    band: f64,
) -> Result<BracketOutcome, DiscrepancyError> {
    let target = ev.target;
    let within = |h: f64| (h - target).abs() <= band;

    let mut hi_eps = cfg.eps_init;
    let mut h = ev.eval(hi_eps)?;
    if within(h) {
        return Ok(BracketOutcome::RootHit);
    }

    let mut low: Option<f64> = None;
    // Ascend until h > Cδ (guaranteed eventually: h → ‖f_δ‖ > Cδ).
    let mut steps = 0usize;
    while h <= target {
        low = Some(hi_eps);
        steps += 1;
        if steps > cfg.max_bracket_steps {
            return Err(DiscrepancyError::NoRoot {
                target,
                probed_epsilon: hi_eps,
                h,
                steps: steps - 1,
                side: BracketSide::High,
            });
        }
        hi_eps *= cfg.bracket_factor;
        h = ev.eval(hi_eps)?;
        if within(h) {
            return Ok(BracketOutcome::RootHit);
        }
    }

    // Descend until h < Cδ if the ascent never saw the low side.
    let lo_eps = match low {
        Some(lo) => lo,
        None => {
            let mut eps = hi_eps;
            let mut steps = 0usize;
            loop {
                steps += 1;
                if steps > cfg.max_bracket_steps {
                    return Err(DiscrepancyError::NoRoot {
                        target,
                        probed_epsilon: eps,
                        h,
                        steps: steps - 1,
                        side: BracketSide::Low,
                    });
                }
                eps /= cfg.bracket_factor;
                h = ev.eval(eps)?;
                if within(h) {
                    return Ok(BracketOutcome::RootHit);
                }
                if h < target {
                    break eps;
                }
                hi_eps = eps;
            }
        }
    };
    Ok(BracketOutcome::Pair {
        lo: lo_eps,
        hi: hi_eps,
    })
}

/// Find `(eps_lo, eps_hi)` with `h(eps_lo) < Cδ < h(eps_hi)` by geometric
/// search from `cfg.eps_init`.
pub fn bracket_root(
    op: &LinearOperator,
    f_delta: &Vector,
    delta: f64,
    cfg: &DiscrepancyConfig,
) -> Result<Bracket, DiscrepancyError> {
    validate_data(f_delta, delta, cfg)?;
    let mut ev = Evaluator::new(op, f_delta, cfg, delta, cfg.gap_budget(delta));
    // Negative band: pure bracketing, no early root acceptance.
    match find_bracket(&mut ev, cfg, -1.0)? {
        BracketOutcome::RootHit => unreachable!("band is negative"),
        BracketOutcome::Pair { lo, hi } => Ok(Bracket {
            eps_lo: lo,
            eps_hi: hi,
            trace: ev.trace,
        }),
    }
}

/// Solve `h(δ, ε) = Cδ` for ε: bracket, then bisect on log ε until
/// `|h − Cδ| ≤ root_rel_tol · Cδ`. Deterministic given its inputs.
///
/// In certified-approximate mode, h inherits jump discontinuities from the
/// minimizer's discrete stopping rule. When a jump straddles the target and
/// bisection stalls, the solve retries with the CG stopping threshold
/// tightened (the iterate stays inside the granted tolerance set); only if
/// that still fails is a root-tolerance error returned with the best iterate.
pub fn solve_for_epsilon(
    op: &LinearOperator,
    f_delta: &Vector,
    delta: f64,
    cfg: &DiscrepancyConfig,
) -> Result<PrincipleSolution, DiscrepancyError> {
    let data = validate_data(f_delta, delta, cfg)?;
    let target = data.c_delta;
    let band = cfg.root_rel_tol * target;
    let granted = cfg.gap_budget(delta);

    let attempts = match cfg.solver_mode {
        SolverMode::Exact => 1,
        SolverMode::CertifiedApprox => 1 + MAX_BUDGET_TIGHTENINGS,
    };
    let mut minimizer_budget = match cfg.solver_mode {
        SolverMode::Exact => granted,
        SolverMode::CertifiedApprox => granted * CG_STOP_SAFETY,
    };
    let mut trace_acc: Vec<(f64, f64)> = Vec::new();
    let mut iterations_acc = 0usize;
    let mut best_failure: Option<PrincipleSolution> = None;

    for attempt in 0..attempts {
        match solve_once(op, f_delta, delta, cfg, minimizer_budget, target, band) {
            Ok(mut sol) => {
                prepend_history(&mut sol, &mut trace_acc, iterations_acc);
                return Ok(sol);
            }
            Err(DiscrepancyError::RootToleranceNotMet { best, .. }) if attempt + 1 < attempts => {
                let sol = *best;
                trace_acc.extend_from_slice(&sol.bracket_trace);
                iterations_acc += sol.iterations_total;
                if best_failure.as_ref().is_none_or(|b| {
                    (sol.discrepancy - target).abs() < (b.discrepancy - target).abs()
                }) {
                    best_failure = Some(sol);
                }
                minimizer_budget /= BUDGET_TIGHTEN_FACTOR;
            }
            Err(DiscrepancyError::RootToleranceNotMet { band, best }) => {
                let mut sol = *best;
                let last_dist = (sol.discrepancy - target).abs();
                if let Some(prev) = best_failure {
                    if (prev.discrepancy - target).abs() < last_dist {
                        trace_acc.extend_from_slice(&sol.bracket_trace);
                        iterations_acc += sol.iterations_total;
                        sol = prev;
                        sol.bracket_trace = Vec::new();
                        sol.iterations_total = 0;
                    }
                }
                prepend_history(&mut sol, &mut trace_acc, iterations_acc);
                return Err(DiscrepancyError::RootToleranceNotMet {
                    band,
                    best: Box::new(sol),
                });
            }
            Err(other) => return Err(other),
        }
    }
    unreachable!("the last attempt either returns or errors");
}

fn prepend_history(
    sol: &mut PrincipleSolution,
    earlier_trace: &mut Vec<(f64, f64)>,
    earlier_iterations: usize,
) {
    if !earlier_trace.is_empty() {
        earlier_trace.extend_from_slice(&sol.bracket_trace);
        sol.bracket_trace = std::mem::take(earlier_trace);
    }
    sol.iterations_total += earlier_iterations;
}

fn solve_once(
    op: &LinearOperator,
    f_delta: &Vector,
    delta: f64,
    cfg: &DiscrepancyConfig,
    minimizer_budget: f64,
    target: f64,
    band: f64,
) -> Result<PrincipleSolution, DiscrepancyError> {
    let mut ev = Evaluator::new(op, f_delta, cfg, delta, minimizer_budget);

    let (lo, hi) = match find_bracket(&mut ev, cfg, band)? {
        BracketOutcome::RootHit => return Ok(ev.into_solution()),
        BracketOutcome::Pair { lo, hi } => (lo, hi),
    };

    let mut lo_ln = lo.ln();
    let mut hi_ln = hi.ln();
    for _ in 0..BISECT_ITER_CAP {
        let mid_ln = 0.5 * (lo_ln + hi_ln);
        let h = ev.eval(mid_ln.exp())?;
        if (h - target).abs() <= band {
            return Ok(ev.into_solution());
        }
        if h > target {
            hi_ln = mid_ln;
        } else {
            lo_ln = mid_ln;
        }
    }
    Err(DiscrepancyError::RootToleranceNotMet {
        band,
        best: Box::new(ev.into_solution()),
    })
}

/// The sharpened norm bound `‖u_δ‖² + bδ²/ε(δ) ≤ ‖y‖²` that the principle
/// guarantees against any solution `y` of `Au = f`; checked with a small
/// slack absorbing the root tolerance.
pub fn norm_bound_check(
    sol: &PrincipleSolution,
    y: &Vector,
    delta: f64,
    cfg: &DiscrepancyConfig,
) -> bool {
    let lhs = sol.u_delta.norm_sq() + cfg.b * delta * delta / sol.epsilon;
    lhs <= y.norm_sq() * (1.0 + NORM_BOUND_SLACK)
}

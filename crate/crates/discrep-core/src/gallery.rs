//! Synthetic ill-posed test problems with known minimal-norm solutions and
//! exactly scaled noise.
//!
//! Three families, each fully determined by its parameters:
//!
//! - `diagonal(n, p)`: `A = diag(i^{−p})`, `y_i = 1/i`, so the data decays
//!   like `i^{−p−1}` (a smoothness condition that makes convergence visible
//!   at desk scale);
//! - `hilbert(n)`: the classic severely ill-conditioned dense matrix
//!   `A_ij = 1/(i + j − 1)` with `y = 1`;
//! - `blur(n, s)`: periodic Gaussian blur of a triangular bump on `[0, 1)`.
//!
//! Noise is scaled so that `‖f_δ − f‖ = δ` exactly: the discrepancy target
//! `Cδ` is calibrated against the true perturbation magnitude, which makes
//! experiments sharpest at the boundary of the admissible `≤ δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::operator::{LinearOperator, OperatorError, Vector};

pub const DEFAULT_BLUR_WIDTH: f64 = 0.05;
pub const MAX_HILBERT_SIZE: usize = 500;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("invalid {param} = {value} for the {family} family: {constraint}")]
    InvalidParam {
        family: &'static str,
        param: &'static str,
        value: String,
        constraint: &'static str,
    },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Extreme singular values of the constructed operator.
#[derive(Debug, Clone, Copy)]
pub struct ConditionInfo {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl ConditionInfo {
    pub fn condition_number(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// A test problem `Au = f` with known minimal-norm solution `y`, `f = Ay`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub op: LinearOperator,
    pub y: Vector,
    pub f: Vector,
    pub name: String,
    pub condition_info: ConditionInfo,
}

/// How the unit perturbation direction is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseDirection {
    /// Seeded standard normal vector, normalized to unit length.
    RandomUnit,
    /// Left singular vector of the smallest singular value: the direction
    /// the inversion amplifies worst.
    WorstCaseSmallestSingular,
    /// First coordinate basis vector.
    Axis,
}

impl NoiseDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseDirection::RandomUnit => "random",
            NoiseDirection::WorstCaseSmallestSingular => "worst",
            NoiseDirection::Axis => "axis",
        }
    }
}

/// Noisy data `f_δ = f + δ·ξ` with `‖ξ‖ = 1`, so `‖f_δ − f‖ = δ` exactly.
#[derive(Debug, Clone)]
pub struct NoisyObservation {
    pub f_delta: Vector,
    pub delta: f64,
    pub seed: u64,
    pub direction_policy: NoiseDirection,
}

fn invalid(
    family: &'static str,
    param: &'static str,
    value: impl ToString,
    constraint: &'static str,
) -> GalleryError {
    GalleryError::InvalidParam {
        family,
        param,
        value: value.to_string(),
        constraint,
    }
}

/// `A = diag(i^{−p})`, `y_i = 1/i`, `f = Ay`.
pub fn make_diagonal_problem(n: usize, p: f64) -> Result<ProblemInstance, GalleryError> {
    if n < 1 {
        return Err(invalid("diagonal", "n", n, "n >= 1"));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(invalid("diagonal", "p", p, "p > 0"));
    }
    let sigmas: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-p)).collect();
    let op = LinearOperator::diagonal(sigmas)?;
    let y = Vector::new((1..=n).map(|i| 1.0 / i as f64).collect())?;
    finish_problem(op, y, format!("diagonal(n={n},p={p})"))
}

/// `A_ij = 1/(i + j − 1)` (1-based), `y = (1, …, 1)`, `f = Ay`.
pub fn make_hilbert_problem(n: usize) -> Result<ProblemInstance, GalleryError> {
    if !(1..=MAX_HILBERT_SIZE).contains(&n) {
        return Err(invalid("hilbert", "n", n, "1 <= n <= 500"));
    }
    let mut data = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            data.push(1.0 / (i + j - 1) as f64);
        }
    }
    let op = LinearOperator::dense(n, n, data)?;
    let y = Vector::new(vec![1.0; n])?;
    finish_problem(op, y, format!("hilbert(n={n})"))
}

/// Circular Gaussian blur on `n` grid points over `[0, 1)`: kernel
/// `k_j ∝ exp(−(min(j, n−j)/n)²/(2s²))` normalized to sum 1, applied to the
/// triangular bump `y_i = max(0, 1 − 4|i/n − 1/2|)`.
pub fn make_blur_problem(n: usize, s: f64) -> Result<ProblemInstance, GalleryError> {
    if n < 8 {
        return Err(invalid("blur", "n", n, "n >= 8"));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("blur", "s", s, "s > 0"));
    }
    let mut kernel: Vec<f64> = (0..n)
        .map(|j| {
            let t = j.min(n - j) as f64 / n as f64;
            (-t * t / (2.0 * s * s)).exp()
        })
        .collect();
    let mass: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= mass;
    }
    let op = LinearOperator::convolution(kernel)?;
    let y = Vector::new(
        (0..n)
            .map(|i| (1.0 - 4.0 * (i as f64 / n as f64 - 0.5).abs()).max(0.0))
            .collect(),
    )?;
    finish_problem(op, y, format!("blur(n={n},s={s})"))
}

fn finish_problem(
    op: LinearOperator,
    y: Vector,
    name: String,
) -> Result<ProblemInstance, GalleryError> {
    let f = op.apply(&y)?;
    let svd_host;
    let factors = if op.is_convolution() {
        svd_host = op.densified();
        svd_host.svd()?
    } else {
        op.svd()?
    };
    let condition_info = ConditionInfo {
        sigma_max: factors.sigma_max(),
        sigma_min: factors.sigma_min(),
    };
    Ok(ProblemInstance {
        op,
        y,
        f,
        name,
        condition_info,
    })
}

/// Perturb `problem.f` by `δ` in a direction chosen by `policy`;
/// `‖f_δ − f‖ = δ` holds exactly up to rounding.
pub fn make_noisy(
    problem: &ProblemInstance,
    delta: f64,
    seed: u64,
    policy: NoiseDirection,
) -> Result<NoisyObservation, GalleryError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid("noise", "delta", delta, "delta > 0"));
    }
    let n = problem.f.dim();
    let xi: Vec<f64> = match policy {
        NoiseDirection::Axis => {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        }
        NoiseDirection::RandomUnit => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            loop {
                let raw: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    break raw.into_iter().map(|x| x / norm).collect();
                }
            }
        }
        NoiseDirection::WorstCaseSmallestSingular => {
            let host;
            let factors = if problem.op.is_convolution() {
                host = problem.op.densified();
                host.svd()?
            } else {
                problem.op.svd()?
            };
            factors
                .left
                .last()
                .expect("operator has at least one singular triple")
                .as_slice()
                .to_vec()
        }
    };
    let f_delta = Vector::new(
        problem
            .f
            .as_slice()
            .iter()
            .zip(&xi)
            .map(|(fi, xii)| fi + delta * xii)
            .collect(),
    )?;
    Ok(NoisyObservation {
        f_delta,
        delta,
        seed,
        direction_policy: policy,
    })
}

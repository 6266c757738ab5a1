//! Delta-sweep experiments: for every (delta, trial) pair draw fresh noise,
//! run the principle, and record one CSV row — including rows for trials that
//! fail, with the failure class in the status column.
//!
//! Rows are produced in (delta index, trial) order and every computed field
//! is a pure function of (problem, config, policy, seed), so identical
//! invocations write identical CSV bytes. Floats are serialized with 17
//! significant digits, which round-trips f64 exactly. Wall-clock timing is
//! inherently nondeterministic, so the wall_ms column is empty unless timing
//! is explicitly requested.

use std::path::Path;
use std::time::Instant;

use discrep_core::{
    make_noisy, solve_for_epsilon, DiscrepancyConfig, NoiseDirection, ProblemInstance,
};

use crate::error::{status_name, CliError};
use crate::fmt::fmt17;

pub const CSV_HEADER: &str =
    "delta,trial,epsilon,h,err,u_norm,y_norm,gap_budget,iters,mode,status,wall_ms";

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub problem: ProblemInstance,
    /// Strictly decreasing noise levels.
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub cfg: DiscrepancyConfig,
    pub policy: NoiseDirection,
    pub seed_base: u64,
    /// Record per-trial wall time; forfeits byte-identical CSV output.
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta: f64,
    pub trial: usize,
    pub epsilon: Option<f64>,
    pub h: Option<f64>,
    /// `‖u_δ − y‖` against the known minimal-norm solution.
    pub err: Option<f64>,
    pub u_norm: Option<f64>,
    pub y_norm: f64,
    pub gap_budget: f64,
    pub iters: Option<usize>,
    pub mode: &'static str,
    pub status: String,
    /// Measured wall time in whole milliseconds, when timing was requested.
    pub wall_ms: Option<u128>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: the base shifted by a mix of (delta index, trial), so
/// trials are independent but fully reproducible.
pub fn trial_seed(seed_base: u64, delta_index: usize, trial: usize) -> u64 {
    seed_base.wrapping_add(splitmix64(((delta_index as u64) << 32) ^ trial as u64))
}

pub fn validate_spec(spec: &SweepSpec) -> Result<(), CliError> {
    if spec.deltas.is_empty() {
        return Err(CliError::Usage("delta list must not be empty".into()));
    }
    for d in &spec.deltas {
        if !(d.is_finite() && *d > 0.0) {
            return Err(CliError::Usage(format!(
                "delta values must be positive, got {d}"
            )));
        }
    }
    for pair in spec.deltas.windows(2) {
        if pair[1] >= pair[0] {
            return Err(CliError::Usage(format!(
                "delta list must be strictly decreasing, but {} >= {}",
                pair[1], pair[0]
            )));
        }
    }
    if spec.trials < 1 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    spec.cfg.validate().map_err(CliError::from)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    validate_spec(spec)?;
    let mode = spec.cfg.solver_mode.as_str();
    let y_norm = spec.problem.y.norm();
    let mut rows = Vec::with_capacity(spec.deltas.len() * spec.trials);
    for (delta_index, &delta) in spec.deltas.iter().enumerate() {
        for trial in 0..spec.trials {
            let seed = trial_seed(spec.seed_base, delta_index, trial);
            let start = Instant::now();
            let outcome = make_noisy(&spec.problem, delta, seed, spec.policy)
                .map_err(|e| CliError::Usage(e.to_string()))
                .and_then(|obs| {
                    solve_for_epsilon(&spec.problem.op, &obs.f_delta, delta, &spec.cfg)
                        .map_err(CliError::from)
                });
            let wall_ms = spec.timing.then(|| start.elapsed().as_millis());
            let row = match outcome {
                Ok(sol) => SweepRow {
                    delta,
                    trial,
                    epsilon: Some(sol.epsilon),
                    h: Some(sol.discrepancy),
                    err: Some(sol.u_delta.dist(&spec.problem.y)),
                    u_norm: Some(sol.u_delta.norm()),
                    y_norm,
                    gap_budget: sol.gap_budget_used,
                    iters: Some(sol.iterations_total),
                    mode,
                    status: "ok".into(),
                    wall_ms,
                },
                Err(CliError::Solve(e)) => SweepRow {
                    delta,
                    trial,
                    epsilon: None,
                    h: None,
                    err: None,
                    u_norm: None,
                    y_norm,
                    gap_budget: spec.cfg.gap_budget(delta),
                    iters: None,
                    mode,
                    status: status_name(&e).into(),
                    wall_ms,
                },
                Err(other) => return Err(other),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        let iters = r.iters.map(|i| i.to_string()).unwrap_or_default();
        let wall_ms = r.wall_ms.map(|w| w.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt17(r.delta),
            r.trial,
            opt(r.epsilon),
            opt(r.h),
            opt(r.err),
            opt(r.u_norm),
            fmt17(r.y_norm),
            fmt17(r.gap_budget),
            iters,
            r.mode,
            r.status,
            wall_ms
        ));
    }
    out
}

pub fn write_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    std::fs::write(path, rows_to_csv(rows)).map_err(|source| CliError::OutputIo {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-delta medians over successful rows, in delta order.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSummary {
    pub delta: f64,
    pub ok: usize,
    pub failed: usize,
    pub median_epsilon: Option<f64>,
    pub median_err: Option<f64>,
}

pub fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

pub fn summarize(rows: &[SweepRow]) -> Vec<DeltaSummary> {
    let mut deltas: Vec<f64> = Vec::new();
    for r in rows {
        if deltas.last() != Some(&r.delta) && !deltas.contains(&r.delta) {
            deltas.push(r.delta);
        }
    }
    deltas
        .into_iter()
        .map(|delta| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.delta == delta).collect();
            let ok: Vec<&&SweepRow> = group.iter().filter(|r| r.is_ok()).collect();
            DeltaSummary {
                delta,
                ok: ok.len(),
                failed: group.len() - ok.len(),
                median_epsilon: median(ok.iter().filter_map(|r| r.epsilon).collect()),
                median_err: median(ok.iter().filter_map(|r| r.err).collect()),
            }
        })
        .collect()
}

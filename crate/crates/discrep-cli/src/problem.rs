//! Problem selection by name, shared by all subcommands.

use discrep_core::{
    make_blur_problem, make_diagonal_problem, make_hilbert_problem, ProblemInstance,
};

use crate::args::ProblemSelect;
use crate::error::CliError;

pub const VALID_PROBLEMS: &[&str] = &["diagonal", "hilbert", "blur"];

pub fn build_problem(select: &ProblemSelect) -> Result<ProblemInstance, CliError> {
    build_named(&select.problem, select.n, select.p, select.s)
}

pub fn build_named(name: &str, n: usize, p: f64, s: f64) -> Result<ProblemInstance, CliError> {
    match name {
        "diagonal" => Ok(make_diagonal_problem(n, p)?),
        "hilbert" => Ok(make_hilbert_problem(n)?),
        "blur" => Ok(make_blur_problem(n, s)?),
        other => Err(CliError::Usage(format!(
            "unknown problem '{other}'; valid names: {}",
            VALID_PROBLEMS.join(", ")
        ))),
    }
}

//! Subcommand implementations.

use discrep_core::{make_noisy, solve_for_epsilon, NoiseDirection, ProblemInstance};

use crate::args::{GalleryArgs, SolveArgs, SweepArgs};
use crate::error::CliError;
use crate::fmt::fmt17;
use crate::problem::{build_named, build_problem, VALID_PROBLEMS};
use crate::sweep::{run_sweep, summarize, write_csv, SweepSpec};

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let cfg = args.opts.to_config();
    cfg.validate()?;
    let problem = build_problem(&args.problem)?;
    let policy: NoiseDirection = args.policy.into();
    let obs = make_noisy(&problem, args.delta, args.seed, policy)?;
    let sol = solve_for_epsilon(&problem.op, &obs.f_delta, args.delta, &cfg)?;

    let target = cfg.c * args.delta;
    println!("problem      {}", problem.name);
    println!(
        "noise        delta {}  policy {}  seed {}",
        fmt17(args.delta),
        policy.as_str(),
        args.seed
    );
    println!(
        "principle    C {}  b {}  target C*delta {}",
        args.opts.c,
        args.opts.b,
        fmt17(target)
    );
    println!("solver       {}", cfg.solver_mode.as_str());
    println!("epsilon      {}", fmt17(sol.epsilon));
    println!("h            {}", fmt17(sol.discrepancy));
    println!(
        "band         |h - C*delta| {}  (allowed {})",
        fmt17((sol.discrepancy - target).abs()),
        fmt17(cfg.root_rel_tol * target)
    );
    println!("err          {}", fmt17(sol.u_delta.dist(&problem.y)));
    println!(
        "u_norm       {}  y_norm {}",
        fmt17(sol.u_delta.norm()),
        fmt17(problem.y.norm())
    );
    println!(
        "certificate  gap_budget {}  minimizer_iterations {}",
        fmt17(sol.gap_budget_used),
        sol.iterations_total
    );
    println!("evaluations  {}", sol.bracket_trace.len());
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = args.opts.to_config();
    let problem = build_problem(&args.problem)?;
    let spec = SweepSpec {
        problem,
        deltas: args.delta_list.clone(),
        trials: args.trials,
        cfg,
        policy: args.policy.into(),
        seed_base: args.seed,
        timing: args.timing,
    };
    let rows = run_sweep(&spec)?;
    write_csv(&args.out, &rows)?;

    println!(
        "sweep        {}  solver {}  trials {}  policy {}  seed {}",
        spec.problem.name,
        spec.cfg.solver_mode.as_str(),
        spec.trials,
        spec.policy.as_str(),
        spec.seed_base
    );
    println!("wrote        {} rows to {}", rows.len(), args.out.display());
    println!("delta                    ok fail  median_epsilon           median_err");
    for s in summarize(&rows) {
        println!(
            "{:<24} {:>2} {:>4}  {:<24} {:<24}",
            fmt17(s.delta),
            s.ok,
            s.failed,
            s.median_epsilon.map(fmt17).unwrap_or_else(|| "-".into()),
            s.median_err.map(fmt17).unwrap_or_else(|| "-".into()),
        );
    }
    Ok(())
}

fn print_diagnostics(problem: &ProblemInstance) {
    println!("problem      {}", problem.name);
    println!("size         {}x{}", problem.op.rows(), problem.op.cols());
    println!("sigma_max    {}", fmt17(problem.condition_info.sigma_max));
    println!("sigma_min    {}", fmt17(problem.condition_info.sigma_min));
    println!(
        "condition    {:.6e}",
        problem.condition_info.condition_number()
    );
    println!("y_norm       {}", fmt17(problem.y.norm()));
    println!("f_norm       {}", fmt17(problem.f.norm()));
}

pub fn cmd_gallery(args: &GalleryArgs) -> Result<(), CliError> {
    if let Some(name) = &args.problem {
        let n = args.n.unwrap_or(match name.as_str() {
            "blur" => 64,
            _ => 10,
        });
        let problem = build_named(name, n, args.p, args.s)?;
        print_diagnostics(&problem);
        return Ok(());
    }

    println!(
        "available problem families ({}):",
        VALID_PROBLEMS.join(", ")
    );
    println!();
    let samples = [
        (
            "diagonal",
            "A = diag(i^-p), y_i = 1/i; flags --n (>= 1), --p (> 0)",
            10,
        ),
        (
            "hilbert",
            "A_ij = 1/(i+j-1), y = ones; flags --n (1..=500)",
            10,
        ),
        (
            "blur",
            "periodic Gaussian blur of a triangular bump; flags --n (>= 8), --s (> 0)",
            64,
        ),
    ];
    for (name, desc, n) in samples {
        let problem = build_named(name, n, args.p, args.s)?;
        println!("{name}");
        println!("  {desc}");
        println!(
            "  sample {}: sigma_max {:.6e}, sigma_min {:.6e}, condition {:.6e}",
            problem.name,
            problem.condition_info.sigma_max,
            problem.condition_info.sigma_min,
            problem.condition_info.condition_number()
        );
    }
    Ok(())
}

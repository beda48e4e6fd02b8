//! Command-line front end: solve one problem, sweep (alpha, beta) pairs,
//! or run the library self-tests.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 spec parse/validation
//! error, 3 numerical failure.

use clap::{Parser, Subcommand};
use fracbvp::output::{self, Format, Row, RunReport, SweepTable};
use fracbvp::specfile;
use fracbvp_core::selftest;
use fracbvp_core::solver::{self, SolveReport};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_SELFTEST: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fracbvp",
    version,
    about = "Collocation solver for fractional three-point boundary value problems",
    after_help = "Problem files have [problem] and [solver] sections of key = value lines; \
                  see the repository README for the format and worked samples."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the problem in a spec file and print the solution grid
    Solve {
        /// Path to the problem-specification file
        spec: PathBuf,
        /// Override [solver] m
        #[arg(long)]
        m: Option<usize>,
        /// Override [solver] n
        #[arg(long)]
        n: Option<usize>,
        /// Override the node offset in (0,1)
        #[arg(long)]
        node_offset: Option<f64>,
        /// Override the output grid, as start:stop:step
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Write the output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve once per (alpha, beta) pair and print the error matrix
    Sweep {
        spec: PathBuf,
        /// Comma-separated alpha values, paired with --beta-list
        #[arg(long)]
        alpha_list: String,
        /// Comma-separated beta values, same length as --alpha-list
        #[arg(long)]
        beta_list: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in property suites and report pass/fail per property
    Verify {
        /// Which suite to run
        #[arg(long, default_value = "all", value_parser = ["fracops", "kernel", "solver", "all"])]
        suite: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn spec(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SPEC,
            message: message.into(),
        }
    }
    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve {
            spec,
            m,
            n,
            node_offset,
            grid,
            format,
            out,
        } => cmd_solve(
            &spec,
            m,
            n,
            node_offset,
            grid.as_deref(),
            format,
            out.as_deref(),
        ),
        Cmd::Sweep {
            spec,
            alpha_list,
            beta_list,
            m,
            n,
            format,
            out,
        } => cmd_sweep(&spec, &alpha_list, &beta_list, m, n, format, out.as_deref()),
        Cmd::Verify { suite } => cmd_verify(&suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fracbvp: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_spec(
    path: &Path,
    m: Option<usize>,
    n: Option<usize>,
    node_offset: Option<f64>,
    grid: Option<&str>,
) -> Result<specfile::SpecData, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::spec(format!("cannot read {}: {e}", path.display())))?;
    let mut data =
        specfile::parse(&text).map_err(|e| Failure::spec(format!("{}: {e}", path.display())))?;
    if m.is_some() {
        data.m = m;
    }
    if n.is_some() {
        data.n = n;
    }
    if let Some(off) = node_offset {
        data.node_offset = off;
    }
    if let Some(src) = grid {
        data.grid = specfile::parse_grid(src).map_err(|e| Failure::spec(format!("--grid: {e}")))?;
    }
    Ok(data)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::numerical(format!("cannot write {}: {e}", path.display()))),
    }
}

fn cmd_solve(
    path: &Path,
    m: Option<usize>,
    n: Option<usize>,
    node_offset: Option<f64>,
    grid: Option<&str>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let data = load_spec(path, m, n, node_offset, grid)?;
    let (spec, cfg, problem_echo, solver_echo) =
        specfile::build(&data, None, None).map_err(|e| Failure::spec(e.to_string()))?;
    let started = Instant::now();
    let report = solver::solve(&spec, &cfg).map_err(|e| Failure::numerical(e.to_string()))?;
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    for w in &report.warnings {
        eprintln!("fracbvp: warning: {w}");
    }
    let rows = output::make_rows(&report, spec.exact.as_ref());
    let text = match format {
        Format::Table => output::table_solve(&rows),
        Format::Csv => output::csv_solve(&rows),
        Format::Json => render_json(&report, rows, problem_echo, solver_echo, wall_time_ms)?,
    };
    emit(&text, out)
}

fn render_json(
    report: &SolveReport,
    rows: Vec<Row>,
    problem: specfile::ProblemEcho,
    solver: specfile::SolverEcho,
    wall_time_ms: f64,
) -> Result<String, Failure> {
    let full = report.full_solution();
    let run = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        problem,
        solver,
        dropped_psi: report.dropped_psi.clone(),
        warnings: report.warnings.clone(),
        iterates_delta: report.iterates_delta.clone(),
        rows,
        solution_coeffs: full.coeffs_f64(),
        wall_time_ms,
    };
    serde_json::to_string_pretty(&run)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::numerical(format!("json encoding failed: {e}")))
}

fn parse_list(name: &str, src: &str) -> Result<Vec<f64>, Failure> {
    src.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Failure::spec(format!("{name}: `{}` is not a number", p.trim())))
        })
        .collect()
}

fn cmd_sweep(
    path: &Path,
    alpha_list: &str,
    beta_list: &str,
    m: Option<usize>,
    n: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let alphas = parse_list("--alpha-list", alpha_list)?;
    let betas = parse_list("--beta-list", beta_list)?;
    if alphas.len() != betas.len() || alphas.is_empty() {
        return Err(Failure::spec(format!(
            "--alpha-list and --beta-list must pair up: got {} and {} values",
            alphas.len(),
            betas.len()
        )));
    }
    let data = load_spec(path, m, n, None, None)?;

    // one solve per pair, concurrently; results are assembled in pair
    // order so the output is deterministic regardless of completion order
    let results: Vec<Result<SolveReport, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = alphas
            .iter()
            .zip(&betas)
            .map(|(&a, &b)| {
                let data = &data;
                scope.spawn(move || {
                    let (spec, cfg, _, _) =
                        specfile::build(data, Some(a), Some(b)).map_err(|e| e.to_string())?;
                    if spec.exact.is_none() {
                        return Err(
                            "sweep reports absolute errors and needs a manufactured problem"
                                .to_string(),
                        );
                    }
                    solver::solve(&spec, &cfg).map_err(|e| e.to_string())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut errors_by_pair = Vec::with_capacity(results.len());
    let mut failed = false;
    for ((a, b), result) in alphas.iter().zip(&betas).zip(&results) {
        match result {
            Ok(report) => errors_by_pair.push(
                report
                    .errors
                    .clone()
                    .expect("sweep problems carry exact solutions"),
            ),
            Err(message) => {
                failed = true;
                eprintln!("fracbvp: pair alpha={a}, beta={b} failed: {message}");
                errors_by_pair.push(vec![f64::NAN; data.grid.len()]);
            }
        }
    }
    let table = SweepTable {
        grid: data.grid.clone(),
        pairs: alphas.iter().copied().zip(betas.iter().copied()).collect(),
        errors: errors_by_pair,
    };
    let text = match format {
        Format::Table => output::table_sweep(&table),
        Format::Csv => output::csv_sweep(&table),
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "grid": table.grid,
            "pairs": table.pairs,
            "abs_errors": table.errors,
        }))
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::numerical(e.to_string()))?,
    };
    emit(&text, out)?;
    if failed {
        return Err(Failure::numerical("one or more sweep pairs failed"));
    }
    Ok(())
}

fn cmd_verify(suite: &str) -> Result<(), Failure> {
    let suites: Vec<(&'static str, Vec<selftest::Check>)> = match suite {
        "fracops" => vec![("fracops", selftest::fracops_suite())],
        "kernel" => vec![("kernel", selftest::kernel_suite())],
        "solver" => vec![("solver", selftest::solver_suite())],
        "all" => selftest::all_suites(),
        other => return Err(Failure::spec(format!("unknown suite `{other}`"))),
    };
    let mut first_failure: Option<String> = None;
    for (suite_name, checks) in suites {
        for c in checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            println!("{status} {suite_name}/{}: {}", c.name, c.detail);
            if !c.passed && first_failure.is_none() {
                first_failure = Some(format!("{suite_name}/{}", c.name));
            }
        }
    }
    match first_failure {
        None => Ok(()),
        Some(name) => Err(Failure {
            code: EXIT_SELFTEST,
            message: format!("property failed: {name}"),
        }),
    }
}

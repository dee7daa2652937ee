use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pldg::descent::SolverConfig;
use pldg::ldg::DEFAULT_ETA;
use pldg::linsolve::DEFAULT_EPS;
use pldg::problems::ProblemId;
use pldg::report::{fmt_float, write_table_csv};
use pldg::study::{run_study, StudyConfig};

/// Solve a manufactured p-Laplace problem over a chain of uniformly refined
/// meshes and report errors, orders and descent histories.
#[derive(Debug, Parser)]
#[command(name = "pldg", version)]
struct Cli {
    /// linear, regular, degenerate, smooth or neumann-smoke
    #[arg(long, required_unless_present = "checks")]
    problem: Option<ProblemId>,
    /// Exponent p (defaults per problem)
    #[arg(long)]
    p: Option<f64>,
    /// Radial exponent of the regular problem
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma separated polynomial degrees
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    degrees: Vec<usize>,
    /// Number of refinement levels, starting at the coarse mesh
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Allow more than the default level cap
    #[arg(long)]
    allow_fine: bool,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 1e-16)]
    tol_w: f64,
    #[arg(long, default_value_t = 1e-16)]
    tol_rho: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Output directory for the CSV files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the property and oracle checks instead of a study
    #[arg(long)]
    checks: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.checks {
        let summary = pldg::checks::run_checks(cli.seed);
        print!("{summary}");
        return if summary.all_passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE };
    }
    let problem = cli.problem.expect("required unless --checks");
    let cfg = StudyConfig {
        problem,
        p: cli.p,
        sigma: cli.sigma,
        degrees: cli.degrees,
        levels: cli.levels,
        eta: cli.eta,
        solver: SolverConfig {
            eps: cli.eps,
            delta_w: cli.tol_w,
            delta_rho: cli.tol_rho,
            max_iters: cli.max_iters,
            ..SolverConfig::default()
        },
        out: cli.out,
        allow_fine: cli.allow_fine,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run_study(&cfg) {
        Ok(runs) => {
            let stdout = std::io::stdout();
            for run in &runs {
                println!("k = {}", run.degree);
                if write_table_csv(stdout.lock(), &run.table()).is_err() {
                    return ExitCode::FAILURE;
                }
                for l in &run.levels {
                    println!(
                        "  level {}: {:?} after {} steps, |J'|_inf = {}",
                        l.result.level,
                        l.descent.stop,
                        l.descent.iterations,
                        fmt_float(l.descent.stationarity)
                    );
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! `ginprod`: CSV reports on real eigenvalues of products of real Gaussian
//! matrices: limiting theory curves, exact finite-size statistics, and Monte
//! Carlo runs, all cross-comparable.
//!
//! Exit codes: 0 success, 1 argument error, 2 numeric or I/O failure.

mod csv_out;

use clap::{Args, Parser, Subcommand};
use csv_out::{write_csv, Manifest};
use ginprod::exact;
use ginprod::ginibre::{run_simulation, SimulationConfig};
use ginprod::stats::{histogram_lambda, summarize_counts};
use ginprod::theory;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ginprod",
    version,
    about = "Real-eigenvalue statistics of products of real Ginibre matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the limiting curves c(α), s(α), r(α) on a log-spaced grid
    Theory {
        #[arg(long = "alpha-min")]
        alpha_min: f64,
        #[arg(long = "alpha-max")]
        alpha_max: f64,
        /// Number of grid points (log-spaced, endpoints included)
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the limiting rescaled density on [-1, 1]
    Density {
        #[arg(long)]
        alpha: f64,
        /// Odd number of grid points, so λ = 0 is a node
        #[arg(long = "grid-points", default_value_t = 2001)]
        grid_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact expected count, variance, and moments at one (N, m)
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
        /// Highest moment order to report (even orders carry the content)
        #[arg(long = "max-moment", default_value_t = 4)]
        max_moment: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo run: per-sample real-eigenvalue counts and λ histogram
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 25)]
        bins: usize,
        #[arg(long = "out-counts")]
        out_counts: PathBuf,
        #[arg(long = "out-hist")]
        out_hist: PathBuf,
    },
    /// Joint report: Monte Carlo vs exact sums vs limiting theory
    Compare {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    n: usize,
    /// Critical-regime parameter; m = round(αN). Exactly one of --alpha/--m.
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of factors. Exactly one of --alpha/--m.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to GINPROD_THREADS, then all cores
    #[arg(long)]
    threads: Option<usize>,
}

enum CliError {
    Argument(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Argument(_) => ExitCode::from(1),
            CliError::Numeric(_) => ExitCode::from(2),
        }
    }
}

fn arg_err(msg: impl Into<String>) -> CliError {
    CliError::Argument(msg.into())
}

macro_rules! numeric {
    ($expr:expr) => {
        $expr.map_err(|e| CliError::Numeric(e.to_string()))?
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through the same error path
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Theory {
            alpha_min,
            alpha_max,
            steps,
            out,
        } => cmd_theory(alpha_min, alpha_max, steps, &out),
        Command::Density {
            alpha,
            grid_points,
            out,
        } => cmd_density(alpha, grid_points, &out),
        Command::Exact {
            n,
            m,
            max_moment,
            out,
        } => cmd_exact(n, m, max_moment, &out),
        Command::Simulate {
            sim,
            bins,
            out_counts,
            out_hist,
        } => cmd_simulate(&sim, bins, &out_counts, &out_hist),
        Command::Compare { sim, out } => cmd_compare(&sim, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Argument(msg) => eprintln!("argument error: {msg}"),
                CliError::Numeric(msg) => eprintln!("error: {msg}"),
            }
            e.exit_code()
        }
    }
}

fn cmd_theory(
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    out: &std::path::Path,
) -> Result<(), CliError> {
    if alpha_min.is_nan() || alpha_min <= 0.0 || alpha_min >= alpha_max {
        return Err(arg_err("need 0 < alpha-min < alpha-max"));
    }
    if steps < 2 {
        return Err(arg_err("steps must be >= 2"));
    }
    let log_lo = alpha_min.ln();
    let log_hi = alpha_max.ln();
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let alpha = if i == 0 {
            alpha_min
        } else if i == steps - 1 {
            alpha_max
        } else {
            (log_lo + (log_hi - log_lo) * i as f64 / (steps - 1) as f64).exp()
        };
        rows.push(numeric!(theory::theory_point(alpha)));
    }
    let manifest = Manifest::new("theory")
        .param("alpha_min", alpha_min)
        .param("alpha_max", alpha_max)
        .param("steps", steps);
    numeric!(write_csv(out, &manifest, "alpha,c,s,r", |w| {
        for p in &rows {
            writeln!(w, "{},{},{},{}", p.alpha, p.c, p.s, p.r)?;
        }
        Ok(())
    }));
    Ok(())
}

fn cmd_density(alpha: f64, grid_points: usize, out: &std::path::Path) -> Result<(), CliError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(arg_err("alpha must be positive"));
    }
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(arg_err("grid-points must be odd and >= 3"));
    }
    let curve = numeric!(theory::density_curve(alpha, grid_points));
    let manifest = Manifest::new("density")
        .param("alpha", alpha)
        .param("grid_points", grid_points);
    numeric!(write_csv(out, &manifest, "lambda,rho", |w| {
        for (lam, rho) in curve.lambdas.iter().zip(&curve.values) {
            writeln!(w, "{lam},{rho}")?;
        }
        Ok(())
    }));
    Ok(())
}

fn cmd_exact(n: usize, m: u32, max_moment: u32, out: &std::path::Path) -> Result<(), CliError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(arg_err("n must be even and >= 2"));
    }
    if m < 1 {
        return Err(arg_err("m must be >= 1"));
    }
    let report = numeric!(exact::exact_report(n, m, max_moment));
    let manifest = Manifest::new("exact")
        .param("n", n)
        .param("m", m)
        .param("max_moment", max_moment);
    numeric!(write_csv(out, &manifest, "quantity,value", |w| {
        writeln!(w, "E,{}", report.expected_count)?;
        writeln!(w, "V,{}", report.variance)?;
        writeln!(w, "V_over_E,{}", report.variance / report.expected_count)?;
        for (order, value) in &report.moments {
            writeln!(w, "M_{order},{value}")?;
        }
        Ok(())
    }));
    Ok(())
}

/// Resolve the simulate/compare shared arguments into a validated config.
fn build_config(sim: &SimArgs) -> Result<(SimulationConfig, f64), CliError> {
    if sim.n < 2 || !sim.n.is_multiple_of(2) {
        return Err(arg_err("n must be even and >= 2"));
    }
    let (config, alpha) = match (sim.alpha, sim.m) {
        (Some(alpha), None) => {
            if alpha.is_nan() || alpha <= 0.0 {
                return Err(arg_err("alpha must be positive"));
            }
            (
                SimulationConfig::with_alpha(sim.n, alpha, sim.samples, sim.seed),
                alpha,
            )
        }
        (None, Some(m)) => (
            SimulationConfig::new(sim.n, m, sim.samples, sim.seed),
            m as f64 / sim.n as f64,
        ),
        _ => return Err(arg_err("give exactly one of --alpha or --m")),
    };
    let mut config = config;
    config.threads = match sim.threads {
        Some(t) => t,
        None => match std::env::var("GINPROD_THREADS") {
            Ok(v) => v
                .parse::<usize>()
                .map_err(|_| arg_err(format!("GINPROD_THREADS is not a thread count: {v:?}")))?,
            Err(_) => 0,
        },
    };
    config.validate().map_err(|e| arg_err(e.to_string()))?;
    Ok((config, alpha))
}

fn cmd_simulate(
    sim: &SimArgs,
    bins: usize,
    out_counts: &std::path::Path,
    out_hist: &std::path::Path,
) -> Result<(), CliError> {
    if bins < 1 {
        return Err(arg_err("bins must be >= 1"));
    }
    let (config, alpha) = build_config(sim)?;
    let run = numeric!(run_simulation(&config));
    let excluded = run.failures.len();

    let mut manifest = Manifest::new("simulate")
        .param("n", config.n)
        .param("m", config.m)
        .param("alpha", alpha)
        .param("samples", config.samples)
        .param("bins", bins)
        .param("threads", config.threads);
    manifest.seed = config.seed;
    manifest.excluded_samples = excluded;

    numeric!(write_csv(out_counts, &manifest, "sample,count", |w| {
        for s in &run.spectra {
            writeln!(w, "{},{}", s.sample_index, s.count())?;
        }
        Ok(())
    }));
    let hist = numeric!(histogram_lambda(&run.spectra, bins, -1.0, 1.0));
    numeric!(write_csv(
        out_hist,
        &manifest,
        "lambda_lo,lambda_hi,count,density",
        |w| {
            for (i, (&count, &density)) in hist.counts.iter().zip(&hist.density).enumerate() {
                writeln!(
                    w,
                    "{},{},{count},{density}",
                    hist.edges[i],
                    hist.edges[i + 1]
                )?;
            }
            Ok(())
        }
    ));
    if excluded > 0 {
        return Err(CliError::Numeric(format!(
            "{excluded} sample(s) excluded for Schur non-convergence"
        )));
    }
    Ok(())
}

fn cmd_compare(sim: &SimArgs, out: &std::path::Path) -> Result<(), CliError> {
    let (config, alpha) = build_config(sim)?;
    let run = numeric!(run_simulation(&config));
    let excluded = run.failures.len();
    let stats = numeric!(summarize_counts(&run.spectra));

    let exact_e = numeric!(exact::expected_real_count(config.n, config.m));
    let exact_v = numeric!(exact::variance_real_count(config.n, config.m));
    let point = numeric!(theory::theory_point(alpha));

    let z_mean = (stats.mean - exact_e) / stats.std_error_mean;
    let se_var = stats.variance * (2.0 / (stats.samples as f64 - 1.0)).sqrt();
    let z_var = (stats.variance - exact_v) / se_var;

    let mut manifest = Manifest::new("compare")
        .param("n", config.n)
        .param("m", config.m)
        .param("alpha", alpha)
        .param("samples", config.samples)
        .param("threads", config.threads);
    manifest.seed = config.seed;
    manifest.excluded_samples = excluded;

    numeric!(write_csv(out, &manifest, "quantity,value", |w| {
        writeln!(w, "mc_mean,{}", stats.mean)?;
        writeln!(w, "mc_var,{}", stats.variance)?;
        writeln!(w, "mc_var_over_mean,{}", stats.var_over_mean)?;
        writeln!(w, "exact_E,{exact_e}")?;
        writeln!(w, "exact_V,{exact_v}")?;
        writeln!(w, "exact_V_over_E,{}", exact_v / exact_e)?;
        writeln!(w, "theory_c,{}", point.c)?;
        writeln!(w, "theory_r,{}", point.r)?;
        writeln!(w, "z_mean,{z_mean}")?;
        writeln!(w, "z_var,{z_var}")?;
        Ok(())
    }));
    if excluded > 0 {
        return Err(CliError::Numeric(format!(
            "{excluded} sample(s) excluded for Schur non-convergence"
        )));
    }
    Ok(())
}

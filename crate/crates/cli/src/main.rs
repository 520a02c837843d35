//! `shearfront` — command-line driver for the anti-plane shear front solver.
//!
//! Subcommands map one-to-one onto the library layers: `material check`
//! audits the constitutive conditions, `conjugate table` / `period-map` /
//! `spectrum` work the one-dimensional reduction, `front solve` and
//! `branch continue` run the two-dimensional solver, and `verify all`
//! executes the built-in verification suite.
//!
//! Configuration comes from an optional `[section] key=value` file plus
//! flags (flags win). Artifacts are CSV tables with JSON sidecars; each
//! sidecar records the SHA-256 of the resolved configuration, and a rerun
//! with the same configuration reproduces every artifact byte for byte.
//! Exit codes: 0 success, 1 domain/solver failure (machine-readable JSON on
//! stderr), 2 usage error.

mod config;
mod output;
mod run;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{parse_family, parse_list, Settings};
use run::AppError;

#[derive(Parser)]
#[command(name = "shearfront", version, about = "Monotone fronts in anti-plane shear: solvers and diagnostics")]
struct Cli {
    /// Configuration file: [section] headers with key = value lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory artifacts are written into (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Body-force family: "linear" or "tanh" [config: model.family].
    #[arg(long, global = true, value_name = "NAME")]
    family: Option<String>,

    /// Quadratic strain-energy coefficient [config: model.w1].
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    w1: Option<f64>,

    /// Transversal node count for the 2D grid [config: numeric.n_y].
    #[arg(long, global = true, value_name = "N")]
    n_y: Option<usize>,

    /// Node count for 1D eigenvalue problems [config: numeric.nodes].
    #[arg(long, global = true, value_name = "N")]
    nodes: Option<usize>,

    /// Quadrature panels for the period map [config: numeric.quad].
    #[arg(long, global = true, value_name = "N")]
    quad: Option<usize>,

    /// Newton / corrector residual tolerance [config: numeric.tol].
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Integration steps for the kernel shooting certificate
    /// [config: numeric.kernel_steps].
    #[arg(long, global = true, value_name = "N")]
    kernel_steps: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constitutive-model audits.
    Material {
        #[command(subcommand)]
        cmd: MaterialCmd,
    },
    /// Transversal limit states and their diagnostics.
    Conjugate {
        #[command(subcommand)]
        cmd: ConjugateCmd,
    },
    /// Period of closed orbits of the transversal reduction.
    PeriodMap(PeriodMapArgs),
    /// Principal eigenvalue along the small-amplitude branch.
    Spectrum(SpectrumArgs),
    /// Two-dimensional front states.
    Front {
        #[command(subcommand)]
        cmd: FrontCmd,
    },
    /// Arclength continuation of the front branch.
    Branch {
        #[command(subcommand)]
        cmd: BranchCmd,
    },
    /// Built-in verification suite.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum MaterialCmd {
    /// Check ellipticity and body-force structure; writes report.json.
    Check(MaterialArgs),
}

#[derive(Args)]
struct MaterialArgs {
    /// Largest strain invariant sampled [config: material.q_max].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    q_max: Option<f64>,

    /// Largest displacement sampled [config: material.kappa_max].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    kappa_max: Option<f64>,

    /// Largest load sampled [config: material.lambda_max].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    lambda_max: Option<f64>,

    /// Sampling density per axis [config: material.samples].
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum ConjugateCmd {
    /// Tabulate U+(lambda) diagnostics; writes conjugate.csv.
    Table(ConjugateArgs),
}

#[derive(Args)]
struct ConjugateArgs {
    /// Comma-separated loads, e.g. "0.25,1,4"; empty for none
    /// [config: conjugate.lambda].
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Args)]
struct PeriodMapArgs {
    /// Load the level sets live under [config: period-map.lambda].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    lambda: Option<f64>,

    /// Comma-separated level values [config: period-map.c].
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    c: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Comma-separated amplitudes; the state at each is U+(eps^2)
    /// [config: spectrum.eps].
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    eps: Option<String>,
}

#[derive(Subcommand)]
enum FrontCmd {
    /// Solve one front at load epsilon^2; writes u.csv and meta.json.
    Solve(FrontArgs),
}

#[derive(Args)]
struct FrontArgs {
    /// Amplitude parameter; the load is its square [config: front.epsilon].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    epsilon: Option<f64>,
}

#[derive(Subcommand)]
enum BranchCmd {
    /// Trace the branch; writes branch.csv and summary.json.
    Continue(BranchArgs),
}

#[derive(Args)]
struct BranchArgs {
    /// Starting amplitude [config: branch.epsilon].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    epsilon: Option<f64>,

    /// Initial arclength step [config: branch.ds].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    ds: Option<f64>,

    /// Accepted-point budget beyond the start [config: branch.steps].
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Largest arclength step [config: branch.ds_max].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    ds_max: Option<f64>,

    /// Norm-proxy ceiling [config: branch.n_ceiling].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    n_ceiling: Option<f64>,

    /// Load ceiling [config: branch.lambda_ceiling].
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    lambda_ceiling: Option<f64>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every verification criterion; exit 0 iff all pass.
    All,
}

fn main() {
    std::process::exit(dispatch());
}

fn dispatch() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(AppError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(AppError::Solver(e)) => {
            eprintln!("{}", run::error_json(run::solver_error_kind(&e), &e.to_string()));
            1
        }
        Err(AppError::Io(path, e)) => {
            eprintln!("{}", run::error_json("io", &format!("{}: {e}", path.display())));
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, AppError> {
    let mut st = base_settings(cli)?;

    // `verify all` takes no configuration; everything it checks is pinned.
    if let Command::Verify { cmd: VerifyCmd::All } = &cli.command {
        return run::verify_all();
    }

    fs::create_dir_all(&cli.out_dir)
        .map_err(|e| AppError::Io(cli.out_dir.clone(), e))?;
    let dir = cli.out_dir.as_path();

    let mut over = Settings::default();
    match &cli.command {
        Command::Material { cmd: MaterialCmd::Check(a) } => {
            over.q_max = a.q_max;
            over.kappa_max = a.kappa_max;
            over.lambda_max = a.lambda_max;
            over.samples = a.samples;
            st.overlay(over);
            run::material_check(&st, dir)
        }
        Command::Conjugate { cmd: ConjugateCmd::Table(a) } => {
            over.conjugate_lambda = a
                .lambda
                .as_deref()
                .map(|raw| parse_list(raw, "conjugate.lambda"))
                .transpose()?;
            st.overlay(over);
            run::conjugate_table(&st, dir)
        }
        Command::PeriodMap(a) => {
            over.pm_lambda = a.lambda;
            over.pm_c = a
                .c
                .as_deref()
                .map(|raw| parse_list(raw, "period-map.c"))
                .transpose()?;
            st.overlay(over);
            run::period_map_table(&st, dir)
        }
        Command::Spectrum(a) => {
            over.spectrum_eps = a
                .eps
                .as_deref()
                .map(|raw| parse_list(raw, "spectrum.eps"))
                .transpose()?;
            st.overlay(over);
            run::spectrum_table(&st, dir)
        }
        Command::Front { cmd: FrontCmd::Solve(a) } => {
            over.front_epsilon = a.epsilon;
            st.overlay(over);
            run::front_solve(&st, dir)
        }
        Command::Branch { cmd: BranchCmd::Continue(a) } => {
            over.branch_epsilon = a.epsilon;
            over.branch_ds = a.ds;
            over.branch_steps = a.steps;
            over.branch_ds_max = a.ds_max;
            over.branch_n_ceiling = a.n_ceiling;
            over.branch_lambda_ceiling = a.lambda_ceiling;
            st.overlay(over);
            run::branch_continue(&st, dir)
        }
        Command::Verify { .. } => unreachable!("handled before artifact setup"),
    }
}

/// File settings (if any) overlaid with the global model/numeric flags.
fn base_settings(cli: &Cli) -> Result<Settings, AppError> {
    let mut st = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                AppError::Usage(format!("cannot read config file {}: {e}", path.display()))
            })?;
            Settings::from_file_text(&text)?
        }
        None => Settings::default(),
    };
    let over = Settings {
        family: cli.family.as_deref().map(parse_family).transpose()?,
        w1: cli.w1,
        n_y: cli.n_y,
        nodes: cli.nodes,
        quad: cli.quad,
        tol: cli.tol,
        kernel_steps: cli.kernel_steps,
        ..Settings::default()
    };
    st.overlay(over);
    Ok(st)
}

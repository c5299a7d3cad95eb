//! `specball`: batch front end to `specball-core`.
//!
//! Settings resolve as flag > `SPECBALL_*` environment variable > `--config`
//! TOML file > built-in default. Reports go to stdout or `--out`; failures
//! print a JSON error object on stderr and exit nonzero.

mod commands;
mod config;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::{MinimaxArgs, Quantity};
use config::Format;

const EXIT_HELP: &str = "\
Exit status: 0 success, 2 usage error, 3 malformed input, 4 computation failure, 5 I/O failure.

Environment: every global flag can be set through SPECBALL_<FLAG>, e.g. SPECBALL_SEED=7 or
SPECBALL_RADII=1e-1,1e-2,1e-3. CSV output starts with '#' comment lines carrying the
command, configuration and input, followed by the header row.";

#[derive(Parser)]
#[command(name = "specball", version, about = "Spectral ball and symmetrized polydisk laboratory", after_help = EXIT_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// TOML file with keys seed, format, out, [tolerances] and [grids]
    #[arg(long, global = true, env = "SPECBALL_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "SPECBALL_SEED")]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long, global = true, env = "SPECBALL_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "SPECBALL_FORMAT", value_enum)]
    pub format: Option<Format>,
    /// Radius for merging roots into one eigenvalue
    #[arg(long, global = true, env = "SPECBALL_ROOT_TOL")]
    pub root_tol: Option<f64>,
    /// Relative pivot threshold for numerical rank
    #[arg(long, global = true, env = "SPECBALL_RANK_TOL")]
    pub rank_tol: Option<f64>,
    /// Half-width of the band classified as boundary
    #[arg(long, global = true, env = "SPECBALL_BOUNDARY_TOL")]
    pub boundary_tol: Option<f64>,
    /// Allowed deviation of a fitted slope from its expected value
    #[arg(long, global = true, env = "SPECBALL_FIT_TOL")]
    pub fit_tol: Option<f64>,
    /// Comma-separated, strictly decreasing radii for exponent fits
    #[arg(long, global = true, env = "SPECBALL_RADII", value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Angles per radius in exponent fits
    #[arg(long, global = true, env = "SPECBALL_ANGLES")]
    pub angles: Option<usize>,
    /// Boundary samples for ball radii and the minimax estimator
    #[arg(long, global = true, env = "SPECBALL_SAMPLES")]
    pub samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan profile, σ image and spectral-ball membership of a matrix
    #[command(after_help = "CSV columns: lambda_re,lambda_im,alg_mult,nilpotence,block_sizes (';'-separated)\n\n\
        A matrix is a JSON file or inline JSON {\"n\": 3, \"entries\": [[re, im], ...]} in row-major order,\n\
        or a Jordan block spec such as \"0:2,0:1;0.8:1\" (eigenvalue:size).")]
    AnalyzeMatrix {
        #[arg(long)]
        matrix: String,
    },
    /// Membership of a point in G_n or of a matrix in the spectral ball
    #[command(after_help = "CSV columns: domain,n,max_modulus,membership\n\n\
        A point is a JSON file, inline JSON {\"n\": 2, \"z\": [[re, im], ...]}, a JSON array of numbers\n\
        or [re, im] pairs, or a comma-separated list of reals such as \"1,-1,-1\".")]
    Membership {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        point: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Contour splitting of the characteristic polynomial and block diagonalization
    #[command(after_help = "CSV columns: j,sigma0_re,sigma0_im (elementary symmetric functions of the enclosed eigenvalues)")]
    Split {
        #[arg(long)]
        matrix: String,
        /// Contour centre, e.g. 0.5 or 0.2-0.1i
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
        /// Contour radius; chosen from the eigenvalue gaps when omitted
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Log-log exponent fit of a quantity along ζX for small ζ
    #[command(after_help = "CSV columns: radius,log_radius,value,fitted (value is the maximum over the angles)\n\n\
        --x is remark (E_{m,1} on the leading block), unity (companion of t^n - 1), gap:<m>\n\
        (seeded direction whose first m symmetric functions vanish) or a matrix.")]
    ExponentFit {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        x: String,
        #[arg(long, value_enum, default_value = "log-rho")]
        quantity: Quantity,
        /// Expected slope, checked against the fit tolerance
        #[arg(long, allow_negative_numbers = true)]
        expect: Option<f64>,
    },
    /// Exponent-gap report at a derogatory pole
    #[command(after_help = "CSV columns: series,radius,log_radius,value,fitted")]
    Theorem2Report {
        #[arg(long)]
        matrix: String,
    },
    /// Closed-form lower and upper metric bounds at the origin of G_n
    #[command(after_help = "CSV columns: n,lower,upper,strict_gap")]
    MetricsTable {
        #[arg(long, default_value_t = 3)]
        nmin: usize,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Sampled minimax estimate of the metric at the origin
    #[command(after_help = "CSV columns: iteration,best (best-so-far objective of the winning restart)")]
    Minimax {
        #[arg(long)]
        n: usize,
        /// Restrict to monomials in z_1, ..., z_{n-1}
        #[arg(long)]
        restricted: bool,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Step constant c in c/√k
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Unit-circle test for p_{n,t}; scans 100 points of the interval when --t is omitted
    #[command(after_help = "CSV columns: t,condition,admissible,on_circle,deviation,mnt")]
    Lalo {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
    },
    /// Scaled metric bounds for large n
    #[command(after_help = "CSV columns: n,upper_scaled,lower_scaled")]
    Asymptotics {
        #[arg(long, default_value_t = 200)]
        nmax: usize,
    },
    /// Seeded points of the Šilov boundary of G_n
    #[command(after_help = "CSV columns: angle_1..angle_n,z_1..z_n (z_k written as re+imi)")]
    ShilovSample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeMatrix { .. } => "analyze-matrix",
            Command::Membership { .. } => "membership",
            Command::Split { .. } => "split",
            Command::ExponentFit { .. } => "exponent-fit",
            Command::Theorem2Report { .. } => "theorem2-report",
            Command::MetricsTable { .. } => "metrics-table",
            Command::Minimax { .. } => "minimax",
            Command::Lalo { .. } => "lalo",
            Command::Asymptotics { .. } => "asymptotics",
            Command::ShilovSample { .. } => "shilov-sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Input,
    Module,
    Io,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Input => "input",
            Kind::Module => "module",
            Kind::Io => "io",
        }
    }

    fn code(self) -> u8 {
        match self {
            Kind::Usage => 2,
            Kind::Input => 3,
            Kind::Module => 4,
            Kind::Io => 5,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    kind: Kind,
    error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: Kind, error: anyhow::Error) -> Self {
        Failure { kind, error }
    }

    pub fn msg(kind: Kind, message: impl std::fmt::Display) -> Self {
        Failure::new(kind, anyhow::anyhow!("{message}"))
    }
}

pub trait ResultExt<T> {
    fn kind(self, kind: Kind) -> Result<T, Failure>;
    fn context_kind(self, kind: Kind, context: &'static str) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ResultExt<T> for Result<T, E> {
    fn kind(self, kind: Kind) -> Result<T, Failure> {
        self.map_err(|e| Failure::new(kind, e.into()))
    }

    fn context_kind(self, kind: Kind, context: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure::new(kind, e.into().context(context)))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = config::resolve(&cli.global).kind(Kind::Usage)?;
    let outcome = match &cli.command {
        Command::AnalyzeMatrix { matrix } => commands::analyze_matrix(matrix, &config),
        Command::Membership { point, matrix } => commands::membership(point.as_deref(), matrix.as_deref(), &config),
        Command::Split { matrix, center, delta } => commands::split(matrix, center, *delta, &config),
        Command::ExponentFit {
            matrix,
            x,
            quantity,
            expect,
        } => commands::exponent_fit_cmd(matrix, x, *quantity, *expect, &config),
        Command::Theorem2Report { matrix } => commands::theorem2(matrix, &config),
        Command::MetricsTable { nmin, nmax } => commands::metrics_table(*nmin, *nmax),
        Command::Minimax {
            n,
            restricted,
            iterations,
            restarts,
            step,
        } => commands::minimax(
            &MinimaxArgs {
                n: *n,
                restricted: *restricted,
                iterations: *iterations,
                restarts: *restarts,
                step: *step,
            },
            &config,
        ),
        Command::Lalo { n, t } => commands::lalo(*n, *t, &config),
        Command::Asymptotics { nmax } => commands::asymptotics(*nmax),
        Command::ShilovSample { n, count } => commands::shilov_sample(*n, *count, &config),
    }?;
    let text = report::render(cli.command.name(), &config, &outcome).kind(Kind::Io)?;
    report::emit(&text, &config).kind(Kind::Io)
}

fn fail(command: Option<&str>, kind: Kind, error: &anyhow::Error) -> ExitCode {
    let chain: Vec<String> = error.chain().map(|e| e.to_string()).collect();
    let object = json!({
        "error": {
            "kind": kind.label(),
            "command": command,
            "message": format!("{error:#}"),
            "chain": chain,
        }
    });
    eprintln!("{object}");
    ExitCode::from(kind.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            return fail(None, Kind::Usage, &anyhow::anyhow!("{}", message.trim_end()));
        }
    };
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(Some(name), f.kind, &f.error),
    }
}

use clap::{Args, Parser, Subcommand};
use mmv2v::analytics::QuadratureSpec;
use mmv2v_cli::config::{load_config, LoadedConfig};
use mmv2v_cli::sweep::{run_sweep, Modes, SweepError, SweepSpec, SweepVariable};
use mmv2v_cli::{emit, sweep};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mmv2v",
    version,
    about = "Delay and reliability of mmWave multi-hop V2V links on a grid road network: \
             closed-form analytics cross-checked by a discrete-vehicle simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a parameter sweep and write `<out>.csv` and `<out>.svg`.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (`key = value` lines, `#` comments). Every key
    /// is optional; built-in urban defaults apply when the flag is absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Variable to sweep: lt, alpha, d_safe, or epsilon.
    #[arg(long)]
    sweep: String,
    /// Comma-separated, strictly increasing sweep values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Evaluation modes, comma-separated subset of {analytic, simulated}.
    #[arg(long, default_value = "analytic,simulated")]
    modes: String,
    /// Output path prefix; the command writes `<prefix>.csv` and
    /// `<prefix>.svg`.
    #[arg(long)]
    out: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweep points and replications (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

enum AppError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Numeric(_) => EXIT_NUMERIC,
            AppError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Numeric(m) | AppError::Io(m) => m,
        }
    }
}

impl From<SweepError> for AppError {
    fn from(e: SweepError) -> Self {
        if e.is_numerical() {
            AppError::Numeric(e.to_string())
        } else {
            AppError::Config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}", e.message());
                ExitCode::from(e.exit_code())
            }
        },
    }
}

fn run(args: RunArgs) -> Result<(), AppError> {
    if args.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build_global()
            .map_err(|e| AppError::Config(format!("worker pool: {e}")))?;
    }

    let LoadedConfig {
        mut scenario,
        explicit,
    } = match &args.config {
        Some(path) => load_config(path).map_err(|e| AppError::Config(e.to_string()))?,
        None => LoadedConfig {
            scenario: Default::default(),
            explicit: BTreeSet::new(),
        },
    };

    let variable: SweepVariable = args.sweep.parse().map_err(AppError::Config)?;
    if explicit.contains(variable.config_key()) {
        return Err(AppError::Config(format!(
            "config file sets `{}`, which is also the sweep variable; remove the key to sweep it",
            variable.config_key()
        )));
    }
    let modes: Modes = args.modes.parse().map_err(AppError::Config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }

    let spec = SweepSpec {
        variable,
        values: args.values,
        base: scenario,
        modes,
        quad: QuadratureSpec::for_sigma(scenario.budget.sigma_db),
    }
    .validated()?;

    let result = run_sweep(&spec)?;

    let csv_path = with_suffix(&args.out, ".csv");
    let svg_path = with_suffix(&args.out, ".svg");
    emit::write_csv(&result, &csv_path).map_err(|e| AppError::Io(e.to_string()))?;
    emit::write_svg(&result, &svg_path).map_err(|e| AppError::Io(e.to_string()))?;
    println!(
        "wrote {} and {} ({} rows, sweep over {})",
        csv_path.display(),
        svg_path.display(),
        result.rows.len(),
        sweep_label(&result)
    );
    Ok(())
}

fn sweep_label(result: &sweep::SweepResult) -> String {
    result.variable.to_string()
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.to_path_buf().into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

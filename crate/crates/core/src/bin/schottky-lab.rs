use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schottky_lab::cliio::{
    kp_residual_field, ops_selftest, read_fixture, run_suite, spectral_bc, Check, CheckConfig, PairSpec, SuiteReport,
    THREADS_ENV,
};
use schottky_lab::theta::{theta_char_detailed, DirectionalJet, HalfCharacteristic, PeriodMatrix, TruncationPolicy};
use schottky_lab::{Error, C64};

#[derive(Parser)]
#[command(name = "schottky-lab", version, about = "Riemann theta functions and the identities they satisfy, checked numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Theta function evaluation.
    #[command(subcommand)]
    Theta(ThetaCommand),
    /// Run one identity check over seeded samples and print one CSV line per case.
    #[command(after_help = check_list())]
    Check(CheckArgs),
    /// Commuting differential operators.
    #[command(subcommand)]
    Spectral(SpectralCommand),
    /// Operator calculus.
    #[command(subcommand)]
    Ops(OpsCommand),
}

#[derive(Subcommand)]
enum ThetaCommand {
    /// Evaluate θ[ε;δ](τ, z) with its truncation radius and error bound.
    Eval(EvalArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Fixture JSON supplying τ.
    #[arg(long, conflicts_with = "tau")]
    fixture: Option<PathBuf>,
    /// Entry of τ as RE,IM; repeat g² times in row-major order.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Vec<C64>,
    /// Argument z, one RE,IM per coordinate.
    #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Vec<C64>,
    /// Characteristic ε, entries 0 or 0.5 separated by commas.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Characteristic δ, entries 0 or 0.5 separated by commas.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct PolicyArgs {
    /// Absolute truncation target of the lattice sums.
    #[arg(long)]
    target_abs_error: Option<f64>,
    /// Largest lattice radius the sums may use.
    #[arg(long)]
    max_radius: Option<u32>,
}

#[derive(Args)]
struct CheckArgs {
    /// Check name; optional when --config names it.
    name: Option<String>,
    /// JSON config with the same keys as the flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Genus of the generated period matrix when no fixture is given.
    #[arg(long)]
    genus: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the default tolerance of every case.
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Emit JSON lines instead of CSV.
    #[arg(long)]
    json: bool,
    /// Write the sampled KP field as CSV (kp-residual only).
    #[arg(long)]
    export_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpectralCommand {
    /// Spectral relation Q(L₁, L₂) = 0 of a commuting pair and its annihilation residual.
    Bc(BcArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PairKind {
    /// ∂², ∂³.
    Constant,
    /// ∂² − 2x⁻², ∂³ − 3x⁻²∂ + 3x⁻³.
    Rational,
    /// ∂² − 2℘ and its order-3 companion.
    Lame,
}

#[derive(Args)]
struct BcArgs {
    #[arg(long, value_enum)]
    pair: PairKind,
    /// Expansion basepoint.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    g2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    g3: f64,
}

#[derive(Subcommand)]
enum OpsCommand {
    /// Associativity, Leibniz rule, dressing, Sato powers and wave recursion checks.
    Selftest {
        #[arg(long)]
        json: bool,
    },
}

fn check_list() -> String {
    let mut s = String::from("Checks:\n");
    for c in Check::ALL {
        s.push_str(&format!("  {:<18} {}\n", c.name(), c.about()));
    }
    s.push_str(&format!("\nExit status: 0 if every case passes, 1 if any fails, 2 on error.\n{THREADS_ENV} caps the worker pool."));
    s
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re = re.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    let im = im.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    Ok(C64::new(re, im))
}

impl PolicyArgs {
    fn apply(&self, base: &mut schottky_lab::cliio::PolicyOverrides) {
        if self.target_abs_error.is_some() {
            base.target_abs_error = self.target_abs_error;
        }
        if self.max_radius.is_some() {
            base.max_radius = self.max_radius;
        }
    }
}

fn emit(report: &SuiteReport, json: bool) -> ExitCode {
    print!("{}", if json { report.to_json_lines() } else { report.to_csv() });
    ExitCode::from(report.exit_code() as u8)
}

fn theta_eval(args: &EvalArgs) -> Result<ExitCode, Error> {
    let tau = match &args.fixture {
        Some(p) => read_fixture(p)?.tau,
        None => {
            let g = (args.tau.len() as f64).sqrt().round() as usize;
            if g == 0 || g * g != args.tau.len() {
                return Err(Error::InvalidArgument(format!("--tau needs g² entries, got {}", args.tau.len())));
            }
            PeriodMatrix::from_flat(g, &args.tau)?
        }
    };
    let g = tau.genus();
    let zeros = vec![0.0; g];
    let eps = if args.eps.is_empty() { &zeros } else { &args.eps };
    let delta = if args.delta.is_empty() { &zeros } else { &args.delta };
    let chi = HalfCharacteristic::new(eps, delta)?;
    let mut o = schottky_lab::cliio::PolicyOverrides::default();
    args.policy.apply(&mut o);
    let policy: TruncationPolicy = o.resolve()?;
    let v = theta_char_detailed(&tau, &args.z, &chi, &DirectionalJet::none(), &policy)?;
    println!("re,im,radius,error_bound");
    println!("{:e},{:e},{},{:e}", v.value.re, v.value.im, v.radius, v.error_bound);
    Ok(ExitCode::SUCCESS)
}

fn check(args: &CheckArgs) -> Result<ExitCode, Error> {
    let mut config = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            CheckConfig::from_json(&text)?
        }
        None => match &args.name {
            Some(n) => CheckConfig::new(n),
            None => return Err(Error::InvalidArgument("a check name or --config is required".into())),
        },
    };
    if let Some(n) = &args.name {
        config.check = n.clone();
    }
    if args.fixture.is_some() {
        config.fixture = args.fixture.clone();
    }
    if let Some(g) = args.genus {
        config.genus = g;
    }
    if let Some(n) = args.samples {
        config.samples = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.tolerance.is_some() {
        config.tolerance = args.tolerance;
    }
    args.policy.apply(&mut config.policy);
    let check = Check::parse(&config.check)?;
    if args.export_csv.is_some() && check != Check::KpResidual {
        return Err(Error::InvalidArgument("--export-csv applies to kp-residual only".into()));
    }
    let report = run_suite(&config)?;
    if let Some(path) = &args.export_csv {
        let field = kp_residual_field(&config)?;
        std::fs::write(path, field.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(emit(&report, args.json))
}

fn spectral(args: &BcArgs) -> Result<ExitCode, Error> {
    let pair = match args.pair {
        PairKind::Constant => PairSpec::Constant,
        PairKind::Rational => PairSpec::Rational { x0: args.x0 },
        PairKind::Lame => PairSpec::Lame { g2: args.g2, g3: args.g3, x0: args.x0 },
    };
    let (q, ann) = spectral_bc(&pair)?;
    println!("relation: {q} = 0");
    println!("annihilation residual: {:e}", ann.residual);
    println!("relative to terms: {:e}", ann.relative);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Theta(ThetaCommand::Eval(a)) => theta_eval(&a),
        Command::Check(a) => check(&a),
        Command::Spectral(SpectralCommand::Bc(a)) => spectral(&a),
        Command::Ops(OpsCommand::Selftest { json }) => Ok(emit(&SuiteReport { reports: ops_selftest()? }, json)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

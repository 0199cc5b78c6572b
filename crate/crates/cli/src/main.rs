use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use supercauchy::algebra::{annihilator, builtin, check_a0, check_a1, parse_algebra, validate_csa, AlgebraSpec, ParsedAlgebra};
use supercauchy::analyticity::Classification;
use supercauchy::experiments::{run, Experiment, Report, RunConfig};
use supercauchy::quadrature::{QuadratureConfig, Scheme};
use supercauchy::scalar::Scalar;
use supercauchy::superspace::{PolyFunction, Superspace};
use supercauchy::Error;

const EXIT_TOLERANCE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "supercauchy", version, about = "Superalgebra kernels and their numerical verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra and report the (A0)/(A1) conditions.
    CheckAlgebra {
        #[command(flatten)]
        source: AlgebraSource,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification experiment.
    Verify(VerifyArgs),
    /// Decide whether a polynomial is qS and print its canonical form.
    Classify {
        /// JSON list of {"exp": [..], "coeff": [..]} terms.
        file: PathBuf,
        #[command(flatten)]
        source: AlgebraSource,
        /// Number of even variables.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Number of odd variables.
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct AlgebraSource {
    /// Builtin algebra: complex, hyperbolic, clifford(k) or example4.
    #[arg(long)]
    builtin: Option<String>,
    /// JSON algebra document.
    #[arg(long)]
    algebra: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Tensor,
    Mc,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = parse_experiment)]
    experiment: Experiment,
    #[command(flatten)]
    source: AlgebraSource,
    /// Boundary node budget.
    #[arg(long)]
    nodes: Option<usize>,
    /// Volume node budget for non-qS corrections.
    #[arg(long)]
    volume_nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest accepted relative error.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Tensor)]
    scheme: SchemeArg,
    /// Ambient dimension for the divergence self-test.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Loaded {
    Exact(AlgebraSpec<supercauchy::scalar::Rational>),
    Float(AlgebraSpec<f64>),
}

fn load(source: &AlgebraSource) -> Result<Loaded, Failure> {
    if let Some(path) = &source.algebra {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        return Ok(match parse_algebra(&text)? {
            ParsedAlgebra::Exact(a) => Loaded::Exact(a),
            ParsedAlgebra::Float(a) => Loaded::Float(a),
        });
    }
    Ok(Loaded::Exact(builtin(source.builtin.as_deref().unwrap_or("complex"))?))
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Failure { code: EXIT_INPUT, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConditionFailed { .. } | Error::MissingA1Data(_) | Error::InvalidA1Witness(_) => EXIT_CONDITION,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print_line(text);
            Ok(())
        }
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn print_line(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn algebra_report<S: Scalar>(alg: &AlgebraSpec<S>) -> Result<(bool, Value), Failure> {
    let csa = validate_csa(alg);
    let a0 = check_a0(alg);
    let a1 = if alg.q() > 0 && alg.a1().is_some() {
        let r = check_a1(alg)?;
        let fmt = |v: &[supercauchy::algebra::Element<S>]| v.iter().map(|e| alg.format_element(e)).collect::<Vec<_>>();
        json!({
            "holds": r.holds,
            "block_sums": fmt(&r.block_sums),
            "relation_residuals": fmt(&r.relation_residuals),
        })
    } else {
        Value::Null
    };
    let ann: Vec<String> = annihilator(alg).iter().map(|e| alg.format_element(e)).collect();
    let checks: Vec<Value> = csa
        .checks
        .iter()
        .map(|c| json!({"property": c.property.to_string(), "passed": c.passed, "witness": c.witness}))
        .collect();
    let report = json!({
        "algebra": alg.name(),
        "p_plus_1": alg.p_plus_1(),
        "q": alg.q(),
        "csa_valid": csa.is_valid(),
        "checks": checks,
        "a0": {"holds": a0.holds, "sum": alg.format_element(&a0.sum)},
        "a1": a1,
        "annihilator": ann,
    });
    eprintln!(
        "{}: CSA {}; (A0) {} (sum {})",
        alg.name(),
        if csa.is_valid() { "valid" } else { "invalid" },
        a0.holds,
        alg.format_element(&a0.sum)
    );
    for c in csa.checks.iter().filter(|c| !c.passed) {
        eprintln!("  {} fails at {:?}", c.property, c.witness.as_deref().unwrap_or(&[]));
    }
    Ok((csa.is_valid(), report))
}

fn check_algebra(source: &AlgebraSource, out: Option<&Path>) -> Result<u8, Failure> {
    let (valid, report) = match load(source)? {
        Loaded::Exact(a) => algebra_report(&a)?,
        Loaded::Float(a) => algebra_report(&a)?,
    };
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"), out)?;
    Ok(if valid { 0 } else { EXIT_TOLERANCE })
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let exp = args.experiment;
    let defaults = QuadratureConfig::default();
    let cfg = RunConfig {
        quadrature: QuadratureConfig {
            scheme: match args.scheme {
                SchemeArg::Tensor => Scheme::Tensor,
                SchemeArg::Mc => Scheme::MonteCarlo,
            },
            nodes: args.nodes.unwrap_or(exp.default_nodes()),
            volume_nodes: args.volume_nodes.unwrap_or(defaults.volume_nodes),
            seed: args.seed,
            tolerance: args.tol.unwrap_or(exp.default_tolerance()),
            ..defaults
        },
        dim: args.dim,
        ..RunConfig::default()
    };
    let report: Report = match load(&args.source)? {
        Loaded::Exact(a) => run(exp, &a, &cfg)?,
        Loaded::Float(a) => run(exp, &a, &cfg)?,
    };
    emit(&report.to_json(), args.out.as_deref())?;
    let tol = cfg.quadrature.tolerance;
    let pass = report.passes(tol);
    eprintln!(
        "{} on {}: rel_err {:.3e} (tol {:.1e}) {}",
        report.experiment,
        report.algebra,
        report.rel_err,
        tol,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { EXIT_TOLERANCE })
}

fn classify_with<S: Scalar>(alg: AlgebraSpec<S>, text: &str, n: usize, m: usize) -> Result<String, Failure> {
    let space = Superspace::new(alg, n, m);
    let f = PolyFunction::from_json(&space, text)?;
    Ok(Classification::of(&f)?.summary(&space))
}

fn classify(file: &Path, source: &AlgebraSource, n: usize, m: usize) -> Result<u8, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let line = match load(source)? {
        Loaded::Exact(a) => classify_with(a, &text, n, m)?,
        Loaded::Float(a) => classify_with(a, &text, n, m)?,
    };
    print_line(&line);
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SUPERCAUCHY_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::input(format!("SUPERCAUCHY_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::CheckAlgebra { source, out } => check_algebra(source, out.as_deref()),
        Command::Verify(args) => verify(args),
        Command::Classify { file, source, n, m } => classify(file, source, *n, *m),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

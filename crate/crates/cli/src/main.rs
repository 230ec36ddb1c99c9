//! `sigma`: command-line front end for sigma-core.
//!
//! Every run prints one JSON document. Complex numbers are given on the
//! command line as `re,im` (or a bare real `re`) and appear in JSON as
//! `[re, im]`. Exit status is 0 on success, 1 for usage and domain errors,
//! 2 for numeric failures.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sigma_core::identity::{duplication_residual, verify_identity, DEFAULT_SEED};
use sigma_core::lattice::sigma_product_oracle;
use sigma_core::modular::{MAX_TERMS, TERM_TOLERANCE};
use sigma_core::{
    classify_with, dedekind_eta, extend_series, invert_j, j_invariant, normalize_lattice,
    pq_of_series, psi, reduce_tau, sigma_eval, theta1_eval, weierstrass_g, ClassifierConfig,
    Complex, Error, Lattice, OddFunctionHandle, TauPoint, TruncatedOddSeries,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "sigma",
    version,
    about = "Theta, eta, j and sigma evaluation, Taylor invariants, identity checks and classification",
    after_help = "Complex arguments are written re,im (for example -0.25,0.9). \
                  JSON input and output use two-element arrays [re, im]. \
                  Series files hold {\"max_degree\": N, \"odd_coefficients\": [[re, im], ...]}; \
                  pass - to read from standard input.\n\
                  Exit status: 0 success, 1 usage or domain error, 2 numeric error."
)]
struct Cli {
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate theta1, eta, g2, g3, j or sigma.
    Eval(EvalArgs),
    /// p, q and mu of an odd series.
    Invariants(SeriesArgs),
    /// Family and parameters of an odd series.
    Classify(ClassifyArgs),
    /// Residual of the four-point identity on seeded random quadruples.
    VerifyIdentity(VerifyIdentityArgs),
    /// Coefficients of a1^3 f(2z) - f^4 (ln f)''' for an odd series.
    VerifyDuplication(SeriesArgs),
    /// Extend a solution of the duplication equation to a higher degree.
    Extend(ExtendArgs),
    /// Reduce tau to the fundamental domain.
    ReduceTau(TauArgs),
    /// Solve j(tau) = value for tau in the fundamental domain.
    InvertJ(InvertJArgs),
    /// psi(n) = (n-1)(n-2)(n-3) + 8 - 2^n.
    Psi(PsiArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum EvalFunction {
    Theta1,
    Eta,
    G2,
    G3,
    J,
    Sigma,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(value_enum)]
    function: EvalFunction,
    /// Argument z (theta1, sigma).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<Complex>,
    /// Modulus tau; for sigma the lattice Z + tau Z.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Option<Complex>,
    /// First lattice generator (sigma).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "omega2")]
    omega1: Option<Complex>,
    /// Second lattice generator (sigma).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "omega1")]
    omega2: Option<Complex>,
    /// Also evaluate the truncated lattice product with this radius (sigma).
    #[arg(long)]
    oracle_radius: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct SeriesArgs {
    /// Series JSON file, or - for standard input.
    series: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ClassifyArgs {
    /// Series JSON file, or - for standard input.
    series: PathBuf,
    /// Relative distance of mu from 49/40 that selects the trigonometric case.
    #[arg(long, default_value_t = ClassifierConfig::default().trig_tolerance)]
    trig_tolerance: f64,
    /// Relative tolerance for coefficients beyond z^7.
    #[arg(long, default_value_t = ClassifierConfig::default().validation_tolerance)]
    validation_tolerance: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum BuiltinFunction {
    Identity,
    Sine,
    Sigma,
    Theta1,
    Series,
}

#[derive(Args, Debug, Serialize)]
struct VerifyIdentityArgs {
    #[arg(long, value_enum, default_value = "sigma")]
    function: BuiltinFunction,
    /// Frequency a of sin(a z).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    a: Complex,
    /// Modulus for sigma (lattice Z + tau Z) and theta1.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,1")]
    tau: Complex,
    /// Series JSON file for --function series.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Points are drawn from the disk of this radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Args, Debug, Serialize)]
struct ExtendArgs {
    /// Series JSON file, or - for standard input.
    series: PathBuf,
    /// Odd target degree.
    #[arg(long)]
    degree: usize,
}

#[derive(Args, Debug, Serialize)]
struct TauArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Complex,
}

#[derive(Args, Debug, Serialize)]
struct InvertJArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    value: Complex,
}

#[derive(Args, Debug, Serialize)]
struct PsiArgs {
    /// Odd n >= 5.
    n: u32,
}

fn parse_complex(s: &str) -> Result<Complex, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    let z = match parts.as_slice() {
        [re] => Complex::new(num(re)?, 0.0),
        [re, im] => Complex::new(num(re)?, num(im)?),
        _ => return Err(format!("expected re,im but got {s:?}")),
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numeric() => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Core(e) => (e.kind(), e.to_string()),
        };
        let mut err = json!({ "kind": kind, "message": message });
        if let Failure::Core(Error::Convergence { trace, .. }) = self {
            err["trace"] = json!(trace);
        }
        json!({ "schema_version": SCHEMA_VERSION, "error": err })
    }
}

type Outcome = Result<Value, Failure>;

fn read_series(path: &Path) -> Result<TruncatedOddSeries, Failure> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        buf
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed series JSON: {e}")))
}

fn tau_point(tau: Option<Complex>) -> Result<TauPoint, Failure> {
    let t = tau.ok_or_else(|| Failure::Usage("--tau is required".into()))?;
    Ok(TauPoint::new(t)?)
}

fn z_arg(z: Option<Complex>) -> Result<Complex, Failure> {
    z.ok_or_else(|| Failure::Usage("--z is required".into()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn lattice_json(lat: &Lattice) -> Value {
    json!({
        "rho": lat.rho,
        "tau": lat.tau.value(),
        "map": lat.map,
        "orientation_flipped": lat.orientation_flipped,
    })
}

fn run_eval(args: &EvalArgs) -> Outcome {
    let value = match args.function {
        EvalFunction::Theta1 => {
            json!({ "value": theta1_eval(z_arg(args.z)?, tau_point(args.tau)?)? })
        }
        EvalFunction::Eta => json!({ "value": dedekind_eta(tau_point(args.tau)?)? }),
        EvalFunction::G2 => json!({ "value": weierstrass_g(tau_point(args.tau)?)?.0 }),
        EvalFunction::G3 => json!({ "value": weierstrass_g(tau_point(args.tau)?)?.1 }),
        EvalFunction::J => json!({ "value": j_invariant(tau_point(args.tau)?)? }),
        EvalFunction::Sigma => {
            let z = z_arg(args.z)?;
            let lat = match (args.omega1, args.omega2, args.tau) {
                (Some(w1), Some(w2), None) => normalize_lattice(w1, w2)?,
                (None, None, Some(_)) => Lattice::from_tau(tau_point(args.tau)?),
                _ => {
                    return Err(Failure::Usage(
                        "sigma needs either --tau or both --omega1 and --omega2".into(),
                    ))
                }
            };
            let mut out = json!({ "value": sigma_eval(z, &lat)?, "lattice": lattice_json(&lat) });
            if let Some(r) = args.oracle_radius {
                out["product_oracle"] = json!(sigma_product_oracle(z, &lat, r)?);
            }
            out
        }
    };
    Ok(value)
}

fn run_verify_identity(args: &VerifyIdentityArgs) -> Outcome {
    let handle = match args.function {
        BuiltinFunction::Identity => OddFunctionHandle::identity(),
        BuiltinFunction::Sine => OddFunctionHandle::sine(args.a),
        BuiltinFunction::Sigma => {
            OddFunctionHandle::sigma(&Lattice::from_tau(TauPoint::new(args.tau)?))?
        }
        BuiltinFunction::Theta1 => OddFunctionHandle::theta1(TauPoint::new(args.tau)?),
        BuiltinFunction::Series => {
            let path = args
                .series
                .as_ref()
                .ok_or_else(|| Failure::Usage("--function series needs --series".into()))?;
            OddFunctionHandle::series(read_series(path)?)
        }
    };
    if !(args.radius > 0.0 && args.radius.is_finite()) {
        return Err(Failure::Usage(format!(
            "radius must be positive, got {}",
            args.radius
        )));
    }
    Ok(to_value(&verify_identity(
        &handle,
        args.samples,
        args.seed,
        args.radius,
    )?))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Invariants(a) => Ok(to_value(&pq_of_series(&read_series(&a.series)?)?)),
        Command::Classify(a) => {
            for (name, t) in [
                ("trig-tolerance", a.trig_tolerance),
                ("validation-tolerance", a.validation_tolerance),
            ] {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Failure::Usage(format!(
                        "--{name} must be positive, got {t}"
                    )));
                }
            }
            let cfg = ClassifierConfig {
                trig_tolerance: a.trig_tolerance,
                validation_tolerance: a.validation_tolerance,
            };
            Ok(to_value(&classify_with(&read_series(&a.series)?, &cfg)?))
        }
        Command::VerifyIdentity(a) => run_verify_identity(a),
        Command::VerifyDuplication(a) => {
            let r = duplication_residual(&read_series(&a.series)?)?;
            let worst = r
                .odd_coefficients()
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            Ok(json!({ "residual": r, "max_abs_coefficient": worst }))
        }
        Command::Extend(a) => {
            Ok(json!({ "series": extend_series(&read_series(&a.series)?, a.degree)? }))
        }
        Command::ReduceTau(a) => {
            let (t, map) = reduce_tau(TauPoint::new(a.tau)?);
            Ok(json!({ "tau": t.value(), "map": map }))
        }
        Command::InvertJ(a) => {
            let t = invert_j(a.value)?;
            Ok(json!({ "tau": t.value(), "j": j_invariant(t)? }))
        }
        Command::Psi(a) => Ok(json!({ "psi": psi(a.n)? })),
    }
}

fn command_parts(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Eval(a) => ("eval", to_value(a)),
        Command::Invariants(a) => ("invariants", to_value(a)),
        Command::Classify(a) => ("classify", to_value(a)),
        Command::VerifyIdentity(a) => ("verify-identity", to_value(a)),
        Command::VerifyDuplication(a) => ("verify-duplication", to_value(a)),
        Command::Extend(a) => ("extend", to_value(a)),
        Command::ReduceTau(a) => ("reduce-tau", to_value(a)),
        Command::InvertJ(a) => ("invert-j", to_value(a)),
        Command::Psi(a) => ("psi", to_value(a)),
    }
}

fn document(cli: &Cli, body: Value) -> Value {
    let (name, mut config) = command_parts(&cli.command);
    config["term_tolerance"] = json!(TERM_TOLERANCE);
    config["max_terms"] = json!(MAX_TERMS);
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(name));
    doc.insert("config".into(), config);
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    Value::Object(doc)
}

fn emit(doc: &Value, output: Option<&Path>) -> io::Result<()> {
    let mut text = serde_json::to_string(doc).expect("JSON values serialize");
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Usage(e.to_string().trim_end().to_string());
            let _ = emit(&f.to_json(), None);
            return ExitCode::from(f.exit_code());
        }
    };
    let (doc, code) = match run(&cli) {
        Ok(body) => (document(&cli, body), 0),
        Err(f) => (f.to_json(), f.exit_code()),
    };
    let target = if code == 0 {
        cli.output.as_deref()
    } else {
        None
    };
    if let Err(e) = emit(&doc, target) {
        eprintln!("sigma: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

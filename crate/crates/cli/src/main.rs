use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use orbitcal::decider::{self, DecideOptions, Decision, DecisionProblem, Verdict};
use orbitcal::degbound::{self, ReductiveJson};
use orbitcal::elim::{self, ElimOptions, Saturation, SubspaceJson, SubspaceMap};
use orbitcal::repmodel::{self, ModuleVector, RepJson, RepresentationData};
use orbitcal::torusoracle;
use orbitcal::Error;

const EXIT_NOT_IN_CLOSURE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;
const EXIT_INCONSISTENT_DATA: u8 = 5;
const EXIT_DISAGREEMENT: u8 = 6;
const EXIT_INTERNAL: u8 = 7;

#[derive(Parser)]
#[command(name = "orbitcal", version, about = "Exact orbit-closure membership for linear group actions")]
struct Cli {
    /// Seed for basis scrambling and Jacobian sample points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Print transcripts to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate representation data as rep.json.
    #[command(subcommand)]
    Gen(GenKind),
    /// Decide whether G·a lies in the closure of G·b.
    Decide(DecideArgs),
    /// Equations of the closure of G·b or G·L.
    Closure(ClosureArgs),
    /// Degree formulas and bounds.
    #[command(subcommand)]
    Degree(DegreeKind),
    /// Independent closure oracles.
    #[command(subcommand)]
    Oracle(OracleKind),
    /// Run every applicable oracle and compare verdicts.
    Crosscheck(DecideArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// SL2 acting on binary forms of degree h.
    Sl2 {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagonal torus with weights such as "1;2" or "1,0;0,1".
    Torus {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct DecideArgs {
    #[arg(long)]
    rep: PathBuf,
    /// Comma-separated rational coordinates, e.g. "1,-1/2,0".
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long)]
    degree_bound: Option<u64>,
    /// Adjoin scalar multiplications so the orbit of b is conic.
    #[arg(long)]
    conify: bool,
    /// Treat the orbit of b as conic without modifying the problem.
    #[arg(long)]
    assume_conic: bool,
    /// Compute the orbit dimension symbolically.
    #[arg(long)]
    exact_dimension: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosureArgs {
    #[arg(long)]
    rep: PathBuf,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "subspace", required_unless_present = "subspace")]
    point: Option<String>,
    /// SubspaceMap file: {"l": .., "images": [poly, ..]} in y1..yl.
    #[arg(long)]
    subspace: Option<PathBuf>,
    /// Saturate with the product of all denominators instead of x1⋯xr.
    #[arg(long)]
    denominator_saturation: bool,
}

#[derive(Subcommand)]
enum DegreeKind {
    /// deg ρ(SL2) on binary forms of degree h.
    Sl2 {
        #[arg(long)]
        h: u64,
    },
    /// Kazarnovskii's formula from reductive data in JSON.
    Kazarnovskii {
        #[arg(long)]
        data: PathBuf,
    },
    /// |Gv|·deg G·v for a binary form with root multiplicities, divided by |Gv|.
    BinaryOrbit {
        #[arg(long)]
        h: u64,
        #[arg(long)]
        mults: String,
        #[arg(long, default_value_t = 1)]
        stab: u64,
    },
    /// Coarse universal bound from the matrix entries.
    Parametric {
        #[arg(long)]
        rep: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleKind {
    /// Face criterion for diagonal torus actions.
    Torus {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Precondition(_) => EXIT_PRECONDITION,
            Error::Oversized(_) | Error::ResourceAbort(_) => EXIT_TOO_LARGE,
            Error::InconsistentData(_) => EXIT_INCONSISTENT_DATA,
            Error::Certificate(_) => EXIT_INTERNAL,
            _ => EXIT_BAD_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn bad_input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_BAD_INPUT,
        message: message.into(),
    }
}

type CliResult = std::result::Result<u8, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| bad_input(format!("cannot read {}: {e}", path.display())))
}

fn load_rep(path: &Path) -> std::result::Result<RepresentationData, Failure> {
    let json: RepJson = serde_json::from_str(&read(path)?)
        .map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    Ok(RepresentationData::from_json(&json)?)
}

/// Writes a line to stdout, tolerating a closed pipe.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    match out {
        Some(p) => fs::write(p, text + "\n")
            .map_err(|e| bad_input(format!("cannot write {}: {e}", p.display()))),
        None => {
            say(&text);
            Ok(())
        }
    }
}

fn max_nnz() -> std::result::Result<usize, Failure> {
    match std::env::var("ORBITCAL_MAX_NNZ") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| bad_input(format!("ORBITCAL_MAX_NNZ must be a count, got {v:?}"))),
        Err(_) => Ok(decider::DEFAULT_MAX_NNZ),
    }
}

fn problem_from(args: &DecideArgs) -> std::result::Result<DecisionProblem, Failure> {
    let rep = load_rep(&args.rep)?;
    let a = ModuleVector::parse(&args.a)?;
    let b = ModuleVector::parse(&args.b)?;
    let mut problem = if args.conify {
        DecisionProblem::conified(&rep, &a, &b)?
    } else {
        DecisionProblem::new(rep, a, b)
    };
    problem.conic_asserted = args.assume_conic;
    problem.degree_bound_override = args.degree_bound;
    Ok(problem)
}

fn verdict_code(v: Verdict) -> u8 {
    if v.in_closure() {
        0
    } else {
        EXIT_NOT_IN_CLOSURE
    }
}

fn run_decider(cli: &Cli, problem: &DecisionProblem, exact: bool) -> std::result::Result<Decision, Failure> {
    let opts = DecideOptions {
        seed: cli.seed,
        max_nnz: max_nnz()?,
        exact_orbit_dimension: exact,
    };
    let (decision, _) = decider::decide(problem, &opts)?;
    if cli.verbose {
        let t = &decision.transcript;
        let degree = match (t.degree_bound, &t.degree_source) {
            (Some(d), Some(src)) => format!("{d} ({})", format!("{src:?}").to_lowercase()),
            _ => "unused".into(),
        };
        eprintln!(
            "n = {}, dim G·b = {}, d = {degree}, |M| = {}, c-variables = {}, nonzeros = {}",
            t.module_dimension, t.orbit_dimension, t.monomials, t.cvars, t.nonzeros
        );
        for note in &t.notes {
            eprintln!("note: {note}");
        }
    }
    Ok(decision)
}

fn cmd_gen(kind: &GenKind) -> CliResult {
    let (rep, out) = match kind {
        GenKind::Sl2 { h, out } => (repmodel::sl2_binary_forms(*h)?, out),
        GenKind::Torus { weights, out } => {
            (repmodel::torus_diagonal(&torusoracle::parse_weights(weights)?)?, out)
        }
    };
    emit(&rep.to_json(), out.as_deref())?;
    Ok(0)
}

fn cmd_decide(cli: &Cli, args: &DecideArgs) -> CliResult {
    let problem = problem_from(args)?;
    let decision = run_decider(cli, &problem, args.exact_dimension)?;
    emit(&decision, args.out.as_deref())?;
    Ok(verdict_code(decision.verdict))
}

fn cmd_closure(args: &ClosureArgs) -> CliResult {
    let rep = load_rep(&args.rep)?;
    let tau = match (&args.point, &args.subspace) {
        (Some(p), _) => {
            let b = ModuleVector::parse(p)?;
            if b.len() != rep.n {
                return Err(bad_input(format!("point has {} coordinates, module has dimension {}", b.len(), rep.n)));
            }
            SubspaceMap::point(&b)
        }
        (None, Some(path)) => {
            let json: SubspaceJson = serde_json::from_str(&read(path)?)
                .map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
            SubspaceMap::parse(&json)?
        }
        (None, None) => return Err(bad_input("give --point or --subspace")),
    };
    let opts = ElimOptions {
        saturation: if args.denominator_saturation {
            Saturation::Denominators
        } else {
            Saturation::Variables
        },
        ..ElimOptions::default()
    };
    let qs = elim::closure_equations(&rep, &tau, &opts)?;
    emit(&qs.to_strings(), None)?;
    Ok(0)
}

fn cmd_degree(kind: &DegreeKind) -> CliResult {
    let value = match kind {
        DegreeKind::Sl2 { h } => degbound::kazarnovskii_sl2(*h)?.to_string(),
        DegreeKind::Kazarnovskii { data } => {
            let json: ReductiveJson = serde_json::from_str(&read(data)?)
                .map_err(|e| bad_input(format!("{}: {e}", data.display())))?;
            degbound::kazarnovskii(&json.into_data()?)?.to_string()
        }
        DegreeKind::BinaryOrbit { h, mults, stab } => {
            let mults = mults
                .split(',')
                .map(|m| m.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad_input(format!("bad multiplicities {mults:?}")))?;
            degbound::binary_form_orbit_degree(*h, &mults, *stab)?.to_string()
        }
        DegreeKind::Parametric { rep } => degbound::parametric_degree_bound(&load_rep(rep)?)?.to_string(),
    };
    say(&value);
    Ok(0)
}

fn cmd_oracle(kind: &OracleKind) -> CliResult {
    let OracleKind::Torus { weights, a, b } = kind;
    let weights = torusoracle::parse_weights(weights)?;
    let inside = torusoracle::torus_decide(
        &weights,
        &ModuleVector::parse(a)?,
        &ModuleVector::parse(b)?,
    )?;
    say(if inside { "IN_CLOSURE" } else { "NOT_IN_CLOSURE" });
    Ok(if inside { 0 } else { EXIT_NOT_IN_CLOSURE })
}

#[derive(Serialize)]
struct CrosscheckReport {
    decider: Verdict,
    groebner: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    torus: Option<bool>,
    agree: bool,
}

fn cmd_crosscheck(cli: &Cli, args: &DecideArgs) -> CliResult {
    let problem = problem_from(args)?;
    let decision = run_decider(cli, &problem, args.exact_dimension)?;
    let qs = elim::orbit_closure_equations(&problem.rep, &problem.b, &ElimOptions::default())?;
    let groebner = elim::point_in_closure(&qs, &problem.a)?;
    let torus = match problem.rep.torus_weights() {
        Some(w) => Some(torusoracle::torus_decide(&w, &problem.a, &problem.b)?),
        None => None,
    };
    let verdict = decision.verdict.in_closure();
    let agree = verdict == groebner && torus.is_none_or(|t| t == groebner);
    let report = CrosscheckReport {
        decider: decision.verdict,
        groebner,
        torus,
        agree,
    };
    let show = |b: bool| if b { "IN_CLOSURE" } else { "NOT_IN_CLOSURE" };
    let decided = serde_json::to_value(decision.verdict).expect("verdict serializes");
    say(&format!("{:<10} {}", "decider", decided.as_str().unwrap_or_default()));
    say(&format!("{:<10} {}", "groebner", show(groebner)));
    if let Some(t) = torus {
        say(&format!("{:<10} {}", "torus", show(t)));
    }
    say(&format!("{:<10} {}", "result", if agree { "agree" } else { "DISAGREE" }));
    if let Some(out) = &args.out {
        emit(&report, Some(out))?;
    }
    if agree {
        return Ok(0);
    }
    eprintln!("decision transcript:");
    eprintln!("{}", serde_json::to_string_pretty(&decision).unwrap());
    eprintln!("closure equations: {:?}", qs.to_strings());
    Ok(EXIT_DISAGREEMENT)
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Gen(kind) => cmd_gen(kind),
        Command::Decide(args) => cmd_decide(cli, args),
        Command::Closure(args) => cmd_closure(args),
        Command::Degree(kind) => cmd_degree(kind),
        Command::Oracle(kind) => cmd_oracle(kind),
        Command::Crosscheck(args) => cmd_crosscheck(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! Batch front-end for the logarithmic-matrix toolkit.
//!
//! One subcommand per computation: `build-h` (symbolic matrices), `eval`
//! (evaluation at the level-n character point), `minors`, `key-sum`,
//! `certify`, `weierstrass` (mu/lambda and the evaluation-valuation
//! identity), and `gl2` (construct Frobenius data from local factors).
//!
//! Exit codes: 0 success/certified, 2 indeterminate, 3 invariant falsified,
//! 4 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use logmat_core::config::{
    self, canonical_json, load_coleman, load_frobenius, InputDoc, DEFAULT_PRECISION,
};
use logmat_core::criterion::{
    self, certify_all_large_n, dominance_certificate, key_sum, key_sum_with_terms, ColemanFamily,
    Gl2Block, Verdict, VerdictKind,
};
use logmat_core::error::{ArithError, ConfigError};
use logmat_core::iwasawa::weierstrass_valuation_check;
use logmat_core::logmat::{assemble_hn, assemble_hn_at_epsilon, minor_at, FrobeniusData};
use logmat_core::padic::PadicNumber;
use logmat_core::report::{
    BuildHDoc, CertifyDoc, CertifyRowDoc, CycloDoc, EvalDoc, KeySumDoc, KeySumRowDoc,
    MinorEntryDoc, MinorsDoc, MinorsRowDoc, TextRender, WeierstrassCheckDoc, WeierstrassDoc,
    WeierstrassFamilyDoc,
};

#[derive(Parser)]
#[command(
    name = "logmat",
    version,
    about = "Exact p-adic logarithmic matrices and rank-boundedness certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct CommonArgs {
    /// Input configuration (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the working precision of the configuration
    #[arg(long)]
    precision: Option<u32>,
    /// Smallest level n
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    /// Largest level n
    #[arg(long, default_value_t = 4)]
    n_max: u32,
    /// Override the seed of a synthetic Coleman family
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct Gl2Args {
    /// The odd prime p
    #[arg(long)]
    p: u64,
    /// Local factor "a,b,f" (repeatable); a needs valuation >= 1, b a unit
    #[arg(long = "block")]
    blocks: Vec<String>,
    /// Single-factor shorthand: a
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Single-factor shorthand: b
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Single-factor shorthand: f
    #[arg(long, default_value_t = 1)]
    f: u32,
    /// Label of the prime above p
    #[arg(long, default_value = "v")]
    label: String,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the symbolic matrices H_{v,n} for each requested n
    BuildH(CommonArgs),
    /// Evaluate H_{v,n} at eps_n for each requested n
    Eval(CommonArgs),
    /// Exact valuations of the (I_0, J)-minors of H_n(eps_n) over all J
    Minors(CommonArgs),
    /// The non-vanishing sum of minors times Coleman determinants, per n
    KeySum(CommonArgs),
    /// Per-n verdicts plus the effective all-large-n certificate
    Certify(CommonArgs),
    /// mu/lambda invariants and the evaluation-valuation identity
    Weierstrass(CommonArgs),
    /// Construct GL2-type Frobenius data from local factors
    Gl2(Gl2Args),
}

/// Exit discipline shared by every command.
enum CliError {
    Config(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 4,
            CliError::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Invariant(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match &e {
            ConfigError::Arith(ArithError::InvariantFalsified(_)) => {
                CliError::Invariant(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::InvariantFalsified(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::BuildH(args) => cmd_build_h(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Minors(args) => cmd_minors(args),
        Command::KeySum(args) => cmd_key_sum(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Weierstrass(args) => cmd_weierstrass(args),
        Command::Gl2(args) => cmd_gl2(args),
    }
}

struct Loaded {
    doc: InputDoc,
    data: FrobeniusData,
}

fn load(args: &CommonArgs) -> Result<Loaded, CliError> {
    if args.n_min < 1 || args.n_min > args.n_max {
        return Err(CliError::Config(format!(
            "empty n-range: n-min = {} n-max = {}",
            args.n_min, args.n_max
        )));
    }
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.input.display())))?;
    let mut doc = InputDoc::from_json(&text)?;
    if let Some(precision) = args.precision {
        doc.precision = precision;
    }
    if let Some(seed) = args.seed {
        if let Some(coleman) = doc.coleman.as_mut() {
            if let Some(synthetic) = coleman.synthetic.as_mut() {
                synthetic.seed = seed;
            }
        }
    }
    let data = load_frobenius(&doc)?;
    Ok(Loaded { doc, data })
}

fn coleman_of(loaded: &Loaded) -> Result<ColemanFamily, CliError> {
    Ok(load_coleman(&loaded.doc, &loaded.data)?)
}

fn emit(args: &CommonArgs, json: String, text: String) -> Result<(), CliError> {
    let body = match args.format {
        Format::Json => json,
        Format::Text => text,
    };
    match &args.output {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

fn cmd_build_h(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let mut matrices = Vec::new();
    for n in args.n_min..=args.n_max {
        matrices.push((n, assemble_hn(&loaded.data, n)?));
    }
    let doc = BuildHDoc::new(loaded.data.prime(), loaded.data.precision(), matrices);
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(0)
}

fn cmd_eval(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let mut matrices = Vec::new();
    for n in args.n_min..=args.n_max {
        matrices.push((n, assemble_hn_at_epsilon(&loaded.data, n)?));
    }
    let doc = EvalDoc::new(loaded.data.prime(), loaded.data.precision(), matrices);
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(0)
}

fn cmd_minors(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let data = &loaded.data;
    let i0 = criterion::i0_tuple(data);
    let tuples = criterion::enumerate_index_tuples(data);
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        let hn = assemble_hn_at_epsilon(data, n)?;
        let minors = tuples
            .iter()
            .map(|j| {
                let m = minor_at(&hn, &i0, j)?;
                Ok(MinorEntryDoc {
                    tuple: j.clone(),
                    valuation: m.valuation().to_string(),
                    value: CycloDoc::from_element(&m),
                })
            })
            .collect::<Result<Vec<_>, ArithError>>()?;
        rows.push(MinorsRowDoc {
            n,
            row_tuple: i0.clone(),
            minors,
        });
    }
    let doc = MinorsDoc {
        command: "minors".into(),
        p: data.prime(),
        precision: data.precision(),
        rows,
    };
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(0)
}

fn cmd_key_sum(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let data = &loaded.data;
    let coleman = coleman_of(&loaded)?;
    let mut rows = Vec::new();
    let mut any_indeterminate = false;
    for n in args.n_min..=args.n_max {
        let (sum, terms, verdict) = key_sum_with_terms(data, &coleman, n)?;
        any_indeterminate |= verdict.kind == VerdictKind::Indeterminate;
        rows.push(KeySumRowDoc {
            n,
            sum: CycloDoc::from_element(&sum),
            terms,
            verdict,
        });
    }
    let (provenance, missing_tuples) = logmat_core::report::family_summary(&coleman);
    let doc = KeySumDoc {
        command: "key-sum".into(),
        p: data.prime(),
        precision: data.precision(),
        provenance,
        missing_tuples,
        rows,
    };
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(if any_indeterminate { 2 } else { 0 })
}

/// `certified` when the effective threshold exists. When the shape admits a
/// certificate (every block anti-diagonal, possibly mod p) but a hypothesis
/// failed, the run is `indeterminate` with the failure named. For general
/// shapes no threshold claim is attempted and the per-level verdicts stand
/// on their own: `partially-verified` when all of them are nonzero.
fn overall_status(
    certificate: &Verdict,
    rows: &[CertifyRowDoc],
    special_shape: bool,
) -> &'static str {
    if certificate.kind == VerdictKind::CertifiedForAllLargeN {
        "certified"
    } else if !special_shape
        && !rows.is_empty()
        && rows
            .iter()
            .all(|r| r.key_sum.kind == VerdictKind::NonzeroAtN)
    {
        "partially-verified"
    } else {
        "indeterminate"
    }
}

fn cmd_certify(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let data = &loaded.data;
    let coleman = coleman_of(&loaded)?;
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        let (_, direct) = key_sum(data, &coleman, n)?;
        let dominance = dominance_certificate(data, &coleman, n)?;
        rows.push(CertifyRowDoc {
            n,
            key_sum: direct,
            dominance,
        });
    }
    let certificate = certify_all_large_n(data, &coleman)?;
    let special_shape = (0..data.blocks().len())
        .all(|v| criterion::classify_frobenius(data, v) != criterion::FrobeniusClass::General);
    let overall = overall_status(&certificate, &rows, special_shape).to_string();
    let (provenance, missing_tuples) = logmat_core::report::family_summary(&coleman);
    let doc = CertifyDoc {
        command: "certify".into(),
        p: data.prime(),
        precision: data.precision(),
        provenance,
        missing_tuples,
        rows,
        certificate,
        overall,
    };
    let code = match doc.overall.as_str() {
        "certified" | "partially-verified" => 0,
        _ => 2,
    };
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(code)
}

fn cmd_weierstrass(args: CommonArgs) -> Result<u8, CliError> {
    let loaded = load(&args)?;
    let data = &loaded.data;
    let coleman = coleman_of(&loaded)?;
    let mut families = Vec::new();
    for (tuple, col) in coleman.entries() {
        if col.is_exactly_zero() {
            continue;
        }
        let inv = col.newton_invariants()?;
        let mut checks = Vec::new();
        for n in args.n_min..=args.n_max {
            match weierstrass_valuation_check(col, n) {
                Ok(r) => checks.push(WeierstrassCheckDoc {
                    n,
                    observed: Some(r.observed.to_string()),
                    predicted: Some(r.predicted.to_string()),
                    matches: Some(r.matches),
                    note: None,
                }),
                Err(e) => checks.push(WeierstrassCheckDoc {
                    n,
                    observed: None,
                    predicted: None,
                    matches: None,
                    note: Some(e.to_string()),
                }),
            }
        }
        families.push(WeierstrassFamilyDoc {
            tuple: tuple.clone(),
            mu: inv.mu,
            lambda: inv.lambda,
            certified: inv.certified,
            checks,
        });
    }
    let (provenance, _) = logmat_core::report::family_summary(&coleman);
    let doc = WeierstrassDoc {
        command: "weierstrass".into(),
        p: data.prime(),
        precision: data.precision(),
        provenance,
        families,
    };
    emit(&args, canonical_json(&doc), doc.to_text())?;
    Ok(0)
}

fn parse_gl2_scalar(p: u64, s: &str, precision: u32, what: &str) -> Result<PadicNumber, CliError> {
    let n = BigInt::from_str(s.trim())
        .map_err(|_| CliError::Config(format!("{what}: `{s}` is not a decimal integer")))?;
    Ok(PadicNumber::from_bigint(p, &n, precision)?)
}

fn cmd_gl2(args: Gl2Args) -> Result<u8, CliError> {
    let mut factors = Vec::new();
    for raw in &args.blocks {
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "--block `{raw}` must be of the form a,b,f"
            )));
        }
        let a = parse_gl2_scalar(args.p, parts[0], args.precision, "a")?;
        let b = parse_gl2_scalar(args.p, parts[1], args.precision, "b")?;
        let f: u32 = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--block `{raw}`: bad f")))?;
        factors.push(Gl2Block { a, b, f });
    }
    if factors.is_empty() {
        let (Some(a), Some(b)) = (&args.a, &args.b) else {
            return Err(CliError::Config(
                "give at least one --block a,b,f (or --a and --b)".into(),
            ));
        };
        factors.push(Gl2Block {
            a: parse_gl2_scalar(args.p, a, args.precision, "--a")?,
            b: parse_gl2_scalar(args.p, b, args.precision, "--b")?,
            f: args.f,
        });
    }
    let data = criterion::gl2_frobenius_data(args.p, args.precision, &args.label, &factors)?;
    let doc = config::frobenius_to_doc(&data);
    let body = canonical_json(&doc);
    match &args.output {
        None => print!("{body}"),
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
    }
    Ok(0)
}

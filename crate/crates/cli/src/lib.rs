//! Argument handling for the `mdzv` binary, kept in a library so tests can
//! drive it without spawning processes.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mdzv::eval::{self, EvalReport, Value};
use mdzv::formulas::{self, MdzvVariant, Notation};
use mdzv::shuffle::shuffle_product;
use mdzv::{Combination, EvalContext, FieldSpec, PairingStructure, Precision, RefinedTerm, TruncationSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "mdzv", version, about = "Shuffle expansions of refined multiple Dedekind zeta values")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// double or extended (200-bit)
    #[arg(long, global = true, default_value = "double")]
    pub precision: Precision,
    /// comma: ζ^ρ(a,b,c,d); semicolon: ζ^ρ(a,b;c,d)
    #[arg(long, global = true, default_value = "comma")]
    pub notation: Notation,
    /// Add the ray Re = 0, Im > 0 to the truncation set
    #[arg(long, global = true)]
    pub include_boundary: bool,
    /// Worker threads for summation
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Keep every shuffle term instead of collecting cosets
    #[arg(long, global = true)]
    pub raw: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self shuffle of ζ_K(n)
    Selfie {
        #[arg(long)]
        weight: u32,
    },
    /// Self shuffle of a weight-3 two-variable MDZV
    SelfieMdzv {
        /// (1)(1) or (12)(1)
        #[arg(long)]
        variant: MdzvVariant,
    },
    /// Shuffle product of two depth-one refined terms
    Shuffle {
        /// e.g. "(1):2,2"
        #[arg(long)]
        left: RefinedTerm,
        #[arg(long)]
        right: RefinedTerm,
    },
    /// Full expansion of ζ_K(n1)·ζ_K(n2)
    Product {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
    },
    /// Truncated sum of one refined term
    Eval {
        #[arg(long)]
        term: RefinedTerm,
        #[command(flatten)]
        region: Region,
    },
    /// Sum both sides of a named identity and compare
    Verify {
        #[arg(long)]
        identity: String,
        #[command(flatten)]
        region: Region,
        /// Relative tolerance; defaults to 1e-10 (double) or 1e-30 (extended)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare an expansion with its hand-derived reference
    Diff {
        #[arg(long)]
        identity: String,
    },
    /// Names accepted by verify and diff
    List,
}

#[derive(Debug, clap::Args)]
pub struct Region {
    /// Squarefree negative discriminant d of Q(√d)
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub field: i64,
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs one invocation; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let result = pool.install(|| dispatch(&cli, &mut o, &mut e));
                let _ = out.write_all(&o).and_then(|_| err.write_all(&e));
                result
            }
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_FAIL,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let simplify = !cli.raw;
    match &cli.command {
        Command::Selfie { weight } => {
            let c = formulas::self_shuffle_zeta_with(*weight, simplify)?;
            emit(cli, out, &c, &PairingStructure::standard(2)?)
        }
        Command::SelfieMdzv { variant } => {
            emit(cli, out, &formulas::self_shuffle_mdzv(*variant, simplify)?, &MdzvVariant::pairing())
        }
        Command::Shuffle { left, right } => {
            if left.k() != 2 || right.k() != 2 {
                return Err(Failure::Usage("shuffle takes two depth-one terms like \"(1):2,2\"".into()));
            }
            let pairing = PairingStructure::standard(4)?;
            emit(cli, out, &shuffle_product(left, right, &pairing, simplify)?, &pairing)
        }
        Command::Product { n1, n2 } => {
            if cli.raw {
                return Err(Failure::Usage("product is only available collected".into()));
            }
            emit(cli, out, &formulas::product_zeta(*n1, *n2)?, &PairingStructure::standard(4)?)
        }
        Command::Eval { term, region } => {
            let ctx = context(cli, region, PairingStructure::standard(term.k())?)?;
            if let Some(w) = eval::convergence_warning(term) {
                writeln!(err, "warning: {w}")?;
            }
            let value = eval::evaluate(&Combination::single(term.clone(), 1), &ctx)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", value_json(term, &ctx, &value))?,
                _ => writeln!(out, "{value}")?,
            }
            Ok(())
        }
        Command::Verify { identity, region, tol } => {
            let tol = tol.unwrap_or(cli.precision.default_tolerance());
            if tol.is_nan() || tol <= 0.0 {
                return Err(Failure::Usage(format!("tolerance must be positive, got {tol}")));
            }
            let id = formulas::identity(identity)?;
            let ctx = context(cli, region, id.pairing.clone())?;
            let report = eval::verify(&id, &ctx, tol)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", report_json(&report))?,
                _ => writeln!(out, "{report}")?,
            }
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Diff { identity } => {
            for (form, report) in formulas::diff_identity(identity)? {
                writeln!(out, "{identity} ({form})")?;
                write!(out, "{report}")?;
            }
            Ok(())
        }
        Command::List => {
            for name in formulas::catalog_names() {
                writeln!(out, "{name}")?;
            }
            Ok(())
        }
    }
}

fn context(cli: &Cli, region: &Region, pairing: PairingStructure) -> Result<EvalContext, Failure> {
    let field = FieldSpec::new(region.field)?;
    let set = TruncationSet::new(field, region.radius, cli.include_boundary)?;
    Ok(EvalContext::new(set, pairing).with_precision(cli.precision))
}

fn emit(cli: &Cli, out: &mut dyn Write, c: &Combination, pairing: &PairingStructure) -> Result<(), Failure> {
    match cli.format {
        Format::Text => writeln!(out, "{c}")?,
        Format::Latex => writeln!(out, "{}", formulas::to_latex(c, cli.notation))?,
        Format::Json => writeln!(out, "{}", formulas::to_json(c, pairing))?,
    }
    Ok(())
}

fn value_json(term: &RefinedTerm, ctx: &EvalContext, v: &Value) -> serde_json::Value {
    json!({
        "term": term.to_string(),
        "field": ctx.field().d(),
        "radius": ctx.truncation.radius(),
        "points": ctx.truncation.len(),
        "precision": ctx.precision.to_string(),
        "re": v.re_text,
        "im": v.im_text,
    })
}

fn report_json(r: &EvalReport) -> serde_json::Value {
    json!({
        "identity": r.identity,
        "field": r.field.d(),
        "radius": r.radius,
        "points": r.points,
        "precision": r.precision.to_string(),
        "lhs": [r.lhs.re_text, r.lhs.im_text],
        "rhs": [r.rhs.re_text, r.rhs.im_text],
        "terms": r.terms,
        "abs_err": r.abs_err,
        "rel_err": r.rel_err,
        "tol": r.tol,
        "passed": r.passed,
    })
}

/// The diff report for one form, as printed by `diff`.
pub fn diff_text(identity: &str) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    match run(["mdzv", "diff", "--identity", identity], &mut out, &mut err) {
        EXIT_OK => Ok(String::from_utf8_lossy(&out).into_owned()),
        _ => Err(String::from_utf8_lossy(&err).into_owned()),
    }
}

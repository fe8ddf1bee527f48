//! `ekl`: EKL degrees of polynomial maps, quotient maps of invariant rings,
//! Weyl-group coset counts and Grothendieck-Witt classification.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ekl_core::ekl::{ekl_degree_with, EklError, EklOptions, MapSpecFile};
use ekl_core::gw::{classify, GramForm, GwError};
use ekl_core::localg::LocalgError;
use ekl_core::poly::PolyError;
use ekl_core::quotmap::{
    build_d_odd_partial, build_sn_full, build_type_a_partial, build_type_bc_full, build_type_d_full, QuotientSpec,
    QuotmapError,
};
use ekl_core::scalar::{Field, PrimeField, Rationals};
use ekl_core::weyl::{
    ap_report, enumeration_budget, is_central_longest, longest_element, CartanType, ParabolicSpec, RootSystem,
    WeylError,
};

use report::{DegreeReport, GramReport, QuotientReport};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_AT_ORIGIN: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

/// A failed command: exit code and a one-line diagnosis.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<EklError> for Failure {
    fn from(e: EklError) -> Self {
        let code = match &e {
            EklError::Poly(_) | EklError::NotSquare { .. } | EklError::RingMismatch => EXIT_PARSE,
            EklError::NotSupportedAtOrigin
            | EklError::ConstantTerm { .. }
            | EklError::Localg(LocalgError::Infinite { .. } | LocalgError::UnitIdeal) => EXIT_NOT_AT_ORIGIN,
            EklError::Degenerate | EklError::Gw(GwError::Degenerate) => EXIT_DEGENERATE,
            _ => EXIT_OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GwError> for Failure {
    fn from(e: GwError) -> Self {
        let code = match &e {
            GwError::Json(_) | GwError::Ragged { .. } | GwError::NotSymmetric { .. } | GwError::Scalar(_) => EXIT_PARSE,
            GwError::Degenerate => EXIT_DEGENERATE,
            _ => EXIT_OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<QuotmapError> for Failure {
    fn from(e: QuotmapError) -> Self {
        match e {
            QuotmapError::Ekl(e) => e.into(),
            QuotmapError::Poly(e) => Failure::new(EXIT_OTHER, e.to_string()),
            QuotmapError::Unsupported(_) => Failure::new(EXIT_OTHER, e.to_string()),
        }
    }
}

impl From<WeylError> for Failure {
    fn from(e: WeylError) -> Self {
        Failure::new(EXIT_OTHER, e.to_string())
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "ekl", version, about = "EKL degrees, quotient maps, Weyl coset counts and GW classes")]
struct Cli {
    /// Worker threads for Gram entries and coset loops; 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// EKL degree of the map in a JSON file {"variables": [...], "components": [...]}.
    Degree {
        file: PathBuf,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = Format::Named)]
        format: Format,
    },
    /// Builds a quotient map, computes its degree and compares with the prediction.
    Quotient(QuotientArgs),
    /// Weyl group computations.
    Weyl {
        #[command(subcommand)]
        command: WeylCommand,
    },
    /// Grothendieck-Witt computations.
    Gw {
        #[command(subcommand)]
        command: GwCommand,
    },
}

#[derive(Subcommand, Debug)]
enum WeylCommand {
    /// Coset count a_P for a parabolic subgroup.
    Ap {
        #[arg(long = "type")]
        cartan_type: String,
        /// Nodes of the parabolic, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "remove", required_unless_present = "remove")]
        keep: Option<Vec<usize>>,
        /// Nodes left out of the parabolic, comma separated.
        #[arg(long, value_delimiter = ',')]
        remove: Option<Vec<usize>>,
        #[arg(long)]
        json: bool,
    },
    /// Group order, Cartan matrix and longest element of a type.
    Info {
        #[arg(long = "type")]
        cartan_type: String,
    },
}

#[derive(Subcommand, Debug)]
enum GwCommand {
    /// Classifies a symmetric matrix given as a JSON array of rows.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = GramFormat::Report)]
        format: GramFormat,
    },
}

#[derive(Args, Debug, Clone)]
struct FieldArg {
    /// `q` for the rationals or `fp:<p>` for a prime field.
    #[arg(long = "field", default_value = "q")]
    field: String,
}

#[derive(Clone, Copy, Debug)]
enum FieldChoice {
    Q,
    Fp(u64),
}

impl FieldArg {
    fn choice(&self) -> Result<FieldChoice, Failure> {
        let s = self.field.trim().to_ascii_lowercase();
        if s == "q" {
            return Ok(FieldChoice::Q);
        }
        let bad = || Failure::new(EXIT_PARSE, format!("bad --field {:?}: expected q or fp:<prime>", self.field));
        let p: u64 = s.strip_prefix("fp:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        PrimeField::new(p).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
        Ok(FieldChoice::Fp(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Named,
    Diag,
    Invariants,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GramFormat {
    Report,
    Named,
    Diag,
    Invariants,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    A,
    B,
    C,
    D,
    Sn,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    #[arg(long = "type", value_enum, ignore_case = true)]
    family: Family,
    /// Block sizes of the Young subgroup (type A), comma separated.
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
    /// Number of ambient variables (types B, C, D and Sn).
    #[arg(long)]
    rank: Option<usize>,
    /// Parabolic of type D: `D<rank-1>` for odd rank. Omit for the full quotient.
    #[arg(long)]
    parabolic: Option<String>,
    #[command(flatten)]
    field: FieldArg,
    /// Print the map as JSON instead of computing its degree.
    #[arg(long)]
    emit_map: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    let parallel = cli.threads > 1;
    let result = match cli.command {
        Command::Degree { file, field, format } => degree(&file, &field, format, parallel),
        Command::Quotient(args) => quotient(&args, parallel),
        Command::Weyl { command: WeylCommand::Ap { cartan_type, keep, remove, json } } => {
            weyl_ap(&cartan_type, keep, remove, json, parallel)
        }
        Command::Weyl { command: WeylCommand::Info { cartan_type } } => weyl_info(&cartan_type),
        Command::Gw { command: GwCommand::Classify { file, field, format } } => gw_classify(&file, &field, format),
    };
    match result {
        Ok(out) => {
            // a closed pipe on stdout is not an error of the computation
            let _ = writeln!(io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_OTHER, format!("cannot read {}: {e}", path.display())))
}

fn degree(path: &Path, field: &FieldArg, format: Format, parallel: bool) -> Result<String, Failure> {
    let file: MapSpecFile = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("bad map file {}: {e}", path.display())))?;
    match field.choice()? {
        FieldChoice::Q => degree_over(Rationals, &file, format, parallel),
        FieldChoice::Fp(p) => degree_over(PrimeField::new(p).expect("checked"), &file, format, parallel),
    }
}

fn degree_over<F: Field>(field: F, file: &MapSpecFile, format: Format, parallel: bool) -> Result<String, Failure> {
    let map = file.to_map(field)?;
    let start = Instant::now();
    let result = ekl_degree_with(&map, &EklOptions { parallel, ..Default::default() })?;
    eprintln!("computed in {:.2?}", start.elapsed());
    let c = &result.gw_class;
    Ok(match format {
        Format::Named => c.to_string(),
        Format::Diag => c.diagonal_string(),
        Format::Invariants => c.invariants_string(),
        Format::Json => to_json(&DegreeReport::new(&map, &result))?,
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))
}

fn build_quotient<F: Field>(field: &F, args: &QuotientArgs) -> Result<QuotientSpec<F>, Failure> {
    let need_rank = || {
        args.rank.ok_or_else(|| Failure::new(EXIT_OTHER, format!("--rank is required for type {:?}", args.family)))
    };
    let unexpected = |flag: &str| Failure::new(EXIT_OTHER, format!("{flag} does not apply to type {:?}", args.family));
    if args.family != Family::A && args.blocks.is_some() {
        return Err(unexpected("--blocks"));
    }
    if args.family != Family::D && args.parabolic.is_some() {
        return Err(unexpected("--parabolic"));
    }
    Ok(match args.family {
        Family::A => {
            if args.rank.is_some() {
                return Err(unexpected("--rank"));
            }
            let blocks = args.blocks.as_ref().ok_or_else(|| Failure::new(EXIT_OTHER, "--blocks is required for type A"))?;
            build_type_a_partial(field, blocks)?
        }
        Family::Sn => build_sn_full(field, need_rank()?)?,
        Family::B | Family::C => build_type_bc_full(field, need_rank()?)?,
        Family::D => {
            let n = need_rank()?;
            match &args.parabolic {
                None => build_type_d_full(field, n)?,
                Some(p) => {
                    let want = format!("D{}", n.saturating_sub(1));
                    if n % 2 == 0 || !p.trim().eq_ignore_ascii_case(&want) {
                        return Err(Failure::new(
                            EXIT_OTHER,
                            format!("unsupported parabolic {p:?} for D{n}: only D(2m) inside D(2m+1) is built"),
                        ));
                    }
                    build_d_odd_partial(field, n / 2)?
                }
            }
        }
    })
}

fn quotient(args: &QuotientArgs, parallel: bool) -> Result<String, Failure> {
    match args.field.choice()? {
        FieldChoice::Q => quotient_over(Rationals, args, parallel),
        FieldChoice::Fp(p) => quotient_over(PrimeField::new(p).expect("checked"), args, parallel),
    }
}

fn quotient_over<F: Field>(field: F, args: &QuotientArgs, parallel: bool) -> Result<String, Failure> {
    let spec = build_quotient(&field, args)?;
    if args.emit_map {
        return to_json(&spec.to_file());
    }
    let start = Instant::now();
    let result = ekl_degree_with(spec.map(), &EklOptions { parallel, ..Default::default() })?;
    eprintln!("computed in {:.2?}", start.elapsed());
    let report = QuotientReport::new(&spec, &result);
    if args.json {
        to_json(&report)
    } else {
        Ok(report.to_string())
    }
}

fn parse_type(s: &str) -> Result<CartanType, Failure> {
    s.parse::<CartanType>().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

fn weyl_ap(
    t: &str,
    keep: Option<Vec<usize>>,
    remove: Option<Vec<usize>>,
    json: bool,
    parallel: bool,
) -> Result<String, Failure> {
    let t = parse_type(t)?;
    let p = match (keep, remove) {
        (Some(k), _) => ParabolicSpec::keep(t.rank, k)?,
        (None, Some(r)) => ParabolicSpec::remove(t.rank, r)?,
        (None, None) => return Err(Failure::new(EXIT_PARSE, "one of --keep or --remove is required")),
    };
    let rs = RootSystem::new(t)?;
    let report = ap_report(&rs, &p, enumeration_budget(), parallel)?;
    if json {
        to_json(&report)
    } else {
        Ok(report.to_string())
    }
}

fn weyl_info(t: &str) -> Result<String, Failure> {
    let t = parse_type(t)?;
    let rs = RootSystem::new(t)?;
    let w0 = longest_element(&rs);
    let mut lines = vec![
        format!("type: {t}"),
        format!("rank: {}", t.rank),
        format!("|W|: {}", rs.group_order()),
        format!("positive roots: {}", rs.num_positive()),
        format!("longest element length: {}", w0.length()),
        format!("longest element central: {}", if is_central_longest(&rs) { "yes" } else { "no" }),
        "cartan matrix:".to_string(),
    ];
    for row in rs.cartan_matrix() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
        lines.push(format!("  {}", cells.join(" ")));
    }
    Ok(lines.join("\n"))
}

fn gw_classify(path: &Path, field: &FieldArg, format: GramFormat) -> Result<String, Failure> {
    let text = read(path)?;
    match field.choice()? {
        FieldChoice::Q => gw_classify_over(Rationals, &text, format),
        FieldChoice::Fp(p) => gw_classify_over(PrimeField::new(p).expect("checked"), &text, format),
    }
}

fn gw_classify_over<F: Field>(field: F, text: &str, format: GramFormat) -> Result<String, Failure> {
    let g = GramForm::from_json(field, text)?;
    let c = classify(&g)?;
    Ok(match format {
        GramFormat::Report => GramReport::new(&c).to_string(),
        GramFormat::Named => c.to_string(),
        GramFormat::Diag => c.diagonal_string(),
        GramFormat::Invariants => c.invariants_string(),
        GramFormat::Json => to_json(&GramReport::new(&c))?,
    })
}

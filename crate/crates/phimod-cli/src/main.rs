//! `phimod`: classify rank-4 filtered φ-modules, compute their monodromy,
//! scan the moduli plane, list Weil polynomials and run the verification suites.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phimod::classify::{canonical_class, type_of_class, CanonicalClass};
use phimod::module::{build_family, validate_geometric_params, FamilyParams, FilteredPhiModule, ModuleRecord};
use phimod::monodromy::{family_c, family_monodromy};
use phimod::scan::{scan, ScanConfig, ScanRow};
use phimod::verify::{run_suite, Suite, VerifyConfig};
use phimod::weil::enumerate_ss_weil_deg4;
use phimod::{Error, Execution, PrimeContext, Scalar};
use serde_json::json;

const MAX_HEIGHT: i64 = 50;

#[derive(Parser)]
#[command(name = "phimod", version, about = "Exact classification of rank-4 filtered phi-modules of supersingular type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the five supersingular Weil polynomials of degree 4.
    Weil {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Canonical class, c-invariant and Wintenberger type of a module.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// JSON module record to classify instead of a family member.
        #[arg(long, conflicts_with_all = ["family", "params"])]
        module_file: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Monodromy group type of a family member.
    Monodromy {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Classify every moduli-plane point of bounded height.
    Scan {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        epsilon: i8,
        #[arg(long, default_value_t = 3)]
        height: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, default_value_t = 7)]
    prime: u64,
    /// Order m of the adjoined root of unity: 1, 3 or 4.
    #[arg(long, default_value_t = 1)]
    cyclotomic: u32,
    /// Initial p-adic precision of the embedding.
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    epsilon: i8,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Comma-separated parameters: ε′ (prod, iso), a′ (nu), a,b (mu).
    /// Scalars may use z for the root of unity, e.g. `-7z,1`.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Prod,
    Iso,
    Nu,
    Mu,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Weil,
    Classify,
    Monodromy,
    Git,
    Lattice,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Weil => Suite::Weil,
            SuiteArg::Classify => Suite::Classify,
            SuiteArg::Monodromy => Suite::Monodromy,
            SuiteArg::Git => Suite::Git,
            SuiteArg::Lattice => Suite::Lattice,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Failure of a subcommand, carrying its exit code.
enum Failure {
    Usage(String),
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(Error::PrecisionExhausted { .. }) => 3,
            Failure::Lib(_) => 1,
            Failure::Verification(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Verification(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn precision_cap() -> std::result::Result<Option<u32>, Failure> {
    match std::env::var("PHIMOD_NMAX") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure::Usage(format!("PHIMOD_NMAX must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn context(p: u64, m: u32, precision: Option<u32>) -> std::result::Result<PrimeContext, Failure> {
    let ctx = match precision {
        Some(n) => PrimeContext::with_precision(p, m, n)?,
        None => PrimeContext::new(p, m)?,
    };
    Ok(match precision_cap()? {
        Some(cap) => ctx.with_cap(cap),
        None => ctx,
    })
}

fn parse_sign(s: &str, what: &str) -> std::result::Result<i8, Failure> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(Failure::Usage(format!("{what} must be 1 or -1, got {other:?}"))),
    }
}

fn family_params(args: &FamilyArgs, ctx: &PrimeContext) -> std::result::Result<FamilyParams, Failure> {
    let family = args.family.ok_or_else(|| Failure::Usage("--family is required".into()))?;
    if !(-1..=1).contains(&args.epsilon) {
        return Err(Failure::Usage("--epsilon must be -1, 0 or 1".into()));
    }
    let raw = args.params.as_deref().ok_or_else(|| Failure::Usage("--params is required".into()))?;
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let want = if matches!(family, FamilyArg::Mu) { 2 } else { 1 };
    if parts.len() != want {
        return Err(Failure::Usage(format!("expected {want} parameter(s), got {raw:?}")));
    }
    let scalar = |s: &str| Scalar::parse(s, ctx.field()).map_err(|e| Failure::Usage(e.to_string()));
    let eps = args.epsilon;
    Ok(match family {
        FamilyArg::Prod => FamilyParams::Prod { eps_prime: parse_sign(parts[0], "eps'")? },
        FamilyArg::Iso => FamilyParams::Iso { eps, eps_prime: parse_sign(parts[0], "eps'")? },
        FamilyArg::Nu => FamilyParams::Nu { eps, a_prime: scalar(parts[0])? },
        FamilyArg::Mu => FamilyParams::Mu { eps, a: scalar(parts[0])?, b: scalar(parts[1])? },
    })
}

fn emit(out: &mut impl Write, line: &str) {
    // A closed pipe ends the output, nothing more to report.
    let _ = writeln!(out, "{line}");
}

fn cmd_weil(prime: u64, format: Format) -> CmdResult {
    let list = enumerate_ss_weil_deg4(prime)?;
    let mut out = std::io::stdout().lock();
    if format == Format::Tsv {
        emit(&mut out, "label\tpolynomial");
    }
    for w in list {
        match format {
            Format::Tsv => emit(&mut out, &format!("{}\t{}", w.label, w)),
            Format::Json => {
                let coeffs: Vec<String> = w.coefficients.iter().map(|c| c.to_string()).collect();
                emit(&mut out, &json!({"p": w.p, "label": w.label.to_string(), "coefficients": coeffs, "polynomial": w.to_string()}).to_string());
            }
        }
    }
    Ok(())
}

fn print_class(d: &FilteredPhiModule, family: Option<(&FamilyParams, bool)>, format: Format) -> CmdResult {
    let ctx = d.ctx();
    let p = ctx.p_scalar();
    let class = canonical_class(d)?;
    let wtype = type_of_class(&class, ctx)?;
    let c = match &class {
        CanonicalClass::Prod { .. } => None,
        other => other.c_value(&p),
    };
    let c_text = c.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "-".into());
    let mut out = std::io::stdout().lock();
    match format {
        Format::Tsv => {
            emit(&mut out, "class\tc\ttype\tfamily\tgeometric");
            let (fam, geo) = match family {
                Some((f, g)) => (f.to_string(), g.to_string()),
                None => ("-".into(), "-".into()),
            };
            emit(&mut out, &format!("{class}\t{c_text}\t{wtype}\t{fam}\t{geo}"));
        }
        Format::Json => {
            let c_json = c.as_ref().map(|c| match c.finite() {
                Some(x) => json!(x.to_record()),
                None => json!("inf"),
            });
            let v = json!({
                "class": class.to_record(&p),
                "c": c_json,
                "wintenberger": wtype,
                "family": family.map(|(f, _)| f.to_string()),
                "geometric": family.map(|(_, g)| g),
            });
            emit(&mut out, &v.to_string());
        }
    }
    Ok(())
}

fn cmd_classify(field: &FieldArgs, family: &FamilyArgs, module_file: Option<&std::path::Path>, format: Format) -> CmdResult {
    if let Some(path) = module_file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let rec: ModuleRecord = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed module record: {e}")))?;
        let ctx = context(rec.p, rec.m, Some(rec.n))?;
        let d = FilteredPhiModule::from_record_in(&rec, ctx)?;
        return print_class(&d, None, format);
    }
    let ctx = context(field.prime, field.cyclotomic, field.precision)?;
    let params = family_params(family, &ctx)?;
    let geometric = validate_geometric_params(&params, &ctx)?;
    let d = build_family(&params, &ctx)?;
    print_class(&d, Some((&params, geometric)), format)
}

fn cmd_monodromy(field: &FieldArgs, family: &FamilyArgs, format: Format) -> CmdResult {
    let ctx = context(field.prime, field.cyclotomic, field.precision)?;
    let params = family_params(family, &ctx)?;
    if !validate_geometric_params(&params, &ctx)? {
        return Err(Failure::Usage(format!("{params} is not geometric")));
    }
    let report = family_monodromy(&params, &ctx, Execution::default())?;
    let g = report.group;
    let c = family_c(&params, &ctx.p_scalar()).map(|c| c.to_string()).unwrap_or_else(|_| "-".into());
    let mut out = std::io::stdout().lock();
    match format {
        Format::Tsv => {
            emit(&mut out, "family\tc\ttype\tdim\tsolvable\tsemisimple");
            emit(&mut out, &format!("{params}\t{c}\t{}\t{}\t{}\t{}", g.kind, g.dim, g.solvable, report.semisimple));
        }
        Format::Json => {
            emit(&mut out, &json!({"family": params.to_string(), "type": g.kind, "dim": g.dim, "solvable": g.solvable, "semisimple": report.semisimple}).to_string());
        }
    }
    Ok(())
}

fn cmd_scan(field: &FieldArgs, eps: i8, height: i64, seed: u64, format: Format) -> CmdResult {
    if !(1..=MAX_HEIGHT).contains(&height) {
        return Err(Failure::Usage(format!("--height must lie in 1..={MAX_HEIGHT}")));
    }
    if !(-1..=1).contains(&eps) {
        return Err(Failure::Usage("--epsilon must be -1, 0 or 1".into()));
    }
    let ctx = context(field.prime, field.cyclotomic, field.precision)?;
    let report = scan(&ctx, &ScanConfig { eps, height, seed }, Execution::default())?;
    let mut out = std::io::stdout().lock();
    match format {
        Format::Tsv => {
            emit(&mut out, ScanRow::tsv_header());
            for row in &report.rows {
                emit(&mut out, &row.to_tsv());
            }
            let s = &report.summary;
            emit(&mut out, &format!("# rows\t{}\tinconsistent\t{}", s.rows, s.inconsistent));
            for (kind, n) in &s.groups {
                emit(&mut out, &format!("# group\t{kind}\t{n}"));
            }
            for (class, n) in &s.classes {
                emit(&mut out, &format!("# class\t{class}\t{n}"));
            }
            for (t, n) in &s.types {
                emit(&mut out, &format!("# type\t{t}\t{n}"));
            }
        }
        Format::Json => {
            for row in &report.rows {
                emit(&mut out, &serde_json::to_string(&row.to_record()).expect("scan records serialize"));
            }
            emit(&mut out, &json!({"summary": report.summary}).to_string());
        }
    }
    if report.summary.inconsistent > 0 {
        let first = report.rows.iter().find(|r| !r.consistent).map(|r| format!("{}: {:?}", r.point, r.issues)).unwrap_or_default();
        return Err(Failure::Verification(format!("{} inconsistent rows; first {first}", report.summary.inconsistent)));
    }
    Ok(())
}

fn cmd_verify(suite: Suite, seed: Option<u64>, format: Format) -> CmdResult {
    let mut cfg = VerifyConfig::default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut failed = 0usize;
    let results = run_suite(suite, &cfg, Execution::default(), |n, r| {
        let mut out = std::io::stdout().lock();
        if !r.passed() {
            failed += 1;
        }
        match format {
            Format::Tsv => {
                emit(
                    &mut out,
                    &format!("{n}\t{}\t{}\t{} cases\t{} failures\t{:.2}s", r.name, if r.passed() { "PASS" } else { "FAIL" }, r.cases, r.failures.len(), r.elapsed.as_secs_f64()),
                );
                for f in r.failures.iter().take(5) {
                    emit(&mut out, &format!("#\t{f}"));
                }
            }
            Format::Json => emit(&mut out, &json!({"criterion": n, "passed": r.passed(), "report": r}).to_string()),
        }
    });
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Weil { prime, format } => cmd_weil(prime, format),
        Command::Classify { field, family, module_file, format } => cmd_classify(&field, &family, module_file.as_deref(), format),
        Command::Monodromy { field, family, format } => cmd_monodromy(&field, &family, format),
        Command::Scan { field, epsilon, height, seed, format } => cmd_scan(&field, epsilon, height, seed, format),
        Command::Verify { suite, seed, format } => cmd_verify(suite.into(), seed, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

//! `cubecocycle`: generate complexes, validate them, run the verification
//! suite, scan operator norms and print coefficient tables.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! usage or input errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cubecocycle::complex::ValidationOptions;
use cubecocycle::families::{build_unvalidated, generate, Budget, Family, FamilySpec};
use cubecocycle::verify::scan::{coefficient_table, interval_audit, norm_scan};
use cubecocycle::verify::{run_checks, validate_complex, Check, CheckRecord, Report, VerifyConfig, ZGrid, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "cubecocycle", version, about = "Cube complexes and the rotation cocycle c_z")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the cube complex axioms, the CAT(0) condition and two-sided hyperplanes.
    Validate(Common),
    /// Run the verification suite on a family.
    Verify(VerifyArgs),
    /// Measured norms of c_z(x,y) against the bounds, one row per pair and z.
    NormScan(ScanArgs),
    /// Symbolic coefficients of c_z(x,y) with their predicted monomials.
    Coefficients(CoefficientArgs),
    /// Write a family as a complex file.
    Generate(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Family spec such as `grid(3,3)`, `tree:2:3` or `product(tree(2,2),segment(3))`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    family: Option<FamilySpec>,
    /// Complex file `{"n_vertices": n, "cubes": [[...], ...]}`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = Budget::default().max_vertices)]
    max_vertices: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Pairs per sweep before sampling.
    #[arg(long)]
    max_pairs: Option<usize>,
    #[arg(long)]
    z_grid: Option<ZGrid>,
    /// Comma-separated check ids; all checks when absent.
    #[arg(long)]
    checks: Option<String>,
    /// Also write the interval-ball audit as CSV.
    #[arg(long)]
    audit_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 200)]
    max_pairs: usize,
    #[arg(long, default_value_t = ZGrid::default())]
    z_grid: ZGrid,
}

#[derive(Args, Debug)]
struct CoefficientArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    x: usize,
    #[arg(long)]
    y: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

/// What was asked for, echoed into every report.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: &'static str,
    family: String,
    seed: u64,
    format: Format,
    jobs: usize,
    max_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<VerifyConfig>,
}

impl RunConfig {
    fn new(command: &'static str, c: &Common) -> Result<Self> {
        if c.max_vertices == 0 {
            bail!("--max-vertices must be positive");
        }
        Ok(Self {
            command,
            family: spec(c)?.to_string(),
            seed: c.seed,
            format: c.format,
            jobs: rayon::current_num_threads(),
            max_vertices: c.max_vertices,
            z_grid: None,
            max_pairs: None,
            verify: None,
        })
    }
}

fn spec(c: &Common) -> Result<FamilySpec> {
    match (&c.family, &c.input) {
        (Some(f), _) => Ok(f.clone()),
        (None, Some(p)) => Ok(FamilySpec::FromJson(p.clone())),
        (None, None) => bail!("one of --family or --input is required"),
    }
}

fn budget(c: &Common) -> Budget {
    Budget {
        max_vertices: c.max_vertices,
        ..Budget::default()
    }
}

fn family(c: &Common) -> Result<Family> {
    let s = spec(c)?;
    generate(&s, &budget(c)).with_context(|| format!("building {s}"))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn write_csv<T: Serialize>(out: &Option<PathBuf>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RecordRow<'a> {
    check: &'a str,
    instance: &'a str,
    status: cubecocycle::verify::Status,
    instances: u64,
    failures: u64,
    sampled: bool,
    anchor: &'a str,
}

fn emit_report(c: &Common, report: &Report) -> Result<bool> {
    match c.format {
        Format::Json => write_json(&c.out, report)?,
        Format::Csv => {
            let rows: Vec<RecordRow> = report
                .records
                .iter()
                .map(|r| RecordRow {
                    check: &r.check,
                    instance: &r.instance,
                    status: r.status,
                    instances: r.instances,
                    failures: r.failures,
                    sampled: r.sample.is_some(),
                    anchor: &r.anchor,
                })
                .collect();
            write_csv(&c.out, &rows)?;
        }
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} passed, {} failed, {} skipped{}",
        report.command,
        s.passed,
        s.failed,
        s.skipped,
        if s.partial { " (some checks sampled)" } else { "" }
    );
    for r in report.records.iter().filter(|r| !r.passed()) {
        eprintln!("FAIL {} on {}: {}", r.check, r.instance, r.witness.clone().unwrap_or(Value::Null));
    }
    Ok(report.all_passed())
}

fn cmd_validate(c: &Common) -> Result<bool> {
    let cfg = RunConfig::new("validate", c)?;
    let s = spec(c)?;
    let (complex, load, _) = build_unvalidated(&s, &budget(c)).with_context(|| format!("reading {s}"))?;
    let options = ValidationOptions {
        seed: c.seed,
        ..ValidationOptions::default()
    };
    let records = validate_complex(&s, complex, load, &options);
    emit_report(c, &Report::new("validate", serde_json::to_value(&cfg)?, records))
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let c = &a.common;
    let mut run = RunConfig::new("verify", c)?;
    let mut cfg = VerifyConfig {
        seed: c.seed,
        ..VerifyConfig::default()
    };
    if let Some(m) = a.max_pairs {
        if m == 0 {
            bail!("--max-pairs must be positive");
        }
        cfg.max_pairs = m;
    }
    if let Some(z) = a.z_grid {
        cfg.z_grid = z;
    }
    let checks = match &a.checks {
        Some(list) => Check::parse_list(list)?,
        None => Check::ALL.to_vec(),
    };
    let f = family(c)?;
    let records: Vec<CheckRecord> = run_checks(&f, &checks, &cfg);
    if let Some(path) = &a.audit_csv {
        let (rows, _) = interval_audit(&f, cfg.max_pairs, cfg.seed)?;
        write_csv(&Some(path.clone()), &rows)?;
    }
    run.z_grid = Some(cfg.z_grid.to_string());
    run.max_pairs = Some(cfg.max_pairs);
    run.verify = Some(cfg);
    emit_report(c, &Report::new("verify", serde_json::to_value(&run)?, records))
}

fn cmd_norm_scan(a: &ScanArgs) -> Result<bool> {
    let c = &a.common;
    if a.max_pairs == 0 {
        bail!("--max-pairs must be positive");
    }
    let mut run = RunConfig::new("norm-scan", c)?;
    run.z_grid = Some(a.z_grid.to_string());
    run.max_pairs = Some(a.max_pairs);
    let f = family(c)?;
    let defaults = VerifyConfig::default();
    let scan = norm_scan(&f, &a.z_grid, a.max_pairs, c.seed, &defaults.power, defaults.norm_tolerance)?;
    let failed = scan.rows.iter().filter(|r| !r.pass).count();
    match c.format {
        Format::Csv => write_csv(&c.out, &scan.rows)?,
        Format::Json => write_json(
            &c.out,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "config": run,
                "sample": scan.sample,
                "rows": scan.rows,
            }),
        )?,
    }
    eprintln!("norm-scan: {} rows, {} over bound", scan.rows.len(), failed);
    Ok(failed == 0)
}

fn cmd_coefficients(a: &CoefficientArgs) -> Result<bool> {
    let c = &a.common;
    let run = RunConfig::new("coefficients", c)?;
    let f = family(c)?;
    let n = f.space.n_vertices();
    if a.x >= n || a.y >= n {
        bail!("vertices must be below {n}");
    }
    let table = coefficient_table(&f, a.x, a.y)?;
    match c.format {
        Format::Json => write_json(
            &c.out,
            &json!({ "schema_version": SCHEMA_VERSION, "config": run, "table": table }),
        )?,
        Format::Csv => write_csv(&c.out, &table.entries.iter().map(CsvCoefficient::from).collect::<Vec<_>>())?,
    }
    Ok(table.all_agree)
}

#[derive(Serialize)]
struct CsvCoefficient {
    a: usize,
    b: usize,
    polynomial: String,
    sign: Option<i8>,
    k: Option<u32>,
    ell: Option<u32>,
    agrees: bool,
}

impl From<&cubecocycle::verify::scan::CoefficientRow> for CsvCoefficient {
    fn from(r: &cubecocycle::verify::scan::CoefficientRow) -> Self {
        Self {
            a: r.a,
            b: r.b,
            polynomial: r.polynomial.clone(),
            sign: r.sign,
            k: r.k,
            ell: r.ell,
            agrees: r.agrees,
        }
    }
}

fn cmd_generate(c: &Common) -> Result<bool> {
    if c.format == Format::Csv {
        bail!("generate writes JSON only");
    }
    let f = family(c)?;
    write_json(&c.out, &f.complex().to_file_maximal())?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match &cli.command {
        Command::Validate(c) => cmd_validate(c),
        Command::Verify(a) => cmd_verify(a),
        Command::NormScan(a) => cmd_norm_scan(a),
        Command::Coefficients(a) => cmd_coefficients(a),
        Command::Generate(c) => cmd_generate(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

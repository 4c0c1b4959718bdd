//! Command-line front end: single computations, grid sweeps, verification suites, and
//! machine-readable output.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::h1::{self, BetaFactorization, H1Error};
use crate::linalg::AbelianGroup;
use crate::ot::{ActionSpec, OtError, QuarticFieldData};
use crate::verify::{run_suites, VerifyOptions};
use crate::wall::{duality_complete, homology_of_x, homology_range, Fault, WallError, TOP_DEGREE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    H1(H1Error),
    #[error(transparent)]
    Wall(WallError),
    #[error("bad record: {0}")]
    Record(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<H1Error> for CliError {
    fn from(e: H1Error) -> Self {
        match e {
            H1Error::PeriodNotFound { .. } => CliError::Invariant(e.to_string()),
            H1Error::Ot(inner) => CliError::Ot(inner),
            other => CliError::H1(other),
        }
    }
}

impl From<WallError> for CliError {
    fn from(e: WallError) -> Self {
        match e {
            WallError::NotAComplex { .. } | WallError::LiftFailure { .. } | WallError::PerturbationFailure { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Wall(other),
        }
    }
}

impl CliError {
    /// `1` for user errors, `2` for invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

/// Which computation produced a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pipeline {
    Wall,
    Abelianization,
    Duality,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Wall => "wall",
            Pipeline::Abelianization => "abelianization",
            Pipeline::Duality => "duality",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pipeline {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wall" => Ok(Pipeline::Wall),
            "abelianization" => Ok(Pipeline::Abelianization),
            "duality" => Ok(Pipeline::Duality),
            _ => Err(CliError::Record(format!("unknown pipeline {s:?}"))),
        }
    }
}

/// One computed homology group `H_r(X_{m,n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultRecord {
    pub m: u64,
    pub n: u64,
    pub r: usize,
    pub group: AbelianGroup,
    pub pipeline: Pipeline,
    pub ms: Option<u64>,
}

fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn nat_value(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn parse_int(v: &Value) -> Result<BigInt, CliError> {
    match v {
        Value::Number(n) => n.to_string().parse().map_err(|_| CliError::Record(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| CliError::Record(format!("not an integer: {s:?}"))),
        other => Err(CliError::Record(format!("not an integer: {other}"))),
    }
}

fn field_u64(obj: &Value, key: &str) -> Result<u64, CliError> {
    obj.get(key).and_then(Value::as_u64).ok_or_else(|| CliError::Record(format!("missing or invalid {key:?}")))
}

impl ResultRecord {
    pub fn to_json(&self) -> Value {
        let primary: Vec<Value> = self
            .group
            .primary_decomposition()
            .parts
            .iter()
            .map(|pp| json!([nat_value(&pp.prime), pp.exponent, pp.multiplicity]))
            .collect();
        json!({
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "free_rank": self.group.free_rank(),
            "invariant_factors": self.group.invariant_factors().iter().map(int_value).collect::<Vec<_>>(),
            "primary": primary,
            "pipeline": self.pipeline.as_str(),
            "ms": self.ms,
        })
    }

    /// Inverse of [`ResultRecord::to_json`]; the primary form must agree with the
    /// invariant factors.
    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let factors = v
            .get("invariant_factors")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::Record("missing \"invariant_factors\"".into()))?
            .iter()
            .map(parse_int)
            .collect::<Result<Vec<_>, _>>()?;
        let free_rank = field_u64(v, "free_rank")? as usize;
        let group = AbelianGroup::from_invariant_factors(free_rank, factors)
            .map_err(|e| CliError::Record(e.to_string()))?;
        if let Some(primary) = v.get("primary").and_then(Value::as_array) {
            let mut orders = Vec::new();
            for entry in primary {
                let triple = entry.as_array().filter(|t| t.len() == 3);
                let triple = triple.ok_or_else(|| CliError::Record(format!("bad primary entry {entry}")))?;
                let p = parse_int(&triple[0])?;
                let e = triple[1].as_u64().ok_or_else(|| CliError::Record(format!("bad exponent {}", triple[1])))?;
                let k = triple[2].as_u64().ok_or_else(|| CliError::Record(format!("bad multiplicity {}", triple[2])))?;
                for _ in 0..k {
                    orders.push(num_traits::pow(p.clone(), e as usize));
                }
            }
            if AbelianGroup::from_cyclic_orders(free_rank, orders) != group {
                return Err(CliError::Record("primary form disagrees with invariant factors".into()));
            }
        }
        let pipeline = v
            .get("pipeline")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Record("missing \"pipeline\"".into()))?
            .parse()?;
        let ms = match v.get("ms") {
            None | Some(Value::Null) => None,
            Some(x) => Some(x.as_u64().ok_or_else(|| CliError::Record(format!("bad ms {x}")))?),
        };
        Ok(ResultRecord {
            m: field_u64(v, "m")?,
            n: field_u64(v, "n")?,
            r: field_u64(v, "r")? as usize,
            group,
            pipeline,
            ms,
        })
    }

    pub const CSV_HEADER: [&'static str; 8] = ["m", "n", "r", "pipeline", "free_rank", "invariant_factors", "group", "ms"];

    pub fn csv_row(&self) -> [String; 8] {
        let factors: Vec<String> = self.group.invariant_factors().iter().map(BigInt::to_string).collect();
        [
            self.m.to_string(),
            self.n.to_string(),
            self.r.to_string(),
            self.pipeline.to_string(),
            self.group.free_rank().to_string(),
            factors.join(" "),
            self.group.to_string(),
            self.ms.map(|x| x.to_string()).unwrap_or_default(),
        ]
    }

    pub fn from_csv_row(row: &[String]) -> Result<Self, CliError> {
        if row.len() != 8 {
            return Err(CliError::Record(format!("expected 8 columns, got {}", row.len())));
        }
        let num = |i: usize| row[i].parse::<u64>().map_err(|_| CliError::Record(format!("bad number {:?}", row[i])));
        let factors = row[5]
            .split_whitespace()
            .map(|s| s.parse::<BigInt>().map_err(|_| CliError::Record(format!("bad factor {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let group = AbelianGroup::from_invariant_factors(num(4)? as usize, factors)
            .map_err(|e| CliError::Record(e.to_string()))?;
        let shown: AbelianGroup = row[6].parse().map_err(|e: crate::linalg::LinalgError| CliError::Record(e.to_string()))?;
        if shown != group {
            return Err(CliError::Record(format!("group column {:?} disagrees with invariant factors", row[6])));
        }
        Ok(ResultRecord {
            m: num(0)?,
            n: num(1)?,
            r: num(2)? as usize,
            pipeline: row[3].parse()?,
            group,
            ms: if row[7].is_empty() { None } else { Some(num(7)?) },
        })
    }
}

pub fn write_json(records: &[ResultRecord], out: &mut dyn Write) -> Result<(), CliError> {
    let arr: Vec<Value> = records.iter().map(ResultRecord::to_json).collect();
    serde_json::to_writer_pretty(&mut *out, &arr)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<Vec<ResultRecord>, CliError> {
    let v: Value = serde_json::from_str(text)?;
    let arr = v.as_array().ok_or_else(|| CliError::Record("expected a JSON array".into()))?;
    arr.iter().map(ResultRecord::from_json).collect()
}

pub fn write_csv(records: &[ResultRecord], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ResultRecord::CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<ResultRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.records()
        .map(|row| {
            let row: Vec<String> = row?.iter().map(str::to_string).collect();
            ResultRecord::from_csv_row(&row)
        })
        .collect()
}

/// `a..b` or `a..=b` (both inclusive), or a single `a`.
pub fn parse_range(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Usage(format!("invalid range {s:?}; expected a..b"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(CliError::Usage(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

#[derive(Debug, Parser)]
#[command(name = "othom", version, about = "Exact integral homology of Oeljeklaus-Toma threefolds X_{m,n}")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// H_r(X_{m,n}) through the twisted-tensor-product resolution.
    Homology(HomologyArgs),
    /// H_1(X_{m,n}) through the abelianization.
    H1(H1Args),
    /// β(m, n), its prime data and period (odd m).
    Beta(BetaArgs),
    /// Sweep a grid of (m, n) and write JSON or CSV.
    Table(TableArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct FieldArg {
    /// `preset` (p = 2) or a JSON file with keys p, M, N, i, j.
    #[arg(long, default_value = "preset")]
    field: String,
}

impl FieldArg {
    fn load(&self) -> Result<QuarticFieldData, CliError> {
        if self.field == "preset" {
            Ok(QuarticFieldData::preset_p2())
        } else {
            Ok(QuarticFieldData::load(&PathBuf::from(&self.field))?)
        }
    }
}

#[derive(Debug, Args)]
struct HomologyArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    /// A single degree 0..=6.
    #[arg(long, conflicts_with = "all")]
    degree: Option<usize>,
    /// Degrees 0..=6 (the default).
    #[arg(long)]
    all: bool,
    /// Compute H_4..H_6 directly instead of by duality.
    #[arg(long)]
    no_duality: bool,
    /// Check d∘d = 0 over the group ring while building.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    json: bool,
    /// Record wall-clock milliseconds in the output.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct H1Args {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["n", "period", "factor_table"])))]
struct BetaArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    period: bool,
    #[arg(long)]
    factor_table: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value = "1..3")]
    m_range: String,
    #[arg(long, default_value = "1..3")]
    n_range: String,
    /// A single degree; all of 0..=6 (with duality completion) when omitted.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; machine parallelism when omitted.
    #[arg(long)]
    jobs: Option<usize>,
    /// Use the resolution for degree 1 instead of the abelianization.
    #[arg(long)]
    wall: bool,
    #[arg(long)]
    no_duality: bool,
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Skip the (m, n) grid beyond 3 × 3.
    #[arg(long)]
    quick: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn elapsed_ms(start: Instant, timings: bool) -> Option<u64> {
    timings.then(|| start.elapsed().as_millis() as u64)
}

/// Records for one `(m, n)` cell.
fn homology_records(
    spec: &ActionSpec,
    degree: Option<usize>,
    duality: bool,
    verify: bool,
    timings: bool,
) -> Result<Vec<ResultRecord>, CliError> {
    let (m, n) = (spec.m(), spec.n());
    let start = Instant::now();
    let record = |r: usize, group: AbelianGroup, pipeline: Pipeline, ms: Option<u64>| ResultRecord { m, n, r, group, pipeline, ms };
    if let Some(r) = degree {
        if r > TOP_DEGREE {
            return Err(CliError::Usage(format!("degree must be at most {TOP_DEGREE}, got {r}")));
        }
        let g = if verify { homology_range(spec, r, true)?.pop().expect("nonempty") } else { homology_of_x(spec, r)? };
        return Ok(vec![record(r, g, Pipeline::Wall, elapsed_ms(start, timings))]);
    }
    let top = if duality { 3 } else { TOP_DEGREE };
    let low = homology_range(spec, top, verify)?;
    let ms = elapsed_ms(start, timings);
    let mut out: Vec<ResultRecord> = low.iter().enumerate().map(|(r, g)| record(r, g.clone(), Pipeline::Wall, ms)).collect();
    if duality {
        let full = duality_complete(&low);
        for (r, g) in full.into_iter().enumerate().skip(4) {
            out.push(record(r, g, Pipeline::Duality, ms));
        }
    }
    Ok(out)
}

fn print_records(records: &[ResultRecord], json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if json {
        return write_json(records, out);
    }
    for rec in records {
        write!(out, "H_{}(X_{{{},{}}}) = {}  [{}]", rec.r, rec.m, rec.n, rec.group, rec.pipeline)?;
        if let Some(ms) = rec.ms {
            write!(out, "  {ms} ms")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_homology(a: &HomologyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = ActionSpec::new(a.field.load()?, a.m, a.n)?;
    let records = homology_records(&spec, a.degree, !a.no_duality, a.verify, a.timings)?;
    print_records(&records, a.json, out)
}

fn cmd_h1(a: &H1Args, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = ActionSpec::new(a.field.load()?, a.m, a.n)?;
    let start = Instant::now();
    let group = h1::h1_of(&spec);
    let rec = ResultRecord { m: a.m, n: a.n, r: 1, group, pipeline: Pipeline::Abelianization, ms: elapsed_ms(start, a.timings) };
    print_records(&[rec], a.json, out)
}

fn prime_data_json(f: &BetaFactorization) -> Value {
    Value::Array(f.prime_data().iter().map(|d| json!([d.p, d.s, d.period])).collect())
}

fn cmd_beta(a: &BetaArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let norm = h1::norm_factor_checked(a.m)?;
    if let Some(n) = a.n {
        let beta = h1::beta_gcd(a.m, n)?;
        // the closed form needs -a_m factored; fall back to the gcd alone if it is not
        let factorization = match BetaFactorization::new(a.m) {
            Ok(f) => Some(f),
            Err(H1Error::FactorizationTooLarge(_)) => None,
            Err(e) => return Err(e.into()),
        };
        if let Some(f) = &factorization {
            let closed = f.closed_form(n);
            if closed != beta {
                return Err(CliError::Invariant(format!("β({}, {n}): gcd gives {beta}, closed form gives {closed}", a.m)));
            }
        }
        if a.json {
            let mut v = json!({ "m": a.m, "n": n, "beta": nat_value(&beta), "norm": nat_value(&norm) });
            if let Some(f) = &factorization {
                v["prime_data"] = prime_data_json(f);
                v["period"] = nat_value(&f.period());
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        } else {
            writeln!(out, "β({}, {n}) = {beta}", a.m)?;
            if let Some(f) = &factorization {
                write_prime_data(f, &norm, out)?;
            }
        }
        return Ok(());
    }
    let f = BetaFactorization::new(a.m)?;
    if a.json {
        let v = json!({
            "m": a.m,
            "norm": nat_value(&norm),
            "prime_data": prime_data_json(&f),
            "period": nat_value(&f.period()),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else if a.period {
        writeln!(out, "period({}) = {}", a.m, f.period())?;
        write_prime_data(&f, &norm, out)?;
    } else {
        writeln!(out, "-a_{} = {norm}", a.m)?;
        writeln!(out, "{:>12} {:>4} {:>14} {:>16}", "p", "s", "n(p)", "p^(s-1) n(p)")?;
        for d in f.prime_data() {
            let contribution = BigUint::from(d.p).pow(d.s - 1) * d.period;
            writeln!(out, "{:>12} {:>4} {:>14} {:>16}", d.p, d.s, d.period, contribution)?;
        }
        writeln!(out, "period = {}", f.period())?;
    }
    Ok(())
}

fn write_prime_data(f: &BetaFactorization, norm: &BigUint, out: &mut dyn Write) -> Result<(), CliError> {
    let parts: Vec<String> = f.prime_data().iter().map(|d| format!("({}, {}, {})", d.p, d.s, d.period)).collect();
    writeln!(out, "-a_{} = {norm}; (p, s, n(p)) = [{}]; period = {}", f.m(), parts.join(", "), f.period())?;
    Ok(())
}

/// Evaluates every cell of the grid; output ordered by `(m, n, r)`.
pub fn table_records(
    field: &QuarticFieldData,
    m_range: (u64, u64),
    n_range: (u64, u64),
    degree: Option<usize>,
    force_wall: bool,
    duality: bool,
    timings: bool,
) -> Result<Vec<ResultRecord>, CliError> {
    let cells: Vec<(u64, u64)> =
        (m_range.0..=m_range.1).flat_map(|m| (n_range.0..=n_range.1).map(move |n| (m, n))).collect();
    let per_cell: Vec<Result<Vec<ResultRecord>, CliError>> = cells
        .par_iter()
        .map(|&(m, n)| {
            let spec = ActionSpec::new(field.clone(), m, n)?;
            if degree == Some(1) && !force_wall {
                let start = Instant::now();
                let group = h1::h1_of(&spec);
                return Ok(vec![ResultRecord { m, n, r: 1, group, pipeline: Pipeline::Abelianization, ms: elapsed_ms(start, timings) }]);
            }
            homology_records(&spec, degree, duality, false, timings)
        })
        .collect();
    let mut records = Vec::new();
    for cell in per_cell {
        records.extend(cell?);
    }
    records.sort_by_key(|r| (r.m, r.n, r.r));
    Ok(records)
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let m_range = parse_range(&a.m_range)?;
    let n_range = parse_range(&a.n_range)?;
    let field = a.field.load()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = a.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let records = pool.install(|| table_records(&field, m_range, n_range, a.degree, a.wall, !a.no_duality, a.timings))?;
    let mut sink: Box<dyn Write> = match &a.output {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(&mut *out),
    };
    match a.out {
        OutFormat::Json => write_json(&records, &mut sink)?,
        OutFormat::Csv => write_csv(&records, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let options = VerifyOptions { quick: a.quick, fault: a.inject_fault.then_some(Fault::FlipTopBaseD1) };
    let reports = run_suites(options);
    let mut first_failure = None;
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {:<20} {:>7} ms  {}", r.name, r.ms, r.detail)?;
        if !r.passed && first_failure.is_none() {
            first_failure = Some(format!("{}: {}", r.name, r.detail));
        }
    }
    match first_failure {
        Some(f) => Err(CliError::Invariant(f)),
        None => Ok(()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}")?;
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string().trim_end().to_string()));
        }
    };
    match &cli.command {
        Command::Homology(a) => cmd_homology(a, out),
        Command::H1(a) => cmd_h1(a, out),
        Command::Beta(a) => cmd_beta(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

/// Process entry point; returns the exit code.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(std::env::args_os(), &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("othom: {e}");
            e.exit_code()
        }
    }
}

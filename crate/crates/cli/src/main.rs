use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use pencilcount::census::{self, CensusKind, CensusReport};
use pencilcount::oracle::{self, DiffReport, EnumConfig, DEFAULT_BUDGET, DEFAULT_CHUNK};
use pencilcount::smith::{pencil_invariant_factors, snf};
use pencilcount::{FieldCtx, InvariantFactors, Poly, PolyMatrix, PolyRing, ScalarMatrix, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

mod selftest;

#[derive(Parser)]
#[command(
    name = "pencilcount",
    version,
    about = "Invariant factors of matrix pencils over finite fields and exact counts of matrices by invariant"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form count.
    Count(CountArgs),
    /// Tally every matrix (or pair) by brute force.
    Enumerate(EnumerateArgs),
    /// Compare a closed-form census with an enumeration.
    Verify(VerifyArgs),
    /// Smith normal form of a polynomial matrix or of a pencil xI - B.
    Snf(SnfArgs),
    /// Factor a polynomial into monic irreducibles.
    Factor(FactorArgs),
    /// Run randomized invariant checks.
    Selftest(selftest::SelftestArgs),
    /// Check y^d = Σ_j q^{j²} ∏_{i>j} (y - q^i) [d choose j]_q exactly.
    IdentityCheck(IdentityArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Formula {
    Class,
    Snf,
    Subspace,
    #[value(name = "givenU")]
    GivenU,
    Reach,
    Gr,
    Grext,
    Nilext,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Pencil,
    Pair,
    Fiber,
    Subspace,
    Nilext,
}

impl From<Mode> for CensusKind {
    fn from(m: Mode) -> CensusKind {
        match m {
            Mode::Pencil => CensusKind::Pencil,
            Mode::Pair => CensusKind::Pair,
            Mode::Fiber => CensusKind::Fiber,
            Mode::Subspace => CensusKind::Subspace,
            Mode::Nilext => CensusKind::Nilext,
        }
    }
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    /// Field: "p", "p^m" or the order q.
    #[arg(long)]
    q: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Invariant factors as "p1|p2|...".
    #[arg(long)]
    tuple: Option<String>,
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct EnumOpts {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Echelon basis of U as JSON rows, e.g. "[[1,0]]"; "[]" for U = 0.
    #[arg(long)]
    subspace: Option<String>,
    #[arg(long, env = "PENCILCOUNT_WORKERS")]
    workers: Option<usize>,
    #[arg(long, env = "PENCILCOUNT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk_size: u64,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    opts: EnumOpts,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    opts: EnumOpts,
    /// Closed-form report; computed from the parameters when omitted.
    #[arg(long)]
    expected: Option<PathBuf>,
    /// Enumerated report; computed from the parameters when omitted.
    #[arg(long)]
    observed: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct SnfArgs {
    #[arg(long)]
    q: String,
    /// JSON rows; entries are integers or polynomial strings.
    #[arg(long)]
    matrix: String,
    /// Treat the matrix as B and reduce x I_{n,k} - B.
    #[arg(long)]
    pencil: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct FactorArgs {
    #[arg(long)]
    q: String,
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct IdentityArgs {
    /// Single degree; defaults to 0..=8.
    #[arg(long)]
    d: Option<usize>,
    /// Single q; defaults to 2, 3 and 5.
    #[arg(long)]
    q: Option<u64>,
    /// Single y; defaults to random samples in [-10^6, 10^6].
    #[arg(long, allow_hyphen_values = true)]
    y: Option<i64>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Result of a subcommand: text to print and whether a check failed.
struct Output {
    text: String,
    mismatch: bool,
}

impl Output {
    fn ok(text: String) -> Output {
        Output {
            text,
            mismatch: false,
        }
    }
}

pub fn parse_field(spec: &str) -> Result<FieldCtx> {
    FieldCtx::from_spec(spec).with_context(|| format!("bad field {spec:?}"))
}

/// Missing or inconsistent flags, reported with the subcommand's usage.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: String) -> anyhow::Error {
    Usage(msg).into()
}

fn need<T: Copy>(v: Option<T>, what: &str, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("{what} needs --{flag}")))
}

fn render_report(report: &CensusReport, format: Format) -> String {
    match format {
        Format::Table => report.to_table(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn count(a: &CountArgs) -> Result<Output> {
    let field = parse_field(&a.q)?;
    let ring = PolyRing::new(&field);
    let q = field.order() as u64;
    let name = a
        .formula
        .to_possible_value()
        .expect("named")
        .get_name()
        .to_string();
    let what = format!("--formula {name}");
    let tuple = || -> Result<InvariantFactors> {
        let t = a
            .tuple
            .as_deref()
            .ok_or_else(|| usage(format!("{what} needs --tuple")))?;
        Ok(InvariantFactors::parse(&ring, t)?)
    };
    let poly = || -> Result<Option<Poly>> {
        a.poly
            .as_deref()
            .map(|p| ring.parse(p))
            .transpose()
            .map_err(Into::into)
    };

    let value = match a.formula {
        Formula::Class => census::count_conjugacy_class(&ring, &tuple()?)?,
        Formula::Snf => {
            let (n, k) = (need(a.n, &what, "n")?, need(a.k, &what, "k")?);
            match a.tuple {
                Some(_) => census::count_invariant_factors(&ring, n, k, &tuple()?)?,
                None => {
                    return Ok(Output::ok(render_report(
                        &census::pencil_census(&ring, n, k)?,
                        a.format,
                    )))
                }
            }
        }
        Formula::Subspace => {
            let (n, k) = (need(a.n, &what, "n")?, need(a.k, &what, "k")?);
            let inv = tuple()?;
            let d = a.d.unwrap_or(inv.degree());
            census::count_with_subspace(&ring, n, k, d, &inv)?
        }
        Formula::GivenU => census::count_given_u(
            need(a.n, &what, "n")?,
            need(a.k, &what, "k")?,
            need(a.d, &what, "d")?,
            q,
        )?,
        Formula::Reach => {
            let (n, k) = (need(a.n, &what, "n")?, need(a.k, &what, "k")?);
            match a.r {
                Some(r) => census::count_reachability(k, n, r, q)?,
                None => {
                    return Ok(Output::ok(render_report(
                        &census::pair_census(&ring, k, n)?,
                        a.format,
                    )))
                }
            }
        }
        Formula::Gr => match poly()? {
            Some(f) => census::count_char_poly_square(&ring, &f)?,
            None => {
                let n = need(a.n, &what, "poly or --n")?;
                return Ok(Output::ok(render_report(
                    &census::fiber_census(&ring, n, n)?,
                    a.format,
                )));
            }
        },
        Formula::Grext => {
            let (n, k) = (need(a.n, &what, "n")?, need(a.k, &what, "k")?);
            match poly()? {
                Some(f) => census::count_char_poly_rect(&ring, &f, n, k)?,
                None => {
                    return Ok(Output::ok(render_report(
                        &census::fiber_census(&ring, n, k)?,
                        a.format,
                    )))
                }
            }
        }
        Formula::Nilext => {
            census::count_nilpotent_extendable(need(a.k, &what, "k")?, need(a.n, &what, "n")?, q)?
        }
    };

    let text = match a.format {
        Format::Table => format!("{value}\n"),
        Format::Csv => format!("formula,count\n{name},{value}\n"),
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("formula".into(), json!(name));
            obj.insert("field".into(), json!(field.spec()));
            obj.insert("q".into(), json!(q));
            for (key, v) in [("n", a.n), ("k", a.k), ("d", a.d), ("r", a.r)] {
                if let Some(v) = v {
                    obj.insert(key.into(), json!(v));
                }
            }
            for (key, v) in [("tuple", &a.tuple), ("poly", &a.poly)] {
                if let Some(v) = v {
                    obj.insert(key.into(), json!(v));
                }
            }
            obj.insert("count".into(), json!(value.to_str_radix(10)));
            format!("{}\n", serde_json::to_string_pretty(&Value::Object(obj))?)
        }
    };
    Ok(Output::ok(text))
}

fn parse_rows(s: &str) -> Result<Vec<Vec<Value>>> {
    serde_json::from_str(s).with_context(|| format!("expected JSON rows, got {s:?}"))
}

fn int_rows(rows: &[Vec<Value>]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    v.as_i64()
                        .ok_or_else(|| anyhow!("matrix entry {v} is not an integer"))
                })
                .collect()
        })
        .collect()
}

fn subspace_from(field: &FieldCtx, k: usize, s: &str) -> Result<Subspace> {
    let rows = int_rows(&parse_rows(s)?)?;
    if rows.is_empty() {
        return Ok(Subspace::zero(k));
    }
    let basis = ScalarMatrix::from_rows(field, &rows)?;
    if basis.cols() != k {
        bail!(
            "subspace basis has {} columns, expected k = {k}",
            basis.cols()
        );
    }
    Ok(Subspace::from_echelon(field, basis)?)
}

fn config(opts: &EnumOpts) -> Result<EnumConfig> {
    let mode = need(opts.mode, "enumeration", "mode")?;
    let field = parse_field(
        opts.q
            .as_deref()
            .ok_or_else(|| usage("enumeration needs --q".into()))?,
    )?;
    let (n, k) = (
        need(opts.n, "enumeration", "n")?,
        need(opts.k, "enumeration", "k")?,
    );
    let mut cfg = EnumConfig::new(field, mode.into(), n, k).with_budget(opts.budget);
    cfg.workers = match opts.workers {
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |p| p.get()),
    };
    cfg.chunk_size = opts.chunk_size;
    if let Some(s) = &opts.subspace {
        cfg.subspace = Some(subspace_from(&cfg.field, k, s)?);
    }
    Ok(cfg)
}

/// Parameters recorded in a report, as an enumeration config.
fn config_from_report(r: &CensusReport, opts: &EnumOpts) -> Result<EnumConfig> {
    let field = parse_field(&r.field)?;
    let mut cfg = EnumConfig::new(field, r.kind, r.n, r.k).with_budget(opts.budget);
    cfg.workers = opts.workers.unwrap_or(1);
    cfg.chunk_size = opts.chunk_size;
    if let Some(rows) = &r.subspace {
        let rows: Vec<Vec<i64>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| v as i64).collect())
            .collect();
        cfg.subspace = Some(if rows.is_empty() {
            Subspace::zero(r.k)
        } else {
            Subspace::from_echelon(&cfg.field, ScalarMatrix::from_rows(&cfg.field, &rows)?)?
        });
    }
    Ok(cfg)
}

fn enumerate(a: &EnumerateArgs) -> Result<Output> {
    let report = oracle::enumerate(&config(&a.opts)?)?;
    let text = render_report(&report, a.format);
    match &a.output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(text)),
    }
}

fn read_report(path: &PathBuf) -> Result<CensusReport> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CensusReport::from_json(&s).with_context(|| format!("parsing {}", path.display()))
}

fn render_diff(diff: &DiffReport, format: Format) -> String {
    let show = |v: &Option<BigUint>| v.as_ref().map_or("-".to_string(), |n| n.to_string());
    match format {
        Format::Json => diff.to_json(),
        Format::Csv => {
            let mut s = String::from("key,expected,observed,match\n");
            for e in &diff.entries {
                s += &format!(
                    "{},{},{},{}\n",
                    e.key,
                    show(&e.expected),
                    show(&e.observed),
                    e.matches
                );
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for e in diff.mismatches() {
                s += &format!(
                    "{}: expected {}, observed {}\n",
                    e.key,
                    show(&e.expected),
                    show(&e.observed)
                );
            }
            s + &diff.summary() + "\n"
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let expected_file = a.expected.as_ref().map(read_report).transpose()?;
    let observed_file = a.observed.as_ref().map(read_report).transpose()?;
    let cfg = match (
        &a.opts.mode,
        expected_file.as_ref().or(observed_file.as_ref()),
    ) {
        (None, Some(r)) => config_from_report(r, &a.opts)?,
        _ => config(&a.opts)?,
    };
    let expected = match expected_file {
        Some(r) => r,
        None => oracle::closed_form(&cfg)?,
    };
    let observed = match observed_file {
        Some(r) => r,
        None => oracle::enumerate(&cfg)?,
    };
    let diff = oracle::verify(&expected, &observed)?;
    Ok(Output {
        text: render_diff(&diff, a.format),
        mismatch: !diff.verdict,
    })
}

fn check_shape(rows: usize, cols: usize, n: Option<usize>, k: Option<usize>) -> Result<()> {
    if n.is_some_and(|n| n != rows) || k.is_some_and(|k| k != cols) {
        return Err(usage(format!(
            "matrix is {rows}x{cols}, flags say {}x{}",
            n.unwrap_or(rows),
            k.unwrap_or(cols)
        )));
    }
    Ok(())
}

fn snf_cmd(a: &SnfArgs) -> Result<Output> {
    let field = parse_field(&a.q)?;
    let ring = PolyRing::new(&field);
    let rows = parse_rows(&a.matrix)?;
    let (factors, rank): (Vec<Poly>, usize) = if a.pencil {
        let b = ScalarMatrix::from_rows(&field, &int_rows(&rows)?)?;
        check_shape(b.rows(), b.cols(), a.n, a.k)?;
        let inv = pencil_invariant_factors(&field, &b)?;
        (inv.polys().to_vec(), b.cols())
    } else {
        let cols = rows.first().map_or(0, Vec::len);
        check_shape(rows.len(), cols, a.n, a.k)?;
        let entries = rows
            .iter()
            .flatten()
            .map(|v| match v {
                Value::String(s) => Ok(ring.parse(s)?),
                Value::Number(_) => {
                    let c = v
                        .as_i64()
                        .ok_or_else(|| anyhow!("entry {v} is not an integer"))?;
                    Ok(Poly::constant(field.elem(c)?))
                }
                other => Err(anyhow!(
                    "entry {other} is neither an integer nor a polynomial"
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != cols) {
            bail!("rows have different lengths");
        }
        let res = snf(&ring, &PolyMatrix::from_entries(rows.len(), cols, entries)?);
        (res.diagonal, res.rank)
    };
    let names: Vec<String> = factors.iter().map(|p| ring.format(p)).collect();
    let text = match a.format {
        Format::Table => format!("{}\n", names.join(" | ")),
        Format::Csv => {
            let mut s = String::from("index,factor\n");
            for (i, f) in names.iter().enumerate() {
                s += &format!("{},{f}\n", i + 1);
            }
            s
        }
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "field": field.spec(),
                "invariant_factors": names,
                "rank": rank,
            }))?
        ),
    };
    Ok(Output::ok(text))
}

fn factor_cmd(a: &FactorArgs) -> Result<Output> {
    let field = parse_field(&a.q)?;
    let ring = PolyRing::new(&field);
    let g = ring.parse(&a.poly)?;
    let fact = ring.factorize(&g)?;
    let unit = Poly::constant(fact.unit);
    let text = match a.format {
        Format::Table => {
            let mut parts: Vec<String> = Vec::new();
            if !unit.is_one() || fact.factors.is_empty() {
                parts.push(ring.format(&unit));
            }
            for (f, e) in &fact.factors {
                let s = ring.format(f);
                let s = if s.contains(['+', '-']) {
                    format!("({s})")
                } else {
                    s
                };
                parts.push(if *e > 1 { format!("{s}^{e}") } else { s });
            }
            format!("{}\n", parts.join(" * "))
        }
        Format::Csv => {
            let mut s = String::from("factor,exponent\n");
            for (f, e) in &fact.factors {
                s += &format!("{},{e}\n", ring.format(f));
            }
            s
        }
        Format::Json => {
            let factors: Vec<Value> = fact
                .factors
                .iter()
                .map(|(f, e)| json!({"factor": ring.format(f), "exponent": e}))
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({
                    "field": field.spec(),
                    "poly": ring.format(&g),
                    "unit": ring.format(&unit),
                    "factors": factors,
                }))?
            )
        }
    };
    Ok(Output::ok(text))
}

fn identity_check(a: &IdentityArgs) -> Result<Output> {
    let ds: Vec<usize> = a.d.map_or((0..=8).collect(), |d| vec![d]);
    let qs: Vec<u64> = a.q.map_or(vec![2, 3, 5], |q| vec![q]);
    if qs.iter().any(|&q| q < 2) {
        bail!("q must be at least 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut checked = 0usize;
    for &d in &ds {
        for &q in &qs {
            let ys: Vec<i64> = match a.y {
                Some(y) => vec![y],
                None => (0..a.samples)
                    .map(|_| rng.gen_range(-1_000_000..=1_000_000))
                    .collect(),
            };
            for y in ys {
                if !census::check_q_identity(d, q, &BigInt::from(y)) {
                    return Ok(Output {
                        text: format!("identity fails at d={d}, q={q}, y={y}\n"),
                        mismatch: true,
                    });
                }
                checked += 1;
            }
        }
    }
    Ok(Output::ok(format!(
        "identity holds ({checked} cases checked)\n"
    )))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Enumerate(_) => "enumerate",
            Command::Verify(_) => "verify",
            Command::Snf(_) => "snf",
            Command::Factor(_) => "factor",
            Command::Selftest(_) => "selftest",
            Command::IdentityCheck(_) => "identity-check",
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Count(a) => count(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Verify(a) => verify(a),
        Command::Snf(a) => snf_cmd(a),
        Command::Factor(a) => factor_cmd(a),
        Command::Selftest(a) => {
            let (text, ok) = selftest::run(a)?;
            Ok(Output {
                text,
                mismatch: !ok,
            })
        }
        Command::IdentityCheck(a) => identity_check(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.mismatch {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) if e.is::<Usage>() => {
            let mut cmd = Cli::command();
            cmd.build();
            let sub = cmd
                .find_subcommand_mut(cli.command.name())
                .expect("known subcommand");
            sub.error(ErrorKind::MissingRequiredArgument, e).exit()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end: argument parsing, JSON/CSV emission and the
//! verification suites that compare closed forms against enumeration.
//!
//! Exit codes: 0 ok, 1 verification mismatch, 2 usage or parameter error,
//! 3 enumeration budget exhausted.

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{euler_phi, factorize};
use crate::closed_forms::{
    gl_gauss_closed, gl_gauss_magnitude, gl_gauss_via_thm2, sl_gauss_closed, trace_count_classes,
    trace_count_prime_power, trace_count_product, trace_count_thm6,
};
use crate::cyclotomic::{set_level_ceiling, Cyclotomic, DEFAULT_LEVEL_CEILING};
use crate::error::{Error, Result};
use crate::expsums::{
    gauss_sum_direct, gauss_sum_reduced, kloosterman_crt, kloosterman_direct, ramanujan_direct,
    ramanujan_divisor, GaussSumParams, DEFAULT_BUDGET,
};
use crate::matrix_groups::{
    gl_gauss_bruteforce, gl_order, sl_gauss_bruteforce, sl_order, trace_count_bruteforce,
};
use crate::residue_chars::{enumerate_mult_chars, unit_group_structure, AddChar, MultChar};

pub const TOOL: &str = "cyclosum";
pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Exact exponential sums over Z/nZ and its matrix groups")]
struct Cli {
    /// Maximum number of enumerated candidates for brute-force routes.
    #[arg(long, global = true, env = "CYCLOSUM_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Largest cyclotomic level a value may live in.
    #[arg(long, global = true, default_value_t = DEFAULT_LEVEL_CEILING)]
    level_ceiling: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    ClosedForm,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SumKind {
    Gauss,
    Ramanujan,
    Kloosterman,
    Gl,
    Sl,
}

/// Names of the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gauss,
    Ramanujan,
    Kloosterman,
    Gl,
    Sl,
    Counts,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single exponential sum.
    Sum {
        #[arg(value_enum)]
        kind: SumKind,
        #[arg(long)]
        n: u64,
        /// Matrix size, or the number of variables for Kloosterman sums.
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// Character index in the canonical enumeration, or an exponent vector `e1,e2,...`.
        #[arg(long, default_value = "0")]
        chi: String,
        /// Multiplier of the additive character `x -> zeta_n^{a x}`.
        #[arg(long, default_value_t = 1)]
        a: u64,
        /// Argument of the Ramanujan sum.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
    },
    /// Count invertible matrices with a given trace.
    Count {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        beta: Option<u64>,
        /// One row per class gcd(beta, n) = l, plus the total.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
    },
    /// List the unit-group decomposition and all multiplicative characters.
    Chars {
        #[arg(long)]
        n: u64,
    },
    /// Orders of GL_r(Z_n) and SL_r(Z_n).
    Order {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
    },
    /// Run a closed-form vs oracle grid.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        max_n: u64,
        #[arg(long, default_value_t = 2)]
        max_r: u32,
        /// Worker threads for grid cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Corrupt the first comparison to exercise the mismatch path.
        #[arg(long, hide = true)]
        seed_mismatch: bool,
    },
}

/// Grid bounds of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub max_n: u64,
    pub max_r: u32,
}

/// One comparison between a reference value and a second route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub params: Value,
    pub expected: Value,
    pub got: Value,
    #[serde(skip)]
    pub ok: bool,
}

/// A failed [`Check`] as listed in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub params: Value,
    pub expected: Value,
    pub got: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub grid: Grid,
    pub cases_run: u64,
    pub mismatches: Vec<Mismatch>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Options of a verification run besides the suite and grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: u64,
    pub jobs: usize,
    pub seed_mismatch: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
            jobs: 1,
            seed_mismatch: false,
        }
    }
}

fn cyc_json(x: &Cyclotomic) -> Value {
    serde_json::to_value(x).expect("cyclotomic values serialize")
}

fn int_json(x: &BigInt) -> Value {
    Value::Number(serde_json::Number::from_str(&x.to_string()).expect("integers are JSON numbers"))
}

fn chi_json(chi: &MultChar) -> Value {
    json!({ "index": chi.index(), "exponents": chi.exponents() })
}

fn check_cyc(params: Value, expected: &Cyclotomic, got: &Cyclotomic) -> Check {
    Check {
        params,
        expected: cyc_json(expected),
        got: cyc_json(got),
        ok: expected == got,
    }
}

fn check_int(params: Value, expected: &BigInt, got: &BigInt) -> Check {
    Check {
        params,
        expected: int_json(expected),
        got: int_json(got),
        ok: expected == got,
    }
}

/// One unit of parallel work in a suite.
#[derive(Debug, Clone)]
enum Cell {
    Gauss { n: u64 },
    Ramanujan { n: u64 },
    Kloosterman { r: u32, n: u64 },
    Gl { r: u32, n: u64 },
    Sl { r: u32, n: u64 },
    Counts { r: u32, n: u64 },
}

fn cells(suite: Suite, grid: Grid) -> Vec<Cell> {
    let ns = 1..=grid.max_n;
    let rn = |f: fn(u32, u64) -> Cell| -> Vec<Cell> {
        (1..=grid.max_r)
            .flat_map(|r| (1..=grid.max_n).map(move |n| f(r, n)))
            .collect()
    };
    match suite {
        Suite::Gauss => ns.map(|n| Cell::Gauss { n }).collect(),
        Suite::Ramanujan => ns.map(|n| Cell::Ramanujan { n }).collect(),
        Suite::Kloosterman => rn(|r, n| Cell::Kloosterman { r, n }),
        Suite::Gl => rn(|r, n| Cell::Gl { r, n }),
        Suite::Sl => rn(|r, n| Cell::Sl { r, n }),
        Suite::Counts => rn(|r, n| Cell::Counts { r, n }),
        Suite::All => [
            Suite::Gauss,
            Suite::Ramanujan,
            Suite::Kloosterman,
            Suite::Gl,
            Suite::Sl,
            Suite::Counts,
        ]
        .into_iter()
        .flat_map(|s| cells(s, grid))
        .collect(),
    }
}

fn run_cell(cell: &Cell, budget: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    match *cell {
        Cell::Gauss { n } => {
            for chi in enumerate_mult_chars(n)? {
                for a in 0..n {
                    let p = GaussSumParams::new(chi.clone(), AddChar::new(n, a)?)?;
                    let params = json!({ "suite": "gauss", "n": n, "chi": chi_json(&chi), "a": a });
                    out.push(check_cyc(
                        params,
                        &gauss_sum_direct(&p)?,
                        &gauss_sum_reduced(&p)?,
                    ));
                }
            }
        }
        Cell::Ramanujan { n } => {
            for k in 0..=n as i64 {
                let params = json!({ "suite": "ramanujan", "n": n, "k": k });
                out.push(check_cyc(
                    params,
                    &ramanujan_direct(n, k)?,
                    &Cyclotomic::from_integer(ramanujan_divisor(n, k)),
                ));
            }
        }
        Cell::Kloosterman { r, n } => {
            for a in 0..n {
                let lambda = AddChar::new(n, a)?;
                let params = json!({ "suite": "kloosterman", "r": r, "n": n, "a": a });
                out.push(check_cyc(
                    params,
                    &kloosterman_direct(r, &lambda, budget)?,
                    &kloosterman_crt(r, &lambda, budget)?,
                ));
            }
        }
        Cell::Gl { r, n } => {
            for chi in enumerate_mult_chars(n)? {
                for a in 0..n {
                    let lambda = AddChar::new(n, a)?;
                    let params = |route: &str| {
                        json!({ "suite": "gl", "route": route, "r": r, "n": n,
                                "chi": chi_json(&chi), "a": a })
                    };
                    let brute = gl_gauss_bruteforce(r, &chi, &lambda, budget)?;
                    let closed = gl_gauss_closed(r, &chi, &lambda)?.value;
                    let via_zm = gl_gauss_via_thm2(r, &chi, &lambda)?;
                    let magnitude =
                        Cyclotomic::from_rational(gl_gauss_magnitude(r, &chi, &lambda)?);
                    out.push(check_cyc(params("bruteforce"), &brute, &closed));
                    out.push(check_cyc(params("reduced-modulus"), &brute, &via_zm));
                    out.push(check_cyc(params("magnitude"), &brute.norm_sq(), &magnitude));
                }
            }
        }
        Cell::Sl { r, n } => {
            for a in 0..n {
                let lambda = AddChar::new(n, a)?;
                let params = json!({ "suite": "sl", "r": r, "n": n, "a": a });
                out.push(check_cyc(
                    params,
                    &sl_gauss_bruteforce(r, &lambda, budget)?,
                    &sl_gauss_closed(r, &lambda, budget)?,
                ));
            }
        }
        Cell::Counts { r, n } => {
            let prime_power = match factorize(n)?.factors() {
                [(p, m)] => Some((*p, *m)),
                _ => None,
            };
            let mut total = BigInt::from(0);
            for beta in 0..n {
                let params = |route: &str| json!({ "suite": "counts", "route": route, "r": r, "n": n, "beta": beta });
                let brute = BigInt::from(trace_count_bruteforce(r, n, beta, budget)?);
                let divisor_sum = trace_count_thm6(r, n, beta)?;
                out.push(check_int(params("divisor-sum"), &brute, &divisor_sum));
                out.push(check_int(
                    params("product"),
                    &brute,
                    &trace_count_product(r, n, beta)?,
                ));
                if let Some((p, m)) = prime_power {
                    let local = trace_count_prime_power(r, p, m, beta)?;
                    out.push(check_int(params("prime-power"), &brute, &local));
                }
                total += divisor_sum;
            }
            let params = json!({ "suite": "counts", "route": "total", "r": r, "n": n });
            out.push(check_int(params, &gl_order(r, n)?, &total));
        }
    }
    Ok(out)
}

/// Runs a suite and returns its report together with every comparison made,
/// in deterministic grid order.
pub fn run_verification(
    suite: Suite,
    grid: Grid,
    opts: VerifyOptions,
) -> Result<(VerificationReport, Vec<Check>)> {
    let start = Instant::now();
    let cells = cells(suite, grid);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let per_cell: Vec<Vec<Check>> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| run_cell(c, opts.budget))
            .collect::<Result<_>>()
    })?;
    let mut checks: Vec<Check> = per_cell.into_iter().flatten().collect();
    if opts.seed_mismatch {
        if let Some(first) = checks.first_mut() {
            first.got = json!({ "seeded": first.got.take() });
            first.ok = false;
        }
    }
    let mismatches = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| Mismatch {
            params: c.params.clone(),
            expected: c.expected.clone(),
            got: c.got.clone(),
        })
        .collect();
    let report = VerificationReport {
        suite,
        grid,
        cases_run: checks.len() as u64,
        mismatches,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok((report, checks))
}

fn parse_chi(n: u64, text: &str) -> Result<MultChar> {
    let text = text.trim();
    if text.contains(',') {
        let exps = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("bad exponent {s:?} in --chi")))
            })
            .collect::<Result<Vec<_>>>()?;
        MultChar::from_exponents(n, exps)
    } else {
        let idx = text
            .parse::<u64>()
            .map_err(|_| Error::InvalidInput(format!("bad --chi {text:?}")))?;
        MultChar::from_index(n, idx)
    }
}

/// A JSON document plus the CSV header and records that summarize it.
struct Output(Value, Vec<&'static str>, Vec<Vec<String>>);

fn envelope(command: &str, params: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("params".into(), params);
    m
}

fn value_record(x: &Cyclotomic) -> Vec<String> {
    let (re, im) = x.to_complex();
    vec![re.to_string(), im.to_string(), x.to_string()]
}

#[allow(clippy::too_many_arguments)]
fn cmd_sum(
    kind: SumKind,
    n: u64,
    r: u32,
    chi: &str,
    a: u64,
    k: i64,
    method: Method,
    budget: u64,
) -> Result<Output> {
    let start = Instant::now();
    let lambda = || AddChar::new(n, a);
    let closed = method == Method::ClosedForm;
    let (name, params, value, extra) = match kind {
        SumKind::Gauss => {
            let chi = parse_chi(n, chi)?;
            let params = json!({ "n": n, "chi": chi_json(&chi), "a": a });
            let p = GaussSumParams::new(chi, lambda()?)?;
            let v = if closed {
                gauss_sum_reduced(&p)?
            } else {
                gauss_sum_direct(&p)?
            };
            ("gauss", params, v, None)
        }
        SumKind::Ramanujan => {
            let params = json!({ "n": n, "k": k });
            if n == 0 {
                return Err(Error::ZeroModulus);
            }
            let v = if closed {
                Cyclotomic::from_integer(ramanujan_divisor(n, k))
            } else {
                ramanujan_direct(n, k)?
            };
            ("ramanujan", params, v, None)
        }
        SumKind::Kloosterman => {
            let params = json!({ "r": r, "n": n, "a": a });
            let l = lambda()?;
            let v = if closed {
                kloosterman_crt(r, &l, budget)?
            } else {
                kloosterman_direct(r, &l, budget)?
            };
            ("kloosterman", params, v, None)
        }
        SumKind::Gl => {
            let chi = parse_chi(n, chi)?;
            let params = json!({ "r": r, "n": n, "chi": chi_json(&chi), "a": a });
            let l = lambda()?;
            if closed {
                let b = gl_gauss_closed(r, &chi, &l)?;
                let breakdown = json!({
                    "d": b.d,
                    "f": b.f,
                    "scalar_prefactor": b.scalar_prefactor.to_string(),
                    "base_sum": cyc_json(&b.base_sum),
                });
                ("gl", params, b.value, Some(breakdown))
            } else {
                (
                    "gl",
                    params,
                    gl_gauss_bruteforce(r, &chi, &l, budget)?,
                    None,
                )
            }
        }
        SumKind::Sl => {
            let params = json!({ "r": r, "n": n, "a": a });
            let l = lambda()?;
            let v = if closed {
                sl_gauss_closed(r, &l, budget)?
            } else {
                sl_gauss_bruteforce(r, &l, budget)?
            };
            ("sl", params, v, None)
        }
    };
    let mut doc = envelope(&format!("sum {name}"), params);
    doc.insert("value".into(), cyc_json(&value));
    doc.insert("method".into(), json!(method));
    if let Some(b) = extra {
        doc.insert("breakdown".into(), b);
    }
    doc.insert(
        "elapsed_ms".into(),
        json!(start.elapsed().as_millis() as u64),
    );
    Ok(Output(
        Value::Object(doc),
        vec!["re", "im", "exact"],
        vec![value_record(&value)],
    ))
}

fn cmd_count(r: u32, n: u64, beta: Option<u64>, method: Method, budget: u64) -> Result<Output> {
    let start = Instant::now();
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let count_one = |beta: u64| -> Result<BigInt> {
        match method {
            Method::ClosedForm => trace_count_thm6(r, n, beta),
            Method::Direct => Ok(trace_count_bruteforce(r, n, beta, budget)?.into()),
        }
    };
    let (mut doc, records) = if let Some(beta) = beta {
        let c = count_one(beta)?;
        let mut doc = envelope("count", json!({ "r": r, "n": n, "beta": beta }));
        doc.insert("count".into(), int_json(&c));
        (doc, vec![vec![beta.to_string(), "1".into(), c.to_string()]])
    } else {
        let mut rows = Vec::new();
        let mut records = Vec::new();
        let mut total = BigInt::from(0);
        for class in trace_count_classes(r, n)? {
            let beta = class.l % n;
            let count = match method {
                Method::ClosedForm => class.count,
                Method::Direct => count_one(beta)?,
            };
            total += BigInt::from(class.members) * &count;
            records.push(vec![
                class.l.to_string(),
                class.members.to_string(),
                count.to_string(),
            ]);
            rows.push(
                json!({ "l": class.l, "beta": beta, "members": class.members,
                              "count": int_json(&count) }),
            );
        }
        let mut doc = envelope("count", json!({ "r": r, "n": n, "all": true }));
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("total".into(), int_json(&total));
        doc.insert("gl_order".into(), int_json(&gl_order(r, n)?));
        (doc, records)
    };
    doc.insert("method".into(), json!(method));
    doc.insert(
        "elapsed_ms".into(),
        json!(start.elapsed().as_millis() as u64),
    );
    let header = if beta.is_some() {
        vec!["beta", "members", "count"]
    } else {
        vec!["l", "members", "count"]
    };
    Ok(Output(Value::Object(doc), header, records))
}

fn cmd_chars(n: u64) -> Result<Output> {
    let structure = unit_group_structure(n)?;
    let chars = enumerate_mult_chars(n)?;
    let mut records = Vec::new();
    let list: Vec<Value> = chars
        .iter()
        .map(|c| {
            let exps: Vec<String> = c.exponents().iter().map(u64::to_string).collect();
            records.push(vec![
                c.index().to_string(),
                exps.join(","),
                c.conductor().to_string(),
            ]);
            json!({
                "index": c.index(),
                "exponents": c.exponents(),
                "conductor": c.conductor(),
                "character": c,
            })
        })
        .collect();
    let mut doc = envelope("chars", json!({ "n": n }));
    doc.insert(
        "generators".into(),
        json!(structure
            .generators()
            .iter()
            .map(|&(g, o)| [g, o])
            .collect::<Vec<_>>()),
    );
    doc.insert("count".into(), json!(chars.len()));
    doc.insert("characters".into(), Value::Array(list));
    Ok(Output(
        Value::Object(doc),
        vec!["index", "exponents", "conductor"],
        records,
    ))
}

fn cmd_order(r: u32, n: u64) -> Result<Output> {
    let gl = gl_order(r, n)?;
    let sl = sl_order(r, n)?;
    let mut doc = envelope("order", json!({ "r": r, "n": n }));
    doc.insert("gl_order".into(), int_json(&gl));
    doc.insert("sl_order".into(), int_json(&sl));
    doc.insert("units".into(), json!(euler_phi(n)));
    Ok(Output(
        Value::Object(doc),
        vec!["r", "n", "gl_order", "sl_order"],
        vec![vec![
            r.to_string(),
            n.to_string(),
            gl.to_string(),
            sl.to_string(),
        ]],
    ))
}

fn write_output(out: &mut dyn Write, format: Format, output: Output) -> std::io::Result<()> {
    let Output(doc, header, records) = output;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for rec in records {
                w.write_record(&rec)?;
            }
            w.flush()
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    set_level_ceiling(cli.level_ceiling);
    let budget = cli.budget;
    let mut status = EXIT_OK;
    let result = match cli.command {
        Command::Sum {
            kind,
            n,
            r,
            ref chi,
            a,
            k,
            method,
        } => cmd_sum(kind, n, r, chi, a, k, method, budget),
        Command::Count {
            r,
            n,
            beta,
            all: _,
            method,
        } => cmd_count(r, n, beta, method, budget),
        Command::Chars { n } => cmd_chars(n),
        Command::Order { r, n } => cmd_order(r, n),
        Command::Verify {
            suite,
            max_n,
            max_r,
            jobs,
            seed_mismatch,
        } => {
            let grid = Grid { max_n, max_r };
            let opts = VerifyOptions {
                budget,
                jobs,
                seed_mismatch,
            };
            run_verification(suite, grid, opts).map(|(report, checks)| {
                if !report.passed() {
                    status = EXIT_MISMATCH;
                }
                let mut doc = envelope(
                    "verify",
                    json!({ "suite": suite, "max_n": max_n, "max_r": max_r, "budget": budget, "jobs": jobs }),
                );
                if let Value::Object(fields) = serde_json::to_value(&report).expect("report serializes") {
                    doc.extend(fields);
                }
                let records = checks
                    .iter()
                    .map(|c| {
                        vec![
                            c.params.to_string(),
                            c.expected.to_string(),
                            c.got.to_string(),
                            c.ok.to_string(),
                        ]
                    })
                    .collect();
                Output(Value::Object(doc), vec!["params", "expected", "got", "match"], records)
            })
        }
    };
    match result {
        Ok(output) => {
            if let Err(e) = write_output(out, cli.format, output) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

//! `eis-heights`: coefficient tables, identity-check suites and height
//! breakdowns.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 an oracle was
//! inconclusive.

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use eis_heights::checks::{self, CheckOptions, Suite};
use eis_heights::eisenstein::{self, CaseTag, CoefficientRow};
use eis_heights::report::{batch_status, relative_residual};
use eis_heights::{arith, classnum, geometry, CheckReport, CheckStatus, Error};
use serde_json::{json, Map, Value};

const SCHEMA: &str = "eis-heights/1";
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "eis-heights", version, about = "Eisenstein coefficients and arithmetic heights on Shimura curves")]
struct Cli {
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, global = true, env = "EIS_HEIGHTS_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of Fourier coefficients at s = 1/2 for a range of indices.
    Coeffs {
        /// Squarefree D >= 1; D = 1 gives the Zagier series.
        #[arg(long = "D")]
        big_d: u64,
        /// Imaginary part of tau.
        #[arg(long = "v")]
        v: f64,
        /// Index range `a:b`, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run an identity-check suite.
    Check {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Smaller grids.
        #[arg(long)]
        quick: bool,
        /// Restrict the local density suite to one prime.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Geometric height pairing next to the analytic derivative, as JSON.
    #[command(allow_negative_numbers = true)]
    Heights {
        m: i64,
        v: f64,
        #[arg(value_name = "D")]
        big_d: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Localdensity,
    Classnumbers,
    Special,
    Mainidentity,
    Functional,
    Constants,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Localdensity => Suite::LocalDensity,
            SuiteArg::Classnumbers => Suite::ClassNumbers,
            SuiteArg::Special => Suite::Special,
            SuiteArg::Mainidentity => Suite::MainIdentity,
            SuiteArg::Functional => Suite::Functional,
            SuiteArg::Constants => Suite::Constants,
        }
    }
}

/// Failure carrying its exit code.
struct Exit(u8, anyhow::Error);

fn invalid(e: impl Into<anyhow::Error>) -> Exit {
    Exit(2, e.into())
}

fn from_core(e: Error) -> Exit {
    match e {
        Error::InvalidArgument(_) | Error::Overflow(_) => Exit(2, e.into()),
        Error::Inconclusive(_) => Exit(3, e.into()),
        Error::Internal(_) => Exit(1, e.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Coeffs { big_d, v, range, format } => cmd_coeffs(big_d, v, &range, format),
        Command::Check { suite, quick, p, format } => cmd_check(suite.into(), quick, p, format),
        Command::Heights { m, v, big_d } => cmd_heights(m, v, big_d),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

// ---------------------------------------------------------------------------
// Output helpers.

/// Fixed float rendering: 15 significant digits.
fn fmt_f(x: f64) -> String {
    format!("{x:.14e}")
}

/// A JSON number rounded to 15 significant digits (`null` if not finite).
fn jnum(x: f64) -> Value {
    fmt_f(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

/// Round every floating-point number in a JSON tree.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => jnum(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_json(x: &impl serde::Serialize) -> Result<Value, Exit> {
    serde_json::to_value(x)
        .map(round_floats)
        .map_err(|e| Exit(1, e.into()))
}

fn emit(text: &str) -> Result<(), Exit> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Exit(1, e.into()))
}

fn emit_json(v: &Value) -> Result<(), Exit> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Exit(1, e.into()))?;
    emit(&format!("{s}\n"))
}

fn rational_parts(r: &eis_heights::Rational) -> (String, String, String) {
    (
        r.numer().to_string(),
        r.denom().to_string(),
        fmt_f(eis_heights::rat_to_f64(r)),
    )
}

fn case_tag_name(t: CaseTag) -> &'static str {
    match t {
        CaseTag::PosNoSplit => "pos_no_split",
        CaseTag::PosUniqueSplit => "pos_unique_split",
        CaseTag::Negative => "negative",
        CaseTag::Constant => "constant",
        CaseTag::Vanishing => "vanishing",
    }
}

// ---------------------------------------------------------------------------
// coeffs

fn parse_range(s: &str) -> Result<(i64, i64), Exit> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| invalid(anyhow!("range must look like a:b, got {s:?}")))?;
    let a: i64 = a.trim().parse().with_context(|| format!("bad range start {a:?}")).map_err(invalid)?;
    let b: i64 = b.trim().parse().with_context(|| format!("bad range end {b:?}")).map_err(invalid)?;
    if a > b {
        return Err(invalid(anyhow!("range start {a} exceeds end {b}")));
    }
    if b - a > 1_000_000 {
        return Err(invalid(anyhow!("range of {} indices is too long", b - a + 1)));
    }
    Ok((a, b))
}

const COEFF_HEADER: [&str; 15] = [
    "m",
    "value_num",
    "value_den",
    "value",
    "deriv_half",
    "deriv_half_scaled",
    "scale_exponent",
    "case_tag",
    "faltings",
    "archimedean_j",
    "off_d",
    "on_d",
    "split_prime",
    "odd_prime_count",
    "D",
];

const ZAGIER_HEADER: [&str; 8] = [
    "m",
    "holomorphic_num",
    "holomorphic_den",
    "holomorphic",
    "hurwitz_4m",
    "nonholomorphic",
    "total",
    "v",
];

fn coeff_record(row: &CoefficientRow) -> Vec<String> {
    let (num, den, dec) = rational_parts(&row.value_half);
    let part = |f: fn(&eisenstein::CoefficientParts) -> f64| row.parts.as_ref().map_or(String::new(), |p| fmt_f(f(p)));
    vec![
        row.m.to_string(),
        num,
        den,
        dec,
        fmt_f(row.deriv_half),
        fmt_f(row.deriv_half_scaled),
        fmt_f(row.scale_exponent),
        case_tag_name(row.case_tag).to_string(),
        part(|p| p.faltings),
        part(|p| p.archimedean_j),
        part(|p| p.off_d),
        part(|p| p.on_d),
        row.split_prime.map_or(String::new(), |p| p.to_string()),
        row.odd_prime_count.to_string(),
        row.big_d.to_string(),
    ]
}

fn coeff_json(row: &CoefficientRow) -> Value {
    let (num, den, _) = rational_parts(&row.value_half);
    let mut o = Map::new();
    o.insert("m".into(), json!(row.m));
    o.insert(
        "value_half".into(),
        json!({"num": num, "den": den, "decimal": jnum(eis_heights::rat_to_f64(&row.value_half))}),
    );
    o.insert("deriv_half".into(), jnum(row.deriv_half));
    o.insert("deriv_half_scaled".into(), jnum(row.deriv_half_scaled));
    o.insert("scale_exponent".into(), jnum(row.scale_exponent));
    o.insert("case_tag".into(), json!(case_tag_name(row.case_tag)));
    if let Some(p) = &row.parts {
        o.insert(
            "parts".into(),
            json!({
                "faltings": jnum(p.faltings),
                "archimedean_j": jnum(p.archimedean_j),
                "off_d": jnum(p.off_d),
                "on_d": jnum(p.on_d),
            }),
        );
    }
    if let Some(p) = row.split_prime {
        o.insert("split_prime".into(), json!(p));
    }
    o.insert("odd_prime_count".into(), json!(row.odd_prime_count));
    Value::Object(o)
}

struct ZagierRow {
    m: i64,
    holomorphic: eis_heights::Rational,
    hurwitz: Option<eis_heights::Rational>,
    nonholomorphic: f64,
    v: f64,
}

fn zagier_rows(a: i64, b: i64, v: f64) -> Result<Vec<ZagierRow>, Exit> {
    (a..=b)
        .map(|m| {
            let z = eisenstein::zagier_coeff(m, v).map_err(from_core)?;
            let hurwitz = (m >= 0).then(|| classnum::hurwitz(4 * m as u64));
            Ok(ZagierRow {
                m,
                holomorphic: z.holomorphic,
                hurwitz,
                nonholomorphic: z.nonholomorphic,
                v,
            })
        })
        .collect()
}

fn zagier_record(r: &ZagierRow) -> Vec<String> {
    let (num, den, dec) = rational_parts(&r.holomorphic);
    vec![
        r.m.to_string(),
        num,
        den,
        dec,
        r.hurwitz.as_ref().map_or(String::new(), |h| h.to_string()),
        fmt_f(r.nonholomorphic),
        fmt_f(eis_heights::rat_to_f64(&r.holomorphic) + r.nonholomorphic),
        fmt_f(r.v),
    ]
}

fn zagier_json(r: &ZagierRow) -> Value {
    let (num, den, _) = rational_parts(&r.holomorphic);
    json!({
        "m": r.m,
        "holomorphic": {"num": num, "den": den, "decimal": jnum(eis_heights::rat_to_f64(&r.holomorphic))},
        "hurwitz_4m": r.hurwitz.as_ref().map(|h| {
            let (n, d, _) = rational_parts(h);
            json!({"num": n, "den": d, "decimal": jnum(eis_heights::rat_to_f64(h))})
        }),
        "nonholomorphic": jnum(r.nonholomorphic),
        "total": jnum(eis_heights::rat_to_f64(&r.holomorphic) + r.nonholomorphic),
    })
}

fn write_table(header: &[&str], records: &[Vec<String>], format: Format) -> Result<(), Exit> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let res = w
                .write_record(header)
                .and_then(|_| records.iter().try_for_each(|r| w.write_record(r)));
            res.map_err(|e| Exit(1, e.into()))?;
            let bytes = w.into_inner().map_err(|e| Exit(1, anyhow!("{e}")))?;
            emit(&String::from_utf8_lossy(&bytes))
        }
        Format::Text => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for r in records {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: Vec<&str>| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}", w = *w))
                    .collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            let mut s = line(header.to_vec());
            for r in records {
                s.push_str(&line(r.iter().map(String::as_str).collect()));
            }
            emit(&s)
        }
        Format::Json => unreachable!("JSON tables are emitted separately"),
    }
}

fn cmd_coeffs(big_d: u64, v: f64, range: &str, format: Format) -> Result<u8, Exit> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(anyhow!("v must be a positive real, got {v}")));
    }
    arith::squarefree_primes(big_d).map_err(from_core)?;
    let (a, b) = parse_range(range)?;
    if big_d == 1 {
        let rows = zagier_rows(a, b, v)?;
        return match format {
            Format::Json => {
                emit_json(&json!({
                    "spec": SCHEMA,
                    "D": 1,
                    "v": jnum(v),
                    "series": "zagier",
                    "rows": rows.iter().map(zagier_json).collect::<Vec<_>>(),
                }))
                .map(|_| 0)
            }
            _ => {
                let recs: Vec<Vec<String>> = rows.iter().map(zagier_record).collect();
                write_table(&ZAGIER_HEADER, &recs, format).map(|_| 0)
            }
        };
    }
    let ms: Vec<i64> = (a..=b).collect();
    let rows: Vec<CoefficientRow> = eisenstein::coeff_deriv_half_batch(&ms, v, big_d)
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(from_core)?;
    match format {
        Format::Json => emit_json(&json!({
            "spec": SCHEMA,
            "D": big_d,
            "v": jnum(v),
            "rows": rows.iter().map(coeff_json).collect::<Vec<_>>(),
        }))
        .map(|_| 0),
        _ => {
            let recs: Vec<Vec<String>> = rows.iter().map(coeff_record).collect();
            write_table(&COEFF_HEADER, &recs, format).map(|_| 0)
        }
    }
}

// ---------------------------------------------------------------------------
// check

fn status_code(s: CheckStatus) -> u8 {
    match s {
        CheckStatus::Pass => 0,
        CheckStatus::Fail => 1,
        CheckStatus::Inconclusive => 3,
    }
}

fn status_name(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::Inconclusive => "inconclusive",
    }
}

fn report_record(r: &CheckReport) -> Vec<String> {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    vec![
        r.name.clone(),
        params.join(";"),
        status_name(r.status).to_string(),
        r.exact.as_ref().map_or_else(|| fmt_f(r.left), |e| e.0.clone()),
        r.exact.as_ref().map_or_else(|| fmt_f(r.right), |e| e.1.clone()),
        fmt_f(r.abs_residual),
        fmt_f(r.rel_residual),
        fmt_f(r.tolerance),
        r.note.clone().unwrap_or_default(),
    ]
}

fn cmd_check(suite: Suite, quick: bool, p: Option<u64>, format: Format) -> Result<u8, Exit> {
    if let Some(p) = p {
        if !arith::is_prime(p) {
            return Err(invalid(anyhow!("--p {p} is not prime")));
        }
    }
    let opts = CheckOptions { quick, prime: p };
    let reports = checks::run_suite(suite, &opts);
    let status = batch_status(&reports);
    let count = |s: CheckStatus| reports.iter().filter(|r| r.status == s).count();
    match format {
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&format!("{r}\n"));
            }
            s.push_str(&format!(
                "suite {}: {} reports, {} pass, {} fail, {} inconclusive: {}\n",
                suite.name(),
                reports.len(),
                count(CheckStatus::Pass),
                count(CheckStatus::Fail),
                count(CheckStatus::Inconclusive),
                status_name(status).to_uppercase()
            ));
            emit(&s)?;
        }
        Format::Csv => {
            let header = [
                "name", "params", "status", "left", "right", "abs_residual", "rel_residual", "tolerance", "note",
            ];
            let recs: Vec<Vec<String>> = reports.iter().map(report_record).collect();
            write_table(&header, &recs, Format::Csv)?;
        }
        Format::Json => {
            emit_json(&json!({
                "spec": SCHEMA,
                "suite": suite.name(),
                "quick": quick,
                "status": status_name(status),
                "counts": {
                    "total": reports.len(),
                    "pass": count(CheckStatus::Pass),
                    "fail": count(CheckStatus::Fail),
                    "inconclusive": count(CheckStatus::Inconclusive),
                },
                "reports": to_json(&reports)?,
            }))?;
        }
    }
    Ok(status_code(status))
}

// ---------------------------------------------------------------------------
// heights

fn residual_entry(geometric: f64, analytic: f64) -> Value {
    json!({
        "geometric": jnum(geometric),
        "analytic": jnum(analytic),
        "rel_residual": jnum(relative_residual(geometric, analytic)),
    })
}

fn cmd_heights(m: i64, v: f64, big_d: u64) -> Result<u8, Exit> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(anyhow!("v must be a positive real, got {v}")));
    }
    arith::quaternion_primes(big_d).map_err(from_core)?;
    if m == 0 {
        let rep = geometry::constant_term_report(v, big_d).map_err(from_core)?;
        emit_json(&json!({
            "spec": SCHEMA,
            "m": 0,
            "v": jnum(v),
            "D": big_d,
            "constant_term": to_json(&rep)?,
        }))?;
        return Ok(status_code(rep.status));
    }
    let geo = geometry::height_pairing(m, v, big_d).map_err(from_core)?;
    let ana = eisenstein::coeff_deriv_half(m, v, big_d).map_err(from_core)?;
    let vertical_sum: f64 = geo.vertical.values().sum();
    let mut parts = Map::new();
    if m < 0 {
        parts.insert("kappa_scaled".into(), residual_entry(geo.kappa_scaled, ana.deriv_half_scaled));
    } else if let Some(p) = &ana.parts {
        parts.insert("horizontal".into(), residual_entry(geo.horizontal, p.faltings + p.off_d));
        parts.insert("vertical".into(), residual_entry(vertical_sum, p.on_d));
        parts.insert("kappa".into(), residual_entry(geo.kappa, p.archimedean_j));
    } else {
        parts.insert("vertical".into(), residual_entry(vertical_sum, ana.deriv_half));
    }
    let total_res = relative_residual(geo.total_scaled, ana.deriv_half_scaled);
    parts.insert("total_scaled".into(), residual_entry(geo.total_scaled, ana.deriv_half_scaled));
    let vertical: Map<String, Value> = geo.vertical.iter().map(|(p, x)| (p.to_string(), jnum(*x))).collect();
    let analytic_parts = ana.parts.as_ref().map(|p| {
        json!({
            "faltings": jnum(p.faltings),
            "archimedean_j": jnum(p.archimedean_j),
            "off_d": jnum(p.off_d),
            "on_d": jnum(p.on_d),
        })
    });
    let ok = total_res <= IDENTITY_TOL;
    emit_json(&json!({
        "spec": SCHEMA,
        "m": m,
        "v": jnum(v),
        "D": big_d,
        "geometric": {
            "horizontal": jnum(geo.horizontal),
            "vertical": vertical,
            "kappa": jnum(geo.kappa),
            "total": jnum(geo.total),
            "kappa_scaled": jnum(geo.kappa_scaled),
            "total_scaled": jnum(geo.total_scaled),
            "scale_exponent": jnum(geo.scale_exponent),
        },
        "analytic": {
            "case_tag": case_tag_name(ana.case_tag),
            "deriv_half": jnum(ana.deriv_half),
            "deriv_half_scaled": jnum(ana.deriv_half_scaled),
            "parts": analytic_parts,
        },
        "residuals": parts,
        "tolerance": jnum(IDENTITY_TOL),
        "status": if ok { "pass" } else { "fail" },
    }))?;
    Ok(if ok { 0 } else { 1 })
}

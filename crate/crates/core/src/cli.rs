//! The `twistrec` command line.
//!
//! Exit codes: 0 when every contract in the run holds, 1 when one fails (the
//! worst residual goes to stderr), 2 for bad flags or rejected inputs.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::{build_form, cache_dir_from_env, read_cache, write_cache};
use crate::lfun::{evaluate_detailed, fe_case_residual, random_fe_cases, FeCase, LQuery};
use crate::modarith::{gauss_orthogonality_residual, reduce_phase};
use crate::reciprocity::{corollary_sides, lemma1_residual, theorem1_sides, ComplexRepr, VerificationReport};
use crate::special::ApComplex;
use crate::transform::{transform_cases, TransformKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "twistrec", version, about = "Twisted L-values of level-one eigenforms and reciprocity checks")]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Include per-stage wall-clock times in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier coefficients a(1..=n) as CSV.
    TauTable {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        n: usize,
    },
    /// L(1/2 + s, f (x) e(a/b)) with its certified error bound.
    EvalLtwist {
        #[arg(long)]
        weight: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_im: f64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Gauss-sum orthogonality residual for one (q, m).
    VerifyOrthogonality {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// The three-prime reciprocity identity.
    VerifyTheorem1 {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        r: i64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The two-prime identity (r = 1).
    VerifyCorollary {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Additive-twist moment against its Dirichlet-character expansion.
    VerifyLemma1 {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        q: i64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_im: f64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Functional-equation residuals on reproducible random cases.
    VerifyFe {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 50)]
        max_b: i64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Quadrature checks of the integral transforms.
    VerifyTransforms {
        #[arg(long, value_parser = parse_transform)]
        which: TransformKind,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Reciprocity checks over a JSON-configured list or grid.
    Batch {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the digits in the config file.
        #[arg(long)]
        digits: Option<u32>,
    },
}

fn parse_transform(s: &str) -> std::result::Result<TransformKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchIdentity {
    Theorem1,
    Corollary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchCase {
    pub identity: BatchIdentity,
    pub weight: u32,
    pub p: i64,
    pub q: i64,
    #[serde(default)]
    pub r: Option<i64>,
}

/// Every ordered triple (theorem) or pair (corollary) of distinct primes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchGrid {
    pub identity: BatchIdentity,
    pub weights: Vec<u32>,
    pub primes: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    #[serde(default = "default_digits")]
    pub digits: u32,
    #[serde(default)]
    pub cases: Vec<BatchCase>,
    #[serde(default)]
    pub grid: Option<BatchGrid>,
}

fn default_digits() -> u32 {
    30
}

impl BatchConfig {
    /// Explicit cases first, then the grid in lexicographic order.
    pub fn expand(&self) -> Result<Vec<BatchCase>> {
        let mut out = self.cases.clone();
        if let Some(g) = &self.grid {
            if g.weights.is_empty() || g.primes.is_empty() {
                return Err(Error::InvalidInput("batch grid needs nonempty weights and primes".into()));
            }
            for &weight in &g.weights {
                for &p in &g.primes {
                    for &q in g.primes.iter().filter(|&&q| q != p) {
                        match g.identity {
                            BatchIdentity::Corollary => out.push(BatchCase { identity: g.identity, weight, p, q, r: None }),
                            BatchIdentity::Theorem1 => {
                                for &r in g.primes.iter().filter(|&&r| r != p && r != q) {
                                    out.push(BatchCase { identity: g.identity, weight, p, q, r: Some(r) });
                                }
                            }
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("batch config has no cases".into()));
        }
        Ok(out)
    }
}

pub fn run_case(case: &BatchCase, digits: u32) -> Result<VerificationReport> {
    let form = build_form(case.weight, 1)?;
    match (case.identity, case.r) {
        (BatchIdentity::Theorem1, Some(r)) => theorem1_sides(&form, case.p, case.q, r, digits),
        (BatchIdentity::Theorem1, None) => Err(Error::InvalidInput("theorem1 case needs r".into())),
        (BatchIdentity::Corollary, None | Some(1)) => corollary_sides(&form, case.p, case.q, digits),
        (BatchIdentity::Corollary, Some(r)) => Err(Error::InvalidInput(format!("corollary case has r = {r}; leave it out"))),
    }
}

/// Result of one invocation before it is written out.
struct Outcome {
    body: String,
    /// `(label, residual, tolerance)` of every contract checked.
    checks: Vec<(String, f64, f64)>,
}

impl Outcome {
    fn worst(&self) -> Option<&(String, f64, f64)> {
        self.checks
            .iter()
            .filter(|c| !(c.1 < c.2))
            .max_by(|a, b| (a.1 / a.2).partial_cmp(&(b.1 / b.2)).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> std::result::Result<(), csv::Error>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    fill(&mut w).map_err(|e| Error::Io(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn json_string<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

const REPORT_HEADER: [&str; 13] =
    ["identity", "weight", "p", "q", "r", "digits", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "error_budget", "pass"];

fn report_rows(reports: &[VerificationReport], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            if reports.len() == 1 {
                json_string(&reports[0])
            } else {
                json_string(&reports)
            }
        }
        Format::Csv => csv_string(&REPORT_HEADER, |w| {
            for r in reports {
                let i = &r.inputs;
                w.write_record([
                    i.identity.clone(),
                    i.weight.to_string(),
                    i.p.to_string(),
                    i.q.to_string(),
                    i.r.to_string(),
                    i.digits.to_string(),
                    r.lhs.re.clone(),
                    r.lhs.im.clone(),
                    r.rhs.re.clone(),
                    r.rhs.im.clone(),
                    r.residual.clone(),
                    format!("{:e}", r.error_budget),
                    r.passes().to_string(),
                ])?;
            }
            Ok(())
        }),
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let i = &r.inputs;
                s += &format!(
                    "{} k={} (p,q,r)=({},{},{}) P={} residual={:.3e} tol={:.0e} {}\n",
                    i.identity,
                    i.weight,
                    i.p,
                    i.q,
                    i.r,
                    i.digits,
                    r.residual_f64(),
                    r.tolerance(),
                    if r.passes() { "PASS" } else { "FAIL" }
                );
                if reports.len() == 1 {
                    s += &format!("  lhs = {}\n  rhs = {}\n", short(&r.lhs, i.digits), short(&r.rhs, i.digits));
                    for m in &r.moments {
                        s += &format!("  {} at {} = {}\n", m.label, m.phase, short(&m.value, i.digits));
                    }
                }
            }
            Ok(s)
        }
    }
}

fn short(c: &ComplexRepr, digits: u32) -> String {
    c.to_ap(digits).map(|z| z.to_string_digits(digits as usize)).unwrap_or_else(|_| format!("{} + {}i", c.re, c.im))
}

fn report_checks(reports: &[VerificationReport]) -> Vec<(String, f64, f64)> {
    reports
        .iter()
        .map(|r| {
            let i = &r.inputs;
            (format!("{} k={} ({},{},{})", i.identity, i.weight, i.p, i.q, i.r), r.residual_f64(), r.tolerance())
        })
        .collect()
}

fn check_digits(digits: u32) -> Result<()> {
    if digits < 10 {
        return Err(Error::InvalidInput(format!("--digits must be at least 10, got {digits}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct CoefficientRow {
    n: usize,
    a: String,
}

#[derive(Serialize)]
struct LValueOut {
    weight: u32,
    a: i64,
    b: i64,
    s: ComplexRepr,
    digits: u32,
    value: ComplexRepr,
    error_bound: f64,
    terms: usize,
}

#[derive(Serialize)]
struct ResidualOut {
    case: String,
    lhs: Option<ComplexRepr>,
    rhs: Option<ComplexRepr>,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

fn residual_table(rows: &[ResidualOut], format: Format) -> Result<String> {
    match format {
        Format::Json => json_string(&rows),
        Format::Csv => csv_string(&["case", "lhs", "rhs", "residual", "tolerance", "pass"], |w| {
            for r in rows {
                let z = |c: &Option<ComplexRepr>| c.as_ref().map(|c| format!("{} {}", c.re, c.im)).unwrap_or_default();
                w.write_record([r.case.clone(), z(&r.lhs), z(&r.rhs), format!("{:e}", r.residual), format!("{:.3e}", r.tolerance), r.pass.to_string()])?;
            }
            Ok(())
        }),
        Format::Text => Ok(rows
            .iter()
            .map(|r| format!("{} residual={:.3e} tol={:.0e} {}\n", r.case, r.residual, r.tolerance, if r.pass { "PASS" } else { "FAIL" }))
            .collect()),
    }
}

fn residual_checks(rows: &[ResidualOut]) -> Vec<(String, f64, f64)> {
    rows.iter().map(|r| (r.case.clone(), r.residual, r.tolerance)).collect()
}

fn tau_table(weight: u32, n: usize, format: Format) -> Result<Outcome> {
    if n == 0 {
        return Err(Error::InvalidInput("--n must be at least 1".into()));
    }
    let cached = match cache_dir_from_env() {
        Some(dir) => read_cache(&dir, weight, n)?,
        None => None,
    };
    let coeffs = match cached {
        Some(c) => c,
        None => {
            let form = build_form(weight, n)?;
            if let Some(dir) = cache_dir_from_env() {
                write_cache(&dir, &form, n)?;
            }
            form.coeffs(n)?
        }
    };
    let rows: Vec<CoefficientRow> = coeffs.iter().enumerate().map(|(i, a)| CoefficientRow { n: i + 1, a: a.to_string() }).collect();
    let body = match format {
        Format::Json => json_string(&rows)?,
        Format::Csv => csv_string(&["n", "a_n"], |w| {
            for r in &rows {
                w.write_record([r.n.to_string(), r.a.clone()])?;
            }
            Ok(())
        })?,
        Format::Text => rows.iter().map(|r| format!("a({}) = {}\n", r.n, r.a)).collect(),
    };
    Ok(Outcome { body, checks: Vec::new() })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    let timed = |r: VerificationReport| if cli.timings { r.with_timings() } else { r };
    match &cli.command {
        Command::TauTable { weight, n } => tau_table(*weight, *n, fmt(Format::Csv)),
        Command::EvalLtwist { weight, a, b, s_re, s_im, digits } => {
            check_digits(*digits)?;
            let form = build_form(*weight, 1)?;
            let phase = reduce_phase(*a, *b)?;
            let s = ApComplex::from_f64_parts(*s_re, *s_im, *digits);
            let v = evaluate_detailed(&LQuery::new(&form, phase, s.clone(), *digits))?;
            let out = LValueOut {
                weight: *weight,
                a: phase.a(),
                b: phase.b(),
                s: ComplexRepr::from_ap(&s),
                digits: *digits,
                value: ComplexRepr::from_ap(&v.value),
                error_bound: v.error_bound,
                terms: v.terms,
            };
            let body = match fmt(Format::Text) {
                Format::Json => json_string(&out)?,
                Format::Csv => csv_string(&["weight", "a", "b", "s_re", "s_im", "digits", "value_re", "value_im", "error_bound", "terms"], |w| {
                    w.write_record([
                        out.weight.to_string(),
                        out.a.to_string(),
                        out.b.to_string(),
                        out.s.re.clone(),
                        out.s.im.clone(),
                        out.digits.to_string(),
                        out.value.re.clone(),
                        out.value.im.clone(),
                        format!("{:e}", out.error_bound),
                        out.terms.to_string(),
                    ])
                })?,
                Format::Text => format!(
                    "L(1/2 + ({s_re}) + ({s_im})i, f_{weight} (x) e({phase})) = {}\nerror bound {:.3e} with {} terms\n",
                    v.value.to_string_digits(*digits as usize),
                    v.error_bound,
                    v.terms
                ),
            };
            Ok(Outcome { body, checks: Vec::new() })
        }
        Command::VerifyOrthogonality { q, m, digits } => {
            check_digits(*digits)?;
            let residual = gauss_orthogonality_residual(*q, *m, *digits)?;
            let rows = [ResidualOut {
                case: format!("orthogonality q={q} m={m}"),
                lhs: None,
                rhs: None,
                residual,
                tolerance: 10f64.powi(-(*digits as i32 - 5)),
                pass: residual < 10f64.powi(-(*digits as i32 - 5)),
            }];
            Ok(Outcome { body: residual_table(&rows, fmt(Format::Text))?, checks: residual_checks(&rows) })
        }
        Command::VerifyTheorem1 { weight, p, q, r, digits, report } => {
            check_digits(*digits)?;
            let form = build_form(*weight, 1)?;
            let rep = timed(theorem1_sides(&form, *p, *q, *r, *digits)?);
            if let Some(path) = report {
                write_atomic(path, json_string(&rep)?.as_bytes())?;
            }
            let reports = [rep];
            Ok(Outcome { body: report_rows(&reports, fmt(Format::Json))?, checks: report_checks(&reports) })
        }
        Command::VerifyCorollary { weight, p, q, digits } => {
            check_digits(*digits)?;
            let form = build_form(*weight, 1)?;
            let reports = [timed(corollary_sides(&form, *p, *q, *digits)?)];
            Ok(Outcome { body: report_rows(&reports, fmt(Format::Json))?, checks: report_checks(&reports) })
        }
        Command::VerifyLemma1 { weight, p, r, q, s_re, s_im, digits } => {
            check_digits(*digits)?;
            let form = build_form(*weight, 1)?;
            let s = ApComplex::from_f64_parts(*s_re, *s_im, *digits);
            let (a, b, residual) = lemma1_residual(&form, *p, *r, *q, &s, *digits)?;
            let tolerance = 10f64.powi(-(*digits as i32 - 10));
            let rows = [ResidualOut {
                case: format!("lemma1 k={weight} p={p} r={r} q={q} s={s_re}+{s_im}i"),
                lhs: Some(ComplexRepr::from_ap(&a)),
                rhs: Some(ComplexRepr::from_ap(&b)),
                residual,
                tolerance,
                pass: residual < tolerance,
            }];
            Ok(Outcome { body: residual_table(&rows, fmt(Format::Text))?, checks: residual_checks(&rows) })
        }
        Command::VerifyFe { count, max_b, seed, digits } => {
            check_digits(*digits)?;
            if *max_b < 1 {
                return Err(Error::InvalidInput("--max-b must be at least 1".into()));
            }
            let cases = random_fe_cases(*count, *max_b, *seed);
            let tolerance = 10f64.powi(-(*digits as i32 - 10));
            let rows = cases
                .par_iter()
                .map(|c: &FeCase| {
                    let residual = fe_case_residual(c, *digits)?;
                    Ok(ResidualOut {
                        case: format!("fe k={} a/b={}/{} s={}+{}i", c.weight, c.a, c.b, c.s_re, c.s_im),
                        lhs: None,
                        rhs: None,
                        residual,
                        tolerance,
                        pass: residual < tolerance,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome { body: residual_table(&rows, fmt(Format::Text))?, checks: residual_checks(&rows) })
        }
        Command::VerifyTransforms { which, digits, tol } => {
            check_digits(*digits)?;
            if !(*tol > 0.0) {
                return Err(Error::InvalidInput("--tol must be positive".into()));
            }
            let rows: Vec<ResidualOut> = transform_cases(*which, *tol, *digits)?
                .into_iter()
                .map(|c| ResidualOut {
                    pass: c.passes(),
                    case: c.case,
                    lhs: Some(ComplexRepr::from_ap(&c.lhs)),
                    rhs: Some(ComplexRepr::from_ap(&c.rhs)),
                    residual: c.residual,
                    tolerance: c.tolerance,
                })
                .collect();
            Ok(Outcome { body: residual_table(&rows, fmt(Format::Csv))?, checks: residual_checks(&rows) })
        }
        Command::Batch { config, digits } => {
            let text = std::fs::read_to_string(config)?;
            let cfg: BatchConfig = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
            let digits = digits.unwrap_or(cfg.digits);
            check_digits(digits)?;
            let cases = cfg.expand()?;
            // collect keeps input order regardless of completion order
            let reports = cases.par_iter().map(|c| run_case(c, digits).map(timed)).collect::<Result<Vec<_>>>()?;
            let body = match fmt(Format::Json) {
                Format::Json => json_string(&reports)?,
                f => report_rows(&reports, f)?,
            };
            Ok(Outcome { body, checks: report_checks(&reports) })
        }
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let written = match &cli.output {
        Some(path) => write_atomic(path, outcome.body.as_bytes()),
        None => out.write_all(outcome.body.as_bytes()).map_err(Error::from),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    match outcome.worst() {
        None => 0,
        Some((label, residual, tol)) => {
            let failed = outcome.checks.iter().filter(|c| !(c.1 < c.2)).count();
            let _ = writeln!(err, "{failed} of {} checks failed; worst: {label} residual {residual:.3e} (tolerance {tol:.0e})", outcome.checks.len());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("twistrec").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(run_capture(&["verify-theorem1", "--weight", "12"]).0, 2);
        assert_eq!(run_capture(&["no-such-command"]).0, 2);
        let (code, _, err) = run_capture(&["verify-theorem1", "--weight", "12", "--p", "3", "--q", "9", "--r", "5"]);
        assert_eq!(code, 2);
        assert!(err.contains("9"), "{err}");
        assert_eq!(run_capture(&["verify-transforms", "--which", "Z"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("tau-table"));
    }

    #[test]
    fn tau_table_csv() {
        let (code, out, _) = run_capture(&["tau-table", "--weight", "12", "--n", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,a_n\n1,1\n2,-24\n3,252\n4,-1472\n");
    }

    #[test]
    fn grid_expansion_order() {
        let cfg = BatchConfig {
            digits: 30,
            cases: vec![],
            grid: Some(BatchGrid { identity: BatchIdentity::Theorem1, weights: vec![12], primes: vec![3, 5, 7] }),
        };
        let cases = cfg.expand().unwrap();
        assert_eq!(cases.len(), 6);
        assert_eq!((cases[0].p, cases[0].q, cases[0].r), (3, 5, Some(7)));
        assert_eq!((cases[5].p, cases[5].q, cases[5].r), (7, 5, Some(3)));
        let cfg = BatchConfig { digits: 30, cases: vec![], grid: None };
        assert!(cfg.expand().is_err());
    }
}

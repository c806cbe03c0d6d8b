//! Command-line front end.
//!
//! Every subcommand builds a JSON report `{ "manifest": .., "report": .. }`
//! and optionally a CSV table. Exit codes: 0 when every check passes,
//! 1 when a check fails, 2 for invalid arguments or unreadable input.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::certificates::{
    decomposition_holds, g_closed_form, g_sum_form, verify_theorem2, CertificateReport, Instance,
    VerifyOptions,
};
use crate::error::Error;
use crate::exactnum::{
    factorial, falling_factorial, format_rational, int, ratio, serde_rational, Rational,
};
use crate::laurentk::{
    fit_upper_constant, lower_bound_verified, lower_condition_holds, sos_rank, theoretical_bounds,
    RankReport, SearchOptions, TheoreticalBounds,
};
use crate::moments::{SymmetricAssignment, MAX_DIM};
use crate::symsos::{build_reduced, check_reduced, ReducedCriterion, ReducedVerdict};
use crate::unipoly::{alternating_moment, partial_fractions};

pub const TOOL: &str = "lasserre-sym";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "n",
    "d",
    "t",
    "normalization_sum",
    "g_sum",
    "g_closed",
    "reduced_psd",
    "bruteforce_psd",
    "pass",
];

pub const RANK_CSV_HEADER: [&str; 4] = [
    "n",
    "rank",
    "first_negative_margin_t",
    "lower_search_values",
];

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Exact SoS certificates for symmetric binary problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the degree-2d certificate for one instance.
    Theorem2(Theorem2Args),
    /// Verify the certificate over a grid of instances.
    #[command(name = "theorem2-sweep")]
    Theorem2Sweep(SweepArgs),
    /// Rank of the empty polytope K.
    #[command(name = "rank-k")]
    RankK(RankArgs),
    /// Reduced PSD criterion for a weights file.
    Criterion(CriterionArgs),
    /// Exact identity and partial-fraction regressions.
    Identity(IdentityArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Directory for report files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Embed the wall time in the manifest (reports stop being byte-reproducible).
    #[arg(long)]
    record_time: bool,
}

#[derive(Args, Debug)]
struct Theorem2Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    skip_bruteforce: bool,
    /// Largest moment matrix dimension checked by brute force.
    #[arg(long, default_value_t = MAX_DIM)]
    max_dim: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    n_max: usize,
    /// Largest d; every admissible d when absent.
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    skip_bruteforce: bool,
    #[arg(long, default_value_t = 256)]
    max_dim: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    n: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restarts of the root-form search; 0 disables the search.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Constant C in the upper bound n - C n^(1/3).
    #[arg(long, default_value_t = 1.0)]
    bound_constant: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CriterionArgs {
    /// JSON file `{ "n": .., "weights": ["p/q", ..] }`.
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    t: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[arg(long, default_value_t = 5)]
    d_max: usize,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Pass/fail record of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckResult {
    fn new(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            witness: None,
        }
    }

    fn with_witness(mut self, w: Value) -> Self {
        if !self.pass {
            self.witness = Some(w);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<CheckResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub checks: CheckSummary,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.checks.failed.is_empty()
    }
}

struct Outcome {
    subcommand: &'static str,
    params: BTreeMap<String, Value>,
    seed: Option<u64>,
    checks: Vec<CheckResult>,
    report: Value,
    csv: Vec<Vec<String>>,
    csv_header: Vec<String>,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let start = Instant::now();
    let (output, result) = match cli.command {
        Command::Theorem2(a) => (a.output.clone(), theorem2(&a)),
        Command::Theorem2Sweep(a) => (a.output.clone(), theorem2_sweep(&a)),
        Command::RankK(a) => (a.output.clone(), rank_k(&a)),
        Command::Criterion(a) => (a.output.clone(), criterion(&a)),
        Command::Identity(a) => (a.output.clone(), identity(&a)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let elapsed = start.elapsed().as_millis() as u64;
    eprintln!("wall time: {elapsed} ms");

    let total = outcome.checks.len();
    let failed: Vec<CheckResult> = outcome.checks.into_iter().filter(|c| !c.pass).collect();
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        subcommand: outcome.subcommand.into(),
        params: outcome.params,
        seed: outcome.seed,
        wall_time_ms: output.record_time.then_some(elapsed),
        checks: CheckSummary {
            total,
            passed: total - failed.len(),
            failed,
        },
    };
    for f in &manifest.checks.failed {
        eprintln!("check failed: {}", f.name);
    }
    let passed = manifest.all_passed();
    let doc = json!({ "manifest": manifest, "report": outcome.report });
    if let Err(e) = emit(
        &output,
        outcome.subcommand,
        &doc,
        &outcome.csv_header,
        &outcome.csv,
    ) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn emit(
    output: &OutputArgs,
    name: &str,
    doc: &Value,
    header: &[String],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let json_text = serde_json::to_string_pretty(doc)? + "\n";
    let csv_text = if matches!(output.format, Format::Csv | Format::Both) {
        Some(render_csv(header, rows)?)
    } else {
        None
    };
    let want_json = matches!(output.format, Format::Json | Format::Both);
    match &output.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            if want_json {
                fs::write(dir.join(format!("{name}.json")), &json_text)?;
            }
            if let Some(c) = &csv_text {
                fs::write(dir.join(format!("{name}.csv")), c)?;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            if want_json {
                out.write_all(json_text.as_bytes())?;
            }
            if let Some(c) = &csv_text {
                out.write_all(c.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> std::io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn certificate_checks(r: &CertificateReport) -> Vec<CheckResult> {
    let tag = format!("n={},d={}", r.instance.n, r.instance.d);
    let bf_ok = r.bruteforce_psd.verdict.as_ref().is_none_or(|v| v.is_psd);
    vec![
        CheckResult::new(
            format!("{tag}:middle_band_positive"),
            r.middle_band_positive,
        )
        .with_witness(json!({ "z": to_value(&SerRationals(&r.z)) })),
        CheckResult::new(format!("{tag}:decomposition"), r.decomposition_verified),
        CheckResult::new(
            format!("{tag}:normalization_positive"),
            r.normalization_sum.is_positive(),
        )
        .with_witness(json!(format_rational(&r.normalization_sum))),
        CheckResult::new(format!("{tag}:reduced_psd"), r.reduced_psd.is_psd)
            .with_witness(to_value(&r.reduced_psd.failure)),
        CheckResult::new(format!("{tag}:bruteforce_psd"), bf_ok)
            .with_witness(to_value(&r.bruteforce_psd.verdict)),
        CheckResult::new(
            format!("{tag}:objective_equals_g"),
            r.objective_raw == r.g_closed,
        )
        .with_witness(json!({
            "objective": format_rational(&r.objective_raw),
            "g_closed": format_rational(&r.g_closed),
        })),
        CheckResult::new(format!("{tag}:g_sum_equals_closed"), r.g_sum == r.g_closed).with_witness(
            json!({
                "g_sum": format_rational(&r.g_sum),
                "g_closed": format_rational(&r.g_closed),
            }),
        ),
        CheckResult::new(format!("{tag}:g_negative"), r.g_closed.is_negative()),
    ]
}

struct SerRationals<'a>(&'a [Rational]);

impl Serialize for SerRationals<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rational::vec::serialize(self.0, s)
    }
}

fn sweep_row(r: &CertificateReport) -> Vec<String> {
    let bf = match &r.bruteforce_psd.verdict {
        Some(v) => v.is_psd.to_string(),
        None => "skipped".into(),
    };
    vec![
        r.instance.n.to_string(),
        r.instance.d.to_string(),
        r.instance.t.to_string(),
        format_rational(&r.normalization_sum),
        format_rational(&r.g_sum),
        format_rational(&r.g_closed),
        r.reduced_psd.is_psd.to_string(),
        bf,
        r.pass.to_string(),
    ]
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn theorem2(a: &Theorem2Args) -> crate::Result<Outcome> {
    let inst = Instance::new(a.n, a.d)?;
    let opts = VerifyOptions {
        skip_bruteforce: a.skip_bruteforce,
        bruteforce_max_dim: a.max_dim,
        ..VerifyOptions::default()
    };
    let report = verify_theorem2(&inst, &opts)?;
    Ok(Outcome {
        subcommand: "theorem2",
        params: params(&[
            ("n", json!(a.n)),
            ("d", json!(a.d)),
            ("skip_bruteforce", json!(a.skip_bruteforce)),
            ("max_dim", json!(a.max_dim)),
        ]),
        seed: None,
        checks: certificate_checks(&report),
        csv: vec![sweep_row(&report)],
        csv_header: header(&SWEEP_CSV_HEADER),
        report: to_value(&report),
    })
}

fn theorem2_sweep(a: &SweepArgs) -> crate::Result<Outcome> {
    if a.n_max < 3 {
        return Err(Error::InvalidInstance(format!(
            "n-max must be at least 3, got {}",
            a.n_max
        )));
    }
    if a.d_max == Some(0) {
        return Err(Error::InvalidInstance("d-max must be positive".into()));
    }
    let grid: Vec<Instance> = (3..=a.n_max)
        .step_by(2)
        .flat_map(|n| {
            let m = (n - 1) / 2;
            let top = a.d_max.map_or(m, |d| d.min(m));
            (1..=top).map(move |d| Instance::new(n, d))
        })
        .collect::<crate::Result<_>>()?;
    let opts = VerifyOptions {
        skip_bruteforce: a.skip_bruteforce,
        bruteforce_max_dim: a.max_dim,
        ..VerifyOptions::default()
    };
    let reports: Vec<CertificateReport> = grid
        .par_iter()
        .map(|inst| verify_theorem2(inst, &opts))
        .collect::<crate::Result<_>>()?;
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "n": r.instance.n,
                "d": r.instance.d,
                "t": r.instance.t,
                "normalization_sum": format_rational(&r.normalization_sum),
                "objective": format_rational(&r.objective_raw),
                "g_sum": format_rational(&r.g_sum),
                "g_closed": format_rational(&r.g_closed),
                "reduced_psd": r.reduced_psd.is_psd,
                "bruteforce": to_value(&r.bruteforce_psd),
                "pass": r.pass,
            })
        })
        .collect();
    Ok(Outcome {
        subcommand: "theorem2-sweep",
        params: params(&[
            ("n_max", json!(a.n_max)),
            ("d_max", json!(a.d_max)),
            ("skip_bruteforce", json!(a.skip_bruteforce)),
            ("max_dim", json!(a.max_dim)),
        ]),
        seed: None,
        checks: reports.iter().flat_map(certificate_checks).collect(),
        csv: reports.iter().map(sweep_row).collect(),
        csv_header: header(&SWEEP_CSV_HEADER),
        report: json!({ "instances": rows }),
    })
}

/// `rank-k` payload for one `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    #[serde(flatten)]
    pub rank: RankReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<TheoreticalBounds>,
    pub lower_bound_verified: bool,
}

fn rank_checks(r: &RankReport) -> Vec<CheckResult> {
    let n = r.n;
    let mut checks = vec![
        CheckResult::new(
            format!("n={n}:rank_at_most_n"),
            r.rank.is_some_and(|k| k <= n),
        ),
        CheckResult::new(
            format!("n={n}:monotone_in_t"),
            r.monotonicity_violations.is_empty(),
        )
        .with_witness(json!(r.monotonicity_violations)),
    ];
    for l in &r.levels {
        if l.upper_cert_margin.is_negative() {
            checks.push(
                CheckResult::new(
                    format!("n={n},t={}:negative_margin_infeasible", l.t),
                    !l.feasible,
                )
                .with_witness(json!(format_rational(&l.upper_cert_margin))),
            );
        }
        if let Some(found) = l.lower_search_found_below_half {
            checks.push(
                CheckResult::new(
                    format!("n={n},t={}:search_agrees", l.t),
                    found != l.feasible,
                )
                .with_witness(json!({
                    "feasible": l.feasible,
                    "best": l.lower_search_best,
                })),
            );
        }
    }
    checks
}

fn rank_k(a: &RankArgs) -> crate::Result<Outcome> {
    let ns: Vec<usize> = match (a.n, a.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (2..=m).collect(),
        (None, None) => unreachable!("clap requires one of --n, --n-max"),
    };
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidLevel { t: 0, n: bad });
    }
    if ns.is_empty() {
        return Err(Error::InvalidInstance("n-max must be at least 2".into()));
    }
    if !a.bound_constant.is_finite() {
        return Err(Error::InvalidInstance(
            "bound constant must be finite".into(),
        ));
    }
    let search = (a.restarts > 0).then_some(SearchOptions {
        restarts: a.restarts,
        seed: a.seed,
    });
    let entries: Vec<RankEntry> = ns
        .par_iter()
        .map(|&n| -> crate::Result<RankEntry> {
            Ok(RankEntry {
                rank: sos_rank(n, search.as_ref())?,
                bounds: if n >= 4 {
                    Some(theoretical_bounds(n, a.bound_constant)?)
                } else {
                    None
                },
                lower_bound_verified: lower_bound_verified(n)?,
            })
        })
        .collect::<crate::Result<_>>()?;

    let mut checks: Vec<CheckResult> = entries.iter().flat_map(|e| rank_checks(&e.rank)).collect();
    for e in &entries {
        if lower_condition_holds(e.rank.n) {
            checks.push(CheckResult::new(
                format!("n={}:rank_at_least_sqrt_n_over_4", e.rank.n),
                e.lower_bound_verified,
            ));
        }
    }
    let decreasing_in_n: Vec<usize> = entries
        .windows(2)
        .filter(|w| w[1].rank.rank < w[0].rank.rank)
        .map(|w| w[1].rank.n)
        .collect();
    let fit = if ns.len() > 1 {
        Some(fit_upper_constant(ns[0], *ns.last().unwrap())?)
    } else {
        None
    };
    let csv = entries
        .iter()
        .map(|e| {
            let r = &e.rank;
            vec![
                r.n.to_string(),
                r.rank.map_or(String::new(), |k| k.to_string()),
                r.first_negative_margin_t
                    .map_or(String::new(), |k| k.to_string()),
                r.levels
                    .iter()
                    .filter_map(|l| l.lower_search_best.map(|v| v.to_string()))
                    .collect::<Vec<_>>()
                    .join(";"),
            ]
        })
        .collect();
    let mut p = vec![
        ("restarts", json!(a.restarts)),
        ("bound_constant", json!(a.bound_constant)),
    ];
    match a.n {
        Some(n) => p.push(("n", json!(n))),
        None => p.push(("n_max", json!(a.n_max))),
    }
    Ok(Outcome {
        subcommand: "rank-k",
        params: params(&p),
        seed: Some(a.seed),
        checks,
        csv,
        csv_header: header(&RANK_CSV_HEADER),
        report: json!({
            "entries": entries,
            "rank_decreases_at_n": decreasing_in_n,
            "upper_fit": fit,
        }),
    })
}

/// Input of the `criterion` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub n: usize,
    #[serde(with = "serde_rational::vec")]
    pub weights: Vec<Rational>,
}

fn read_weights(path: &Path) -> crate::Result<SymmetricAssignment> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInstance(format!("cannot read {}: {e}", path.display())))?;
    let file: WeightsFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInstance(format!("bad weights file {}: {e}", path.display())))?;
    SymmetricAssignment::new(file.n, file.weights)
}

fn criterion(a: &CriterionArgs) -> crate::Result<Outcome> {
    let w = read_weights(&a.weights)?;
    let reduced: ReducedCriterion = build_reduced(&w, a.t)?;
    let verdict: ReducedVerdict = check_reduced(&reduced)?;
    let check = CheckResult::new(format!("n={},t={}:reduced_psd", w.n, a.t), verdict.is_psd)
        .with_witness(to_value(&verdict.failure));
    let csv = reduced
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.h.to_string(),
                b.a.len().to_string(),
                b.b.len().to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        subcommand: "criterion",
        params: params(&[
            ("weights", json!(a.weights.display().to_string())),
            ("t", json!(a.t)),
        ]),
        seed: None,
        checks: vec![check],
        csv,
        csv_header: header(&["h", "a_size", "b_size"]),
        report: json!({
            "n": w.n,
            "t": a.t,
            "weights": to_value(&w),
            "criterion": reduced,
            "verdict": verdict,
        }),
    })
}

fn partial_fraction_checks(inst: &Instance) -> Vec<CheckResult> {
    let tag = format!("n={},d={}", inst.n, inst.d);
    let b = 2 * inst.d as u32 - 1;
    let a = inst.pole(2 * inst.d - 2);
    let pf = partial_fractions(&a, b);
    let pointwise = (0..=inst.n).all(|k| {
        let x = int(k as i64);
        pf.eval(&x) == Rational::one() / falling_factorial(&(&x - &a), b)
    });
    let residues: Rational = pf.poles.iter().map(|p| p.coefficient.clone()).sum();
    let residues_ok = b == 1 || residues.is_zero();
    let nn = inst.n as u32;
    let moments_ok = (0..nn).all(|c| alternating_moment(nn, c).is_zero())
        && alternating_moment(nn, nn)
            == factorial(nn) * int(if nn.is_multiple_of(2) { 1 } else { -1 });
    vec![
        CheckResult::new(format!("{tag}:partial_fractions_pointwise"), pointwise),
        CheckResult::new(format!("{tag}:partial_fraction_residues"), residues_ok)
            .with_witness(json!(format_rational(&residues))),
        CheckResult::new(format!("{tag}:alternating_moments"), moments_ok),
    ]
}

fn identity(a: &IdentityArgs) -> crate::Result<Outcome> {
    if a.d_max == 0 || a.m_max == 0 {
        return Err(Error::InvalidInstance(
            "d-max and m-max must be positive".into(),
        ));
    }
    let grid: Vec<Instance> = (1..=a.d_max)
        .flat_map(|d| (d..=a.m_max).map(move |m| Instance::new(2 * m + 1, d)))
        .collect::<crate::Result<_>>()?;
    let rows: Vec<(Instance, Rational, Rational, bool, Vec<CheckResult>)> = grid
        .par_iter()
        .map(|inst| -> crate::Result<_> {
            let sum = g_sum_form(inst.d, inst.n)?;
            let closed = g_closed_form(inst.d, inst.n)?;
            let decomposition = decomposition_holds(inst)?;
            Ok((
                *inst,
                sum,
                closed,
                decomposition,
                partial_fraction_checks(inst),
            ))
        })
        .collect::<crate::Result<_>>()?;
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    let mut csv = Vec::new();
    for (inst, sum, closed, decomposition, pf) in rows {
        let tag = format!("n={},d={}", inst.n, inst.d);
        let witness = json!({ "d": inst.d, "n": inst.n, "g_sum": format_rational(&sum), "g_closed": format_rational(&closed) });
        checks.push(
            CheckResult::new(format!("{tag}:g_sum_equals_closed"), sum == closed)
                .with_witness(witness.clone()),
        );
        checks.push(
            CheckResult::new(format!("{tag}:g_negative"), closed.is_negative())
                .with_witness(witness.clone()),
        );
        if inst.d == 1 {
            checks.push(
                CheckResult::new(format!("{tag}:g_is_minus_quarter"), closed == ratio(-1, 4))
                    .with_witness(witness),
            );
        }
        checks.push(CheckResult::new(
            format!("{tag}:decomposition"),
            decomposition,
        ));
        checks.extend(pf);
        csv.push(vec![
            inst.d.to_string(),
            inst.n.to_string(),
            format_rational(&sum),
            format_rational(&closed),
            (sum == closed).to_string(),
        ]);
        entries.push(json!({
            "d": inst.d,
            "n": inst.n,
            "g_sum": format_rational(&sum),
            "g_closed": format_rational(&closed),
            "agree": sum == closed,
            "decomposition": decomposition,
        }));
    }
    Ok(Outcome {
        subcommand: "identity",
        params: params(&[("d_max", json!(a.d_max)), ("m_max", json!(a.m_max))]),
        seed: None,
        checks,
        csv,
        csv_header: header(&["d", "n", "g_sum", "g_closed", "agree"]),
        report: json!({ "identities": entries }),
    })
}

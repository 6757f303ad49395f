//! Command-line front end.
//!
//! `run` parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 when a certificate is violated or a computation
//! fails, 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bounds::{
    improved_threshold, lower_bound_closed, square_completion, upper_bound_interior, BudgetEvaluator,
};
use crate::counting::{
    complement_identity_check, count_closed, count_interior, IdentityOutcome, MembershipPolicy,
};
use crate::curve::make_p_ellipse;
use crate::error::Error;
use crate::spectra::{minimizing_aspect, nth_value, SpectrumMode};
use crate::stretch::{
    argmax_interior, fit_decay, log_grid, optimize, sweep, OptimizeMode, OptimumReport, SInterval,
    SweepRecord,
};

pub const SWEEP_COLUMNS: [&str; 7] = [
    "r",
    "dist_to_one",
    "best_count",
    "predicted_count",
    "residual",
    "bracket_lo",
    "bracket_hi",
];

#[derive(Parser, Debug)]
#[command(name = "lattice-stretch", version, about = "Lattice points under stretched p-ellipses")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count lattice points inside or on rΓ(s).
    Count(CountArgs),
    /// Exact optimal stretch set at one radius.
    Optimal(OptimalArgs),
    /// Optimal stretch sets over a grid of radii, with a decay fit.
    Sweep(SweepArgs),
    /// Check a family of inequalities on random samples.
    Verify(VerifyArgs),
    /// Rectangle and product-domain eigenvalue experiments.
    Spectrum(SpectrumArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct Tolerance {
    /// Relative inward rounding of the membership test, at most 1e-6.
    #[arg(long, default_value_t = MembershipPolicy::DEFAULT_TOL)]
    tol_rel: f64,
}

impl Tolerance {
    fn policy(self) -> Result<MembershipPolicy, Error> {
        MembershipPolicy::new(self.tol_rel)
    }
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Curve exponent: |x|^p + |y|^p = 1
    #[arg(long)]
    p: f64,
    /// Dilation radius
    #[arg(long)]
    r: f64,
    /// Stretch factor: x is compressed by s, y stretched by s
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Include points on the axes and the origin.
    #[arg(long)]
    closed: bool,
    #[command(flatten)]
    tol: Tolerance,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    MaxInterior,
    MinClosed,
}

impl From<ModeArg> for OptimizeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::MaxInterior => OptimizeMode::MaxInterior,
            ModeArg::MinClosed => OptimizeMode::MinClosed,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct OptimalArgs {
    /// Curve exponent: |x|^p + |y|^p = 1
    #[arg(long)]
    p: f64,
    /// Dilation radius
    #[arg(long)]
    r: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::MaxInterior)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
    #[command(flatten)]
    tol: Tolerance,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Curve exponent: |x|^p + |y|^p = 1
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::MaxInterior)]
    mode: ModeArg,
    /// Smallest radius of the grid
    #[arg(long)]
    r_min: f64,
    /// Largest radius of the grid
    #[arg(long)]
    r_max: f64,
    /// Number of log-spaced radii.
    #[arg(long, default_value_t = 40, conflicts_with = "r_step")]
    points: usize,
    /// Linear spacing instead of log spacing.
    #[arg(long)]
    r_step: Option<f64>,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    /// Write the records here; the fit summary then goes to stdout.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[command(flatten)]
    tol: Tolerance,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Suite {
    Upper,
    Lower,
    Budget,
    Brackets,
    SquareCompletion,
    ComplementIdentity,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Curve exponent: |x|^p + |y|^p = 1
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: Tolerance,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpectrumKind {
    Rectangle,
    Product,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = SpectrumKind::Rectangle)]
    mode: SpectrumKind,
    /// Factor dimension in product mode.
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Eigenvalue indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u64>,
    /// Print λₙ at this aspect instead of minimizing over the aspect.
    #[arg(long)]
    s: Option<f64>,
}

/// Formats with 12 significant digits, trailing zeros dropped.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round12(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn fmt_interval(iv: &SInterval) -> String {
    if iv.lo == iv.hi && iv.lo_closed && iv.hi_closed {
        return format!("{{{}}}", fmt12(iv.lo));
    }
    format!(
        "{}{}, {}{}",
        if iv.lo_closed { '[' } else { '(' },
        fmt12(iv.lo),
        fmt12(iv.hi),
        if iv.hi_closed { ']' } else { ')' }
    )
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::NotApplicable(_)
            | Error::HypothesisUnavailable(_)
            | Error::BracketNotValid { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Numeric(format!("csv error: {e}"))
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Count(a) => cmd_count(a, out),
        Command::Optimal(a) => cmd_optimal(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Numeric(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn cmd_count(a: CountArgs, out: &mut dyn Write) -> CmdResult {
    let policy = a.tol.policy()?;
    let curve = make_p_ellipse(a.p)?;
    let n = if a.closed {
        count_closed(&curve, a.r, a.s, policy)?
    } else {
        count_interior(&curve, a.r, a.s, policy)?
    };
    writeln!(out, "{n}")?;
    Ok(0)
}

fn report_json(rep: &OptimumReport, policy: MembershipPolicy) -> Value {
    json!({
        "meta": meta(rep.p.unwrap_or(f64::NAN), rep.mode, policy),
        "report": serde_json::to_value(rep).expect("report serializes"),
    })
}

fn meta(p: f64, mode: OptimizeMode, policy: MembershipPolicy) -> Value {
    json!({
        "p": p,
        "mode": mode.name(),
        "tol_rel": policy.tol_rel(),
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn cmd_optimal(a: OptimalArgs, out: &mut dyn Write) -> CmdResult {
    let policy = a.tol.policy()?;
    let curve = make_p_ellipse(a.p)?;
    let mode: OptimizeMode = a.mode.into();
    let rep = match optimize(&curve, a.r, mode, policy) {
        Ok(rep) => rep,
        Err(Error::NoLatticePoint { .. }) => {
            match a.format {
                TextFormat::Text => {
                    writeln!(out, "mode={} p={} r={}", mode.name(), fmt12(a.p), fmt12(a.r))?;
                    writeln!(out, "best_count=0")?;
                    writeln!(out, "flag=no-lattice-point")?;
                }
                TextFormat::Json => {
                    let v = json!({
                        "meta": meta(a.p, mode, policy),
                        "report": null,
                        "flag": "no-lattice-point",
                    });
                    writeln!(out, "{}", round_json(v))?;
                }
            }
            return Ok(0);
        }
        Err(e) => return Err(e.into()),
    };
    match a.format {
        TextFormat::Text => {
            writeln!(out, "mode={} p={} r={}", mode.name(), fmt12(a.p), fmt12(a.r))?;
            writeln!(out, "best_count={}", rep.best_count)?;
            let parts: Vec<String> = rep.optimizer.iter().map(fmt_interval).collect();
            writeln!(out, "optimizer={}", parts.join(" ∪ "))?;
            writeln!(out, "dist_to_one={}", fmt12(rep.dist_to_one))?;
            writeln!(out, "witness_s={}", fmt12(rep.witness_s))?;
        }
        TextFormat::Json => writeln!(out, "{}", round_json(report_json(&rep, policy)))?,
    }
    Ok(0)
}

fn opt_field(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

fn sweep_grid(a: &SweepArgs) -> std::result::Result<Vec<f64>, Error> {
    match a.r_step {
        Some(step) => {
            if !(step > 0.0) || !(a.r_min > 0.0) || !(a.r_max >= a.r_min) {
                return Err(Error::InvalidArgument(format!(
                    "need 0 < r_min <= r_max and r_step > 0, got {} {} {step}",
                    a.r_min, a.r_max
                )));
            }
            let n = ((a.r_max - a.r_min) / step + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|i| a.r_min + step * i as f64).collect())
        }
        None => log_grid(a.r_min, a.r_max, a.points),
    }
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let policy = a.tol.policy()?;
    let grid = sweep_grid(&a)?;
    let mode: OptimizeMode = a.mode.into();
    let records = sweep(a.p, mode, &grid, policy)?;
    let e = (1.0f64 / 6.0).min(a.p / 2.0);
    let fit = fit_decay(&records, e);

    let mut body: Vec<u8> = Vec::new();
    match a.format {
        DataFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut body);
            w.write_record(SWEEP_COLUMNS)?;
            for rec in &records {
                w.write_record([
                    fmt12(rec.r),
                    opt_field(rec.dist_to_one),
                    rec.best_count.map(|c| c.to_string()).unwrap_or_default(),
                    fmt12(rec.predicted_count),
                    opt_field(rec.residual),
                    opt_field(rec.bracket_lo),
                    opt_field(rec.bracket_hi),
                ])?;
            }
            w.flush()?;
        }
        DataFormat::Json => {
            let fit_value = match &fit {
                Ok(f) => serde_json::to_value(f).expect("fit serializes"),
                Err(_) => Value::Null,
            };
            let mut doc = json!({
                "meta": meta(a.p, mode, policy),
                "records": serde_json::to_value(&records).expect("records serialize"),
                "fit": fit_value,
            });
            doc["meta"]["decay_exponent_reference"] = json!(e);
            if let Err(err) = &fit {
                doc["fit_error"] = json!(err.to_string());
            }
            body = serde_json::to_vec_pretty(&round_json(doc)).expect("json serializes");
            body.push(b'\n');
        }
    }

    let summary = fit_summary(&records, &fit);
    match &a.output {
        Some(path) => {
            std::fs::write(path, &body)?;
            write!(out, "{summary}")?;
        }
        None => {
            out.write_all(&body)?;
            if a.format == DataFormat::Csv {
                // Keep stdout a pure CSV document.
                write!(err, "{summary}")?;
            }
        }
    }
    Ok(0)
}

fn fit_summary(records: &[SweepRecord], fit: &crate::error::Result<crate::stretch::DecayFit>) -> String {
    let flagged = records.iter().filter(|r| r.flag.is_some()).count();
    let mut s = String::new();
    let _ = writeln!(s, "records={} flagged={flagged}", records.len());
    match fit {
        Ok(f) => {
            let _ = writeln!(
                s,
                "fit exponent={} envelope_constant={} n_used={}",
                fmt12(f.exponent),
                fmt12(f.envelope_constant),
                f.n_used
            );
        }
        Err(e) => {
            let _ = writeln!(s, "fit unavailable: {e}");
        }
    }
    s
}

struct Tally {
    pass: usize,
    total: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            pass: 0,
            total: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.pass += 1;
        } else if self.violations.len() < 20 {
            self.violations.push(detail());
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, spread: f64) -> f64 {
    rng.random_range(-spread..spread).exp()
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let policy = a.tol.policy()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut tally = Tally::new();
    let needs_curve = a.suite != Suite::SquareCompletion;
    let curve = if needs_curve { Some(make_p_ellipse(a.p)?) } else { None };
    match a.suite {
        Suite::Upper => {
            let c = curve.as_ref().expect("curve");
            for _ in 0..a.samples {
                let s = log_uniform(&mut rng, 1.5);
                let r = rng.random_range((2.0 * s / c.l()).max(0.5)..150.0);
                let bound = upper_bound_interior(c, r, s)?;
                let n = count_interior(c, r, s, policy)?;
                tally.record(n as f64 <= bound, || format!("r={} s={}: N={n} > {}", fmt12(r), fmt12(s), fmt12(bound)));
            }
        }
        Suite::Lower => {
            let c = curve.as_ref().expect("curve");
            for _ in 0..a.samples {
                let s = log_uniform(&mut rng, 1.5);
                let r = rng.random_range(0.5..150.0);
                let bound = lower_bound_closed(c, r, s)?;
                let n = count_closed(c, r, s, policy)?;
                tally.record(n as f64 >= bound, || format!("r={} s={}: N={n} < {}", fmt12(r), fmt12(s), fmt12(bound)));
            }
        }
        Suite::Budget => {
            let c = curve.as_ref().expect("curve");
            let eval = BudgetEvaluator::new(c)?;
            for _ in 0..a.samples {
                let s = log_uniform(&mut rng, 1.0);
                let r_lo = (s / c.l()).max(1.0 / (s * c.m()));
                let r = rng.random_range(r_lo..r_lo + 150.0);
                let b = eval.scaled(r, s, policy)?;
                tally.record(b.slack >= 0.0, || {
                    format!("r={} s={}: lhs={} > rhs={}", fmt12(r), fmt12(s), fmt12(b.lhs), fmt12(b.rhs))
                });
            }
        }
        Suite::Brackets => {
            let c = curve.as_ref().expect("curve");
            if a.p >= 1.0 {
                return Err(Failure::Usage("the brackets suite needs 0 < p < 1".into()));
            }
            let threshold = improved_threshold(c);
            let radii: Vec<f64> = (0..a.samples)
                .map(|_| rng.random_range(threshold..threshold + 60.0))
                .collect();
            let reports: Vec<_> = radii
                .par_iter()
                .map(|&r| argmax_interior(a.p, r, policy).map(|rep| (r, rep)))
                .collect::<crate::error::Result<_>>()?;
            for (r, rep) in reports {
                let (lo, hi) = (2.0 / (r * c.m()), 0.5 * r * c.l());
                let ok = rep.optimizer.iter().all(|iv| iv.lo >= lo && iv.hi <= hi);
                tally.record(ok, || format!("r={}: optimizer leaves [{}, {}]", fmt12(r), fmt12(lo), fmt12(hi)));
            }
        }
        Suite::SquareCompletion => {
            for _ in 0..a.samples {
                let s = log_uniform(&mut rng, 3.0);
                let t = rng.random_range(f64::MIN_POSITIVE..1.0);
                let (premise, bound) = square_completion(s, t)?;
                let ok = !premise || (s - 1.0).abs() <= bound;
                tally.record(ok, || format!("s={} t={}", fmt12(s), fmt12(t)));
            }
        }
        Suite::ComplementIdentity => {
            let c = curve.as_ref().expect("curve");
            for _ in 0..a.samples {
                let mut attempts = 0;
                let rep = loop {
                    attempts += 1;
                    if attempts > 1000 {
                        return Err(Failure::Numeric("no non-degenerate sample found".into()));
                    }
                    let s = log_uniform(&mut rng, 1.0);
                    let r = rng.random_range(2.0..80.0);
                    match complement_identity_check(c, r, s, policy) {
                        Ok(rep) if rep.outcome != IdentityOutcome::Degenerate => break (r, s, rep),
                        Ok(_) | Err(Error::NotApplicable(_)) => continue,
                        Err(e) => return Err(e.into()),
                    }
                };
                let (r, s, rep) = rep;
                tally.record(rep.outcome == IdentityOutcome::Pass, || {
                    format!("r={} s={}: {} != {}", fmt12(r), fmt12(s), rep.lhs, rep.rhs)
                });
            }
        }
    }
    for v in &tally.violations {
        writeln!(out, "violation: {v}")?;
    }
    writeln!(out, "{}/{} pass", tally.pass, tally.total)?;
    Ok(if tally.pass == tally.total { 0 } else { 1 })
}

fn cmd_spectrum(a: SpectrumArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mode = match a.mode {
        SpectrumKind::Rectangle => SpectrumMode::Rectangle,
        SpectrumKind::Product => SpectrumMode::Product { d: a.d },
    };
    if mode.is_approximate() {
        writeln!(out, "# approximate eigenvalues, product of two {}-dimensional factors", a.d)?;
    }
    match a.s {
        Some(s) => {
            let p = mode.p();
            let rows: Vec<String> = a
                .n
                .par_iter()
                .map(|&n| nth_value(p, s, n).map(|v| format!("{n},{},{}", fmt12(s), fmt12(v))))
                .collect::<crate::error::Result<_>>()?;
            writeln!(out, "n,s,lambda")?;
            for row in rows {
                writeln!(out, "{row}")?;
            }
        }
        None => {
            let rows: Vec<_> = a.n.par_iter().map(|&n| minimizing_aspect(n, mode)).collect();
            writeln!(out, "n,s_star,lambda_star")?;
            let mut failed = false;
            for (n, row) in a.n.iter().zip(rows) {
                match row {
                    Ok(opt) => writeln!(out, "{n},{},{}", fmt12(opt.s_star), fmt12(opt.lambda_star))?,
                    Err(e @ Error::InvalidArgument(_)) => return Err(e.into()),
                    Err(e) => {
                        failed = true;
                        writeln!(out, "{n},,")?;
                        writeln!(err, "n={n}: {e}")?;
                    }
                }
            }
            return Ok(if failed { 1 } else { 0 });
        }
    }
    Ok(0)
}

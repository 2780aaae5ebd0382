//! The `ckn` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::certify::{
    estimate_best_constant_1d, estimate_best_constant_radial, run_counterexample, verify_battery,
    Params, QuotientReport, SharpConstants, DEFAULT_EPS_SWEEP, DEFAULT_H_SWEEP, DEFAULT_J_MAX,
    DEFAULT_TRUNCATION,
};
use crate::envelope::compute_envelope;
use crate::error::Error;
use crate::grid::{Grid, DEFAULT_POINTS, DEFAULT_R_MIN_RATIO};
use crate::ndc::{k_profile, NdcReport, DEFAULT_M_MAX, DEFAULT_THRESHOLD};
use crate::weight::{annotate, WeightSpec};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ckn", version, about = "Weighted p = 1 CKN inequalities with non-doubling weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class of the weight near 0 (W0, Winf, Wa, unknown).
    Classify(Common),
    /// Monotone envelope, plateau mask and V^q per grid point.
    Envelope(Common),
    /// K(r) = |w / (r w')| on the non-plateau cells.
    KProfile(Common),
    /// Non-degenerate condition verdict and infinite-order detection.
    Ndc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: u32,
    },
    /// One-dimensional inequality on a seeded random battery.
    #[command(name = "verify-1d")]
    Verify1d {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        battery_size: usize,
    },
    /// n-dimensional inequality on a seeded random battery.
    VerifyNd {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        battery_size: usize,
    },
    /// Localized-family sweep for the one-dimensional best constant.
    #[command(name = "best-const-1d")]
    BestConst1d {
        #[command(flatten)]
        common: Common,
        /// Window anchor; defaults to eta/2, or 1 for an infinite eta.
        #[arg(long)]
        x: Option<f64>,
        /// Window widths.
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
    },
    /// Smoothed-indicator sweep for the radial best constant.
    BestConstRad {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Ramp widths.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Sequence on which the planar inequality degenerates without NDC.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_J_MAX)]
        j_max: u32,
        /// Exponent of the angular singularity; defaults to (1/q + 1)/2.
        #[arg(long)]
        s: Option<f64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Weight, e.g. "pow(1)", "expinv(1,-)", "prod(pow(2),expinv(1,+))".
    #[arg(long)]
    weight: Option<String>,
    /// Cutoff eta; "inf" is accepted by the one-dimensional commands.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Dimension; each command has its own default.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, env = "CKN_GRID_POINTS", default_value_t = DEFAULT_POINTS)]
    grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_R_MIN_RATIO)]
    r_min_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cutoff used in place of an infinite eta.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: f64,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error, Option<String>),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e, None)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

impl Common {
    fn config(&self, command: &str, n: Option<usize>, format: OutFormat, extra: Value) -> Value {
        let mut c = json!({
            "weight": self.weight,
            "eta": number(self.eta),
            "q": self.q,
            "n": n,
            "grid_points": self.grid_points,
            "r_min_ratio": self.r_min_ratio,
            "seed": self.seed,
            "truncation": self.truncation,
            "out_format": format,
            "out_path": self.out.as_ref().map(|p| p.display().to_string()),
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut c, extra) {
            m.extend(e);
        }
        json!({ "schema": SCHEMA, "version": VERSION, "command": command, "config": c })
    }

    fn spec(&self, allow_infinite: bool) -> Run<WeightSpec> {
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(crate::error::domain("q", self.q, "[1, inf)").into());
        }
        let text = self
            .weight
            .as_deref()
            .ok_or_else(|| Failure::Usage("--weight is required".into()))?;
        if !allow_infinite && !self.eta.is_finite() {
            return Err(Failure::Usage(
                "an infinite eta is only accepted by the one-dimensional commands".into(),
            ));
        }
        WeightSpec::parse(text, self.eta).map_err(|e| match e {
            Error::Parse { pos, .. } => Failure::Lib(e, Some(annotate(text, pos))),
            e => Failure::Lib(e, None),
        })
    }

    fn grid(&self, spec: &WeightSpec) -> Run<Grid> {
        if self.grid_points < 2 {
            return Err(Failure::Usage("--grid-points must be at least 2".into()));
        }
        Ok(Grid::for_eta(spec.effective_eta(self.truncation), self.grid_points, self.r_min_ratio)?)
    }
}

/// Where a command's document goes and in which format.
struct Sink<'a> {
    out: &'a mut dyn Write,
    file: Option<PathBuf>,
    format: OutFormat,
}

impl Sink<'_> {
    fn json(&mut self, mut doc: Value, payload: Value) -> Run<()> {
        if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
            d.extend(p);
        }
        let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    fn csv<R: Serialize>(&mut self, rows: impl IntoIterator<Item = R>) -> Run<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.write(&bytes)
    }

    fn write(&mut self, bytes: &[u8]) -> Run<()> {
        match &self.file {
            Some(p) => File::create(p)?.write_all(bytes)?,
            None => self.out.write_all(bytes)?,
        }
        Ok(())
    }
}

/// Runs `argv` (including the program name) against stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch_with_io(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// Runs `argv` writing the report to `out` and diagnostics to `err`, and
/// returns the exit code.
pub fn dispatch_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = match f {
                Failure::Usage(m) => writeln!(err, "error: {m}"),
                Failure::Lib(e, Some(caret)) => writeln!(err, "error: {e}\n{caret}"),
                Failure::Lib(e, None) => writeln!(err, "error: {e}"),
                Failure::Io(e) => writeln!(err, "error: {e}"),
            };
            EXIT_USAGE
        }
    }
}

fn exit(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

#[derive(Serialize)]
struct EnvelopeRow {
    r: f64,
    w: f64,
    v: f64,
    #[serde(rename = "Vq")]
    vq: f64,
    plateau: bool,
}

#[derive(Serialize)]
struct ClassRow {
    class: String,
}

#[derive(Serialize)]
struct KRow {
    r: f64,
    #[serde(rename = "K")]
    k: f64,
}

#[derive(Serialize)]
struct SweepRow<'a> {
    j: u32,
    eps_j: &'a str,
    lhs: f64,
    rhs: f64,
    quotient: f64,
}

#[derive(Serialize)]
struct ReportRow<'a> {
    index: usize,
    family: &'a str,
    lhs: f64,
    rhs: f64,
    quotient: f64,
    est_error: f64,
    theory_constant: f64,
    pass: bool,
}

fn report_rows(reports: &[QuotientReport]) -> Vec<ReportRow<'_>> {
    reports
        .iter()
        .enumerate()
        .map(|(index, r)| ReportRow {
            index,
            family: match r.params {
                Params::RandomPiecewiseLinear { .. } => "random_piecewise_linear",
                Params::RandomPolar { .. } => "random_polar",
                Params::Localized { .. } => "localized",
                Params::SmoothedIndicator { .. } => "smoothed_indicator",
                Params::Counterexample { .. } => "counterexample",
                Params::Given => "given",
            },
            lhs: r.lhs,
            rhs: r.rhs,
            quotient: r.quotient,
            est_error: r.est_error,
            theory_constant: r.theory_constant,
            pass: r.pass,
        })
        .collect()
}

fn run(command: Command, out: &mut dyn Write) -> Run<i32> {
    match command {
        Command::Classify(c) => {
            let spec = c.spec(true)?;
            let format = c.format.unwrap_or(OutFormat::Json);
            let mut sink = Sink { out, file: c.out.clone(), format };
            let class = spec.classify();
            match sink.format {
                OutFormat::Json => sink.json(c.config("classify", c.n, format, json!({})), json!({ "class": class }))?,
                OutFormat::Csv => sink.csv([ClassRow { class: class.to_string() }])?,
            }
            Ok(EXIT_OK)
        }
        Command::Envelope(c) => {
            let spec = c.spec(true)?;
            let grid = c.grid(&spec)?;
            let env = compute_envelope(&spec, spec.classify(), &grid, c.q)?;
            let format = c.format.unwrap_or(OutFormat::Csv);
            let mut sink = Sink { out, file: c.out.clone(), format };
            let cells = env.vq().len();
            // the last grid point repeats the last cell
            let rows = (0..grid.len()).map(|i| {
                let cell = i.min(cells - 1);
                EnvelopeRow {
                    r: grid.points()[i],
                    w: env.w()[i],
                    v: env.v()[i],
                    vq: env.vq()[cell],
                    plateau: env.plateau()[cell],
                }
            });
            match format {
                OutFormat::Csv => sink.csv(rows)?,
                OutFormat::Json => {
                    let payload = json!({
                        "kind": env.kind(),
                        "eta_tilde": number(env.eta_tilde()),
                        "truncated": env.is_truncated(),
                        "points": rows.collect::<Vec<_>>(),
                    });
                    sink.json(c.config("envelope", c.n, format, json!({})), payload)?
                }
            }
            Ok(EXIT_OK)
        }
        Command::KProfile(c) => {
            let spec = c.spec(false)?;
            let grid = c.grid(&spec)?;
            let env = compute_envelope(&spec, spec.classify(), &grid, c.q)?;
            let profile = k_profile(&spec, &env)?;
            let format = c.format.unwrap_or(OutFormat::Csv);
            let mut sink = Sink { out, file: c.out.clone(), format };
            match format {
                OutFormat::Csv => sink.csv(profile.samples.iter().map(|s| KRow { r: s.r, k: s.k }))?,
                OutFormat::Json => sink.json(
                    c.config("k-profile", c.n, format, json!({})),
                    json!({ "n_flagged": profile.n_flagged, "samples": profile.samples }),
                )?,
            }
            Ok(EXIT_OK)
        }
        Command::Ndc { common: c, threshold, m_max } => {
            let spec = c.spec(false)?;
            let grid = c.grid(&spec)?;
            let class = spec.classify();
            let env = compute_envelope(&spec, class, &grid, c.q)?;
            let report = NdcReport::compute(&spec, &env, class, threshold, m_max)?;
            let format = json_only(c.format, "ndc")?;
            let mut sink = Sink { out, file: c.out.clone(), format };
            let extra = json!({ "threshold": threshold, "m_max": m_max });
            let mut payload = serde_json::to_value(&report).map_err(io::Error::other)?;
            if let Value::Object(m) = &mut payload {
                m.insert("C0".into(), number(report.c0));
            }
            sink.json(c.config("ndc", c.n, format, extra), payload)?;
            Ok(EXIT_OK)
        }
        Command::Verify1d { common: c, battery_size } => {
            let n = c.n.unwrap_or(1);
            if n != 1 {
                return Err(Failure::Usage("verify-1d runs with n = 1; use verify-nd".into()));
            }
            battery(c, n, battery_size, "verify-1d", true, out)
        }
        Command::VerifyNd { common: c, battery_size } => {
            let n = c.n.unwrap_or(2);
            if n < 2 {
                return Err(Failure::Usage("verify-nd needs n >= 2; use verify-1d".into()));
            }
            battery(c, n, battery_size, "verify-nd", false, out)
        }
        Command::BestConst1d { common: c, x, h } => {
            let spec = c.spec(true)?;
            let grid = c.grid(&spec)?;
            let env = compute_envelope(&spec, spec.classify(), &grid, c.q)?;
            let x = x.unwrap_or(if spec.eta.is_finite() { 0.5 * spec.eta } else { 1.0 });
            let h = if h.is_empty() { DEFAULT_H_SWEEP.to_vec() } else { h };
            let (best, reports) = estimate_best_constant_1d(&spec, &env, c.q, x, &h)?;
            let pass = reports.iter().all(|r| r.pass);
            let format = c.format.unwrap_or(OutFormat::Json);
            let mut sink = Sink { out, file: c.out.clone(), format };
            match format {
                OutFormat::Csv => sink.csv(report_rows(&reports))?,
                OutFormat::Json => sink.json(
                    c.config("best-const-1d", Some(1), format, json!({ "x": x, "h": h })),
                    json!({ "inf_quotient": best, "pass": pass, "reports": reports }),
                )?,
            }
            Ok(exit(pass))
        }
        Command::BestConstRad { common: c, gamma, eps } => {
            let n = c.n.unwrap_or(2);
            let eps = if eps.is_empty() { DEFAULT_EPS_SWEEP.to_vec() } else { eps };
            let constants = SharpConstants::new(n, c.q, Some(gamma))?;
            let (best, reports) = estimate_best_constant_radial(n, c.q, gamma, &eps)?;
            let pass = reports.iter().all(|r| r.pass);
            let format = c.format.unwrap_or(OutFormat::Json);
            let mut sink = Sink { out, file: c.out.clone(), format };
            match format {
                OutFormat::Csv => sink.csv(report_rows(&reports))?,
                OutFormat::Json => sink.json(
                    c.config("best-const-rad", Some(n), format, json!({ "gamma": gamma, "eps": eps })),
                    json!({ "inf_quotient": best, "constants": constants, "pass": pass, "reports": reports }),
                )?,
            }
            Ok(exit(pass))
        }
        Command::Counterexample { common: c, j_max, s } => {
            let n = c.n.unwrap_or(2);
            let spec = c.spec(false)?;
            let grid = c.grid(&spec)?;
            let env = compute_envelope(&spec, spec.classify(), &grid, c.q)?;
            let rows = run_counterexample(&spec, &env, c.q, n, j_max, s)?;
            let rhs_increasing = rows.windows(2).all(|p| p[1].rhs > p[0].rhs);
            let quotient_decreasing = rows.windows(2).all(|p| p[1].quotient < p[0].quotient);
            let pass = rhs_increasing && quotient_decreasing;
            let format = c.format.unwrap_or(OutFormat::Json);
            let mut sink = Sink { out, file: c.out.clone(), format };
            match format {
                OutFormat::Csv => sink.csv(rows.iter().map(|r| SweepRow {
                    j: r.j,
                    eps_j: &r.eps_j,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    quotient: r.quotient,
                }))?,
                OutFormat::Json => sink.json(
                    c.config("counterexample", Some(n), format, json!({ "j_max": j_max, "s": s })),
                    json!({
                        "rhs_increasing": rhs_increasing,
                        "quotient_decreasing": quotient_decreasing,
                        "pass": pass,
                        "rows": rows,
                    }),
                )?,
            }
            Ok(exit(pass))
        }
    }
}

fn json_only(format: Option<OutFormat>, command: &str) -> Run<OutFormat> {
    match format {
        None | Some(OutFormat::Json) => Ok(OutFormat::Json),
        Some(OutFormat::Csv) => Err(Failure::Usage(format!("{command} emits JSON only"))),
    }
}

fn battery(
    c: Common,
    n: usize,
    battery_size: usize,
    command: &str,
    allow_infinite: bool,
    out: &mut dyn Write,
) -> Run<i32> {
    let spec = c.spec(allow_infinite)?;
    let grid = c.grid(&spec)?;
    let env = compute_envelope(&spec, spec.classify(), &grid, c.q)?;
    let b = verify_battery(&spec, &env, c.q, n, battery_size, c.seed)?;
    let pass = b.all_pass();
    let format = c.format.unwrap_or(OutFormat::Json);
    let mut sink = Sink { out, file: c.out.clone(), format };
    match format {
        OutFormat::Csv => sink.csv(report_rows(&b.reports))?,
        OutFormat::Json => {
            let mut payload = Map::new();
            payload.insert("pass".into(), json!(pass));
            payload.insert("min_quotient".into(), number(b.min_quotient()));
            if let Value::Object(m) = serde_json::to_value(&b).map_err(io::Error::other)? {
                payload.extend(m);
            }
            sink.json(
                c.config(command, Some(n), format, json!({ "battery_size": battery_size })),
                Value::Object(payload),
            )?
        }
    }
    Ok(exit(pass))
}

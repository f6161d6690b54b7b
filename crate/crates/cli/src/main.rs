//! `impatience`: analyses of discount functions, mixtures and
//! certainty-equivalent rates from the command line.
//!
//! Results are printed to stdout as JSON and written as CSV/JSON (and SVG
//! with `--svg`) into the output directory. Failures print a JSON error
//! record to stderr and exit with 2 (parse), 3 (domain) or 4 (io).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use impatience::ce::verify_ce_monotone;
use impatience::comparison::{
    classify, compare_by_index, convex_transform_test, fit_equal_di_exponent, invert, z_grid_for,
    Classification, Verdict, DEFAULT_TOL, NUMERIC_TOL,
};
use impatience::csv::Table;
use impatience::discount::{rate_profile, DerivativeMode, Family};
use impatience::figures::{self, Preset};
use impatience::household::{household_report, DEFAULT_HORIZON};
use impatience::io::{parse_bundle, parse_curve, parse_grid, parse_mixture, parse_spec};
use impatience::mixture::{decompose_index_with_tol, theorem_grid, verify_theorem_main_with_tol, Curve};
use impatience::svg::{render_svg, Style};
use impatience::{Discount, TimeGrid};

#[derive(Parser)]
#[command(name = "impatience", version, about = "Decreasing-impatience analysis of discount functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory for CSV, JSON and SVG artifacts.
    #[arg(long, global = true, env = "IMPATIENCE_OUT", value_name = "DIR")]
    out: Option<PathBuf>,

    /// Also write an SVG plot of each CSV.
    #[arg(long, global = true)]
    svg: bool,

    /// Evaluation grid as `t_min,t_max,count,lin|log`.
    #[arg(long, global = true, value_name = "GRID")]
    grid: Option<String>,

    /// Relative tolerance for flatness tests.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Use finite differences with this relative step for rate profiles.
    #[arg(long = "fd-step", global = true, value_name = "X")]
    fd_step: Option<f64>,

    /// Scenario parameter override (custom scenarios only).
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Rates, index of DI and classification of one discount function.
    Analyze { spec: PathBuf },
    /// Comparative DI of two discount functions or mixtures.
    Compare { a: PathBuf, b: PathBuf },
    /// Index decomposition and chain check for a mixture.
    Mix { mixture: PathBuf },
    /// Certainty-equivalent hyperbolic rate of a bundle.
    Ce { bundle: PathBuf },
    /// Reproduce a figure with its locked parameters.
    Figure {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=3))]
        number: u32,
    },
    /// A figure scenario with free parameters given by `--param`.
    Custom {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=3))]
        number: u32,
    },
    /// Two-member household choosing between 10 utiles now and 15 a period later.
    Household {
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: u32,
    },
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Domain { kind: &'static str, message: String },
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Domain { .. } => 3,
            Failure::Io(_) => 4,
        }
    }

    fn record(&self) -> Value {
        let (kind, message) = match self {
            Failure::Parse(m) => ("parse_error", m.as_str()),
            Failure::Domain { kind, message } => (*kind, message.as_str()),
            Failure::Io(m) => ("io_error", m.as_str()),
        };
        json!({ "error": kind, "message": message, "exit_code": self.code() })
    }
}

impl From<impatience::Error> for Failure {
    fn from(e: impatience::Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Domain {
                kind: e.kind(),
                message: e.to_string(),
            }
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Context {
    out: PathBuf,
    svg: bool,
    grid: Option<TimeGrid>,
    tol: Option<f64>,
    fd_step: Option<f64>,
}

impl Context {
    fn write(&self, file: &str, contents: &str) -> Outcome<PathBuf> {
        fs::create_dir_all(&self.out)
            .map_err(|e| Failure::Io(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(file);
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    /// Writes `<stem>.csv`, and `<stem>.svg` when requested.
    fn write_table(&self, stem: &str, table: &Table, style: &Style) -> Outcome<Vec<String>> {
        let mut written = vec![self.write(&format!("{stem}.csv"), &table.to_csv())?];
        if self.svg {
            written.push(self.write(&format!("{stem}.svg"), &render_svg(table, style)?)?);
        }
        Ok(written.iter().map(|p| p.display().to_string()).collect())
    }

    fn tol_for(&self, numeric: bool) -> f64 {
        self.tol
            .unwrap_or(if numeric || self.fd_step.is_some() { NUMERIC_TOL } else { DEFAULT_TOL })
    }

    /// User grid, or a default that covers the curve until it falls to
    /// [`DEFAULT_FLOOR`] (at most `t = 100`). Linear from 0, or log-spaced
    /// from `1e-3` for curves singular at the origin.
    fn grid_for(&self, curve: &dyn Discount) -> Outcome<TimeGrid> {
        if let Some(g) = &self.grid {
            return Ok(g.clone());
        }
        let (lo, hi) = curve.domain();
        let end = invert(curve, DEFAULT_FLOOR).unwrap_or(hi).min(hi).min(100.0);
        if curve.singular_at_origin() {
            Ok(TimeGrid::log(lo.max(1e-3), end, DEFAULT_POINTS)?)
        } else {
            Ok(TimeGrid::linear(lo, end, DEFAULT_POINTS)?)
        }
    }

    /// User grid, or the 400-point log grid on `[1e-3, 100]` used for index
    /// decompositions and chain checks.
    fn index_grid_for(&self, curve: &dyn Discount) -> Outcome<TimeGrid> {
        match (&self.grid, curve.domain()) {
            (Some(g), _) => Ok(g.clone()),
            (None, (lo, hi)) if lo == 0.0 && hi.is_infinite() => Ok(theorem_grid()),
            _ => self.grid_for(curve),
        }
    }
}

const DEFAULT_FLOOR: f64 = 0.01;
const DEFAULT_POINTS: usize = 400;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

fn is_tabulated(curve: &Curve) -> bool {
    match curve {
        Curve::Spec(s) => matches!(s.family(), Family::Tabulated(_)),
        Curve::Mixture(m) => m
            .flatten()
            .iter()
            .any(|(s, _)| matches!(s.family(), Family::Tabulated(_))),
    }
}

fn summarize(c: &Classification) -> Value {
    json!({
        "verdict": c.verdict,
        "index_verdict": c.index_verdict,
        "index_agrees": c.index_agrees(),
        "tolerance": c.tolerance,
        "evidence": c.evidence,
    })
}

fn as_value(r: impatience::Result<Value>) -> Value {
    r.unwrap_or_else(|e| json!({ "error": e.kind(), "message": e.to_string() }))
}

fn analyze(ctx: &Context, path: &Path) -> Outcome<Value> {
    let spec = parse_spec(&read(path)?)?;
    let tabulated = matches!(spec.family(), Family::Tabulated(_));
    let grid = ctx.grid_for(&spec)?;
    let tol = ctx.tol_for(tabulated);
    let mode = match ctx.fd_step {
        Some(step) => DerivativeMode::FiniteDifference { step },
        None => DerivativeMode::Analytic,
    };
    let profile = rate_profile(&spec, &grid, mode)?;
    let class = classify(&spec, &grid, tol)?;
    let rows = (0..profile.times.len())
        .map(|k| {
            vec![
                profile.times[k],
                profile.values[k],
                profile.r[k],
                profile.ir[k],
                profile.i_di[k],
            ]
        })
        .collect();
    let table = Table::new(
        ["t", "D", "r", "IR", "I_DI"].iter().map(|s| s.to_string()).collect(),
        rows,
    )
    .with_meta("spec", spec.label())
    .with_meta("derivatives", format!("{:?}", profile.derivative_mode));
    let name = stem(path);
    let style = Style {
        title: Some(spec.label().to_string()),
        columns: Some(vec!["r".into(), "IR".into(), "I_DI".into()]),
        y_label: "rate".into(),
        ..Style::default()
    };
    let files = ctx.write_table(&format!("{name}_profile"), &table, &style)?;
    let report = json!({
        "label": spec.label(),
        "family": spec.family().name(),
        "classification": summarize(&class),
        "present_biased": class.verdict == Verdict::StrictlyDi,
        "vanishes_at_infinity": spec.family().vanishes_at_infinity(),
        "derivative_mode": profile.derivative_mode,
        "grid": [grid.t_min(), grid.t_max(), grid.len()],
        "files": files,
    });
    ctx.write(&format!("{name}_analysis.json"), &pretty(&report))?;
    Ok(report)
}

fn compare(ctx: &Context, a: &Path, b: &Path) -> Outcome<Value> {
    let d1 = parse_curve(&read(a)?)?;
    let d2 = parse_curve(&read(b)?)?;
    let grid = match &ctx.grid {
        Some(g) => g.clone(),
        None => {
            let (g1, g2) = (ctx.index_grid_for(&d1)?, ctx.index_grid_for(&d2)?);
            if g1 == g2 {
                g1
            } else {
                let lo = g1.t_min().max(g2.t_min());
                let hi = g1.t_max().min(g2.t_max());
                TimeGrid::linear(lo, hi, DEFAULT_POINTS)?
            }
        }
    };
    let tol = ctx.tol_for(is_tabulated(&d1) || is_tabulated(&d2));
    let by_index = compare_by_index(&d1, &d2, &grid, tol)?;
    let transform = as_value(
        z_grid_for(&d2, &grid)
            .and_then(|z| convex_transform_test(&d1, &d2, &z, tol))
            .map(|v| json!(v)),
    );
    let positive: Vec<f64> = grid.points().iter().copied().filter(|t| *t > 0.0).collect();
    let fit = as_value(
        TimeGrid::from_points(positive)
            .and_then(|g| fit_equal_di_exponent(&d1, &d2, &g))
            .map(|f| json!(f)),
    );
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        let index = |d: &Curve| match d.rates(t, DerivativeMode::Analytic) {
            Ok(r) => r.index,
            Err(_) => f64::INFINITY,
        };
        rows.push(vec![t, index(&d1), index(&d2)]);
    }
    let table = Table::new(vec!["t".into(), "I_1".into(), "I_2".into()], rows)
        .with_meta("curve_1", d1.label())
        .with_meta("curve_2", d2.label());
    let style = Style {
        title: Some(format!("{} vs {}", d1.label(), d2.label())),
        y_label: "index of DI".into(),
        ..Style::default()
    };
    let name = format!("{}_vs_{}", stem(a), stem(b));
    let files = ctx.write_table(&name, &table, &style)?;
    let report = json!({
        "curve_1": d1.label(),
        "curve_2": d2.label(),
        "index_comparison": by_index,
        "convex_transform": transform,
        "equal_di_fit": fit,
        "tolerance": tol,
        "files": files,
    });
    ctx.write(&format!("{name}.json"), &pretty(&report))?;
    Ok(report)
}

fn mix(ctx: &Context, path: &Path) -> Outcome<Value> {
    let m = parse_mixture(&read(path)?)?;
    let grid = ctx.index_grid_for(&m)?;
    let class_grid = ctx.grid_for(&m)?;
    let numeric = is_tabulated(&Curve::from(m.clone()));
    let tol = ctx.tol_for(numeric);
    let rep = decompose_index_with_tol(&m, &grid, tol)?;
    let class = classify(&m, &class_grid, tol)?;
    let chain = as_value(verify_theorem_main_with_tol(&m, &grid, tol).map(|c| json!(c)));
    let name = stem(path);
    let style = Style {
        title: Some(format!("Index decomposition: {}", m.label())),
        columns: Some(
            std::iter::once("I_direct".to_string())
                .chain((1..=m.len()).map(|i| format!("I_{i}")))
                .collect(),
        ),
        y_label: "index of DI".into(),
        ..Style::default()
    };
    let files = ctx.write_table(&format!("{name}_decomposition"), &rep.to_table(), &style)?;
    let report = json!({
        "label": m.label(),
        "components": rep.labels,
        "weights": m.weights(),
        "interpretation": m.interpretation(),
        "warnings": m.warnings(),
        "classification": summarize(&class),
        "present_biased": class.verdict == Verdict::StrictlyDi,
        "max_identity_error": rep.max_identity_error(),
        "min_lower_bound_margin": rep.min_lower_bound_margin(),
        "chain": chain,
        "grids": {
            "classification": [class_grid.t_min(), class_grid.t_max(), class_grid.len()],
            "decomposition": [grid.t_min(), grid.t_max(), grid.len()],
        },
        "files": files,
    });
    ctx.write(&format!("{name}_mixture.json"), &pretty(&report))?;
    Ok(report)
}

fn ce(ctx: &Context, path: &Path) -> Outcome<Value> {
    let bundle = parse_bundle(&read(path)?)?;
    let grid = match &ctx.grid {
        Some(g) => g.clone(),
        None => TimeGrid::log(1e-3, 1e6, 400)?,
    };
    let rep = verify_ce_monotone(&bundle, &grid)?;
    let name = stem(path);
    let style = Style {
        title: Some("Certainty-equivalent hyperbolic rate".into()),
        y_label: "rate".into(),
        ..Style::default()
    };
    let files = ctx.write_table(&format!("{name}_ce"), &rep.to_table(), &style)?;
    let report = json!({
        "entries": bundle.entries(),
        "limit": rep.limit,
        "arithmetic_mean": rep.arithmetic_mean,
        "monotone": rep.monotone,
        "max_violation": rep.max_violation,
        "constant_rate": rep.constant_rate,
        "above_limit": rep.above_limit,
        "final": { "t": rep.times.last(), "h": rep.h_values.last() },
        "files": files,
    });
    ctx.write(&format!("{name}_ce.json"), &pretty(&report))?;
    Ok(report)
}

fn figure_output(ctx: &Context, fig: &figures::Figure) -> Outcome<Value> {
    let files = ctx.write_table(&fig.name, &fig.table, &fig.style)?;
    let meta: BTreeMap<&str, &str> = fig
        .table
        .meta()
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    Ok(json!({ "scenario": fig.name, "rows": fig.table.rows().len(), "meta": meta, "files": files }))
}

fn parse_params(raw: &[String]) -> Outcome<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Failure::Parse(format!("--param expects KEY=VALUE, got `{p}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Parse(format!("--param value `{v}` is not a number")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(Failure::Parse(format!("--param `{k}` given twice")));
        }
    }
    Ok(out)
}

fn household(ctx: &Context, horizon: u32) -> Outcome<Value> {
    let rep = household_report(horizon);
    let record = rep.record();
    let style = Style {
        title: Some("Household aggregate utility".into()),
        columns: Some(vec!["earlier".into(), "later".into()]),
        y_label: "utiles".into(),
        ..Style::default()
    };
    let mut files = ctx.write_table("household", &rep.to_table(), &style)?;
    files.push(ctx.write("household.json", &pretty(&json!(record)))?.display().to_string());
    let first = &record.rows[0];
    Ok(json!({
        "period_0": { "earlier": first.earlier, "later": first.later, "choice": first.choice },
        "choice_from_1": record.rows.get(1).map(|r| r.choice),
        "later_wins_for_all_t_ge_1": rep.rows.iter().skip(1).all(|r| r.choice == impatience::household::Choice::Later),
        "flips": record.flips,
        "horizon": horizon,
        "files": files,
    }))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Outcome<Value> {
    let locked = matches!(cli.command, Command::Figure { .. });
    if locked && (!cli.params.is_empty() || cli.grid.is_some() || cli.tol.is_some() || cli.fd_step.is_some()) {
        return Err(Failure::Parse(
            "figure presets are locked; use `custom` to change parameters".into(),
        ));
    }
    if !cli.params.is_empty() && !matches!(cli.command, Command::Custom { .. }) {
        return Err(Failure::Parse("--param is only accepted by `custom`".into()));
    }
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Parse(format!("--tol must be positive, got {tol}")));
        }
    }
    let ctx = Context {
        out: cli.out.unwrap_or_else(|| PathBuf::from(".")),
        svg: cli.svg,
        grid: cli.grid.as_deref().map(parse_grid).transpose()?,
        tol: cli.tol,
        fd_step: cli.fd_step,
    };
    match &cli.command {
        Command::Analyze { spec } => analyze(&ctx, spec),
        Command::Compare { a, b } => compare(&ctx, a, b),
        Command::Mix { mixture } => mix(&ctx, mixture),
        Command::Ce { bundle } => ce(&ctx, bundle),
        Command::Figure { number } => {
            let preset = Preset::from_number(*number).expect("clap restricts the range");
            figure_output(&ctx, &figures::figure(preset)?)
        }
        Command::Custom { number } => {
            let preset = Preset::from_number(*number).expect("clap restricts the range");
            let params = parse_params(&cli.params)?;
            figure_output(&ctx, &figures::custom(preset, &params)?)
        }
        Command::Household { horizon } => household(&ctx, *horizon),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let failure = Failure::Parse(e.kind().to_string());
            eprintln!("{}", failure.record());
            return ExitCode::from(failure.code());
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", pretty(&report));
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("{}", failure.record());
            ExitCode::from(failure.code())
        }
    }
}

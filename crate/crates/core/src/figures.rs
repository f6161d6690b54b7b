//! Figure presets and their free-parameter variants.
//!
//! Presets are locked: `figure(Preset::One)` always produces the same table.
//! [`custom`] rebuilds the same scenarios from user parameters. Plot ranges
//! and grid densities are our own choices and are recorded in each table's
//! metadata.

use std::collections::BTreeMap;

use crate::ce::{verify_ce_monotone, HyperbolicBundle};
use crate::comparison::{compare_by_index, DEFAULT_TOL};
use crate::csv::Table;
use crate::discount::DiscountSpec;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::mixture::{decompose_index, mixture_rate, Interpretation, Mixture};
use crate::numeric::compensated_sum;
use crate::svg::Style;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Index of DI for an equal mixture of zero-speed hyperbolic and slow Weibull curves.
    One,
    /// Time-preference rate of a mixture of exponentials.
    Two,
    /// Certainty-equivalent rate of a mixture of proportional hyperbolic curves.
    Three,
}

impl Preset {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(Preset::One),
            2 => Some(Preset::Two),
            3 => Some(Preset::Three),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::One => "figure1",
            Preset::Two => "figure2",
            Preset::Three => "figure3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub name: String,
    pub table: Table,
    pub style: Style,
}

#[derive(Debug, Clone, PartialEq)]
struct IndexParams {
    h: f64,
    alpha: f64,
    lambda1: f64,
    t_min: f64,
    t_max: f64,
    count: usize,
}

const FIGURE1: IndexParams = IndexParams {
    h: 0.1,
    alpha: 0.12,
    lambda1: 0.5,
    t_min: 0.05,
    t_max: 60.0,
    count: 200,
};

#[derive(Debug, Clone, PartialEq)]
struct RateParams {
    rates: Vec<f64>,
    probabilities: Vec<f64>,
    t_max: f64,
}

fn preset_rates() -> RateParams {
    RateParams {
        rates: vec![0.01, 0.02, 0.03],
        probabilities: vec![1.0 / 3.0; 3],
        t_max: 1e6,
    }
}

const LINEAR_POINTS: usize = 100;
const LOG_POINTS: usize = 301;

pub fn figure(preset: Preset) -> Result<Figure> {
    let fig = match preset {
        Preset::One => index_figure(&FIGURE1)?,
        Preset::Two => exponential_figure(&preset_rates())?,
        Preset::Three => hyperbolic_figure(&preset_rates())?,
    };
    Ok(finish(fig, preset.name(), "locked"))
}

/// Builds the scenario behind `preset` from free parameters.
///
/// * `One`: `h`, `alpha`, `lambda1`, `t_min`, `t_max`, `count`.
/// * `Two`: `r1..rn`, optional `p1..pn` (equal by default), `t_max`.
/// * `Three`: `h1..hn`, optional `p1..pn`, `t_max`.
pub fn custom(preset: Preset, params: &BTreeMap<String, f64>) -> Result<Figure> {
    let fig = match preset {
        Preset::One => {
            let mut p = FIGURE1.clone();
            for (k, &v) in params {
                match k.as_str() {
                    "h" => p.h = v,
                    "alpha" => p.alpha = v,
                    "lambda1" => p.lambda1 = v,
                    "t_min" => p.t_min = v,
                    "t_max" => p.t_max = v,
                    "count" => {
                        if !(v.fract() == 0.0 && (3.0..=1e6).contains(&v)) {
                            return Err(Error::InvalidParameters(format!(
                                "count must be an integer in [3, 1e6], got {v}"
                            )));
                        }
                        p.count = v as usize
                    }
                    other => return Err(unknown(other, preset)),
                }
            }
            if !(p.lambda1 > 0.0 && p.lambda1 < 1.0) {
                return Err(Error::WeightError(format!(
                    "lambda1 must lie in (0, 1), got {}",
                    p.lambda1
                )));
            }
            index_figure(&p)?
        }
        Preset::Two => exponential_figure(&rate_params(preset, "r", params)?)?,
        Preset::Three => hyperbolic_figure(&rate_params(preset, "h", params)?)?,
    };
    let name = format!("custom{}", &preset.name()["figure".len()..]);
    let mut fig = finish(fig, &name, "custom");
    for (k, v) in params {
        fig.table.push_meta(format!("param_{k}"), v.to_string());
    }
    Ok(fig)
}

fn unknown(key: &str, preset: Preset) -> Error {
    Error::Schema(format!("unknown parameter `{key}` for custom {}", preset.name()))
}

fn rate_params(preset: Preset, prefix: &str, params: &BTreeMap<String, f64>) -> Result<RateParams> {
    let mut rates = BTreeMap::new();
    let mut probs = BTreeMap::new();
    let mut t_max = 1e6;
    for (k, &v) in params {
        if k == "t_max" {
            t_max = v;
            continue;
        }
        let slot = if let Some(i) = k.strip_prefix(prefix) {
            Some((&mut rates, i))
        } else {
            k.strip_prefix('p').map(|i| (&mut probs, i))
        };
        match slot.and_then(|(map, i)| i.parse::<usize>().ok().filter(|i| *i >= 1).map(|i| (map, i))) {
            Some((map, i)) => {
                map.insert(i, v);
            }
            None => return Err(unknown(k, preset)),
        }
    }
    if rates.is_empty() {
        return Ok(RateParams { t_max, ..preset_rates() });
    }
    let n = rates.len();
    if rates.keys().copied().ne(1..=n) {
        return Err(Error::Schema(format!("{prefix}1..{prefix}{n} must be consecutive")));
    }
    let probabilities = if probs.is_empty() {
        vec![1.0 / n as f64; n]
    } else if probs.keys().copied().eq(1..=n) {
        probs.into_values().collect()
    } else {
        return Err(Error::Schema(format!("need p1..p{n} to match the rates")));
    };
    Ok(RateParams {
        rates: rates.into_values().collect(),
        probabilities,
        t_max,
    })
}

fn finish(mut fig: Figure, name: &str, mode: &str) -> Figure {
    let mut meta = vec![
        ("scenario".to_string(), name.to_string()),
        ("parameters".to_string(), mode.to_string()),
    ];
    meta.extend(fig.table.meta().iter().cloned());
    let mut table = Table::new(fig.table.columns().to_vec(), fig.table.rows().to_vec());
    for (k, v) in meta {
        table.push_meta(k, v);
    }
    fig.table = table;
    fig.name = name.to_string();
    fig
}

fn index_figure(p: &IndexParams) -> Result<Figure> {
    let d1 = DiscountSpec::zero_speed_hyperbolic(p.h)?.with_label("D1");
    let d2 = DiscountSpec::slow_weibull(p.alpha)?.with_label("D2");
    let m = Mixture::new(
        vec![(d1.clone(), p.lambda1), (d2.clone(), 1.0 - p.lambda1)],
        Interpretation::GroupAverage,
    )?;
    let grid = TimeGrid::log(p.t_min, p.t_max, p.count)?;
    let rep = decompose_index(&m, &grid)?;
    let crossings = compare_by_index(&d1, &d2, &grid, DEFAULT_TOL)?.crossing_points;
    let rows = (0..rep.times.len())
        .map(|k| {
            let (i1, i2) = (rep.component_index[k][0], rep.component_index[k][1]);
            vec![rep.times[k], i1, i2, rep.i_decomposed[k], i1.min(i2)]
        })
        .collect();
    let crossing_text = crossings.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(" ");
    let table = Table::new(
        ["t", "I_1", "I_2", "I_mix", "min_I"].iter().map(|s| s.to_string()).collect(),
        rows,
    )
    .with_meta("D1", format!("zero_speed_hyperbolic(h={})", p.h))
    .with_meta("D2", format!("slow_weibull(alpha={})", p.alpha))
    .with_meta("weights", format!("{} {}", p.lambda1, 1.0 - p.lambda1))
    .with_meta(
        "grid",
        format!(
            "{} log-spaced points on [{}, {}]; range and density are preset choices",
            p.count, p.t_min, p.t_max
        ),
    )
    .with_meta("index_crossings", crossing_text);
    Ok(Figure {
        name: String::new(),
        table,
        style: Style {
            title: Some("Index of DI for the mixture of D1 and D2".into()),
            y_label: "index of DI".into(),
            ..Style::default()
        },
    })
}

fn rate_grid(t_min: f64, t_max: f64, linear: usize) -> Result<TimeGrid> {
    if !(t_max > 1.0) {
        return Err(Error::InvalidParameters(format!("t_max must exceed 1, got {t_max}")));
    }
    TimeGrid::hybrid(t_min, t_max, linear, LOG_POINTS)
}

fn grid_note(t_min: f64, t_max: f64, linear: usize) -> String {
    format!(
        "{linear} linear points on [{t_min}, 1) then {LOG_POINTS} log-spaced points on [1, {t_max}]; range and density are preset choices"
    )
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn exponential_figure(p: &RateParams) -> Result<Figure> {
    let components = p
        .rates
        .iter()
        .zip(&p.probabilities)
        .map(|(&r, &w)| Ok((DiscountSpec::exponential(r)?, w)))
        .collect::<Result<Vec<_>>>()?;
    let m = Mixture::new(components, Interpretation::ProbabilityWeights)?;
    let weights = m.weights();
    let grid = rate_grid(0.0, p.t_max, LINEAR_POINTS)?;
    let r_min = p.rates.iter().copied().fold(f64::INFINITY, f64::min);
    let r_mean = compensated_sum(weights.iter().zip(&p.rates).map(|(w, r)| w * r));
    let rows = grid
        .points()
        .iter()
        .map(|&t| Ok(vec![t, mixture_rate(&m, t)?, r_min, r_mean]))
        .collect::<Result<Vec<_>>>()?;
    let table = Table::new(
        ["t", "r_t", "r_min", "r_mean"].iter().map(|s| s.to_string()).collect(),
        rows,
    )
    .with_meta("rates", list(&p.rates))
    .with_meta("probabilities", list(&weights))
    .with_meta("grid", grid_note(0.0, p.t_max, LINEAR_POINTS));
    Ok(Figure {
        name: String::new(),
        table,
        style: Style {
            title: Some("Mixture of exponential discount functions".into()),
            y_label: "time-preference rate".into(),
            ..Style::default()
        },
    })
}

fn hyperbolic_figure(p: &RateParams) -> Result<Figure> {
    let bundle = HyperbolicBundle::new(
        p.rates.iter().copied().zip(p.probabilities.iter().copied()).collect(),
    )?;
    // h(t) is undefined at 0, so the linear part starts one step in.
    let step = 1.0 / LINEAR_POINTS as f64;
    let grid = rate_grid(step, p.t_max, LINEAR_POINTS - 1)?;
    let report = verify_ce_monotone(&bundle, &grid)?;
    let mut table = report
        .to_table()
        .with_meta("rates", list(&p.rates))
        .with_meta("probabilities", list(&p.probabilities))
        .with_meta("grid", grid_note(step, p.t_max, LINEAR_POINTS - 1))
        .with_meta("monotone", report.monotone.to_string())
        .with_meta("max_violation", report.max_violation.to_string());
    if report.constant_rate {
        table.push_meta("constant_rate", "true");
    }
    Ok(Figure {
        name: String::new(),
        table,
        style: Style {
            title: Some("Mixture of hyperbolic discount functions".into()),
            y_label: "certainty-equivalent hyperbolic rate".into(),
            ..Style::default()
        },
    })
}

//! JSON input formats and grid strings used by the command line.
//!
//! Spec: `{"family": "generalized_hyperbolic", "params": {"alpha": 0.2, "h": 0.1}, "label": "d1"}`.
//! Tabulated specs list their knots as `t0, t1, …` and `d0, d1, …` params.
//!
//! Mixture: `{"components": [{"spec": {…}, "weight": 0.5}, {"mixture": {…}, "weight": 0.5}],
//! "interpretation": "group_average", "label": "m"}`.
//!
//! Bundle: `{"entries": [{"h": 0.01, "p": 0.5}, …]}`.
//!
//! Unknown fields and unknown params are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ce::HyperbolicBundle;
use crate::discount::{Discount, DiscountSpec, Family, Tabulated};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::mixture::{Curve, Interpretation, Mixture};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureDoc>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureDoc {
    pub components: Vec<ComponentDoc>,
    #[serde(default)]
    pub interpretation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub h: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub entries: Vec<EntryDoc>,
}

fn json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn take(params: &mut BTreeMap<String, f64>, family: &str, name: &str) -> Result<f64> {
    params
        .remove(name)
        .ok_or_else(|| Error::Schema(format!("{family} requires param `{name}`")))
}

fn indexed(params: &mut BTreeMap<String, f64>, prefix: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    while let Some(v) = params.remove(&format!("{prefix}{}", out.len())) {
        out.push(v);
    }
    Ok(out)
}

impl SpecDoc {
    pub fn into_spec(self) -> Result<DiscountSpec> {
        let mut params = self.params;
        let name = self.family.as_str();
        let family = match name {
            "exponential" => Family::Exponential {
                rate: take(&mut params, name, "rate")?,
            },
            "generalized_hyperbolic" => Family::GeneralizedHyperbolic {
                alpha: take(&mut params, name, "alpha")?,
                h: take(&mut params, name, "h")?,
            },
            "proportional_hyperbolic" => Family::ProportionalHyperbolic {
                h: take(&mut params, name, "h")?,
            },
            "zero_speed_hyperbolic" => Family::ZeroSpeedHyperbolic {
                h: take(&mut params, name, "h")?,
            },
            "slow_weibull" => Family::SlowWeibull {
                alpha: take(&mut params, name, "alpha")?,
            },
            "tabulated" => {
                let times = indexed(&mut params, "t")?;
                let values = indexed(&mut params, "d")?;
                Family::Tabulated(Tabulated::new(times, values)?)
            }
            other => return Err(Error::Schema(format!("unknown family `{other}`"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(Error::Schema(format!("unknown param `{extra}` for {name}")));
        }
        match self.label {
            Some(label) => DiscountSpec::new(family, label),
            None => DiscountSpec::from_family(family),
        }
    }

    pub fn from_spec(spec: &DiscountSpec) -> Self {
        let mut params = BTreeMap::new();
        match spec.family() {
            Family::Exponential { rate } => {
                params.insert("rate".into(), *rate);
            }
            Family::GeneralizedHyperbolic { alpha, h } => {
                params.insert("alpha".into(), *alpha);
                params.insert("h".into(), *h);
            }
            Family::ProportionalHyperbolic { h } | Family::ZeroSpeedHyperbolic { h } => {
                params.insert("h".into(), *h);
            }
            Family::SlowWeibull { alpha } => {
                params.insert("alpha".into(), *alpha);
            }
            Family::Tabulated(tab) => {
                for (k, (t, d)) in tab.times().iter().zip(tab.values()).enumerate() {
                    params.insert(format!("t{k}"), *t);
                    params.insert(format!("d{k}"), *d);
                }
            }
        }
        SpecDoc {
            family: spec.family().name().to_string(),
            params,
            label: Some(spec.label().to_string()),
        }
    }
}

fn parse_interpretation(s: Option<&str>) -> Result<Interpretation> {
    match s {
        None | Some("group_average") => Ok(Interpretation::GroupAverage),
        Some("probability_weights") => Ok(Interpretation::ProbabilityWeights),
        Some(other) => Err(Error::Schema(format!("unknown interpretation `{other}`"))),
    }
}

fn interpretation_name(i: Interpretation) -> &'static str {
    match i {
        Interpretation::GroupAverage => "group_average",
        Interpretation::ProbabilityWeights => "probability_weights",
    }
}

const MAX_NESTING: usize = 32;

impl MixtureDoc {
    pub fn into_mixture(self) -> Result<Mixture> {
        self.build(0)
    }

    fn build(self, depth: usize) -> Result<Mixture> {
        if depth > MAX_NESTING {
            return Err(Error::Schema("mixture nesting too deep".into()));
        }
        let interpretation = parse_interpretation(self.interpretation.as_deref())?;
        let mut components: Vec<(Curve, f64)> = Vec::with_capacity(self.components.len());
        for c in self.components {
            let curve = match (c.spec, c.mixture) {
                (Some(s), None) => Curve::from(s.into_spec()?),
                (None, Some(m)) => Curve::from(m.build(depth + 1)?),
                _ => {
                    return Err(Error::Schema(
                        "component needs exactly one of `spec` or `mixture`".into(),
                    ))
                }
            };
            components.push((curve, c.weight));
        }
        let m = Mixture::new(components, interpretation)?;
        Ok(match self.label {
            Some(l) => m.with_label(l),
            None => m,
        })
    }

    pub fn from_mixture(m: &Mixture) -> Self {
        MixtureDoc {
            components: m
                .components()
                .iter()
                .map(|c| match &c.curve {
                    Curve::Spec(s) => ComponentDoc {
                        spec: Some(SpecDoc::from_spec(s)),
                        mixture: None,
                        weight: c.weight,
                    },
                    Curve::Mixture(inner) => ComponentDoc {
                        spec: None,
                        mixture: Some(MixtureDoc::from_mixture(inner)),
                        weight: c.weight,
                    },
                })
                .collect(),
            interpretation: Some(interpretation_name(m.interpretation()).to_string()),
            label: Some(m.label().to_string()),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<DiscountSpec> {
    json::<SpecDoc>(text)?.into_spec()
}

pub fn parse_mixture(text: &str) -> Result<Mixture> {
    json::<MixtureDoc>(text)?.into_mixture()
}

pub fn parse_bundle(text: &str) -> Result<HyperbolicBundle> {
    let doc: BundleDoc = json(text)?;
    HyperbolicBundle::new(doc.entries.into_iter().map(|e| (e.h, e.p)).collect())
}

/// Accepts a single spec or a mixture document.
pub fn parse_curve(text: &str) -> Result<Curve> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("components").is_some() {
        Ok(Curve::from(parse_mixture(text)?))
    } else {
        Ok(Curve::from(parse_spec(text)?))
    }
}

pub fn spec_to_json(spec: &DiscountSpec) -> String {
    serde_json::to_string_pretty(&SpecDoc::from_spec(spec)).expect("spec serializes")
}

pub fn mixture_to_json(m: &Mixture) -> String {
    serde_json::to_string_pretty(&MixtureDoc::from_mixture(m)).expect("mixture serializes")
}

pub fn bundle_to_json(b: &HyperbolicBundle) -> String {
    let doc = BundleDoc {
        entries: b.entries().iter().map(|e| EntryDoc { h: e.h, p: e.p }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("bundle serializes")
}

/// Parses `t_min,t_max,count,lin|log`.
pub fn parse_grid(text: &str) -> Result<TimeGrid> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [t_min, t_max, count, spacing] = parts.as_slice() else {
        return Err(Error::Parse(format!(
            "grid must be `t_min,t_max,count,lin|log`, got `{text}`"
        )));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad grid number `{s}`")))
    };
    let count: usize = count
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count `{count}`")))?;
    let (t_min, t_max) = (num(t_min)?, num(t_max)?);
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(Error::InvalidGrid(format!("need finite t_min < t_max in `{text}`")));
    }
    // Larger grids are never needed and would only exhaust memory.
    if count > 1_000_000 {
        return Err(Error::InvalidGrid(format!("grid count {count} too large")));
    }
    match *spacing {
        "lin" | "linear" => TimeGrid::linear(t_min, t_max, count),
        "log" => TimeGrid::log(t_min, t_max, count),
        other => Err(Error::Parse(format!("unknown grid spacing `{other}`"))),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

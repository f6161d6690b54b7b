//! Certainty-equivalent discounting under uncertainty about the discount rate.
//!
//! For proportional hyperbolic scenarios `Dᵢ(t) = 1/(1 + hᵢt)` with
//! probabilities `pᵢ`, the certainty-equivalent hyperbolic rate `h(t)` solves
//! `1/(1 + h(t)·t) = Σ pᵢ Dᵢ(t)`. It falls from the arithmetic mean `Σ pᵢhᵢ`
//! towards the weighted harmonic mean `(Σ pᵢ/hᵢ)⁻¹`.

use serde::Serialize;

use crate::csv::Table;
use crate::discount::DiscountSpec;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::mixture::{mixture_rate, Interpretation, Mixture};
use crate::numeric::compensated_sum;

/// Below this time `h(t)` is replaced by its `t → 0⁺` limit.
pub const SERIES_CUTOFF: f64 = 1e-10;

const PROBABILITY_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundleEntry {
    pub h: f64,
    pub p: f64,
}

/// Hyperbolic rates with probabilities, sorted by descending rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicBundle {
    entries: Vec<BundleEntry>,
}

impl HyperbolicBundle {
    /// Validates `(h, p)` pairs. Zero-probability entries are dropped, equal
    /// rates are merged and probabilities are renormalized.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        for &(h, p) in &pairs {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidBundle(format!("rate must be positive, got {h}")));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidBundle(format!(
                    "probability must be non-negative, got {p}"
                )));
            }
        }
        let total = compensated_sum(pairs.iter().map(|e| e.1));
        if !((total - 1.0).abs() <= PROBABILITY_SUM_TOL) {
            return Err(Error::InvalidBundle(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut entries: Vec<BundleEntry> = Vec::new();
        let mut sorted: Vec<(f64, f64)> = pairs.into_iter().filter(|e| e.1 > 0.0).collect();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (h, p) in sorted {
            match entries.last_mut() {
                Some(last) if last.h == h => last.p += p,
                _ => entries.push(BundleEntry { h, p: p / total }),
            }
        }
        // Merged entries accumulated un-normalized increments; renormalize once more.
        let sum = compensated_sum(entries.iter().map(|e| e.p));
        for e in &mut entries {
            e.p /= sum;
        }
        if entries.is_empty() {
            return Err(Error::InvalidBundle("no entry has positive probability".into()));
        }
        Ok(HyperbolicBundle { entries })
    }

    pub fn equal(rates: &[f64]) -> Result<Self> {
        let p = 1.0 / rates.len() as f64;
        Self::new(rates.iter().map(|&h| (h, p)).collect())
    }

    pub fn entries(&self) -> &[BundleEntry] {
        &self.entries
    }

    /// `Σ pᵢhᵢ`, the `t → 0⁺` limit of `h(t)`.
    pub fn arithmetic_mean(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.p * e.h))
    }

    pub fn has_distinct_rates(&self) -> bool {
        self.entries.len() >= 2
    }

    /// The bundle as a probability-weighted mixture of proportional hyperbolic curves.
    pub fn to_mixture(&self) -> Result<Mixture> {
        let components = self
            .entries
            .iter()
            .map(|e| Ok((DiscountSpec::proportional_hyperbolic(e.h)?, e.p)))
            .collect::<Result<Vec<_>>>()?;
        Mixture::new(components, Interpretation::ProbabilityWeights)
    }
}

/// `D(t) = Σ pᵢ/(1 + hᵢt)`.
pub fn ce_discount(bundle: &HyperbolicBundle, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(compensated_sum(
        bundle.entries.iter().map(|e| e.p / (1.0 + e.h * t)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CeRate {
    pub h: f64,
    /// `t` was below [`SERIES_CUTOFF`] and the arithmetic mean was returned.
    pub series_limit: bool,
}

/// Certainty-equivalent hyperbolic rate `h(t) = (1/D(t) - 1)/t`.
///
/// Evaluated as `Σ pᵢhᵢ/(1 + hᵢt) / Σ pᵢ/(1 + hᵢt)`, which is the same
/// quantity without the cancellation in `1/D - 1`.
pub fn ce_hyperbolic_rate(bundle: &HyperbolicBundle, t: f64) -> Result<CeRate> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime(t));
    }
    if t < SERIES_CUTOFF {
        return Ok(CeRate {
            h: bundle.arithmetic_mean(),
            series_limit: true,
        });
    }
    if let [only] = bundle.entries.as_slice() {
        return Ok(CeRate {
            h: only.h,
            series_limit: false,
        });
    }
    let num = compensated_sum(bundle.entries.iter().map(|e| e.p * e.h / (1.0 + e.h * t)));
    let den = compensated_sum(bundle.entries.iter().map(|e| e.p / (1.0 + e.h * t)));
    Ok(CeRate {
        h: num / den,
        series_limit: false,
    })
}

/// Weighted harmonic mean `(Σ pᵢ/hᵢ)⁻¹`, the long-run limit of `h(t)`.
pub fn weighted_harmonic_mean(bundle: &HyperbolicBundle) -> f64 {
    1.0 / compensated_sum(bundle.entries.iter().map(|e| e.p / e.h))
}

/// Closed form of `h(t)` for two scenarios,
/// `(p₁h₁ + p₂h₂ + h₁h₂t) / (1 + (p₁h₂ + p₂h₁)t)`.
pub fn two_scenario_rate(bundle: &HyperbolicBundle, t: f64) -> Option<f64> {
    match bundle.entries.as_slice() {
        [a, b] => Some(
            (a.p * a.h + b.p * b.h + a.h * b.h * t) / (1.0 + (a.p * b.h + b.p * a.h) * t),
        ),
        _ => None,
    }
}

/// `(h(t) - H)·t`, which settles to a constant for large `t`.
pub fn decay_constant(bundle: &HyperbolicBundle, t: f64) -> Result<f64> {
    Ok((ce_hyperbolic_rate(bundle, t)?.h - weighted_harmonic_mean(bundle)) * t)
}

/// Certainty-equivalent time-preference rate of exponential scenarios given
/// as `(rate, probability)` pairs.
pub fn ce_exponential_rate(scenarios: &[(f64, f64)], t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    match scenarios {
        [] => Err(Error::EmptyMixture),
        [(rate, _)] => Ok(DiscountSpec::exponential(*rate)?.family_rate()),
        _ => {
            let components = scenarios
                .iter()
                .map(|&(rate, p)| Ok((DiscountSpec::exponential(rate)?, p)))
                .collect::<Result<Vec<_>>>()?;
            mixture_rate(&Mixture::new(components, Interpretation::ProbabilityWeights)?, t)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeReport {
    pub times: Vec<f64>,
    pub h_values: Vec<f64>,
    /// Weighted harmonic mean.
    pub limit: f64,
    pub arithmetic_mean: f64,
    pub monotone: bool,
    pub max_violation: f64,
    /// All scenarios share one rate, so `h(t)` is constant.
    pub constant_rate: bool,
    /// Every `h(t)` lies strictly above the limit.
    pub above_limit: bool,
}

impl CeReport {
    pub fn to_table(&self) -> Table {
        let rows = self
            .times
            .iter()
            .zip(&self.h_values)
            .map(|(&t, &h)| vec![t, h, self.limit, self.arithmetic_mean])
            .collect();
        Table::new(
            ["t", "h_t", "H", "arithmetic_mean"].iter().map(|s| s.to_string()).collect(),
            rows,
        )
    }
}

/// Samples `h(t)` on `grid` and checks that it strictly decreases.
///
/// The grid must lie in `(0, ∞)`, hold at least 100 points and span at least
/// four decades.
pub fn verify_ce_monotone(bundle: &HyperbolicBundle, grid: &TimeGrid) -> Result<CeReport> {
    if grid.t_min() <= 0.0 {
        return Err(Error::InvalidGrid("certainty-equivalent grid must start above 0".into()));
    }
    if grid.len() < 100 {
        return Err(Error::InvalidGrid(format!(
            "need at least 100 points, got {}",
            grid.len()
        )));
    }
    if grid.t_max() / grid.t_min() < 1e4 {
        return Err(Error::InvalidGrid("grid must span at least four decades".into()));
    }
    let h_values = grid
        .points()
        .iter()
        .map(|&t| Ok(ce_hyperbolic_rate(bundle, t)?.h))
        .collect::<Result<Vec<_>>>()?;
    let limit = weighted_harmonic_mean(bundle);
    let constant_rate = !bundle.has_distinct_rates();
    let max_increase = h_values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let monotone = !constant_rate && h_values.windows(2).all(|w| w[1] < w[0]);
    Ok(CeReport {
        times: grid.points().to_vec(),
        above_limit: h_values.iter().all(|h| *h > limit),
        h_values,
        limit,
        arithmetic_mean: bundle.arithmetic_mean(),
        monotone,
        max_violation: max_increase.max(0.0),
        constant_rate,
    })
}

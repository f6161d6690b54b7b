//! Weighted mixtures `D = Σ λᵢ Dᵢ` of discount functions.
//!
//! Mixture derivatives are always weight-sums of component derivatives.
//! [`decompose_index`] splits the mixture index as
//! `I = Σ αᵢ Iᵢ + Q`, with `αᵢ = λᵢDᵢrᵢ / Σ λⱼDⱼrⱼ` and
//! `Q = N / (Σ λᵢDᵢrᵢ · Σ λᵢDᵢ)`, `N = Σ_{i<j} λᵢλⱼDᵢDⱼ (rᵢ - rⱼ)²`.

use serde::Serialize;

use crate::comparison::{self, index_gap, ComparisonVerdict, Relation, Sign, DEFAULT_TOL};
use crate::csv::Table;
use crate::discount::{check_time, Derivatives, DerivativeMode, Discount, DiscountSpec, Rates};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::numeric::dot2;

const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    #[default]
    GroupAverage,
    ProbabilityWeights,
}

/// A mixture component: a single discount function or a nested mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Spec(DiscountSpec),
    Mixture(Box<Mixture>),
}

impl From<DiscountSpec> for Curve {
    fn from(spec: DiscountSpec) -> Self {
        Curve::Spec(spec)
    }
}

impl From<Mixture> for Curve {
    fn from(m: Mixture) -> Self {
        Curve::Mixture(Box::new(m))
    }
}

impl Curve {
    fn as_dyn(&self) -> &dyn Discount {
        match self {
            Curve::Spec(s) => s,
            Curve::Mixture(m) => m.as_ref(),
        }
    }
}

impl Discount for Curve {
    fn label(&self) -> &str {
        self.as_dyn().label()
    }
    fn domain(&self) -> (f64, f64) {
        self.as_dyn().domain()
    }
    fn singular_at_origin(&self) -> bool {
        self.as_dyn().singular_at_origin()
    }
    fn value(&self, t: f64) -> Result<f64> {
        self.as_dyn().value(t)
    }
    fn log_value(&self, t: f64) -> Result<f64> {
        self.as_dyn().log_value(t)
    }
    fn analytic_derivatives(&self, t: f64) -> Result<Derivatives> {
        self.as_dyn().analytic_derivatives(t)
    }
    fn derivatives(&self, t: f64, mode: DerivativeMode) -> Result<Derivatives> {
        self.as_dyn().derivatives(t, mode)
    }
    fn rates(&self, t: f64, mode: DerivativeMode) -> Result<Rates> {
        self.as_dyn().rates(t, mode)
    }
    fn rate_slope(&self, t: f64) -> Result<f64> {
        self.as_dyn().rate_slope(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub curve: Curve,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum MixtureWarning {
    /// Two components share family and parameters.
    DuplicateComponents { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    components: Vec<Component>,
    interpretation: Interpretation,
    label: String,
    warnings: Vec<MixtureWarning>,
}

impl Mixture {
    /// Builds a mixture; weights must be positive and are normalized to sum to 1.
    pub fn new<C: Into<Curve>>(
        components: Vec<(C, f64)>,
        interpretation: Interpretation,
    ) -> Result<Self> {
        match components.len() {
            0 => return Err(Error::EmptyMixture),
            1 => {
                return Err(Error::DegenerateMixture(
                    "a mixture needs at least two components".into(),
                ))
            }
            _ => {}
        }
        if let Some((_, w)) = components.iter().find(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::WeightError(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        let total: f64 = crate::numeric::compensated_sum(components.iter().map(|c| c.1));
        let components: Vec<Component> = components
            .into_iter()
            .map(|(c, w)| Component {
                curve: c.into(),
                weight: w / total,
            })
            .collect();
        if components.iter().any(|c| !(c.weight < 1.0)) {
            return Err(Error::WeightError("weights degenerate after normalization".into()));
        }

        let mut warnings = Vec::new();
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                if let (Curve::Spec(a), Curve::Spec(b)) =
                    (&components[i].curve, &components[j].curve)
                {
                    if a.same_curve(b, DUPLICATE_TOL) {
                        warnings.push(MixtureWarning::DuplicateComponents {
                            first: i,
                            second: j,
                        });
                    }
                }
            }
        }
        let label = format!(
            "mixture({})",
            components
                .iter()
                .map(|c| format!("{}*{}", c.weight, c.curve.label()))
                .collect::<Vec<_>>()
                .join(" + ")
        );
        Ok(Mixture {
            components,
            interpretation,
            label,
            warnings,
        })
    }

    /// Equal weights over `curves`.
    pub fn equal<C: Into<Curve>>(curves: Vec<C>, interpretation: Interpretation) -> Result<Self> {
        let n = curves.len() as f64;
        Self::new(curves.into_iter().map(|c| (c, 1.0 / n)).collect(), interpretation)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    pub fn warnings(&self) -> &[MixtureWarning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Expands nested mixtures into a flat list of weighted specs.
    pub fn flatten(&self) -> Vec<(DiscountSpec, f64)> {
        let mut out = Vec::new();
        for c in &self.components {
            match &c.curve {
                Curve::Spec(s) => out.push((s.clone(), c.weight)),
                Curve::Mixture(m) => {
                    out.extend(m.flatten().into_iter().map(|(s, w)| (s, w * c.weight)))
                }
            }
        }
        out
    }

    fn combine<F>(&self, t: f64, per_component: F) -> Result<Derivatives>
    where
        F: Fn(&Curve) -> Result<Derivatives>,
    {
        check_time(t, self.domain())?;
        let ds = self
            .components
            .iter()
            .map(|c| per_component(&c.curve))
            .collect::<Result<Vec<_>>>()?;
        let w = self.weights();
        let pick = |f: fn(&Derivatives) -> f64| ds.iter().map(f).collect::<Vec<_>>();
        Ok(Derivatives {
            value: dot2(&w, &pick(|d| d.value)),
            first: dot2(&w, &pick(|d| d.first)),
            second: dot2(&w, &pick(|d| d.second)),
        })
    }
}

const UNDERFLOW_LOG: f64 = -600.0;

/// Per-point quantities shared by the mixture rates and the decomposition.
struct Terms {
    weighted: Vec<f64>,
    rates: Vec<f64>,
    indices: Vec<f64>,
    s0: f64,
    alpha: Vec<f64>,
    n_value: f64,
    q: f64,
}

impl Terms {
    fn at(m: &Mixture, t: f64) -> Result<Self> {
        check_time(t, m.domain())?;
        let n = m.len();
        let mut rates = Vec::with_capacity(n);
        let mut indices = Vec::with_capacity(n);
        let mut logs = Vec::with_capacity(n);
        for c in m.components() {
            let r = c.curve.rates(t, DerivativeMode::Analytic)?;
            logs.push(c.curve.log_value(t)?);
            rates.push(r.r);
            indices.push(r.index);
        }
        // Rates, weights and Q are scale free, so values that would underflow
        // are rescaled by the largest component.
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let shift = if top < UNDERFLOW_LOG { top } else { 0.0 };
        let weighted: Vec<f64> = m
            .components()
            .iter()
            .zip(&logs)
            .map(|(c, l)| c.weight * (l - shift).exp())
            .collect();
        let s0 = dot2(&weighted, &vec![1.0; n]);
        let s1 = dot2(&weighted, &rates);
        if !(s0 > 0.0 && s1 > 0.0) {
            return Err(Error::SingularPoint { t });
        }
        let alpha = weighted.iter().zip(&rates).map(|(w, r)| w * r / s1).collect();
        let mut pair_terms = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let diff = rates[i] - rates[j];
                pair_terms.push(weighted[i] * weighted[j] * diff * diff);
            }
        }
        let n_scaled = crate::numeric::compensated_sum(pair_terms);
        Ok(Terms {
            q: n_scaled / (s1 * s0),
            rates,
            indices,
            s0,
            alpha,
            n_value: n_scaled * (2.0 * shift).exp(),
            weighted,
        })
    }

    /// `s1/s0`, written as an offset from the dominant component's rate so
    /// the value settles exactly on that rate once the others vanish.
    fn rate(&self) -> f64 {
        let k = (0..self.weighted.len())
            .max_by(|&a, &b| self.weighted[a].total_cmp(&self.weighted[b]))
            .expect("mixtures have components");
        let offsets: Vec<f64> = self.rates.iter().map(|r| r - self.rates[k]).collect();
        self.rates[k] + dot2(&self.weighted, &offsets) / self.s0
    }

    fn index(&self) -> f64 {
        dot2(&self.alpha, &self.indices) + self.q
    }
}

impl Discount for Mixture {
    fn label(&self) -> &str {
        &self.label
    }

    fn domain(&self) -> (f64, f64) {
        self.components.iter().fold((0.0, f64::INFINITY), |(lo, hi), c| {
            let (a, b) = c.curve.domain();
            (lo.max(a), hi.min(b))
        })
    }

    fn singular_at_origin(&self) -> bool {
        self.components.iter().any(|c| c.curve.singular_at_origin())
    }

    fn value(&self, t: f64) -> Result<f64> {
        check_time(t, self.domain())?;
        let values = self
            .components
            .iter()
            .map(|c| c.curve.value(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(dot2(&self.weights(), &values))
    }

    fn log_value(&self, t: f64) -> Result<f64> {
        check_time(t, self.domain())?;
        let logs = self
            .components
            .iter()
            .map(|c| c.curve.log_value(t))
            .collect::<Result<Vec<_>>>()?;
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(top);
        }
        let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        Ok(top + dot2(&self.weights(), &scaled).ln())
    }

    fn analytic_derivatives(&self, t: f64) -> Result<Derivatives> {
        self.combine(t, |c| c.analytic_derivatives(t))
    }

    fn derivatives(&self, t: f64, mode: DerivativeMode) -> Result<Derivatives> {
        self.combine(t, |c| c.derivatives(t, mode))
    }

    /// In analytic mode the index is assembled as `Σ αᵢ Iᵢ + Q`, which avoids
    /// the cancellation in `IR - r` once one component dominates.
    fn rates(&self, t: f64, mode: DerivativeMode) -> Result<Rates> {
        match mode {
            DerivativeMode::Analytic => {
                let terms = Terms::at(self, t)?;
                let r = terms.rate();
                let index = terms.index();
                Ok(Rates {
                    r,
                    ir: r + index,
                    index,
                })
            }
            _ => Rates::from_derivatives(t, self.derivatives(t, mode)?),
        }
    }
}

/// Builds a mixture from weighted curves (group-average interpretation).
pub fn mix<C: Into<Curve>>(components: Vec<(C, f64)>) -> Result<Mixture> {
    Mixture::new(components, Interpretation::GroupAverage)
}

/// Mixture rate as a weighted average of component rates, `Σ (λᵢDᵢ/D) rᵢ`.
pub fn mixture_rate(m: &Mixture, t: f64) -> Result<f64> {
    Ok(Terms::at(m, t)?.rate())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    /// `alpha[k][i]` is the weight of component `i` at `times[k]`.
    pub alpha: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub n_values: Vec<f64>,
    pub i_direct: Vec<f64>,
    pub i_decomposed: Vec<f64>,
    pub component_index: Vec<Vec<f64>>,
    pub component_rates: Vec<Vec<f64>>,
    /// Component rates differ at this point, so the lower bound is strict.
    pub strict: Vec<bool>,
}

impl DecompositionReport {
    pub fn min_component_index(&self, k: usize) -> f64 {
        self.component_index[k].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|I_direct - I_decomposed| / max(1, |I_direct|)`.
    pub fn max_identity_error(&self) -> f64 {
        self.i_direct
            .iter()
            .zip(&self.i_decomposed)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Smallest `I_direct - min_i I_i` over the grid.
    pub fn min_lower_bound_margin(&self) -> f64 {
        (0..self.times.len())
            .map(|k| self.i_direct[k] - self.min_component_index(k))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_table(&self) -> Table {
        let n = self.labels.len();
        let mut columns: Vec<String> = ["t", "I_direct", "I_decomposed", "Q", "N"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        columns.extend((1..=n).map(|i| format!("alpha_{i}")));
        columns.extend((1..=n).map(|i| format!("I_{i}")));
        let rows = (0..self.times.len())
            .map(|k| {
                let mut row = vec![
                    self.times[k],
                    self.i_direct[k],
                    self.i_decomposed[k],
                    self.q[k],
                    self.n_values[k],
                ];
                row.extend(&self.alpha[k]);
                row.extend(&self.component_index[k]);
                row
            })
            .collect();
        let mut table = Table::new(columns, rows);
        for (i, l) in self.labels.iter().enumerate() {
            table.push_meta(format!("component_{}", i + 1), l.clone());
        }
        table
    }
}

/// Decomposes the mixture index on `grid` into `Σ αᵢ Iᵢ + Q`.
pub fn decompose_index(m: &Mixture, grid: &TimeGrid) -> Result<DecompositionReport> {
    decompose_index_with_tol(m, grid, DEFAULT_TOL)
}

pub fn decompose_index_with_tol(
    m: &Mixture,
    grid: &TimeGrid,
    tol: f64,
) -> Result<DecompositionReport> {
    if grid.len() < 3 {
        return Err(Error::GridTooCoarse(grid.len()));
    }
    check_time(grid.t_min(), m.domain())?;
    check_time(grid.t_max(), m.domain())?;
    let lambda = m.weights();
    let mut report = DecompositionReport {
        labels: m.components().iter().map(|c| c.curve.label().to_string()).collect(),
        times: grid.points().to_vec(),
        alpha: Vec::with_capacity(grid.len()),
        q: Vec::with_capacity(grid.len()),
        n_values: Vec::with_capacity(grid.len()),
        i_direct: Vec::with_capacity(grid.len()),
        i_decomposed: Vec::with_capacity(grid.len()),
        component_index: Vec::with_capacity(grid.len()),
        component_rates: Vec::with_capacity(grid.len()),
        strict: Vec::with_capacity(grid.len()),
    };

    for &t in grid.points() {
        let terms = Terms::at(m, t)?;
        let derivs = m
            .components()
            .iter()
            .map(|c| c.curve.analytic_derivatives(t))
            .collect::<Result<Vec<_>>>()?;
        let m0 = dot2(&lambda, &derivs.iter().map(|d| d.value).collect::<Vec<_>>());
        let m1 = dot2(&lambda, &derivs.iter().map(|d| d.first).collect::<Vec<_>>());
        let m2 = dot2(&lambda, &derivs.iter().map(|d| d.second).collect::<Vec<_>>());
        if !(m1 < 0.0) {
            return Err(Error::SingularPoint { t });
        }
        let i_direct = -m2 / m1 + m1 / m0;

        let r_max = terms.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let r_min = terms.rates.iter().copied().fold(f64::INFINITY, f64::min);
        report.i_decomposed.push(terms.index());
        report.i_direct.push(i_direct);
        report.strict.push(r_max - r_min > tol * r_max);
        report.q.push(terms.q);
        report.n_values.push(terms.n_value);
        report.alpha.push(terms.alpha);
        report.component_index.push(terms.indices);
        report.component_rates.push(terms.rates);
    }
    Ok(report)
}

/// Outcome of checking that a mixture of a DI chain is strictly more DI than
/// the least DI component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainVerdict {
    pub verdict: ComparisonVerdict,
    /// Minimum of `I_mix - I_n` over non-flat grid points.
    pub index_gap: f64,
    pub holds: bool,
}

/// Default grid for chain checks: 400 log-spaced points on `[1e-3, 100]`.
pub fn theorem_grid() -> TimeGrid {
    TimeGrid::log(1e-3, 100.0, 400).expect("static grid")
}

/// Checks `D ≻_DI Dₙ` for a mixture whose components are ordered
/// `D₁ ≽_DI D₂ ≽_DI … ≽_DI Dₙ`.
pub fn verify_theorem_main(m: &Mixture, grid: &TimeGrid) -> Result<ChainVerdict> {
    verify_theorem_main_with_tol(m, grid, DEFAULT_TOL)
}

pub fn verify_theorem_main_with_tol(m: &Mixture, grid: &TimeGrid, tol: f64) -> Result<ChainVerdict> {
    if let Some(MixtureWarning::DuplicateComponents { first, second }) = m.warnings().first() {
        return Err(Error::DegenerateMixture(format!(
            "components {first} and {second} are identical"
        )));
    }
    let comps = m.components();
    for (k, pair) in comps.windows(2).enumerate() {
        let v = comparison::compare_by_index(&pair[0].curve, &pair[1].curve, grid, tol)?;
        if !v.relation.is_at_least_as_di() {
            return Err(Error::NotComparable(format!(
                "component {} is not at least as DI as component {} ({:?})",
                k + 1,
                k + 2,
                v.relation
            )));
        }
    }
    let last = &comps[comps.len() - 1].curve;
    let verdict = comparison::compare_by_index(m, last, grid, tol)?;
    let mut index_gap_min = f64::INFINITY;
    for &t in grid.points() {
        if let Some((gap, scale)) = index_gap(m, last, t)? {
            if comparison::sign_of(gap, tol * scale) != Sign::Flat {
                index_gap_min = index_gap_min.min(gap);
            }
        }
    }
    let holds = verdict.relation == Relation::StrictlyMoreDi && index_gap_min > 0.0;
    Ok(ChainVerdict {
        verdict,
        index_gap: index_gap_min,
        holds,
    })
}

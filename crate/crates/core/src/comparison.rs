//! Classification of single discount functions and comparative DI of pairs.
//!
//! Convexity is tested on grids through the relative change of successive
//! slopes, `(s_right - s_left) / (|s_left| + |s_right|)`, which carries the sign
//! of the second divided difference but is scale free. A value within `±tol`
//! counts as flat. Strict convexity is certified when no more than
//! [`MAX_FLAT_RUN`] consecutive interior points are flat.

use serde::Serialize;

use crate::discount::{check_time, DerivativeMode, Discount};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::numeric;

/// Relative tolerance for analytic curves.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative tolerance for tabulated curves and finite-difference derivatives.
pub const NUMERIC_TOL: f64 = 1e-5;
/// Longest run of flat points still compatible with strictness.
pub const MAX_FLAT_RUN: usize = 3;

const INVERSION_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyDi,
    Di,
    ConstantImpatience,
    Ii,
    StrictlyIi,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Flat,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evidence {
    pub t: f64,
    pub curvature: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub tolerance: f64,
    /// Verdict implied by the sign of the index of DI, when derivatives exist.
    pub index_verdict: Option<Verdict>,
}

impl Classification {
    pub fn index_agrees(&self) -> Option<bool> {
        self.index_verdict.map(|v| v == self.verdict)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Relation {
    StrictlyMoreDi,
    MoreDi,
    EquallyDi { exponent: f64 },
    LessDi,
    StrictlyLessDi,
    Incomparable,
}

impl Relation {
    /// The relation seen from the other curve.
    pub fn reversed(self) -> Relation {
        match self {
            Relation::StrictlyMoreDi => Relation::StrictlyLessDi,
            Relation::MoreDi => Relation::LessDi,
            Relation::EquallyDi { exponent } => Relation::EquallyDi {
                exponent: 1.0 / exponent,
            },
            Relation::LessDi => Relation::MoreDi,
            Relation::StrictlyLessDi => Relation::StrictlyMoreDi,
            Relation::Incomparable => Relation::Incomparable,
        }
    }

    /// `D₁ ≽_DI D₂` (weakly at least as DI).
    pub fn is_at_least_as_di(self) -> bool {
        matches!(
            self,
            Relation::StrictlyMoreDi | Relation::MoreDi | Relation::EquallyDi { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    IndexComparison,
    ConvexTransform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    #[serde(flatten)]
    pub relation: Relation,
    /// Times at which the ordering flips, ascending.
    pub crossing_points: Vec<f64>,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ExponentFit {
    EquallyDi { exponent: f64, max_residual: f64 },
    NotEquallyDi { best_exponent: f64, max_residual: f64 },
}

impl ExponentFit {
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            ExponentFit::EquallyDi { exponent, .. } => Some(exponent),
            ExponentFit::NotEquallyDi { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    StrictlyConvex,
    Convex,
    Linear,
    Concave,
    StrictlyConcave,
    Mixed,
}

pub(crate) fn sign_of(x: f64, tol: f64) -> Sign {
    if x > tol {
        Sign::Positive
    } else if x < -tol {
        Sign::Negative
    } else {
        Sign::Flat
    }
}

fn longest_flat_run(signs: &[Sign]) -> usize {
    let mut longest = 0;
    let mut run = 0;
    for s in signs {
        if *s == Sign::Flat {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    longest
}

fn shape_of(signs: &[Sign]) -> Shape {
    let any_pos = signs.contains(&Sign::Positive);
    let any_neg = signs.contains(&Sign::Negative);
    let strict = longest_flat_run(signs) <= MAX_FLAT_RUN;
    match (any_pos, any_neg) {
        (true, true) => Shape::Mixed,
        (false, false) => Shape::Linear,
        (true, false) if strict => Shape::StrictlyConvex,
        (true, false) => Shape::Convex,
        (false, true) if strict => Shape::StrictlyConcave,
        (false, true) => Shape::Concave,
    }
}

/// Scale-free curvature at each interior point of `(xs, ys)`.
fn curvature_evidence(xs: &[f64], ys: &[f64], at: &[f64], tol: f64) -> Vec<Evidence> {
    (1..xs.len() - 1)
        .map(|k| {
            let left = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
            let right = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
            let denom = left.abs() + right.abs();
            let curvature = if denom > 0.0 { (right - left) / denom } else { 0.0 };
            Evidence {
                t: at[k],
                curvature,
                sign: sign_of(curvature, tol),
            }
        })
        .collect()
}

fn verdict_of(shape: Shape) -> Verdict {
    match shape {
        Shape::StrictlyConvex => Verdict::StrictlyDi,
        Shape::Convex => Verdict::Di,
        Shape::Linear => Verdict::ConstantImpatience,
        Shape::Concave => Verdict::Ii,
        Shape::StrictlyConcave => Verdict::StrictlyIi,
        Shape::Mixed => Verdict::Indeterminate,
    }
}

fn check_grid<D: Discount + ?Sized>(spec: &D, grid: &TimeGrid) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::GridTooCoarse(grid.len()));
    }
    check_time(grid.t_min(), spec.domain())?;
    check_time(grid.t_max(), spec.domain())
}

/// Classifies `spec` as DI, II or constant impatience from the convexity of
/// `ln D` on `grid`.
pub fn classify<D: Discount + ?Sized>(
    spec: &D,
    grid: &TimeGrid,
    tol: f64,
) -> Result<Classification> {
    check_grid(spec, grid)?;
    let ts = grid.points();
    let logs = ts
        .iter()
        .map(|&t| spec.log_value(t))
        .collect::<Result<Vec<_>>>()?;
    let evidence = curvature_evidence(ts, &logs, ts, tol);
    let signs: Vec<Sign> = evidence.iter().map(|e| e.sign).collect();
    let verdict = verdict_of(shape_of(&signs));

    let mut index_signs = Vec::with_capacity(ts.len());
    let mut differentiable = true;
    for &t in ts {
        match spec.rates(t, DerivativeMode::Analytic) {
            Ok(rates) => index_signs.push(sign_of(rates.index, tol * rates.r.abs())),
            Err(Error::SingularPoint { .. }) if t == 0.0 && spec.singular_at_origin() => {}
            Err(_) => {
                differentiable = false;
                break;
            }
        }
    }
    let index_verdict = (differentiable && index_signs.len() >= 3)
        .then(|| verdict_of(shape_of(&index_signs)));

    Ok(Classification {
        verdict,
        evidence,
        tolerance: tol,
        index_verdict,
    })
}

/// Present bias coincides with strictly decreasing impatience.
pub fn is_present_biased<D: Discount + ?Sized>(spec: &D, grid: &TimeGrid, tol: f64) -> Result<bool> {
    Ok(classify(spec, grid, tol)?.verdict == Verdict::StrictlyDi)
}

/// Solves `D(t) = level` by bracketing and bisection.
pub fn invert<D: Discount + ?Sized>(spec: &D, level: f64) -> Result<f64> {
    let t_end = spec.domain().1;
    if t_end.is_finite() && !(level >= spec.value(t_end)?) {
        return Err(Error::InversionFailure { target: level });
    }
    numeric::invert_decreasing(
        |t| spec.value(t.min(t_end)).ok(),
        level,
        t_end.min(1.0),
        INVERSION_MAX_ITER,
    )
    .ok_or(Error::InversionFailure { target: level })
}

/// Log-levels `z = ln D(t)` of `spec` at the grid times, ascending.
pub fn z_grid_for<D: Discount + ?Sized>(spec: &D, grid: &TimeGrid) -> Result<Vec<f64>> {
    let mut z = grid
        .points()
        .iter()
        .map(|&t| spec.log_value(t))
        .collect::<Result<Vec<_>>>()?;
    z.reverse();
    Ok(z)
}

/// Tests convexity of `φ(z) = ln D₁(D₂⁻¹(e^z))` on `z_grid ⊂ (-∞, 0]`.
pub fn convex_transform_test<A, B>(
    d1: &A,
    d2: &B,
    z_grid: &[f64],
    tol: f64,
) -> Result<ComparisonVerdict>
where
    A: Discount + ?Sized,
    B: Discount + ?Sized,
{
    if z_grid.len() < 3 {
        return Err(Error::GridTooCoarse(z_grid.len()));
    }
    if z_grid.iter().any(|z| !z.is_finite() || *z > 0.0) {
        return Err(Error::InvalidGrid("z grid must lie in (-inf, 0]".into()));
    }
    if z_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("z grid must be strictly increasing".into()));
    }
    let times = z_grid
        .iter()
        .map(|&z| invert(d2, z.exp()))
        .collect::<Result<Vec<_>>>()?;
    let phi = times
        .iter()
        .map(|&t| d1.log_value(t))
        .collect::<Result<Vec<_>>>()?;
    let evidence = curvature_evidence(z_grid, &phi, &times, tol);
    let signs: Vec<Sign> = evidence.iter().map(|e| e.sign).collect();

    let relation = match shape_of(&signs) {
        Shape::StrictlyConvex => Relation::StrictlyMoreDi,
        Shape::Convex => Relation::MoreDi,
        Shape::StrictlyConcave => Relation::StrictlyLessDi,
        Shape::Concave => Relation::LessDi,
        Shape::Mixed => Relation::Incomparable,
        Shape::Linear => {
            let ratios: Vec<f64> = z_grid
                .iter()
                .zip(&phi)
                .filter(|(z, _)| **z < 0.0)
                .map(|(z, p)| p / z)
                .collect();
            let c = numeric::median(&ratios)
                .ok_or_else(|| Error::DegenerateInput("z grid has no negative points".into()))?;
            let fits = z_grid
                .iter()
                .zip(&phi)
                .all(|(z, p)| (p - c * z).abs() <= tol * z.abs());
            if fits {
                Relation::EquallyDi { exponent: c }
            } else {
                let mean: f64 = evidence.iter().map(|e| e.curvature).sum();
                if mean >= 0.0 {
                    Relation::MoreDi
                } else {
                    Relation::LessDi
                }
            }
        }
    };

    let mut crossing_points = Vec::new();
    if relation == Relation::Incomparable {
        let mut last: Option<&Evidence> = None;
        for e in evidence.iter().filter(|e| e.sign != Sign::Flat) {
            if let Some(prev) = last {
                if prev.sign != e.sign {
                    crossing_points.push(0.5 * (prev.t + e.t));
                }
            }
            last = Some(e);
        }
        crossing_points.sort_by(f64::total_cmp);
    }

    Ok(ComparisonVerdict {
        relation,
        crossing_points,
        method: Method::ConvexTransform,
    })
}

/// Index difference `I₁ - I₂` and its flatness scale at `t`; `None` where either
/// curve is singular.
pub(crate) fn index_gap<A, B>(d1: &A, d2: &B, t: f64) -> Result<Option<(f64, f64)>>
where
    A: Discount + ?Sized,
    B: Discount + ?Sized,
{
    let rates = |d: &dyn Fn(f64) -> Result<crate::Rates>, singular: bool| match d(t) {
        Err(Error::SingularPoint { .. }) if t == 0.0 && singular => Ok(None),
        other => other.map(Some),
    };
    let r1 = rates(&|t| d1.rates(t, DerivativeMode::Analytic), d1.singular_at_origin())?;
    let r2 = rates(&|t| d2.rates(t, DerivativeMode::Analytic), d2.singular_at_origin())?;
    Ok(match (r1, r2) {
        (Some(a), Some(b)) => {
            let scale = a.index.abs().max(b.index.abs());
            Some((a.index - b.index, scale))
        }
        _ => None,
    })
}

/// Orders two curves by their indices of DI on `grid`.
pub fn compare_by_index<A, B>(d1: &A, d2: &B, grid: &TimeGrid, tol: f64) -> Result<ComparisonVerdict>
where
    A: Discount + ?Sized,
    B: Discount + ?Sized,
{
    check_grid(d1, grid)?;
    check_grid(d2, grid)?;
    let mut samples: Vec<(f64, f64, Sign)> = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        if let Some((gap, scale)) = index_gap(d1, d2, t)? {
            samples.push((t, gap, sign_of(gap, tol * scale)));
        }
    }
    if samples.len() < 3 {
        return Err(Error::GridTooCoarse(samples.len()));
    }
    let signs: Vec<Sign> = samples.iter().map(|s| s.2).collect();

    let relation = match shape_of(&signs) {
        Shape::StrictlyConvex => Relation::StrictlyMoreDi,
        Shape::Convex => Relation::MoreDi,
        Shape::StrictlyConcave => Relation::StrictlyLessDi,
        Shape::Concave => Relation::LessDi,
        Shape::Mixed => Relation::Incomparable,
        Shape::Linear => {
            let positive: Vec<f64> = grid.points().iter().copied().filter(|t| *t > 0.0).collect();
            let fit = if positive.len() >= 3 {
                fit_equal_di_exponent(d1, d2, &TimeGrid::from_points(positive)?)?
            } else {
                return Err(Error::GridTooCoarse(positive.len()));
            };
            match fit {
                ExponentFit::EquallyDi { exponent, .. } => Relation::EquallyDi { exponent },
                ExponentFit::NotEquallyDi { .. } => Relation::MoreDi,
            }
        }
    };

    let mut crossing_points = Vec::new();
    if relation == Relation::Incomparable {
        let mut last: Option<&(f64, f64, Sign)> = None;
        for s in samples.iter().filter(|s| s.2 != Sign::Flat) {
            if let Some(prev) = last {
                if prev.2 != s.2 {
                    let root = numeric::bisect_sign_change(
                        |t| index_gap(d1, d2, t).ok().flatten().map(|g| g.0),
                        prev.0,
                        s.0,
                        200,
                    );
                    crossing_points.push(root.unwrap_or(0.5 * (prev.0 + s.0)));
                }
            }
            last = Some(s);
        }
    }

    Ok(ComparisonVerdict {
        relation,
        crossing_points,
        method: Method::IndexComparison,
    })
}

/// Fits `D₁ = D₂^c` on `grid` (all points must have `t > 0`).
pub fn fit_equal_di_exponent<A, B>(d1: &A, d2: &B, grid: &TimeGrid) -> Result<ExponentFit>
where
    A: Discount + ?Sized,
    B: Discount + ?Sized,
{
    fit_equal_di_exponent_with_tol(d1, d2, grid, DEFAULT_TOL)
}

pub fn fit_equal_di_exponent_with_tol<A, B>(
    d1: &A,
    d2: &B,
    grid: &TimeGrid,
    tol: f64,
) -> Result<ExponentFit>
where
    A: Discount + ?Sized,
    B: Discount + ?Sized,
{
    let mut pairs = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        let l2 = d2.log_value(t)?;
        if l2 == 0.0 {
            return Err(Error::DegenerateInput(format!("ln D2({t}) = 0")));
        }
        pairs.push((d1.log_value(t)?, l2));
    }
    let ratios: Vec<f64> = pairs.iter().map(|(a, b)| a / b).collect();
    let c = numeric::median(&ratios).ok_or(Error::GridTooCoarse(0))?;
    let max_residual = pairs
        .iter()
        .map(|(a, b)| (a - c * b).abs() / b.abs())
        .fold(0.0, f64::max);
    Ok(if max_residual <= tol {
        ExponentFit::EquallyDi {
            exponent: c,
            max_residual,
        }
    } else {
        ExponentFit::NotEquallyDi {
            best_exponent: c,
            max_residual,
        }
    })
}

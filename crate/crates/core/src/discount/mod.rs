//! Discount-function families and their rates.
//!
//! For a discount function `D` the time-preference rate is `r = -D'/D`, the
//! impatience rate is `IR = -D''/D'` and the index of decreasing impatience
//! is `I = IR - r`, which also equals `-r'/r`.

mod finite_diff;
mod tabulated;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

pub use finite_diff::DEFAULT_STEP as DEFAULT_FD_STEP;
pub use tabulated::Tabulated;

/// How derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

impl DerivativeMode {
    pub fn finite_difference() -> Self {
        DerivativeMode::FiniteDifference {
            step: DEFAULT_FD_STEP,
        }
    }
}

/// `(D, D', D'')` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl Derivatives {
    fn from_log(l: f64, dl: f64, d2l: f64) -> Self {
        let value = l.exp();
        Derivatives {
            value,
            first: dl * value,
            second: (d2l + dl * dl) * value,
        }
    }
}

/// Time-preference rate, impatience rate and index of DI at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub r: f64,
    pub ir: f64,
    pub index: f64,
}

impl Rates {
    pub fn from_derivatives(t: f64, d: Derivatives) -> Result<Self> {
        if !(d.first < 0.0) || !d.second.is_finite() || !(d.value > 0.0) {
            return Err(Error::SingularPoint { t });
        }
        let r = -d.first / d.value;
        let ir = -d.second / d.first;
        Ok(Rates {
            r,
            ir,
            index: ir - r,
        })
    }

    /// Sentinel for points where the rates diverge.
    pub fn infinite() -> Self {
        Rates {
            r: f64::INFINITY,
            ir: f64::INFINITY,
            index: f64::INFINITY,
        }
    }
}

/// Anything that behaves like a discount function.
pub trait Discount {
    fn label(&self) -> &str;

    /// Closed interval of times on which the curve is defined.
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// Rates diverge at `t = 0` (slow Weibull).
    fn singular_at_origin(&self) -> bool {
        false
    }

    fn value(&self, t: f64) -> Result<f64>;

    fn log_value(&self, t: f64) -> Result<f64> {
        Ok(self.value(t)?.ln())
    }

    fn analytic_derivatives(&self, t: f64) -> Result<Derivatives>;

    fn derivatives(&self, t: f64, mode: DerivativeMode) -> Result<Derivatives> {
        match mode {
            DerivativeMode::Analytic => self.analytic_derivatives(t),
            DerivativeMode::FiniteDifference { step } => {
                check_time(t, self.domain())?;
                if self.singular_at_origin() && t == 0.0 {
                    return Err(Error::SingularPoint { t });
                }
                let (l, dl, d2l) = finite_diff::log_derivatives(
                    |s| self.log_value(s),
                    t,
                    step,
                    self.singular_at_origin(),
                    self.domain(),
                )?;
                Ok(Derivatives::from_log(l, dl, d2l))
            }
        }
    }

    fn rates(&self, t: f64, mode: DerivativeMode) -> Result<Rates> {
        Rates::from_derivatives(t, self.derivatives(t, mode)?)
    }

    /// `r'(t)`, from analytic derivatives unless overridden by a closed form.
    fn rate_slope(&self, t: f64) -> Result<f64> {
        let d = self.analytic_derivatives(t)?;
        let r = -d.first / d.value;
        Ok(r * r - d.second / d.value)
    }
}

pub(crate) fn check_time(t: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t < lo || t > hi {
        return Err(Error::Domain { t, min: lo, max: hi });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `exp(-rate·t)`
    Exponential { rate: f64 },
    /// `(1 + h t)^(-alpha/h)`
    GeneralizedHyperbolic { alpha: f64, h: f64 },
    /// `(1 + h t)^(-1)`
    ProportionalHyperbolic { h: f64 },
    /// `(1 + h t)^(-2)`
    ZeroSpeedHyperbolic { h: f64 },
    /// `exp(-alpha·√t)`
    SlowWeibull { alpha: f64 },
    Tabulated(Tabulated),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential { .. } => "exponential",
            Family::GeneralizedHyperbolic { .. } => "generalized_hyperbolic",
            Family::ProportionalHyperbolic { .. } => "proportional_hyperbolic",
            Family::ZeroSpeedHyperbolic { .. } => "zero_speed_hyperbolic",
            Family::SlowWeibull { .. } => "slow_weibull",
            Family::Tabulated(_) => "tabulated",
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameters(format!(
                    "{} requires {name} > 0, got {v}",
                    self.name()
                )))
            }
        };
        match *self {
            Family::Exponential { rate } => positive("rate", rate),
            Family::GeneralizedHyperbolic { alpha, h } => {
                positive("alpha", alpha)?;
                positive("h", h)
            }
            Family::ProportionalHyperbolic { h } | Family::ZeroSpeedHyperbolic { h } => {
                positive("h", h)
            }
            Family::SlowWeibull { alpha } => positive("alpha", alpha),
            Family::Tabulated(_) => Ok(()),
        }
    }

    /// Under the built-in families `D(t) → 0` as `t → ∞` holds by construction;
    /// a finite table cannot certify it.
    pub fn vanishes_at_infinity(&self) -> Option<bool> {
        match self {
            Family::Tabulated(_) => None,
            _ => Some(true),
        }
    }
}

/// A discount function with a label.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountSpec {
    family: Family,
    label: String,
}

impl DiscountSpec {
    pub fn new(family: Family, label: impl Into<String>) -> Result<Self> {
        family.validate()?;
        Ok(DiscountSpec {
            family,
            label: label.into(),
        })
    }

    /// Validates `family` and labels it by family and parameters.
    pub fn from_family(family: Family) -> Result<Self> {
        Self::unlabeled(family)
    }

    fn unlabeled(family: Family) -> Result<Self> {
        family.validate()?;
        let label = default_label(&family);
        Ok(DiscountSpec { family, label })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::unlabeled(Family::Exponential { rate })
    }

    /// Exponential discounting with per-period factor `δ ∈ (0, 1)`, i.e. `D(t) = δ^t`.
    pub fn exponential_factor(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "discount factor must lie in (0, 1), got {delta}"
            )));
        }
        Self::exponential(-delta.ln())
    }

    pub fn generalized_hyperbolic(alpha: f64, h: f64) -> Result<Self> {
        Self::unlabeled(Family::GeneralizedHyperbolic { alpha, h })
    }

    pub fn proportional_hyperbolic(h: f64) -> Result<Self> {
        Self::unlabeled(Family::ProportionalHyperbolic { h })
    }

    pub fn zero_speed_hyperbolic(h: f64) -> Result<Self> {
        Self::unlabeled(Family::ZeroSpeedHyperbolic { h })
    }

    pub fn slow_weibull(alpha: f64) -> Result<Self> {
        Self::unlabeled(Family::SlowWeibull { alpha })
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::unlabeled(Family::Tabulated(Tabulated::new(times, values)?))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Constant rate of an exponential spec; `NaN` for other families.
    pub(crate) fn family_rate(&self) -> f64 {
        match self.family {
            Family::Exponential { rate } => rate,
            _ => f64::NAN,
        }
    }

    /// `D(t)^c`, kept in closed form for the built-in families.
    pub fn powf(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "exponent must be positive, got {c}"
            )));
        }
        let family = match &self.family {
            Family::Exponential { rate } => Family::Exponential { rate: c * rate },
            Family::GeneralizedHyperbolic { alpha, h } => Family::GeneralizedHyperbolic {
                alpha: c * alpha,
                h: *h,
            },
            Family::ProportionalHyperbolic { h } => Family::GeneralizedHyperbolic {
                alpha: c * h,
                h: *h,
            },
            Family::ZeroSpeedHyperbolic { h } => Family::GeneralizedHyperbolic {
                alpha: 2.0 * c * h,
                h: *h,
            },
            Family::SlowWeibull { alpha } => Family::SlowWeibull { alpha: c * alpha },
            Family::Tabulated(tab) => Family::Tabulated(tab.powf(c)?),
        };
        Ok(DiscountSpec::unlabeled(family)?.with_label(format!("({})^{c}", self.label)))
    }

    /// Same family with parameters equal to within `tol` (relative).
    pub fn same_curve(&self, other: &DiscountSpec, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs());
        match (&self.family, &other.family) {
            (Family::Exponential { rate: a }, Family::Exponential { rate: b }) => close(*a, *b),
            (
                Family::GeneralizedHyperbolic { alpha: a1, h: h1 },
                Family::GeneralizedHyperbolic { alpha: a2, h: h2 },
            ) => close(*a1, *a2) && close(*h1, *h2),
            (Family::ProportionalHyperbolic { h: a }, Family::ProportionalHyperbolic { h: b })
            | (Family::ZeroSpeedHyperbolic { h: a }, Family::ZeroSpeedHyperbolic { h: b }) => {
                close(*a, *b)
            }
            (Family::SlowWeibull { alpha: a }, Family::SlowWeibull { alpha: b }) => close(*a, *b),
            (Family::Tabulated(a), Family::Tabulated(b)) => {
                a.times().len() == b.times().len()
                    && a.times().iter().zip(b.times()).all(|(x, y)| close(*x, *y))
                    && a.values().iter().zip(b.values()).all(|(x, y)| close(*x, *y))
            }
            _ => false,
        }
    }

    /// Closed-form rates (tabulated curves use the interpolant).
    fn closed_form_rates(&self, t: f64) -> Result<Rates> {
        self.check(t)?;
        let (r, index) = match self.family {
            Family::Exponential { rate } => (rate, 0.0),
            Family::GeneralizedHyperbolic { alpha, h } => {
                let u = 1.0 + h * t;
                (alpha / u, h / u)
            }
            Family::ProportionalHyperbolic { h } => {
                let u = 1.0 + h * t;
                (h / u, h / u)
            }
            Family::ZeroSpeedHyperbolic { h } => {
                let u = 1.0 + h * t;
                (2.0 * h / u, h / u)
            }
            Family::SlowWeibull { alpha } => {
                if t == 0.0 {
                    return Err(Error::SingularPoint { t });
                }
                (0.5 * alpha / t.sqrt(), 0.5 / t)
            }
            Family::Tabulated(ref tab) => {
                let (_, dl, d2l) = tab.eval(t);
                if !(dl < 0.0) {
                    return Err(Error::SingularPoint { t });
                }
                (-dl, -d2l / dl)
            }
        };
        Ok(Rates {
            r,
            ir: r + index,
            index,
        })
    }

    fn check(&self, t: f64) -> Result<()> {
        check_time(t, self.domain())
    }
}

fn default_label(family: &Family) -> String {
    match family {
        Family::Exponential { rate } => format!("exponential(rate={rate})"),
        Family::GeneralizedHyperbolic { alpha, h } => {
            format!("generalized_hyperbolic(alpha={alpha},h={h})")
        }
        Family::ProportionalHyperbolic { h } => format!("proportional_hyperbolic(h={h})"),
        Family::ZeroSpeedHyperbolic { h } => format!("zero_speed_hyperbolic(h={h})"),
        Family::SlowWeibull { alpha } => format!("slow_weibull(alpha={alpha})"),
        Family::Tabulated(tab) => format!("tabulated({} points)", tab.times().len()),
    }
}

impl Discount for DiscountSpec {
    fn label(&self) -> &str {
        &self.label
    }

    fn domain(&self) -> (f64, f64) {
        match &self.family {
            Family::Tabulated(tab) => tab.domain(),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn singular_at_origin(&self) -> bool {
        matches!(self.family, Family::SlowWeibull { .. })
    }

    fn value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self.family {
            Family::Exponential { rate } => (-rate * t).exp(),
            Family::GeneralizedHyperbolic { alpha, h } => (1.0 + h * t).powf(-alpha / h),
            Family::ProportionalHyperbolic { h } => 1.0 / (1.0 + h * t),
            Family::ZeroSpeedHyperbolic { h } => {
                let u = 1.0 + h * t;
                1.0 / (u * u)
            }
            Family::SlowWeibull { alpha } => (-alpha * t.sqrt()).exp(),
            Family::Tabulated(ref tab) => tab.eval(t).0.exp(),
        })
    }

    fn log_value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self.family {
            Family::Exponential { rate } => -rate * t,
            Family::GeneralizedHyperbolic { alpha, h } => -(alpha / h) * (h * t).ln_1p(),
            Family::ProportionalHyperbolic { h } => -(h * t).ln_1p(),
            Family::ZeroSpeedHyperbolic { h } => -2.0 * (h * t).ln_1p(),
            Family::SlowWeibull { alpha } => -alpha * t.sqrt(),
            Family::Tabulated(ref tab) => tab.eval(t).0,
        })
    }

    fn analytic_derivatives(&self, t: f64) -> Result<Derivatives> {
        let value = self.value(t)?;
        let (first, second) = match self.family {
            Family::Exponential { rate } => (-rate * value, rate * rate * value),
            Family::GeneralizedHyperbolic { alpha, h } => {
                let q = value / (1.0 + h * t);
                (-alpha * q, alpha * (alpha + h) * q / (1.0 + h * t))
            }
            Family::ProportionalHyperbolic { h } => {
                let q = value / (1.0 + h * t);
                (-h * q, 2.0 * h * h * q / (1.0 + h * t))
            }
            Family::ZeroSpeedHyperbolic { h } => {
                let q = value / (1.0 + h * t);
                (-2.0 * h * q, 6.0 * h * h * q / (1.0 + h * t))
            }
            Family::SlowWeibull { alpha } => {
                if t == 0.0 {
                    return Err(Error::SingularPoint { t });
                }
                let s = t.sqrt();
                (
                    -0.5 * alpha / s * value,
                    0.25 * alpha * (alpha / t + 1.0 / (t * s)) * value,
                )
            }
            Family::Tabulated(ref tab) => {
                let (l, dl, d2l) = tab.eval(t);
                return Ok(Derivatives::from_log(l, dl, d2l));
            }
        };
        Ok(Derivatives {
            value,
            first,
            second,
        })
    }

    fn rates(&self, t: f64, mode: DerivativeMode) -> Result<Rates> {
        match mode {
            DerivativeMode::Analytic => self.closed_form_rates(t),
            _ => Rates::from_derivatives(t, self.derivatives(t, mode)?),
        }
    }

    fn rate_slope(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self.family {
            Family::Exponential { .. } => 0.0,
            Family::GeneralizedHyperbolic { alpha, h } => {
                let u = 1.0 + h * t;
                -alpha * h / (u * u)
            }
            Family::ProportionalHyperbolic { h } => {
                let u = 1.0 + h * t;
                -h * h / (u * u)
            }
            Family::ZeroSpeedHyperbolic { h } => {
                let u = 1.0 + h * t;
                -2.0 * h * h / (u * u)
            }
            Family::SlowWeibull { alpha } => {
                if t == 0.0 {
                    return Err(Error::SingularPoint { t });
                }
                -0.25 * alpha / (t * t.sqrt())
            }
            Family::Tabulated(ref tab) => -tab.eval(t).2,
        })
    }
}

/// `D(t)`.
pub fn evaluate<D: Discount + ?Sized>(spec: &D, t: f64) -> Result<f64> {
    spec.value(t)
}

/// `r(t) = -D'(t)/D(t)`.
pub fn time_preference_rate<D: Discount + ?Sized>(spec: &D, t: f64) -> Result<f64> {
    Ok(spec.rates(t, DerivativeMode::Analytic)?.r)
}

/// `IR(t) = -D''(t)/D'(t)`.
pub fn impatience_rate<D: Discount + ?Sized>(spec: &D, t: f64) -> Result<f64> {
    Ok(spec.rates(t, DerivativeMode::Analytic)?.ir)
}

/// Index of decreasing impatience, `IR(t) - r(t)`.
pub fn index_of_di<D: Discount + ?Sized>(spec: &D, t: f64) -> Result<f64> {
    Ok(spec.rates(t, DerivativeMode::Analytic)?.index)
}

/// The index computed through the other route, `-r'(t)/r(t)`.
pub fn index_of_di_via_rate_slope<D: Discount + ?Sized>(spec: &D, t: f64) -> Result<f64> {
    let r = time_preference_rate(spec, t)?;
    Ok(-spec.rate_slope(t)? / r)
}

/// Rates sampled over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateProfile {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub r: Vec<f64>,
    pub ir: Vec<f64>,
    pub i_di: Vec<f64>,
    pub derivative_mode: DerivativeMode,
}

/// Samples `D`, `r`, `IR` and `I` on `grid`. Points where the rates diverge
/// (slow Weibull at the origin) carry `+∞`.
pub fn rate_profile<D: Discount + ?Sized>(
    spec: &D,
    grid: &TimeGrid,
    mode: DerivativeMode,
) -> Result<RateProfile> {
    let n = grid.len();
    let mut profile = RateProfile {
        times: grid.points().to_vec(),
        values: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        ir: Vec::with_capacity(n),
        i_di: Vec::with_capacity(n),
        derivative_mode: mode,
    };
    for &t in grid.points() {
        profile.values.push(spec.value(t)?);
        let rates = match spec.rates(t, mode) {
            Err(Error::SingularPoint { .. }) if t == 0.0 && spec.singular_at_origin() => {
                Rates::infinite()
            }
            other => other?,
        };
        profile.r.push(rates.r);
        profile.ir.push(rates.ir);
        profile.i_di.push(rates.index);
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn evaluate_examples() {
        let e = DiscountSpec::exponential(-(0.8f64).ln()).unwrap();
        assert!((evaluate(&e, 1.0).unwrap() - 0.8).abs() < 1e-15);
        let gh = DiscountSpec::generalized_hyperbolic(0.2, 0.1).unwrap();
        assert_eq!(evaluate(&gh, 0.0).unwrap(), 1.0);
        let ph = DiscountSpec::proportional_hyperbolic(0.02).unwrap();
        assert_eq!(evaluate(&ph, 50.0).unwrap(), 0.5);
    }

    #[test]
    fn evaluate_errors() {
        let ph = DiscountSpec::proportional_hyperbolic(0.02).unwrap();
        assert_eq!(evaluate(&ph, -1.0), Err(Error::NegativeTime(-1.0)));
        assert!(matches!(
            DiscountSpec::proportional_hyperbolic(0.0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(DiscountSpec::generalized_hyperbolic(1.0, -0.1).is_err());
        assert!(DiscountSpec::slow_weibull(f64::NAN).is_err());
    }

    #[test]
    fn derivative_examples() {
        let e = DiscountSpec::exponential(0.01).unwrap();
        let d = e.derivatives(0.0, DerivativeMode::Analytic).unwrap();
        assert_eq!((d.value, d.first), (1.0, -0.01));
        assert!((d.second - 1e-4).abs() < 1e-20);

        let ph = DiscountSpec::proportional_hyperbolic(0.1).unwrap();
        let d = ph.derivatives(0.0, DerivativeMode::Analytic).unwrap();
        assert_eq!(d.value, 1.0);
        assert!((d.first + 0.1).abs() < 1e-17);
        assert!((d.second - 0.02).abs() < 1e-17);
    }

    #[test]
    fn weibull_is_singular_at_origin() {
        let w = DiscountSpec::slow_weibull(0.12).unwrap();
        assert_eq!(w.value(0.0), Ok(1.0));
        assert_eq!(
            w.derivatives(0.0, DerivativeMode::Analytic),
            Err(Error::SingularPoint { t: 0.0 })
        );
        assert_eq!(
            time_preference_rate(&w, 0.0),
            Err(Error::SingularPoint { t: 0.0 })
        );
        assert!(matches!(
            w.derivatives(0.0, DerivativeMode::finite_difference()),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn rate_examples() {
        let e = DiscountSpec::exponential(0.03).unwrap();
        assert_eq!(time_preference_rate(&e, 7.0).unwrap(), 0.03);
        assert_eq!(index_of_di(&e, 7.0).unwrap(), 0.0);

        let (alpha, h) = (0.7, 0.25);
        let gh = DiscountSpec::generalized_hyperbolic(alpha, h).unwrap();
        for t in [0.0, 0.3, 4.0, 90.0] {
            assert!(rel(time_preference_rate(&gh, t).unwrap(), alpha / (1.0 + h * t)) < 1e-15);
            assert!(rel(index_of_di(&gh, t).unwrap(), h / (1.0 + h * t)) < 1e-15);
        }

        let w = DiscountSpec::slow_weibull(0.12).unwrap();
        for t in [1e-3, 1.0, 50.0] {
            assert!(rel(time_preference_rate(&w, t).unwrap(), 0.06 / t.sqrt()) < 1e-15);
            assert!(rel(index_of_di(&w, t).unwrap(), 0.5 / t) < 1e-15);
        }
    }

    #[test]
    fn zero_speed_matches_general_form() {
        for h in [0.01, 0.1, 0.37, 2.0] {
            let z = DiscountSpec::zero_speed_hyperbolic(h).unwrap();
            let g = DiscountSpec::generalized_hyperbolic(2.0 * h, h).unwrap();
            for t in [0.0, 0.5, 3.0, 40.0, 1e4] {
                assert!(rel(z.value(t).unwrap(), g.value(t).unwrap()) <= 1e-15);
            }
        }
    }

    #[test]
    fn both_index_routes_agree() {
        let specs = [
            DiscountSpec::exponential(0.2).unwrap(),
            DiscountSpec::generalized_hyperbolic(0.3, 0.05).unwrap(),
            DiscountSpec::proportional_hyperbolic(0.4).unwrap(),
            DiscountSpec::zero_speed_hyperbolic(0.1).unwrap(),
            DiscountSpec::slow_weibull(0.5).unwrap(),
        ];
        for s in &specs {
            for t in [1e-3, 0.1, 1.0, 10.0, 100.0] {
                let a = index_of_di(s, t).unwrap();
                let b = index_of_di_via_rate_slope(s, t).unwrap();
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{}: {a} vs {b}", s.label());
            }
        }
    }

    #[test]
    fn closed_form_rates_match_derivative_route() {
        let specs = [
            DiscountSpec::generalized_hyperbolic(0.3, 0.05).unwrap(),
            DiscountSpec::zero_speed_hyperbolic(0.1).unwrap(),
            DiscountSpec::slow_weibull(0.5).unwrap(),
        ];
        for s in &specs {
            for t in [1e-2, 1.0, 30.0] {
                let closed = s.rates(t, DerivativeMode::Analytic).unwrap();
                let from_d =
                    Rates::from_derivatives(t, s.analytic_derivatives(t).unwrap()).unwrap();
                assert!(rel(closed.r, from_d.r) < 1e-13);
                assert!(rel(closed.ir, from_d.ir) < 1e-13);
                assert!((closed.index - from_d.index).abs() < 1e-12 * closed.ir);
            }
        }
    }

    #[test]
    fn powf_stays_in_closed_form() {
        let ph = DiscountSpec::proportional_hyperbolic(0.1).unwrap();
        let sq = ph.powf(2.0).unwrap();
        for t in [0.0, 1.0, 25.0] {
            let v = ph.value(t).unwrap();
            assert!(rel(sq.value(t).unwrap(), v * v) < 1e-14);
        }
        assert!(ph.powf(0.0).is_err());
    }

    #[test]
    fn tabulated_spec_and_domain() {
        let times: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| 1.0 / (1.0 + 0.05 * t)).collect();
        let tab = DiscountSpec::tabulated(times, values).unwrap();
        assert_eq!(tab.domain(), (0.0, 100.0));
        assert!(matches!(tab.value(101.0), Err(Error::Domain { .. })));
        assert!(rel(tab.value(42.5).unwrap(), 1.0 / (1.0 + 0.05 * 42.5)) < 1e-5);
        assert!(tab.family().vanishes_at_infinity().is_none());
        let r = time_preference_rate(&tab, 10.0).unwrap();
        assert!(rel(r, 0.05 / 1.5) < 1e-3);
    }

    #[test]
    fn rate_profile_marks_weibull_origin() {
        let w = DiscountSpec::slow_weibull(0.12).unwrap();
        let grid = TimeGrid::linear(0.0, 1.0, 11).unwrap();
        let p = rate_profile(&w, &grid, DerivativeMode::Analytic).unwrap();
        assert!(p.r[0].is_infinite() && p.i_di[0].is_infinite());
        assert!(p.r[1].is_finite());
        for k in 0..11 {
            if p.r[k].is_finite() {
                assert!((p.i_di[k] - (p.ir[k] - p.r[k])).abs() <= 1e-12 * p.ir[k]);
            }
        }
    }
}

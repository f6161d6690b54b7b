//! Tabulated discount curves.
//!
//! `ln D` is interpolated with a monotone piecewise-cubic Hermite
//! (Fritsch–Carlson) interpolant, so the reconstructed curve stays positive
//! and strictly decreasing between knots. Derivatives come from the
//! interpolant; the second derivative is piecewise continuous only.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<f64>,
    logs: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tabulated {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameters(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidParameters(
                "a table needs at least two points".into(),
            ));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidParameters(
                "table times must be finite and non-negative".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameters(
                "table times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|d| !(d.is_finite() && *d > 0.0 && *d <= 1.0)) {
            return Err(Error::InvalidParameters(
                "table values must lie in (0, 1]".into(),
            ));
        }
        let logs: Vec<f64> = values.iter().map(|d| d.ln()).collect();
        if logs.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameters(
                "table values must be strictly decreasing".into(),
            ));
        }
        let slopes = pchip_slopes(&times, &logs);
        Ok(Tabulated {
            times,
            values,
            logs,
            slopes,
        })
    }

    /// Samples `f` at `times` and builds the table.
    pub fn from_fn<F: Fn(f64) -> f64>(times: Vec<f64>, f: F) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Returns `(ln D, (ln D)', (ln D)'')` at `t` (caller checks the domain).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.times.len();
        let k = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (y0, y1) = (self.logs[k], self.logs[k + 1]);
        let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;

        let y = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1;
        let dy = ((6.0 * s2 - 6.0 * s) * y0 + (-6.0 * s2 + 6.0 * s) * y1) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (3.0 * s2 - 2.0 * s) * m1;
        let d2y = ((12.0 * s - 6.0) * y0 + (-12.0 * s + 6.0) * y1) / (h * h)
            + ((6.0 * s - 4.0) * m0 + (6.0 * s - 2.0) * m1) / h;
        (y, dy, d2y)
    }

    pub fn powf(&self, c: f64) -> Result<Self> {
        Self::new(
            self.times.clone(),
            self.values.iter().map(|d| d.powf(c)).collect(),
        )
    }
}

/// Knot slopes for a monotone cubic Hermite interpolant of strictly
/// decreasing data. Every returned slope is strictly negative.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let widths: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let secants: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / widths[k]).collect();
    if n == 2 {
        return vec![secants[0]; 2];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        let (h0, h1) = (widths[k - 1], widths[k]);
        let (d0, d1) = (secants[k - 1], secants[k]);
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    m[0] = end_slope(widths[0], widths[1], secants[0], secants[1]);
    m[n - 1] = end_slope(widths[n - 2], widths[n - 3], secants[n - 2], secants[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    let ratio = m / d0;
    if ratio <= 0.0 {
        d0
    } else if ratio > 3.0 {
        3.0 * d0
    } else {
        m
    }
}

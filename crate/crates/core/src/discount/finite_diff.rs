//! Finite-difference derivatives of `ln D`.
//!
//! First derivatives use a central difference with step `s·σ`, second
//! derivatives a Richardson-extrapolated central second difference with
//! steps `√s·σ` and `√s·σ/2`, where
//! `σ = max(t, 1)` (or `σ = t` for curves singular at the origin). Near a
//! domain edge the stencils switch to one-sided second-order formulas.

use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-6;

/// Returns `(L, L', L'')` for `L = ln D` at `t`.
pub fn log_derivatives<F>(
    log_value: F,
    t: f64,
    step: f64,
    singular_at_origin: bool,
    domain: (f64, f64),
) -> Result<(f64, f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(step.is_finite() && step > 0.0 && step < 1.0) {
        return Err(Error::StepUnderflow { step, t });
    }
    let scale = if singular_at_origin { t } else { t.max(1.0) };
    let h1 = step * scale;
    let h2 = step.sqrt() * scale;
    if h1 == 0.0 || t + h1 == t || t - h1 == t {
        return Err(Error::StepUnderflow { step, t });
    }
    let (lo, hi) = domain;
    let l0 = log_value(t)?;

    let first = if t - h1 >= lo && t + h1 <= hi {
        (log_value(t + h1)? - log_value(t - h1)?) / (2.0 * h1)
    } else if t + 2.0 * h1 <= hi {
        (-3.0 * l0 + 4.0 * log_value(t + h1)? - log_value(t + 2.0 * h1)?) / (2.0 * h1)
    } else if t - 2.0 * h1 >= lo {
        (3.0 * l0 - 4.0 * log_value(t - h1)? + log_value(t - 2.0 * h1)?) / (2.0 * h1)
    } else {
        return Err(Error::StepUnderflow { step, t });
    };

    let second = if t - h2 >= lo && t + h2 <= hi {
        let central = |h: f64| -> Result<f64> {
            Ok((log_value(t + h)? - 2.0 * l0 + log_value(t - h)?) / (h * h))
        };
        let (wide, narrow) = (central(h2)?, central(0.5 * h2)?);
        (4.0 * narrow - wide) / 3.0
    } else if t + 3.0 * h2 <= hi {
        (2.0 * l0 - 5.0 * log_value(t + h2)? + 4.0 * log_value(t + 2.0 * h2)?
            - log_value(t + 3.0 * h2)?)
            / (h2 * h2)
    } else if t - 3.0 * h2 >= lo {
        (2.0 * l0 - 5.0 * log_value(t - h2)? + 4.0 * log_value(t - 2.0 * h2)?
            - log_value(t - 3.0 * h2)?)
            / (h2 * h2)
    } else {
        return Err(Error::StepUnderflow { step, t });
    };

    Ok((l0, first, second))
}

//! Small numerical kernels shared across modules: compensated sums,
//! error-free dot products and bracketing root finders.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Dot product with error-free products (`mul_add`) and compensated
/// accumulation; the result is as accurate as if computed in twice the
/// working precision.
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let s = sum + p;
        let z = s - sum;
        let s_err = (sum - (s - z)) + (p - z);
        sum = s;
        comp += p_err + s_err;
    }
    sum + comp
}

/// Solves `f(t) = target` for a strictly decreasing `f` on `[0, ∞)`.
///
/// The upper end of the bracket starts at `initial_hi` and doubles until
/// `f(hi) < target`. Bisection then halves the bracket until it collapses to
/// adjacent floating-point values or `max_iter` iterations have run.
pub fn invert_decreasing<F>(f: F, target: f64, initial_hi: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    if !target.is_finite() {
        return None;
    }
    let f0 = f(0.0)?;
    if target > f0 {
        return None;
    }
    if target == f0 {
        return Some(0.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = initial_hi.max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    loop {
        let v = f(hi)?;
        if v < target {
            break;
        }
        if v == target {
            return Some(hi);
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v > target {
            lo = mid;
        } else if v < target {
            hi = mid;
        } else {
            return Some(mid);
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bisection on a sign change of `f` over `[a, b]`.
///
/// Returns `None` unless `f(a)` and `f(b)` have opposite signs (or one is zero).
pub fn bisect_sign_change<F>(f: F, a: f64, b: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Median of a non-empty slice (mean of the two central values for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

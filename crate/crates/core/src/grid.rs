//! Strictly increasing evaluation grids on `[0, T_max]`.

use serde::Serialize;

use crate::error::{Error, Result};

/// How the grid points were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
    /// Linear on `[t_min, 1]`, log-spaced above 1.
    Hybrid,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        Self::validated(points, Spacing::Explicit)
    }

    pub fn linear(t_min: f64, t_max: f64, count: usize) -> Result<Self> {
        check_bounds(t_min, t_max, count)?;
        let step = (t_max - t_min) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|k| t_min + step * k as f64).collect();
        points[count - 1] = t_max;
        Self::validated(points, Spacing::Linear)
    }

    pub fn log(t_min: f64, t_max: f64, count: usize) -> Result<Self> {
        check_bounds(t_min, t_max, count)?;
        if t_min <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "log spacing needs t_min > 0, got {t_min}"
            )));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let step = (b - a) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|k| (a + step * k as f64).exp()).collect();
        points[0] = t_min;
        points[count - 1] = t_max;
        Self::validated(points, Spacing::Log)
    }

    /// `linear_count` points on `[t_min, 1)` followed by `log_count` log-spaced
    /// points on `[1, t_max]`.
    pub fn hybrid(t_min: f64, t_max: f64, linear_count: usize, log_count: usize) -> Result<Self> {
        if !(t_min < 1.0 && t_max > 1.0) {
            return Err(Error::InvalidGrid(format!(
                "hybrid spacing needs t_min < 1 < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if linear_count < 1 || log_count < 2 {
            return Err(Error::InvalidGrid("hybrid spacing needs at least 1 + 2 points".into()));
        }
        let step = (1.0 - t_min) / linear_count as f64;
        let mut points: Vec<f64> = (0..linear_count).map(|k| t_min + step * k as f64).collect();
        points.extend(Self::log(1.0, t_max, log_count)?.points);
        Self::validated(points, Spacing::Hybrid)
    }

    fn validated(points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::GridTooCoarse(points.len()));
        }
        if let Some(bad) = points.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidGrid(format!("point {bad} is negative or not finite")));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid { points, spacing })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn t_min(&self) -> f64 {
        self.points[0]
    }

    pub fn t_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_bounds(t_min: f64, t_max: f64, count: usize) -> Result<()> {
    if count < 3 {
        return Err(Error::GridTooCoarse(count));
    }
    if !(t_min.is_finite() && t_max.is_finite()) || t_min < 0.0 || t_min >= t_max {
        return Err(Error::InvalidGrid(format!(
            "need 0 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_endpoints_exact() {
        let g = TimeGrid::linear(0.0, 100.0, 201).unwrap();
        assert_eq!(g.t_min(), 0.0);
        assert_eq!(g.t_max(), 100.0);
        assert_eq!(g.points()[100], 50.0);
    }

    #[test]
    fn log_grid_is_increasing() {
        let g = TimeGrid::log(1e-3, 1e6, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g.t_max(), 1e6);
        assert!(TimeGrid::log(0.0, 1.0, 10).is_err());
    }

    #[test]
    fn hybrid_joins_at_one() {
        let g = TimeGrid::hybrid(0.0, 1e6, 20, 200).unwrap();
        assert_eq!(g.t_min(), 0.0);
        assert_eq!(g.points()[20], 1.0);
        assert_eq!(g.len(), 220);
    }

    #[test]
    fn rejects_bad_grids() {
        assert_eq!(TimeGrid::from_points(vec![0.0, 1.0]), Err(Error::GridTooCoarse(2)));
        assert!(TimeGrid::from_points(vec![0.0, 2.0, 1.0]).is_err());
        assert!(TimeGrid::from_points(vec![-1.0, 0.0, 1.0]).is_err());
        assert!(TimeGrid::from_points(vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(TimeGrid::linear(1.0, 1.0, 5).is_err());
    }
}

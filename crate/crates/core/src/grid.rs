use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_R_MIN_RATIO: f64 = 1e-8;

/// Strictly increasing sample points `r_min = p_0 < ... < p_{N-1} = eta`.
///
/// Cell `i` is `[p_i, p_{i+1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// Log-uniform grid on `[r_min, eta]` with `count` points.
    pub fn log_uniform(r_min: f64, eta: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0 && eta > r_min && eta.is_finite()) || count < 2 {
            return Err(Error::Spec(format!(
                "log grid needs 0 < r_min < eta < inf and at least 2 points (r_min = {r_min}, eta = {eta}, count = {count})"
            )));
        }
        let (a, b) = (r_min.ln(), eta.ln());
        let step = (b - a) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
        points[0] = r_min;
        points[count - 1] = eta;
        Grid::from_points(points)
    }

    /// Default discretisation of `(0, eta]`: `r_min = ratio * eta`.
    pub fn for_eta(eta: f64, count: usize, r_min_ratio: f64) -> Result<Self> {
        Grid::log_uniform(r_min_ratio * eta, eta, count)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Spec("a grid needs at least two points".into()));
        }
        if !(points[0] > 0.0) || points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Spec(
                "grid points must be positive and strictly increasing".into(),
            ));
        }
        Ok(Grid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.points[0]
    }

    pub fn eta(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn cell_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.points[i], self.points[i + 1])
    }

    /// Geometric midpoint of cell `i`.
    pub fn midpoint(&self, i: usize) -> f64 {
        (self.points[i] * self.points[i + 1]).sqrt()
    }

    /// Cell containing `t`, with the right end point assigned to the last cell.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if !(t >= self.r_min() && t <= self.eta()) {
            return None;
        }
        let i = self.points.partition_point(|&p| p <= t);
        Some(i.saturating_sub(1).min(self.cell_count() - 1))
    }
}

use std::io::Write;

use serde::Serialize;

use crate::envelope::{EnvelopeKind, EnvelopeResult};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Profile of a bump on `(center - half_width, center + half_width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `exp(1 - 1 / (1 - s^2))`, smooth.
    Smooth,
    /// `(1 - s^2)^k`.
    Poly(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub height: f64,
    pub shape: Shape,
}

impl Bump {
    pub fn new(center: f64, half_width: f64, height: f64, shape: Shape) -> Result<Self> {
        if !(half_width > 0.0 && center - half_width > 0.0) || !height.is_finite() {
            return Err(Error::Support(format!(
                "bump ({center} ± {half_width}) must lie in (0, inf)"
            )));
        }
        Ok(Bump {
            center,
            half_width,
            height,
            shape,
        })
    }

    /// Smooth bump filling `(lo, hi)`.
    pub fn on(lo: f64, hi: f64, height: f64) -> Result<Self> {
        Bump::new(0.5 * (lo + hi), 0.5 * (hi - lo), height, Shape::Smooth)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let g = 1.0 - s * s;
        self.height
            * match self.shape {
                Shape::Smooth => (1.0 - 1.0 / g).exp(),
                Shape::Poly(k) => g.powi(k as i32),
            }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let g = 1.0 - s * s;
        let ds = 1.0 / self.half_width;
        self.height
            * ds
            * match self.shape {
                Shape::Smooth => (1.0 - 1.0 / g).exp() * (-2.0 * s / (g * g)),
                Shape::Poly(0) => 0.0,
                Shape::Poly(k) => -2.0 * k as f64 * s * g.powi(k as i32 - 1),
            }
    }

    pub fn scaled(&self, factor: f64) -> Bump {
        Bump {
            height: self.height * factor,
            ..*self
        }
    }
}

/// Continuous piecewise-linear function, extended by constants outside the knots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::Support(
                "piecewise-linear function needs at least two knots and one value per knot".into(),
            ));
        }
        if !(knots[0] > 0.0) || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Support(
                "knots must be positive and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Support("knot values must be finite".into()));
        }
        Ok(PiecewiseLinear { knots, values })
    }

    /// Tent `0 -> peak -> 0` on `a < b < c`.
    pub fn tent(a: f64, b: f64, c: f64, peak: f64) -> Result<Self> {
        PiecewiseLinear::new(vec![a, b, c], vec![0.0, peak, 0.0])
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let n = self.knots.len();
        if t < self.knots[0] || t >= self.knots[n - 1] {
            return None;
        }
        Some(self.knots.partition_point(|&k| k <= t) - 1)
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if t <= self.knots[0] {
            return self.values[0];
        }
        if t >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = self.segment(t).unwrap();
        let s = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i])
    }

    /// Right-hand derivative.
    pub fn derivative(&self, t: f64) -> f64 {
        self.segment(t).map_or(0.0, |i| self.slope(i))
    }
}

/// Optimality profile `u = int f` with `f = 1 / v_w` on a window of width `h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Localized {
    pub x: f64,
    pub h: f64,
    pub kind: EnvelopeKind,
    /// True when the window meets a plateau of the envelope.
    pub plateau_overlap: bool,
    pub profile: PiecewiseLinear,
}

/// Sub-intervals of the window used to realize the localized profile.
pub const LOCALIZED_PIECES: usize = 256;

impl Localized {
    /// For `phi` the window is `[x, x + h]` and `u = int_t^{x+h} f`; for `psi`
    /// it is `[x - h, x]` and `u = int_{x-h}^t f`.
    pub fn new(env: &EnvelopeResult, x: f64, h: f64) -> Result<Self> {
        let grid = env.grid();
        let (lo, hi) = match env.kind() {
            EnvelopeKind::Increasing => (x, x + h),
            EnvelopeKind::Decreasing => (x - h, x),
        };
        if !(h > 0.0) || !(lo >= grid.r_min() && hi < grid.eta()) {
            return Err(Error::Support(format!(
                "window [{lo}, {hi}] must lie in [{}, {})",
                grid.r_min(),
                grid.eta()
            )));
        }
        let m = LOCALIZED_PIECES;
        let t: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
        let rule = gauss_legendre(8);
        let mut seg = Vec::with_capacity(m);
        for k in 0..m {
            let mut s = 0.0;
            for (p, wt) in rule.mapped(t[k], t[k + 1]) {
                s += wt * (-env.log_value_at(p)?).exp();
            }
            seg.push(s);
        }
        let mut knots = Vec::with_capacity(m + 3);
        let mut values = Vec::with_capacity(m + 3);
        match env.kind() {
            EnvelopeKind::Increasing => {
                let mut u = vec![0.0; m + 1];
                for k in (0..m).rev() {
                    u[k] = u[k + 1] + seg[k];
                }
                if grid.r_min() < lo {
                    knots.push(grid.r_min());
                    values.push(u[0]);
                }
                knots.extend_from_slice(&t);
                values.extend_from_slice(&u);
            }
            EnvelopeKind::Decreasing => {
                let mut u = vec![0.0; m + 1];
                for k in 0..m {
                    u[k + 1] = u[k] + seg[k];
                }
                knots.extend_from_slice(&t);
                values.extend_from_slice(&u);
                knots.push(grid.eta());
                values.push(u[m]);
            }
        }
        let first = grid.locate(lo).unwrap();
        let last = grid.locate(hi).unwrap();
        let plateau_overlap = env.plateau()[first..=last].iter().any(|&p| p);
        Ok(Localized {
            x,
            h,
            kind: env.kind(),
            plateau_overlap,
            profile: PiecewiseLinear::new(knots, values)?,
        })
    }

    /// Plateau level `int f` over the window.
    pub fn level(&self) -> f64 {
        match self.kind {
            EnvelopeKind::Increasing => self.profile.values()[0],
            EnvelopeKind::Decreasing => *self.profile.values().last().unwrap(),
        }
    }
}

/// Radial test function `u(t)` on `(0, eta)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction1D {
    Zero,
    Bump(Bump),
    PiecewiseLinear(PiecewiseLinear),
    Localized(Localized),
}

impl TestFunction1D {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TestFunction1D::Zero => 0.0,
            TestFunction1D::Bump(b) => b.value(t),
            TestFunction1D::PiecewiseLinear(p) => p.value(t),
            TestFunction1D::Localized(l) => l.profile.value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TestFunction1D::Zero => 0.0,
            TestFunction1D::Bump(b) => b.derivative(t),
            TestFunction1D::PiecewiseLinear(p) => p.derivative(t),
            TestFunction1D::Localized(l) => l.profile.derivative(t),
        }
    }

    pub fn as_piecewise_linear(&self) -> Option<&PiecewiseLinear> {
        match self {
            TestFunction1D::PiecewiseLinear(p) => Some(p),
            TestFunction1D::Localized(l) => Some(&l.profile),
            _ => None,
        }
    }

    /// Intervals covering the support of `u'`, split where `u'` is not smooth.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        match self {
            TestFunction1D::Zero => Vec::new(),
            TestFunction1D::Bump(b) => {
                let (lo, hi) = b.support();
                vec![(lo, b.center), (b.center, hi)]
            }
            _ => {
                let p = self.as_piecewise_linear().unwrap();
                p.knots()
                    .windows(2)
                    .enumerate()
                    .filter(|(i, _)| p.slope(*i) != 0.0)
                    .map(|(_, w)| (w[0], w[1]))
                    .collect()
            }
        }
    }

    /// Limits of `u` at `0+` and at the right end of its domain.
    pub fn end_values(&self) -> (f64, f64) {
        match self.as_piecewise_linear() {
            Some(p) => (p.values()[0], *p.values().last().unwrap()),
            None => (0.0, 0.0),
        }
    }

    /// Writes `t,u` rows: the knots, or 65 samples across a bump.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "t,u")?;
        match self {
            TestFunction1D::Zero => {}
            TestFunction1D::Bump(b) => {
                let (lo, hi) = b.support();
                for k in 0..=64 {
                    let t = lo + (hi - lo) * k as f64 / 64.0;
                    writeln!(out, "{t},{}", b.value(t))?;
                }
            }
            _ => {
                let p = self.as_piecewise_linear().unwrap();
                for (t, u) in p.knots().iter().zip(p.values()) {
                    writeln!(out, "{t},{u}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::compute_envelope;
    use crate::grid::Grid;
    use crate::weight::WeightSpec;

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        for shape in [Shape::Smooth, Shape::Poly(3)] {
            let b = Bump::new(0.5, 0.2, 1.3, shape).unwrap();
            for t in [0.35, 0.48, 0.61, 0.69] {
                let d = (b.value(t + 1e-7) - b.value(t - 1e-7)) / 2e-7;
                assert!((d - b.derivative(t)).abs() < 1e-6, "{shape:?} {t}");
            }
        }
        assert!(Bump::new(0.1, 0.2, 1.0, Shape::Smooth).is_err());
    }

    #[test]
    fn piecewise_linear_is_continuous_and_extends_by_constants() {
        let p = PiecewiseLinear::new(vec![0.1, 0.2, 0.4], vec![2.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.value(0.05), 2.0);
        assert_eq!(p.value(0.5), 0.0);
        assert!((p.value(0.3) - 0.5).abs() < 1e-15);
        assert_eq!(p.derivative(0.1), -10.0);
        assert_eq!(p.derivative(0.45), 0.0);
    }

    #[test]
    fn localized_profile_of_identity_weight() {
        let spec = WeightSpec::parse("pow(1)", 1.0).unwrap();
        let grid = Grid::for_eta(1.0, 4096, 1e-8).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, 1.0).unwrap();
        let l = Localized::new(&env, 0.5, 1e-3).unwrap();
        // u = ln((x + h) / t) on the window, ln(1 + h/x) below it
        let exact = (1.0 + 1e-3 / 0.5f64).ln();
        assert!((l.level() - exact).abs() < 1e-14);
        let u = TestFunction1D::Localized(l);
        assert!((u.value(0.3) - exact).abs() < 1e-14);
        assert!((u.value(0.5005) - (0.501f64 / 0.5005).ln()).abs() < 1e-9);
        assert_eq!(u.value(0.7), 0.0);
    }

    #[test]
    fn localized_winf_branch_is_supported_right_of_window() {
        let spec = WeightSpec::parse("pow(-1)", f64::INFINITY).unwrap();
        let grid = Grid::for_eta(1e3, 4096, 1e-8).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, 2.0).unwrap();
        let l = Localized::new(&env, 1.0, 1e-3).unwrap();
        assert!(!l.plateau_overlap);
        let u = TestFunction1D::Localized(l);
        assert_eq!(u.value(0.998), 0.0);
        // int_{x-h}^{x} t dt
        let c = 0.5 * (1.0 - 0.999f64 * 0.999);
        assert!((u.value(10.0) - c).abs() < 1e-15);
        assert!(u.pieces().iter().all(|&(a, b)| a >= 0.999 - 1e-15 && b <= 1.0 + 1e-15));
    }

    #[test]
    fn csv_lists_knots() {
        let u = TestFunction1D::PiecewiseLinear(PiecewiseLinear::tent(0.25, 0.5, 0.75, 1.0).unwrap());
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,u\n0.25,0\n0.5,1\n0.75,0\n");
    }
}

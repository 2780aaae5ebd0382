//! Angular profiles `B(theta)` on the circle and their quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre, panel_edges, Spacing};

/// Mollifier widths shrink as `MOLLIFIER_RATIO^-j`.
pub const MOLLIFIER_RATIO: f64 = 4.0;
/// Uniform nodes for smooth periodic profiles.
pub const UNIFORM_NODES: usize = 1024;

const KERNEL_ORDER: usize = 16;
const KERNEL_PANELS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularProfile {
    Constant { value: f64 },
    /// `|theta|^-s` on `(-pi, pi]`.
    SingularPower { s: f64 },
    /// `a0 + sum_k cos[k-1] cos(k theta) + sin[k-1] sin(k theta)`.
    Fourier { a0: f64, cos: Vec<f64>, sin: Vec<f64> },
    /// Convolution of `base` with the normalized kernel
    /// `exp(-1 / (1 - x^2))` rescaled to `[-delta, delta]`.
    Mollified { base: Box<AngularProfile>, delta: f64 },
}

fn wrap(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

fn kernel(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn kernel_derivative(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let g = 1.0 - x * x;
        kernel(x) * (-2.0 * x / (g * g))
    }
}

/// `int_{-1}^{1} exp(-1 / (1 - x^2)) dx`.
pub fn kernel_mass() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let rule = gauss_legendre(16);
        panel_edges(-1.0, 1.0, 32, Spacing::Uniform)
            .windows(2)
            .map(|e| rule.integrate(e[0], e[1], kernel))
            .sum()
    })
}

impl AngularProfile {
    pub fn constant(value: f64) -> Self {
        AngularProfile::Constant { value }
    }

    pub fn singular_power(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain("s", s, "(0, 1)"));
        }
        Ok(AngularProfile::SingularPower { s })
    }

    pub fn mollified(base: AngularProfile, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < PI) {
            return Err(domain("delta", delta, "(0, pi)"));
        }
        Ok(AngularProfile::Mollified {
            base: Box::new(base),
            delta,
        })
    }

    /// `j`-th member of the mollified sequence, width `4^-j`.
    pub fn mollified_j(base: AngularProfile, j: u32) -> Result<Self> {
        AngularProfile::mollified(base, MOLLIFIER_RATIO.powi(-(j as i32)))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            AngularProfile::Constant { value } => Some(*value),
            _ => None,
        }
    }

    fn singular_exponent(&self) -> Option<f64> {
        match self {
            AngularProfile::SingularPower { s } => Some(*s),
            _ => None,
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            AngularProfile::Constant { value } => *value,
            AngularProfile::SingularPower { s } => wrap(theta).abs().powf(-s),
            AngularProfile::Fourier { a0, cos, sin } => {
                let mut b = *a0;
                for (k, (c, s)) in cos.iter().zip(sin).enumerate() {
                    let kt = (k + 1) as f64 * theta;
                    b += c * kt.cos() + s * kt.sin();
                }
                b
            }
            AngularProfile::Mollified { base, delta } => {
                convolve(base, *delta, theta, kernel) / kernel_mass()
            }
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match self {
            AngularProfile::Constant { .. } => 0.0,
            AngularProfile::SingularPower { s } => {
                let t = wrap(theta);
                -s * t.signum() * t.abs().powf(-s - 1.0)
            }
            AngularProfile::Fourier { cos, sin, .. } => {
                let mut d = 0.0;
                for (k, (c, s)) in cos.iter().zip(sin).enumerate() {
                    let kk = (k + 1) as f64;
                    d += kk * (s * (kk * theta).cos() - c * (kk * theta).sin());
                }
                d
            }
            AngularProfile::Mollified { base, delta } => {
                convolve(base, *delta, theta, kernel_derivative) / (kernel_mass() * delta)
            }
        }
    }

    /// `int_{S^1} |B|^p`, in closed form where available.
    pub fn norm_pow(&self, p: f64) -> Result<f64> {
        match self {
            AngularProfile::Constant { value } => Ok(2.0 * PI * value.abs().powf(p)),
            AngularProfile::SingularPower { s } => {
                let e = 1.0 - s * p;
                if e <= 0.0 {
                    return Err(Error::Divergent(format!(
                        "|theta|^-{s} is not in L^{p}(S^1)"
                    )));
                }
                Ok(2.0 * PI.powf(e) / e)
            }
            _ => Ok(self.sample()?.integrate(|b, _| b.abs().powf(p))),
        }
    }

    /// Quadrature nodes on the circle with `B` and `B'` at each node.
    pub fn sample(&self) -> Result<AngularSamples> {
        let (theta, weight): (Vec<f64>, Vec<f64>) = match self {
            AngularProfile::Constant { .. } => (vec![0.0], vec![2.0 * PI]),
            AngularProfile::SingularPower { s } => {
                return Err(Error::Divergent(format!(
                    "|theta|^-{s} has infinite total variation on S^1"
                )))
            }
            AngularProfile::Fourier { .. } => {
                let h = 2.0 * PI / UNIFORM_NODES as f64;
                ((0..UNIFORM_NODES).map(|i| -PI + h * i as f64).collect(), vec![h; UNIFORM_NODES])
            }
            AngularProfile::Mollified { delta, .. } => mirrored_nodes(*delta).into_iter().unzip(),
        };
        let bd: Vec<(f64, f64)> = theta
            .par_iter()
            .map(|&t| (self.value(t), self.derivative(t)))
            .collect();
        let (b, db) = bd.into_iter().unzip();
        Ok(AngularSamples {
            theta,
            weight,
            b,
            db,
        })
    }
}

/// `int_{-1}^{1} base(theta - delta x) k(x) dx`. A power base singular
/// inside the window gets nodes graded toward its singularity.
fn convolve(base: &AngularProfile, delta: f64, theta: f64, k: fn(f64) -> f64) -> f64 {
    let theta = wrap(theta);
    let rule = gauss_legendre(KERNEL_ORDER);
    let xs = theta / delta;
    let Some(s) = base.singular_exponent().filter(|_| xs.abs() < 1.0) else {
        return panel_edges(-1.0, 1.0, 2 * KERNEL_PANELS, Spacing::Uniform)
            .windows(2)
            .map(|e| rule.integrate(e[0], e[1], |x| base.value(theta - delta * x) * k(x)))
            .sum();
    };
    let beta = 1.0 / (1.0 - s);
    let edges = panel_edges(0.0, 1.0, KERNEL_PANELS, Spacing::Uniform);
    let mut total = 0.0;
    for (len, dir) in [(1.0 - xs, 1.0), (xs + 1.0, -1.0)] {
        if len <= 0.0 {
            continue;
        }
        // x = xs + dir * len * y^beta; theta - delta x is formed directly
        // to keep its relative accuracy near the singularity
        let g = |y: f64| {
            let yb = y.powf(beta);
            base.value(-dir * delta * len * yb) * k(xs + dir * len * yb) * len * beta * yb / y
        };
        total += edges.windows(2).map(|e| rule.integrate(e[0], e[1], g)).sum::<f64>();
    }
    total
}

/// Symmetric nodes on `(-pi, pi)`: uniform panels on `[0, delta]`,
/// `[delta, 2 delta]` and `[pi - 2 delta, pi]`, geometric panels between,
/// Gauss-Legendre on each.
fn mirrored_nodes(delta: f64) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(8);
    let inner = 2.0 * delta;
    let mut edges = if 2.0 * inner >= PI {
        panel_edges(0.0, PI, 32, Spacing::Uniform)
    } else {
        let mut e = panel_edges(0.0, delta, 16, Spacing::Uniform);
        e.extend_from_slice(&panel_edges(delta, inner, 8, Spacing::Uniform)[1..]);
        let outer = PI - inner;
        let n = ((outer / inner).ln() / 1.2f64.ln()).ceil().max(1.0) as usize;
        e.extend_from_slice(&panel_edges(inner, outer, n, Spacing::Geometric)[1..]);
        e.extend_from_slice(&panel_edges(outer, PI, 16, Spacing::Uniform)[1..]);
        e
    };
    edges.dedup();
    let mut nodes = Vec::new();
    for e in edges.windows(2) {
        for (t, w) in rule.mapped(e[0], e[1]) {
            nodes.push((t, w));
            nodes.push((-t, w));
        }
    }
    nodes
}

/// Angular nodes with weights, `B` and `B'`.
#[derive(Clone, Debug)]
pub struct AngularSamples {
    pub theta: Vec<f64>,
    pub weight: Vec<f64>,
    pub b: Vec<f64>,
    pub db: Vec<f64>,
}

impl AngularSamples {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `int_{S^1} f(B, B')`.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        (0..self.len())
            .map(|i| self.weight[i] * f(self.b[i], self.db[i]))
            .sum()
    }

    pub fn l1(&self) -> f64 {
        self.integrate(|b, _| b.abs())
    }

    pub fn norm(&self, q: f64) -> f64 {
        self.integrate(|b, _| b.abs().powf(q)).powf(1.0 / q)
    }

    /// `int_{S^1} |B'|`.
    pub fn total_variation(&self) -> f64 {
        self.integrate(|_, db| db.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_mass_value() {
        // reference value of int exp(-1/(1-x^2)) over [-1, 1]
        assert!((kernel_mass() - 0.443_993_816_168_079_4).abs() < 1e-12);
    }

    #[test]
    fn mollification_preserves_mass() {
        let s = 0.75;
        let exact = 2.0 * PI.powf(1.0 - s) / (1.0 - s);
        for j in [1, 3, 6, 8] {
            let b = AngularProfile::mollified_j(AngularProfile::singular_power(s).unwrap(), j).unwrap();
            let samples = b.sample().unwrap();
            assert!((samples.l1() - exact).abs() < 1e-7 * exact, "j = {j}: {}", samples.l1());
        }
    }

    #[test]
    fn total_variation_of_even_unimodal_profile() {
        let b = AngularProfile::mollified_j(AngularProfile::singular_power(0.75).unwrap(), 4).unwrap();
        let tv = b.sample().unwrap().total_variation();
        let exact = 2.0 * (b.value(0.0) - b.value(PI));
        assert!((tv - exact).abs() < 1e-7 * exact, "{tv} vs {exact}");
    }

    #[test]
    fn mollified_derivative_matches_difference_quotient() {
        let b = AngularProfile::mollified(AngularProfile::singular_power(0.6).unwrap(), 0.1).unwrap();
        for t in [0.01, 0.07, 0.1, 0.3, 2.0, -0.05] {
            let h = 1e-6;
            let d = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
            assert!((d - b.derivative(t)).abs() < 1e-5 * (1.0 + d.abs()), "{t}: {d} vs {}", b.derivative(t));
        }
    }

    #[test]
    fn lq_norms_grow_under_refinement() {
        let base = AngularProfile::singular_power(0.75).unwrap();
        assert!(base.norm_pow(2.0).is_err());
        let norms: Vec<f64> = (1..=8)
            .map(|j| AngularProfile::mollified_j(base.clone(), j).unwrap().norm_pow(2.0).unwrap())
            .collect();
        assert!(norms.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn fourier_profile_quadrature() {
        let b = AngularProfile::Fourier {
            a0: 1.0,
            cos: vec![0.3, 0.0],
            sin: vec![0.0, -0.2],
        };
        let s = b.sample().unwrap();
        // int (1 + 0.3 cos t - 0.2 sin 2t)^2 = 2 pi (1 + 0.09/2 + 0.04/2)
        let exact = 2.0 * PI * (1.0 + 0.045 + 0.02);
        assert!((s.integrate(|b, _| b * b) - exact).abs() < 1e-12);
        assert!((b.derivative(0.4) - (-0.3 * 0.4f64.sin() - 0.4 * 0.8f64.cos())).abs() < 1e-15);
    }
}

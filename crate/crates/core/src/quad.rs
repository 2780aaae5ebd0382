//! Gauss-Legendre panels and two-resolution error estimates.

use std::collections::HashMap;
use std::ops::{Add, AddAssign};
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

/// Integral value with an error estimate from comparing two resolutions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_error: f64,
    pub n_evals: usize,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        QuadratureResult {
            value,
            est_error: 0.0,
            n_evals: 0,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        QuadratureResult {
            value: self.value * c,
            est_error: self.est_error * c.abs(),
            n_evals: self.n_evals,
        }
    }

    /// `value^(1/q)` with first-order error propagation.
    pub fn root(self, q: f64) -> Self {
        if self.value <= 0.0 {
            return QuadratureResult {
                value: 0.0,
                est_error: self.est_error.powf(1.0 / q),
                n_evals: self.n_evals,
            };
        }
        let value = self.value.powf(1.0 / q);
        let est_error = if q == 1.0 {
            self.est_error
        } else {
            // exact propagation avoids blowing up when est_error ~ value
            ((self.value + self.est_error).powf(1.0 / q) - value).abs()
        };
        QuadratureResult {
            value,
            est_error,
            n_evals: self.n_evals,
        }
    }
}

impl Add for QuadratureResult {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QuadratureResult {
            value: self.value + o.value,
            est_error: self.est_error + o.est_error,
            n_evals: self.n_evals + o.n_evals,
        }
    }
}

impl AddAssign for QuadratureResult {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared rule with `n` nodes.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| Box::leak(Box::new(GaussLegendre::new(n))))
}

/// Panel layout on `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    /// Geometric panels; requires `a > 0`.
    Geometric,
}

/// Break points of `panels` panels on `[a, b]`.
pub fn panel_edges(a: f64, b: f64, panels: usize, spacing: Spacing) -> Vec<f64> {
    let panels = panels.max(1);
    let mut edges: Vec<f64> = match spacing {
        Spacing::Geometric if a > 0.0 => {
            let (la, lb) = (a.ln(), b.ln());
            (0..=panels)
                .map(|i| (la + (lb - la) * i as f64 / panels as f64).exp())
                .collect()
        }
        _ => (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect(),
    };
    edges[0] = a;
    edges[panels] = b;
    edges
}

/// Composite rule over the given panels.
pub fn composite(rule: &GaussLegendre, edges: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    edges
        .windows(2)
        .map(|e| rule.integrate(e[0], e[1], &mut f))
        .sum()
}

/// Integrates with `panels` and `2 * panels` panels; reports the finer value
/// and the difference as error estimate.
pub fn two_level(
    a: f64,
    b: f64,
    panels: usize,
    spacing: Spacing,
    mut f: impl FnMut(f64) -> f64,
) -> QuadratureResult {
    if b <= a {
        return QuadratureResult::default();
    }
    let rule = gauss_legendre(GL_ORDER);
    let coarse = composite(rule, &panel_edges(a, b, panels, spacing), &mut f);
    let fine = composite(rule, &panel_edges(a, b, 2 * panels, spacing), &mut f);
    QuadratureResult {
        value: fine,
        est_error: (fine - coarse).abs(),
        n_evals: 3 * panels * rule.len(),
    }
}

/// Integrates on the given panels and on their halves; reports the finer
/// value and the difference as error estimate.
pub fn two_level_on(edges: &[f64], mut f: impl FnMut(f64) -> f64) -> QuadratureResult {
    let rule = gauss_legendre(GL_ORDER);
    let coarse = composite(rule, edges, &mut f);
    let fine: f64 = edges
        .windows(2)
        .map(|e| {
            let m = 0.5 * (e[0] + e[1]);
            rule.integrate(e[0], m, &mut f) + rule.integrate(m, e[1], &mut f)
        })
        .sum();
    QuadratureResult {
        value: fine,
        est_error: (fine - coarse).abs(),
        n_evals: 3 * edges.len().saturating_sub(1) * rule.len(),
    }
}

pub(crate) const GL_ORDER: usize = 5;

/// Number of geometric panels giving a fixed ratio per panel.
pub fn geometric_panels(a: f64, b: f64, ratio: f64, min: usize) -> usize {
    if a <= 0.0 {
        return min;
    }
    ((b / a).ln() / ratio.ln()).ceil().max(min as f64) as usize
}

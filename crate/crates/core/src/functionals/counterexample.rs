//! Test functions `U_j = A_j(rho) B_j(omega)` on which the `n = 2`
//! inequality degenerates when `limsup_{r -> 0} K(r) = 0`.
//!
//! Everything is evaluated in the scaled variable `sigma = rho / eps_j`, where
//! `A_j(rho) = eps_j^{-1} A(sigma)` (increasing envelope) or
//! `eps_j A(sigma)` (decreasing envelope). In that variable the radial
//! normalizations do not depend on `j`, and only `H(eps_j sigma)` carries the
//! scale. `eps_j` is kept as a logarithm since it can be far below the
//! smallest positive `f64`.

use serde::Serialize;

use crate::envelope::{EnvelopeKind, EnvelopeResult};
use crate::error::{Error, Result};
use crate::ndc::k_value;
use crate::quad::{gauss_legendre, panel_edges, two_level, QuadratureResult, Spacing, GL_ORDER};
use crate::weight::WeightSpec;

use super::angular::{AngularProfile, AngularSamples};
use super::test_function::Bump;

const SIGMA_PANELS: usize = 16;

/// Exponent of the radial weight `sigma^{±1}` in the left-hand side.
fn radial_power(kind: EnvelopeKind) -> f64 {
    match kind {
        EnvelopeKind::Increasing => 1.0,
        EnvelopeKind::Decreasing => -1.0,
    }
}

/// Smooth `A` on `(eta~/4, 3 eta~/4)` with `int |A'| sigma^{±1} = 1`.
pub fn default_radial_profile(env: &EnvelopeResult) -> Result<Bump> {
    let et = env.eta_tilde();
    if !(et.is_finite() && et > 0.0) {
        return Err(Error::Spec(format!("eta~ = {et} is not representable")));
    }
    let raw = Bump::on(0.25 * et, 0.75 * et, 1.0)?;
    let p = radial_power(env.kind());
    let norm = bump_integral(&raw, |b, s| b.derivative(s).abs() * s.powf(p)).value;
    Ok(raw.scaled(1.0 / norm))
}

fn bump_integral(a: &Bump, f: impl Fn(&Bump, f64) -> f64) -> QuadratureResult {
    let (lo, hi) = a.support();
    two_level(lo, a.center, SIGMA_PANELS, Spacing::Uniform, |s| f(a, s))
        + two_level(a.center, hi, SIGMA_PANELS, Spacing::Uniform, |s| f(a, s))
}

/// `A_j(rho)` and `d A_j / d rho` for a representable `eps`.
pub fn scaled_profile(a: &Bump, kind: EnvelopeKind, eps: f64) -> impl Fn(f64) -> (f64, f64) + '_ {
    move |rho: f64| {
        let s = rho / eps;
        match kind {
            EnvelopeKind::Increasing => (a.value(s) / eps, a.derivative(s) / (eps * eps)),
            EnvelopeKind::Decreasing => (eps * a.value(s), a.derivative(s)),
        }
    }
}

/// One member of the sequence.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleTerm {
    pub j: u32,
    /// Mollifier half-width of `B_j`.
    pub delta: f64,
    pub log_eps: f64,
    /// `int_{S^1} |B_j'|`.
    pub total_variation: f64,
    pub angular: AngularProfile,
    #[serde(skip)]
    pub samples: AngularSamples,
}

/// Builds `B_j` (mollified `|theta|^-s`) and the largest `eps_j` on the grid
/// with `H(rho) int |B_j'| <= 1` for `rho <= eps_j eta~`.
pub fn make_counterexample_sequence(
    env: &EnvelopeResult,
    spec: &WeightSpec,
    s: f64,
    j_max: u32,
) -> Result<Vec<CounterexampleTerm>> {
    let base = AngularProfile::singular_power(s)?;
    let grid = env.grid();
    // (lower ln rho of the cell, largest K sampled on it) for the non-plateau cells
    let mut cells = Vec::new();
    for (i, &flat) in env.plateau().iter().enumerate() {
        if flat {
            continue;
        }
        let (a, b) = grid.cell(i);
        let mut k: f64 = 0.0;
        for r in [a, grid.midpoint(i), b] {
            k = k.max(k_value(&spec.family, r)?.unwrap_or(0.0));
        }
        cells.push((env.rho_level(i), k));
    }
    if cells.is_empty() {
        return Err(Error::Hypothesis(
            "every grid cell is a plateau of the envelope, H is nowhere sampled".into(),
        ));
    }
    let mut running = f64::NEG_INFINITY;
    let prefix_max: Vec<f64> = cells
        .iter()
        .map(|c| {
            running = running.max(c.1);
            running
        })
        .collect();
    let log_et = env.log_eta_tilde();
    let mut terms = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let angular = AngularProfile::mollified_j(base.clone(), j)?;
        let samples = angular.sample()?;
        let tv = samples.total_variation();
        let first_bad = prefix_max.partition_point(|&k| k * tv <= 1.0);
        if first_bad == 0 {
            return Err(Error::Hypothesis(format!(
                "H(rho) * TV(B_{j}) exceeds 1 already at the grid floor; H does not tend to 0 on the grid"
            )));
        }
        let log_eps = if first_bad == cells.len() {
            0.0
        } else {
            (cells[first_bad].0 - log_et).min(0.0)
        };
        let delta = match &angular {
            AngularProfile::Mollified { delta, .. } => *delta,
            _ => unreachable!(),
        };
        terms.push(CounterexampleTerm {
            j,
            delta,
            log_eps,
            total_variation: tv,
            angular,
            samples,
        });
    }
    Ok(terms)
}

/// Transformed functionals of one term.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TermValues {
    pub lhs: QuadratureResult,
    pub rhs: QuadratureResult,
    /// `sup H(eps_j sigma)` over the support of `A`.
    pub sup_h: f64,
}

/// `int dS int sqrt((d_rho U)^2 + H^2 (Lambda U)^2 / rho^2) rho^{±1} d rho`
/// and `(int dS int |U|^q |d(rho^{±q})|)^{1/q}` for `U = A_j B_j`.
pub fn evaluate_term(
    term: &CounterexampleTerm,
    a: &Bump,
    env: &EnvelopeResult,
    spec: &WeightSpec,
    q: f64,
) -> Result<TermValues> {
    let kind = env.kind();
    let p = radial_power(kind);
    let (lo, hi) = a.support();
    let rule = gauss_legendre(GL_ORDER);
    let mut sup_h: f64 = 0.0;
    let mut level = |panels: usize| -> Result<f64> {
        let mut total = 0.0;
        for (x0, x1) in [(lo, a.center), (a.center, hi)] {
            for e in panel_edges(x0, x1, panels, Spacing::Uniform).windows(2) {
                for (sg, wt) in rule.mapped(e[0], e[1]) {
                    let h = env
                        .h_at_log_rho(&spec.family, term.log_eps + sg.ln())?
                        .unwrap_or(0.0);
                    sup_h = sup_h.max(h);
                    let (av, ad) = (a.value(sg), a.derivative(sg));
                    let ang = term
                        .samples
                        .integrate(|b, db| ((ad * b).powi(2) + (h * av * db / sg).powi(2)).sqrt());
                    total += wt * ang * sg.powf(p);
                }
            }
        }
        Ok(total)
    };
    let coarse = level(SIGMA_PANELS)?;
    let fine = level(2 * SIGMA_PANELS)?;
    let lhs = QuadratureResult {
        value: fine,
        est_error: (fine - coarse).abs(),
        n_evals: 6 * SIGMA_PANELS * rule.len() * term.samples.len(),
    };
    let rq = match kind {
        EnvelopeKind::Increasing => q - 1.0,
        EnvelopeKind::Decreasing => -q - 1.0,
    };
    let radial = bump_integral(a, |b, s| b.value(s).abs().powf(q) * q * s.powf(rq));
    let angular = term.samples.integrate(|b, _| b.abs().powf(q));
    let rhs = radial.scaled(angular).root(q);
    Ok(TermValues { lhs, rhs, sup_h })
}

/// `int |A'| sigma^{±1}`, `int |A|^q sigma^{q-1}` (resp. `sigma^{-q-1}`) and
/// `int |A| sigma^{0 or -2}`, the `j`-independent radial quantities.
pub fn radial_invariants(a: &Bump, kind: EnvelopeKind, q: f64) -> [f64; 3] {
    let (p, rq, m) = match kind {
        EnvelopeKind::Increasing => (1.0, q - 1.0, 0.0),
        EnvelopeKind::Decreasing => (-1.0, -q - 1.0, -2.0),
    };
    [
        bump_integral(a, |b, s| b.derivative(s).abs() * s.powf(p)).value,
        bump_integral(a, |b, s| b.value(s).abs().powf(q) * s.powf(rq)).value,
        bump_integral(a, |b, s| b.value(s).abs() * s.powf(m)).value,
    ]
}

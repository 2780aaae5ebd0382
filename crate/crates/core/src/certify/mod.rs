//! Verdicts: lower-bound batteries, best-constant sweeps and the
//! counterexample sweep.

mod battery;
mod counterexample;
mod sweep;

pub use battery::{random_angular, random_piecewise_linear, verify_battery, Battery};
pub use counterexample::{run_counterexample, CounterexampleRow, DEFAULT_J_MAX};
pub use sweep::{
    estimate_best_constant_1d, estimate_best_constant_radial, DEFAULT_EPS_SWEEP, DEFAULT_H_SWEEP,
    DEFAULT_TRUNCATION,
};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::functionals::radial::check_parameters;
use crate::functionals::omega;
use crate::quad::QuadratureResult;

/// Relative slack on the theoretical constant.
pub const RELATIVE_TOLERANCE: f64 = 1e-3;
/// Multiple of the quotient's error estimate granted on top.
pub const ERROR_MULTIPLE: f64 = 3.0;

/// Closed-form constants for dimension `n`, exponent `q` and optionally `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SharpConstants {
    pub omega_n: f64,
    #[serde(rename = "S_1q")]
    pub s_1q: f64,
    pub tau_1q: f64,
    #[serde(rename = "S_rad")]
    pub s_rad: Option<f64>,
}

impl SharpConstants {
    pub fn new(n: usize, q: f64, gamma: Option<f64>) -> Result<Self> {
        match gamma {
            Some(g) => check_parameters(n, q, g)?,
            None => check_parameters(n, q, 1.0)?,
        }
        let omega_n = omega(n);
        let tau_1q = 1.0 - 1.0 / q;
        let s_1q = omega_n.powf(tau_1q) * q.powf(1.0 / q);
        Ok(SharpConstants {
            omega_n,
            s_1q,
            tau_1q,
            s_rad: gamma.map(|g| s_1q * g.abs().powf(1.0 - tau_1q)),
        })
    }

    /// `min(C_0, 1) S_1q q^{-1/q}`, the lower bound in dimension `n >= 2`.
    pub fn ndc_constant(&self, c0: f64, q: f64) -> f64 {
        c0.min(1.0) * self.s_1q * q.powf(-1.0 / q)
    }
}

/// Which closed form a quotient is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheorySource {
    /// Best constant 1 of the one-dimensional inequality.
    OneDimensional,
    /// `min(C_0, 1) omega_n^{1 - 1/q}` under the non-degenerate condition.
    NdcLowerBound,
    /// `S_1q |gamma|^{1/q}` for the radial functional.
    RadialSharp,
    /// No lower bound applies.
    None,
}

/// Parameters of the test function behind a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Params {
    RandomPiecewiseLinear {
        index: usize,
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    RandomPolar {
        index: usize,
        knots: Vec<f64>,
        values: Vec<f64>,
        a0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Localized {
        x: f64,
        h: f64,
        plateau_overlap: bool,
    },
    SmoothedIndicator {
        radius: f64,
        eps: f64,
        gamma: f64,
    },
    Counterexample {
        j: u32,
        log_eps: f64,
    },
    Given,
}

/// Both sides of an inequality on one test function and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, infinite when `rhs = 0`.
    pub quotient: f64,
    /// Error estimate of `quotient`.
    pub est_error: f64,
    pub theory_constant: f64,
    pub theory_source: TheorySource,
    pub params: Params,
    pub pass: bool,
}

impl QuotientReport {
    pub fn new(
        lhs: QuadratureResult,
        rhs: QuadratureResult,
        theory_constant: f64,
        theory_source: TheorySource,
        params: Params,
    ) -> Self {
        let (quotient, est_error) = if rhs.value == 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            let q = lhs.value / rhs.value;
            let rel_l = if lhs.value > 0.0 { lhs.est_error / lhs.value } else { 0.0 };
            (q, q * (rel_l + rhs.est_error / rhs.value))
        };
        let pass = passes(quotient, est_error, theory_constant);
        QuotientReport {
            lhs: lhs.value,
            rhs: rhs.value,
            quotient,
            est_error,
            theory_constant,
            theory_source,
            params,
            pass,
        }
    }
}

/// `quotient >= theory (1 - 1e-3) - 3 est_error`.
pub fn passes(quotient: f64, est_error: f64, theory: f64) -> bool {
    quotient >= theory * (1.0 - RELATIVE_TOLERANCE) - ERROR_MULTIPLE * est_error
}

pub fn all_pass(reports: &[QuotientReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// Smallest finite quotient, `inf` when there is none.
pub fn min_quotient(reports: &[QuotientReport]) -> f64 {
    reports.iter().map(|r| r.quotient).fold(f64::INFINITY, f64::min)
}

fn check_dimension_exponent(n: usize, q: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(domain("q", q, "[1, inf)"));
    }
    if n >= 2 && 1.0 - 1.0 / q > 1.0 / n as f64 + 1e-15 {
        return Err(domain("q", q, format!("[1, {n}/{}]", n - 1)));
    }
    Ok(())
}

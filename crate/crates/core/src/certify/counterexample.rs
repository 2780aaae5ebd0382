use std::f64::consts::LN_10;

use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::EnvelopeResult;
use crate::error::{domain, Error, Result};
use crate::functionals::counterexample::{default_radial_profile, evaluate_term};
use crate::functionals::make_counterexample_sequence;
use crate::ndc::{NdcReport, NdcVerdict, DEFAULT_M_MAX, DEFAULT_THRESHOLD};
use crate::weight::WeightSpec;

pub const DEFAULT_J_MAX: u32 = 8;

/// One row of the counterexample sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub j: u32,
    /// `eps_j` in decimal scientific notation; it may underflow `f64`.
    pub eps_j: String,
    pub log_eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub quotient: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub total_variation: f64,
    pub sup_h: f64,
}

/// `exp(log_eps)` written as `m.mmmmmmeE` without forming the number.
pub fn format_log_decimal(log_eps: f64) -> String {
    let l10 = log_eps / LN_10;
    let mut e = l10.floor();
    let mut m = 10f64.powf(l10 - e);
    if m >= 9.9999995 {
        m /= 10.0;
        e += 1.0;
    }
    format!("{m:.6}e{e}")
}

/// Evaluates `U_j = A_j B_j` for `j = 1..=j_max` in the plane, with
/// `B_j` the mollified `|theta|^-s` (`s = (1/q + 1)/2` unless given).
pub fn run_counterexample(
    spec: &WeightSpec,
    env: &EnvelopeResult,
    q: f64,
    n: usize,
    j_max: u32,
    s: Option<f64>,
) -> Result<Vec<CounterexampleRow>> {
    if n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(q > 1.0 && q <= 2.0) {
        return Err(domain("q", q, "(1, 2]"));
    }
    if (env.q() - q).abs() > 1e-12 {
        return Err(Error::Spec(format!(
            "envelope density was computed for q = {}, not q = {q}",
            env.q()
        )));
    }
    let ndc = NdcReport::compute(spec, env, spec.classify(), DEFAULT_THRESHOLD, DEFAULT_M_MAX)?;
    match ndc.verdict {
        NdcVerdict::ViolatedLimsupZero => {}
        NdcVerdict::Satisfied => return Err(Error::Hypothesis("NDC satisfied".into())),
        NdcVerdict::Inconclusive => {
            return Err(Error::Hypothesis(
                "NDC inconclusive, limsup K = 0 is not established".into(),
            ))
        }
    }
    let s = s.unwrap_or((1.0 / q + 1.0) / 2.0);
    if !(s > 1.0 / q && s < 1.0) {
        return Err(domain("s", s, format!("(1/{q}, 1)")));
    }
    let a = default_radial_profile(env)?;
    let terms = make_counterexample_sequence(env, spec, s, j_max)?;
    terms
        .par_iter()
        .map(|t| {
            let v = evaluate_term(t, &a, env, spec, q)?;
            Ok(CounterexampleRow {
                j: t.j,
                eps_j: format_log_decimal(t.log_eps),
                log_eps: t.log_eps,
                lhs: v.lhs.value,
                rhs: v.rhs.value,
                quotient: v.lhs.value / v.rhs.value,
                lhs_error: v.lhs.est_error,
                rhs_error: v.rhs.est_error,
                total_variation: t.total_variation,
                sup_h: v.sup_h,
            })
        })
        .collect()
}

//! The radial CKN quotient
//! `E[u] = int |grad u| |x|^{1+gamma-n} / (int |u|^q |x|^{gamma q - n})^{1/q}`
//! for piecewise-linear radial profiles.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{two_level, QuadratureResult, Spacing};

use super::polar::omega;

/// Outer cutoff radius, relative to the ramp radius, for `gamma < 0`.
pub const OUTER_RATIO: f64 = 1e8;

/// Smoothed indicator profiles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `clamp((R - r) / eps, 0, 1)`, for `gamma > 0`.
    Inner { radius: f64, eps: f64 },
    /// `0` below `R`, a ramp of width `eps` up to `1`, then a linear cutoff
    /// from `L` to `2L`; for `gamma < 0`.
    Outer { radius: f64, eps: f64, outer: f64 },
}

impl RadialProfile {
    /// The profile suited to the sign of `gamma`.
    pub fn for_gamma(gamma: f64, radius: f64, eps: f64) -> Self {
        if gamma > 0.0 {
            RadialProfile::Inner { radius, eps }
        } else {
            RadialProfile::Outer {
                radius,
                eps,
                outer: radius * OUTER_RATIO,
            }
        }
    }
}

/// `int_a^b r^p dr`.
fn power_integral(a: f64, b: f64, p: f64) -> f64 {
    if (p + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

/// `(b^{p+1} - (b - e)^{p+1}) / (p + 1)` without cancellation for small `e`.
fn power_integral_below(b: f64, e: f64, p: f64) -> f64 {
    let k = p + 1.0;
    if k.abs() < 1e-14 {
        return -(-e / b).ln_1p();
    }
    -b.powf(k) * (k * (-e / b).ln_1p()).exp_m1() / k
}

pub fn check_parameters(n: usize, q: f64, gamma: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(domain("gamma", gamma, "R \\ {0}"));
    }
    let tau = 1.0 - 1.0 / q;
    if !(q >= 1.0) || !q.is_finite() || tau > 1.0 / n as f64 + 1e-15 {
        return Err(domain("q", q, format!("[1, inf) with 1 - 1/q <= 1/{n}")));
    }
    Ok(())
}

/// Numerator and denominator of the radial quotient.
pub fn ckn_radial(
    n: usize,
    q: f64,
    gamma: f64,
    profile: RadialProfile,
) -> Result<(QuadratureResult, QuadratureResult)> {
    check_parameters(n, q, gamma)?;
    let om = omega(n);
    let gq = gamma * q;
    let (lhs, rhs_q) = match profile {
        RadialProfile::Inner { radius: r, eps } => {
            if gamma < 0.0 || !(eps > 0.0 && eps < r) {
                return Err(Error::Spec("inner profile needs gamma > 0 and 0 < eps < R".into()));
            }
            let lhs = power_integral_below(r, eps, gamma) / eps;
            // ramp r = R - eps x, u = x
            let ramp = two_level(0.0, 1.0, 8, Spacing::Uniform, |x| {
                x.powf(q) * (r - eps * x).powf(gq - 1.0)
            })
            .scaled(eps);
            (lhs, QuadratureResult::exact((r - eps).powf(gq) / gq) + ramp)
        }
        RadialProfile::Outer { radius: r, eps, outer } => {
            if gamma > 0.0 || !(eps > 0.0 && r + eps < outer) {
                return Err(Error::Spec("outer profile needs gamma < 0 and R + eps < L".into()));
            }
            let lhs = power_integral(r, r + eps, gamma) / eps + power_integral(outer, 2.0 * outer, gamma) / outer;
            let up = two_level(0.0, 1.0, 8, Spacing::Uniform, |x| {
                x.powf(q) * (r + eps * x).powf(gq - 1.0)
            })
            .scaled(eps);
            let down = two_level(0.0, 1.0, 8, Spacing::Uniform, |x| {
                (1.0 - x).powf(q) * (outer * (1.0 + x)).powf(gq - 1.0)
            })
            .scaled(outer);
            let flat = QuadratureResult::exact(power_integral(r + eps, outer, gq - 1.0));
            (lhs, up + flat + down)
        }
    };
    Ok((
        QuadratureResult::exact(om * lhs),
        rhs_q.scaled(om).root(q),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn q_one_quotient_is_exactly_gamma_times_constant() {
        for eps in [0.5, 1e-3] {
            let (l, r) = ckn_radial(2, 1.0, 2.0, RadialProfile::for_gamma(2.0, 1.0, eps)).unwrap();
            assert!((l.value / r.value - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_profile_tends_to_sharp_constant() {
        let (l, r) = ckn_radial(2, 2.0, 1.0, RadialProfile::for_gamma(1.0, 1.0, 1e-6)).unwrap();
        let s = 2.0 * PI.sqrt();
        let e = l.value / r.value;
        assert!(e >= s && e < s * (1.0 + 1e-5), "{e}");
    }

    #[test]
    fn outer_profile_tends_to_sharp_constant() {
        let (l, r) = ckn_radial(2, 2.0, -1.0, RadialProfile::for_gamma(-1.0, 1.0, 1e-6)).unwrap();
        let e = l.value / r.value;
        assert!((e - 2.0 * PI.sqrt()).abs() < 1e-4 * e, "{e}");
    }

    #[test]
    fn parameter_constraints() {
        assert!(ckn_radial(2, 3.0, 1.0, RadialProfile::for_gamma(1.0, 1.0, 0.1)).is_err());
        assert!(ckn_radial(2, 2.0, 0.0, RadialProfile::for_gamma(1.0, 1.0, 0.1)).is_err());
        assert!(ckn_radial(3, 1.5, 1.0, RadialProfile::for_gamma(1.0, 1.0, 0.1)).is_ok());
    }

    #[test]
    fn cancellation_free_ramp_integral() {
        let direct = power_integral(1.0 - 1e-3, 1.0, 2.5);
        assert!((power_integral_below(1.0, 1e-3, 2.5) - direct).abs() < 1e-15);
        assert!((power_integral_below(2.0, 1e-3, -1.0) - (2.0f64 / (2.0 - 1e-3)).ln()).abs() < 1e-15);
    }
}

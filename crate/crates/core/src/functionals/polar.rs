//! Polar functionals for `u(r, omega) = A(r) B(omega)`:
//! `int_{S^{n-1}} int_0^eta sqrt((d_r u)^2 + (Lambda u)^2 / r^2) w(r) dr dS`
//! and `(int_{S^{n-1}} int_0^eta |u|^q V^q_w dr dS)^{1/q}`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, panel_edges, QuadratureResult, Spacing, GL_ORDER};
use crate::weight::WeightSpec;

use super::angular::AngularProfile;
use super::one_d::{lhs_1d, rhs_1d};
use super::test_function::TestFunction1D;

/// Surface area of the unit sphere `S^{n-1}`.
pub fn omega(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * omega(n - 2) / (n - 2) as f64,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarTestFunction {
    pub radial: TestFunction1D,
    pub angular: AngularProfile,
    pub n: usize,
}

impl PolarTestFunction {
    pub fn radial(radial: TestFunction1D, n: usize) -> Self {
        PolarTestFunction {
            radial,
            angular: AngularProfile::constant(1.0),
            n,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if self.angular.as_constant().is_none() && self.n != 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        Ok(())
    }
}

/// Radial panels per piece of `A`.
const RADIAL_PANELS: usize = 4;

/// Polar left-hand side.
pub fn lhs_polar(u: &PolarTestFunction, spec: &WeightSpec) -> Result<QuadratureResult> {
    u.check()?;
    if let Some(c) = u.angular.as_constant() {
        return Ok(lhs_1d(&u.radial, spec)?.scaled(omega(u.n) * c.abs()));
    }
    let (left, right) = u.radial.end_values();
    if left != 0.0 || right != 0.0 {
        return Err(Error::Support(
            "a non-radial polar function needs a compactly supported radial part".into(),
        ));
    }
    lhs_1d(&u.radial, spec)?;
    let samples = u.angular.sample()?;
    let a = &u.radial;
    let w = |r: f64| spec.family.value_unchecked(r);
    let integrand = |r: f64| {
        let (av, ad) = (a.value(r), a.derivative(r));
        let ang = samples.integrate(|b, db| ((ad * b).powi(2) + (av * db / r).powi(2)).sqrt());
        ang * w(r)
    };
    Ok(integrate_pieces(&value_pieces(a), integrand))
}

/// Pieces of the support of `A` on which `A` is smooth.
fn value_pieces(a: &TestFunction1D) -> Vec<(f64, f64)> {
    match a.as_piecewise_linear() {
        Some(p) => p.knots().windows(2).map(|k| (k[0], k[1])).collect(),
        None => a.pieces(),
    }
}

fn integrate_pieces(pieces: &[(f64, f64)], f: impl Fn(f64) -> f64) -> QuadratureResult {
    let rule = gauss_legendre(GL_ORDER);
    let mut coarse = 0.0;
    let mut fine = 0.0;
    for &(a, b) in pieces {
        for (panels, acc) in [(RADIAL_PANELS, &mut coarse), (2 * RADIAL_PANELS, &mut fine)] {
            for e in panel_edges(a, b, panels, Spacing::Uniform).windows(2) {
                *acc += rule.integrate(e[0], e[1], &f);
            }
        }
    }
    QuadratureResult {
        value: fine,
        est_error: (fine - coarse).abs(),
        n_evals: pieces.len() * 3 * RADIAL_PANELS * rule.len(),
    }
}

/// Polar right-hand side; the angular integral factors out.
pub fn rhs_polar(u: &PolarTestFunction, env: &EnvelopeResult, q: f64) -> Result<QuadratureResult> {
    u.check()?;
    let radial = rhs_1d(&u.radial, env, q)?;
    let angular = match u.angular.as_constant() {
        Some(c) => omega(u.n) * c.abs().powf(q),
        None => u.angular.norm_pow(q)?,
    };
    Ok(radial.scaled(angular.powf(1.0 / q)))
}

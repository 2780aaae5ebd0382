use rayon::prelude::*;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::functionals::{ckn_radial, lhs_1d, make_localized_family, rhs_1d, RadialProfile, TestFunction1D};
use crate::weight::WeightSpec;

use super::{min_quotient, Params, QuotientReport, SharpConstants, TheorySource};

pub const DEFAULT_H_SWEEP: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const DEFAULT_EPS_SWEEP: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Cutoff standing in for `eta = inf`.
pub const DEFAULT_TRUNCATION: f64 = 1e3;

/// Runs the localized family at `x` over `h_sweep` and returns the smallest
/// quotient. Windows meeting a plateau of the envelope are dropped.
pub fn estimate_best_constant_1d(
    spec: &WeightSpec,
    env: &EnvelopeResult,
    q: f64,
    x: f64,
    h_sweep: &[f64],
) -> Result<(f64, Vec<QuotientReport>)> {
    let mut windows = Vec::with_capacity(h_sweep.len());
    for &h in h_sweep {
        let u = make_localized_family(env, x, h)?;
        let TestFunction1D::Localized(l) = &u else { unreachable!() };
        if !l.plateau_overlap {
            windows.push((h, u));
        }
    }
    if windows.is_empty() {
        return Err(Error::NoValidWindow);
    }
    let reports = windows
        .into_par_iter()
        .map(|(h, u)| {
            let params = Params::Localized {
                x,
                h,
                plateau_overlap: false,
            };
            Ok(QuotientReport::new(
                lhs_1d(&u, spec)?,
                rhs_1d(&u, env, q)?,
                1.0,
                TheorySource::OneDimensional,
                params,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((min_quotient(&reports), reports))
}

/// Smoothed indicators of the unit ball (`gamma > 0`) or of its complement
/// (`gamma < 0`) with ramp widths `eps_sweep`; returns the smallest quotient.
pub fn estimate_best_constant_radial(
    n: usize,
    q: f64,
    gamma: f64,
    eps_sweep: &[f64],
) -> Result<(f64, Vec<QuotientReport>)> {
    let constants = SharpConstants::new(n, q, Some(gamma))?;
    let theory = constants.s_rad.unwrap();
    let reports = eps_sweep
        .par_iter()
        .map(|&eps| {
            let profile = RadialProfile::for_gamma(gamma, 1.0, eps);
            let (lhs, rhs) = ckn_radial(n, q, gamma, profile)?;
            let params = Params::SmoothedIndicator {
                radius: 1.0,
                eps,
                gamma,
            };
            Ok(QuotientReport::new(lhs, rhs, theory, TheorySource::RadialSharp, params))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((min_quotient(&reports), reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::compute_envelope;
    use crate::grid::Grid;

    fn setup(text: &str, eta: f64, q: f64) -> (WeightSpec, EnvelopeResult) {
        let spec = WeightSpec::parse(text, eta).unwrap();
        let end = spec.effective_eta(DEFAULT_TRUNCATION);
        let grid = Grid::for_eta(end, 4096, 1e-8).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, q).unwrap();
        (spec, env)
    }

    #[test]
    fn power_one_window_bound() {
        let (spec, env) = setup("pow(1)", 1.0, 2.0);
        let (best, reports) = estimate_best_constant_1d(&spec, &env, 2.0, 0.5, &[1e-3]).unwrap();
        let bound = 1e-3 / (0.5 * (1.0 + 2e-3f64).ln());
        assert!(best >= 1.0 && best <= bound * (1.0 + 1e-6), "{best} vs {bound}");
        assert_eq!(reports.len(), 1);
    }

    #[test]
    fn quotients_decrease_toward_one() {
        let (spec, env) = setup("expinv(1,-)", 1.0, 2.0);
        let (best, reports) = estimate_best_constant_1d(&spec, &env, 2.0, 0.5, &DEFAULT_H_SWEEP).unwrap();
        assert!(reports.windows(2).all(|r| r[1].quotient < r[0].quotient));
        assert!((1.0 - 1e-9..=1.01).contains(&best), "{best}");
    }

    #[test]
    fn truncated_decreasing_branch() {
        let (spec, env) = setup("pow(-1)", f64::INFINITY, 2.0);
        let (best, _) = estimate_best_constant_1d(&spec, &env, 2.0, 1.0, &[1e-3]).unwrap();
        assert!((best - 1.0).abs() < 1e-2, "{best}");
    }

    #[test]
    fn radial_sweep_approaches_the_sharp_constant() {
        let (best, reports) = estimate_best_constant_radial(2, 2.0, 1.0, &DEFAULT_EPS_SWEEP).unwrap();
        let s = 2.0 * std::f64::consts::PI.sqrt();
        assert!(best >= s && best <= 1.15 * s);
        assert!(reports.iter().all(|r| r.pass));
        let (minus, _) = estimate_best_constant_radial(2, 2.0, -1.0, &DEFAULT_EPS_SWEEP).unwrap();
        assert!((minus - best).abs() < 1e-2 * best);
        assert!(estimate_best_constant_radial(2, 3.0, 1.0, &DEFAULT_EPS_SWEEP).is_err());
    }
}

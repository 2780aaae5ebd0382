use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::functionals::{
    lhs_1d, lhs_polar, make_localized_family, rhs_1d, rhs_polar, AngularProfile, PiecewiseLinear,
    PolarTestFunction, TestFunction1D,
};
use crate::ndc::{NdcReport, NdcVerdict, DEFAULT_M_MAX, DEFAULT_THRESHOLD};
use crate::weight::WeightSpec;

use super::{check_dimension_exponent, Params, QuotientReport, SharpConstants, TheorySource};

/// Window widths of the localized family, relative to its anchor `x = eta / 2`.
const LOCALIZED_WIDTHS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Random piecewise-linear profile vanishing outside `[lo, hi]`, with
/// `lo` in `[0.1, 0.5] eta`, `hi` in `[0.6, 0.95] eta`, 3 to 8 knots and
/// interior values uniform in `(-1, 1)`.
pub fn random_piecewise_linear(rng: &mut impl Rng, eta: f64) -> PiecewiseLinear {
    loop {
        let lo = eta * rng.gen_range(0.1..0.5);
        let hi = eta * rng.gen_range(0.6..0.95);
        let count = rng.gen_range(3..=8);
        let mut knots: Vec<f64> = (0..count - 2).map(|_| rng.gen_range(lo..hi)).collect();
        knots.sort_by(f64::total_cmp);
        knots.insert(0, lo);
        knots.push(hi);
        let mut values: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
        values[0] = 0.0;
        values[count - 1] = 0.0;
        if let Ok(p) = PiecewiseLinear::new(knots, values) {
            return p;
        }
    }
}

/// Random trigonometric polynomial with one to four modes.
pub fn random_angular(rng: &mut impl Rng) -> AngularProfile {
    let modes = rng.gen_range(1..=4);
    let a0 = rng.gen_range(-1.0..1.0);
    let mut coef = |_| rng.gen_range(-1.0..1.0) / 2.0;
    let cos = (0..modes).map(&mut coef).collect();
    let sin = (0..modes).map(&mut coef).collect();
    AngularProfile::Fourier { a0, cos, sin }
}

/// Reports of one battery together with the lower bound they were held to.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Battery {
    pub theory_constant: f64,
    pub theory_source: TheorySource,
    /// `inf K` when the bound depends on it.
    #[serde(rename = "C0")]
    pub c0: Option<f64>,
    pub reports: Vec<QuotientReport>,
}

impl Battery {
    pub fn all_pass(&self) -> bool {
        super::all_pass(&self.reports)
    }

    pub fn min_quotient(&self) -> f64 {
        super::min_quotient(&self.reports)
    }
}

enum Candidate {
    OneD(TestFunction1D),
    Polar(PolarTestFunction),
}

/// Evaluates the inequality in dimension `n` on `battery_size` seeded random
/// test functions and on the localized family.
///
/// For `n >= 2` and `q > 1` the non-degenerate condition must hold; the
/// battery is refused otherwise.
pub fn verify_battery(
    spec: &WeightSpec,
    env: &EnvelopeResult,
    q: f64,
    n: usize,
    battery_size: usize,
    seed: u64,
) -> Result<Battery> {
    check_dimension_exponent(n, q)?;
    if (env.q() - q).abs() > 1e-12 {
        return Err(Error::Spec(format!(
            "envelope density was computed for q = {}, not q = {q}",
            env.q()
        )));
    }
    let (theory, source, c0) = if n == 1 {
        (1.0, TheorySource::OneDimensional, None)
    } else {
        let ndc = NdcReport::compute(spec, env, spec.classify(), DEFAULT_THRESHOLD, DEFAULT_M_MAX)?;
        if q > 1.0 && ndc.verdict != NdcVerdict::Satisfied {
            return Err(Error::Hypothesis(format!(
                "NDC is {} (C0 = {:e}); the n-dimensional inequality is only claimed when it is satisfied",
                serde_json::to_value(ndc.verdict).unwrap().as_str().unwrap(),
                ndc.c0
            )));
        }
        let c = SharpConstants::new(n, q, None)?;
        (c.ndc_constant(ndc.c0, q), TheorySource::NdcLowerBound, Some(ndc.c0))
    };

    let eta = env.grid().eta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = Vec::with_capacity(battery_size + LOCALIZED_WIDTHS.len());
    for index in 0..battery_size {
        let p = random_piecewise_linear(&mut rng, eta);
        let (knots, values) = (p.knots().to_vec(), p.values().to_vec());
        let radial = TestFunction1D::PiecewiseLinear(p);
        if n == 2 {
            let angular = random_angular(&mut rng);
            let AngularProfile::Fourier { a0, cos, sin } = angular.clone() else {
                unreachable!()
            };
            candidates.push((
                Candidate::Polar(PolarTestFunction { radial, angular, n }),
                Params::RandomPolar { index, knots, values, a0, cos, sin },
            ));
        } else {
            let c = if n == 1 {
                Candidate::OneD(radial)
            } else {
                Candidate::Polar(PolarTestFunction::radial(radial, n))
            };
            candidates.push((c, Params::RandomPiecewiseLinear { index, knots, values }));
        }
    }
    let x = 0.5 * eta;
    for rel in LOCALIZED_WIDTHS {
        let h = rel * x;
        let u = match make_localized_family(env, x, h) {
            Ok(u) => u,
            Err(Error::Support(_)) => continue,
            Err(e) => return Err(e),
        };
        let TestFunction1D::Localized(l) = &u else { unreachable!() };
        let params = Params::Localized {
            x,
            h,
            plateau_overlap: l.plateau_overlap,
        };
        let c = if n == 1 {
            Candidate::OneD(u)
        } else {
            Candidate::Polar(PolarTestFunction::radial(u, n))
        };
        candidates.push((c, params));
    }

    let reports = candidates
        .into_par_iter()
        .map(|(c, params)| {
            let (lhs, rhs) = match &c {
                Candidate::OneD(u) => (lhs_1d(u, spec)?, rhs_1d(u, env, q)?),
                Candidate::Polar(u) => (lhs_polar(u, spec)?, rhs_polar(u, env, q)?),
            };
            Ok(QuotientReport::new(lhs, rhs, theory, source, params))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Battery {
        theory_constant: theory,
        theory_source: source,
        c0,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::compute_envelope;
    use crate::grid::Grid;

    fn setup(text: &str, q: f64) -> (WeightSpec, EnvelopeResult) {
        let spec = WeightSpec::parse(text, 1.0).unwrap();
        let grid = Grid::for_eta(1.0, 4096, 1e-8).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, q).unwrap();
        (spec, env)
    }

    #[test]
    fn random_profiles_respect_their_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_piecewise_linear(&mut rng, 2.0);
            let k = p.knots();
            assert!(k.len() >= 3 && k.len() <= 8);
            assert!(k[0] >= 0.2 && k[0] <= 1.0 && k[k.len() - 1] >= 1.2 && k[k.len() - 1] <= 1.9);
            assert_eq!((p.values()[0], p.values()[k.len() - 1]), (0.0, 0.0));
        }
    }

    #[test]
    fn one_dimensional_battery_is_reproducible() {
        let (spec, env) = setup("pow(1)", 2.0);
        let a = verify_battery(&spec, &env, 2.0, 1, 10, 3).unwrap();
        let b = verify_battery(&spec, &env, 2.0, 1, 10, 3).unwrap();
        assert_eq!(a.reports, b.reports);
        assert_eq!(a.reports.len(), 13);
        assert!(a.all_pass());
        assert!(a.min_quotient() >= 1.0 - 1e-3);
    }

    #[test]
    fn planar_battery_under_ndc() {
        let (spec, env) = setup("pow(1)", 2.0);
        let b = verify_battery(&spec, &env, 2.0, 2, 8, 11).unwrap();
        assert!((b.theory_constant - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
        assert!(b.all_pass(), "{:?}", b.reports.iter().map(|r| r.quotient).collect::<Vec<_>>());
    }

    #[test]
    fn planar_battery_refuses_without_ndc() {
        let (spec, env) = setup("expinv(1,-)", 2.0);
        assert!(matches!(verify_battery(&spec, &env, 2.0, 2, 4, 1), Err(Error::Hypothesis(_))));
        let (spec, env) = setup("pow(1)", 3.0);
        assert!(verify_battery(&spec, &env, 3.0, 2, 4, 1).is_err());
    }
}

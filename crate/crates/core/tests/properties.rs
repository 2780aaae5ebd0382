use ckn_core::builtin::BUILTIN_WEIGHTS;
use ckn_core::functionals::one_d::linear_power_integral;
use ckn_core::functionals::{lhs_1d, rhs_1d, PiecewiseLinear, TestFunction1D};
use ckn_core::ndc::k_value;
use ckn_core::quad::gauss_legendre;
use ckn_core::{compute_envelope, EnvelopeKind, EnvelopeResult, Grid, WeightSpec};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = EnvelopeKind> {
    prop_oneof![Just(EnvelopeKind::Increasing), Just(EnvelopeKind::Decreasing)]
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..20.0, 2..200).prop_map(|l| l.into_iter().map(f64::exp).collect())
}

fn envelope_of(w: &[f64], kind: EnvelopeKind, q: f64) -> EnvelopeResult {
    let grid = Grid::log_uniform(1e-3, 1.0, w.len()).unwrap();
    EnvelopeResult::from_samples(&grid, w, kind, q).unwrap()
}

fn tent_on(lo: f64, hi: f64, interior: &[f64]) -> PiecewiseLinear {
    let count = interior.len() + 2;
    let knots: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    let mut values = vec![0.0];
    values.extend_from_slice(interior);
    values.push(0.0);
    PiecewiseLinear::new(knots, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_is_a_monotone_minorant(w in samples(), kind in kind(), q in 1.0f64..3.0) {
        let env = envelope_of(&w, kind, q);
        let v = env.v();
        for i in 0..w.len() {
            prop_assert!(v[i] <= w[i]);
        }
        for p in v.windows(2) {
            match kind {
                EnvelopeKind::Increasing => prop_assert!(p[0] <= p[1]),
                EnvelopeKind::Decreasing => prop_assert!(p[0] >= p[1]),
            }
        }
        // the envelope touches w at the end it is anchored to
        match kind {
            EnvelopeKind::Increasing => prop_assert_eq!(v[w.len() - 1], w[w.len() - 1]),
            EnvelopeKind::Decreasing => prop_assert_eq!(v[0], w[0]),
        }
    }

    #[test]
    fn envelope_is_idempotent(w in samples(), kind in kind()) {
        let once = envelope_of(&w, kind, 1.0);
        let twice = envelope_of(once.v(), kind, 1.0);
        prop_assert_eq!(once.v(), twice.v());
    }

    #[test]
    fn envelope_is_the_largest_monotone_minorant(w in samples(), kind in kind(), i in 0usize..200) {
        // any monotone minorant lies below v: v[i] is the min of w over the
        // points ahead of (increasing) or behind (decreasing) i
        let env = envelope_of(&w, kind, 1.0);
        let i = i % w.len();
        let expect = match kind {
            EnvelopeKind::Increasing => w[i..].iter().cloned().fold(f64::INFINITY, f64::min),
            EnvelopeKind::Decreasing => w[..=i].iter().cloned().fold(f64::INFINITY, f64::min),
        };
        prop_assert!((env.v()[i] - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn density_telescopes(w in samples(), kind in kind(), q in 1.0f64..3.0) {
        let env = envelope_of(&w, kind, q);
        let g = env.grid();
        let v = env.v();
        let mut total = 0.0;
        for i in 0..g.cell_count() {
            let (a, b) = g.cell(i);
            total += env.vq()[i] * (b - a);
            prop_assert!(!env.plateau()[i] || env.vq()[i] == 0.0);
        }
        let (first, last) = (v[0].powf(q), v[v.len() - 1].powf(q));
        prop_assert!((total - (last - first).abs()).abs() <= 1e-10 * (1.0 + first.max(last)));
    }

    #[test]
    fn inverse_map_round_trip(gamma in prop_oneof![0.2f64..3.0, -3.0f64..-0.2], t in 1e-5f64..0.99) {
        let spec = WeightSpec::parse(&format!("pow({gamma})"), 1.0).unwrap();
        let grid = Grid::for_eta(1.0, 512, 1e-6).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, 1.0).unwrap();
        let level = env.log_value_at(t).unwrap();
        let back = env.inverse_map_log(level).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * t, "{} vs {}", back, t);
    }

    #[test]
    fn k_of_a_power_is_its_reciprocal_exponent(gamma in prop_oneof![0.05f64..5.0, -5.0f64..-0.05], r in 1e-6f64..1.0) {
        let spec = WeightSpec::parse(&format!("pow({gamma})"), 1.0).unwrap();
        let k = k_value(&spec.family, r).unwrap().unwrap();
        prop_assert!((k * gamma.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_is_invariant_under_scaling(c in 0.01f64..100.0, idx in 0usize..BUILTIN_WEIGHTS.len(), r in 0.01f64..0.99) {
        let inner = BUILTIN_WEIGHTS[idx];
        let a = WeightSpec::parse(inner, 1.0).unwrap();
        let b = WeightSpec::parse(&format!("scale({c},{inner})"), 1.0).unwrap();
        let (ka, kb) = (k_value(&a.family, r).unwrap(), k_value(&b.family, r).unwrap());
        match (ka, kb) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x),
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn derivative_matches_finite_differences(idx in 0usize..BUILTIN_WEIGHTS.len(), r in 0.2f64..0.9) {
        let spec = WeightSpec::parse(BUILTIN_WEIGHTS[idx], 1.0).unwrap();
        let h = 1e-5 * r;
        let fd = (spec.family.ln_value(r + h).unwrap() - spec.family.ln_value(r - h).unwrap()) / (2.0 * h);
        let ld = spec.family.log_derivative(r).unwrap();
        prop_assert!((fd - ld).abs() <= 1e-6 * (1.0 + ld.abs()), "{} vs {}", fd, ld);
        let d = spec.family.derivative(r).unwrap();
        let w = spec.family.value(r).unwrap();
        prop_assert!((d - ld * w).abs() <= 1e-10 * d.abs().max(1e-300));
    }

    #[test]
    fn linear_power_integral_matches_quadrature(u0 in -2.0f64..2.0, u1 in -2.0f64..2.0, q in 1.0f64..4.0) {
        let exact = linear_power_integral(0.0, 1.0, u0, u1, q);
        let rule = gauss_legendre(16);
        let f = |t: f64| (u0 + (u1 - u0) * t).abs().powf(q);
        // panels halving toward `from`, where |u|^q may not be smooth
        let graded = |from: f64, to: f64| -> f64 {
            (0..60)
                .map(|k| {
                    let (x0, x1) = (0.5f64.powi(k + 1), 0.5f64.powi(k));
                    rule.integrate(from + (to - from) * x0, from + (to - from) * x1, f).abs()
                })
                .sum()
        };
        let approx = if u0 != u1 {
            let z = (u0 / (u0 - u1)).clamp(0.0, 1.0);
            graded(z, 0.0) + graded(z, 1.0)
        } else {
            rule.integrate(0.0, 1.0, f)
        };
        prop_assert!((exact - approx).abs() <= 1e-10 * (1.0 + exact));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_dimensional_inequality_on_random_profiles(
        idx in 0usize..BUILTIN_WEIGHTS.len(),
        q in 1.0f64..2.0,
        lo in 0.1f64..0.45,
        hi in 0.55f64..0.95,
        interior in prop::collection::vec(-1.0f64..1.0, 1..6),
    ) {
        let spec = WeightSpec::parse(BUILTIN_WEIGHTS[idx], 1.0).unwrap();
        let grid = Grid::for_eta(1.0, 2048, 1e-8).unwrap();
        let env = compute_envelope(&spec, spec.classify(), &grid, q).unwrap();
        let u = TestFunction1D::PiecewiseLinear(tent_on(lo, hi, &interior));
        let l = lhs_1d(&u, &spec).unwrap();
        let r = rhs_1d(&u, &env, q).unwrap();
        prop_assume!(r.value > 0.0);
        let quotient = l.value / r.value;
        let est = quotient * q * (l.est_error / l.value + r.est_error / r.value);
        prop_assert!(quotient >= 1.0 - 1e-3 - 3.0 * est, "{} (est {})", quotient, est);
    }

    #[test]
    fn quotient_is_invariant_under_scaling_the_weight(
        c in 0.1f64..10.0,
        q in 1.0f64..2.0,
        interior in prop::collection::vec(-1.0f64..1.0, 1..5),
    ) {
        let grid = Grid::for_eta(1.0, 1024, 1e-8).unwrap();
        let u = TestFunction1D::PiecewiseLinear(tent_on(0.2, 0.8, &interior));
        let quotient = |text: &str| {
            let spec = WeightSpec::parse(text, 1.0).unwrap();
            let env = compute_envelope(&spec, spec.classify(), &grid, q).unwrap();
            lhs_1d(&u, &spec).unwrap().value / rhs_1d(&u, &env, q).unwrap().value
        };
        let a = quotient("expinv(1,-)");
        let b = quotient(&format!("scale({c},expinv(1,-))"));
        prop_assert!((a - b).abs() <= 1e-9 * a, "{} vs {}", a, b);
    }
}

//! Planar functionals of `A(r) B(theta)`: a radial function factors through
//! the one-dimensional ones, a non-radial one does not.

use ckn_core::functionals::{
    lhs_1d, lhs_polar, omega, rhs_1d, rhs_polar, AngularProfile, PiecewiseLinear, PolarTestFunction,
    TestFunction1D,
};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let spec = WeightSpec::parse("pow(1)", 1.0)?;
    let env = compute_envelope(&spec, spec.classify(), &Grid::for_eta(1.0, 4096, 1e-8)?, 2.0)?;
    let a = TestFunction1D::PiecewiseLinear(PiecewiseLinear::new(
        vec![0.2, 0.4, 0.7, 0.9],
        vec![0.0, 1.0, -0.5, 0.0],
    )?);
    for n in [2, 3, 4] {
        let u = PolarTestFunction::radial(a.clone(), n);
        println!(
            "n = {n} radial: lhs = {:.8} = omega_n * {:.8}, rhs = {:.8}",
            lhs_polar(&u, &spec)?.value,
            lhs_1d(&a, &spec)?.value,
            rhs_polar(&u, &env, 2.0)?.value
        );
    }
    let u = PolarTestFunction {
        radial: a.clone(),
        angular: AngularProfile::Fourier { a0: 0.5, cos: vec![1.0, 0.0], sin: vec![0.0, 0.3] },
        n: 2,
    };
    let (l, r) = (lhs_polar(&u, &spec)?, rhs_polar(&u, &env, 2.0)?);
    println!("n = 2 non-radial: lhs = {:.8}, rhs = {:.8}, quotient = {:.6}", l.value, r.value, l.value / r.value);
    println!("lower bound omega_2^(1/2) = {:.6}", omega(2).sqrt());
    println!("radial rhs_1d = {:.8}", rhs_1d(&a, &env, 2.0)?.value);
    Ok(())
}

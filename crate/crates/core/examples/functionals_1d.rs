//! Both sides of the one-dimensional inequality on a tent and on a bump.

use ckn_core::functionals::{lhs_1d, rhs_1d, Bump, PiecewiseLinear, TestFunction1D};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let spec = WeightSpec::parse("pow(1)", 1.0)?;
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    let tent = TestFunction1D::PiecewiseLinear(PiecewiseLinear::tent(0.25, 0.5, 0.75, 1.0)?);
    let bump = TestFunction1D::Bump(Bump::on(0.2, 0.6, 1.0)?);
    for q in [1.0, 1.5, 2.0] {
        let env = compute_envelope(&spec, spec.classify(), &grid, q)?;
        for (name, u) in [("tent", &tent), ("bump", &bump)] {
            let l = lhs_1d(u, &spec)?;
            let r = rhs_1d(u, &env, q)?;
            println!(
                "q = {q}  {name}: lhs = {:.10} (+-{:.1e})  rhs = {:.10} (+-{:.1e})  ratio = {:.6}",
                l.value, l.est_error, r.value, r.est_error, l.value / r.value
            );
        }
    }
    Ok(())
}

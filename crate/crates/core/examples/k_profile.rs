//! `K(r) = |w / (r w')|` for power and exponential weights, with the
//! log-log slope fitted near the origin.

use ckn_core::ndc::{fit_power_law, k_profile};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    for text in ["pow(2)", "pow(-0.5)", "expinv(0.5,-)", "expinv(2,+)"] {
        let spec = WeightSpec::parse(text, 1.0)?;
        let env = compute_envelope(&spec, spec.classify(), &grid, 2.0)?;
        let p = k_profile(&spec, &env)?;
        let first = p.samples.first().unwrap();
        let slope = fit_power_law(&p.samples, 2.0).unwrap_or(f64::NAN);
        println!("{text:>14}  K({:.1e}) = {:.4e}  slope = {slope:.4}", first.r, first.k);
    }
    Ok(())
}

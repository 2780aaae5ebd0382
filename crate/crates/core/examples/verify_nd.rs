//! Planar battery for `w(t) = t`, where the lower bound is
//! `min(C0, 1) omega_2^{1 - 1/q}`, and the refusal when NDC fails.

use ckn_core::certify::verify_battery;
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    let spec = WeightSpec::parse("pow(1)", 1.0)?;
    for q in [1.0, 1.5, 2.0] {
        let env = compute_envelope(&spec, spec.classify(), &grid, q)?;
        let b = verify_battery(&spec, &env, q, 2, 50, 7)?;
        println!(
            "q = {q}: bound = {:.6}  min quotient = {:.6}  pass = {}",
            b.theory_constant,
            b.min_quotient(),
            b.all_pass()
        );
    }
    let spec = WeightSpec::parse("expinv(1,-)", 1.0)?;
    let env = compute_envelope(&spec, spec.classify(), &grid, 2.0)?;
    if let Err(e) = verify_battery(&spec, &env, 2.0, 2, 50, 7) {
        println!("exp(-1/t): {e}");
    }
    Ok(())
}

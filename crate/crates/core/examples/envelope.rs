//! Monotone envelope of a non-monotone weight: `w(t) = t (2 + sin(1/t))`
//! given as a table, and the plateaus its running minimum creates.

use ckn_core::{compute_envelope, EnvelopeKind, EnvelopeResult, Grid};

fn main() -> ckn_core::Result<()> {
    let grid = Grid::for_eta(1.0, 2048, 1e-3)?;
    let w: Vec<f64> = grid.points().iter().map(|&t| t * (2.0 + (1.0 / t).sin())).collect();
    let env = EnvelopeResult::from_samples(&grid, &w, EnvelopeKind::Increasing, 2.0)?;
    let flat = env.plateau().iter().filter(|&&p| p).count();
    println!("{flat} of {} cells lie on plateaus of phi_w", env.plateau().len());
    for i in (0..grid.len()).step_by(256) {
        println!("t = {:.4e}  w = {:.4e}  phi = {:.4e}", grid.points()[i], env.w()[i], env.v()[i]);
    }

    let spec = ckn_core::WeightSpec::parse("expinv(1,+)", 1.0)?;
    let env = compute_envelope(&spec, spec.classify(), &Grid::for_eta(1.0, 4096, 1e-2)?, 1.5)?;
    println!("psi of exp(1/t): kind {:?}, eta~ = {:.6}", env.kind(), env.eta_tilde());
    Ok(())
}

//! Seeded random battery for the one-dimensional inequality over every
//! built-in weight and `q` in {1, 1.5, 2}.

use ckn_core::builtin::builtin_weights;
use ckn_core::certify::verify_battery;
use ckn_core::{compute_envelope, Grid};

fn main() -> ckn_core::Result<()> {
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    for (text, spec) in builtin_weights(1.0)? {
        for q in [1.0, 1.5, 2.0] {
            let env = compute_envelope(&spec, spec.classify(), &grid, q)?;
            let b = verify_battery(&spec, &env, q, 1, 50, 2024)?;
            println!("{text:>26}  q = {q:<3}  min quotient = {:.6}  pass = {}", b.min_quotient(), b.all_pass());
        }
    }
    Ok(())
}

//! Non-degenerate condition and infinite-order detection over the built-in
//! weights.

use ckn_core::builtin::builtin_weights;
use ckn_core::ndc::{DEFAULT_M_MAX, DEFAULT_THRESHOLD};
use ckn_core::{compute_envelope, Grid, NdcReport};

fn main() -> ckn_core::Result<()> {
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    for (text, spec) in builtin_weights(1.0)? {
        let class = spec.classify();
        let env = compute_envelope(&spec, class, &grid, 2.0)?;
        let r = NdcReport::compute(&spec, &env, class, DEFAULT_THRESHOLD, DEFAULT_M_MAX)?;
        println!(
            "{text:>26}  {:<5} C0 = {:<10.3e} {:<22} infinite order: {:?}",
            class.to_string(),
            r.c0,
            format!("{:?}", r.verdict),
            r.infinite_order_status
        );
    }
    Ok(())
}

//! Localized-family sweeps: the quotient decreases toward the best
//! constant 1, for an increasing envelope and for a truncated `eta = inf`.

use ckn_core::certify::{estimate_best_constant_1d, DEFAULT_H_SWEEP, DEFAULT_TRUNCATION};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    for (text, eta, x) in [("pow(1)", 1.0, 0.5), ("pow(2)", 1.0, 0.5), ("expinv(1,-)", 1.0, 0.5), ("pow(-1)", f64::INFINITY, 1.0)] {
        let spec = WeightSpec::parse(text, eta)?;
        let grid = Grid::for_eta(spec.effective_eta(DEFAULT_TRUNCATION), 4096, 1e-8)?;
        let env = compute_envelope(&spec, spec.classify(), &grid, 2.0)?;
        let (best, reports) = estimate_best_constant_1d(&spec, &env, 2.0, x, &DEFAULT_H_SWEEP)?;
        let qs: Vec<String> = reports.iter().map(|r| format!("{:.5}", r.quotient)).collect();
        println!("{text:>12} eta = {eta}: [{}] -> {best:.6}", qs.join(", "));
    }
    Ok(())
}

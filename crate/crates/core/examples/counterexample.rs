//! Counterexample sweep for `w(t) = exp(-1/t)` in the plane: the left-hand
//! side stays bounded while the right-hand side grows with `j`.

use ckn_core::certify::{run_counterexample, DEFAULT_J_MAX};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let spec = WeightSpec::parse("expinv(1,-)", 1.0)?;
    let grid = Grid::for_eta(1.0, 4096, 1e-8)?;
    let env = compute_envelope(&spec, spec.classify(), &grid, 2.0)?;
    let rows = run_counterexample(&spec, &env, 2.0, 2, DEFAULT_J_MAX, None)?;
    println!("{:>2}  {:>16}  {:>12}  {:>12}  {:>12}", "j", "eps_j", "lhs", "rhs", "quotient");
    for r in &rows {
        println!("{:>2}  {:>16}  {:>12.6}  {:>12.6}  {:>12.6}", r.j, r.eps_j, r.lhs, r.rhs, r.quotient);
    }
    let growth = rows.last().unwrap().rhs / rows[0].rhs;
    println!("rhs_{}/rhs_1 = {growth:.3}", rows.len());
    Ok(())
}

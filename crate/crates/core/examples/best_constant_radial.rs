//! Smoothed indicators approach the radial sharp constant
//! `S_1q |gamma|^{1/q}`, symmetrically in `gamma`.

use ckn_core::certify::{estimate_best_constant_radial, SharpConstants, DEFAULT_EPS_SWEEP};

fn main() -> ckn_core::Result<()> {
    for (n, q, gamma) in [(2, 2.0, 1.0), (2, 2.0, -1.0), (2, 1.0, 2.0), (2, 1.5, 1.0), (3, 1.5, 1.5), (3, 1.5, -1.5)] {
        let s = SharpConstants::new(n, q, Some(gamma))?.s_rad.unwrap();
        let (best, _) = estimate_best_constant_radial(n, q, gamma, &DEFAULT_EPS_SWEEP)?;
        println!("n = {n} q = {q} gamma = {gamma:>4}: S_rad = {s:.6}  swept = {best:.6}  ratio = {:.6}", best / s);
    }
    Ok(())
}

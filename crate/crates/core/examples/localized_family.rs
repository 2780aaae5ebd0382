//! The optimality profile built from the envelope on shrinking windows,
//! written as CSV knots for the narrowest window.

use ckn_core::functionals::{lhs_1d, make_localized_family, rhs_1d};
use ckn_core::{compute_envelope, Grid, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let spec = WeightSpec::parse("pow(2)", 1.0)?;
    let env = compute_envelope(&spec, spec.classify(), &Grid::for_eta(1.0, 4096, 1e-8)?, 2.0)?;
    let mut last = None;
    for h in [1e-1, 1e-2, 1e-3, 1e-4] {
        let u = make_localized_family(&env, 0.5, h)?;
        let q = lhs_1d(&u, &spec)?.value / rhs_1d(&u, &env, 2.0)?.value;
        println!("h = {h:.0e}  quotient = {q:.6}");
        last = Some(u);
    }
    let path = std::env::temp_dir().join("localized_profile.csv");
    last.unwrap().write_csv(std::fs::File::create(&path)?)?;
    println!("profile knots written to {}", path.display());
    Ok(())
}

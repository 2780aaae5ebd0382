//! Mollified `|theta|^-s` on the circle: mass is kept, total variation and
//! `L^q` norms grow as the mollifier narrows.

use ckn_core::functionals::AngularProfile;

fn main() -> ckn_core::Result<()> {
    let base = AngularProfile::singular_power(0.75)?;
    println!("int |B| = {:.10}", base.norm_pow(1.0)?);
    for j in 1..=8 {
        let b = AngularProfile::mollified_j(base.clone(), j)?;
        let s = b.sample()?;
        println!(
            "j = {j}  nodes = {:4}  int |B_j| = {:.10}  int |B_j'| = {:12.4}  ||B_j||_2 = {:10.4}",
            s.len(),
            s.l1(),
            s.total_variation(),
            s.norm(2.0)
        );
    }
    Ok(())
}

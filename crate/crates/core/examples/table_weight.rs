//! A tabulated weight read from CSV goes through the same pipeline as the
//! built-in families.

use std::io::Write;

use ckn_core::ndc::{DEFAULT_M_MAX, DEFAULT_THRESHOLD};
use ckn_core::{compute_envelope, Grid, NdcReport, WeightSpec};

fn main() -> ckn_core::Result<()> {
    let path = std::env::temp_dir().join("ckn_table_weight.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "t,w")?;
    for k in 0..=400 {
        let t = 1e-4 * 1e4f64.powf(k as f64 / 400.0);
        writeln!(f, "{t},{}", t.powf(1.5) * (1.0 + 0.5 * (20.0 * t).sin()))?;
    }
    drop(f);
    let spec = WeightSpec::parse(&format!("table({})", path.display()), 1.0)?;
    let class = spec.classify();
    let grid = Grid::for_eta(1.0, 4096, 2e-4)?;
    let env = compute_envelope(&spec, class, &grid, 2.0)?;
    let report = NdcReport::compute(&spec, &env, class, DEFAULT_THRESHOLD, DEFAULT_M_MAX)?;
    let flat = env.plateau().iter().filter(|&&p| p).count();
    println!("class {class}, {flat} plateau cells, C0 = {:.4}, verdict {:?}", report.c0, report.verdict);
    Ok(())
}

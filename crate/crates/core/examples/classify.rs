//! Classes of a few weights by their limit at `t -> +0`.

use ckn_core::WeightSpec;

fn main() -> ckn_core::Result<()> {
    for text in ["pow(1.5)", "pow(-1)", "expinv(1,-)", "expinv(0.5,+)", "prod(pow(2),expinv(1,+))", "scale(3,pow(1.5))"] {
        let spec = WeightSpec::parse(text, 1.0)?;
        println!("{text:>26}  {}", spec.classify());
    }
    Ok(())
}

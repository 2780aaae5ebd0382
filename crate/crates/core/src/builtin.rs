//! The built-in weights exercised by the batteries.

use crate::error::Result;
use crate::weight::WeightSpec;

pub const BUILTIN_WEIGHTS: [&str; 15] = [
    "pow(0.5)",
    "pow(-0.5)",
    "pow(1)",
    "pow(-1)",
    "pow(2)",
    "pow(-2)",
    "expinv(0.5,-)",
    "expinv(0.5,+)",
    "expinv(1,-)",
    "expinv(1,+)",
    "expinv(2,-)",
    "expinv(2,+)",
    "prod(pow(-2),expinv(1,-))",
    "prod(pow(2),expinv(1,+))",
    "scale(3,pow(1.5))",
];

/// Every built-in weight on `(0, eta]`.
pub fn builtin_weights(eta: f64) -> Result<Vec<(&'static str, WeightSpec)>> {
    BUILTIN_WEIGHTS
        .iter()
        .map(|&text| Ok((text, WeightSpec::parse(text, eta)?)))
        .collect()
}

//! Numerical toolkit for `p = 1` weighted Caffarelli-Kohn-Nirenberg type
//! inequalities with non-doubling weights.
//!
//! The pipeline runs weight ([`weight`]) to monotone envelope
//! ([`envelope`]) to the `K(r)` gauge ([`ndc`]), then evaluates both sides
//! of the inequalities ([`functionals`]) and turns them into verdicts
//! ([`certify`]).

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod certify;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod ndc;
pub mod quad;
pub mod weight;

pub use envelope::{compute_envelope, EnvelopeKind, EnvelopeResult};
pub use error::{Error, Result};
pub use grid::Grid;
pub use ndc::{NdcReport, NdcVerdict};
pub use quad::QuadratureResult;
pub use weight::{Family, WeightClass, WeightSpec};

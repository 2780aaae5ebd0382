//! Both sides of the inequalities, and the test-function families used to
//! probe them.

pub mod angular;
pub mod counterexample;
pub mod one_d;
pub mod polar;
pub mod radial;
pub mod test_function;

pub use angular::AngularProfile;
pub use counterexample::{make_counterexample_sequence, CounterexampleTerm};
pub use one_d::{lhs_1d, rhs_1d};
pub use polar::{lhs_polar, omega, rhs_polar, PolarTestFunction};
pub use radial::{ckn_radial, RadialProfile};
pub use test_function::{Bump, Localized, PiecewiseLinear, Shape, TestFunction1D};

use crate::envelope::EnvelopeResult;
use crate::error::Result;

/// The optimality profile built from `1 / v_w` on a window at `x` of width `h`.
pub fn make_localized_family(env: &EnvelopeResult, x: f64, h: f64) -> Result<TestFunction1D> {
    Ok(TestFunction1D::Localized(Localized::new(env, x, h)?))
}

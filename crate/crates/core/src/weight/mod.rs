//! Weight functions on `(0, eta]`.
//!
//! A weight is described by a small closed algebra ([`Family`]): powers
//! `t^gamma`, exponentials of inverse powers `exp(±t^-alpha)`, positive
//! scalings, products, and piecewise-linear tables. Every built-in member
//! has a symbolic derivative and a symbolic logarithm, so quantities such as
//! `w / (t w')` stay finite even where `w` itself under- or overflows.

mod parse;
mod table;

use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub use parse::{annotate, parse_family};
pub use table::Table;

/// Sign of the exponent in `exp(sign * t^-alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Declarative description of `w(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `t^gamma`, `gamma != 0`.
    Power { gamma: f64 },
    /// `exp(sign * t^-alpha)`, `alpha > 0`.
    ExpInvPower { sign: Sign, alpha: f64 },
    /// `c * inner(t)`, `c > 0`.
    Scale { c: f64, inner: Box<Family> },
    Product(Box<Family>, Box<Family>),
    Table(Table),
}

impl Family {
    pub fn power(gamma: f64) -> Self {
        Family::Power { gamma }
    }

    pub fn exp_inv_power(sign: Sign, alpha: f64) -> Self {
        Family::ExpInvPower { sign, alpha }
    }

    pub fn scale(c: f64, inner: Family) -> Self {
        Family::Scale {
            c,
            inner: Box::new(inner),
        }
    }

    pub fn product(left: Family, right: Family) -> Self {
        Family::Product(Box::new(left), Box::new(right))
    }

    /// Checks parameter ranges recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Power { gamma } => {
                if !gamma.is_finite() || *gamma == 0.0 {
                    return Err(Error::Spec(format!("pow exponent must be finite and non-zero, got {gamma}")));
                }
            }
            Family::ExpInvPower { alpha, .. } => {
                if !alpha.is_finite() || *alpha <= 0.0 {
                    return Err(Error::Spec(format!("expinv exponent must be positive, got {alpha}")));
                }
            }
            Family::Scale { c, inner } => {
                if !c.is_finite() || *c <= 0.0 {
                    return Err(Error::Spec(format!("scale factor must be positive, got {c}")));
                }
                inner.validate()?;
            }
            Family::Product(l, r) => {
                l.validate()?;
                r.validate()?;
            }
            Family::Table(t) => t.validate()?,
        }
        Ok(())
    }

    pub fn contains_table(&self) -> bool {
        match self {
            Family::Table(_) => true,
            Family::Scale { inner, .. } => inner.contains_table(),
            Family::Product(l, r) => l.contains_table() || r.contains_table(),
            _ => false,
        }
    }

    /// Smallest admissible argument (0 unless a table restricts it).
    pub fn min_t(&self) -> f64 {
        match self {
            Family::Table(t) => t.knots()[0],
            Family::Scale { inner, .. } => inner.min_t(),
            Family::Product(l, r) => l.min_t().max(r.min_t()),
            _ => 0.0,
        }
    }

    /// Largest admissible argument (infinite unless a table restricts it).
    pub fn max_t(&self) -> f64 {
        match self {
            Family::Table(t) => *t.knots().last().unwrap(),
            Family::Scale { inner, .. } => inner.max_t(),
            Family::Product(l, r) => l.max_t().min(r.max_t()),
            _ => f64::INFINITY,
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = (self.min_t(), self.max_t());
        if !(t > 0.0 && t >= lo && t <= hi) {
            return Err(domain("t", t, format!("[{lo}, {hi}] intersected with (0, inf)")));
        }
        Ok(())
    }

    /// `w(t)`; may underflow to 0 or overflow to infinity for the
    /// exponential families, see [`Family::ln_value`].
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.value_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        match self {
            Family::Power { gamma } => t.powf(*gamma),
            Family::ExpInvPower { sign, alpha } => (sign.as_f64() * t.powf(-alpha)).exp(),
            Family::Scale { c, inner } => c * inner.value_unchecked(t),
            Family::Product(l, r) => l.value_unchecked(t) * r.value_unchecked(t),
            Family::Table(tab) => tab.interpolate(t),
        }
    }

    /// `ln w(t)`, finite wherever `w` is defined.
    pub fn ln_value(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.ln_value_unchecked(t))
    }

    pub(crate) fn ln_value_unchecked(&self, t: f64) -> f64 {
        match self {
            Family::Power { gamma } => gamma * t.ln(),
            Family::ExpInvPower { sign, alpha } => sign.as_f64() * t.powf(-alpha),
            Family::Scale { c, inner } => c.ln() + inner.ln_value_unchecked(t),
            Family::Product(l, r) => l.ln_value_unchecked(t) + r.ln_value_unchecked(t),
            Family::Table(tab) => tab.interpolate(t).ln(),
        }
    }

    /// `w'(t)`. Tables return the right-hand slope at knots (left-hand at
    /// the last knot).
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.derivative_unchecked(t))
    }

    fn derivative_unchecked(&self, t: f64) -> f64 {
        match self {
            Family::Power { gamma } => gamma * t.powf(gamma - 1.0),
            Family::ExpInvPower { sign, alpha } => {
                let s = sign.as_f64();
                (s * t.powf(-alpha)).exp() * (-s * alpha * t.powf(-alpha - 1.0))
            }
            Family::Scale { c, inner } => c * inner.derivative_unchecked(t),
            Family::Product(l, r) => {
                l.derivative_unchecked(t) * r.value_unchecked(t)
                    + l.value_unchecked(t) * r.derivative_unchecked(t)
            }
            Family::Table(tab) => tab.slope(t),
        }
    }

    /// `w'(t) / w(t)`, evaluated without forming `w`.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.log_derivative_unchecked(t))
    }

    fn log_derivative_unchecked(&self, t: f64) -> f64 {
        match self {
            Family::Power { gamma } => gamma / t,
            Family::ExpInvPower { sign, alpha } => -sign.as_f64() * alpha * t.powf(-alpha - 1.0),
            Family::Scale { inner, .. } => inner.log_derivative_unchecked(t),
            Family::Product(l, r) => l.log_derivative_unchecked(t) + r.log_derivative_unchecked(t),
            Family::Table(tab) => tab.slope(t) / tab.interpolate(t),
        }
    }

    /// Limit class of `w` at `+0`.
    pub fn classify(&self) -> WeightClass {
        if self.contains_table() {
            return self.probe_limit();
        }
        Asymptotics::of(self).class()
    }

    /// Numeric limit probe on the geometric sequence `eta * 0.5^k` down to
    /// the smallest admissible argument.
    fn probe_limit(&self) -> WeightClass {
        let lo = self.min_t().max(f64::MIN_POSITIVE);
        let hi = self.max_t();
        if !hi.is_finite() {
            return WeightClass::Unknown;
        }
        let mut samples = Vec::new();
        let mut t = hi;
        while t > lo {
            samples.push(self.value_unchecked(t));
            t *= PROBE_RATIO;
        }
        samples.push(self.value_unchecked(lo));
        if samples.len() < PROBE_TAIL {
            return WeightClass::Unknown;
        }
        let tail = &samples[samples.len() - PROBE_TAIL..];
        let max = tail.iter().cloned().fold(f64::MIN, f64::max);
        let min = tail.iter().cloned().fold(f64::MAX, f64::min);
        if (max - min) / max <= PROBE_SPREAD {
            return WeightClass::Wa(*tail.last().unwrap());
        }
        // tail is ordered toward t -> 0
        if tail.windows(2).all(|p| p[1] < p[0]) {
            WeightClass::W0
        } else if tail.windows(2).all(|p| p[1] > p[0]) {
            WeightClass::Winf
        } else {
            WeightClass::Unknown
        }
    }
}

const PROBE_RATIO: f64 = 0.5;
const PROBE_SPREAD: f64 = 0.05;
const PROBE_TAIL: usize = 4;

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power { gamma } => write!(f, "pow({gamma})"),
            Family::ExpInvPower { sign, alpha } => {
                let s = if *sign == Sign::Plus { '+' } else { '-' };
                write!(f, "expinv({alpha},{s})")
            }
            Family::Scale { c, inner } => write!(f, "scale({c},{inner})"),
            Family::Product(l, r) => write!(f, "prod({l},{r})"),
            Family::Table(t) => match t.source() {
                Some(p) => write!(f, "table({p})"),
                None => write!(f, "table(<{} knots>)", t.knots().len()),
            },
        }
    }
}

/// Leading-order behaviour of a table-free family at `+0`:
/// `ln w ~ sum_k c_k t^-alpha_k + gamma ln t + ln c`.
struct Asymptotics {
    exp_terms: Vec<(f64, f64)>,
    gamma: f64,
    ln_c: f64,
}

impl Asymptotics {
    fn of(family: &Family) -> Self {
        let mut a = Asymptotics {
            exp_terms: Vec::new(),
            gamma: 0.0,
            ln_c: 0.0,
        };
        a.collect(family);
        a
    }

    fn collect(&mut self, family: &Family) {
        match family {
            Family::Power { gamma } => self.gamma += gamma,
            Family::ExpInvPower { sign, alpha } => {
                match self.exp_terms.iter_mut().find(|(a, _)| a == alpha) {
                    Some((_, c)) => *c += sign.as_f64(),
                    None => self.exp_terms.push((*alpha, sign.as_f64())),
                }
            }
            Family::Scale { c, inner } => {
                self.ln_c += c.ln();
                self.collect(inner);
            }
            Family::Product(l, r) => {
                self.collect(l);
                self.collect(r);
            }
            Family::Table(_) => unreachable!("tables are classified numerically"),
        }
    }

    fn class(&self) -> WeightClass {
        let leading = self
            .exp_terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, c)) = leading {
            return if *c < 0.0 { WeightClass::W0 } else { WeightClass::Winf };
        }
        if self.gamma.abs() <= 1e-12 {
            WeightClass::Wa(self.ln_c.exp())
        } else if self.gamma > 0.0 {
            WeightClass::W0
        } else {
            WeightClass::Winf
        }
    }
}

/// Membership of `w` in `W_a` according to `lim_{t -> +0} w(t) = a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightClass {
    W0,
    Winf,
    Wa(f64),
    Unknown,
}

impl WeightClass {
    /// True for the classes on which monotone rearrangements are defined.
    pub fn is_rearrangeable(self) -> bool {
        matches!(self, WeightClass::W0 | WeightClass::Winf)
    }
}

impl fmt::Display for WeightClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightClass::W0 => f.write_str("W0"),
            WeightClass::Winf => f.write_str("Winf"),
            WeightClass::Wa(a) => write!(f, "Wa({a})"),
            WeightClass::Unknown => f.write_str("unknown"),
        }
    }
}

impl Serialize for WeightClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A weight together with its cutoff `eta` (possibly infinite for 1D work).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub family: Family,
    pub eta: f64,
}

impl WeightSpec {
    pub fn new(family: Family, eta: f64) -> Result<Self> {
        family.validate()?;
        if !(eta > 0.0) {
            return Err(Error::Spec(format!("eta must be positive, got {eta}")));
        }
        if family.contains_table() {
            if !eta.is_finite() {
                return Err(Error::Spec("tabulated weights need a finite eta".into()));
            }
            if family.max_t() < eta {
                return Err(Error::Spec(format!(
                    "table knots end at {} before eta = {eta}",
                    family.max_t()
                )));
            }
        }
        Ok(WeightSpec { family, eta })
    }

    /// Parses the weight mini-language, e.g. `prod(pow(1),expinv(1,-))`.
    pub fn parse(text: &str, eta: f64) -> Result<Self> {
        WeightSpec::new(parse_family(text)?, eta)
    }

    /// Cutoff used for grids: `eta` itself, or `truncation` when `eta = inf`.
    pub fn effective_eta(&self, truncation: f64) -> f64 {
        if self.eta.is_finite() {
            self.eta
        } else {
            truncation
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if t > self.eta {
            return Err(domain("t", t, format!("(0, {}]", self.eta)));
        }
        Ok(())
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let w = self.family.value(t)?;
        if self.family.contains_table() && !(w > 0.0) {
            return Err(Error::Spec(format!("weight is not positive at t = {t}")));
        }
        Ok(w)
    }

    pub fn ln_evaluate(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.family.ln_value(t)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.family.derivative(t)
    }

    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.family.log_derivative(t)
    }

    pub fn classify(&self) -> WeightClass {
        self.family.classify()
    }
}

//! Monotone rearrangements of a weight on a grid.
//!
//! For `w` vanishing at the origin the envelope is the largest increasing
//! minorant `phi(t) = inf_{t <= s <= eta} w(s)` (a suffix minimum); for `w`
//! blowing up it is the largest decreasing minorant
//! `psi(t) = inf_{0 <= s <= t} w(s)` (a prefix minimum). Both are computed on
//! `ln w`, which keeps weights such as `exp(±1/t)` representable all the way
//! down to the grid floor.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::Grid;
use crate::ndc::k_value;
use crate::weight::{Family, WeightClass, WeightSpec};

/// Relative flatness below which a cell counts as flat.
pub const FLAT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `phi_w`, for weights in `W0`.
    Increasing,
    /// `psi_w`, for weights in `Winf`.
    Decreasing,
}

impl EnvelopeKind {
    pub fn for_class(class: WeightClass) -> Result<Self> {
        match class {
            WeightClass::W0 => Ok(EnvelopeKind::Increasing),
            WeightClass::Winf => Ok(EnvelopeKind::Decreasing),
            other => Err(Error::UnsupportedClass(other)),
        }
    }

    fn sign(self) -> f64 {
        match self {
            EnvelopeKind::Increasing => 1.0,
            EnvelopeKind::Decreasing => -1.0,
        }
    }
}

/// Envelope samples, plateau cells and the density `V^q_w` per cell.
#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    kind: EnvelopeKind,
    grid: Grid,
    w: Vec<f64>,
    log_w: Vec<f64>,
    v: Vec<f64>,
    log_v: Vec<f64>,
    plateau: Vec<bool>,
    vq: Vec<f64>,
    q: f64,
    source: Option<Family>,
    truncated: bool,
}

/// Computes `v_w` and `V^q_w` for `spec` on `grid`.
pub fn compute_envelope(
    spec: &WeightSpec,
    class: WeightClass,
    grid: &Grid,
    q: f64,
) -> Result<EnvelopeResult> {
    let kind = EnvelopeKind::for_class(class)?;
    if grid.eta() > spec.eta {
        return Err(domain("grid end", grid.eta(), format!("(0, {}]", spec.eta)));
    }
    let mut log_w = Vec::with_capacity(grid.len());
    let mut w = Vec::with_capacity(grid.len());
    for &p in grid.points() {
        log_w.push(spec.family.ln_value(p)?);
        w.push(spec.family.value(p)?);
    }
    let mut env = EnvelopeResult::build(grid.clone(), w, log_w, kind, q, Some(spec.family.clone()))?;
    env.truncated = !spec.eta.is_finite();
    Ok(env)
}

impl EnvelopeResult {
    /// Envelope of raw positive samples `w[i] = w(points[i])`.
    pub fn from_samples(grid: &Grid, w: &[f64], kind: EnvelopeKind, q: f64) -> Result<Self> {
        if w.len() != grid.len() {
            return Err(Error::Spec(format!(
                "{} samples for {} grid points",
                w.len(),
                grid.len()
            )));
        }
        if w.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::Spec("weight samples must be positive and finite".into()));
        }
        let log_w = w.iter().map(|x| x.ln()).collect();
        EnvelopeResult::build(grid.clone(), w.to_vec(), log_w, kind, q, None)
    }

    fn build(
        grid: Grid,
        w: Vec<f64>,
        log_w: Vec<f64>,
        kind: EnvelopeKind,
        q: f64,
        source: Option<Family>,
    ) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(domain("q", q, "[1, inf)"));
        }
        let v = running_min(&w, kind);
        let log_v = running_min(&log_w, kind);
        let n = grid.len();
        let mut plateau = vec![false; n - 1];
        let mut vq = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let d = (log_v[i + 1] - log_v[i]).abs();
            let flat = d <= FLAT_TOL;
            let exceeds = log_w[i] > log_v[i] || log_w[i + 1] > log_v[i + 1];
            plateau[i] = flat && exceeds;
            if plateau[i] || d == 0.0 {
                continue;
            }
            let (a, b) = grid.cell(i);
            let hi = log_v[i].max(log_v[i + 1]);
            // |v_{i+1}^q - v_i^q| without cancellation or inf - inf
            vq[i] = (q * hi).exp() * (-(-q * d).exp_m1()) / (b - a);
        }
        Ok(EnvelopeResult {
            kind,
            grid,
            w,
            log_w,
            v,
            log_v,
            plateau,
            vq,
            q,
            source,
            truncated: false,
        })
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Weight samples at the grid points.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn log_w(&self) -> &[f64] {
        &self.log_w
    }

    /// Envelope samples at the grid points.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn log_v(&self) -> &[f64] {
        &self.log_v
    }

    /// One flag per cell: true inside `Z_0[v_w]`.
    pub fn plateau(&self) -> &[bool] {
        &self.plateau
    }

    /// `V^q_w` per cell (cell averages, 0 on plateaus).
    pub fn vq(&self) -> &[f64] {
        &self.vq
    }

    pub fn source(&self) -> Option<&Family> {
        self.source.as_ref()
    }

    /// True when the grid end is a truncation of `eta = inf`.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// End of the transformed radial range: `v_w(eta)` for `phi`, `1 / v_w(eta)` for `psi`.
    pub fn eta_tilde(&self) -> f64 {
        self.log_eta_tilde().exp()
    }

    pub fn log_eta_tilde(&self) -> f64 {
        self.rho_level(self.grid.len() - 1)
    }

    /// `ln rho` at grid point `i` under the change of variables
    /// `v_w(r) = rho` (increasing) or `v_w(r) = 1 / rho` (decreasing).
    pub fn rho_level(&self, i: usize) -> f64 {
        self.kind.sign() * self.log_v[i]
    }

    /// `ln v_w(t)` at an arbitrary `t` in the grid range.
    pub fn log_value_at(&self, t: f64) -> Result<f64> {
        let c = self
            .grid
            .locate(t)
            .ok_or_else(|| domain("t", t, format!("[{}, {}]", self.grid.r_min(), self.grid.eta())))?;
        let (lo, hi) = (self.log_v[c], self.log_v[c + 1]);
        if self.plateau[c] {
            return Ok(lo);
        }
        match &self.source {
            Some(f) => {
                let lw = f.ln_value(t)?;
                Ok(match self.kind {
                    EnvelopeKind::Increasing => lw.min(hi).clamp(lo, hi),
                    EnvelopeKind::Decreasing => lw.min(lo).clamp(hi, lo),
                })
            }
            None => {
                let (a, b) = self.grid.cell(c);
                let s = (t / a).ln() / (b / a).ln();
                Ok(lo + s * (hi - lo))
            }
        }
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.log_value_at(t)?.exp())
    }

    /// `v_w^{-1}(rho)`.
    pub fn inverse_map(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(domain("rho", rho, "(0, inf)"));
        }
        self.inverse_map_log(rho.ln())
    }

    /// `v_w^{-1}` evaluated at `exp(level)`; works for levels far outside
    /// the range of `f64`.
    pub fn inverse_map_log(&self, level: f64) -> Result<f64> {
        let sgn = self.kind.sign();
        let key = |i: usize| sgn * self.log_v[i];
        let target = sgn * level;
        let n = self.grid.len();
        let (k0, k1) = (key(0), key(n - 1));
        let tol = FLAT_TOL * target.abs().max(1.0);
        if !(target >= k0 - tol && target <= k1 + tol) {
            return Err(domain(
                "ln rho",
                level,
                format!("[{}, {}]", k0.min(k1) * sgn.abs(), k1),
            ));
        }
        let keys: Vec<f64> = (0..n).map(key).collect();
        let lo = keys.partition_point(|&k| k < target - tol);
        let hi = keys.partition_point(|&k| k <= target + tol);
        if hi > lo + 1 {
            return Err(Error::PlateauImage(level.exp()));
        }
        if hi == lo + 1 {
            return Ok(self.grid.points()[lo]);
        }
        let c = lo - 1;
        let (a, b) = self.grid.cell(c);
        let s = (target - keys[c]) / (keys[c + 1] - keys[c]);
        let guess = ((a.ln()) + s * (b / a).ln()).exp();
        let Some(f) = &self.source else {
            return Ok(guess);
        };
        let g = |r: f64| f.ln_value(r).map(|lw| sgn * lw - target);
        let (mut x0, mut x1) = (a, b);
        if !(g(x0)? <= 0.0 && g(x1)? >= 0.0) {
            return Ok(guess);
        }
        for _ in 0..200 {
            let mid = (x0 * x1).sqrt();
            if mid <= x0 || mid >= x1 {
                break;
            }
            if g(mid)? < 0.0 {
                x0 = mid;
            } else {
                x1 = mid;
            }
            if x1 - x0 <= 1e-15 * x1 {
                break;
            }
        }
        Ok(0.5 * (x0 + x1))
    }

    /// `H` at `exp(ln_rho)`: `K(v_w^{-1}(rho))` for `phi`, `K(v_w^{-1}(1/rho))`
    /// for `psi`. `None` on plateau images.
    pub fn h_at_log_rho(&self, family: &Family, ln_rho: f64) -> Result<Option<f64>> {
        let level = self.kind.sign() * ln_rho;
        match self.inverse_map_log(level) {
            Ok(r) => k_value(family, r),
            Err(Error::PlateauImage(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn running_min(x: &[f64], kind: EnvelopeKind) -> Vec<f64> {
    let mut out = x.to_vec();
    match kind {
        EnvelopeKind::Increasing => {
            for i in (0..out.len() - 1).rev() {
                out[i] = out[i].min(out[i + 1]);
            }
        }
        EnvelopeKind::Decreasing => {
            for i in 1..out.len() {
                out[i] = out[i].min(out[i - 1]);
            }
        }
    }
    out
}

/// One sample of `H(rho)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HSample {
    pub rho: f64,
    /// `None` when `rho` is the image of a plateau (or `w' = 0` there).
    pub h: Option<f64>,
}

/// `H(rho)` on the given transformed radii.
pub fn h_profile(env: &EnvelopeResult, spec: &WeightSpec, rho: &[f64]) -> Result<Vec<HSample>> {
    rho.iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(domain("rho", r, "(0, inf)"));
            }
            Ok(HSample {
                rho: r,
                h: env.h_at_log_rho(&spec.family, r.ln())?,
            })
        })
        .collect()
}

//! The gauge `K(r) = |w(r) / (r w'(r))|`, the non-degenerate condition
//! `inf K > 0`, its failure mode `limsup_{r -> 0} K = 0`, and detection of
//! infinite-order vanishing or blow-up.

use serde::Serialize;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::weight::{Family, WeightClass, WeightSpec};

pub const DEFAULT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_M_MAX: u32 = 16;

/// Relative drop per dyadic window that counts as decay.
const DECAY_STEP: f64 = 1e-3;
/// Consecutive decreasing windows required.
const DECAY_WINDOWS: usize = 4;

/// `K(r)`, or `None` where `w'(r) = 0`.
pub fn k_value(family: &Family, r: f64) -> Result<Option<f64>> {
    let ld = family.log_derivative(r)?;
    if ld == 0.0 || !ld.is_finite() {
        return Ok(None);
    }
    let k = 1.0 / (r * ld).abs();
    Ok(k.is_finite().then_some(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KSample {
    pub r: f64,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KProfile {
    pub samples: Vec<KSample>,
    /// Non-plateau cells where `w' = 0` (excluded from `samples`).
    pub n_flagged: usize,
}

/// `K` at the geometric midpoint of every non-plateau cell.
pub fn k_profile(spec: &WeightSpec, env: &EnvelopeResult) -> Result<KProfile> {
    let grid = env.grid();
    let mut samples = Vec::with_capacity(grid.cell_count());
    let mut n_flagged = 0;
    for (i, &flat) in env.plateau().iter().enumerate() {
        if flat {
            continue;
        }
        let r = grid.midpoint(i);
        match k_value(&spec.family, r)? {
            Some(k) => samples.push(KSample { r, k }),
            None => n_flagged += 1,
        }
    }
    if samples.is_empty() {
        return Err(Error::Spec("no non-plateau cell carries a finite K sample".into()));
    }
    Ok(KProfile { samples, n_flagged })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NdcVerdict {
    Satisfied,
    ViolatedLimsupZero,
    Inconclusive,
}

/// `sup K` over `(0, eta 2^-k]` for `k = 0, 1, ...` while the window holds samples.
pub fn dyadic_sups(samples: &[KSample], eta: f64) -> Vec<f64> {
    let mut sorted: Vec<KSample> = samples.to_vec();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    // prefix maximum: sup over r <= sorted[i].r
    let mut prefix = Vec::with_capacity(sorted.len());
    let mut m = f64::NEG_INFINITY;
    for s in &sorted {
        m = m.max(s.k);
        prefix.push(m);
    }
    let mut sups = Vec::new();
    let mut eps = eta;
    loop {
        let n = sorted.partition_point(|s| s.r <= eps);
        if n == 0 {
            break;
        }
        sups.push(prefix[n - 1]);
        eps *= 0.5;
    }
    sups
}

/// Verdict and `C_0 = min K`.
pub fn ndc_check(samples: &[KSample], eta: f64, threshold: f64) -> (NdcVerdict, f64) {
    let c0 = samples.iter().map(|s| s.k).fold(f64::INFINITY, f64::min);
    let sups = dyadic_sups(samples, eta);
    let decaying = sups.len() >= DECAY_WINDOWS
        && sups[sups.len() - DECAY_WINDOWS..]
            .windows(2)
            .all(|p| p[1] <= (1.0 - DECAY_STEP) * p[0]);
    let last = sups.last().copied().unwrap_or(f64::INFINITY);
    let verdict = if decaying && last < threshold {
        NdcVerdict::ViolatedLimsupZero
    } else if c0 >= threshold && last >= threshold && !decaying {
        NdcVerdict::Satisfied
    } else {
        NdcVerdict::Inconclusive
    };
    (verdict, c0)
}

/// Least-squares slope of `ln K` against `ln r` over the lowest `decades`
/// decades of the sampled range.
pub fn fit_power_law(samples: &[KSample], decades: f64) -> Option<f64> {
    let r_lo = samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let cut = r_lo * 10f64.powf(decades);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.r <= cut)
        .map(|s| (s.r.ln(), s.k.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteOrder {
    Detected,
    NotDetected,
    /// The order grows but the grid tail is too short to reach `m_max`.
    Inconclusive,
}

/// `(r_m, m)` with `w(r_m) <= r_m^m` (resp. `w(r_m) >= r_m^-m`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub m: u32,
    pub r_m: f64,
}

/// Order `e(r)` with `w(r) = r^e(r)` (vanishing) or `w(r) = r^-e(r)` (blow-up); `r < 1`.
fn order(family: &Family, class: WeightClass, r: f64) -> Result<f64> {
    let lw = family.ln_value(r)?;
    Ok(match class {
        WeightClass::W0 => lw / r.ln(),
        _ => lw / -r.ln(),
    })
}

pub fn infinite_order_detect(
    spec: &WeightSpec,
    class: WeightClass,
    grid: &Grid,
    m_max: u32,
) -> Result<(InfiniteOrder, Vec<Witness>)> {
    if !class.is_rearrangeable() {
        return Err(Error::UnsupportedClass(class));
    }
    let pts: Vec<f64> = grid.points().iter().copied().filter(|&r| r < 1.0).collect();
    let orders: Vec<f64> = pts
        .iter()
        .map(|&r| order(&spec.family, class, r))
        .collect::<Result<_>>()?;
    let mut witness = Vec::new();
    let mut bound = 1.0;
    for m in 1..=m_max {
        let hit = (0..pts.len())
            .rev()
            .find(|&i| pts[i] < bound && orders[i] >= m as f64);
        match hit {
            Some(i) => {
                witness.push(Witness { m, r_m: pts[i] });
                bound = pts[i];
            }
            None => break,
        }
    }
    let r_min = grid.r_min();
    let growing = 100.0 * r_min < 1.0 && {
        let e_lo = order(&spec.family, class, r_min)?;
        let e_hi = order(&spec.family, class, 100.0 * r_min)?;
        e_lo > 2.0 * e_hi.max(0.5)
    };
    let status = match (growing, witness.len() == m_max as usize) {
        (true, true) => InfiniteOrder::Detected,
        (true, false) => InfiniteOrder::Inconclusive,
        (false, _) => InfiniteOrder::NotDetected,
    };
    Ok((status, witness))
}

/// Everything the `ndc` command reports.
#[derive(Clone, Debug, Serialize)]
pub struct NdcReport {
    #[serde(rename = "C0")]
    pub c0: f64,
    pub verdict: NdcVerdict,
    pub fitted_alpha: Option<f64>,
    pub infinite_order: bool,
    pub infinite_order_status: InfiniteOrder,
    pub witness: Vec<Witness>,
    pub n_samples: usize,
    pub n_flagged: usize,
    #[serde(skip)]
    pub k_samples: Vec<KSample>,
}

impl NdcReport {
    pub fn compute(
        spec: &WeightSpec,
        env: &EnvelopeResult,
        class: WeightClass,
        threshold: f64,
        m_max: u32,
    ) -> Result<Self> {
        let profile = k_profile(spec, env)?;
        let (verdict, c0) = ndc_check(&profile.samples, env.grid().eta(), threshold);
        let (status, witness) = infinite_order_detect(spec, class, env.grid(), m_max)?;
        Ok(NdcReport {
            c0,
            verdict,
            fitted_alpha: fit_power_law(&profile.samples, 2.0),
            infinite_order: status == InfiniteOrder::Detected,
            infinite_order_status: status,
            witness,
            n_samples: profile.samples.len(),
            n_flagged: profile.n_flagged,
            k_samples: profile.samples,
        })
    }
}

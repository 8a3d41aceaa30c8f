use serde::{Deserialize, Serialize};

use super::leaders::LeaderField;
use crate::capacity::diagnostics::holder_exponents;
use crate::capacity::scaling::{default_level, h_of_r, legendre_transform, scaling_function};
use crate::capacity::{CapacityModel, ScalingTable};
use crate::error::{Error, Result};
use crate::numeric::{log2_sum_pow, ls_slope};

/// Levels with fewer nonzero leaders flag an estimate as low-confidence.
pub const MIN_LEADERS_PER_LEVEL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    LeaderLegendre,
    LeaderHistogram,
}

/// Estimated singularity spectrum on `h_grid`; `-∞` marks empty estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub method: SpectrumMethod,
    pub h_grid: Vec<f64>,
    pub sigma: Vec<f64>,
    pub window: (u32, u32),
    pub dim: usize,
    pub low_confidence: bool,
    /// Leader scaling function `ζ(q)` with `Σ_λ L_λ^q ≈ 2^{-j(ζ(q) − d)}`,
    /// so that `σ(h) = d + min_q (qh − ζ(q))`.
    pub q_grid: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl SpectrumEstimate {
    /// `(h, σ)` at the largest finite value.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.h_grid
            .iter()
            .zip(&self.sigma)
            .filter(|(_, s)| s.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(h, s)| (*h, *s))
    }
}

/// `[6, J − 2]`, shrunk to fit shallow fields.
pub fn default_window(max_level: u32) -> (u32, u32) {
    let hi = max_level.saturating_sub(2).max(2);
    (6.min(hi - 1), hi)
}

fn check(lf: &LeaderField, window: (u32, u32)) -> Result<()> {
    lf.check_window(window.0, window.1)
}

fn nonzero_logs(lf: &LeaderField, j: u32) -> Vec<f64> {
    lf.level(j).iter().filter(|v| **v > 0.0).map(|v| v.log2()).collect()
}

/// Leader multifractal formalism: structure functions over nonzero leaders,
/// least-squares scaling exponents over the window, then a Legendre transform.
pub fn leader_spectrum(
    lf: &LeaderField,
    q_grid: &[f64],
    h_grid: &[f64],
    window: (u32, u32),
) -> Result<SpectrumEstimate> {
    check(lf, window)?;
    if q_grid.len() < 3 || q_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("q grid needs at least three increasing values".into()));
    }
    let levels: Vec<u32> = (window.0..=window.1).collect();
    let logs: Vec<Vec<f64>> = levels.iter().map(|&j| nonzero_logs(lf, j)).collect();
    let low_confidence = logs.iter().any(|l| l.len() < MIN_LEADERS_PER_LEVEL);
    if logs.iter().any(Vec::is_empty) {
        return Err(Error::Domain("a level of the fit window has no nonzero leader".into()));
    }
    let dim = lf.dim() as f64;
    let xs: Vec<f64> = levels.iter().map(|&j| -(j as f64)).collect();
    let tau: Vec<f64> = q_grid
        .iter()
        .map(|&q| {
            let ys: Vec<f64> = logs.iter().map(|l| log2_sum_pow(l, q)).collect();
            ls_slope(&xs, &ys)
        })
        .collect();
    // reuse the capacity Legendre machinery on τ = ζ − d
    let table = ScalingTable {
        q_grid: q_grid.to_vec(),
        deriv: differences(q_grid, &tau),
        tau: tau.clone(),
        level_used: window.1,
        legendre: Vec::new(),
        dim: lf.dim(),
    };
    let sigma = legendre_transform(&table, h_grid);
    Ok(SpectrumEstimate {
        method: SpectrumMethod::LeaderLegendre,
        h_grid: h_grid.to_vec(),
        sigma,
        window,
        dim: lf.dim(),
        low_confidence,
        q_grid: q_grid.to_vec(),
        zeta: tau.iter().map(|t| t + dim).collect(),
    })
}

fn differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

/// Large-deviation counting: `σ̂(h)` is the slope in `j` of
/// `log₂ #{λ ∈ Λ_j : −log₂ L_λ / j ∈ [h − δ, h + δ)}`, `δ` the half-step of
/// `h_grid`. Levels with an empty bin are skipped; fewer than two usable
/// levels give `-∞`.
pub fn histogram_spectrum(lf: &LeaderField, h_grid: &[f64], window: (u32, u32)) -> Result<SpectrumEstimate> {
    check(lf, window)?;
    if h_grid.len() < 2 || h_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("h grid needs at least two increasing values".into()));
    }
    let delta = 0.5 * (h_grid[1] - h_grid[0]);
    let levels: Vec<u32> = (window.0..=window.1).collect();
    let mut low_confidence = false;
    let exps: Vec<Vec<f64>> = levels
        .iter()
        .map(|&j| {
            let l = nonzero_logs(lf, j);
            low_confidence |= l.len() < MIN_LEADERS_PER_LEVEL;
            let mut e: Vec<f64> = l.iter().map(|v| -v / j as f64).collect();
            e.sort_by(f64::total_cmp);
            e
        })
        .collect();
    let sigma = h_grid
        .iter()
        .map(|&h| {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (j, e) in levels.iter().zip(&exps) {
                let count = e.partition_point(|v| *v < h + delta) - e.partition_point(|v| *v < h - delta);
                if count > 0 {
                    xs.push(*j as f64);
                    ys.push((count as f64).log2());
                }
            }
            if xs.len() < 2 {
                f64::NEG_INFINITY
            } else {
                ls_slope(&xs, &ys)
            }
        })
        .collect();
    Ok(SpectrumEstimate {
        method: SpectrumMethod::LeaderHistogram,
        h_grid: h_grid.to_vec(),
        sigma,
        window,
        dim: lf.dim(),
        low_confidence,
        q_grid: Vec::new(),
        zeta: Vec::new(),
    })
}

/// Which `ν` exponent shifts the spectrum of `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    /// `h_ν^min`, the bound valid for every `a`.
    Min,
    /// `h_ν^r = τ_ν′(r)`, for `ν_r`-typical `a`.
    R(f64),
}

/// `σ_μ(h − shift)` and the upper bound with its `d` plateau past `h_μ⁰ + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedCurve {
    pub shift: f64,
    /// `(h_μ⁰ + shift, σ_μ(h_μ⁰))`.
    pub peak: (f64, f64),
    /// `(τ_μ′(q) + shift, τ_μ*(τ_μ′(q)))` over the q grid, deduplicated.
    pub points: Vec<(f64, f64)>,
    pub dim: usize,
    table: ScalingTable,
}

impl PredictedCurve {
    /// `σ_μ(h − shift)`; `-∞` outside the shifted support.
    pub fn sigma(&self, h: f64) -> f64 {
        legendre_transform(&self.table, &[h - self.shift])[0]
    }

    /// The upper bound: `σ_μ(h − shift)` up to the peak, `d` beyond.
    pub fn upper_bound(&self, h: f64) -> f64 {
        if h <= self.peak.0 {
            self.sigma(h)
        } else {
            self.dim as f64
        }
    }

    /// Shifted support `[h_min, h_max]` of `σ_μ`.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.table.h_extremes();
        (lo + self.shift, hi + self.shift)
    }
}

/// `ν` exponent for a shift choice.
pub fn shift_value(nu: &CapacityModel, shift: Shift) -> Result<f64> {
    let level = default_level(nu);
    match shift {
        Shift::Min => Ok(holder_exponents(nu, level)?.0),
        Shift::R(r) => h_of_r(nu, r, level),
    }
}

/// Level for the μ table of a predicted curve: at most `2^14` cubes.
fn curve_level(mu: &CapacityModel) -> u32 {
    default_level(mu).min((14 / mu.dim() as u32).max(1))
}

pub fn predicted_curves(mu: &CapacityModel, nu: &CapacityModel, shift: Shift, q_grid: &[f64]) -> Result<PredictedCurve> {
    let shift = shift_value(nu, shift)?;
    let level = curve_level(mu);
    let table = scaling_function(mu, q_grid, level)?;
    let h0 = h_of_r(mu, 0.0, level)?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &(h, s) in &table.legendre {
        if s.is_finite() && points.last().is_none_or(|p| (p.0 - (h + shift)).abs() > 1e-9) {
            points.push((h + shift, s));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9);
    let peak_sigma = legendre_transform(&table, &[h0])[0];
    Ok(PredictedCurve { shift, peak: (h0 + shift, peak_sigma), points, dim: mu.dim(), table })
}

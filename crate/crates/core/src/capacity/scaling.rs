use serde::{Deserialize, Serialize};

use super::CapacityModel;
use crate::error::{Error, Result};
use crate::numeric::{arange, group_counts, log2_sum_pow, log2_sum_pow_grouped};

/// Step used for central differences of τ when a table is built around a single exponent.
pub const DERIVATIVE_STEP: f64 = 1e-2;

const H_TOL: f64 = 1e-9;

/// Sampled scaling function of a capacity at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub q_grid: Vec<f64>,
    pub tau: Vec<f64>,
    pub level_used: u32,
    /// Central differences; one-sided at the grid ends.
    pub deriv: Vec<f64>,
    /// `(h, τ*(h))` with `h` running over `deriv`.
    pub legendre: Vec<(f64, f64)>,
    pub dim: usize,
}

/// `τ(q) = -(1/j) log₂ Σ_λ mass(λ)^q` over `Λ_j^D` for each `q`, with `0^q = 0`.
pub fn scaling_function(model: &CapacityModel, q_grid: &[f64], level: u32) -> Result<ScalingTable> {
    if level == 0 {
        return Err(Error::Domain("scaling function needs level ≥ 1".into()));
    }
    if q_grid.is_empty() {
        return Err(Error::Domain("empty q grid".into()));
    }
    if q_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("q grid must be strictly increasing".into()));
    }
    let logs = model.level_log2_masses(level)?;
    let j = level as f64;
    // long grids over big levels: sorting once beats one pass per q when
    // masses repeat, as they do for cascades and their products
    let tau: Vec<f64> = if q_grid.len() >= 8 && logs.len() >= 1 << 16 {
        let groups = group_counts(&logs);
        q_grid.iter().map(|&q| -log2_sum_pow_grouped(&groups, q) / j).collect()
    } else {
        q_grid.iter().map(|&q| -log2_sum_pow(&logs, q) / j).collect()
    };
    let deriv = central_differences(q_grid, &tau);
    let mut table = ScalingTable {
        q_grid: q_grid.to_vec(),
        tau,
        level_used: level,
        deriv,
        legendre: Vec::new(),
        dim: model.dim(),
    };
    let hs = table.deriv.clone();
    let vals = legendre_transform(&table, &hs);
    table.legendre = hs.into_iter().zip(vals).collect();
    Ok(table)
}

fn central_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![f64::NAN; n];
    }
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

/// `τ*(h) = min_q (hq − τ(q))` over the table's grid.
///
/// Returns `-inf` for `h` outside `[min τ′, max τ′]` and for values below `-D`.
pub fn legendre_transform(table: &ScalingTable, h_grid: &[f64]) -> Vec<f64> {
    let lo = table.deriv.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = table.deriv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dim = table.dim as f64;
    h_grid
        .iter()
        .map(|&h| {
            if !(h >= lo - H_TOL && h <= hi + H_TOL) {
                return f64::NEG_INFINITY;
            }
            let v = table
                .q_grid
                .iter()
                .zip(&table.tau)
                .map(|(q, t)| h * q - t)
                .fold(f64::INFINITY, f64::min);
            if v < -dim {
                f64::NEG_INFINITY
            } else {
                v
            }
        })
        .collect()
}

impl ScalingTable {
    fn node(&self, q: f64) -> Option<usize> {
        self.q_grid.iter().position(|&g| (g - q).abs() <= 1e-12 * q.abs().max(1.0))
    }

    fn check_range(&self, r: f64) -> Result<()> {
        let (lo, hi) = (self.q_grid[0], *self.q_grid.last().unwrap());
        if !(r >= lo && r <= hi) {
            return Err(Error::Range(format!("exponent {r} outside q grid [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let i = self.q_grid.partition_point(|&g| g <= r).clamp(1, self.q_grid.len() - 1);
        let (q0, q1) = (self.q_grid[i - 1], self.q_grid[i]);
        let t = (r - q0) / (q1 - q0);
        values[i - 1] * (1.0 - t) + values[i] * t
    }

    /// τ at `r` (grid value, or linear interpolation between nodes).
    pub fn tau_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        Ok(match self.node(r) {
            Some(i) => self.tau[i],
            None => self.interpolate(&self.tau, r),
        })
    }

    /// `h^r = τ′(r)` from the table's differences.
    pub fn h_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        Ok(match self.node(r) {
            Some(i) => self.deriv[i],
            None => self.interpolate(&self.deriv, r),
        })
    }

    /// `dim(ν_r) = r h^r − τ(r)`.
    pub fn dim_aux_at(&self, r: f64) -> Result<f64> {
        Ok(r * self.h_at(r)? - self.tau_at(r)?)
    }

    /// Approximations of `h^{+∞}` and `h^{-∞}` by τ′ at the grid ends.
    pub fn h_extremes(&self) -> (f64, f64) {
        (*self.deriv.last().unwrap(), self.deriv[0])
    }

    /// Largest interior second difference (≤ 0 up to rounding for concave τ).
    pub fn max_second_difference(&self) -> f64 {
        self.tau.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Three-point table `{r − δ, r, r + δ}` at `level`.
pub fn local_table(model: &CapacityModel, r: f64, level: u32) -> Result<ScalingTable> {
    scaling_function(model, &[r - DERIVATIVE_STEP, r, r + DERIVATIVE_STEP], level)
}

/// `(τ(r), τ′(r))` of a cascade with child weights `w`, exact at every
/// level: `τ = −log₂ Σ w^r`, `τ′ = −Σ w^r log₂ w / Σ w^r`, zero weights left out.
fn cascade_exponents(w: &[f64], r: f64) -> (f64, f64) {
    let (mut z, mut m) = (0.0, 0.0);
    for &wi in w.iter().filter(|v| **v > 0.0) {
        let p = wi.powf(r);
        z += p;
        m += p * wi.log2();
    }
    (-z.log2(), -m / z)
}

/// `h^r = τ′(r)`: exact for cascades, a central difference at `level` otherwise.
pub fn h_of_r(model: &CapacityModel, r: f64, level: u32) -> Result<f64> {
    if let Some(w) = model.cascade_weights() {
        return Ok(cascade_exponents(w, r).1);
    }
    local_table(model, r, level)?.h_at(r)
}

/// `dim(ν_r) = r τ′(r) − τ(r)`, exact for cascades as in [`h_of_r`].
pub fn dim_aux(model: &CapacityModel, r: f64, level: u32) -> Result<f64> {
    if let Some(w) = model.cascade_weights() {
        let (tau, h) = cascade_exponents(w, r);
        return Ok(r * h - tau);
    }
    local_table(model, r, level)?.dim_aux_at(r)
}

/// Default exponent grid `[-5, 5]` with step `0.01`.
pub fn default_q_grid() -> Vec<f64> {
    arange(-5.0, 5.0, DERIVATIVE_STEP).into_iter().map(|q| (q * 100.0).round() / 100.0).collect()
}

/// Default level at which a model's scaling quantities are evaluated: the
/// configured depth when finite, otherwise the largest level with at most
/// `2^20` cubes.
pub fn default_level(model: &CapacityModel) -> u32 {
    let cap = (20 / model.dim() as u32).max(1);
    model.max_depth().map_or(cap, |d| d.min(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn binomial_tau(p: f64, q: f64) -> f64 {
        -(p.powf(q) + (1.0 - p).powf(q)).log2()
    }

    #[test]
    fn binomial_tau_matches_closed_form() {
        let m = CapacityModel::binomial(0.25).unwrap();
        let grid = arange(-5.0, 5.0, 0.25);
        let t = scaling_function(&m, &grid, 10).unwrap();
        for (q, tau) in grid.iter().zip(&t.tau) {
            assert!((tau - binomial_tau(0.25, *q)).abs() < 1e-10);
        }
        assert_relative_eq!(t.tau_at(2.0).unwrap(), 0.678072, epsilon = 1e-6);
        assert!(t.tau_at(1.0).unwrap().abs() < 1e-12);
        assert!((t.tau_at(0.0).unwrap() + 1.0).abs() < 1e-12);
        assert!(t.max_second_difference() < 1e-12);
    }

    #[test]
    fn lebesgue_tau_is_affine() {
        let m = CapacityModel::lebesgue(1);
        let t = scaling_function(&m, &arange(-3.0, 3.0, 0.5), 8).unwrap();
        for (q, tau) in t.q_grid.iter().zip(&t.tau) {
            assert!((tau - (q - 1.0)).abs() < 1e-12);
        }
        let v = legendre_transform(&t, &[1.0, 0.5]);
        assert!((v[0] - 1.0).abs() < 1e-9);
        assert_eq!(v[1], f64::NEG_INFINITY);
    }

    #[test]
    fn derivative_and_legendre_at_two() {
        let m = CapacityModel::binomial(0.25).unwrap();
        let h = h_of_r(&m, 2.0, 8).unwrap();
        assert!((h - 0.573536).abs() < 1e-4);
        let d = dim_aux(&m, 2.0, 8).unwrap();
        assert!((d - 0.469000).abs() < 1e-4);
    }

    #[test]
    fn h_zero_closed_form() {
        let m = CapacityModel::binomial(0.3).unwrap();
        let h = h_of_r(&m, 0.0, 6).unwrap();
        let exact = (-(0.3f64).ln() - (0.7f64).ln()) / (2.0 * std::f64::consts::LN_2);
        assert!((h - exact).abs() < 1e-4);
        assert!((h - 1.125767).abs() < 1e-4);
        assert!((dim_aux(&m, 0.0, 6).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_exponents_match_differences() {
        let m = CapacityModel::binomial(0.3).unwrap();
        for r in [-2.0, 0.0, 1.5] {
            let t = local_table(&m, r, 10).unwrap();
            assert!((h_of_r(&m, r, 10).unwrap() - t.h_at(r).unwrap()).abs() < 1e-3);
            assert!((dim_aux(&m, r, 10).unwrap() - t.dim_aux_at(r).unwrap()).abs() < 1e-3);
        }
        assert_eq!(h_of_r(&CapacityModel::lebesgue(1), 0.0, 8).unwrap(), 1.0);
        assert_eq!(h_of_r(&CapacityModel::lebesgue(2), 0.7, 8).unwrap(), 2.0);
    }

    #[test]
    fn power_rule() {
        let nu = CapacityModel::binomial(0.3).unwrap();
        let s = 1.7;
        let pw = CapacityModel::power(nu.clone(), s).unwrap();
        let grid = arange(-2.0, 2.0, 0.5);
        let scaled: Vec<f64> = grid.iter().map(|t| s * t).collect();
        let a = scaling_function(&pw, &grid, 9).unwrap();
        let b = scaling_function(&nu, &scaled, 9).unwrap();
        for (x, y) in a.tau.iter().zip(&b.tau) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn out_of_range_exponent() {
        let m = CapacityModel::binomial(0.3).unwrap();
        let t = scaling_function(&m, &[-1.0, 0.0, 1.0], 4).unwrap();
        assert!(matches!(t.h_at(3.0), Err(Error::Range(_))));
    }
}

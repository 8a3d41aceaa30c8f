use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CapacityModel;
use crate::dyadic::{self, DyadicCube};
use crate::error::{Error, Result};
use crate::numeric::ls_slope;

/// Exhaustive scans stop at levels with more than `2^SCAN_LOG2_CAP` cubes.
pub const SCAN_LOG2_CAP: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `max ξ(3λ) / ξ(λ)` with `ξ(3λ)` the summed mass of the clipped neighborhood.
    pub doubling: f64,
    /// `max` of `ξ(λλ′)/(ξ(λ)ξ(λ′))` and its inverse over concatenations.
    pub quasi_bernoulli: f64,
    pub s1: f64,
    pub s2: f64,
    /// Deepest level actually scanned for the two constants.
    pub scan_level: u32,
}

fn scan_cap(dim: usize) -> u32 {
    (SCAN_LOG2_CAP / dim as u32).max(1)
}

/// Least-squares slopes of `log₂ max mass` and `log₂ min positive mass`
/// against `-j` over levels `1..=level`: the exponents `s₁ ≤ s₂` of the
/// two-sided Hölder bound.
pub fn holder_exponents(model: &CapacityModel, level: u32) -> Result<(f64, f64)> {
    let top = model.max_depth().map_or(level, |d| d.min(level));
    if top < 2 {
        return Err(Error::Domain("Hölder exponent fit needs at least two levels".into()));
    }
    let mut xs = Vec::new();
    let (mut hi, mut lo) = (Vec::new(), Vec::new());
    for j in 1..=top {
        let (min, max) = model.level_extremes(j)?;
        xs.push(-(j as f64));
        hi.push(max.log2());
        lo.push(min.log2());
    }
    Ok((ls_slope(&xs, &hi), ls_slope(&xs, &lo)))
}

/// Doubling and quasi-Bernoulli constants by exhaustive scan, plus `s₁, s₂`.
pub fn diagnostics(model: &CapacityModel, level: u32) -> Result<Diagnostics> {
    let dim = model.dim();
    let top = model.max_depth().map_or(level, |d| d.min(level));
    let scan_level = top.min(scan_cap(dim));
    let (s1, s2) = holder_exponents(model, top)?;
    Ok(Diagnostics {
        doubling: doubling_constant(model, scan_level)?,
        quasi_bernoulli: quasi_bernoulli_constant(model, scan_level)?,
        s1,
        s2,
        scan_level,
    })
}

fn doubling_constant(model: &CapacityModel, top: u32) -> Result<f64> {
    let dim = model.dim();
    let mut worst: f64 = 1.0;
    for j in 1..=top {
        let masses = model.level_masses(j)?;
        let w = (0..masses.len())
            .into_par_iter()
            .filter(|&lin| masses[lin] > 0.0)
            .map(|lin| {
                let c = DyadicCube::from_linear(dim, j, lin);
                let big: f64 = c.neighborhood(3).unwrap().iter().map(|n| masses[n.linear_index()]).sum();
                big / masses[lin]
            })
            .reduce(|| 1.0, f64::max);
        worst = worst.max(w);
    }
    Ok(worst)
}

fn quasi_bernoulli_constant(model: &CapacityModel, top: u32) -> Result<f64> {
    let dim = model.dim();
    let levels: Vec<Vec<f64>> = (0..=top).map(|j| model.level_masses(j)).collect::<Result<_>>()?;
    let mut worst: f64 = 1.0;
    for total in 2..=top {
        let fine = &levels[total as usize];
        for j1 in 1..total {
            let j2 = total - j1;
            let (head, tail) = (&levels[j1 as usize], &levels[j2 as usize]);
            let w = (0..fine.len())
                .into_par_iter()
                .map(|lin| {
                    let mut idx = vec![0u32; dim];
                    dyadic::unravel(total, lin, &mut idx);
                    let h: Vec<u32> = idx.iter().map(|k| k >> j2).collect();
                    let t: Vec<u32> = idx.iter().map(|k| k & ((1u32 << j2) - 1)).collect();
                    let prod = head[dyadic::linear_index(j1, &h)] * tail[dyadic::linear_index(j2, &t)];
                    let m = fine[lin];
                    if m == 0.0 && prod == 0.0 {
                        1.0
                    } else if m == 0.0 || prod == 0.0 {
                        f64::INFINITY
                    } else {
                        (m / prod).max(prod / m)
                    }
                })
                .reduce(|| 1.0, f64::max);
            worst = worst.max(w);
        }
    }
    Ok(worst)
}

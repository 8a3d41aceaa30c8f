use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scaling::{dim_aux, h_of_r};
use super::CapacityModel;
use crate::dyadic::{self, cube_containing, DyadicCube};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetLevel {
    pub level: u32,
    pub violators: usize,
    /// ν_r-mass of the violating cubes themselves.
    pub violator_aux_mass: f64,
    /// ν_r-mass of the finest-level cubes never exposed at levels `level..=j_max`.
    pub good_aux_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetReport {
    pub n: u32,
    pub m: u32,
    pub r: f64,
    pub k: u32,
    pub h_r: f64,
    pub dim_aux: f64,
    pub levels: Vec<GoodSetLevel>,
    /// Smallest `J` with `ν_r(A_J) ≥ 1 − 1/n`, if any level in range reaches it.
    pub j_nm: Option<u32>,
}

/// Mass sandwiches of the good-set construction.
#[derive(Debug, Clone)]
pub struct MassBands {
    pub h_r: f64,
    pub dim_aux: f64,
    pub m: u32,
}

impl MassBands {
    fn within(value: f64, exponent: f64, m: u32, level: u32) -> bool {
        let j = level as f64;
        let slack = 1.0 / m as f64;
        let lo = (-j * (exponent + slack)).exp2();
        let hi = (-j * (exponent - slack)).exp2();
        value >= lo && value <= hi
    }

    /// True when `ν(λ)` or `ν_r(λ)` leaves its band.
    pub fn violates(&self, level: u32, nu_mass: f64, aux_mass: f64) -> bool {
        !Self::within(nu_mass, self.h_r, self.m, level) || !Self::within(aux_mass, self.dim_aux, self.m, level)
    }
}

/// Per-level violation counts and the exact ν_r-mass of the good set.
///
/// `base` must be a cascade or Gibbs model; `levels` is the inclusive range
/// scanned, whose top level is also the resolution at which `A_J` is measured.
pub fn good_set_report(
    base: &CapacityModel,
    r: f64,
    n: u32,
    m: u32,
    k: u32,
    levels: (u32, u32),
) -> Result<GoodSetReport> {
    let (j_lo, j_hi) = levels;
    if n == 0 || m == 0 || k == 0 {
        return Err(Error::Domain("n, m and K must be positive".into()));
    }
    if j_lo == 0 || j_lo > j_hi {
        return Err(Error::Domain(format!("bad level range [{j_lo}, {j_hi}]")));
    }
    let dim = base.dim();
    if dim as u32 * j_hi > 26 {
        return Err(Error::Range(format!("good-set scan to level {j_hi} in dimension {dim} is too large")));
    }
    base.check_level(j_hi)?;
    let aux = base.auxiliary(r)?;
    let h_r = h_of_r(base, r, j_hi)?;
    let dim_r = dim_aux(base, r, j_hi)?;
    let bands = MassBands { h_r, dim_aux: dim_r, m };

    let finest_aux = aux.level_masses(j_hi)?;
    let mut bad = vec![false; finest_aux.len()];
    let radius = k / 2;
    let mut out = Vec::new();
    for j in (j_lo..=j_hi).rev() {
        let nu = base.level_masses(j)?;
        let nr = aux.level_masses(j)?;
        let viol: Vec<bool> =
            nu.par_iter().zip(nr.par_iter()).map(|(&a, &b)| bands.violates(j, a, b)).collect();
        let violators = viol.iter().filter(|v| **v).count();
        let violator_aux_mass: f64 = viol.iter().zip(&nr).filter(|(v, _)| **v).map(|(_, m)| m).sum();

        let exposed = dilate(&viol, dim, j, radius);
        let shift = j_hi - j;
        bad.par_iter_mut().enumerate().for_each(|(lin, b)| {
            if !*b {
                let mut idx = vec![0u32; dim];
                dyadic::unravel(j_hi, lin, &mut idx);
                for v in idx.iter_mut() {
                    *v >>= shift;
                }
                *b = exposed[dyadic::linear_index(j, &idx)];
            }
        });
        let good_aux_mass: f64 =
            bad.par_iter().zip(finest_aux.par_iter()).filter(|(b, _)| !**b).map(|(_, m)| *m).sum();
        out.push(GoodSetLevel { level: j, violators, violator_aux_mass, good_aux_mass });
    }
    out.reverse();
    let target = 1.0 - 1.0 / n as f64;
    let j_nm = out.iter().find(|l| l.good_aux_mass >= target).map(|l| l.level);
    Ok(GoodSetReport { n, m, r, k, h_r, dim_aux: dim_r, levels: out, j_nm })
}

/// Cubes within sup-distance `radius` (in cubes) of a flagged cube.
fn dilate(flags: &[bool], dim: usize, level: u32, radius: u32) -> Vec<bool> {
    if radius == 0 || !flags.iter().any(|f| *f) {
        return flags.to_vec();
    }
    let mut out = vec![false; flags.len()];
    let n = 2 * radius + 1;
    for (lin, _) in flags.iter().enumerate().filter(|(_, f)| **f) {
        let c = DyadicCube::from_linear(dim, level, lin);
        for nb in c.neighborhood(n).expect("odd factor") {
            out[nb.linear_index()] = true;
        }
    }
    out
}

/// Whether `a` stays clear of violators at every level in `levels`: no cube
/// of the `K`-neighborhood of `λ_j(a)` violates the mass bands.
pub fn point_is_good(
    base: &CapacityModel,
    aux: &CapacityModel,
    bands: &MassBands,
    k: u32,
    a: &[f64],
    levels: (u32, u32),
) -> Result<bool> {
    let finest = cube_containing(a, levels.1)?;
    let factor = 2 * (k / 2) + 1;
    for j in levels.0..=levels.1 {
        let c = finest.ancestor(j).expect("range below finest level");
        for nb in c.neighborhood(factor)? {
            let nu = base.mass_unchecked(j, nb.index());
            let nr = aux.mass_unchecked(j, nb.index());
            if bands.violates(j, nu, nr) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_coeff(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn lebesgue_has_no_violators() {
        let rep = good_set_report(&CapacityModel::lebesgue(1), 0.7, 4, 3, 3, (2, 12)).unwrap();
        assert!(rep.levels.iter().all(|l| l.violators == 0));
        assert_eq!(rep.j_nm, Some(2));
    }

    #[test]
    fn binomial_violator_mass_matches_binomial_tail() {
        let nu = CapacityModel::binomial(0.25).unwrap();
        let rep = good_set_report(&nu, 0.0, 4, 4, 3, (10, 16)).unwrap();
        let at16 = rep.levels.iter().find(|l| l.level == 16).unwrap();
        // ν₀ is Lebesgue; a cube with z zero-digits has exponent (2z + (16−z)·(−log₂0.75))/16
        let h0 = (2.0 - 0.75f64.log2()) / 2.0;
        let mut tail = 0.0;
        for z in 0..=16u64 {
            let e = (2.0 * z as f64 - (16 - z) as f64 * 0.75f64.log2()) / 16.0;
            if (e - h0).abs() > 0.25 {
                tail += binomial_coeff(16, z) / 65536.0;
            }
        }
        assert!((at16.violator_aux_mass - tail).abs() < 1e-9, "{} vs {tail}", at16.violator_aux_mass);
        assert!((tail - 2.0 * 6885.0 / 65536.0).abs() < 1e-12);
    }

    #[test]
    fn violator_mass_decreases_with_level() {
        let nu = CapacityModel::binomial(0.25).unwrap();
        let rep = good_set_report(&nu, 1.0, 4, 4, 3, (10, 20)).unwrap();
        let v = |j| rep.levels.iter().find(|l| l.level == j).unwrap().violator_aux_mass;
        assert!(v(20) <= v(10), "{} > {}", v(20), v(10));
    }

    #[test]
    fn good_mass_is_monotone_in_j() {
        let nu = CapacityModel::binomial(0.3).unwrap();
        let rep = good_set_report(&nu, 0.5, 10, 2, 3, (4, 14)).unwrap();
        for w in rep.levels.windows(2) {
            assert!(w[0].good_aux_mass <= w[1].good_aux_mass + 1e-12);
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CapacityModel;
use crate::dyadic::{cube_containing, DyadicCube};
use crate::error::{Error, Result};
use crate::numeric::ls_slope;

/// Draw one point by descending `level` generations of the dyadic tree.
///
/// Returns the lower-left corner of the final cube.
pub fn sample_point(model: &CapacityModel, level: u32, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    descend(model, level, &mut rng)
}

/// `count` independent draws from one seeded stream.
pub fn sample_points(model: &CapacityModel, level: u32, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| descend(model, level, &mut rng)).collect()
}

fn descend<R: Rng>(model: &CapacityModel, level: u32, rng: &mut R) -> Result<Vec<f64>> {
    if level == 0 {
        return Err(Error::Domain("sampling needs at least one level".into()));
    }
    model.check_level(level)?;
    let dim = model.dim();
    let mut index = vec![0u32; dim];
    for j in 0..level {
        let masses = model.child_masses(j, &index);
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Sampling(format!("zero-mass cube reached at level {j}")));
        }
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pos = masses.len() - 1;
        for (i, m) in masses.iter().enumerate() {
            acc += m;
            if u < acc {
                pos = i;
                break;
            }
        }
        // guard against landing on a zero-mass tail through rounding
        while masses[pos] == 0.0 {
            pos -= 1;
        }
        for (i, k) in index.iter_mut().enumerate() {
            *k = 2 * *k + ((pos >> (dim - 1 - i)) & 1) as u32;
        }
    }
    let side = (-(level as f64)).exp2();
    Ok(index.iter().map(|&k| k as f64 * side).collect())
}

/// Two finite-scale surrogates of the lower local dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDimension {
    /// Least-squares slope of `log₂ mass(λ_j(x))` against `-j`.
    pub ls_slope: f64,
    /// Smallest `log₂ mass(λ_j(x)) / (-j)` over the window.
    pub min_slope: f64,
}

impl LocalDimension {
    pub const INFINITE: Self = Self { ls_slope: f64::INFINITY, min_slope: f64::INFINITY };
}

/// Local dimension estimates of `model` at `x` over levels `j_min..=j_max`.
pub fn local_dimension(model: &CapacityModel, x: &[f64], j_min: u32, j_max: u32) -> Result<LocalDimension> {
    slopes(model, x, j_min, j_max, |c| model.mass_unchecked(c.level(), c.index()))
}

/// As [`local_dimension`] with `mass(3λ_j(x))` in place of `mass(λ_j(x))`.
/// This is the ball version of the exponent; the two differ at dyadic
/// points, where a heavy neighbour dominates every ball around `x`.
pub fn local_dimension_3(model: &CapacityModel, x: &[f64], j_min: u32, j_max: u32) -> Result<LocalDimension> {
    slopes(model, x, j_min, j_max, |c| {
        c.neighborhood(3)
            .expect("3 is odd")
            .iter()
            .map(|n| model.mass_unchecked(n.level(), n.index()))
            .sum()
    })
}

fn slopes(
    model: &CapacityModel,
    x: &[f64],
    j_min: u32,
    j_max: u32,
    mass: impl Fn(&DyadicCube) -> f64,
) -> Result<LocalDimension> {
    if j_min >= j_max {
        return Err(Error::Domain(format!("empty level window [{j_min}, {j_max}]")));
    }
    model.check_level(j_max)?;
    let finest = cube_containing(x, j_max)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in j_min..=j_max {
        let m = mass(&finest.ancestor(j).expect("window below finest level"));
        if !(m > 0.0) {
            return Ok(LocalDimension::INFINITE);
        }
        xs.push(-(j as f64));
        ys.push(m.log2());
    }
    let min_slope = xs
        .iter()
        .zip(&ys)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, y)| y / x)
        .fold(f64::INFINITY, f64::min);
    Ok(LocalDimension { ls_slope: ls_slope(&xs, &ys), min_slope })
}

const LEVEL_SET_TOL: f64 = 1e-12;

/// Cubes of level `j` whose coarse exponent `log₂ mass / (-j)` lies in `[lo, hi]`.
pub fn level_set_cubes(model: &CapacityModel, level: u32, lo: f64, hi: f64) -> Result<Vec<DyadicCube>> {
    if level == 0 {
        return Err(Error::Domain("level sets need level ≥ 1".into()));
    }
    let logs = model.level_log2_masses(level)?;
    let j = level as f64;
    Ok(logs
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_finite())
        .filter(|(_, &l)| {
            let e = -l / j;
            e >= lo - LEVEL_SET_TOL && e <= hi + LEVEL_SET_TOL
        })
        .map(|(lin, _)| DyadicCube::from_linear(model.dim(), level, lin))
        .collect())
}

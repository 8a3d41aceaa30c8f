use rayon::prelude::*;

use crate::capacity::LocalDimension;
use crate::dyadic::{cube_containing, cubes_at_level, linear_index, unravel};
use crate::error::{Error, Result};
use crate::numeric::ls_slope;
use crate::synthesis::{CoefficientField, CoefficientSource};

/// Wavelet leaders `L_λ = sup{|c_λ'| : λ' ⊂ 3λ}` of a `d`-dimensional field.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderField {
    dim: usize,
    /// `levels[j][k]` in linear cube order.
    levels: Vec<Vec<f64>>,
}

/// Largest `|c|` over the orientations of each cube of a level.
fn level_magnitudes(f: &CoefficientField, level: u32) -> Vec<f64> {
    let per = f.orientations();
    f.level(level).par_chunks(per).map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect()
}

/// `out[k] = max over the clipped 3-neighborhood of `k` of `values`.
fn neighborhood_max(dim: usize, level: u32, values: &[f64]) -> Vec<f64> {
    let side = 1i64 << level;
    (0..values.len())
        .into_par_iter()
        .map_init(
            || (vec![0u32; dim], vec![0u32; dim]),
            |(idx, nb), lin| {
                unravel(level, lin, idx);
                let mut best = 0.0f64;
                // 3^dim offsets in {-1, 0, 1}^dim
                'offsets: for code in 0..3usize.pow(dim as u32) {
                    let mut c = code;
                    for i in (0..dim).rev() {
                        let v = idx[i] as i64 + (c % 3) as i64 - 1;
                        c /= 3;
                        if v < 0 || v >= side {
                            continue 'offsets;
                        }
                        nb[i] = v as u32;
                    }
                    best = best.max(values[linear_index(level, nb)]);
                }
                best
            },
        )
        .collect()
}

impl LeaderField {
    /// Bottom-up: subtree maxima `M(λ) = max(|c_λ|, max_children M)`, then
    /// `L_λ = max_{λ' ∈ 3λ} M(λ')`.
    pub fn from_field(f: &CoefficientField) -> Result<Self> {
        if !f.is_finite() {
            return Err(Error::Domain("field has non-finite coefficients".into()));
        }
        let dim = f.dim();
        let top = f.max_level();
        let mut levels = vec![Vec::new(); top as usize + 1];
        let mut below: Vec<f64> = Vec::new();
        for j in (0..=top).rev() {
            let mut m = level_magnitudes(f, j);
            if j < top {
                let nchild = 1usize << dim;
                m.par_iter_mut().enumerate().for_each_init(
                    || (vec![0u32; dim], vec![0u32; dim]),
                    |(idx, child), (lin, v)| {
                        unravel(j, lin, idx);
                        for pos in 0..nchild {
                            for i in 0..dim {
                                child[i] = 2 * idx[i] + ((pos >> (dim - 1 - i)) & 1) as u32;
                            }
                            *v = v.max(below[linear_index(j + 1, child)]);
                        }
                    },
                );
            }
            levels[j as usize] = neighborhood_max(dim, j, &m);
            below = m;
        }
        Ok(Self { dim, levels })
    }

    /// Direct enumeration of every `λ' ⊂ 3λ`; quadratic, for testing.
    pub fn brute_force(f: &CoefficientField) -> Self {
        let dim = f.dim();
        let top = f.max_level();
        let mut levels = Vec::with_capacity(top as usize + 1);
        let mut idx = vec![0u32; dim];
        let mut other = vec![0u32; dim];
        for j in 0..=top {
            let mut lv = vec![0.0; cubes_at_level(dim, j)];
            for (lin, out) in lv.iter_mut().enumerate() {
                unravel(j, lin, &mut idx);
                for jp in j..=top {
                    let shift = jp - j;
                    for lin2 in 0..cubes_at_level(dim, jp) {
                        unravel(jp, lin2, &mut other);
                        let inside = idx.iter().zip(&other).all(|(&k, &kp)| (((kp >> shift) as i64) - k as i64).abs() <= 1);
                        if inside {
                            for o in 1..=f.orientations() {
                                *out = f64::max(*out, f.get(jp, &other, o).abs());
                            }
                        }
                    }
                }
            }
            levels.push(lv);
        }
        Self { dim, levels }
    }

    /// Arbitrary per-level nonnegative values treated as leaders (e.g. masses).
    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        for (j, lv) in levels.iter().enumerate() {
            if lv.len() != cubes_at_level(dim, j as u32) {
                return Err(Error::Shape(format!("level {j} holds {} values", lv.len())));
            }
            if lv.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::Domain(format!("level {j} has negative or non-finite leaders")));
            }
        }
        Ok(Self { dim, levels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, j: u32) -> &[f64] {
        &self.levels[j as usize]
    }

    pub fn leader(&self, level: u32, index: &[u32]) -> f64 {
        self.levels[level as usize][linear_index(level, index)]
    }

    /// `L_{λ_j(x)}` for `j = j_min..=j_max`.
    pub fn path(&self, x: &[f64], j_min: u32, j_max: u32) -> Result<Vec<f64>> {
        self.check_window(j_min, j_max)?;
        let finest = cube_containing(x, j_max)?;
        Ok((j_min..=j_max)
            .map(|j| {
                let c = finest.ancestor(j).expect("window below finest level");
                self.leader(j, c.index())
            })
            .collect())
    }

    pub(crate) fn check_window(&self, j_min: u32, j_max: u32) -> Result<()> {
        if j_min >= j_max || j_max > self.max_level() {
            return Err(Error::Domain(format!(
                "level window [{j_min}, {j_max}] not inside [0, {}]",
                self.max_level()
            )));
        }
        Ok(())
    }
}

pub fn leaders(f: &CoefficientField) -> Result<LeaderField> {
    LeaderField::from_field(f)
}

/// Least-squares and minimum-chord slopes of `log₂ L_{λ_j(x)}` against `-j`.
/// A path touching a zero leader gives the `+∞` sentinel.
pub fn pointwise_exponent(lf: &LeaderField, x: &[f64], j_min: u32, j_max: u32) -> Result<LocalDimension> {
    if x.len() != lf.dim() {
        return Err(Error::Shape(format!("point of dimension {} for leaders in dimension {}", x.len(), lf.dim())));
    }
    let path = lf.path(x, j_min, j_max)?;
    if path.iter().any(|v| !(*v > 0.0)) {
        return Ok(LocalDimension::INFINITE);
    }
    let xs: Vec<f64> = (j_min..=j_max).map(|j| -(j as f64)).collect();
    let ys: Vec<f64> = path.iter().map(|v| v.log2()).collect();
    let min_slope = xs
        .iter()
        .zip(&ys)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, y)| y / x)
        .fold(f64::INFINITY, f64::min);
    Ok(LocalDimension { ls_slope: ls_slope(&xs, &ys), min_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_coefficient() {
        let mut f = CoefficientField::zeros(1, 6).unwrap();
        f.set(5, &[7], 1, 0.3);
        let lf = leaders(&f).unwrap();
        let c = cube_containing(&[0.21875], 3).unwrap();
        assert_eq!(lf.leader(3, c.index()), 0.3);
        assert_eq!(lf.leader(5, &[7]), 0.3);
        assert_eq!(lf.leader(5, &[9]), 0.0);
    }

    #[test]
    fn geometric_path() {
        let alpha = 0.7;
        let x = [0.3];
        let mut f = CoefficientField::zeros(1, 12).unwrap();
        for j in 0..=12u32 {
            let c = cube_containing(&x, j).unwrap();
            f.set(j, c.index(), 1, (-(j as f64) * alpha).exp2());
        }
        let lf = leaders(&f).unwrap();
        let path = lf.path(&x, 0, 12).unwrap();
        for (j, v) in path.iter().enumerate() {
            assert!((v - (-(j as f64) * alpha).exp2()).abs() < 1e-15);
        }
        let e = pointwise_exponent(&lf, &x, 2, 12).unwrap();
        assert!((e.ls_slope - alpha).abs() < 1e-12 && (e.min_slope - alpha).abs() < 1e-12);
        // scaling the field shifts log L by a constant
        let mut g = f.clone();
        for j in 0..=12u32 {
            g.level_mut(j).iter_mut().for_each(|v| *v *= 5.0);
        }
        let e5 = pointwise_exponent(&leaders(&g).unwrap(), &x, 2, 12).unwrap();
        assert!((e5.ls_slope - alpha).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 1..=2usize {
            for _ in 0..3 {
                let top = rng.gen_range(1..=if dim == 1 { 8 } else { 5 });
                let mut f = CoefficientField::zeros(dim, top).unwrap();
                for j in 0..=top {
                    for v in f.level_mut(j) {
                        if rng.gen_bool(0.3) {
                            *v = rng.gen_range(-1.0..1.0);
                        }
                    }
                }
                let a = leaders(&f).unwrap();
                let b = LeaderField::brute_force(&f);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn zero_path_is_infinite() {
        let f = CoefficientField::zeros(1, 6).unwrap();
        let e = pointwise_exponent(&leaders(&f).unwrap(), &[0.5], 1, 6).unwrap();
        assert_eq!(e, LocalDimension::INFINITE);
    }
}

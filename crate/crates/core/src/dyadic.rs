//! Dyadic cubes of `[0,1]^D`.
//!
//! A cube of level `j` is the half-open product `∏ [k_i 2^-j, (k_i+1) 2^-j)`.
//! Dense per-level arrays throughout the crate are laid out in lexicographic
//! order of the index vector, first coordinate most significant, which is
//! what [`DyadicCube::linear_index`] computes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest level a cube may have; keeps `k < 2^j` representable in `u32`.
pub const MAX_LEVEL: u32 = 31;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    level: u32,
    index: Vec<u32>,
}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u32>) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::Domain("cube must have dimension at least 1".into()));
        }
        if level > MAX_LEVEL {
            return Err(Error::Range(format!("level {level} exceeds {MAX_LEVEL}")));
        }
        let side = 1u64 << level;
        if let Some(k) = index.iter().find(|&&k| u64::from(k) >= side) {
            return Err(Error::Domain(format!("index {k} out of range at level {level}")));
        }
        Ok(Self { level, index })
    }

    /// The unit cube `[0,1)^dim`.
    pub fn root(dim: usize) -> Self {
        Self { level: 0, index: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u32] {
        &self.index
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Lower-left corner.
    pub fn corner(&self) -> Vec<f64> {
        let s = self.side();
        self.index.iter().map(|&k| k as f64 * s).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        self.index.iter().map(|&k| (k as f64 + 0.5) * s).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let s = self.side();
        self.index
            .iter()
            .zip(x)
            .all(|(&k, &xi)| xi >= k as f64 * s && xi < (k as f64 + 1.0) * s)
    }

    /// Position of the cube in the dense level array (row-major, first axis major).
    pub fn linear_index(&self) -> usize {
        linear_index(self.level, &self.index)
    }

    pub fn from_linear(dim: usize, level: u32, linear: usize) -> Self {
        let mut index = vec![0u32; dim];
        unravel(level, linear, &mut index);
        Self { level, index }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.level == 0 {
            return None;
        }
        Some(Self { level: self.level - 1, index: self.index.iter().map(|k| k >> 1).collect() })
    }

    /// The ancestor at `level` (the cube itself when `level` equals its own).
    pub fn ancestor(&self, level: u32) -> Option<Self> {
        if level > self.level {
            return None;
        }
        let shift = self.level - level;
        Some(Self { level, index: self.index.iter().map(|k| k >> shift).collect() })
    }

    /// The `2^D` cubes of the next level, in lexicographic index order.
    pub fn children(&self) -> Vec<Self> {
        let dim = self.dim();
        (0..1usize << dim)
            .map(|pos| {
                let index = self
                    .index
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| 2 * k + ((pos >> (dim - 1 - i)) & 1) as u32)
                    .collect();
                Self { level: self.level + 1, index }
            })
            .collect()
    }

    /// Position of this cube among its parent's children (`0..2^D`).
    pub fn child_position(&self) -> usize {
        child_position(&self.index, self.level, self.level)
    }

    /// Level-`j` cubes meeting `Nλ`, the cube with the same centre and `N` times
    /// the side, clipped to `[0,1]^D`. `N` must be odd.
    pub fn neighborhood(&self, n: u32) -> Result<Vec<Self>> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::Domain(format!("neighborhood factor must be odd and positive, got {n}")));
        }
        let r = (n / 2) as i64;
        let side = 1i64 << self.level;
        let ranges: Vec<(u32, u32)> = self
            .index
            .iter()
            .map(|&k| {
                let lo = (k as i64 - r).max(0) as u32;
                let hi = (k as i64 + r).min(side - 1) as u32;
                (lo, hi)
            })
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<u32> = ranges.iter().map(|r| r.0).collect();
        loop {
            out.push(Self { level: self.level, index: cur.clone() });
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return Ok(out);
                }
                axis -= 1;
                if cur[axis] < ranges[axis].1 {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = ranges[axis].0;
            }
        }
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.level)?;
        for (i, k) in self.index.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for DyadicCube {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (level, rest) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in cube {s:?}")))?;
        let level: u32 = level.trim().parse().map_err(|e| Error::Parse(format!("{e} in {s:?}")))?;
        let index = rest
            .split(',')
            .map(|k| k.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{e} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(level, index)
    }
}

/// The level-`j` cube containing `x`. Coordinates must lie in `[0,1)`.
pub fn cube_containing(x: &[f64], level: u32) -> Result<DyadicCube> {
    if level > MAX_LEVEL {
        return Err(Error::Range(format!("level {level} exceeds {MAX_LEVEL}")));
    }
    if x.is_empty() {
        return Err(Error::Domain("empty point".into()));
    }
    let scale = (level as f64).exp2();
    let index = x
        .iter()
        .map(|&xi| {
            if !(0.0..1.0).contains(&xi) {
                return Err(Error::Domain(format!("coordinate {xi} outside [0,1)")));
            }
            Ok(((xi * scale).floor() as u32).min(((1u64 << level) - 1) as u32))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DyadicCube { level, index })
}

/// Number of cubes in `Λ_j^D`.
pub fn cubes_at_level(dim: usize, level: u32) -> usize {
    1usize << (dim as u32 * level)
}

pub fn linear_index(level: u32, index: &[u32]) -> usize {
    index.iter().fold(0usize, |acc, &k| (acc << level) | k as usize)
}

/// Inverse of [`linear_index`], writing into `out` (whose length fixes the dimension).
pub fn unravel(level: u32, mut linear: usize, out: &mut [u32]) {
    let mask = (1usize << level) - 1;
    for slot in out.iter_mut().rev() {
        *slot = (linear & mask) as u32;
        linear >>= level;
    }
}

/// Position (`0..2^D`) of the digit at depth `depth` (1-based) of a level-`level` index.
pub(crate) fn child_position(index: &[u32], level: u32, depth: u32) -> usize {
    let shift = level - depth;
    index.iter().fold(0usize, |acc, &k| (acc << 1) | ((k >> shift) & 1) as usize)
}

/// Linear index of the parent of the cube with linear index `linear`.
pub(crate) fn parent_linear(dim: usize, level: u32, linear: usize) -> usize {
    let mut idx = vec![0u32; dim];
    unravel(level, linear, &mut idx);
    for k in idx.iter_mut() {
        *k >>= 1;
    }
    linear_index(level - 1, &idx)
}

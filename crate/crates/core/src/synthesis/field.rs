use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::dyadic::{cubes_at_level, unravel};
use crate::error::{Error, Result};

/// Largest dense field, in stored entries.
pub const DENSE_ENTRY_LIMIT: usize = 1 << 27;

const MAGIC: &[u8; 8] = b"TRLFLD01";

/// Bits of orientation `o` for a `dim`-dimensional wavelet, first coordinate first.
pub fn orientation_bits(orientation: usize, dim: usize) -> impl Iterator<Item = u8> {
    (0..dim).map(move |i| ((orientation >> (dim - 1 - i)) & 1) as u8)
}

/// Anything that yields wavelet coefficients `c_{j,k,l}` on `[0,1]^D`.
///
/// Orientations are integers `1..2^D` whose bits (first coordinate most
/// significant) select `φ` (0) or `ψ` (1) per axis; `0` is reserved for the
/// scaling function and only appears at level 0 through
/// [`scaling_coefficient`](Self::scaling_coefficient).
pub trait CoefficientSource: Send + Sync {
    fn dim(&self) -> usize;
    fn max_level(&self) -> u32;
    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64;

    /// `β(0)`, the coefficient of `φ(x_1)⋯φ(x_D)`.
    fn scaling_coefficient(&self) -> f64 {
        0.0
    }

    /// Calls `visit` on every nonzero coefficient of a level.
    fn for_each_nonzero(&self, level: u32, visit: &mut dyn FnMut(&[u32], usize, f64)) {
        let dim = self.dim();
        let mut idx = vec![0u32; dim];
        for lin in 0..cubes_at_level(dim, level) {
            unravel(level, lin, &mut idx);
            for o in 1..1usize << dim {
                let c = self.coefficient(level, &idx, o);
                if c != 0.0 {
                    visit(&idx, o, c);
                }
            }
        }
    }
}

impl<S: CoefficientSource + ?Sized> CoefficientSource for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn max_level(&self) -> u32 {
        (**self).max_level()
    }
    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        (**self).coefficient(level, index, orientation)
    }
    fn scaling_coefficient(&self) -> f64 {
        (**self).scaling_coefficient()
    }
    fn for_each_nonzero(&self, level: u32, visit: &mut dyn FnMut(&[u32], usize, f64)) {
        (**self).for_each_nonzero(level, visit)
    }
}

/// Dense per-level coefficient arrays for levels `0..=J`, each laid out as
/// `(k, l)` with `k` in linear cube order and `l = 1..2^D` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    dim: usize,
    beta0: f64,
    levels: Vec<Vec<f64>>,
}

impl CoefficientField {
    pub fn zeros(dim: usize, max_level: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        let per = (1usize << dim) - 1;
        let total: usize = (0..=max_level).map(|j| cubes_at_level(dim, j) * per).sum();
        if dim as u32 * max_level > 40 || total > DENSE_ENTRY_LIMIT {
            return Err(Error::Range(format!(
                "dense field with D = {dim}, J = {max_level} exceeds the memory policy; use an implicit source"
            )));
        }
        let levels = (0..=max_level).map(|j| vec![0.0; cubes_at_level(dim, j) * per]).collect();
        Ok(Self { dim, beta0: 0.0, levels })
    }

    /// Materialize any source.
    pub fn from_source<S: CoefficientSource + ?Sized>(src: &S) -> Result<Self> {
        let mut f = Self::zeros(src.dim(), src.max_level())?;
        f.beta0 = src.scaling_coefficient();
        let dim = f.dim;
        let per = f.orientations();
        for (j, lv) in f.levels.iter_mut().enumerate() {
            lv.par_chunks_mut(per).enumerate().for_each(|(lin, chunk)| {
                let mut idx = vec![0u32; dim];
                unravel(j as u32, lin, &mut idx);
                for (o, c) in chunk.iter_mut().enumerate() {
                    *c = src.coefficient(j as u32, &idx, o + 1);
                }
            });
        }
        Ok(f)
    }

    pub fn orientations(&self) -> usize {
        (1 << self.dim) - 1
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn set_beta0(&mut self, v: f64) {
        self.beta0 = v;
    }

    pub fn level(&self, j: u32) -> &[f64] {
        &self.levels[j as usize]
    }

    pub fn level_mut(&mut self, j: u32) -> &mut [f64] {
        &mut self.levels[j as usize]
    }

    fn slot(&self, level: u32, index: &[u32], orientation: usize) -> usize {
        debug_assert!(orientation >= 1 && orientation <= self.orientations());
        crate::dyadic::linear_index(level, index) * self.orientations() + orientation - 1
    }

    pub fn get(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        self.levels[level as usize][self.slot(level, index, orientation)]
    }

    pub fn set(&mut self, level: u32, index: &[u32], orientation: usize, value: f64) {
        let s = self.slot(level, index, orientation);
        self.levels[level as usize][s] = value;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.levels.len() == other.levels.len()
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, scale: f64, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::Shape("fields differ in dimension or depth".into()));
        }
        self.beta0 += scale * other.beta0;
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += scale * y);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.beta0.is_finite() && self.levels.iter().all(|l| l.iter().all(|v| v.is_finite()))
    }

    /// Binary container: magic, `D`, `J`, orientation count (u32 LE), `β(0)`,
    /// then every level as little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        for v in [self.dim as u32, self.max_level(), self.orientations() as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.beta0.to_le_bytes())?;
        for lv in &self.levels {
            let mut buf = Vec::with_capacity(lv.len() * 8);
            for v in lv {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Parse("not a coefficient field container".into()));
        }
        let mut word = [0u8; 4];
        let mut next = || -> Result<u32> {
            r.read_exact(&mut word)?;
            Ok(u32::from_le_bytes(word))
        };
        let (dim, max_level, orient) = (next()? as usize, next()?, next()? as usize);
        let mut f = Self::zeros(dim, max_level)?;
        if orient != f.orientations() {
            return Err(Error::Parse(format!("orientation count {orient} does not match D = {dim}")));
        }
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        f.beta0 = f64::from_le_bytes(b);
        for lv in f.levels.iter_mut() {
            let mut buf = vec![0u8; lv.len() * 8];
            r.read_exact(&mut buf)?;
            for (v, chunk) in lv.iter_mut().zip(buf.chunks_exact(8)) {
                *v = f64::from_le_bytes(chunk.try_into().unwrap());
            }
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

impl CoefficientSource for CoefficientField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        if level as usize >= self.levels.len() {
            return 0.0;
        }
        self.get(level, index, orientation)
    }

    fn scaling_coefficient(&self) -> f64 {
        self.beta0
    }

    fn for_each_nonzero(&self, level: u32, visit: &mut dyn FnMut(&[u32], usize, f64)) {
        let Some(lv) = self.levels.get(level as usize) else { return };
        let per = self.orientations();
        let mut idx = vec![0u32; self.dim];
        for (lin, chunk) in lv.chunks(per).enumerate() {
            if chunk.iter().all(|c| *c == 0.0) {
                continue;
            }
            unravel(level, lin, &mut idx);
            for (o, &c) in chunk.iter().enumerate() {
                if c != 0.0 {
                    visit(&idx, o + 1, c);
                }
            }
        }
    }
}

/// `Σ_i w_i f_i` over sources of equal dimension, evaluated lazily.
pub struct LinearCombination<'a> {
    dim: usize,
    max_level: u32,
    terms: Vec<(f64, &'a dyn CoefficientSource)>,
}

impl<'a> LinearCombination<'a> {
    pub fn new(terms: Vec<(f64, &'a dyn CoefficientSource)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Shape("empty combination".into()))?;
        let dim = first.1.dim();
        if terms.iter().any(|(_, s)| s.dim() != dim) {
            return Err(Error::Shape("combined sources differ in dimension".into()));
        }
        let max_level = terms.iter().map(|(_, s)| s.max_level()).max().unwrap();
        Ok(Self { dim, max_level, terms })
    }
}

impl CoefficientSource for LinearCombination<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn max_level(&self) -> u32 {
        self.max_level
    }
    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(w, s)| *w != 0.0 && level <= s.max_level())
            .map(|(w, s)| w * s.coefficient(level, index, orientation))
            .sum()
    }
    fn scaling_coefficient(&self) -> f64 {
        self.terms.iter().map(|(w, s)| w * s.scaling_coefficient()).sum()
    }
}

/// `f + Σ_i β_i · probes_i` on dense fields.
pub fn combine(f: &CoefficientField, betas: &[f64], probes: &[CoefficientField]) -> Result<CoefficientField> {
    if betas.len() != probes.len() {
        return Err(Error::Shape(format!("{} weights for {} probes", betas.len(), probes.len())));
    }
    let mut out = f.clone();
    for (b, p) in betas.iter().zip(probes) {
        out.add_scaled(*b, p)?;
    }
    Ok(out)
}

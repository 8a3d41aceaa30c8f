use rayon::prelude::*;

use super::potential::Potential;
use crate::dyadic::{self, cubes_at_level, DyadicCube};
use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Exact multiplicative cascade: a cube's mass is the product of the child
/// weights along its dyadic address.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    dim: usize,
    weights: Vec<f64>,
}

impl Cascade {
    pub fn new(dim: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::Construction(format!("cascade dimension {dim} unsupported")));
        }
        if weights.len() != 1 << dim {
            return Err(Error::Construction(format!(
                "cascade in dimension {dim} needs {} weights, got {}",
                1 << dim,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Construction("cascade weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Construction(format!("cascade weights sum to {total}, expected 1")));
        }
        Ok(Self { dim, weights })
    }

    pub fn lebesgue(dim: usize) -> Self {
        let n = 1usize << dim;
        Self { dim, weights: vec![1.0 / n as f64; n] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn mass(&self, level: u32, index: &[u32]) -> f64 {
        (1..=level).map(|depth| self.weights[dyadic::child_position(index, level, depth)]).product()
    }
}

/// A finite-depth measure stored as dense per-level mass arrays, with each
/// parent's mass equal to the sum of its children.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMeasure {
    dim: usize,
    levels: Vec<Vec<f64>>,
}

impl TreeMeasure {
    /// Build from per-level arrays; checks shapes and the parent/children sum rule.
    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Construction("tree measure needs at least level 0".into()));
        }
        for (j, lv) in levels.iter().enumerate() {
            if lv.len() != cubes_at_level(dim, j as u32) {
                return Err(Error::Shape(format!("level {j} has {} entries", lv.len())));
            }
        }
        let m = Self { dim, levels };
        for j in 1..m.levels.len() {
            let sums = m.child_sums(j as u32);
            for (p, s) in m.levels[j - 1].iter().zip(&sums) {
                if (p - s).abs() > 1e-9 * p.abs().max(1e-300) && (p - s).abs() > 1e-15 {
                    return Err(Error::Construction(format!("level {j} children do not sum to parent")));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, j: u32) -> Option<&[f64]> {
        self.levels.get(j as usize).map(Vec::as_slice)
    }

    fn child_sums(&self, j: u32) -> Vec<f64> {
        let mut sums = vec![0.0; cubes_at_level(self.dim, j - 1)];
        for (lin, m) in self.levels[j as usize].iter().enumerate() {
            sums[dyadic::parent_linear(self.dim, j, lin)] += m;
        }
        sums
    }

    /// Top-down renormalization: children rescaled so they sum to their parent.
    /// `raw[j]` only needs to be proportional within each sibling group.
    fn consistent_from_raw(dim: usize, raw: Vec<Vec<f64>>) -> Result<Self> {
        let mut levels: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
        levels.push(vec![1.0]);
        for j in 1..raw.len() {
            let parent = &levels[j - 1];
            let cur = &raw[j];
            let mut sums = vec![0.0; parent.len()];
            for (lin, &v) in cur.iter().enumerate() {
                sums[dyadic::parent_linear(dim, j as u32, lin)] += v;
            }
            let mut next = vec![0.0; cur.len()];
            for (lin, &v) in cur.iter().enumerate() {
                let p = dyadic::parent_linear(dim, j as u32, lin);
                if parent[p] == 0.0 {
                    continue;
                }
                if sums[p] == 0.0 {
                    return Err(Error::Construction(format!(
                        "all children of a positive-mass cube vanish at level {j}"
                    )));
                }
                next[lin] = parent[p] * v / sums[p];
            }
            levels.push(next);
        }
        Ok(Self { dim, levels })
    }
}

/// A capacity on `[0,1]^D` evaluated on dyadic cubes.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacityModel {
    Cascade(Cascade),
    /// Finite-depth Gibbs measure built from a potential.
    Gibbs { potential: Potential, measure: TreeMeasure },
    /// `ξ^s(E) = ξ(E)^s`.
    Power { base: Box<CapacityModel>, exponent: f64 },
    /// `ξ(E)|E|^s` with `|E| = 2^-j` the sup-norm diameter; `s` may be negative.
    Shifted { base: Box<CapacityModel>, exponent: f64 },
    /// `ξ(A × B) = μ(A) ν(B)`.
    Product { left: Box<CapacityModel>, right: Box<CapacityModel> },
    /// Auxiliary measure `ν_r` of a cascade or Gibbs base.
    Auxiliary { base: Box<CapacityModel>, r: f64, resolved: Box<CapacityModel> },
}

impl CapacityModel {
    pub fn cascade(dim: usize, weights: Vec<f64>) -> Result<Self> {
        Ok(Self::Cascade(Cascade::new(dim, weights)?))
    }

    /// Binomial cascade on `[0,1]` with weights `(p0, 1 - p0)`.
    pub fn binomial(p0: f64) -> Result<Self> {
        Self::cascade(1, vec![p0, 1.0 - p0])
    }

    pub fn lebesgue(dim: usize) -> Self {
        Self::Cascade(Cascade::lebesgue(dim))
    }

    /// Gibbs measure of `potential` approximated to depth `max_depth`.
    ///
    /// A level-`j` cube gets weight `exp(S_j φ(x_λ))` at its centre `x_λ`,
    /// normalized within each sibling group against the parent's mass, so the
    /// result is an exact measure at every finite depth.
    pub fn gibbs(potential: Potential, max_depth: u32) -> Result<Self> {
        potential.validate()?;
        let dim = potential.dim();
        if dim as u32 * max_depth > 28 {
            return Err(Error::Range(format!(
                "gibbs depth {max_depth} in dimension {dim} exceeds the dense-table budget"
            )));
        }
        let raw: Vec<Vec<f64>> = (0..=max_depth)
            .map(|j| {
                let n = cubes_at_level(dim, j);
                (0..n)
                    .into_par_iter()
                    .map(|lin| {
                        let c = DyadicCube::from_linear(dim, j, lin);
                        potential.birkhoff_sum(&c.center(), j)
                    })
                    .collect::<Vec<f64>>()
            })
            .map(|sums| {
                // shift by the level max before exponentiating
                let peak = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                sums.into_iter().map(|s| (s - peak).exp()).collect()
            })
            .collect();
        let measure = TreeMeasure::consistent_from_raw(dim, raw)?;
        Ok(Self::Gibbs { potential, measure })
    }

    pub fn power(base: CapacityModel, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Construction(format!("power exponent must be positive, got {exponent}")));
        }
        Ok(Self::Power { base: Box::new(base), exponent })
    }

    /// `ξ^{(+s)}` for `s ≥ 0`, `ξ^{(-|s|)}` for `s < 0`.
    ///
    /// Negative shifts are only accepted below the estimated lower Hölder
    /// exponent `s₁` of the base, scanned up to `scan_level`.
    pub fn shifted(base: CapacityModel, exponent: f64, scan_level: u32) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::Construction("shift exponent must be finite".into()));
        }
        if exponent < 0.0 {
            let s1 = super::diagnostics::holder_exponents(&base, scan_level.max(1))?.0;
            if -exponent >= s1 {
                return Err(Error::Domain(format!(
                    "negative shift {exponent} not below the Hölder exponent estimate {s1:.6}"
                )));
            }
        }
        Ok(Self::Shifted { base: Box::new(base), exponent })
    }

    pub fn product(left: CapacityModel, right: CapacityModel) -> Self {
        Self::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Cascade(c) => c.dim,
            Self::Gibbs { measure, .. } => measure.dim,
            Self::Power { base, .. } | Self::Shifted { base, .. } | Self::Auxiliary { base, .. } => base.dim(),
            Self::Product { left, right } => left.dim() + right.dim(),
        }
    }

    /// Deepest level with a defined mass (`None` for exact cascades).
    pub fn max_depth(&self) -> Option<u32> {
        match self {
            Self::Cascade(_) => None,
            Self::Gibbs { measure, .. } => Some(measure.max_depth()),
            Self::Power { base, .. } | Self::Shifted { base, .. } => base.max_depth(),
            Self::Auxiliary { resolved, .. } => resolved.max_depth(),
            Self::Product { left, right } => match (left.max_depth(), right.max_depth()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Cascade(_) => "cascade",
            Self::Gibbs { .. } => "gibbs",
            Self::Power { .. } => "power",
            Self::Shifted { .. } => "shifted",
            Self::Product { .. } => "product",
            Self::Auxiliary { .. } => "auxiliary",
        }
    }

    /// True when masses are additive (children sum to the parent) with total mass one.
    pub fn is_probability(&self) -> bool {
        match self {
            Self::Cascade(_) | Self::Gibbs { .. } | Self::Auxiliary { .. } => true,
            Self::Product { left, right } => left.is_probability() && right.is_probability(),
            Self::Power { base, exponent } => *exponent == 1.0 && base.is_probability(),
            Self::Shifted { base, exponent } => *exponent == 0.0 && base.is_probability(),
        }
    }

    /// True when `mass(child) ≤ mass(parent)` holds by construction.
    pub fn is_monotone(&self) -> bool {
        match self {
            Self::Cascade(_) | Self::Gibbs { .. } | Self::Auxiliary { .. } => true,
            Self::Power { base, .. } => base.is_monotone(),
            Self::Shifted { base, exponent } => *exponent >= 0.0 && base.is_monotone(),
            Self::Product { left, right } => left.is_monotone() && right.is_monotone(),
        }
    }

    pub(crate) fn check_level(&self, level: u32) -> Result<()> {
        if let Some(max) = self.max_depth() {
            if level > max {
                return Err(Error::Range(format!("level {level} beyond configured depth {max}")));
            }
        }
        Ok(())
    }

    /// Mass of a dyadic cube.
    pub fn mass(&self, cube: &DyadicCube) -> Result<f64> {
        if cube.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "cube of dimension {} given to a capacity of dimension {}",
                cube.dim(),
                self.dim()
            )));
        }
        self.check_level(cube.level())?;
        Ok(self.mass_unchecked(cube.level(), cube.index()))
    }

    /// Mass by level and index without shape or depth checks.
    pub fn mass_unchecked(&self, level: u32, index: &[u32]) -> f64 {
        match self {
            Self::Cascade(c) => c.mass(level, index),
            Self::Gibbs { measure, .. } => {
                measure.levels[level as usize][dyadic::linear_index(level, index)]
            }
            Self::Power { base, exponent } => base.mass_unchecked(level, index).powf(*exponent),
            Self::Shifted { base, exponent } => {
                base.mass_unchecked(level, index) * (-(level as f64) * exponent).exp2()
            }
            Self::Product { left, right } => {
                let d = left.dim();
                left.mass_unchecked(level, &index[..d]) * right.mass_unchecked(level, &index[d..])
            }
            Self::Auxiliary { resolved, .. } => resolved.mass_unchecked(level, index),
        }
    }

    /// Masses of every cube of `Λ_j^D` in linear-index order.
    pub fn level_masses(&self, level: u32) -> Result<Vec<f64>> {
        self.check_level(level)?;
        Ok(self.level_masses_unchecked(level))
    }

    fn level_masses_unchecked(&self, level: u32) -> Vec<f64> {
        match self {
            Self::Cascade(c) => {
                let mut cur = vec![1.0];
                for j in 1..=level {
                    let n = cubes_at_level(c.dim, j);
                    let dim = c.dim;
                    cur = (0..n)
                        .into_par_iter()
                        .map(|lin| {
                            let mut idx = vec![0u32; dim];
                            dyadic::unravel(j, lin, &mut idx);
                            let pos = dyadic::child_position(&idx, j, j);
                            let parent = dyadic::parent_linear(dim, j, lin);
                            cur[parent] * c.weights[pos]
                        })
                        .collect();
                }
                cur
            }
            Self::Gibbs { measure, .. } => measure.levels[level as usize].clone(),
            Self::Power { base, exponent } => {
                let mut v = base.level_masses_unchecked(level);
                v.par_iter_mut().for_each(|m| *m = m.powf(*exponent));
                v
            }
            Self::Shifted { base, exponent } => {
                let f = (-(level as f64) * exponent).exp2();
                let mut v = base.level_masses_unchecked(level);
                v.par_iter_mut().for_each(|m| *m *= f);
                v
            }
            Self::Product { left, right } => {
                let l = left.level_masses_unchecked(level);
                let r = right.level_masses_unchecked(level);
                let mut out = vec![0.0; l.len() * r.len()];
                out.par_chunks_mut(r.len()).zip(l.par_iter()).for_each(|(row, &lm)| {
                    for (o, &rm) in row.iter_mut().zip(&r) {
                        *o = lm * rm;
                    }
                });
                out
            }
            Self::Auxiliary { resolved, .. } => resolved.level_masses_unchecked(level),
        }
    }

    /// `log2` of every mass at a level (`-inf` for zero masses).
    pub fn level_log2_masses(&self, level: u32) -> Result<Vec<f64>> {
        self.check_level(level)?;
        Ok(match self {
            Self::Product { left, right } => {
                let l = left.level_log2_masses(level)?;
                let r = right.level_log2_masses(level)?;
                let mut out = vec![0.0; l.len() * r.len()];
                out.par_chunks_mut(r.len()).zip(l.par_iter()).for_each(|(row, &lm)| {
                    for (o, &rm) in row.iter_mut().zip(&r) {
                        *o = lm + rm;
                    }
                });
                out
            }
            _ => {
                let mut v = self.level_masses_unchecked(level);
                v.par_iter_mut().for_each(|m| *m = m.log2());
                v
            }
        })
    }

    /// Smallest positive and largest mass at a level, computed without
    /// materializing the level when the structure allows it.
    pub fn level_extremes(&self, level: u32) -> Result<(f64, f64)> {
        self.check_level(level)?;
        Ok(match self {
            Self::Cascade(c) => {
                let max = c.weights.iter().cloned().fold(0.0, f64::max);
                let min = c.weights.iter().cloned().filter(|w| *w > 0.0).fold(f64::INFINITY, f64::min);
                (min.powi(level as i32), max.powi(level as i32))
            }
            Self::Power { base, exponent } => {
                let (lo, hi) = base.level_extremes(level)?;
                (lo.powf(*exponent), hi.powf(*exponent))
            }
            Self::Shifted { base, exponent } => {
                let (lo, hi) = base.level_extremes(level)?;
                let f = (-(level as f64) * exponent).exp2();
                (lo * f, hi * f)
            }
            Self::Product { left, right } => {
                let (a, b) = left.level_extremes(level)?;
                let (c, d) = right.level_extremes(level)?;
                (a * c, b * d)
            }
            Self::Auxiliary { resolved, .. } => resolved.level_extremes(level)?,
            Self::Gibbs { measure, .. } => {
                let lv = &measure.levels[level as usize];
                let max = lv.iter().cloned().fold(0.0, f64::max);
                let min = lv.iter().cloned().filter(|m| *m > 0.0).fold(f64::INFINITY, f64::min);
                (min, max)
            }
        })
    }

    /// Masses of the `2^D` children of a cube, in lexicographic order.
    pub fn child_masses(&self, level: u32, index: &[u32]) -> Vec<f64> {
        match self {
            Self::Cascade(c) => {
                let m = c.mass(level, index);
                c.weights.iter().map(|w| m * w).collect()
            }
            Self::Auxiliary { resolved, .. } => resolved.child_masses(level, index),
            _ => {
                let dim = self.dim();
                let mut child = vec![0u32; dim];
                (0..1usize << dim)
                    .map(|pos| {
                        for (i, c) in child.iter_mut().enumerate() {
                            *c = 2 * index[i] + ((pos >> (dim - 1 - i)) & 1) as u32;
                        }
                        self.mass_unchecked(level + 1, &child)
                    })
                    .collect()
            }
        }
    }

    /// The auxiliary measure `ν_r`: child weights proportional to `mass(child)^r`,
    /// renormalized to the parent's auxiliary mass. Only cascade and Gibbs
    /// bases (and auxiliaries of them) are accepted.
    pub fn auxiliary(&self, r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::Construction("auxiliary exponent must be finite".into()));
        }
        let resolved = match self {
            Self::Cascade(c) => {
                let powered: Vec<f64> =
                    c.weights.iter().map(|&w| if w > 0.0 { w.powf(r) } else { 0.0 }).collect();
                let total: f64 = powered.iter().sum();
                if !(total > 0.0 && total.is_finite()) {
                    return Err(Error::Construction(format!("no child weight survives the power {r}")));
                }
                Self::Cascade(Cascade { dim: c.dim, weights: powered.iter().map(|w| w / total).collect() })
            }
            Self::Gibbs { potential, measure } => {
                let raw: Vec<Vec<f64>> = measure
                    .levels
                    .iter()
                    .map(|lv| lv.iter().map(|&m| if m > 0.0 { m.powf(r) } else { 0.0 }).collect())
                    .collect();
                let tree = TreeMeasure::consistent_from_raw(measure.dim, raw)?;
                Self::Gibbs { potential: potential.clone(), measure: tree }
            }
            Self::Auxiliary { resolved, .. } => return resolved.auxiliary(r),
            other => {
                return Err(Error::Precondition(format!(
                    "auxiliary measures need a cascade or gibbs base, got {}",
                    other.kind()
                )))
            }
        };
        Ok(Self::Auxiliary { base: Box::new(self.clone()), r, resolved: Box::new(resolved) })
    }

    /// Child weights when the model is an exact cascade (directly or through an auxiliary).
    pub fn cascade_weights(&self) -> Option<&[f64]> {
        match self {
            Self::Cascade(c) => Some(&c.weights),
            Self::Auxiliary { resolved, .. } => resolved.cascade_weights(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube(level: u32, index: &[u32]) -> DyadicCube {
        DyadicCube::new(level, index.to_vec()).unwrap()
    }

    #[test]
    fn cascade_mass_is_path_product() {
        let m = CapacityModel::binomial(0.25).unwrap();
        assert_relative_eq!(m.mass(&cube(2, &[3])).unwrap(), 0.5625, epsilon = 1e-15);
        assert_relative_eq!(m.mass(&cube(2, &[0])).unwrap(), 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn product_mass() {
        let m = CapacityModel::product(
            CapacityModel::binomial(0.25).unwrap(),
            CapacityModel::binomial(0.3).unwrap(),
        );
        assert_eq!(m.dim(), 2);
        assert_relative_eq!(m.mass(&cube(1, &[1, 0])).unwrap(), 0.225, epsilon = 1e-15);
    }

    #[test]
    fn constant_potential_gives_lebesgue() {
        let m = CapacityModel::gibbs(Potential::Constant { dim: 2, value: 0.7 }, 5).unwrap();
        for j in 0..=5 {
            for v in m.level_masses(j).unwrap() {
                assert_relative_eq!(v, (-(2.0 * j as f64)).exp2(), max_relative = 1e-12);
            }
        }
        assert!(m.mass(&cube(6, &[0, 0])).is_err());
    }

    #[test]
    fn malformed_cascades_rejected() {
        assert!(CapacityModel::cascade(1, vec![0.5, 0.6]).is_err());
        assert!(CapacityModel::cascade(1, vec![0.5, 0.25, 0.25]).is_err());
        assert!(CapacityModel::cascade(1, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn level_masses_match_pointwise_masses() {
        let models = vec![
            CapacityModel::cascade(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
            CapacityModel::product(CapacityModel::binomial(0.25).unwrap(), CapacityModel::binomial(0.4).unwrap()),
            CapacityModel::power(CapacityModel::binomial(0.3).unwrap(), 1.7).unwrap(),
            CapacityModel::shifted(CapacityModel::binomial(0.3).unwrap(), 0.4, 6).unwrap(),
        ];
        for m in models {
            for j in 0..5 {
                let lv = m.level_masses(j).unwrap();
                for (lin, v) in lv.iter().enumerate() {
                    let c = DyadicCube::from_linear(m.dim(), j, lin);
                    assert_relative_eq!(*v, m.mass(&c).unwrap(), max_relative = 1e-13);
                }
                let (lo, hi) = m.level_extremes(j).unwrap();
                let max = lv.iter().cloned().fold(0.0, f64::max);
                let min = lv.iter().cloned().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
                assert_relative_eq!(lo, min, max_relative = 1e-12);
                assert_relative_eq!(hi, max, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn conservation_and_monotone_hierarchy() {
        let pot = Potential::Cosine {
            dim: 1,
            terms: vec![super::super::potential::CosineTerm { amplitude: 0.8, frequency: vec![1], phase: 0.3 }],
        };
        let models = vec![
            CapacityModel::binomial(0.25).unwrap(),
            CapacityModel::cascade(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
            CapacityModel::gibbs(pot, 10).unwrap(),
            CapacityModel::binomial(0.3).unwrap().auxiliary(2.5).unwrap(),
        ];
        for m in &models {
            for j in 0..=8 {
                let total: f64 = m.level_masses(j).unwrap().iter().sum();
                assert!((total - 1.0).abs() < 1e-10, "{} level {j}: {total}", m.kind());
            }
            for lin in 0..cubes_at_level(m.dim(), 4) {
                let c = DyadicCube::from_linear(m.dim(), 4, lin);
                let parent = m.mass(&c).unwrap();
                for ch in c.children() {
                    assert!(m.mass(&ch).unwrap() <= parent + 1e-15);
                }
            }
        }
    }

    #[test]
    fn auxiliary_weights() {
        let nu = CapacityModel::binomial(0.25).unwrap();
        let w1 = nu.auxiliary(1.0).unwrap();
        assert_eq!(w1.cascade_weights().unwrap(), &[0.25, 0.75]);
        let w0 = nu.auxiliary(0.0).unwrap();
        for w in w0.cascade_weights().unwrap() {
            assert!((w - 0.5).abs() < 1e-12);
        }
        let w2 = nu.auxiliary(2.0).unwrap();
        let w = w2.cascade_weights().unwrap();
        assert_relative_eq!(w[0], 0.1, epsilon = 1e-12);
        assert_relative_eq!(w[1], 0.9, epsilon = 1e-12);
    }

    #[test]
    fn auxiliary_of_degenerate_cascade() {
        let nu = CapacityModel::binomial(1.0).unwrap();
        // zero weight stays zero under every power
        let aux = nu.auxiliary(-1.0).unwrap();
        assert_eq!(aux.cascade_weights().unwrap(), &[1.0, 0.0]);
        assert!(CapacityModel::product(nu.clone(), nu).auxiliary(1.0).is_err());
    }

    #[test]
    fn gibbs_auxiliary_at_zero_is_lebesgue() {
        let pot = Potential::Table { dim: 1, side: 4, values: vec![0.0, 1.0, -0.5, 0.2] };
        let g = CapacityModel::gibbs(pot, 8).unwrap();
        let aux = g.auxiliary(0.0).unwrap();
        for j in 0..=8 {
            for v in aux.level_masses(j).unwrap() {
                assert_relative_eq!(v, (-(j as f64)).exp2(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn negative_shift_requires_holder_margin() {
        let nu = CapacityModel::binomial(0.25).unwrap();
        // s1 = -log2(0.75) ≈ 0.415
        assert!(CapacityModel::shifted(nu.clone(), -0.3, 10).is_ok());
        assert!(CapacityModel::shifted(nu, -0.5, 10).is_err());
    }
}

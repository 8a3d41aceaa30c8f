use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::CapacityModel;
use crate::dyadic::linear_index;
use crate::error::{Error, Result};

use super::field::CoefficientSource;
use super::saturating::level_scale;

/// A generic member of `B^ξ_{∞,q}`: `c_λ = u_λ j^{-2/q} ξ(λ)` with `u_λ`
/// independent, of uniform sign and magnitude uniform on `[1/2, 1]`.
///
/// Coefficients are drawn on demand from a counter-based stream, so the
/// field is reproducible from its seed and needs no storage.
#[derive(Debug, Clone)]
pub struct RandomMember {
    xi: CapacityModel,
    q: f64,
    max_level: u32,
    seed: u64,
    base: ChaCha8Rng,
}

impl RandomMember {
    pub fn new(xi: CapacityModel, q: f64, max_level: u32, seed: u64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("q = {q} must be at least 1")));
        }
        if let Some(depth) = xi.max_depth() {
            if depth < max_level {
                return Err(Error::Range(format!("capacity depth {depth} below J = {max_level}")));
            }
        }
        Ok(Self { xi, q, max_level, seed, base: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn capacity(&self) -> &CapacityModel {
        &self.xi
    }

    /// The multiplier `u_λ`.
    pub fn unit(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        let dim = self.xi.dim();
        let per = (1u128 << dim) - 1;
        // coefficients at levels < j number 2^{jD} − 1
        let counter = ((1u128 << (level as usize * dim)) - 1)
            + linear_index(level, index) as u128 * per
            + (orientation as u128 - 1);
        let mut rng = self.base.clone();
        rng.set_word_pos(counter * 4);
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        sign * rng.gen_range(0.5..=1.0)
    }
}

impl CoefficientSource for RandomMember {
    fn dim(&self) -> usize {
        self.xi.dim()
    }

    fn max_level(&self) -> u32 {
        self.max_level
    }

    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        if level == 0 || level > self.max_level {
            return 0.0;
        }
        self.unit(level, index, orientation) * level_scale(level, self.q) * self.xi.mass_unchecked(level, index)
    }
}

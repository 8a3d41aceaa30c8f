use crate::capacity::CapacityModel;
use crate::dyadic::{cubes_at_level, unravel};
use crate::error::{Error, Result};
use crate::wavelet::OffsetSchedule;

use super::field::CoefficientSource;

/// `j^{-2/q}` with `2/∞ = 0`; zero at level 0.
pub fn level_scale(level: u32, q: f64) -> f64 {
    if level == 0 {
        0.0
    } else if q.is_infinite() {
        1.0
    } else {
        (level as f64).powf(-2.0 / q)
    }
}

/// The saturating function on `[0,1]^d × [0,1]^{d'}`, evaluated on demand.
///
/// `g_{j,(k,k'),(l,l')} = j^{-2/q} μ(λ_{j,k}) ν(λ_{j,k'})` when `l ≠ 0^d`,
/// `l' = 1^{d'}` and `k' ≡ p_j (mod K)` on every axis; zero otherwise.
/// A level mask turns the same object into one of the probe generators.
#[derive(Debug, Clone)]
pub struct SaturatingField {
    mu: CapacityModel,
    nu: CapacityModel,
    q: f64,
    max_level: u32,
    schedule: OffsetSchedule,
    keep: Option<Vec<bool>>,
}

impl SaturatingField {
    /// From a product capacity `ξ = μ ⊗ ν`.
    pub fn new(xi: &CapacityModel, q: f64, max_level: u32, schedule: OffsetSchedule) -> Result<Self> {
        match xi {
            CapacityModel::Product { left, right } => {
                Self::from_parts((**left).clone(), (**right).clone(), q, max_level, schedule)
            }
            _ => Err(Error::Precondition(format!(
                "saturating field needs a product capacity, got {}",
                xi.kind()
            ))),
        }
    }

    pub fn from_parts(
        mu: CapacityModel,
        nu: CapacityModel,
        q: f64,
        max_level: u32,
        schedule: OffsetSchedule,
    ) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("q = {q} must be at least 1")));
        }
        if schedule.d_prime != nu.dim() {
            return Err(Error::Shape(format!(
                "schedule built for d' = {} but ν has dimension {}",
                schedule.d_prime,
                nu.dim()
            )));
        }
        if schedule.j_max() < max_level {
            return Err(Error::Range(format!(
                "schedule stops at level {} but J = {max_level}",
                schedule.j_max()
            )));
        }
        for m in [&mu, &nu] {
            if let Some(depth) = m.max_depth() {
                if depth < max_level {
                    return Err(Error::Range(format!("capacity depth {depth} below J = {max_level}")));
                }
            }
        }
        Ok(Self { mu, nu, q, max_level, schedule, keep: None })
    }

    pub fn mu(&self) -> &CapacityModel {
        &self.mu
    }

    pub fn nu(&self) -> &CapacityModel {
        &self.nu
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn schedule(&self) -> &OffsetSchedule {
        &self.schedule
    }

    pub fn d(&self) -> usize {
        self.mu.dim()
    }

    pub fn d_prime(&self) -> usize {
        self.nu.dim()
    }

    pub fn keeps_level(&self, level: u32) -> bool {
        level >= 1 && self.keep.as_ref().is_none_or(|k| k[level as usize])
    }

    /// Whether `k'` sits in the congruence class of `p_j` on every axis.
    pub fn on_lattice(&self, level: u32, k_prime: &[u32]) -> bool {
        let k = self.schedule.support as u32;
        let p = &self.schedule.offsets[level as usize];
        k_prime.iter().zip(p).all(|(&kk, &pp)| kk % k == pp % k)
    }

    /// `d₁ = p(d+1)` generators; generator `i` keeps level `j` iff
    /// `j mod (d₁ N) ∈ [(i−1)N, iN)`.
    pub fn probes(&self, p: usize, d: usize) -> Vec<SaturatingField> {
        let d1 = p * (d + 1);
        let n = self.schedule.window;
        (0..d1)
            .map(|i| {
                let keep = (0..=self.max_level as usize)
                    .map(|j| {
                        let r = j % (d1 * n);
                        (i * n..(i + 1) * n).contains(&r)
                    })
                    .collect();
                SaturatingField { keep: Some(keep), ..self.clone() }
            })
            .collect()
    }
}

/// `𝒢^{(1)}, …, 𝒢^{(d₁)}` for `ξ = μ ⊗ ν`.
pub fn probe_fields(
    xi: &CapacityModel,
    q: f64,
    max_level: u32,
    schedule: OffsetSchedule,
    p: usize,
    d: usize,
) -> Result<Vec<SaturatingField>> {
    if p == 0 {
        return Err(Error::Domain("p must be a positive integer".into()));
    }
    Ok(SaturatingField::new(xi, q, max_level, schedule)?.probes(p, d))
}

impl CoefficientSource for SaturatingField {
    fn dim(&self) -> usize {
        self.d() + self.d_prime()
    }

    fn max_level(&self) -> u32 {
        self.max_level
    }

    fn coefficient(&self, level: u32, index: &[u32], orientation: usize) -> f64 {
        if level > self.max_level || !self.keeps_level(level) {
            return 0.0;
        }
        let dp = self.d_prime();
        let full = (1usize << dp) - 1;
        if orientation >> dp == 0 || orientation & full != full {
            return 0.0;
        }
        let (k, k_prime) = index.split_at(self.d());
        if !self.on_lattice(level, k_prime) {
            return 0.0;
        }
        level_scale(level, self.q) * self.mu.mass_unchecked(level, k) * self.nu.mass_unchecked(level, k_prime)
    }

    fn for_each_nonzero(&self, level: u32, visit: &mut dyn FnMut(&[u32], usize, f64)) {
        if level > self.max_level || !self.keeps_level(level) {
            return;
        }
        let (d, dp) = (self.d(), self.d_prime());
        let scale = level_scale(level, self.q);
        let side = 1u32 << level;
        let kk = self.schedule.support as u32;
        let p = &self.schedule.offsets[level as usize];
        // per-axis lattice of admissible k'
        let axes: Vec<Vec<u32>> = p.iter().map(|&pi| (pi % kk..side).step_by(kk as usize).collect()).collect();
        if axes.iter().any(Vec::is_empty) {
            return;
        }
        let full = (1usize << dp) - 1;
        let mut idx = vec![0u32; d + dp];
        let mut pos = vec![0usize; dp];
        loop {
            for (i, &c) in pos.iter().enumerate() {
                idx[d + i] = axes[i][c];
            }
            let nu = self.nu.mass_unchecked(level, &idx[d..]);
            if nu != 0.0 {
                for lin in 0..cubes_at_level(d, level) {
                    unravel(level, lin, &mut idx[..d]);
                    let c = scale * self.mu.mass_unchecked(level, &idx[..d]) * nu;
                    if c != 0.0 {
                        for l in 1..1usize << d {
                            visit(&idx, (l << dp) | full, c);
                        }
                    }
                }
            }
            // odometer over the k' lattice
            let mut ax = dp;
            loop {
                if ax == 0 {
                    return;
                }
                ax -= 1;
                pos[ax] += 1;
                if pos[ax] < axes[ax].len() {
                    break;
                }
                pos[ax] = 0;
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::capacity::diagnostics::holder_exponents;
use crate::capacity::CapacityModel;
use crate::error::{Error, Result};

use super::field::CoefficientSource;

/// Per-level values `ε_j = ‖(c_λ / ξ(λ))_λ‖_{ℓ^p}` and their `ℓ^q` norm.
///
/// Infinite `p`, `q` or values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormProfile {
    pub p: f64,
    pub q: f64,
    /// `ε` when the environment is `ξ^{(−ε)}`; zero otherwise.
    pub shift: f64,
    pub eps: Vec<f64>,
    pub aggregate: f64,
    /// Levels holding some `c_λ ≠ 0` on a cube with `ξ(λ) = 0`.
    pub failures: Vec<u32>,
}

impl SeminormProfile {
    pub fn is_member(&self) -> bool {
        self.failures.is_empty() && self.aggregate.is_finite()
    }
}

/// `ℓ^p` norm with the sup convention at `p = ∞`.
pub fn lp_norm(values: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values.into_iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Seminorm of `f` in the environment `ξ^{(−ε)}(λ) = ξ(λ) 2^{jε}`.
///
/// Levels `0..=J` of `f` all enter; `ε > 0` must stay below the estimated
/// lower Hölder exponent `s₁` of `ξ`.
pub fn seminorm(
    f: &dyn CoefficientSource,
    env: &CapacityModel,
    p: f64,
    q: f64,
    shift: f64,
) -> Result<SeminormProfile> {
    if env.dim() != f.dim() {
        return Err(Error::Shape(format!("environment of dimension {} for a field of dimension {}", env.dim(), f.dim())));
    }
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::Domain(format!("p = {p}, q = {q} must be at least 1")));
    }
    if !(shift >= 0.0) {
        return Err(Error::Domain(format!("shift {shift} must be nonnegative")));
    }
    let top = f.max_level();
    if let Some(depth) = env.max_depth() {
        if depth < top {
            return Err(Error::Range(format!("environment depth {depth} below J = {top}")));
        }
    }
    if shift > 0.0 {
        let fit = top.clamp(2, 20);
        let (s1, _) = holder_exponents(env, fit)?;
        if shift >= s1 {
            return Err(Error::Precondition(format!("shift {shift} is not below the estimated s1 = {s1:.4}")));
        }
    }
    let mut eps = Vec::with_capacity(top as usize + 1);
    let mut failures = Vec::new();
    for j in 0..=top {
        let factor = (j as f64 * shift).exp2();
        let mut ratios = Vec::new();
        let mut failed = false;
        f.for_each_nonzero(j, &mut |k, _, c| {
            let xi = env.mass_unchecked(j, k) * factor;
            if xi > 0.0 {
                ratios.push(c / xi);
            } else {
                failed = true;
            }
        });
        if failed {
            failures.push(j);
            eps.push(f64::INFINITY);
        } else {
            eps.push(lp_norm(ratios, p));
        }
    }
    let aggregate = lp_norm(eps.iter().copied(), q);
    Ok(SeminormProfile { p, q, shift, eps, aggregate, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{CoefficientField, RandomMember, SaturatingField};
    use crate::wavelet::{OffsetSchedule, WaveletSpec};

    fn xi() -> CapacityModel {
        CapacityModel::product(CapacityModel::binomial(0.3).unwrap(), CapacityModel::binomial(0.4).unwrap())
    }

    #[test]
    fn saturating_profile_is_exact() {
        let spec = WaveletSpec::daubechies("db2", 12).unwrap();
        // with p_j = 1 the lattice is nonempty from level 1 on
        let sched = OffsetSchedule::constant(&spec, 1, 1, 8, 8);
        for q in [1.0, 2.0, f64::INFINITY] {
            let g = SaturatingField::new(&xi(), q, 8, sched.clone()).unwrap();
            let prof = seminorm(&g, &xi(), f64::INFINITY, q, 0.0).unwrap();
            assert_eq!(prof.eps[0], 0.0);
            for j in 1..=8u32 {
                let want = if q.is_infinite() { 1.0 } else { (j as f64).powf(-2.0 / q) };
                assert!((prof.eps[j as usize] - want).abs() < 1e-14, "q {q} j {j}");
            }
        }
    }

    #[test]
    fn envelope_field_has_unit_profile() {
        let env = CapacityModel::binomial(0.3).unwrap();
        let mut f = CoefficientField::zeros(1, 7).unwrap();
        for j in 0..=7u32 {
            for k in 0..1u32 << j {
                f.set(j, &[k], 1, env.mass_unchecked(j, &[k]));
            }
        }
        let sup = seminorm(&f, &env, f64::INFINITY, f64::INFINITY, 0.0).unwrap();
        assert!(sup.eps.iter().all(|e| (e - 1.0).abs() < 1e-14));
        assert_eq!(sup.aggregate, 1.0);
        // finite q: the aggregate grows like (J+1)^{1/q}
        let two = seminorm(&f, &env, f64::INFINITY, 2.0, 0.0).unwrap();
        assert!((two.aggregate - 8f64.sqrt()).abs() < 1e-12);
        let zero = CoefficientField::zeros(1, 7).unwrap();
        let z = seminorm(&zero, &env, 2.0, 2.0, 0.0).unwrap();
        assert!(z.eps.iter().all(|e| *e == 0.0) && z.aggregate == 0.0);
    }

    #[test]
    fn random_member_envelope() {
        let m = RandomMember::new(xi(), 2.0, 6, 11).unwrap();
        let prof = seminorm(&m, &xi(), f64::INFINITY, f64::INFINITY, 0.0).unwrap();
        for j in 1..=6usize {
            let s = (j as f64).powf(-1.0);
            assert!(prof.eps[j] >= s / 2.0 - 1e-15 && prof.eps[j] <= s + 1e-15);
        }
        assert!(prof.aggregate <= 1.0);
    }

    #[test]
    fn shift_bounds() {
        let env = CapacityModel::binomial(0.3).unwrap();
        let f = CoefficientField::zeros(1, 6).unwrap();
        // s1 = −log2(0.7) ≈ 0.515
        assert!(seminorm(&f, &env, 1.0, 1.0, 0.4).is_ok());
        assert!(seminorm(&f, &env, 1.0, 1.0, 0.6).is_err());
        assert!(seminorm(&f, &CapacityModel::lebesgue(2), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_mass_is_flagged() {
        let env = CapacityModel::binomial(0.0).unwrap();
        let mut f = CoefficientField::zeros(1, 3).unwrap();
        f.set(2, &[0], 1, 1.0);
        let prof = seminorm(&f, &env, f64::INFINITY, f64::INFINITY, 0.0).unwrap();
        assert_eq!(prof.failures, vec![2]);
        assert!(!prof.is_member());
    }
}

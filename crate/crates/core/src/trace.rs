//! Restriction of `D`-dimensional coefficient fields to the hyperplanes
//! `{x ∈ [0,1]^d} × {a}`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::scaling::{default_level, dim_aux, h_of_r};
use crate::capacity::CapacityModel;
use crate::dyadic::{cubes_at_level, unravel};
use crate::error::{Error, Result};
use crate::synthesis::{level_scale, CoefficientField, CoefficientSource};
use crate::wavelet::{dwt_periodic, OffsetSchedule, PeriodicDwt, WaveletSpec};

/// How a trace was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceRoute {
    ClosedForm,
    Tensor,
    Grid,
}

/// `k_j(a)` with its validity flag (every entry strictly positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KIndex {
    pub k: Vec<i64>,
    pub valid: bool,
}

/// `k_{j,i}(a) = p_{j,i} + ⌊(2^j a_i − p_{j,i}) / K⌋ K`, the index of the
/// congruence class `p_j mod K` whose wavelet support covers `a`.
pub fn k_index(schedule: &OffsetSchedule, a: &[f64], level: u32) -> Result<KIndex> {
    let p = schedule.offset(level)?;
    if a.len() != p.len() {
        return Err(Error::Shape(format!("point of dimension {} for a schedule in d' = {}", a.len(), p.len())));
    }
    let kk = schedule.support as f64;
    let scale = (level as f64).exp2();
    let k: Vec<i64> = a
        .iter()
        .zip(p)
        .map(|(&ai, &pi)| pi as i64 + ((scale * ai - pi as f64) / kk).floor() as i64 * schedule.support as i64)
        .collect();
    let valid = k.iter().all(|&v| v > 0);
    Ok(KIndex { k, valid })
}

/// Trace coefficients `d^F_λ(a)` (or `e_λ(a)`) of `f_a`, plus the
/// scaling part `d^G_{j,k}(a)` when the tensor route produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub a: Vec<f64>,
    pub r: Option<f64>,
    pub route: TraceRoute,
    pub field: CoefficientField,
    /// `dg_profile[j][k]` in linear cube order.
    pub dg_profile: Option<Vec<Vec<f64>>>,
    /// First level from which the closed form is used.
    pub first_valid: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    a: Vec<f64>,
    r: Option<f64>,
    route: TraceRoute,
    first_valid: Option<u32>,
    dim: usize,
    max_level: u32,
    has_dg: bool,
}

impl TraceResult {
    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    /// Levels from which exponent regressions may use the trace.
    pub fn first_usable_level(&self) -> u32 {
        self.first_valid.unwrap_or(0)
    }

    /// Largest `|d^G|` over all levels, zero when absent.
    pub fn dg_energy(&self) -> f64 {
        self.dg_profile
            .as_ref()
            .map_or(0.0, |p| p.iter().flatten().fold(0.0, |m, v: &f64| m.max(v.abs())))
    }

    /// Writes the field container at `path` and a JSON sidecar next to it.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.field.save(path)?;
        let side = Sidecar {
            a: self.a.clone(),
            r: self.r,
            route: self.route,
            first_valid: self.first_valid,
            dim: self.field.dim(),
            max_level: self.field.max_level(),
            has_dg: self.dg_profile.is_some(),
        };
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }
}

fn check_point(a: &[f64]) -> Result<()> {
    if a.is_empty() || a.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
        return Err(Error::Domain(format!("trace point {a:?} must lie in (0,1]^d'")));
    }
    Ok(())
}

/// Closed-form trace of the saturating function:
/// `e_{j,k,l}(a) = j^{-2/q} μ(λ_{j,k}) ν(λ_{j,k_j(a)}) G_j^{d'}(a)` for every
/// `l ≠ 0^d`. Levels below the first `j₀` with `k_j(a)` valid for every
/// `j ≥ j₀` are zero.
pub fn saturating_trace(
    mu: &CapacityModel,
    nu: &CapacityModel,
    schedule: &OffsetSchedule,
    spec: &WaveletSpec,
    q: f64,
    a: &[f64],
    max_level: u32,
) -> Result<TraceResult> {
    check_point(a)?;
    if nu.dim() != a.len() || schedule.d_prime != a.len() {
        return Err(Error::Shape("ν, schedule and trace point disagree on d'".into()));
    }
    if schedule.j_max() < max_level {
        return Err(Error::Range(format!("schedule stops at level {} but J = {max_level}", schedule.j_max())));
    }
    if schedule.support != spec.support {
        return Err(Error::Precondition("schedule was built for another wavelet".into()));
    }
    let d = mu.dim();
    let mut field = CoefficientField::zeros(d, max_level)?;
    let kis = (0..=max_level).map(|j| k_index(schedule, a, j)).collect::<Result<Vec<_>>>()?;
    // with varying offsets validity may flicker at coarse levels
    let first_valid = kis.iter().rposition(|ki| !ki.valid).map_or(Some(0), |j| {
        let next = j as u32 + 1;
        (next <= max_level).then_some(next)
    });
    for (j, ki) in kis.into_iter().enumerate() {
        let j = j as u32;
        if first_valid.is_none_or(|f| j < f) {
            continue;
        }
        let side = 1i64 << j;
        if ki.k.iter().any(|&k| k >= side) {
            // the class member lies past the last cube; ψ vanishes at a anyway
            continue;
        }
        let k_prime: Vec<u32> = ki.k.iter().map(|&k| k as u32).collect();
        let g = schedule.g_product(spec, j, a)?;
        let factor = level_scale(j, q) * nu.mass_unchecked(j, &k_prime) * g;
        if factor == 0.0 {
            continue;
        }
        let per = field.orientations();
        field.level_mut(j).par_chunks_mut(per).enumerate().for_each(|(lin, chunk)| {
            let mut idx = vec![0u32; d];
            unravel(j, lin, &mut idx);
            let e = factor * mu.mass_unchecked(j, &idx);
            chunk.iter_mut().for_each(|c| *c = e);
        });
    }
    Ok(TraceResult { a: a.to_vec(), r: None, route: TraceRoute::ClosedForm, field, dg_profile: None, first_valid })
}

/// Per axis, the `k'` whose `φ`/`ψ` support meets `a_i`, with both values.
fn axis_terms(spec: &WaveletSpec, level: u32, ai: f64) -> Vec<(u32, [f64; 2])> {
    let t = (level as f64).exp2() * ai;
    let side = 1i64 << level;
    let lo = ((t - spec.support as f64).floor() as i64).max(0);
    let hi = (t.floor() as i64).min(side - 1);
    (lo..=hi)
        .filter_map(|k| {
            let x = t - k as f64;
            let v = [spec.eval_phi(x), spec.eval_psi(x)];
            (v[0] != 0.0 || v[1] != 0.0).then_some((k as u32, v))
        })
        .collect()
}

/// All `(k', l', ψ^{l'}(2^j a − k'))` with a nonzero value.
fn hyperplane_terms(spec: &WaveletSpec, level: u32, a: &[f64]) -> Vec<(Vec<u32>, usize, f64)> {
    let axes: Vec<_> = a.iter().map(|&ai| axis_terms(spec, level, ai)).collect();
    let dp = a.len();
    let mut out = Vec::new();
    if axes.iter().any(Vec::is_empty) {
        return out;
    }
    let mut pos = vec![0usize; dp];
    loop {
        let kp: Vec<u32> = pos.iter().enumerate().map(|(i, &p)| axes[i][p].0).collect();
        for lp in 0..1usize << dp {
            let w: f64 = (0..dp).map(|i| axes[i][pos[i]].1[(lp >> (dp - 1 - i)) & 1]).product();
            if w != 0.0 {
                out.push((kp.clone(), lp, w));
            }
        }
        let mut ax = dp;
        loop {
            if ax == 0 {
                return out;
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

/// Trace coefficients of a generic field from the tensor sums
/// `d^F_{j,k,l}(a) = Σ_{k',l'} c_{j,(k,k'),(l,l')} ψ^{l'}(2^j a − k')` for
/// `l ≠ 0^d`; the `l = 0^d` part goes to `d^G` (with `l' ≠ 0^{d'}` except at
/// level 0, where `β(0)` also enters).
pub fn tensor_trace(f: &dyn CoefficientSource, a: &[f64], spec: &WaveletSpec) -> Result<TraceResult> {
    check_point(a)?;
    let dp = a.len();
    if f.dim() <= dp {
        return Err(Error::Shape(format!("field of dimension {} has no {dp}-codimensional trace", f.dim())));
    }
    let d = f.dim() - dp;
    let top = f.max_level();
    let mut field = CoefficientField::zeros(d, top)?;
    let mut dg = Vec::with_capacity(top as usize + 1);
    let per = field.orientations();
    for j in 0..=top {
        let terms = hyperplane_terms(spec, j, a);
        let n = cubes_at_level(d, j);
        let mut g = vec![0.0; n];
        field.level_mut(j).par_chunks_mut(per).zip(g.par_iter_mut()).enumerate().for_each(|(lin, (chunk, gk))| {
            let mut idx = vec![0u32; d + dp];
            unravel(j, lin, &mut idx[..d]);
            for (kp, lp, w) in &terms {
                idx[d..].copy_from_slice(kp);
                for l in 0..1usize << d {
                    let o = (l << dp) | lp;
                    if o == 0 {
                        continue;
                    }
                    let c = f.coefficient(j, &idx, o);
                    if c == 0.0 {
                        continue;
                    }
                    if l == 0 {
                        *gk += c * w;
                    } else {
                        chunk[l - 1] += c * w;
                    }
                }
            }
        });
        dg.push(g);
    }
    let beta0 = f.scaling_coefficient();
    if beta0 != 0.0 {
        let phi_a: f64 = a.iter().map(|&ai| spec.eval_phi(ai)).product();
        dg[0][0] += beta0 * phi_a;
    }
    Ok(TraceResult { a: a.to_vec(), r: None, route: TraceRoute::Tensor, field, dg_profile: Some(dg), first_valid: None })
}

/// Samples of `f(·, a)` at `x_n = n 2^{-J_grid}`, `n < 2^{J_grid}`, from the
/// wavelet series itself. Only `d = 1` hyperplanes.
pub fn grid_trace(f: &dyn CoefficientSource, a: &[f64], j_grid: u32, spec: &WaveletSpec) -> Result<Vec<f64>> {
    check_point(a)?;
    let dp = a.len();
    if f.dim() != dp + 1 {
        return Err(Error::Shape("grid evaluation is implemented for one-dimensional traces only".into()));
    }
    if j_grid < f.max_level() || j_grid > 24 {
        return Err(Error::Range(format!("grid level {j_grid} must lie in [J, 24]")));
    }
    let n = 1usize << j_grid;
    let kk = spec.support;
    let mut out = vec![0.0; n];
    let beta0 = f.scaling_coefficient();
    if beta0 != 0.0 {
        let phi_a: f64 = a.iter().map(|&ai| spec.eval_phi(ai)).product();
        for (i, v) in out.iter_mut().enumerate() {
            *v += beta0 * phi_a * spec.eval_phi(i as f64 / n as f64);
        }
    }
    for j in 0..=f.max_level() {
        let terms = hyperplane_terms(spec, j, a);
        let stride = 1usize << (j_grid - j);
        let contributions: Vec<(usize, [f64; 2])> = (0..1u32 << j)
            .into_par_iter()
            .filter_map(|k| {
                let mut idx = vec![k; dp + 1];
                let mut amp = [0.0; 2];
                for (kp, lp, w) in &terms {
                    idx[1..].copy_from_slice(kp);
                    for (l, slot) in amp.iter_mut().enumerate() {
                        let o = (l << dp) | lp;
                        if o != 0 {
                            *slot += f.coefficient(j, &idx, o) * w;
                        }
                    }
                }
                (amp != [0.0; 2]).then_some((k as usize, amp))
            })
            .collect();
        for (k, amp) in contributions {
            let start = k * stride;
            let end = ((k + kk) * stride).min(n);
            for (i, v) in out.iter_mut().enumerate().take(end).skip(start) {
                let x = (i - start) as f64 / stride as f64;
                *v += amp[0] * spec.eval_phi(x) + amp[1] * spec.eval_psi(x);
            }
        }
    }
    Ok(out)
}

/// Periodic transform of [`grid_trace`] samples with the `φ` prefilter.
pub fn grid_trace_dwt(
    f: &dyn CoefficientSource,
    a: &[f64],
    j_grid: u32,
    spec: &WaveletSpec,
) -> Result<PeriodicDwt> {
    let samples = grid_trace(f, a, j_grid, spec)?;
    let coarsest = (2 * spec.support).next_power_of_two().trailing_zeros().min(j_grid);
    dwt_periodic(&samples, spec, j_grid - coarsest, true)
}

/// Cubes `k` at `level` whose wavelet support `[k, k+K] 2^{-j}` stays
/// `margin` away from both ends of `[0, 1]`.
pub fn interior_cubes(level: u32, support: usize, margin: f64) -> std::ops::Range<usize> {
    let side = (level as f64).exp2();
    let lo = (margin * side).ceil() as usize;
    let hi = (((1.0 - margin) * side).floor() as usize).saturating_sub(support);
    lo..hi.max(lo)
}

/// `Γ^p_{ν,r} = h^r_ν + dim(ν_r)/p`, with `α/∞ = 0`.
pub fn gamma_target(nu: &CapacityModel, r: f64, p: f64) -> Result<f64> {
    let level = default_level(nu);
    let h = h_of_r(nu, r, level)?;
    if p.is_infinite() {
        return Ok(h);
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p = {p} must be positive")));
    }
    Ok(h + dim_aux(nu, r, level)? / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::SaturatingField;

    fn db(name: &str) -> WaveletSpec {
        WaveletSpec::daubechies(name, 14).unwrap()
    }

    #[test]
    fn k_index_examples() {
        let s = db("db2");
        let sched = OffsetSchedule::constant(&s, 1, 1, 10, 8);
        let ki = k_index(&sched, &[0.7], 4).unwrap();
        assert_eq!(ki.k, vec![10]);
        assert!(ki.valid);
        let zero = OffsetSchedule::constant(&s, 1, 0, 10, 8);
        for j in 3..=10u32 {
            let ki = k_index(&zero, &[1.0], j).unwrap();
            assert_eq!(ki.k, vec![((1i64 << j) / 3) * 3]);
            assert!(ki.valid);
        }
        let two = OffsetSchedule::constant(&s, 1, 2, 10, 8);
        let ki = k_index(&two, &[0.05], 2).unwrap();
        assert!(ki.k[0] < 0 && !ki.valid);
    }

    #[test]
    fn lebesgue_closed_form() {
        let s = db("db2");
        let sched = OffsetSchedule::constant(&s, 1, 1, 8, 8);
        let leb = CapacityModel::lebesgue(1);
        let a = [0.43];
        let t = saturating_trace(&leb, &leb, &sched, &s, f64::INFINITY, &a, 8).unwrap();
        let fv = t.first_usable_level();
        for j in fv..=8u32 {
            let g = sched.g_product(&s, j, &a).unwrap();
            let want = (-2.0 * j as f64).exp2() * g;
            for k in 0..1u32 << j {
                assert!((t.field.get(j, &[k], 1) - want).abs() < 1e-15);
            }
        }
        for j in 0..fv {
            assert!(t.field.level(j).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn single_coefficient_tensor() {
        let s = db("db3");
        let mut f = CoefficientField::zeros(2, 5).unwrap();
        let (j, k, kp, c) = (4u32, 6u32, 5u32, 0.8);
        f.set(j, &[k, kp], 3, c);
        let a = [0.41];
        let t = tensor_trace(&f, &a, &s).unwrap();
        let want = c * s.eval_psi(16.0 * a[0] - kp as f64);
        assert!(want != 0.0);
        assert!((t.field.get(j, &[k], 1) - want).abs() < 1e-15);
        assert_eq!(t.dg_energy(), 0.0);
    }

    #[test]
    fn scaling_orientations_feed_dg_only() {
        let s = db("db2");
        let mut f = CoefficientField::zeros(2, 4).unwrap();
        // l = 0 (first axis φ), l' = 1
        f.set(3, &[2, 3], 1, 1.0);
        let t = tensor_trace(&f, &[0.5], &s).unwrap();
        assert!(t.field.level(3).iter().all(|v| *v == 0.0));
        let want = s.eval_psi(4.0 - 3.0);
        assert!((t.dg_profile.as_ref().unwrap()[3][2] - want).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_on_saturating_field() {
        let s = db("db3");
        let sched = OffsetSchedule::constant(&s, 1, 2, 9, 8);
        let mu = CapacityModel::binomial(0.25).unwrap();
        let nu = CapacityModel::binomial(0.3).unwrap();
        let g = SaturatingField::from_parts(mu.clone(), nu.clone(), 2.0, 9, sched.clone()).unwrap();
        for a in [0.137, 0.5, 0.91, 1.0] {
            let c = saturating_trace(&mu, &nu, &sched, &s, 2.0, &[a], 9).unwrap();
            let t = tensor_trace(&g, &[a], &s).unwrap();
            assert_eq!(t.dg_energy(), 0.0);
            for j in c.first_usable_level()..=9 {
                for (x, y) in c.field.level(j).iter().zip(t.field.level(j)) {
                    assert!((x - y).abs() < 1e-12, "a {a} j {j}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn grid_oracle_matches_interior() {
        let s = WaveletSpec::daubechies("db4", 16).unwrap();
        let sched = OffsetSchedule::constant(&s, 1, 3, 8, 8);
        let g = SaturatingField::from_parts(
            CapacityModel::binomial(0.3).unwrap(),
            CapacityModel::lebesgue(1),
            f64::INFINITY,
            8,
            sched,
        )
        .unwrap();
        let a = [0.3711];
        let t = tensor_trace(&g, &a, &s).unwrap();
        let w = grid_trace_dwt(&g, &a, 12, &s).unwrap();
        for j in 5..=8u32 {
            let want = t.field.level(j);
            let got = w.detail(j).unwrap();
            let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for k in interior_cubes(j, s.support, 0.1) {
                assert!((want[k] - got[k]).abs() <= 1e-3 * scale, "j {j} k {k}: {} vs {}", want[k], got[k]);
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let nu = CapacityModel::binomial(0.3).unwrap();
        let g = gamma_target(&nu, 0.0, 1.0).unwrap();
        assert!((g - 2.125767).abs() < 1e-4, "{g}");
        let h = gamma_target(&nu, 0.0, f64::INFINITY).unwrap();
        assert!((h - 1.125767).abs() < 1e-4);
        let leb = CapacityModel::lebesgue(1);
        for r in [-1.0, 0.0, 2.0] {
            assert!((gamma_target(&leb, r, 2.0).unwrap() - 1.5).abs() < 1e-9);
        }
    }
}

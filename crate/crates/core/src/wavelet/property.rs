use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WaveletSpec;
use crate::error::{Error, Result};

/// Grid certification of property (R). Nothing here is a proof: zeros and
/// minima are only observed on the dyadic grid of step `2^-grid_log2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub wavelet: String,
    pub grid_log2: u32,
    pub regularity: f64,
    /// `ψ ∈ C¹`, read from the regularity metadata.
    pub r1: bool,
    /// Sign changes and isolated zero runs of `ψ` on `[0, K]`.
    pub r2_zero_clusters: usize,
    /// Longest run of consecutive grid zeros, in grid steps.
    pub r2_longest_zero_run: usize,
    pub r2: bool,
    /// `min_x S(x)` over the grid of `[0, 1)`, `S(x) = Σ_{p<K} |ψ(x+p)|`.
    pub r3_min: f64,
    pub r3_argmin: f64,
    pub r3: bool,
    pub pass: bool,
}

const ZERO_TOL: f64 = 1e-12;
/// Values this small count as grid zeros of ψ. Daubechies wavelets are
/// extremely flat near the ends of their support, so only exact zeros qualify.
const EXACT_ZERO: f64 = 1e-300;
/// A zero run longer than this many grid steps counts as ψ vanishing on an interval.
const FLAT_RUN_LIMIT: usize = 4;

pub fn check_property_r(spec: &WaveletSpec, grid_log2: u32) -> PropertyReport {
    let k = spec.support;
    let step = (-(grid_log2 as f64)).exp2();
    let n = k << grid_log2;
    let values: Vec<f64> = (0..=n).into_par_iter().map(|i| spec.eval_psi(i as f64 * step)).collect();

    let mut clusters = 0;
    let mut longest = 0;
    let mut run = 0;
    let mut last_sign = 0i8;
    for &v in &values {
        if v.abs() <= EXACT_ZERO {
            if run == 0 {
                clusters += 1;
            }
            run += 1;
            longest = longest.max(run);
            last_sign = 0;
            continue;
        }
        run = 0;
        let s = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && s != last_sign {
            clusters += 1;
        }
        last_sign = s;
    }
    let r2 = longest <= FLAT_RUN_LIMIT;

    let cell = 1usize << grid_log2;
    let (r3_min, arg) = (0..cell)
        .into_par_iter()
        .map(|i| {
            let s: f64 = (0..k).map(|p| values[i + (p << grid_log2)].abs()).sum();
            (s, i)
        })
        .reduce(|| (f64::INFINITY, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let r3 = r3_min > ZERO_TOL;
    let r1 = spec.regularity > 1.0;
    PropertyReport {
        wavelet: spec.name.clone(),
        grid_log2,
        regularity: spec.regularity,
        r1,
        r2_zero_clusters: clusters,
        r2_longest_zero_run: longest,
        r2,
        r3_min,
        r3_argmin: arg as f64 * step,
        r3,
        pass: r1 && r2 && r3,
    }
}

/// Periodic offsets `p_j` and the certified floor `α` of the lower bound
/// `max_ℓ ∏_i |G(2^{J+ℓ} x_i − p_{J+ℓ,i})| ≥ α^{d'}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetSchedule {
    pub d_prime: usize,
    pub support: usize,
    /// `N(d')`.
    pub window: usize,
    /// One period of offsets, `pattern[ℓ][i]`.
    pub pattern: Vec<Vec<u32>>,
    /// `p_j` for `j = 0..=j_max`.
    pub offsets: Vec<Vec<u32>>,
    pub alpha: f64,
    pub grid_log2: u32,
}

impl OffsetSchedule {
    pub fn j_max(&self) -> u32 {
        (self.offsets.len() - 1) as u32
    }

    pub fn offset(&self, level: u32) -> Result<&[u32]> {
        self.offsets
            .get(level as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Range(format!("schedule stops at level {}", self.j_max())))
    }

    /// Constant schedule `p_j = p` (window 1), certified at `grid_log2`.
    pub fn constant(spec: &WaveletSpec, d_prime: usize, offset: u32, j_max: u32, grid_log2: u32) -> Self {
        let pattern = vec![vec![offset; d_prime]];
        let alpha = certify(spec, &pattern, grid_log2).0;
        Self::from_pattern(spec.support, pattern, j_max, alpha, grid_log2)
    }

    fn from_pattern(support: usize, pattern: Vec<Vec<u32>>, j_max: u32, alpha: f64, grid_log2: u32) -> Self {
        let window = pattern.len();
        let offsets = (0..=j_max as usize).map(|j| pattern[j % window].clone()).collect();
        Self { d_prime: pattern[0].len(), support, window, pattern, offsets, alpha, grid_log2 }
    }

    /// `G_j^{d'}(a) = ∏_i G(2^j a_i − p_{j,i})`.
    pub fn g_product(&self, spec: &WaveletSpec, level: u32, a: &[f64]) -> Result<f64> {
        let p = self.offset(level)?;
        let scale = (level as f64).exp2();
        Ok(a.iter().zip(p).map(|(&ai, &pi)| spec.eval_g(scale * ai - pi as f64)).product())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSearch {
    pub window_max: usize,
    /// Resolution of the fine certification grid (`2^-grid_log2` per axis).
    pub grid_log2: u32,
    /// Resolution of the screening grid.
    pub coarse_log2: u32,
    /// Smallest `α` accepted as a certificate.
    pub alpha_min: f64,
    /// Patterns screened per window before falling back to random sampling.
    pub budget: usize,
    /// Best screened patterns re-checked on the fine grid.
    pub finalists: usize,
    pub seed: u64,
}

impl Default for ScheduleSearch {
    fn default() -> Self {
        Self {
            window_max: 4,
            grid_log2: 14,
            coarse_log2: 9,
            alpha_min: 1e-3,
            budget: 50_000,
            finalists: 8,
            seed: 0,
        }
    }
}

/// `(α, worst y)` for one pattern over the grid of the period cell `[0, K)^{d'}`.
///
/// Since `G` is `K`-periodic, `2^J x` reduced mod `K` ranges over the whole
/// cell as `J` and `x` vary, so the cell is the set to certify.
pub fn certify(spec: &WaveletSpec, pattern: &[Vec<u32>], grid_log2: u32) -> (f64, Vec<f64>) {
    let d = pattern[0].len();
    let k = spec.support;
    let per_axis = k << grid_log2;
    let step = (-(grid_log2 as f64)).exp2();
    let total = per_axis.pow(d as u32);
    let (best, worst) = (0..total)
        .into_par_iter()
        .map(|lin| {
            let mut rem = lin;
            let mut y = vec![0.0; d];
            for yi in y.iter_mut().rev() {
                *yi = (rem % per_axis) as f64 * step;
                rem /= per_axis;
            }
            let v = pattern
                .iter()
                .enumerate()
                .map(|(l, p)| {
                    let s = (l as f64).exp2();
                    y.iter().zip(p).map(|(&yi, &pi)| spec.eval_g(s * yi - pi as f64).abs()).product::<f64>()
                })
                .fold(0.0, f64::max);
            (v, lin)
        })
        .reduce(|| (f64::INFINITY, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let mut rem = worst;
    let mut y = vec![0.0; d];
    for yi in y.iter_mut().rev() {
        *yi = (rem % per_axis) as f64 * step;
        rem /= per_axis;
    }
    (best.powf(1.0 / d as f64), y)
}

/// Smallest window `N` (then largest `α`) whose periodic pattern certifies on the grid.
pub fn find_offset_schedule(
    spec: &WaveletSpec,
    d_prime: usize,
    j_max: u32,
    opts: &ScheduleSearch,
) -> Result<OffsetSchedule> {
    if d_prime == 0 {
        return Err(Error::Domain("d' must be positive".into()));
    }
    let k = spec.support;
    let per_axis = k << opts.coarse_log2;
    let cells = per_axis.pow(d_prime as u32);
    if cells > 1 << 24 {
        return Err(Error::Range(format!("screening grid of {cells} points is too large")));
    }
    let step = (-(opts.coarse_log2 as f64)).exp2();
    // |G(2^ℓ y_i − p)| per (ℓ, p, axis value)
    let table: Vec<Vec<Vec<f64>>> = (0..opts.window_max)
        .map(|l| {
            let s = (l as f64).exp2();
            (0..k)
                .map(|p| (0..per_axis).map(|i| spec.eval_g(s * i as f64 * step - p as f64).abs()).collect())
                .collect()
        })
        .collect();
    let screen = |pattern: &[Vec<u32>]| -> f64 {
        (0..cells)
            .into_par_iter()
            .map(|lin| {
                let mut best: f64 = 0.0;
                for (l, p) in pattern.iter().enumerate() {
                    let mut rem = lin;
                    let mut prod = 1.0;
                    for pi in p.iter().rev() {
                        prod *= table[l][*pi as usize][rem % per_axis];
                        rem /= per_axis;
                    }
                    best = best.max(prod);
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_overall = (0.0, Vec::new(), Vec::new());
    for window in 1..=opts.window_max {
        let slots = window * d_prime;
        let space = (k as f64).powi(slots as i32);
        let patterns: Vec<Vec<Vec<u32>>> = if space <= opts.budget as f64 {
            (0..space as usize).map(|code| decode(code, k, window, d_prime)).collect()
        } else {
            let mut codes: Vec<Vec<u32>> = Vec::with_capacity(opts.budget);
            for _ in 0..opts.budget {
                let digits: Vec<u32> = (0..slots).map(|_| rng.gen_range(0..k as u32)).collect();
                codes.push(digits);
            }
            codes.into_iter().map(|d| d.chunks(d_prime).map(<[u32]>::to_vec).collect()).collect()
        };
        let mut scored: Vec<(f64, usize)> = patterns.iter().enumerate().map(|(i, p)| (screen(p), i)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(f64, usize)> = None;
        for &(coarse, i) in scored.iter().take(opts.finalists) {
            if coarse < opts.alpha_min.powi(d_prime as i32) {
                break;
            }
            let (alpha, worst) = certify(spec, &patterns[i], opts.grid_log2);
            if alpha > best_overall.0 {
                best_overall = (alpha, worst, patterns[i].clone());
            }
            if alpha >= opts.alpha_min && best.is_none_or(|b| alpha > b.0) {
                best = Some((alpha, i));
            }
        }
        if let Some((alpha, i)) = best {
            return Ok(OffsetSchedule::from_pattern(k, patterns[i].clone(), j_max, alpha, opts.grid_log2));
        }
    }
    Err(Error::Search(format!(
        "no window up to {} certifies α ≥ {} on the 2^-{} grid; best α = {:.3e} for pattern {:?}, worst y = {:?}",
        opts.window_max, opts.alpha_min, opts.grid_log2, best_overall.0, best_overall.2, best_overall.1
    )))
}

fn decode(mut code: usize, k: usize, window: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; d]; window];
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = (code % k) as u32;
            code /= k;
        }
    }
    out
}

/// Independent re-check of a schedule at another resolution; passes when the
/// new floor is at least `α/2`.
pub fn recertify(spec: &WaveletSpec, schedule: &OffsetSchedule, grid_log2: u32) -> (f64, bool) {
    let (alpha, _) = certify(spec, &schedule.pattern, grid_log2);
    (alpha, alpha >= schedule.alpha / 2.0)
}

//! Small numerical kernels shared by the estimators.

use rayon::prelude::*;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.add(other.sum);
        self.add(other.comp);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `log2 Σ 2^{q·l_i}` over the finite entries of `log2_values`.
///
/// Entries equal to `-inf` (zero masses) are skipped, which realizes the
/// convention `0^q = 0` for every `q`. Returns `-inf` when nothing remains.
pub fn log2_sum_pow(log2_values: &[f64], q: f64) -> f64 {
    let peak = log2_values
        .par_iter()
        .filter(|v| v.is_finite())
        .map(|&v| q * v)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return f64::NEG_INFINITY;
    }
    let total = log2_values
        .par_chunks(1 << 14)
        .map(|chunk| {
            let mut acc = CompensatedSum::default();
            for &v in chunk {
                if v.is_finite() {
                    acc.add((q * v - peak).exp2());
                }
            }
            acc
        })
        .reduce(CompensatedSum::default, CompensatedSum::merge);
    peak + total.value().log2()
}

/// Finite entries of `values` grouped as `(value, multiplicity)`, sorted.
/// Zero masses (`-inf`) are dropped.
pub fn group_counts(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.par_sort_unstable_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some((y, c)) if *y == x => *c += 1.0,
            _ => out.push((x, 1.0)),
        }
    }
    out
}

/// [`log2_sum_pow`] over grouped values from [`group_counts`].
pub fn log2_sum_pow_grouped(groups: &[(f64, f64)], q: f64) -> f64 {
    let peak = groups.iter().map(|(v, _)| q * v).fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for (v, c) in groups {
        acc.add(c * (q * v - peak).exp2());
    }
    peak + acc.value().log2()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Slope and intercept of the least-squares line.
pub fn ls_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let slope = ls_slope(xs, ys);
    let n = xs.len() as f64;
    let intercept = (ys.iter().sum::<f64>() - slope * xs.iter().sum::<f64>()) / n;
    (slope, intercept)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Grid `lo, lo+step, ...` up to `hi` (inclusive within rounding).
pub fn arange(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + step * i as f64).collect()
}

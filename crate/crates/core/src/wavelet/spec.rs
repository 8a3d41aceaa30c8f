use serde::{Deserialize, Serialize};

use super::taps::{daubechies, daubechies_regularity, parse_name};
use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: u32 = 16;
const TAP_SUM_TOL: f64 = 1e-10;
const MAX_RESOLUTION: u32 = 22;

/// Orthonormal compactly supported wavelet with `φ`, `ψ` tabulated on the
/// dyadic grid of step `2^-R` over `[0, K]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub name: String,
    pub lowpass: Vec<f64>,
    /// `K_ψ`: both `φ` and `ψ` are supported in `[0, K]`.
    pub support: usize,
    pub vanishing_moments: usize,
    pub regularity: f64,
    pub resolution: u32,
    #[serde(skip)]
    phi: Vec<f64>,
    #[serde(skip)]
    psi: Vec<f64>,
}

impl WaveletSpec {
    /// `"db1"` ... `"db10"` (or `"haar"`) at table resolution `R`.
    pub fn daubechies(name: &str, resolution: u32) -> Result<Self> {
        let order =
            parse_name(name).ok_or_else(|| Error::Construction(format!("unknown wavelet {name:?}")))?;
        let taps = daubechies(order).expect("parsed order is tabulated");
        let regularity = daubechies_regularity(order).expect("parsed order is tabulated");
        Self::from_taps(&format!("db{order}"), taps, regularity, resolution)
    }

    /// Build from arbitrary lowpass taps (reconstruction ordering).
    pub fn from_taps(name: &str, taps: &[f64], regularity: f64, resolution: u32) -> Result<Self> {
        let l = taps.len();
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::Construction(format!("filter length {l} must be even and ≥ 2")));
        }
        if !(10..=MAX_RESOLUTION).contains(&resolution) {
            return Err(Error::Construction(format!(
                "table resolution {resolution} outside 10..={MAX_RESOLUTION}"
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::Construction("non-finite taps".into()));
        }
        let sum: f64 = taps.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > TAP_SUM_TOL {
            return Err(Error::Construction(format!("taps sum to {sum}, expected √2")));
        }
        let energy: f64 = taps.iter().map(|t| t * t).sum();
        if (energy - 1.0).abs() > 1e-8 {
            return Err(Error::Construction(format!("taps have energy {energy}, expected 1")));
        }
        let k = l - 1;
        let integers = integer_values(taps)?;
        let (phi, psi) = refine(taps, &integers, resolution);
        let peak = phi.iter().chain(&psi).fold(0.0f64, |m, v| m.max(v.abs()));
        if !(peak.is_finite() && peak < 1e3) {
            return Err(Error::Construction(format!("cascade iteration diverges (peak {peak:e})")));
        }
        Ok(Self {
            name: name.to_string(),
            lowpass: taps.to_vec(),
            support: k,
            vanishing_moments: l / 2,
            regularity,
            resolution,
            phi,
            psi,
        })
    }

    /// A spec with a user-supplied `ψ` table on `[0, K]` (step `2^-R`, `K·2^R + 1`
    /// values) and no scaling function; for experiments on `G` alone.
    pub fn from_psi_table(name: &str, support: usize, resolution: u32, psi: Vec<f64>) -> Result<Self> {
        if psi.len() != (support << resolution) + 1 {
            return Err(Error::Shape(format!("ψ table needs {} values", (support << resolution) + 1)));
        }
        Ok(Self {
            name: name.to_string(),
            lowpass: Vec::new(),
            support,
            vanishing_moments: 0,
            regularity: 0.0,
            resolution,
            phi: vec![0.0; psi.len()],
            psi,
        })
    }

    /// Highpass taps `g_k = (-1)^k h_{L-1-k}`.
    pub fn highpass(&self) -> Vec<f64> {
        let l = self.lowpass.len();
        (0..l).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * self.lowpass[l - 1 - k]).collect()
    }

    pub fn phi_table(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_table(&self) -> &[f64] {
        &self.psi
    }

    pub fn step(&self) -> f64 {
        (-(self.resolution as f64)).exp2()
    }

    fn lookup(&self, table: &[f64], x: f64) -> f64 {
        if !(x >= 0.0 && x <= self.support as f64) {
            return 0.0;
        }
        let t = x * (self.resolution as f64).exp2();
        let i = t.floor() as usize;
        if i + 1 >= table.len() {
            return table[table.len() - 1];
        }
        let f = t - i as f64;
        if f == 0.0 {
            table[i]
        } else {
            table[i] * (1.0 - f) + table[i + 1] * f
        }
    }

    pub fn eval_phi(&self, x: f64) -> f64 {
        self.lookup(&self.phi, x)
    }

    pub fn eval_psi(&self, x: f64) -> f64 {
        self.lookup(&self.psi, x)
    }

    /// `ψ^l`: `φ` for `l = 0`, `ψ` for `l = 1`.
    pub fn eval_oriented(&self, orientation: u8, x: f64) -> f64 {
        if orientation == 0 {
            self.eval_phi(x)
        } else {
            self.eval_psi(x)
        }
    }

    /// `G(x) = Σ_n ψ(x − nK)`, the `K`-periodization of `ψ`.
    pub fn eval_g(&self, x: f64) -> f64 {
        let k = self.support as f64;
        self.eval_psi(x.rem_euclid(k))
    }

    /// `∫ x^m ψ(x) dx` by the trapezoid rule on the table.
    pub fn psi_moment(&self, m: i32) -> f64 {
        let h = self.step();
        let n = self.psi.len();
        let mut s = 0.0;
        for (i, v) in self.psi.iter().enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * v * (i as f64 * h).powi(m);
        }
        s * h
    }
}

/// Values of `φ` at `0..=K`: the eigenvector of `M_{ij} = √2 h_{2i−j}` for
/// eigenvalue 1, normalized to unit sum.
fn integer_values(taps: &[f64]) -> Result<Vec<f64>> {
    let l = taps.len();
    let k = l - 1;
    if l == 2 {
        // Haar: M is the identity; the half-open convention picks φ(0) = 1, φ(1) = 0.
        return Ok(vec![1.0, 0.0]);
    }
    let n = k + 1;
    let s2 = std::f64::consts::SQRT_2;
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for j in 0..n {
            let idx = 2 * i as isize - j as isize;
            let h = if (0..l as isize).contains(&idx) { taps[idx as usize] } else { 0.0 };
            row[j] = s2 * h - if i == j { 1.0 } else { 0.0 };
        }
    }
    // (M − I) has rank n − 1; swap one equation for the normalization Σ φ(m) = 1.
    for j in 0..n {
        a[n - 1][j] = 1.0;
    }
    a[n - 1][n] = 1.0;
    solve(&mut a).ok_or_else(|| Error::Construction("refinement matrix has no unique fixed point".into()))
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` matrix.
fn solve(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Exact values of `φ` and `ψ` on the dyadic grid of step `2^-R`, by
/// repeated application of the two-scale relations.
fn refine(taps: &[f64], integers: &[f64], resolution: u32) -> (Vec<f64>, Vec<f64>) {
    let k = taps.len() - 1;
    let scale = 1usize << resolution;
    let len = k * scale + 1;
    let s2 = std::f64::consts::SQRT_2;
    let mut phi = vec![0.0; len];
    for (m, v) in integers.iter().enumerate() {
        phi[m * scale] = *v;
    }
    // φ(i 2^-R) = √2 Σ_n h_n φ(2i 2^-R − n), the right side living on the coarser grid
    let at = |phi: &[f64], idx: isize| -> f64 {
        if idx < 0 || idx as usize >= len {
            0.0
        } else {
            phi[idx as usize]
        }
    };
    for r in 1..=resolution {
        let stride = 1usize << (resolution - r);
        let mut i = stride;
        while i < len {
            let mut s = 0.0;
            for (n, h) in taps.iter().enumerate() {
                s += h * at(&phi, 2 * i as isize - (n * scale) as isize);
            }
            phi[i] = s2 * s;
            i += 2 * stride;
        }
    }
    let l = taps.len();
    let g: Vec<f64> = (0..l).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * taps[l - 1 - n]).collect();
    let psi = (0..len)
        .map(|i| s2 * g.iter().enumerate().map(|(n, gn)| gn * at(&phi, 2 * i as isize - (n * scale) as isize)).sum::<f64>())
        .collect();
    (phi, psi)
}

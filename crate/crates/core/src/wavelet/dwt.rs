use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::WaveletSpec;
use crate::error::{Error, Result};

/// Periodic multilevel transform of `2^J` samples on `[0, 1)`.
///
/// `details[i]` holds level `coarsest + i` in the sup-norm convention
/// `c_{j,k} = 2^j ∫ f ψ(2^j x − k) dx`; `approx` holds the orthonormal
/// scaling coefficients at level `coarsest`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicDwt {
    pub top_level: u32,
    pub coarsest: u32,
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub prefiltered: bool,
}

impl PeriodicDwt {
    pub fn detail(&self, level: u32) -> Option<&[f64]> {
        level.checked_sub(self.coarsest).and_then(|i| self.details.get(i as usize)).map(Vec::as_slice)
    }
}

fn log2_len(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Shape(format!("sample count {n} is not a power of two")));
    }
    Ok(n.trailing_zeros())
}

/// Circular kernel of `φ` at the integers and its spectrum.
fn phi_spectrum(spec: &WaveletSpec, n: usize) -> Vec<Complex<f64>> {
    let mut kern = vec![Complex::new(0.0, 0.0); n];
    for m in 0..=spec.support {
        kern[m % n].re += spec.eval_phi(m as f64);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut kern);
    kern
}

fn circular(spec: &WaveletSpec, data: &[f64], inverse_kernel: bool) -> Result<Vec<f64>> {
    let n = data.len();
    let kern = phi_spectrum(spec, n);
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = data.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (b, k) in buf.iter_mut().zip(&kern) {
        if inverse_kernel {
            if k.norm() < 1e-12 {
                return Err(Error::Precondition("φ symbol vanishes; prefilter not invertible".into()));
            }
            *b /= *k;
        } else {
            *b *= *k;
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf.iter().map(|c| c.re / n as f64).collect())
}

/// Forward transform over `levels` levels.
///
/// With `prefilter`, samples `f(n 2^-J)` are deconvolved by `φ` at the
/// integers so that any `f ∈ V_J` has its exact coefficients recovered;
/// otherwise `a_J = 2^{-J/2} · samples`.
pub fn dwt_periodic(samples: &[f64], spec: &WaveletSpec, levels: u32, prefilter: bool) -> Result<PeriodicDwt> {
    let top = log2_len(samples.len())?;
    if levels > top {
        return Err(Error::Shape(format!("{levels} levels requested from 2^{top} samples")));
    }
    if samples.len() < spec.lowpass.len() {
        return Err(Error::Shape("fewer samples than filter taps".into()));
    }
    let norm = (-(top as f64) / 2.0).exp2();
    let mut a: Vec<f64> = if prefilter {
        circular(spec, samples, true)?.into_iter().map(|v| v * norm).collect()
    } else {
        samples.iter().map(|v| v * norm).collect()
    };
    let h = &spec.lowpass;
    let g = spec.highpass();
    let mut details = Vec::with_capacity(levels as usize);
    for j in (top - levels..top).rev() {
        let half = 1usize << j;
        let n = 2 * half;
        let mut approx = vec![0.0; half];
        let mut det = vec![0.0; half];
        for k in 0..half {
            let (mut s, mut d) = (0.0, 0.0);
            for (t, (hn, gn)) in h.iter().zip(&g).enumerate() {
                let v = a[(2 * k + t) % n];
                s += hn * v;
                d += gn * v;
            }
            approx[k] = s;
            det[k] = d * (j as f64 / 2.0).exp2();
        }
        details.push(det);
        a = approx;
    }
    details.reverse();
    Ok(PeriodicDwt { top_level: top, coarsest: top - levels, approx: a, details, prefiltered: prefilter })
}

/// Inverse of [`dwt_periodic`].
pub fn idwt_periodic(t: &PeriodicDwt, spec: &WaveletSpec) -> Result<Vec<f64>> {
    if t.details.len() as u32 != t.top_level - t.coarsest || t.approx.len() != 1 << t.coarsest {
        return Err(Error::Shape("inconsistent transform layout".into()));
    }
    let h = &spec.lowpass;
    let g = spec.highpass();
    let mut a = t.approx.clone();
    for (i, det) in t.details.iter().enumerate() {
        let j = t.coarsest + i as u32;
        let half = 1usize << j;
        if det.len() != half {
            return Err(Error::Shape(format!("level {j} has {} details", det.len())));
        }
        let n = 2 * half;
        let scale = (-(j as f64) / 2.0).exp2();
        let mut next = vec![0.0; n];
        for k in 0..half {
            let d = det[k] * scale;
            for (tp, (hn, gn)) in h.iter().zip(&g).enumerate() {
                next[(2 * k + tp) % n] += hn * a[k] + gn * d;
            }
        }
        a = next;
    }
    let norm = (t.top_level as f64 / 2.0).exp2();
    let out: Vec<f64> = a.into_iter().map(|v| v * norm).collect();
    if t.prefiltered {
        circular(spec, &out, false)
    } else {
        Ok(out)
    }
}

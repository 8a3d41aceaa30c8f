use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `Z^D`-periodic potential on `R^D`, evaluated through its restriction to `[0,1)^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    Constant { dim: usize, value: f64 },
    /// Values on a regular `side^dim` grid (row-major, first axis major),
    /// interpolated multilinearly with periodic wrap.
    Table { dim: usize, side: usize, values: Vec<f64> },
    /// `Σ amplitude · cos(2π ⟨frequency, x⟩ + phase)`.
    Cosine { dim: usize, terms: Vec<CosineTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    pub amplitude: f64,
    pub frequency: Vec<i32>,
    #[serde(default)]
    pub phase: f64,
}

impl Potential {
    pub fn dim(&self) -> usize {
        match self {
            Potential::Constant { dim, .. }
            | Potential::Table { dim, .. }
            | Potential::Cosine { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::Construction("potential dimension must be positive".into()));
        }
        match self {
            Potential::Constant { value, .. } if !value.is_finite() => {
                Err(Error::Construction("potential constant must be finite".into()))
            }
            Potential::Table { dim, side, values } => {
                if *side == 0 || values.len() != side.pow(*dim as u32) {
                    return Err(Error::Construction(format!(
                        "potential table needs {side}^{dim} values, got {}",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Construction("potential table has non-finite values".into()));
                }
                Ok(())
            }
            Potential::Cosine { dim, terms } => {
                if terms.iter().any(|t| t.frequency.len() != *dim || !t.amplitude.is_finite()) {
                    return Err(Error::Construction("cosine term does not match potential dimension".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Value at `x`; coordinates are reduced modulo 1.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Constant { value, .. } => *value,
            Potential::Cosine { terms, .. } => terms
                .iter()
                .map(|t| {
                    let arg: f64 = t.frequency.iter().zip(x).map(|(&f, &xi)| f as f64 * xi).sum();
                    t.amplitude * (std::f64::consts::TAU * arg + t.phase).cos()
                })
                .sum(),
            Potential::Table { dim, side, values } => {
                let n = *side;
                // multilinear interpolation over the 2^dim surrounding nodes
                let mut base = vec![0usize; *dim];
                let mut frac = vec![0.0; *dim];
                for i in 0..*dim {
                    let t = x[i].rem_euclid(1.0) * n as f64;
                    let f = t.floor();
                    base[i] = (f as usize) % n;
                    frac[i] = t - f;
                }
                let mut total = 0.0;
                for corner in 0..1usize << dim {
                    let mut w = 1.0;
                    let mut lin = 0usize;
                    for i in 0..*dim {
                        let bit = (corner >> (dim - 1 - i)) & 1;
                        w *= if bit == 1 { frac[i] } else { 1.0 - frac[i] };
                        lin = lin * n + (base[i] + bit) % n;
                    }
                    if w != 0.0 {
                        total += w * values[lin];
                    }
                }
                total
            }
        }
    }

    /// Birkhoff sum `Σ_{k<n} φ(2^k x)`.
    pub fn birkhoff_sum(&self, x: &[f64], n: u32) -> f64 {
        let mut y: Vec<f64> = x.iter().map(|v| v.rem_euclid(1.0)).collect();
        let mut s = 0.0;
        for _ in 0..n {
            s += self.eval(&y);
            for v in y.iter_mut() {
                *v = (2.0 * *v).rem_euclid(1.0);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_periodically() {
        let p = Potential::Table { dim: 1, side: 4, values: vec![0.0, 1.0, 2.0, 3.0] };
        p.validate().unwrap();
        assert!((p.eval(&[0.125]) - 0.5).abs() < 1e-12);
        // between the last node and the wrapped first one
        assert!((p.eval(&[0.875]) - 1.5).abs() < 1e-12);
        assert!((p.eval(&[1.125]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn table_size_checked() {
        let p = Potential::Table { dim: 2, side: 3, values: vec![0.0; 8] };
        assert!(p.validate().is_err());
    }

    #[test]
    fn birkhoff_sum_of_constant() {
        let p = Potential::Constant { dim: 2, value: 0.5 };
        assert_eq!(p.birkhoff_sum(&[0.3, 0.7], 6), 3.0);
    }

    #[test]
    fn cosine_eval() {
        let p = Potential::Cosine {
            dim: 1,
            terms: vec![CosineTerm { amplitude: 2.0, frequency: vec![1], phase: 0.0 }],
        };
        assert!((p.eval(&[0.5]) + 2.0).abs() < 1e-12);
    }
}

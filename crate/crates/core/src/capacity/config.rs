use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::potential::Potential;
use super::CapacityModel;
use crate::error::{Error, Result};

fn default_scan_level() -> u32 {
    12
}

/// JSON description of a capacity. Composite kinds nest; `ref` looks a
/// definition up by name in the surrounding table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacitySpec {
    Cascade {
        weights: Vec<f64>,
        #[serde(default)]
        dim: Option<usize>,
    },
    Binomial {
        p0: f64,
    },
    Lebesgue {
        dim: usize,
    },
    Gibbs {
        potential: Potential,
        depth: u32,
    },
    Power {
        base: Box<CapacitySpec>,
        exponent: f64,
    },
    Shifted {
        base: Box<CapacitySpec>,
        exponent: f64,
        #[serde(default = "default_scan_level")]
        scan_level: u32,
    },
    Product {
        left: Box<CapacitySpec>,
        right: Box<CapacitySpec>,
    },
    Auxiliary {
        base: Box<CapacitySpec>,
        r: f64,
    },
    Ref {
        name: String,
    },
}

impl CapacitySpec {
    /// Build the model, resolving `ref` entries against `named`.
    pub fn build(&self, named: &BTreeMap<String, CapacitySpec>) -> Result<CapacityModel> {
        self.build_depth(named, 0)
    }

    fn build_depth(&self, named: &BTreeMap<String, CapacitySpec>, depth: usize) -> Result<CapacityModel> {
        if depth > 32 {
            return Err(Error::Construction("capacity references nest too deeply (cycle?)".into()));
        }
        let sub = |s: &CapacitySpec| s.build_depth(named, depth + 1);
        match self {
            Self::Cascade { weights, dim } => {
                let d = match dim {
                    Some(d) => *d,
                    None => {
                        let n = weights.len();
                        if n < 2 || !n.is_power_of_two() {
                            return Err(Error::Construction(format!(
                                "cascade needs 2^D weights, got {n}"
                            )));
                        }
                        n.trailing_zeros() as usize
                    }
                };
                CapacityModel::cascade(d, weights.clone())
            }
            Self::Binomial { p0 } => {
                if !(0.0..=1.0).contains(p0) {
                    return Err(Error::Construction(format!("binomial weight {p0} outside [0,1]")));
                }
                CapacityModel::binomial(*p0)
            }
            Self::Lebesgue { dim } => {
                if *dim == 0 {
                    return Err(Error::Construction("dimension must be positive".into()));
                }
                Ok(CapacityModel::lebesgue(*dim))
            }
            Self::Gibbs { potential, depth } => CapacityModel::gibbs(potential.clone(), *depth),
            Self::Power { base, exponent } => CapacityModel::power(sub(base)?, *exponent),
            Self::Shifted { base, exponent, scan_level } => {
                CapacityModel::shifted(sub(base)?, *exponent, *scan_level)
            }
            Self::Product { left, right } => Ok(CapacityModel::product(sub(left)?, sub(right)?)),
            Self::Auxiliary { base, r } => sub(base)?.auxiliary(*r),
            Self::Ref { name } => named
                .get(name)
                .ok_or_else(|| Error::Construction(format!("unknown capacity {name:?}")))?
                .build_depth(named, depth + 1),
        }
    }
}

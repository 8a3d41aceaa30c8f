//! Capacities on dyadic cubes and their multifractal quantities.

mod config;
pub mod diagnostics;
mod goodset;
mod model;
pub mod potential;
mod sampling;
pub mod scaling;

pub use config::CapacitySpec;
pub use diagnostics::{diagnostics, holder_exponents, Diagnostics};
pub use goodset::{good_set_report, point_is_good, GoodSetLevel, GoodSetReport, MassBands};
pub use model::{Cascade, CapacityModel, TreeMeasure};
pub use potential::{CosineTerm, Potential};
pub use sampling::{level_set_cubes, local_dimension, local_dimension_3, sample_point, sample_points, LocalDimension};
pub use scaling::{
    default_level, default_q_grid, dim_aux, h_of_r, legendre_transform, local_table, scaling_function,
    ScalingTable,
};

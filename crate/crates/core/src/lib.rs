//! Distances between Mapper graphs and attributed graphs.
//!
//! A graph is treated as a metric-measure network: nodes carry probability
//! mass and a set of ambient points, the graph supplies an intrinsic
//! shortest-path metric, and the ambient space supplies an extrinsic metric
//! between node sets. On top of that sit exact and entropic optimal
//! transport, Gromov-Wasserstein and its fused variant, eccentricity lower
//! bounds, and the network augmented Wasserstein distance ([`transport::naw`]),
//! which blends eccentricity differences with extrinsic cost and stays
//! finite on disconnected graphs.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which the CLI uses.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod drift;
pub mod graphs;
pub mod mapper;
pub mod mmspace;
pub mod scalar;
pub mod synth;
pub mod transport;

mod error;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Version of the JSON layouts written by this crate (networks, baselines).
pub const SCHEMA_VERSION: u32 = 1;

pub type Cloud = mmspace::PointCloud<f64>;
pub type Cloud32 = mmspace::PointCloud<f32>;
pub type Distances = mmspace::DistanceMatrix<f64>;
pub type Distances32 = mmspace::DistanceMatrix<f32>;
pub type Network = mmspace::MMNetwork<f64>;
pub type Network32 = mmspace::MMNetwork<f32>;
pub type Plan = transport::TransportPlan<f64>;
pub type Plan32 = transport::TransportPlan<f32>;
pub type Baseline = drift::DriftBaseline<f64>;

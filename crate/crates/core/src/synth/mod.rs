//! Synthetic point clouds and network perturbations for checking how
//! distances respond to edge, metric, scale and density changes.

mod generators;
mod perturb;
mod suite;

pub use generators::{make_blobs, make_circles, make_moons, CIRCLES_NOISE, MOONS_NOISE};
pub use perturb::{apply_perturbation, NodeSelector, PerturbationSpec};
pub use suite::{ring_components, run_suite, SuiteConfig, SuiteReport};

//! The four perturbation families run against fixed two-moons and
//! concentric-circles Mapper graphs, with the distance orderings each family
//! is expected to produce.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graphs::{lambda_distance, SpectralMatrix};
use crate::mapper::{build_mapper, MapperConfig};
use crate::mmspace::MMNetwork;
use crate::transport::naw;

use super::{apply_perturbation, make_circles, make_moons, NodeSelector, PerturbationSpec};

/// Data and perturbation parameters for [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub points: usize,
    pub resolution: usize,
    pub gain: f64,
    pub moons_noise: f64,
    pub circles_ratio: f64,
    pub circles_noise: f64,
    pub intra_edges: usize,
    /// Shift of the inner ring that keeps it inside the outer ring.
    pub inside_shift: f64,
    /// Shift that moves the inner ring outside the outer ring.
    pub outside_shift: f64,
    pub mass_fraction: f64,
    /// Tolerance for the left/right translation equality.
    pub symmetry_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            points: 400,
            resolution: 6,
            gain: 0.4,
            moons_noise: super::MOONS_NOISE,
            circles_ratio: 0.5,
            circles_noise: super::CIRCLES_NOISE,
            intra_edges: 2,
            inside_shift: 0.15,
            outside_shift: 2.0,
            mass_fraction: 0.5,
            symmetry_tol: 1e-6,
        }
    }
}

/// Distances from each base graph to its three perturbations, in the order
/// the perturbations are listed on [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub edge: [f64; 3],
    pub metric: [f64; 3],
    /// Laplacian then adjacency λ-distances for the three translations.
    pub metric_lambda: [[f64; 3]; 2],
    pub density: [f64; 3],
    pub scale: [f64; 3],
}

impl SuiteReport {
    pub fn edge_ok(&self) -> bool {
        self.edge[0] < self.edge[1] && self.edge[1] < self.edge[2]
    }

    pub fn metric_ok(&self, tol: f64) -> bool {
        (self.metric[0] - self.metric[1]).abs() <= tol && self.metric[0].max(self.metric[1]) < self.metric[2]
    }

    pub fn metric_lambda_ok(&self) -> bool {
        self.metric_lambda.iter().flatten().all(|&d| d == 0.0)
    }

    pub fn density_ok(&self) -> bool {
        self.density[0] < self.density[1] && self.density[1] < self.density[2]
    }

    pub fn scale_ok(&self) -> bool {
        self.scale[2] > self.scale[0] && self.scale[2] > self.scale[1]
    }

    /// All five orderings at once.
    pub fn all_ok(&self, tol: f64) -> bool {
        self.edge_ok() && self.metric_ok(tol) && self.metric_lambda_ok() && self.density_ok() && self.scale_ok()
    }
}

/// (inner, outer) component indices of a two-ring graph, by mean point norm.
pub fn ring_components(x: &MMNetwork<f64>) -> Result<(usize, usize)> {
    if x.component_count() != 2 {
        return Err(Error::invalid(format!("expected two rings, found {} components", x.component_count())));
    }
    let radius = |c: usize| {
        let pts = x.component_points(c);
        pts.iter().map(|&p| x.cloud().point(p).iter().map(|v| v * v).sum::<f64>().sqrt()).sum::<f64>() / pts.len() as f64
    };
    Ok(if radius(0) < radius(1) { (0, 1) } else { (1, 0) })
}

/// Runs every family under NAW for one data seed:
///
/// * edges (moons): intra-component edges, connect nearest, connect farthest;
/// * metric (circles): shift the inner ring right, left, then outside;
/// * density (circles): move outer-ring mass to the top outer node, to the
///   top inner node, then onto a new isolated node at the center;
/// * scale (moons): half resolution, double resolution, collapse.
pub fn run_suite(cfg: &SuiteConfig, seed: u64) -> Result<SuiteReport> {
    use PerturbationSpec::*;
    let mapper = MapperConfig::new(cfg.resolution, cfg.gain)?;
    let moons = build_mapper(Arc::new(make_moons::<f64>(cfg.points, cfg.moons_noise, seed)?), &mapper)?;
    let circles =
        build_mapper(Arc::new(make_circles::<f64>(cfg.points, cfg.circles_ratio, cfg.circles_noise, seed)?), &mapper)?;
    let (inner, outer) = ring_components(&circles)?;

    let against = |base: &MMNetwork<f64>, specs: [PerturbationSpec; 3]| -> Result<([f64; 3], Vec<MMNetwork<f64>>)> {
        let mut d = [0.0; 3];
        let mut nets = Vec::with_capacity(3);
        for (slot, spec) in d.iter_mut().zip(&specs) {
            let y = apply_perturbation(base, spec)?;
            *slot = naw(base, &y)?;
            nets.push(y);
        }
        Ok((d, nets))
    };

    let (edge, _) = against(
        &moons,
        [AddIntraEdges { per_component: cfg.intra_edges }, ConnectNear { components: None }, ConnectFar { components: None }],
    )?;
    let shift = |dx: f64| TranslateComponent { component: inner, offset: vec![dx, 0.0] };
    let (metric, shifted) = against(&circles, [shift(cfg.inside_shift), shift(-cfg.inside_shift), shift(cfg.outside_shift)])?;
    let mut metric_lambda = [[0.0; 3]; 2];
    for (row, kind) in metric_lambda.iter_mut().zip([SpectralMatrix::Laplacian, SpectralMatrix::Adjacency]) {
        for (slot, y) in row.iter_mut().zip(&shifted) {
            *slot = lambda_distance(&circles, y, kind, None)?;
        }
    }
    let top = |component| NodeSelector::Extreme { component, axis: 1, highest: true };
    let (density, _) = against(
        &circles,
        [
            ReallocateMass { source: outer, target: top(outer), fraction: cfg.mass_fraction },
            ReallocateMass { source: outer, target: top(inner), fraction: cfg.mass_fraction },
            AddComponent { location: None, fraction: cfg.mass_fraction, source: Some(outer) },
        ],
    )?;
    let (scale, _) = against(&moons, [RescaleResolution { factor: 0.5 }, RescaleResolution { factor: 2.0 }, Collapse])?;
    Ok(SuiteReport { seed, edge, metric, metric_lambda, density, scale })
}

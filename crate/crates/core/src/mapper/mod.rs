//! Mapper graphs: lens, overlapping interval cover, partial clustering of
//! each pullback set, and the 1-skeleton of the nerve of the refined cover.

mod cluster;
mod cover;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cluster::{cluster_within, ClusterMethod};
pub use cover::{build_cover, Cover, CoverSpec, Lens, LensKind, LensSpec};

use crate::error::Result;
use crate::mmspace::{CloudMetric, EdgeWeight, ExtrinsicMode, MMNetwork, NetworkOptions, PointCloud, PointMetric};
use crate::scalar::Scalar;

/// Everything needed to rebuild a Mapper graph from a cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapperConfig {
    #[serde(default)]
    pub lens: LensSpec,
    pub cover: CoverSpec,
    #[serde(default)]
    pub clustering: ClusterMethod,
    #[serde(default)]
    pub metric: PointMetric,
    #[serde(default)]
    pub edge_weight: EdgeWeight,
}

impl MapperConfig {
    pub fn new(resolution: usize, gain: f64) -> Result<Self> {
        Ok(MapperConfig {
            lens: LensSpec::default(),
            cover: CoverSpec::new(resolution, gain)?,
            clustering: ClusterMethod::default(),
            metric: PointMetric::Euclidean,
            edge_weight: EdgeWeight::Extrinsic,
        })
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        let mut out = self.clone();
        out.cover.resolution = resolution;
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.cover.validate()?;
        self.clustering.validate()
    }

    fn network_options(&self) -> NetworkOptions {
        NetworkOptions { metric: self.metric, extrinsic: ExtrinsicMode::Hausdorff, edge_weight: self.edge_weight }
    }
}

/// Builds the Mapper graph of `cloud` with the lens described by the config.
pub fn build_mapper<T: Scalar>(cloud: Arc<PointCloud<T>>, config: &MapperConfig) -> Result<MMNetwork<T>> {
    let lens = config.lens.evaluate(&cloud)?;
    build_mapper_with_lens(cloud, &lens, config)
}

/// Builds the Mapper graph with an explicit lens (the config's lens field is
/// kept only as provenance).
///
/// Nodes are ordered by (interval index, smallest point id). Two nodes are
/// joined iff their point sets intersect.
pub fn build_mapper_with_lens<T: Scalar>(
    cloud: Arc<PointCloud<T>>,
    lens: &Lens<T>,
    config: &MapperConfig,
) -> Result<MMNetwork<T>> {
    config.validate()?;
    if lens.len() != cloud.len() {
        return Err(crate::Error::DimensionMismatch { expected: cloud.len(), found: lens.len() });
    }
    config.metric.validate(&cloud)?;
    let cover = build_cover(lens, &config.cover)?;
    let d = CloudMetric::new(&cloud, config.metric);
    let per_interval: Vec<Vec<Vec<usize>>> = cover
        .members
        .par_iter()
        .map(|member| if member.is_empty() { Vec::new() } else { cluster_within(member, &d, &config.clustering) })
        .collect();
    let node_sets: Vec<Vec<usize>> = per_interval.into_iter().flatten().collect();
    let edges = nerve_edges(cloud.len(), &node_sets);
    let net = MMNetwork::new(cloud, node_sets, edges, None, config.network_options())?;
    Ok(net.with_mapper_config(config.clone()))
}

/// Pairs of nodes whose point sets share a point, sorted.
pub fn nerve_edges(n_points: usize, node_sets: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); n_points];
    for (v, set) in node_sets.iter().enumerate() {
        for &p in set {
            owners[p].push(v);
        }
    }
    let mut edges: Vec<(usize, usize)> = owners
        .iter()
        .flat_map(|o| (0..o.len()).flat_map(move |a| (a + 1..o.len()).map(move |b| (o[a], o[b]))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

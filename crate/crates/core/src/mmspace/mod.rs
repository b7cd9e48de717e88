//! Point clouds, distance matrices, measures and metric-measure networks.

mod cloud;
mod distance;
mod json;
mod measure;
mod network;

pub use cloud::{PointCloud, PointMetric};
pub use distance::{hausdorff_between, hausdorff_distance, write_matrix_csv, CloudMetric, Dissimilarity, DistanceMatrix};
pub use json::{NetworkDocument, NodeEntry};
pub use measure::{node_measure, Measure};
pub use network::{
    cross_extrinsic, intrinsic_shortest_paths, pairwise_extrinsic, EdgeWeight, ExtrinsicMode, MMNetwork,
    NetworkOptions,
};

pub(crate) use network::{check_compatible, DisjointSets};

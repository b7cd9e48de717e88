use std::sync::Arc;

use ndarray::Array2;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cloud::{PointCloud, PointMetric};
use super::distance::{hausdorff_between, DistanceMatrix};
use super::measure::{node_measure, Measure};
use crate::error::{Error, Result};
use crate::mapper::MapperConfig;
use crate::scalar::Scalar;

/// How the extrinsic distance between two nodes is derived from their point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtrinsicMode {
    /// Hausdorff distance between the node sets (Mapper graphs).
    #[default]
    Hausdorff,
    /// Every node is a single point; distance between the points (attributed graphs).
    SinglePoint,
}

/// Edge lengths used for the intrinsic shortest-path metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeWeight {
    /// Extrinsic distance between the endpoint nodes.
    #[default]
    Extrinsic,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NetworkOptions {
    #[serde(default)]
    pub metric: PointMetric,
    #[serde(default)]
    pub extrinsic: ExtrinsicMode,
    #[serde(default)]
    pub edge_weight: EdgeWeight,
}

impl NetworkOptions {
    pub fn attributed() -> Self {
        NetworkOptions { metric: PointMetric::Euclidean, extrinsic: ExtrinsicMode::SinglePoint, edge_weight: EdgeWeight::Unit }
    }
}

/// A graph-structured metric-measure space embedded in an ambient point cloud.
///
/// Node `i` stands for the points `node_sets[i]` of `cloud`. The intrinsic
/// matrix holds shortest-path distances (unreachable across components), the
/// extrinsic matrix holds ambient distances between node sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MMNetwork<T> {
    cloud: Arc<PointCloud<T>>,
    node_sets: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    mass: Measure<T>,
    options: NetworkOptions,
    extrinsic: DistanceMatrix<T>,
    intrinsic: DistanceMatrix<T>,
    components: Vec<usize>,
    component_count: usize,
    mapper: Option<MapperConfig>,
}

impl<T: Scalar> MMNetwork<T> {
    /// Validates the parts and derives the distance matrices. Node sets are
    /// sorted and deduplicated; edges are normalized to `(lo, hi)` and
    /// deduplicated. Without an explicit mass the node measure is used.
    pub fn new(
        cloud: Arc<PointCloud<T>>,
        node_sets: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
        mass: Option<Measure<T>>,
        options: NetworkOptions,
    ) -> Result<Self> {
        if node_sets.is_empty() {
            return Err(Error::invalid("network has no nodes"));
        }
        options.metric.validate(&cloud)?;
        let mut node_sets = node_sets;
        for (i, set) in node_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::invalid(format!("node {i} has an empty point set")));
            }
            if let Some(&p) = set.iter().find(|&&p| p >= cloud.len()) {
                return Err(Error::invalid(format!(
                    "node {i} references point {p}, cloud has {} points",
                    cloud.len()
                )));
            }
        }
        let n = node_sets.len();
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| {
                if u >= n || v >= n {
                    Err(Error::invalid(format!("edge ({u},{v}) references a missing node")))
                } else if u == v {
                    Err(Error::invalid(format!("self-loop on node {u}")))
                } else {
                    Ok((u.min(v), u.max(v)))
                }
            })
            .collect::<Result<_>>()?;
        edges.sort_unstable();
        edges.dedup();

        let mass = match mass {
            Some(m) => m,
            None => node_measure(&node_sets)?,
        };
        if mass.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: mass.len() });
        }
        if let Some(i) = mass.weights().iter().position(|w| !(*w > T::zero())) {
            return Err(Error::invalid(format!("node {i} has nonpositive mass")));
        }

        let extrinsic = pairwise_extrinsic(&cloud, &node_sets, options.metric, options.extrinsic)?;
        let intrinsic = intrinsic_shortest_paths(n, &edges, options.edge_weight, &extrinsic);
        let (components, component_count) = component_labels(n, &edges);
        Ok(MMNetwork {
            cloud,
            node_sets,
            edges,
            mass,
            options,
            extrinsic,
            intrinsic,
            components,
            component_count,
            mapper: None,
        })
    }

    /// Attaches the Mapper configuration the network was built with.
    pub fn with_mapper_config(mut self, config: MapperConfig) -> Self {
        self.mapper = Some(config);
        self
    }

    /// Same structure with a different node measure.
    pub fn with_mass(&self, mass: Measure<T>) -> Result<Self> {
        if mass.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: mass.len() });
        }
        if let Some(i) = mass.weights().iter().position(|w| !(*w > T::zero())) {
            return Err(Error::invalid(format!("node {i} has nonpositive mass")));
        }
        let mut out = self.clone();
        out.mass = mass;
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.node_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_sets.is_empty()
    }

    pub fn cloud(&self) -> &Arc<PointCloud<T>> {
        &self.cloud
    }

    pub fn node_sets(&self) -> &[Vec<usize>] {
        &self.node_sets
    }

    pub fn node_set(&self, i: usize) -> &[usize] {
        &self.node_sets[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn mass(&self) -> &Measure<T> {
        &self.mass
    }

    pub fn options(&self) -> NetworkOptions {
        self.options
    }

    pub fn extrinsic(&self) -> &DistanceMatrix<T> {
        &self.extrinsic
    }

    pub fn intrinsic(&self) -> &DistanceMatrix<T> {
        &self.intrinsic
    }

    pub fn mapper_config(&self) -> Option<&MapperConfig> {
        self.mapper.as_ref()
    }

    /// Component label of each node; labels are ordered by smallest member.
    pub fn component_labels(&self) -> &[usize] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }

    pub fn component_members(&self, component: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.components[i] == component).collect()
    }

    /// All points belonging to any node of the component, sorted, no repeats.
    pub fn component_points(&self, component: usize) -> Vec<usize> {
        let mut pts: Vec<usize> = self
            .component_members(component)
            .into_iter()
            .flat_map(|v| self.node_sets[v].iter().copied())
            .collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    pub fn node_centroid(&self, i: usize) -> Vec<T> {
        let set = &self.node_sets[i];
        let mut acc = vec![T::zero(); self.cloud.dim()];
        for &p in set {
            for (a, x) in acc.iter_mut().zip(self.cloud.point(p)) {
                *a = *a + *x;
            }
        }
        let k = T::lit(set.len() as f64);
        acc.into_iter().map(|a| a / k).collect()
    }

    /// Extrinsic node distances under the given mode, ignoring the network's own setting.
    pub fn pairwise_extrinsic(&self, mode: ExtrinsicMode) -> Result<DistanceMatrix<T>> {
        pairwise_extrinsic(&self.cloud, &self.node_sets, self.options.metric, mode)
    }

    pub fn intrinsic_shortest_paths(&self, weighting: EdgeWeight) -> DistanceMatrix<T> {
        intrinsic_shortest_paths(self.len(), &self.edges, weighting, &self.extrinsic)
    }
}

/// Extrinsic distance matrix between node sets of one cloud.
pub fn pairwise_extrinsic<T: Scalar>(
    cloud: &PointCloud<T>,
    node_sets: &[Vec<usize>],
    metric: PointMetric,
    mode: ExtrinsicMode,
) -> Result<DistanceMatrix<T>> {
    match mode {
        ExtrinsicMode::Hausdorff => Ok(DistanceMatrix::from_fn(node_sets.len(), |i, j| {
            hausdorff_between(cloud, &node_sets[i], cloud, &node_sets[j], metric)
        })),
        ExtrinsicMode::SinglePoint => {
            if let Some(i) = node_sets.iter().position(|s| s.len() != 1) {
                return Err(Error::invalid(format!(
                    "single-point mode needs singleton nodes; node {i} has {} points",
                    node_sets[i].len()
                )));
            }
            Ok(DistanceMatrix::from_fn(node_sets.len(), |i, j| {
                metric.distance(cloud.point(node_sets[i][0]), cloud.point(node_sets[j][0]))
            }))
        }
    }
}

/// All-pairs shortest paths over the graph, Dijkstra from every source.
/// Entry `(i, j)` for `i < j` is taken from the search rooted at `i` and
/// mirrored, so the matrix is exactly symmetric.
pub fn intrinsic_shortest_paths<T: Scalar>(
    n: usize,
    edges: &[(usize, usize)],
    weighting: EdgeWeight,
    extrinsic: &DistanceMatrix<T>,
) -> DistanceMatrix<T> {
    let mut graph: UnGraph<(), T> = UnGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        graph.add_node(());
    }
    for &(u, v) in edges {
        let w = match weighting {
            EdgeWeight::Unit => T::one(),
            EdgeWeight::Extrinsic => extrinsic.raw(u, v),
        };
        graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), w);
    }
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let reached = petgraph::algo::dijkstra(&graph, NodeIndex::new(i), None, |e| *e.weight());
            (i + 1..n)
                .map(|j| reached.get(&NodeIndex::new(j)).copied().unwrap_or_else(DistanceMatrix::unreachable))
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            values[[i, i + 1 + off]] = v;
            values[[i + 1 + off, i]] = v;
        }
    }
    DistanceMatrix::from_array(values).expect("shortest paths form a valid distance matrix")
}

/// Extrinsic cost between the nodes of two networks (rows: `x`, columns: `y`).
pub fn cross_extrinsic<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Result<Array2<T>> {
    check_compatible(x, y)?;
    let metric = x.options.metric;
    let (n, m) = (x.len(), y.len());
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| match x.options.extrinsic {
                    ExtrinsicMode::Hausdorff => {
                        hausdorff_between(&x.cloud, &x.node_sets[i], &y.cloud, &y.node_sets[j], metric)
                    }
                    ExtrinsicMode::SinglePoint => {
                        metric.distance(x.cloud.point(x.node_sets[i][0]), y.cloud.point(y.node_sets[j][0]))
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Array2::zeros((n, m));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

pub(crate) fn check_compatible<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Result<()> {
    if x.cloud.dim() != y.cloud.dim() {
        return Err(Error::IncompatibleSpaces(format!(
            "point dimensions differ ({} vs {})",
            x.cloud.dim(),
            y.cloud.dim()
        )));
    }
    if x.options.metric != y.options.metric {
        return Err(Error::IncompatibleSpaces("networks use different point metrics".into()));
    }
    if x.options.extrinsic != y.options.extrinsic {
        return Err(Error::IncompatibleSpaces("networks use different extrinsic modes".into()));
    }
    Ok(())
}

fn component_labels(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut sets = DisjointSets::new(n);
    for &(u, v) in edges {
        sets.union(u, v);
    }
    let mut label = vec![usize::MAX; n];
    let mut root_label = vec![usize::MAX; n];
    let mut next = 0;
    for (i, slot) in label.iter_mut().enumerate() {
        let r = sets.find(i);
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        *slot = root_label[r];
    }
    (label, next)
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets; the smaller root index becomes the root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[[f64; 2]]) -> Arc<PointCloud<f64>> {
        Arc::new(PointCloud::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
    }

    #[test]
    fn validation_errors() {
        let c = cloud(&[[0.0, 0.0], [1.0, 0.0]]);
        let opts = NetworkOptions::default();
        assert!(MMNetwork::new(c.clone(), vec![], vec![], None, opts).is_err());
        assert!(MMNetwork::new(c.clone(), vec![vec![]], vec![], None, opts).is_err());
        assert!(MMNetwork::new(c.clone(), vec![vec![5]], vec![], None, opts).is_err());
        assert!(MMNetwork::new(c.clone(), vec![vec![0], vec![1]], vec![(0, 0)], None, opts).is_err());
        assert!(MMNetwork::new(c.clone(), vec![vec![0], vec![1]], vec![(0, 2)], None, opts).is_err());
        let bad_mass = Measure::new(vec![1.0]).unwrap();
        assert!(MMNetwork::new(c, vec![vec![0], vec![1]], vec![], Some(bad_mass), opts).is_err());
    }

    #[test]
    fn path_graph_unit_weights() {
        let c = cloud(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let opts = NetworkOptions { edge_weight: EdgeWeight::Unit, ..Default::default() };
        let g = MMNetwork::new(c, vec![vec![0], vec![1], vec![2]], vec![(1, 0), (1, 2)], None, opts).unwrap();
        assert_eq!(g.intrinsic().get(0, 2), Some(2.0));
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.is_connected());
    }

    #[test]
    fn isolated_nodes_are_unreachable() {
        let c = cloud(&[[0.0, 0.0], [3.0, 4.0]]);
        let g = MMNetwork::new(c, vec![vec![0], vec![1]], vec![], None, NetworkOptions::default()).unwrap();
        assert_eq!(g.intrinsic().get(0, 1), None);
        assert_eq!(g.intrinsic().get(1, 1), Some(0.0));
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.extrinsic().get(0, 1), Some(5.0));
    }

    #[test]
    fn identical_sets_give_zero_extrinsic() {
        let c = cloud(&[[0.0, 0.0], [1.0, 2.0], [5.0, 1.0]]);
        let sets = vec![vec![0, 1, 2]; 3];
        let m = pairwise_extrinsic(&c, &sets, PointMetric::Euclidean, ExtrinsicMode::Hausdorff).unwrap();
        assert!(m.as_array().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_point_mode_needs_singletons() {
        let c = cloud(&[[0.0, 0.0], [3.0, 4.0]]);
        let sets = vec![vec![0], vec![1]];
        let m = pairwise_extrinsic(&c, &sets, PointMetric::Euclidean, ExtrinsicMode::SinglePoint).unwrap();
        assert_eq!(m.as_array(), &ndarray::array![[0.0, 5.0], [5.0, 0.0]]);
        let sets = vec![vec![0, 1], vec![1]];
        assert!(pairwise_extrinsic(&c, &sets, PointMetric::Euclidean, ExtrinsicMode::SinglePoint).is_err());
    }

    #[test]
    fn components_ordered_by_smallest_node() {
        let (labels, count) = component_labels(5, &[(3, 4), (0, 2)]);
        assert_eq!(count, 3);
        assert_eq!(labels, vec![0, 1, 0, 2, 2]);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{DisjointSets, Dissimilarity};
use crate::scalar::{total_cmp, Scalar};

/// Partial clustering applied inside each pullback set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum ClusterMethod {
    /// Single linkage cut at the first significant gap between consecutive
    /// sorted merge heights. A gap counts when it is at least `min_relative`
    /// times the top merge height and the height after it is at least
    /// `min_ratio` times the height before it. Cutting at the lowest such gap
    /// keeps separate strands apart even when larger gaps sit above them.
    /// With no significant gap, or fewer than three merges, the set stays
    /// one cluster.
    SingleLinkageGap { min_ratio: f64, min_relative: f64 },
    /// Connected components of the graph joining points within `epsilon`.
    EpsilonThreshold { epsilon: f64 },
}

impl Default for ClusterMethod {
    fn default() -> Self {
        ClusterMethod::SingleLinkageGap { min_ratio: 2.0, min_relative: 0.25 }
    }
}

impl ClusterMethod {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClusterMethod::SingleLinkageGap { min_ratio, min_relative } => {
                if !(min_ratio >= 1.0) || !(0.0..=1.0).contains(&min_relative) {
                    return Err(Error::invalid("single-linkage gap needs min_ratio >= 1 and min_relative in [0, 1]"));
                }
            }
            ClusterMethod::EpsilonThreshold { epsilon } => {
                if !(epsilon >= 0.0) || !epsilon.is_finite() {
                    return Err(Error::invalid(format!("epsilon must be finite and nonnegative, got {epsilon}")));
                }
            }
        }
        Ok(())
    }
}

/// Minimum spanning tree of the member points (Prim, dense). Edges are
/// `(weight, a, b)` in local indices, sorted ascending by weight and then by
/// endpoints so the order is deterministic.
fn spanning_tree<T: Scalar>(member: &[usize], d: &impl Dissimilarity<T>) -> Vec<(T, usize, usize)> {
    let m = member.len();
    let mut in_tree = vec![false; m];
    let mut best = vec![T::infinity(); m];
    let mut parent = vec![0usize; m];
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..m {
        for j in 0..m {
            if !in_tree[j] {
                let w = d.dist(member[current], member[j]);
                if w < best[j] {
                    best[j] = w;
                    parent[j] = current;
                }
            }
        }
        let next = (0..m)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| total_cmp(&best[a], &best[b]).then(a.cmp(&b)))
            .expect("a node remains outside the tree");
        in_tree[next] = true;
        edges.push((best[next], parent[next].min(next), parent[next].max(next)));
        current = next;
    }
    edges.sort_by(|x, y| total_cmp(&x.0, &y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    edges
}

/// Merge-height threshold chosen by the gap heuristic, or `None` for one cluster.
fn gap_threshold<T: Scalar>(heights: &[T], min_ratio: f64, min_relative: f64) -> Option<T> {
    if heights.len() < 3 {
        return None;
    }
    let top = *heights.last().expect("nonempty");
    let ratio = T::lit(min_ratio);
    let relative = T::lit(min_relative) * top;
    (0..heights.len() - 1)
        .find(|&k| {
            let (lo, hi) = (heights[k], heights[k + 1]);
            let gap = hi - lo;
            gap > T::zero() && gap >= relative && hi >= ratio * lo
        })
        .map(|k| heights[k])
}

/// Splits `member` into clusters. The output partitions `member`; each
/// cluster is sorted and clusters are ordered by their smallest point id.
pub fn cluster_within<T: Scalar>(member: &[usize], d: &impl Dissimilarity<T>, method: &ClusterMethod) -> Vec<Vec<usize>> {
    if member.len() <= 1 {
        return vec![member.to_vec()];
    }
    let tree = spanning_tree(member, d);
    let threshold = match *method {
        ClusterMethod::SingleLinkageGap { min_ratio, min_relative } => {
            let heights: Vec<T> = tree.iter().map(|e| e.0).collect();
            match gap_threshold(&heights, min_ratio, min_relative) {
                Some(t) => t,
                None => return vec![sorted(member.to_vec())],
            }
        }
        ClusterMethod::EpsilonThreshold { epsilon } => T::lit(epsilon),
    };
    let mut sets = DisjointSets::new(member.len());
    for &(w, a, b) in &tree {
        if w <= threshold {
            sets.union(a, b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_root = vec![usize::MAX; member.len()];
    for local in 0..member.len() {
        let r = sets.find(local);
        if group_of_root[r] == usize::MAX {
            group_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of_root[r]].push(member[local]);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_iter().map(sorted).collect();
    groups.sort_by_key(|g| g[0]);
    groups
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

//! Cover-level edits of a network. Edges are added by copying a point from
//! one node's set into another's so that the two sets intersect; every
//! edit rebuilds the distance matrices from scratch.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapper::{build_mapper, nerve_edges};
use crate::mmspace::{Measure, MMNetwork, PointCloud};
use crate::scalar::Scalar;

/// Picks one node of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "kebab-case")]
pub enum NodeSelector {
    Index { node: usize },
    /// Node of `component` whose centroid is largest (or smallest) along `axis`.
    Extreme { component: usize, axis: usize, highest: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PerturbationSpec {
    /// In every component, join the `per_component` closest non-adjacent node pairs.
    AddIntraEdges { per_component: usize },
    /// Join two components at their closest node pair (components 0 and 1 by default).
    ConnectNear {
        #[serde(default)]
        components: Option<[usize; 2]>,
    },
    /// Join two components at their farthest node pair.
    ConnectFar {
        #[serde(default)]
        components: Option<[usize; 2]>,
    },
    /// Move every point of a component by `offset`.
    TranslateComponent { component: usize, offset: Vec<f64> },
    /// Rebuild from the stored Mapper config with resolution scaled by `factor`.
    RescaleResolution { factor: f64 },
    /// Rebuild from the stored Mapper config at resolution 1.
    Collapse,
    /// Take `fraction` of the mass of component `source` (proportionally from
    /// each node) and put it on the `target` node.
    ReallocateMass { source: usize, target: NodeSelector, fraction: f64 },
    /// Add an isolated single-point node at `location` (default: cloud mean)
    /// holding `fraction` of the mass, taken proportionally from `source`
    /// (default: all nodes).
    AddComponent {
        #[serde(default)]
        location: Option<Vec<f64>>,
        fraction: f64,
        #[serde(default)]
        source: Option<usize>,
    },
}

fn check_fraction(f: f64) -> Result<()> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::invalid(format!("fraction must lie in [0, 1), got {f}")));
    }
    Ok(())
}

fn check_component<T: Scalar>(x: &MMNetwork<T>, c: usize) -> Result<()> {
    if c >= x.component_count() {
        return Err(Error::invalid(format!("component {c} does not exist (network has {})", x.component_count())));
    }
    Ok(())
}

fn select_node<T: Scalar>(x: &MMNetwork<T>, sel: &NodeSelector) -> Result<usize> {
    match *sel {
        NodeSelector::Index { node } => {
            if node >= x.len() {
                return Err(Error::invalid(format!("node {node} does not exist (network has {})", x.len())));
            }
            Ok(node)
        }
        NodeSelector::Extreme { component, axis, highest } => {
            check_component(x, component)?;
            if axis >= x.cloud().dim() {
                return Err(Error::DimensionMismatch { expected: x.cloud().dim(), found: axis + 1 });
            }
            let mut best: Option<(T, usize)> = None;
            for v in x.component_members(component) {
                let c = x.node_centroid(v)[axis];
                let better = match best {
                    None => true,
                    Some((b, _)) => (highest && c > b) || (!highest && c < b),
                };
                if better {
                    best = Some((c, v));
                }
            }
            Ok(best.expect("components are nonempty").1)
        }
    }
}

/// Point of `from`'s set closest to `to`'s set (lowest index on ties).
fn bridge_point<T: Scalar>(x: &MMNetwork<T>, from: usize, to: usize) -> usize {
    let metric = x.options().metric;
    let cloud = x.cloud();
    let mut best: Option<(T, usize)> = None;
    for &p in x.node_set(from) {
        let d = x.node_set(to).iter().map(|&q| metric.distance(cloud.point(p), cloud.point(q))).fold(T::infinity(), T::min);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, p));
        }
    }
    best.expect("node sets are nonempty").1
}

/// Rebuilds a network after its sets or cloud changed. Old edges are kept;
/// new set intersections add edges.
fn rebuild<T: Scalar>(
    x: &MMNetwork<T>,
    cloud: Arc<PointCloud<T>>,
    sets: Vec<Vec<usize>>,
    mass: Option<Measure<T>>,
) -> Result<MMNetwork<T>> {
    let mut edges = x.edges().to_vec();
    edges.extend(nerve_edges(cloud.len(), &sets));
    let net = MMNetwork::new(cloud, sets, edges, mass, x.options())?;
    Ok(match x.mapper_config() {
        Some(c) => net.with_mapper_config(c.clone()),
        None => net,
    })
}

fn join_pairs<T: Scalar>(x: &MMNetwork<T>, pairs: &[(usize, usize)]) -> Result<MMNetwork<T>> {
    let mut sets = x.node_sets().to_vec();
    for &(u, v) in pairs {
        let p = bridge_point(x, u, v);
        if let Err(pos) = sets[v].binary_search(&p) {
            sets[v].insert(pos, p);
        }
    }
    rebuild(x, x.cloud().clone(), sets, None)
}

fn cross_pair<T: Scalar>(x: &MMNetwork<T>, components: Option<[usize; 2]>, farthest: bool) -> Result<(usize, usize)> {
    let [a, b] = components.unwrap_or([0, 1]);
    check_component(x, a)?;
    check_component(x, b)?;
    if a == b {
        return Err(Error::invalid(format!("cannot connect component {a} to itself")));
    }
    let d = x.extrinsic();
    let mut best: Option<(T, usize, usize)> = None;
    for u in x.component_members(a) {
        for v in x.component_members(b) {
            let e = d.raw(u, v);
            let better = match best {
                None => true,
                Some((b, _, _)) => (farthest && e > b) || (!farthest && e < b),
            };
            if better {
                best = Some((e, u, v));
            }
        }
    }
    let (_, u, v) = best.expect("components are nonempty");
    Ok((u, v))
}

fn rescaled_mapper<T: Scalar>(x: &MMNetwork<T>, resolution: usize) -> Result<MMNetwork<T>> {
    let config = x
        .mapper_config()
        .ok_or_else(|| Error::invalid("resolution changes need a network built by Mapper (no stored config)"))?;
    build_mapper(x.cloud().clone(), &config.with_resolution(resolution))
}

/// Removes `fraction` of the mass of `from` nodes proportionally; returns the
/// new weights and the removed total.
fn take_mass<T: Scalar>(weights: &[T], from: &[usize], fraction: f64) -> (Vec<T>, T) {
    let mut w = weights.to_vec();
    let f = T::lit(fraction);
    let mut taken = T::zero();
    for &v in from {
        let t = w[v] * f;
        w[v] = w[v] - t;
        taken = taken + t;
    }
    (w, taken)
}

pub fn apply_perturbation<T: Scalar>(x: &MMNetwork<T>, spec: &PerturbationSpec) -> Result<MMNetwork<T>> {
    match spec {
        PerturbationSpec::AddIntraEdges { per_component } => {
            let d = x.extrinsic();
            let adjacent = |u: usize, v: usize| x.edges().binary_search(&(u.min(v), u.max(v))).is_ok();
            let mut pairs = Vec::new();
            for c in 0..x.component_count() {
                let members = x.component_members(c);
                let mut cand: Vec<(T, usize, usize)> = Vec::new();
                for (k, &u) in members.iter().enumerate() {
                    for &v in &members[k + 1..] {
                        if !adjacent(u, v) {
                            cand.push((d.raw(u, v), u, v));
                        }
                    }
                }
                cand.sort_by(|a, b| crate::scalar::total_cmp(&a.0, &b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
                pairs.extend(cand.into_iter().take(*per_component).map(|(_, u, v)| (u, v)));
            }
            join_pairs(x, &pairs)
        }
        PerturbationSpec::ConnectNear { components } => join_pairs(x, &[cross_pair(x, *components, false)?]),
        PerturbationSpec::ConnectFar { components } => join_pairs(x, &[cross_pair(x, *components, true)?]),
        PerturbationSpec::TranslateComponent { component, offset } => {
            check_component(x, *component)?;
            if offset.len() != x.cloud().dim() {
                return Err(Error::DimensionMismatch { expected: x.cloud().dim(), found: offset.len() });
            }
            let offset: Vec<T> = offset.iter().map(|&v| T::lit(v)).collect();
            let cloud = x.cloud().translated(&x.component_points(*component), &offset)?;
            MMNetwork::new(Arc::new(cloud), x.node_sets().to_vec(), x.edges().to_vec(), Some(x.mass().clone()), x.options())
                .map(|n| match x.mapper_config() {
                    Some(c) => n.with_mapper_config(c.clone()),
                    None => n,
                })
        }
        PerturbationSpec::RescaleResolution { factor } => {
            if !(*factor > 0.0) || !factor.is_finite() {
                return Err(Error::invalid(format!("resolution factor must be positive, got {factor}")));
            }
            let current = x.mapper_config().map_or(1, |c| c.cover.resolution);
            let resolution = ((current as f64 * factor).round() as usize).max(1);
            rescaled_mapper(x, resolution)
        }
        PerturbationSpec::Collapse => rescaled_mapper(x, 1),
        PerturbationSpec::ReallocateMass { source, target, fraction } => {
            check_fraction(*fraction)?;
            check_component(x, *source)?;
            let target = select_node(x, target)?;
            let (mut w, taken) = take_mass(x.mass().weights(), &x.component_members(*source), *fraction);
            w[target] = w[target] + taken;
            x.with_mass(Measure::normalized(w)?)
        }
        PerturbationSpec::AddComponent { location, fraction, source } => {
            check_fraction(*fraction)?;
            if *fraction == 0.0 {
                return Err(Error::invalid("a new component needs positive mass (fraction > 0)"));
            }
            let from: Vec<usize> = match source {
                Some(c) => {
                    check_component(x, *c)?;
                    x.component_members(*c)
                }
                None => (0..x.len()).collect(),
            };
            let point: Vec<T> = match location {
                Some(l) => l.iter().map(|&v| T::lit(v)).collect(),
                None => x.cloud().mean(),
            };
            let mut cloud = (**x.cloud()).clone();
            let p = cloud.push(&point)?;
            let (mut w, taken) = take_mass(x.mass().weights(), &from, *fraction);
            w.push(taken);
            let mut sets = x.node_sets().to_vec();
            sets.push(vec![p]);
            // The new point lies in no other set, so the node stays isolated.
            rebuild(x, Arc::new(cloud), sets, Some(Measure::normalized(w)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapper::MapperConfig;
    use crate::synth::make_moons;
    use crate::transport::naw;

    fn moons() -> MMNetwork<f64> {
        let cloud = Arc::new(make_moons::<f64>(200, 0.05, 1).unwrap());
        build_mapper(cloud, &MapperConfig::new(8, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn identities() {
        let x = moons();
        let t = apply_perturbation(&x, &PerturbationSpec::TranslateComponent { component: 0, offset: vec![0.0, 0.0] }).unwrap();
        assert_eq!(t, x);
        let sel = NodeSelector::Index { node: 0 };
        let r = apply_perturbation(&x, &PerturbationSpec::ReallocateMass { source: 0, target: sel, fraction: 0.0 }).unwrap();
        assert_eq!(naw(&x, &r).unwrap(), 0.0);
    }

    #[test]
    fn connecting_merges_components() {
        let x = moons();
        assert_eq!(x.component_count(), 2);
        for spec in [PerturbationSpec::ConnectNear { components: None }, PerturbationSpec::ConnectFar { components: None }] {
            let y = apply_perturbation(&x, &spec).unwrap();
            assert_eq!(y.component_count(), 1);
            assert!(y.edges().len() > x.edges().len());
            crate::mapper::tests::assert_nerve(&y);
        }
        let y = apply_perturbation(&x, &PerturbationSpec::AddIntraEdges { per_component: 2 }).unwrap();
        assert_eq!(y.component_count(), 2);
        assert!(y.edges().len() >= x.edges().len() + 4);
    }

    #[test]
    fn added_component_is_isolated() {
        let x = moons();
        let y = apply_perturbation(&x, &PerturbationSpec::AddComponent { location: None, fraction: 0.2, source: Some(1) }).unwrap();
        assert_eq!(y.len(), x.len() + 1);
        assert_eq!(y.component_count(), 3);
        assert!((y.mass().get(x.len()) - 0.2 * x.component_members(1).iter().map(|&v| x.mass().get(v)).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        let x = moons();
        assert!(apply_perturbation(&x, &PerturbationSpec::ConnectNear { components: Some([0, 5]) }).is_err());
        let sel = NodeSelector::Index { node: 0 };
        assert!(apply_perturbation(&x, &PerturbationSpec::ReallocateMass { source: 0, target: sel, fraction: 1.5 }).is_err());
        assert!(apply_perturbation(&x, &PerturbationSpec::RescaleResolution { factor: 0.0 }).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let s: PerturbationSpec = serde_json::from_str(r#"{"kind":"translate-component","component":1,"offset":[0.5,0]}"#).unwrap();
        assert_eq!(s, PerturbationSpec::TranslateComponent { component: 1, offset: vec![0.5, 0.0] });
        let s: PerturbationSpec = serde_json::from_str(r#"{"kind":"collapse"}"#).unwrap();
        assert_eq!(s, PerturbationSpec::Collapse);
    }
}

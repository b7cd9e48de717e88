use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cloud::{PointCloud, PointMetric};
use super::measure::Measure;
use super::network::{EdgeWeight, ExtrinsicMode, MMNetwork, NetworkOptions};
use crate::error::{Error, Result};
use crate::mapper::MapperConfig;
use crate::scalar::Scalar;
use crate::SCHEMA_VERSION;

/// On-disk form of a network.
///
/// `nodes`, `edges` and `mass` are the core fields; `points` (inline
/// coordinates) or `cloud` (path to a CSV, relative to the JSON file) supply
/// the ambient points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetworkDocument<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub nodes: Vec<NodeEntry>,
    #[serde(default)]
    pub edges: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Vec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<PointMetric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrinsic: Option<ExtrinsicMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_weight: Option<EdgeWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapper: Option<MapperConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<T>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: i64,
    pub set: Vec<usize>,
}

impl<T: Scalar> MMNetwork<T> {
    pub fn to_document(&self) -> NetworkDocument<T> {
        let opts = self.options();
        NetworkDocument {
            schema: Some(SCHEMA_VERSION),
            nodes: self
                .node_sets()
                .iter()
                .enumerate()
                .map(|(i, s)| NodeEntry { id: i as i64, set: s.clone() })
                .collect(),
            edges: self.edges().iter().map(|&(u, v)| [u as i64, v as i64]).collect(),
            mass: Some(self.mass().weights().to_vec()),
            metric: Some(opts.metric),
            extrinsic: Some(opts.extrinsic),
            edge_weight: Some(opts.edge_weight),
            mapper: self.mapper_config().cloned(),
            cloud: None,
            points: Some(self.cloud().rows()),
        }
    }

    /// Rebuilds a network; `base_dir` resolves a relative `cloud` path.
    pub fn from_document(doc: NetworkDocument<T>, base_dir: Option<&Path>) -> Result<Self> {
        if let Some(v) = doc.schema {
            if v > SCHEMA_VERSION {
                return Err(Error::invalid(format!("network schema {v} is newer than supported {SCHEMA_VERSION}")));
            }
        }
        let cloud = match (doc.points, doc.cloud) {
            (Some(points), _) => PointCloud::new(points)?,
            (None, Some(path)) => {
                let p = Path::new(&path);
                let resolved = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                PointCloud::read_csv(resolved)?
            }
            (None, None) => return Err(Error::invalid("network document has neither `points` nor `cloud`")),
        };
        let ids: Vec<i64> = doc.nodes.iter().map(|n| n.id).collect();
        let position = |id: i64| -> Result<usize> {
            ids.iter()
                .position(|&x| x == id)
                .ok_or_else(|| Error::invalid(format!("edge references unknown node id {id}")))
        };
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate node id"));
        }
        let edges = doc
            .edges
            .iter()
            .map(|&[u, v]| Ok((position(u)?, position(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let sets = doc.nodes.into_iter().map(|n| n.set).collect();
        let mass = doc.mass.map(Measure::new).transpose()?;
        let options = NetworkOptions {
            metric: doc.metric.unwrap_or_default(),
            extrinsic: doc.extrinsic.unwrap_or_default(),
            edge_weight: doc.edge_weight.unwrap_or_default(),
        };
        let net = MMNetwork::new(Arc::new(cloud), sets, edges, mass, options)?;
        Ok(match doc.mapper {
            Some(cfg) => net.with_mapper_config(cfg),
            None => net,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("network serializes")
    }

    pub fn from_json_str(s: &str, base_dir: Option<&Path>) -> Result<Self> {
        let doc: NetworkDocument<T> = serde_json::from_str(s)?;
        Self::from_document(doc, base_dir)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: NetworkDocument<T> = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        Self::from_document(doc, path.parent()).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::parse(path, msg),
            other => other,
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }
}

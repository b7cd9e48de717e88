//! Loader for the TU benchmark layout: `DS_A.txt` (1-indexed edge list),
//! `DS_graph_indicator.txt`, `DS_graph_labels.txt`, `DS_node_attributes.txt`.
//! Any of them may instead be gzip-compressed with a `.gz` suffix.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::mmspace::{MMNetwork, NetworkOptions, PointCloud};
use crate::scalar::Scalar;

/// Graphs of one dataset, each node a single point carrying its attribute
/// vector, with uniform node mass.
#[derive(Debug, Clone)]
pub struct AttributedGraphDataset<T> {
    pub name: String,
    pub graphs: Vec<MMNetwork<T>>,
    pub labels: Vec<i64>,
}

impl<T> AttributedGraphDataset<T> {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

fn dataset_name(dir: &Path) -> Result<String> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter_map(|f| f.strip_suffix("_A.txt.gz").or_else(|| f.strip_suffix("_A.txt")).map(str::to_owned))
        .collect();
    names.sort();
    names.dedup();
    match names.len() {
        1 => Ok(names.remove(0)),
        0 => Err(Error::io(dir.join("<name>_A.txt"), std::io::Error::new(std::io::ErrorKind::NotFound, "no TU edge file"))),
        _ => Err(Error::parse(dir, format!("several TU datasets in one directory: {}", names.join(", ")))),
    }
}

/// Reads `base` or `base.gz` into lines, skipping blank ones.
fn read_lines(base: &Path) -> Result<(PathBuf, Vec<String>)> {
    let gz = PathBuf::from(format!("{}.gz", base.display()));
    let (path, reader): (PathBuf, Box<dyn Read>) = if base.exists() {
        (base.to_path_buf(), Box::new(File::open(base).map_err(|e| Error::io(base, e))?))
    } else if gz.exists() {
        let f = File::open(&gz).map_err(|e| Error::io(&gz, e))?;
        (gz, Box::new(GzDecoder::new(f)))
    } else {
        return Err(Error::io(base, std::io::Error::new(std::io::ErrorKind::NotFound, "file not found")));
    };
    let mut lines = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        let t = line.trim();
        if !t.is_empty() {
            lines.push(t.to_owned());
        }
    }
    Ok((path, lines))
}

fn parse_fields<V: std::str::FromStr>(path: &Path, lineno: usize, line: &str) -> Result<Vec<V>> {
    line.split(',')
        .map(|f| f.trim().parse::<V>().map_err(|_| Error::parse(path, format!("line {}: cannot parse '{}'", lineno + 1, f.trim()))))
        .collect()
}

pub fn load_tu_dataset<T: Scalar>(dir: impl AsRef<Path>) -> Result<AttributedGraphDataset<T>> {
    let dir = dir.as_ref();
    let name = dataset_name(dir)?;
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));

    let (ipath, indicator_lines) = read_lines(&file("graph_indicator"))?;
    let mut indicator = Vec::with_capacity(indicator_lines.len());
    for (k, line) in indicator_lines.iter().enumerate() {
        let g: usize = line.parse().map_err(|_| Error::parse(&ipath, format!("line {}: bad graph id '{line}'", k + 1)))?;
        if g == 0 {
            return Err(Error::parse(&ipath, format!("line {}: graph ids start at 1", k + 1)));
        }
        indicator.push(g - 1);
    }
    let (lpath, label_lines) = read_lines(&file("graph_labels"))?;
    let labels: Vec<i64> = label_lines
        .iter()
        .enumerate()
        .map(|(k, l)| l.parse().map_err(|_| Error::parse(&lpath, format!("line {}: bad label '{l}'", k + 1))))
        .collect::<Result<_>>()?;
    let n_graphs = labels.len();
    if let Some(k) = indicator.iter().position(|&g| g >= n_graphs) {
        return Err(Error::parse(&ipath, format!("line {}: graph id {} exceeds the {n_graphs} labels", k + 1, indicator[k] + 1)));
    }

    let (apath, attr_lines) = read_lines(&file("node_attributes"))?;
    if attr_lines.len() != indicator.len() {
        return Err(Error::parse(
            &apath,
            format!("{} attribute rows for {} nodes in the graph indicator", attr_lines.len(), indicator.len()),
        ));
    }
    let mut attributes: Vec<Vec<T>> = Vec::with_capacity(attr_lines.len());
    for (k, line) in attr_lines.iter().enumerate() {
        let row: Vec<f64> = parse_fields(&apath, k, line)?;
        if let Some(first) = attributes.first() {
            if first.len() != row.len() {
                return Err(Error::parse(&apath, format!("line {}: {} attributes, expected {}", k + 1, row.len(), first.len())));
            }
        }
        attributes.push(row.into_iter().map(T::lit).collect());
    }

    // Global node -> (graph, local index).
    let mut local = vec![0usize; indicator.len()];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_graphs];
    for (node, &g) in indicator.iter().enumerate() {
        local[node] = members[g].len();
        members[g].push(node);
    }
    if let Some(g) = members.iter().position(|m| m.is_empty()) {
        return Err(Error::parse(&ipath, format!("graph {} has no nodes", g + 1)));
    }

    let (epath, edge_lines) = read_lines(&file("A"))?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_graphs];
    for (k, line) in edge_lines.iter().enumerate() {
        let pair: Vec<usize> = parse_fields(&epath, k, line)?;
        let [u, v] = pair[..] else {
            return Err(Error::parse(&epath, format!("line {}: expected two node ids", k + 1)));
        };
        let in_range = |x: usize| x >= 1 && x <= indicator.len();
        if !in_range(u) || !in_range(v) {
            return Err(Error::parse(&epath, format!("line {}: node id out of range 1..={}", k + 1, indicator.len())));
        }
        let (u, v) = (u - 1, v - 1);
        if indicator[u] != indicator[v] {
            return Err(Error::parse(&epath, format!("line {}: edge joins two different graphs", k + 1)));
        }
        if u != v {
            edges[indicator[u]].push((local[u], local[v]));
        }
    }

    let graphs = members
        .iter()
        .zip(edges)
        .map(|(nodes, e)| {
            let cloud = PointCloud::new(nodes.iter().map(|&v| attributes[v].clone()).collect())?;
            let sets = (0..nodes.len()).map(|i| vec![i]).collect();
            MMNetwork::new(Arc::new(cloud), sets, e, None, NetworkOptions::attributed())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttributedGraphDataset { name, graphs, labels })
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    fn fixture(dir: &Path) {
        write(dir, "TOY_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n4, 5\n5, 4\n");
        write(dir, "TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
        write(dir, "TOY_graph_labels.txt", "1\n-1\n");
        write(dir, "TOY_node_attributes.txt", "0.0, 0.0\n1.0, 0.0\n1.0, 1.0\n5.0, 5.0\n5.0, 6.0\n");
    }

    #[test]
    fn loads_toy_dataset() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tu_dataset::<f64>(tmp.path()).unwrap();
        assert_eq!(ds.name, "TOY");
        assert_eq!(ds.labels, vec![1, -1]);
        assert_eq!(ds.graphs[0].edges(), &[(0, 1), (1, 2)]);
        assert_eq!(ds.graphs[1].edges(), &[(0, 1)]);
        assert_eq!(ds.graphs[0].intrinsic().get(0, 2), Some(2.0));
        assert_eq!(ds.graphs[1].mass().weights(), &[0.5, 0.5]);
        assert_eq!(ds.graphs[1].extrinsic().get(0, 1), Some(1.0));
    }

    #[test]
    fn reads_gzip_files() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let plain = tmp.path().join("TOY_A.txt");
        let body = std::fs::read(&plain).unwrap();
        std::fs::remove_file(&plain).unwrap();
        let mut enc = flate2::write::GzEncoder::new(File::create(tmp.path().join("TOY_A.txt.gz")).unwrap(), flate2::Compression::default());
        enc.write_all(&body).unwrap();
        enc.finish().unwrap();
        let ds = load_tu_dataset::<f64>(tmp.path()).unwrap();
        assert_eq!(ds.graphs[0].edges().len(), 2);
    }

    #[test]
    fn reports_bad_inputs() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY_A.txt", "1, 9\n");
        assert!(matches!(load_tu_dataset::<f64>(tmp.path()), Err(Error::Parse { .. })));
        write(tmp.path(), "TOY_A.txt", "1, 2\n");
        write(tmp.path(), "TOY_node_attributes.txt", "0.0, 0.0\n1.0\n1.0, 1.0\n5.0, 5.0\n5.0, 6.0\n");
        assert!(matches!(load_tu_dataset::<f64>(tmp.path()), Err(Error::Parse { .. })));
        std::fs::remove_file(tmp.path().join("TOY_graph_labels.txt")).unwrap();
        let err = load_tu_dataset::<f64>(tmp.path()).unwrap_err();
        assert!(err.to_string().contains("TOY_graph_labels.txt"), "{err}");
    }

    #[test]
    fn edgeless_graph_is_unreachable() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY_A.txt", "1, 2\n");
        let ds = load_tu_dataset::<f64>(tmp.path()).unwrap();
        assert_eq!(ds.graphs[1].intrinsic().get(0, 1), None);
    }
}

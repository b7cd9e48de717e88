use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite set of points in `R^k`, addressed by their row index.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| Error::invalid("point cloud is empty"))?;
        if dim == 0 {
            return Err(Error::invalid("points must have dimension at least 1"));
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "point {i} has dimension {}, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("point {i} has a non-finite coordinate")));
            }
            coords.extend_from_slice(row);
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("point cloud has a non-finite coordinate"));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.iter().map(<[T]>::to_vec).collect()
    }

    /// New cloud holding the listed rows, in order; repeats allowed.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud { dim: self.dim, coords }
    }

    /// Copy of the cloud with the listed rows shifted by `offset`.
    pub fn translated(&self, indices: &[usize], offset: &[T]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: offset.len() });
        }
        let mut out = self.clone();
        let mut seen = vec![false; self.len()];
        for &i in indices {
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            for (c, o) in out.coords[i * self.dim..(i + 1) * self.dim].iter_mut().zip(offset) {
                *c = *c + *o;
            }
        }
        Ok(out)
    }

    /// Appends a point and returns its index.
    pub fn push(&mut self, point: &[T]) -> Result<usize> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        self.coords.extend_from_slice(point);
        Ok(self.len() - 1)
    }

    pub fn mean(&self) -> Vec<T> {
        let mut acc = vec![T::zero(); self.dim];
        for p in self.iter() {
            for (a, x) in acc.iter_mut().zip(p) {
                *a = *a + *x;
            }
        }
        let n = T::lit(self.len() as f64);
        acc.into_iter().map(|a| a / n).collect()
    }

    /// Reads numeric CSV, one point per row. A first row that does not parse
    /// as numbers is treated as a header.
    pub fn from_csv_reader<R: Read>(reader: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::parse(origin, e.to_string()))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(values) => rows.push(values.into_iter().map(T::lit).collect::<Vec<T>>()),
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::parse(origin, format!("row {}: {e}", line + 1))),
            }
        }
        PointCloud::new(rows).map_err(|e| Error::parse(origin, e.to_string()))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(std::io::BufReader::new(file), path)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in self.iter() {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Metric on the ambient point space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointMetric {
    #[default]
    Euclidean,
    Manhattan,
    /// `1 - cos(angle)`; undefined for zero vectors.
    Cosine,
}

impl PointMetric {
    pub fn distance<T: Scalar>(&self, a: &[T], b: &[T]) -> T {
        match self {
            PointMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (*x - *y) * (*x - *y))
                .fold(T::zero(), |s, v| s + v)
                .sqrt(),
            PointMetric::Manhattan => a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).fold(T::zero(), |s, v| s + v),
            PointMetric::Cosine => {
                let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
                for (x, y) in a.iter().zip(b) {
                    dot = dot + *x * *y;
                    na = na + *x * *x;
                    nb = nb + *y * *y;
                }
                let cos = dot / (na.sqrt() * nb.sqrt());
                (T::one() - cos.min(T::one())).max(T::zero())
            }
        }
    }

    /// Checks the metric is defined on every point of the cloud.
    pub fn validate<T: Scalar>(&self, cloud: &PointCloud<T>) -> Result<()> {
        if *self == PointMetric::Cosine {
            if let Some(i) = cloud.iter().position(|p| p.iter().all(|x| x.is_zero())) {
                return Err(Error::invalid(format!("cosine distance undefined: point {i} is the zero vector")));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for PointMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(PointMetric::Euclidean),
            "manhattan" => Ok(PointMetric::Manhattan),
            "cosine" => Ok(PointMetric::Cosine),
            other => Err(Error::invalid(format!("unknown point metric `{other}`"))),
        }
    }
}

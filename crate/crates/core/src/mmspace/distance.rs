use std::io::Write;

use ndarray::Array2;
use rayon::prelude::*;

use super::cloud::{PointCloud, PointMetric};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Anything that can report pairwise dissimilarities between indexed items.
pub trait Dissimilarity<T>: Sync {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> T;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A point cloud paired with its metric; distances computed on demand.
#[derive(Debug, Clone, Copy)]
pub struct CloudMetric<'a, T> {
    pub cloud: &'a PointCloud<T>,
    pub metric: PointMetric,
}

impl<'a, T: Scalar> CloudMetric<'a, T> {
    pub fn new(cloud: &'a PointCloud<T>, metric: PointMetric) -> Self {
        CloudMetric { cloud, metric }
    }
}

impl<T: Scalar> Dissimilarity<T> for CloudMetric<'_, T> {
    fn len(&self) -> usize {
        self.cloud.len()
    }

    fn dist(&self, i: usize, j: usize) -> T {
        self.metric.distance(self.cloud.point(i), self.cloud.point(j))
    }
}

/// Dense symmetric matrix of nonnegative distances with zero diagonal.
///
/// Pairs in different components of a disconnected graph hold the
/// unreachable sentinel (`+inf`); [`DistanceMatrix::get`] maps it to `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    values: Array2<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn unreachable() -> T {
        T::infinity()
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix { values: Array2::zeros((n, n)) }
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    /// Rows are filled in parallel; every entry is computed independently so
    /// the result does not depend on the thread count.
    pub fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| f(i, j)).collect())
            .collect();
        let mut values = Array2::zeros((n, n));
        for (i, row) in rows.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                values[[i, j]] = v;
                values[[j, i]] = v;
            }
        }
        DistanceMatrix { values }
    }

    /// Full pairwise matrix of a dissimilarity.
    pub fn from_dissimilarity(d: &impl Dissimilarity<T>) -> Self {
        Self::from_fn(d.len(), |i, j| d.dist(i, j))
    }

    /// Wraps an existing square array after checking the matrix invariants.
    /// Asymmetry up to rounding is tolerated and resolved from the upper triangle.
    pub fn from_array(values: Array2<T>) -> Result<Self> {
        let (n, m) = values.dim();
        if n != m {
            return Err(Error::invalid(format!("distance matrix is {n}x{m}, not square")));
        }
        let mut values = values;
        let tol = T::epsilon() * T::lit(64.0);
        for i in 0..n {
            let d = values[[i, i]];
            if d.is_nan() || d.abs() > tol {
                return Err(Error::invalid(format!("distance matrix diagonal entry {i} is {d}, not 0")));
            }
            values[[i, i]] = T::zero();
            for j in i + 1..n {
                let (a, b) = (values[[i, j]], values[[j, i]]);
                if a.is_nan() || b.is_nan() || a < T::zero() || b < T::zero() {
                    return Err(Error::invalid(format!("distance ({i},{j}) is negative or NaN")));
                }
                let same = if a.is_infinite() || b.is_infinite() {
                    a == b
                } else {
                    (a - b).abs() <= tol * T::one().max(a.abs())
                };
                if !same {
                    return Err(Error::invalid(format!("distance matrix is not symmetric at ({i},{j})")));
                }
                values[[j, i]] = a;
            }
        }
        Ok(DistanceMatrix { values })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Distance, or `None` when the pair is unreachable.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let v = self.values[[i, j]];
        v.is_finite().then_some(v)
    }

    /// Raw entry including the sentinel.
    pub fn raw(&self, i: usize, j: usize) -> T {
        self.values[[i, j]]
    }

    pub fn is_reachable(&self, i: usize, j: usize) -> bool {
        self.values[[i, j]].is_finite()
    }

    pub fn is_fully_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn as_array(&self) -> &Array2<T> {
        &self.values
    }

    pub fn into_array(self) -> Array2<T> {
        self.values
    }

    /// Off-diagonal finite entries, upper triangle, row-major.
    pub fn upper_finite(&self) -> Vec<T> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.values[[i, j]])
            .filter(|v| v.is_finite())
            .collect()
    }

    /// Simultaneous row/column permutation: entry `(a, b)` of the result is
    /// entry `(perm[a], perm[b])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut values = Array2::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                values[[a, b]] = self.values[[perm[a], perm[b]]];
            }
        }
        DistanceMatrix { values }
    }

    /// Dense CSV, no header; unreachable entries written as `inf`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_matrix_csv(&self.values, out)
    }
}

impl<T: Scalar> Dissimilarity<T> for DistanceMatrix<T> {
    fn len(&self) -> usize {
        self.values.nrows()
    }

    fn dist(&self, i: usize, j: usize) -> T {
        self.values[[i, j]]
    }
}

pub fn write_matrix_csv<T: Scalar, W: Write>(values: &Array2<T>, mut out: W) -> std::io::Result<()> {
    for row in values.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Hausdorff distance between two index sets under a shared dissimilarity.
pub fn hausdorff_distance<T: Scalar>(a: &[usize], b: &[usize], d: &impl Dissimilarity<T>) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("Hausdorff distance needs two nonempty sets"));
    }
    Ok(hausdorff_by(a.len(), b.len(), |i, j| d.dist(a[i], b[j])))
}

/// Hausdorff distance between point sets drawn from two (possibly different)
/// clouds living in the same ambient space.
pub fn hausdorff_between<T: Scalar>(
    cloud_a: &PointCloud<T>,
    a: &[usize],
    cloud_b: &PointCloud<T>,
    b: &[usize],
    metric: PointMetric,
) -> T {
    hausdorff_by(a.len(), b.len(), |i, j| metric.distance(cloud_a.point(a[i]), cloud_b.point(b[j])))
}

/// Both directed sup-inf distances from one pass over the `na x nb` table.
fn hausdorff_by<T: Scalar>(na: usize, nb: usize, d: impl Fn(usize, usize) -> T) -> T {
    let mut col_min = vec![T::infinity(); nb];
    let mut forward = T::zero();
    for i in 0..na {
        let mut row_min = T::infinity();
        for (j, cm) in col_min.iter_mut().enumerate() {
            let v = d(i, j);
            if v < row_min {
                row_min = v;
            }
            if v < *cm {
                *cm = v;
            }
        }
        forward = forward.max(row_min);
    }
    let backward = col_min.into_iter().fold(T::zero(), T::max);
    forward.max(backward)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointCloud<f64> {
        PointCloud::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let cloud = line(&[0.0, 1.0, 3.0]);
        let d = CloudMetric::new(&cloud, PointMetric::Euclidean);
        assert_eq!(hausdorff_distance(&[0, 1], &[0, 1], &d).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&[0], &[2], &d).unwrap(), 3.0);
        // sup over {0,1} of distance to 3 is 3; from 3 the nearest is 1 at 2.
        assert_eq!(hausdorff_distance(&[0, 1], &[2], &d).unwrap(), 3.0);
        assert!(hausdorff_distance(&[], &[2], &d).is_err());
    }

    #[test]
    fn from_array_checks_invariants() {
        let ok = ndarray::array![[0.0, 1.0], [1.0, 0.0]];
        assert!(DistanceMatrix::from_array(ok).is_ok());
        let asym = ndarray::array![[0.0, 1.0], [2.0, 0.0]];
        assert!(DistanceMatrix::from_array(asym).is_err());
        let diag = ndarray::array![[1.0, 1.0], [1.0, 0.0]];
        assert!(DistanceMatrix::from_array(diag).is_err());
        let neg = ndarray::array![[0.0, -1.0], [-1.0, 0.0]];
        assert!(DistanceMatrix::from_array(neg).is_err());
        let inf = ndarray::array![[0.0, f64::INFINITY], [f64::INFINITY, 0.0]];
        let m = DistanceMatrix::from_array(inf).unwrap();
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(0, 0), Some(0.0));
    }

    #[test]
    fn from_fn_is_symmetric() {
        let m = DistanceMatrix::<f64>::from_fn(4, |i, j| (i * 10 + j) as f64);
        for i in 0..4 {
            assert_eq!(m.raw(i, i), 0.0);
            for j in 0..4 {
                assert_eq!(m.raw(i, j), m.raw(j, i));
            }
        }
    }
}

//! Exponential kernels over distance matrices and a leave-one-out 1-NN check.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mmspace::DistanceMatrix;
use crate::scalar::{total_cmp, Scalar};

/// `values[i][j] = exp(-gamma * d(i, j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix<T> {
    pub values: Array2<T>,
    pub gamma: T,
}

/// `1 / median` of the off-diagonal distances, or 1 when that median is zero.
pub fn median_gamma<T: Scalar>(distances: &DistanceMatrix<T>) -> T {
    let mut v = distances.upper_finite();
    if v.is_empty() {
        return T::one();
    }
    v.sort_by(total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / T::lit(2.0) };
    if median > T::zero() {
        T::one() / median
    } else {
        T::one()
    }
}

/// Kernel of a distance matrix; `gamma` defaults to [`median_gamma`].
pub fn kernel_matrix<T: Scalar>(distances: &DistanceMatrix<T>, gamma: Option<T>) -> Result<KernelMatrix<T>> {
    let gamma = gamma.unwrap_or_else(|| median_gamma(distances));
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::invalid(format!("kernel gamma must be positive, got {gamma}")));
    }
    if !distances.is_fully_finite() {
        return Err(Error::invalid("kernel input has unreachable entries"));
    }
    let values = distances.as_array().mapv(|d| (-gamma * d).exp());
    Ok(KernelMatrix { values, gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Similarity {
    /// Smaller is closer.
    Distance,
    /// Larger is closer.
    Kernel,
}

/// Leave-one-out 1-nearest-neighbour accuracy; ties go to the lowest index.
pub fn nn_classify<T: Scalar>(matrix: &Array2<T>, labels: &[i64], kind: Similarity) -> Result<f64> {
    let n = labels.len();
    if matrix.dim() != (n, n) {
        return Err(Error::invalid(format!("matrix is {:?} for {n} labels", matrix.dim())));
    }
    if n < 2 {
        return Err(Error::invalid("leave-one-out needs at least two samples"));
    }
    let closer = |a: T, b: T| match kind {
        Similarity::Distance => a < b,
        Similarity::Kernel => a > b,
    };
    let hits = (0..n)
        .filter(|&i| {
            let mut best: Option<usize> = None;
            for j in (0..n).filter(|&j| j != i) {
                if best.is_none_or(|b| closer(matrix[[i, j]], matrix[[i, b]])) {
                    best = Some(j);
                }
            }
            labels[best.expect("n >= 2")] == labels[i]
        })
        .count();
    Ok(hits as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn kernel_values() {
        let z = DistanceMatrix::<f64>::zeros(3);
        let k = kernel_matrix(&z, Some(1.0)).unwrap();
        assert!(k.values.iter().all(|&v| v == 1.0));
        let d = DistanceMatrix::<f64>::from_array(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let k = kernel_matrix(&d, Some(1.0)).unwrap();
        assert!((k.values[[0, 1]] - 0.367879).abs() < 1e-6);
        assert!(kernel_matrix(&d, Some(0.0)).is_err());
        assert_eq!(median_gamma(&d), 1.0);
    }

    #[test]
    fn separated_clusters_classify_perfectly() {
        let d = array![[0.0, 1.0, 9.0, 9.0], [1.0, 0.0, 9.0, 9.0], [9.0, 9.0, 0.0, 1.0], [9.0, 9.0, 1.0, 0.0]];
        assert_eq!(nn_classify(&d, &[0, 0, 1, 1], Similarity::Distance).unwrap(), 1.0);
        let k = d.mapv(|x: f64| (-x).exp());
        assert_eq!(nn_classify(&k, &[0, 0, 1, 1], Similarity::Kernel).unwrap(), 1.0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let d = Array2::from_shape_fn((4, 4), |(i, j)| if i == j { 0.0 } else { 1.0 });
        // Nearest is 1 for sample 0 and 0 for everyone else.
        let acc = nn_classify(&d, &[0, 1, 0, 1], Similarity::Distance).unwrap();
        assert_eq!(acc, 0.25);
        assert!(nn_classify(&array![[0.0]], &[1], Similarity::Distance).is_err());
    }
}

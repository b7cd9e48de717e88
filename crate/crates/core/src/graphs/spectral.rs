//! Spectral lambda-distances between graph structures.

use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mmspace::MMNetwork;
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMatrix {
    /// Unnormalized `D - A`.
    Laplacian,
    Adjacency,
}

impl FromStr for SpectralMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(SpectralMatrix::Laplacian),
            "adjacency" => Ok(SpectralMatrix::Adjacency),
            _ => Err(Error::invalid(format!("unknown spectral matrix '{s}' (expected laplacian or adjacency)"))),
        }
    }
}

/// Eigenvalues of the unweighted adjacency or Laplacian, in descending order.
/// Computed in `f64` whatever the network scalar is.
pub fn spectrum<T: Scalar>(network: &MMNetwork<T>, kind: SpectralMatrix) -> Vec<f64> {
    let n = network.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in network.edges() {
        m[(u, v)] = 1.0;
        m[(v, u)] = 1.0;
    }
    if kind == SpectralMatrix::Laplacian {
        for i in 0..n {
            let deg: f64 = m.row(i).sum();
            m.row_mut(i).neg_mut();
            m[(i, i)] = deg;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| total_cmp(b, a));
    ev
}

/// Euclidean distance between the top-`k` eigenvalues of both graphs; a
/// spectrum shorter than `k` is padded with zeros. `k` defaults to the
/// smaller node count.
pub fn lambda_distance<T: Scalar>(a: &MMNetwork<T>, b: &MMNetwork<T>, kind: SpectralMatrix, k: Option<usize>) -> Result<T> {
    let k = k.unwrap_or(a.len().min(b.len()));
    if k == 0 {
        return Err(Error::invalid("lambda distance needs k >= 1"));
    }
    let (sa, sb) = (spectrum(a, kind), spectrum(b, kind));
    let at = |s: &[f64], i: usize| s.get(i).copied().unwrap_or(0.0);
    let sq: f64 = (0..k).map(|i| (at(&sa, i) - at(&sb, i)).powi(2)).sum();
    Ok(T::lit(sq.sqrt()))
}

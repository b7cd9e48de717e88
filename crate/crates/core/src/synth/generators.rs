//! Seeded two-moons, concentric-circles and Gaussian-blob generators.
//! Coordinates are generated in `f64` and converted, so a seed yields the
//! same cloud (up to rounding) for every scalar type.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mmspace::PointCloud;
use crate::scalar::Scalar;

/// Default Gaussian noise for [`make_moons`].
pub const MOONS_NOISE: f64 = 0.05;
/// Default Gaussian noise for [`make_circles`].
pub const CIRCLES_NOISE: f64 = 0.03;

fn finish<T: Scalar>(mut pts: Vec<[f64; 2]>, noise: f64, seed: u64) -> Result<PointCloud<T>> {
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::invalid(format!("noise must be a nonnegative number, got {noise}")));
    }
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise).expect("valid normal");
        for p in &mut pts {
            p[0] += normal.sample(&mut rng);
            p[1] += normal.sample(&mut rng);
        }
    }
    PointCloud::new(pts.into_iter().map(|p| vec![T::lit(p[0]), T::lit(p[1])]).collect())
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::invalid(format!("need at least 4 points, got {n}")));
    }
    Ok(())
}

fn linspace(k: usize, stop: f64, endpoint: bool) -> impl Iterator<Item = f64> {
    let steps = if endpoint { k.saturating_sub(1).max(1) } else { k };
    (0..k).map(move |i| stop * i as f64 / steps as f64)
}

/// Two interleaved half circles: the upper moon is listed first
/// (`n / 2` points), the lower moon second.
pub fn make_moons<T: Scalar>(n: usize, noise: f64, seed: u64) -> Result<PointCloud<T>> {
    check_n(n)?;
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut pts: Vec<[f64; 2]> = linspace(n_out, PI, true).map(|t| [t.cos(), t.sin()]).collect();
    pts.extend(linspace(n_in, PI, true).map(|t| [1.0 - t.cos(), 0.5 - t.sin()]));
    finish(pts, noise, seed)
}

/// Two concentric circles: the outer unit circle first (`n / 2` points),
/// then the inner circle of radius `ratio`.
pub fn make_circles<T: Scalar>(n: usize, ratio: f64, noise: f64, seed: u64) -> Result<PointCloud<T>> {
    check_n(n)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("circle ratio must lie in (0, 1), got {ratio}")));
    }
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut pts: Vec<[f64; 2]> = linspace(n_out, 2.0 * PI, false).map(|t| [t.cos(), t.sin()]).collect();
    pts.extend(linspace(n_in, 2.0 * PI, false).map(|t| [ratio * t.cos(), ratio * t.sin()]));
    finish(pts, noise, seed)
}

/// Isotropic Gaussian blobs; blob `k` gets `sizes[k]` consecutive rows.
pub fn make_blobs<T: Scalar>(centers: &[Vec<f64>], sizes: &[usize], std: f64, seed: u64) -> Result<PointCloud<T>> {
    if centers.is_empty() || centers.len() != sizes.len() {
        return Err(Error::invalid("need one size per blob center"));
    }
    if !(std > 0.0) || !std.is_finite() {
        return Err(Error::invalid(format!("blob std must be positive, got {std}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("valid normal");
    let mut rows = Vec::with_capacity(sizes.iter().sum());
    for (c, &k) in centers.iter().zip(sizes) {
        for _ in 0..k {
            rows.push(c.iter().map(|&x| T::lit(x + normal.sample(&mut rng))).collect());
        }
    }
    PointCloud::new(rows)
}

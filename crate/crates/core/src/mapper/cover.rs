use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::PointCloud;
use crate::scalar::{total_cmp, Scalar};

/// Where a lens's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LensKind {
    Coordinate(usize),
    Provided,
}

/// A real-valued filter function evaluated at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct Lens<T> {
    kind: LensKind,
    values: Vec<T>,
}

impl<T: Scalar> Lens<T> {
    /// Projection onto one coordinate axis.
    pub fn coordinate(cloud: &PointCloud<T>, axis: usize) -> Result<Self> {
        if axis >= cloud.dim() {
            return Err(Error::invalid(format!("lens axis {axis} out of range for dimension {}", cloud.dim())));
        }
        Ok(Lens { kind: LensKind::Coordinate(axis), values: cloud.iter().map(|p| p[axis]).collect() })
    }

    pub fn provided(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("lens has no values"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("lens value {i} is not finite")));
        }
        Ok(Lens { kind: LensKind::Provided, values })
    }

    pub fn kind(&self) -> LensKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Serializable description of a lens, re-evaluated on each (re)sampled cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LensSpec {
    Coordinate { axis: usize },
    Values { values: Vec<f64> },
}

impl Default for LensSpec {
    fn default() -> Self {
        LensSpec::Coordinate { axis: 0 }
    }
}

impl LensSpec {
    pub fn evaluate<T: Scalar>(&self, cloud: &PointCloud<T>) -> Result<Lens<T>> {
        match self {
            LensSpec::Coordinate { axis } => Lens::coordinate(cloud, *axis),
            LensSpec::Values { values } => {
                if values.len() != cloud.len() {
                    return Err(Error::DimensionMismatch { expected: cloud.len(), found: values.len() });
                }
                Lens::provided(values.iter().map(|&v| T::lit(v)).collect())
            }
        }
    }

    /// The lens for a cloud assembled from rows `rows` of the original.
    pub fn resampled(&self, rows: &[usize]) -> LensSpec {
        match self {
            LensSpec::Coordinate { .. } => self.clone(),
            LensSpec::Values { values } => LensSpec::Values { values: rows.iter().map(|&r| values[r]).collect() },
        }
    }
}

/// Number of bins and their fractional overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub resolution: usize,
    pub gain: f64,
}

impl CoverSpec {
    pub fn new(resolution: usize, gain: f64) -> Result<Self> {
        let spec = CoverSpec { resolution, gain };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::invalid("resolution must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.gain) {
            return Err(Error::invalid(format!("gain must lie in [0, 1), got {}", self.gain)));
        }
        Ok(())
    }
}

/// Closed intervals over the lens range and the points each one pulls back.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover<T> {
    pub intervals: Vec<(T, T)>,
    pub members: Vec<Vec<usize>>,
}

/// Uniform overlapping cover of the lens image.
///
/// Bin `k` has base extent `[lo + k*w, lo + (k+1)*w]` with `w = range / resolution`
/// and is widened symmetrically by `gain * w / 2` on each side, then clipped
/// to the range. The outer ends are pinned to the exact lens extremes.
pub fn build_cover<T: Scalar>(lens: &Lens<T>, spec: &CoverSpec) -> Result<Cover<T>> {
    spec.validate()?;
    if lens.is_empty() {
        return Err(Error::invalid("lens has no values"));
    }
    let values = lens.values();
    let min = values.iter().copied().min_by(total_cmp).expect("nonempty");
    let max = values.iter().copied().max_by(total_cmp).expect("nonempty");
    let r = spec.resolution;
    if min == max && r > 1 {
        return Err(Error::DegenerateRange(r));
    }
    let width = (max - min) / T::lit(r as f64);
    let pad = T::lit(spec.gain) * width / T::lit(2.0);
    let intervals: Vec<(T, T)> = (0..r)
        .map(|k| {
            let lo = if k == 0 { min } else { (min + T::lit(k as f64) * width - pad).max(min) };
            let hi = if k + 1 == r { max } else { (min + T::lit((k + 1) as f64) * width + pad).min(max) };
            (lo, hi)
        })
        .collect();
    let members = intervals
        .iter()
        .map(|&(lo, hi)| (0..values.len()).filter(|&i| lo <= values[i] && values[i] <= hi).collect())
        .collect();
    Ok(Cover { intervals, members })
}

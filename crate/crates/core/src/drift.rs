//! Drift detection by resampling: build Mapper graphs on bootstrap samples
//! of a reference cloud, take the medioid graph, and judge a new sample by
//! where its distance to the medioid falls in the medioid-to-resample
//! distance distribution.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapper::{build_mapper, MapperConfig};
use crate::mmspace::{DistanceMatrix, MMNetwork, NetworkDocument, PointCloud};
use crate::scalar::{total_cmp, Scalar};
use crate::transport::{distance, pairwise_distances, DistanceOptions, Method};

/// Name of the generator behind every seed; stored in baselines so a seed
/// means the same samples on every build.
pub const RNG_ALGORITHM: &str = "chacha8";

/// How many times a degenerate bootstrap sample is redrawn before giving up.
pub const MAX_RESAMPLE_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftOptions {
    /// Number of bootstrap networks `B`.
    pub resamples: usize,
    /// Points per bootstrap sample `n`.
    pub sample_size: usize,
    pub seed: u64,
    pub quantile: f64,
    pub method: Method,
    pub distance: DistanceOptions,
}

impl DriftOptions {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        DriftOptions {
            resamples: 100,
            sample_size,
            seed,
            quantile: 0.95,
            method: Method::Naw,
            distance: DistanceOptions::default(),
        }
    }
}

fn is_degenerate<T: Scalar>(cloud: &PointCloud<T>, config: &MapperConfig) -> Result<bool> {
    if config.cover.resolution <= 1 {
        return Ok(false);
    }
    let lens = config.lens.evaluate(cloud)?;
    let v = lens.values();
    Ok(v.iter().all(|x| *x == v[0]))
}

/// `B` Mapper graphs on with-replacement samples of size `n`. Indices are
/// drawn sequentially from one seeded stream, then graphs are built in
/// parallel, so the output is independent of the thread count.
pub fn resample_networks<T: Scalar>(
    cloud: &PointCloud<T>,
    config: &MapperConfig,
    resamples: usize,
    sample_size: usize,
    seed: u64,
) -> Result<Vec<MMNetwork<T>>> {
    if resamples < 2 {
        return Err(Error::invalid(format!("need at least 2 resamples, got {resamples}")));
    }
    if sample_size == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<(PointCloud<T>, MapperConfig)> = Vec::with_capacity(resamples);
    for b in 0..resamples {
        let mut attempt = 0;
        loop {
            let rows: Vec<usize> = (0..sample_size).map(|_| rng.random_range(0..cloud.len())).collect();
            let sample = cloud.select(&rows);
            let mut cfg = config.clone();
            cfg.lens = config.lens.resampled(&rows);
            if !is_degenerate(&sample, &cfg)? {
                draws.push((sample, cfg));
                break;
            }
            attempt += 1;
            if attempt > MAX_RESAMPLE_RETRIES {
                return Err(Error::invalid(format!(
                    "resample {b} had a constant lens {attempt} times in a row; sample size {sample_size} is too small"
                )));
            }
        }
    }
    draws.into_par_iter().map(|(sample, cfg)| build_mapper(Arc::new(sample), &cfg)).collect()
}

/// Index minimizing the row sum of the pairwise matrix (lowest index on
/// ties), together with that matrix.
pub fn find_medioid<T: Scalar>(
    networks: &[MMNetwork<T>],
    method: Method,
    opts: &DistanceOptions,
) -> Result<(usize, DistanceMatrix<T>)> {
    if networks.len() < 2 {
        return Err(Error::invalid("a medioid needs at least two networks"));
    }
    let d = pairwise_distances(networks, method, opts)?;
    Ok((medioid_of(&d), d))
}

/// Row with the smallest sum; first such row on ties.
pub fn medioid_of<T: Scalar>(d: &DistanceMatrix<T>) -> usize {
    let sums: Vec<T> = d.as_array().rows().into_iter().map(|r| r.sum()).collect();
    let mut best = 0;
    for (i, s) in sums.iter().enumerate() {
        if *s < sums[best] {
            best = i;
        }
    }
    best
}

/// Linear-interpolation sample quantile (the common "type 7" definition).
pub fn empirical_quantile<T: Scalar>(values: &[T], q: f64) -> Result<T> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile must lie in [0, 1], got {q}")));
    }
    let mut v = values.to_vec();
    v.sort_by(total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Ok(v[lo] + T::lit(h - lo as f64) * (v[hi] - v[lo]))
}

/// Reference graph and distance distribution for drift scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftBaseline<T> {
    pub medioid: MMNetwork<T>,
    pub medioid_index: usize,
    /// Distances from the medioid to each of the other resampled networks.
    pub baseline_distances: Vec<T>,
    pub threshold: T,
    pub quantile: f64,
    pub config: MapperConfig,
    pub method: Method,
    pub seed: u64,
    pub resamples: usize,
    pub sample_size: usize,
}

/// Outcome of scoring one candidate sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftScore<T> {
    pub distance: T,
    pub is_outlier: bool,
    /// Fraction of baseline distances at or below `distance`.
    pub percentile: f64,
}

impl<T: Scalar> DriftBaseline<T> {
    /// Resamples `cloud`, finds the medioid, and sets the threshold at
    /// `opts.quantile` of the medioid-to-others distances.
    pub fn build(cloud: &PointCloud<T>, config: &MapperConfig, opts: &DriftOptions) -> Result<Self> {
        if !(opts.quantile > 0.0 && opts.quantile < 1.0) {
            return Err(Error::invalid(format!("quantile must lie in (0, 1), got {}", opts.quantile)));
        }
        let networks = resample_networks(cloud, config, opts.resamples, opts.sample_size, opts.seed)?;
        let (index, d) = find_medioid(&networks, opts.method, &opts.distance)?;
        let baseline_distances: Vec<T> = (0..networks.len()).filter(|&j| j != index).map(|j| d.raw(index, j)).collect();
        let threshold = empirical_quantile(&baseline_distances, opts.quantile)?;
        let medioid = networks.into_iter().nth(index).expect("medioid index in range");
        Ok(DriftBaseline {
            medioid,
            medioid_index: index,
            baseline_distances,
            threshold,
            quantile: opts.quantile,
            config: config.clone(),
            method: opts.method,
            seed: opts.seed,
            resamples: opts.resamples,
            sample_size: opts.sample_size,
        })
    }

    /// Threshold at a different quantile of the same distribution.
    pub fn threshold_at(&self, quantile: f64) -> Result<T> {
        empirical_quantile(&self.baseline_distances, quantile)
    }

    pub fn percentile_of(&self, d: T) -> f64 {
        let below = self.baseline_distances.iter().filter(|&&x| x <= d).count();
        below as f64 / self.baseline_distances.len() as f64
    }

    /// Scores a candidate with the stored Mapper configuration.
    pub fn score(&self, candidate: Arc<PointCloud<T>>, opts: &DistanceOptions) -> Result<DriftScore<T>> {
        score_sample(self, candidate, &self.config, opts)
    }

    /// Counts of baseline distances in `bins` equal-width bins over their range.
    pub fn histogram(&self, bins: usize) -> Vec<HistogramBin<T>> {
        histogram(&self.baseline_distances, bins)
    }

    pub fn to_document(&self) -> BaselineDocument<T> {
        BaselineDocument {
            schema: crate::SCHEMA_VERSION,
            kind: BASELINE_KIND.to_owned(),
            rng: RNG_ALGORITHM.to_owned(),
            method: self.method,
            quantile: self.quantile,
            threshold: self.threshold,
            seed: self.seed,
            resamples: self.resamples,
            sample_size: self.sample_size,
            medioid_index: self.medioid_index,
            baseline_distances: self.baseline_distances.clone(),
            config: self.config.clone(),
            medioid: self.medioid.to_document(),
        }
    }

    pub fn from_document(doc: BaselineDocument<T>) -> Result<Self> {
        if doc.kind != BASELINE_KIND {
            return Err(Error::invalid(format!("not a drift baseline (kind '{}')", doc.kind)));
        }
        if doc.schema != crate::SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported baseline schema {} (expected {})", doc.schema, crate::SCHEMA_VERSION)));
        }
        if doc.rng != RNG_ALGORITHM {
            return Err(Error::invalid(format!("baseline was drawn with rng '{}', this build uses '{RNG_ALGORITHM}'", doc.rng)));
        }
        if doc.baseline_distances.is_empty() || doc.baseline_distances.iter().any(|d| !(*d >= T::zero())) {
            return Err(Error::invalid("baseline distances must be nonempty and nonnegative"));
        }
        let medioid = MMNetwork::from_document(doc.medioid, None)?;
        Ok(DriftBaseline {
            medioid,
            medioid_index: doc.medioid_index,
            baseline_distances: doc.baseline_distances,
            threshold: doc.threshold,
            quantile: doc.quantile,
            config: doc.config,
            method: doc.method,
            seed: doc.seed,
            resamples: doc.resamples,
            sample_size: doc.sample_size,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("baseline serializes")
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: BaselineDocument<T> = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        Self::from_document(doc).map_err(|e| match e {
            Error::InvalidInput(m) => Error::parse(path, m),
            other => other,
        })
    }
}

const BASELINE_KIND: &str = "drift-baseline";

/// On-disk form of a [`DriftBaseline`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BaselineDocument<T> {
    pub schema: u32,
    pub kind: String,
    pub rng: String,
    pub method: Method,
    pub quantile: f64,
    pub threshold: T,
    pub seed: u64,
    pub resamples: usize,
    pub sample_size: usize,
    pub medioid_index: usize,
    pub baseline_distances: Vec<T>,
    pub config: MapperConfig,
    pub medioid: NetworkDocument<T>,
}

/// Distance from the baseline medioid to the Mapper graph of `candidate`.
pub fn score_sample<T: Scalar>(
    baseline: &DriftBaseline<T>,
    candidate: Arc<PointCloud<T>>,
    config: &MapperConfig,
    opts: &DistanceOptions,
) -> Result<DriftScore<T>> {
    let net = build_mapper(candidate, config)?;
    let d = distance(baseline.method, &baseline.medioid, &net, opts)?;
    Ok(DriftScore { distance: d, is_outlier: d > baseline.threshold, percentile: baseline.percentile_of(d) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin<T> {
    pub lo: T,
    pub hi: T,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
pub fn histogram<T: Scalar>(values: &[T], bins: usize) -> Vec<HistogramBin<T>> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    let width = (hi - lo) / T::lit(bins as f64);
    let mut out: Vec<HistogramBin<T>> = (0..bins)
        .map(|k| HistogramBin {
            lo: lo + width * T::lit(k as f64),
            hi: if k + 1 == bins { hi } else { lo + width * T::lit((k + 1) as f64) },
            count: 0,
        })
        .collect();
    for &v in values {
        let k = if width > T::zero() { ((v - lo) / width).floor().as_f64() as usize } else { 0 };
        out[k.min(bins - 1)].count += 1;
    }
    out
}

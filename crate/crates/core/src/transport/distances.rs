//! Transport distances between metric-measure networks.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gromov::{fused_gromov_wasserstein, gromov_wasserstein, GwInit, GwOptions};
use super::sinkhorn::{solve_transport_sinkhorn, SinkhornOptions};
use super::solve_marginals;
use crate::error::{Error, Result};
use crate::mmspace::{check_compatible, cross_extrinsic, DistanceMatrix, MMNetwork};
use crate::scalar::Scalar;

/// How the transport LPs inside a distance are solved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Solver {
    #[default]
    Exact,
    /// Entropic approximation; a run that misses its tolerance is an error.
    Sinkhorn(SinkhornOptions),
}

impl Solver {
    fn solve<T: Scalar>(&self, a: &[T], b: &[T], cost: &Array2<T>) -> Result<T> {
        match self {
            Solver::Exact => Ok(solve_marginals(a, b, cost)?.objective),
            Solver::Sinkhorn(opts) => {
                let mu_x = crate::mmspace::Measure::new(a.to_vec())?;
                let mu_y = crate::mmspace::Measure::new(b.to_vec())?;
                let eps = opts.epsilon_for(cost);
                let out = solve_transport_sinkhorn(&mu_x, &mu_y, cost, eps, T::lit(opts.tol), opts.max_iter)?;
                if !out.converged {
                    return Err(Error::NotConverged(opts.max_iter));
                }
                Ok(out.plan.objective)
            }
        }
    }
}

/// Per-node eccentricity `s(v) = sum_{u in component(v)} mass(u) * intrinsic(v, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EccentricityVector<T> {
    pub values: Vec<T>,
}

pub fn eccentricity<T: Scalar>(x: &MMNetwork<T>) -> EccentricityVector<T> {
    let d = x.intrinsic();
    let mass = x.mass().weights();
    let values = (0..x.len())
        .map(|v| {
            (0..x.len())
                .filter(|&u| d.is_reachable(v, u))
                .fold(T::zero(), |acc, u| acc + mass[u] * d.raw(v, u))
        })
        .collect();
    EccentricityVector { values }
}

/// `|s_X(i) - s_Y(j)|`.
pub fn eccentricity_cost<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Array2<T> {
    let (sx, sy) = (eccentricity(x).values, eccentricity(y).values);
    Array2::from_shape_fn((sx.len(), sy.len()), |(i, j)| (sx[i] - sy[j]).abs())
}

/// `scale * (|s_X(i) - s_Y(j)| + d_E(i, j))`.
pub fn naw_cost<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>, scale: f64) -> Result<Array2<T>> {
    let ext = cross_extrinsic(x, y)?;
    let ecc = eccentricity_cost(x, y);
    let k = T::lit(scale);
    Ok(Array2::from_shape_fn(ext.dim(), |(i, j)| k * (ecc[[i, j]] + ext[[i, j]])))
}

fn masses<'a, T: Scalar>(x: &'a MMNetwork<T>, y: &'a MMNetwork<T>) -> (&'a [T], &'a [T]) {
    (x.mass().weights(), y.mass().weights())
}

/// Exact W1 between node measures under the extrinsic cost.
pub fn wasserstein<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Result<T> {
    wasserstein_with(x, y, &Solver::Exact)
}

pub fn wasserstein_with<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>, solver: &Solver) -> Result<T> {
    let cost = cross_extrinsic(x, y)?;
    let (a, b) = masses(x, y);
    solver.solve(a, b, &cost)
}

/// Transport between eccentricity profiles; a lower bound for GW.
pub fn flb<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Result<T> {
    flb_with(x, y, &Solver::Exact)
}

pub fn flb_with<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>, solver: &Solver) -> Result<T> {
    let (a, b) = masses(x, y);
    solver.solve(a, b, &eccentricity_cost(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NawOptions {
    /// Multiplier on `|s_X - s_Y| + d_E`; the distance is defined with 1/2.
    pub scale: f64,
    pub solver: Solver,
}

impl Default for NawOptions {
    fn default() -> Self {
        NawOptions { scale: 0.5, solver: Solver::Exact }
    }
}

/// Network augmented Wasserstein distance with the default options.
pub fn naw<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>) -> Result<T> {
    naw_with(x, y, &NawOptions::default())
}

pub fn naw_with<T: Scalar>(x: &MMNetwork<T>, y: &MMNetwork<T>, opts: &NawOptions) -> Result<T> {
    if !(opts.scale > 0.0) || !opts.scale.is_finite() {
        return Err(Error::invalid(format!("naw scale must be positive, got {}", opts.scale)));
    }
    let cost = naw_cost(x, y, opts.scale)?;
    let (a, b) = masses(x, y);
    opts.solver.solve(a, b, &cost)
}

/// Named network distance, as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Naw,
    Wasserstein,
    Gw,
    Fgw,
    Flb,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Naw, Method::Wasserstein, Method::Gw, Method::Fgw, Method::Flb];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Naw => "naw",
            Method::Wasserstein => "wasserstein",
            Method::Gw => "gw",
            Method::Fgw => "fgw",
            Method::Flb => "flb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}' (expected naw, wasserstein, gw, fgw or flb)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistanceOptions {
    /// LP solver for naw, wasserstein and flb. GW variants always use exact LPs.
    pub solver: Solver,
    pub naw_scale: Option<f64>,
    pub gw: GwOptions,
}

pub fn distance<T: Scalar>(method: Method, x: &MMNetwork<T>, y: &MMNetwork<T>, opts: &DistanceOptions) -> Result<T> {
    check_compatible(x, y)?;
    match method {
        Method::Naw => {
            let scale = opts.naw_scale.unwrap_or(NawOptions::default().scale);
            naw_with(x, y, &NawOptions { scale, solver: opts.solver })
        }
        Method::Wasserstein => wasserstein_with(x, y, &opts.solver),
        Method::Flb => flb_with(x, y, &opts.solver),
        Method::Gw => Ok(gromov_wasserstein(x, y, &GwInit::Product, &opts.gw)?.value),
        Method::Fgw => Ok(fused_gromov_wasserstein(x, y, &GwInit::Product, &opts.gw)?.value),
    }
}

/// Symmetric matrix of `distance(method, ...)` over all pairs, computed in
/// parallel over pairs. Only `i < j` is evaluated; the diagonal is zero.
pub fn pairwise_distances<T: Scalar>(
    networks: &[MMNetwork<T>],
    method: Method,
    opts: &DistanceOptions,
) -> Result<DistanceMatrix<T>> {
    let n = networks.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| distance(method, &networks[i], &networks[j], opts))
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((n, n));
    for (&(i, j), v) in pairs.iter().zip(values) {
        out[[i, j]] = v;
        out[[j, i]] = v;
    }
    DistanceMatrix::from_array(out)
}

//! Optimal transport solvers and the distances built on them.
//!
//! Linear problems: [`solve_transport_exact`] (network simplex) and
//! [`solve_transport_sinkhorn`] (entropic, log-domain). Network distances:
//! [`wasserstein`], [`flb`], [`naw`], [`gromov_wasserstein`] and
//! [`fused_gromov_wasserstein`]. All use `p = 1`.

mod distances;
mod exact;
mod gromov;
mod sinkhorn;

pub use distances::{
    distance, eccentricity, eccentricity_cost, flb, flb_with, naw, naw_cost, naw_with, pairwise_distances,
    wasserstein, wasserstein_with, DistanceOptions, EccentricityVector, Method, NawOptions, Solver,
};
pub use exact::solve_transport_exact;
pub use gromov::{fused_gromov_wasserstein, gromov_wasserstein, GwCostTensor, GwInit, GwOptions, GwOutcome};
pub use sinkhorn::{default_epsilon, solve_transport_sinkhorn, SinkhornOptions, SinkhornOutcome};

pub(crate) use exact::solve_marginals;

use ndarray::Array2;
use crate::scalar::Scalar;

/// A coupling between two measures and the objective it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T> {
    pub coupling: Array2<T>,
    pub objective: T,
}

impl<T: Scalar> TransportPlan<T> {
    /// Wraps a coupling, evaluating `<cost, coupling>` as its objective.
    pub fn new(coupling: Array2<T>, cost: &Array2<T>) -> Self {
        let objective = linear_objective(&coupling, cost);
        TransportPlan { coupling, objective }
    }

    /// Wraps a coupling whose objective was computed elsewhere (e.g. a quadratic one).
    pub fn with_objective(coupling: Array2<T>, objective: T) -> Self {
        TransportPlan { coupling, objective }
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.coupling.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        self.coupling.columns().into_iter().map(|c| c.sum()).collect()
    }

    /// L1 violation of the prescribed marginals.
    pub fn marginal_error(&self, a: &[T], b: &[T]) -> T {
        let rows = self.row_sums().into_iter().zip(a).map(|(s, &w)| (s - w).abs());
        let cols = self.col_sums().into_iter().zip(b).map(|(s, &w)| (s - w).abs());
        rows.chain(cols).fold(T::zero(), |acc, e| acc + e)
    }
}

/// `sum_ij cost_ij * plan_ij`.
pub fn linear_objective<T: Scalar>(plan: &Array2<T>, cost: &Array2<T>) -> T {
    plan.iter().zip(cost.iter()).fold(T::zero(), |acc, (&p, &c)| if p == T::zero() { acc } else { acc + p * c })
}

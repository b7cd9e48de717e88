//! Entropic transport by Sinkhorn scaling, carried out on dual potentials in
//! the log domain so small `epsilon` does not underflow the Gibbs kernel.

use ndarray::Array2;

use super::exact::check_cost;
use super::TransportPlan;
use crate::error::{Error, Result};
use crate::mmspace::Measure;
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornOptions {
    /// Regularization strength; `None` means 5% of the median cost entry.
    pub epsilon: Option<f64>,
    /// Target L1 marginal violation.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SinkhornOptions {
    fn default() -> Self {
        SinkhornOptions { epsilon: None, tol: 1e-9, max_iter: 5000 }
    }
}

impl SinkhornOptions {
    pub fn epsilon_for<T: Scalar>(&self, cost: &Array2<T>) -> T {
        self.epsilon.map(T::lit).unwrap_or_else(|| default_epsilon(cost))
    }
}

#[derive(Debug, Clone)]
pub struct SinkhornOutcome<T> {
    /// Objective is `<cost, coupling>` without the entropy term.
    pub plan: TransportPlan<T>,
    pub converged: bool,
    pub iterations: usize,
    pub marginal_error: T,
    pub epsilon: T,
}

/// 5% of the median cost entry, falling back to 5% of the largest entry
/// (or 1) when the median is zero.
pub fn default_epsilon<T: Scalar>(cost: &Array2<T>) -> T {
    let mut v: Vec<T> = cost.iter().copied().collect();
    v.sort_by(total_cmp);
    let median = if v.is_empty() {
        T::zero()
    } else if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        (v[v.len() / 2 - 1] + v[v.len() / 2]) / T::lit(2.0)
    };
    let base = if median > T::zero() { median } else { v.last().copied().filter(|m| *m > T::zero()).unwrap_or(T::one()) };
    base * T::lit(0.05)
}

fn log_sum_exp<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> T {
    let max = values.clone().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    max + values.map(|x| (x - max).exp()).sum::<T>().ln()
}

/// Dual potentials plus the data they are scaled against.
struct Potentials<'a, T> {
    cost: &'a Array2<T>,
    a: &'a [T],
    log_a: Vec<T>,
    log_b: Vec<T>,
    f: Vec<T>,
    g: Vec<T>,
}

impl<T: Scalar> Potentials<'_, T> {
    /// Alternating updates at fixed `epsilon` until the row error is at most
    /// `tol` or `budget` sweeps are spent. Returns (sweeps, row error).
    fn iterate(&mut self, epsilon: T, tol: T, budget: usize) -> (usize, T) {
        let (n, m) = self.cost.dim();
        let cost = self.cost;
        let mut err = T::infinity();
        for sweep in 1..=budget {
            for i in 0..n {
                let lse = log_sum_exp((0..m).map(|j| (self.g[j] - cost[[i, j]]) / epsilon));
                self.f[i] = epsilon * (self.log_a[i] - lse);
            }
            for j in 0..m {
                let lse = log_sum_exp((0..n).map(|i| (self.f[i] - cost[[i, j]]) / epsilon));
                self.g[j] = epsilon * (self.log_b[j] - lse);
            }
            // Columns are exact after the g-update; only rows can be off.
            err = (0..n)
                .map(|i| {
                    let s: T = (0..m).map(|j| ((self.f[i] + self.g[j] - cost[[i, j]]) / epsilon).exp()).sum();
                    (s - self.a[i]).abs()
                })
                .sum();
            if err <= tol {
                return (sweep, err);
            }
        }
        (budget, err)
    }
}

/// Sweeps allowed per intermediate stage of the epsilon schedule.
const STAGE_SWEEPS: usize = 50;

/// Log-domain Sinkhorn with epsilon scaling: the regularization starts at
/// the largest cost and halves down to `epsilon`, warm-starting the
/// potentials each stage. `max_iter` bounds the total number of sweeps.
pub fn solve_transport_sinkhorn<T: Scalar>(
    mu_x: &Measure<T>,
    mu_y: &Measure<T>,
    cost: &Array2<T>,
    epsilon: T,
    tol: T,
    max_iter: usize,
) -> Result<SinkhornOutcome<T>> {
    let (a, b) = (mu_x.weights(), mu_y.weights());
    let (n, m) = (a.len(), b.len());
    check_cost(n, m, cost)?;
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("sinkhorn epsilon must be positive, got {epsilon}")));
    }
    let mut state = Potentials {
        cost,
        a,
        log_a: a.iter().map(|w| w.ln()).collect(),
        log_b: b.iter().map(|w| w.ln()).collect(),
        f: vec![T::zero(); n],
        g: vec![T::zero(); m],
    };
    let half = T::lit(0.5);
    let mut stage_eps = cost.iter().copied().fold(T::zero(), T::max);
    let mut iterations = 0;
    while stage_eps * half > epsilon && iterations < max_iter {
        let budget = STAGE_SWEEPS.min(max_iter - iterations);
        iterations += state.iterate(stage_eps, tol.max(T::lit(1e-3)), budget).0;
        stage_eps = stage_eps * half;
    }
    let (sweeps, err) = state.iterate(epsilon, tol, max_iter.saturating_sub(iterations));
    iterations += sweeps;
    let (f, g) = (&state.f, &state.g);
    let coupling = Array2::from_shape_fn((n, m), |(i, j)| ((f[i] + g[j] - cost[[i, j]]) / epsilon).exp());
    let plan = TransportPlan::new(coupling, cost);
    let marginal_error = plan.marginal_error(a, b);
    Ok(SinkhornOutcome { plan, converged: err <= tol, iterations, marginal_error, epsilon })
}

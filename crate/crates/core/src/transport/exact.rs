//! Exact transport by the network simplex method specialized to the
//! bipartite transportation graph (rows supply, columns demand).
//!
//! A basis is a spanning tree of `n + m - 1` cells. Each pivot prices all
//! non-basic cells with the tree potentials, pushes flow around the cycle
//! the entering cell closes, and drops the blocking cell. Entering cells
//! follow Dantzig's rule (most negative reduced cost, lowest index on ties);
//! after a run of degenerate pivots the solver switches to Bland's rule
//! until a pivot moves flow, which rules out cycling.

use ndarray::Array2;

use super::TransportPlan;
use crate::error::{Error, Result};
use crate::mmspace::Measure;
use crate::scalar::Scalar;

/// Globally optimal plan for `min <cost, P>` over couplings of `mu_x`, `mu_y`.
pub fn solve_transport_exact<T: Scalar>(mu_x: &Measure<T>, mu_y: &Measure<T>, cost: &Array2<T>) -> Result<TransportPlan<T>> {
    solve_marginals(mu_x.weights(), mu_y.weights(), cost)
}

pub(crate) fn check_cost<T: Scalar>(n: usize, m: usize, cost: &Array2<T>) -> Result<()> {
    if cost.dim() != (n, m) {
        let (r, c) = cost.dim();
        return Err(Error::invalid(format!("cost matrix is {r}x{c}, marginals need {n}x{m}")));
    }
    if let Some(v) = cost.iter().find(|v| !v.is_finite() || **v < T::zero()) {
        return Err(Error::invalid(format!("cost entries must be finite and nonnegative, found {v}")));
    }
    Ok(())
}

pub(crate) fn solve_marginals<T: Scalar>(a: &[T], b: &[T], cost: &Array2<T>) -> Result<TransportPlan<T>> {
    check_cost(a.len(), b.len(), cost)?;
    let coupling = NetworkSimplex::new(a, b, cost).run()?;
    Ok(TransportPlan::new(coupling, cost))
}

struct NetworkSimplex<'a, T> {
    n: usize,
    m: usize,
    cost: &'a Array2<T>,
    /// Basic cells and their flows; always `n + m - 1` of them.
    cells: Vec<(usize, usize)>,
    flow: Vec<T>,
    basic: Vec<bool>,
    tol: T,
}

impl<'a, T: Scalar> NetworkSimplex<'a, T> {
    fn new(a: &[T], b: &[T], cost: &'a Array2<T>) -> Self {
        let (n, m) = (a.len(), b.len());
        let cmax = cost.iter().copied().fold(T::zero(), T::max);
        let tol = T::epsilon() * T::lit(64.0 * (n + m) as f64) * cmax.max(T::one());
        let mut s = NetworkSimplex {
            n,
            m,
            cost,
            cells: Vec::with_capacity(n + m - 1),
            flow: Vec::with_capacity(n + m - 1),
            basic: vec![false; n * m],
            tol,
        };
        s.northwest_corner(a, b);
        s
    }

    /// Staircase starting basis; ties step down a row so the tree stays spanning.
    fn northwest_corner(&mut self, a: &[T], b: &[T]) {
        let (mut i, mut j) = (0, 0);
        let (mut ra, mut rb) = (a[0], b[0]);
        loop {
            let x = ra.min(rb).max(T::zero());
            self.cells.push((i, j));
            self.flow.push(x);
            self.basic[i * self.m + j] = true;
            ra = ra - x;
            rb = rb - x;
            if i + 1 == self.n && j + 1 == self.m {
                break;
            }
            if j + 1 == self.m || (ra <= rb && i + 1 < self.n) {
                i += 1;
                ra = a[i];
            } else {
                j += 1;
                rb = b[j];
            }
        }
    }

    /// Basic-cell indices incident to each tree node (rows `0..n`, columns `n..n+m`).
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + self.m];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push(k);
            adj[self.n + j].push(k);
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<usize>]) -> (Vec<T>, Vec<T>) {
        let mut u = vec![T::zero(); self.n];
        let mut v = vec![T::zero(); self.m];
        let mut seen = vec![false; self.n + self.m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(node) = stack.pop() {
            for &k in &adj[node] {
                let (i, j) = self.cells[k];
                let c = self.cost[[i, j]];
                let other = if node < self.n { self.n + j } else { i };
                if seen[other] {
                    continue;
                }
                if node < self.n {
                    v[j] = c - u[i];
                } else {
                    u[i] = c - v[j];
                }
                seen[other] = true;
                stack.push(other);
            }
        }
        (u, v)
    }

    fn entering(&self, u: &[T], v: &[T], bland: bool) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize, usize)> = None;
        for i in 0..self.n {
            for j in 0..self.m {
                if self.basic[i * self.m + j] {
                    continue;
                }
                let r = self.cost[[i, j]] - u[i] - v[j];
                if r < -self.tol {
                    if bland {
                        return Some((i, j));
                    }
                    if best.is_none_or(|(br, _, _)| r < br) {
                        best = Some((r, i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    /// Basic cells on the tree path from row `i` to column `j`, in path order.
    fn tree_path(&self, adj: &[Vec<usize>], i: usize, j: usize) -> Vec<usize> {
        let total = self.n + self.m;
        let mut via = vec![usize::MAX; total];
        let mut seen = vec![false; total];
        let mut queue = std::collections::VecDeque::from([i]);
        seen[i] = true;
        let target = self.n + j;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &k in &adj[node] {
                let (ci, cj) = self.cells[k];
                let other = if node < self.n { self.n + cj } else { ci };
                if !seen[other] {
                    seen[other] = true;
                    via[other] = k;
                    queue.push_back(other);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let k = via[node];
            path.push(k);
            let (ci, cj) = self.cells[k];
            node = if node < self.n { self.n + cj } else { ci };
        }
        path.reverse();
        path
    }

    fn run(mut self) -> Result<Array2<T>> {
        let max_pivots = 50 * (self.n * self.m + self.n + self.m) + 1000;
        let mut degenerate_run = 0usize;
        let mut pivots = 0usize;
        loop {
            let adj = self.adjacency();
            let (u, v) = self.potentials(&adj);
            let bland = degenerate_run > self.n + self.m;
            let Some((ei, ej)) = self.entering(&u, &v, bland) else { break };
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::NotConverged(max_pivots));
            }
            // Cycle: entering cell gets +theta, path cells alternate -, +, -, ...
            let path = self.tree_path(&adj, ei, ej);
            let mut leave: Option<usize> = None;
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    let better = match leave {
                        None => true,
                        Some(l) => self.flow[k] < self.flow[l] || (self.flow[k] == self.flow[l] && self.cells[k] < self.cells[l]),
                    };
                    if better {
                        leave = Some(k);
                    }
                }
            }
            let leave = leave.expect("cycle has a decreasing cell");
            let theta = self.flow[leave];
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    self.flow[k] = (self.flow[k] - theta).max(T::zero());
                } else {
                    self.flow[k] = self.flow[k] + theta;
                }
            }
            let (li, lj) = self.cells[leave];
            self.basic[li * self.m + lj] = false;
            self.basic[ei * self.m + ej] = true;
            self.cells[leave] = (ei, ej);
            self.flow[leave] = theta;
            if theta > T::zero() {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
        let mut plan = Array2::zeros((self.n, self.m));
        for (&(i, j), &x) in self.cells.iter().zip(&self.flow) {
            plan[[i, j]] = x;
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn forced_plan() {
        let p = solve_marginals(&[1.0], &[0.5, 0.5], &array![[1.0, 3.0]]).unwrap();
        assert_eq!(p.objective, 2.0);
    }

    #[test]
    fn identity_when_marginals_match() {
        let a = [0.2, 0.3, 0.5];
        let c = array![[0.0, 1.0, 2.0], [1.0, 0.0, 4.0], [3.0, 5.0, 0.0]];
        let p = solve_marginals(&a, &a, &c).unwrap();
        assert_eq!(p.objective, 0.0);
        for i in 0..3 {
            assert_eq!(p.coupling[[i, i]], a[i]);
        }
    }

    #[test]
    fn anti_diagonal_swap() {
        let a = [0.5, 0.5];
        let c = array![[1.0, 0.0], [0.0, 1.0]];
        let p = solve_marginals(&a, &a, &c).unwrap();
        assert_eq!(p.objective, 0.0);
        assert_eq!(p.coupling, array![[0.0, 0.5], [0.5, 0.0]]);
    }

    #[test]
    fn rejects_bad_cost() {
        assert!(solve_marginals(&[1.0], &[1.0], &array![[-1.0]]).is_err());
        assert!(solve_marginals(&[1.0], &[0.5, 0.5], &array![[1.0]]).is_err());
    }
}

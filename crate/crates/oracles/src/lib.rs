//! Brute-force reference computations.
//!
//! Everything here works on plain `Vec`/slice `f64` data and shares no code
//! with `mapdist`, so the test suites can check the library against an
//! independent route. None of it is meant to be fast.

/// Enumerates the vertices (basic feasible solutions) of the transportation
/// polytope with row sums `a` and column sums `b`.
///
/// A basis is a set of `n + m - 1` cells forming a spanning tree of the
/// bipartite row/column graph; its flows are forced by leaf peeling.
pub fn transport_vertices(a: &[f64], b: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let n = a.len();
    let m = b.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let k = n + m - 1;
    let mut out: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<(usize, usize)> = pick.iter().map(|&c| cells[c]).collect();
        if let Some(flow) = peel(a, b, &chosen) {
            if flow.iter().flatten().all(|&x| x >= -1e-12) {
                let dup = out.iter().any(|v| {
                    v.iter()
                        .flatten()
                        .zip(flow.iter().flatten())
                        .all(|(p, q)| (p - q).abs() < 1e-12)
                });
                if !dup {
                    out.push(flow);
                }
            }
        }
        if !next_combination(&mut pick, cells.len()) {
            break;
        }
    }
    out
}

fn next_combination(pick: &mut [usize], total: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < total - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the flows on a candidate basis by repeatedly fixing a row or column
/// that has exactly one unresolved cell. Returns `None` if the cells do not
/// form a spanning tree.
fn peel(a: &[f64], b: &[f64], cells: &[(usize, usize)]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let m = b.len();
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut done = vec![false; cells.len()];
    let mut flow = vec![vec![0.0; m]; n];
    let mut remaining = cells.len();
    while remaining > 0 {
        let mut progressed = false;
        for i in 0..n {
            let open: Vec<usize> = (0..cells.len()).filter(|&c| !done[c] && cells[c].0 == i).collect();
            if open.len() == 1 {
                let c = open[0];
                let j = cells[c].1;
                flow[i][j] = ra[i];
                rb[j] -= ra[i];
                ra[i] = 0.0;
                done[c] = true;
                remaining -= 1;
                progressed = true;
            }
        }
        for j in 0..m {
            let open: Vec<usize> = (0..cells.len()).filter(|&c| !done[c] && cells[c].1 == j).collect();
            if open.len() == 1 {
                let c = open[0];
                let i = cells[c].0;
                flow[i][j] = rb[j];
                ra[i] -= rb[j];
                rb[j] = 0.0;
                done[c] = true;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            return None;
        }
    }
    // A cycle-free set of n+m-1 cells spans; check the residual marginals to
    // be safe against a forest that happened to peel.
    let slack: f64 = ra.iter().chain(rb.iter()).map(|x| x.abs()).sum();
    if slack > 1e-9 {
        return None;
    }
    Some(flow)
}

/// Minimum of `sum cost * plan` over all transportation polytope vertices.
pub fn transport_min_cost(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    transport_vertices(a, b)
        .iter()
        .map(|plan| {
            plan.iter()
                .zip(cost)
                .map(|(pr, cr)| pr.iter().zip(cr).map(|(p, c)| p * c).sum::<f64>())
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Quadratic Gromov-Wasserstein objective `sum |dx(i,i') - dy(j,j')| p_ij p_i'j'`.
pub fn gw_objective(dx: &[Vec<f64>], dy: &[Vec<f64>], plan: &[Vec<f64>]) -> f64 {
    let n = dx.len();
    let m = dy.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            for ip in 0..n {
                for jp in 0..m {
                    total += (dx[i][ip] - dy[j][jp]).abs() * plan[i][j] * plan[ip][jp];
                }
            }
        }
    }
    total
}

/// Minimum of the GW objective over the transportation polytope vertices.
pub fn gw_vertex_min(dx: &[Vec<f64>], dy: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    transport_vertices(a, b)
        .iter()
        .map(|plan| gw_objective(dx, dy, plan))
        .fold(f64::INFINITY, f64::min)
}

/// Floyd-Warshall all-pairs shortest paths; `f64::INFINITY` marks unreachable pairs.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn euclidean(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Hausdorff distance between two finite point sets, straight from the
/// definition: the larger of the two directed sup-inf distances.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let directed = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| euclidean(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Naive agglomerative single linkage: returns the sorted merge heights.
pub fn single_linkage_heights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut heights = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                for &p in &clusters[a] {
                    for &q in &clusters[b] {
                        if d[p][q] < best.0 {
                            best = (d[p][q], a, b);
                        }
                    }
                }
            }
        }
        let (h, a, b) = best;
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        heights.push(h);
    }
    heights
}

/// Number of connected components of an undirected graph (union-find).
pub fn component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let mut count = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            count -= 1;
        }
    }
    count
}

/// First Betti number of a graph: `|E| - |V| + components`.
pub fn betti1(n: usize, edges: &[(usize, usize)]) -> usize {
    edges.len() + component_count(n, edges) - n
}

/// Descending eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_of_two_by_two() {
        let v = transport_vertices(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn forced_plan() {
        let c = transport_min_cost(&[1.0], &[0.5, 0.5], &[vec![1.0, 3.0]]);
        assert!((c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_path_laplacian() {
        let ev = jacobi_eigenvalues(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert!((ev[0] - 2.0).abs() < 1e-10 && ev[1].abs() < 1e-10);
    }

    #[test]
    fn betti_of_cycle() {
        assert_eq!(betti1(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]), 1);
        assert_eq!(betti1(3, &[(0, 1)]), 0);
    }
}

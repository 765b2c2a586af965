//! Profile (skyline) Cholesky factorization with reverse Cuthill-McKee
//! ordering, for the SPD subsystems arising from P1 meshes. Bandwidths on
//! desk-scale 2D triangulations stay near sqrt(n), so the profile factor is
//! cheap and exactly reproducible.

use super::sparse::Csr;

/// Reverse Cuthill-McKee ordering of the subgraph induced by `subset`.
/// Returns `order` such that `order[k]` is the k-th subset member.
fn rcm_order(a: &Csr, subset: &[usize]) -> Vec<usize> {
    let n = subset.len();
    let mut local = vec![usize::MAX; a.n];
    for (k, &d) in subset.iter().enumerate() {
        local[d] = k;
    }
    let adj: Vec<Vec<usize>> = subset
        .iter()
        .map(|&d| {
            let mut nb: Vec<usize> = a
                .row(d)
                .filter_map(|(c, _)| (local[c] != usize::MAX && local[c] != local[d]).then(|| local[c]))
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    let deg: Vec<usize> = adj.iter().map(|v| v.len()).collect();

    let bfs = |start: usize, visited: &mut Vec<bool>, order: &mut Vec<usize>| {
        let mut queue = std::collections::VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nb: Vec<usize> = adj[u].iter().cloned().filter(|&v| !visited[v]).collect();
            nb.sort_by_key(|&v| deg[v]);
            for v in nb {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    };

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    while order.len() < n {
        // min-degree unvisited start, improved by one BFS sweep to a
        // pseudo-peripheral node
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| deg[v])
            .unwrap();
        let mut probe_visited = visited.clone();
        let mut probe_order = Vec::new();
        bfs(start, &mut probe_visited, &mut probe_order);
        let far = *probe_order.last().unwrap();
        bfs(far, &mut visited, &mut order);
    }
    order.reverse();
    order
}

/// Cholesky factor stored by rows within the profile `lo[i]..=i`.
pub struct SkylineCholesky {
    /// Subset dof of each local (permuted) index.
    pub order: Vec<usize>,
    /// Local (permuted) index of each subset dof (usize::MAX outside).
    pub local: Vec<usize>,
    lo: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl SkylineCholesky {
    /// Factor the SPD submatrix `a[subset][subset]`.
    pub fn factor(a: &Csr, subset: &[usize]) -> Result<SkylineCholesky, String> {
        let n = subset.len();
        let perm = rcm_order(a, subset);
        let order: Vec<usize> = perm.iter().map(|&k| subset[k]).collect();
        let mut local = vec![usize::MAX; a.n];
        for (k, &d) in order.iter().enumerate() {
            local[d] = k;
        }
        // profile: lowest connected column per row
        let mut lo: Vec<usize> = (0..n).collect();
        for (i, &d) in order.iter().enumerate() {
            for (c, _) in a.row(d) {
                let lj = local[c];
                if lj != usize::MAX && lj < i {
                    lo[i] = lo[i].min(lj);
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - lo[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];
        for (i, &d) in order.iter().enumerate() {
            for (c, v) in a.row(d) {
                let j = local[c];
                if j != usize::MAX && j <= i {
                    vals[start[i] + (j - lo[i])] += v;
                }
            }
        }
        // in-place profile Cholesky
        for i in 0..n {
            for j in lo[i]..i {
                let kmin = lo[i].max(lo[j]);
                let mut s = vals[start[i] + (j - lo[i])];
                for k in kmin..j {
                    s -= vals[start[i] + (k - lo[i])] * vals[start[j] + (k - lo[j])];
                }
                let djj = vals[start[j] + (j - lo[j])];
                vals[start[i] + (j - lo[i])] = s / djj;
            }
            let mut d = vals[start[i] + (i - lo[i])];
            for k in lo[i]..i {
                let l = vals[start[i] + (k - lo[i])];
                d -= l * l;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(format!("non-SPD pivot {d:.3e} at row {i} of {n}"));
            }
            vals[start[i] + (i - lo[i])] = d.sqrt();
        }
        Ok(SkylineCholesky { order, local, lo, start, vals })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Solve `A x = b` where `b` is given on the subset in local order.
    pub fn solve_local(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in self.lo[i]..i {
                s -= self.vals[self.start[i] + (k - self.lo[i])] * y[k];
            }
            y[i] = s / self.vals[self.start[i] + (i - self.lo[i])];
        }
        for i in (0..n).rev() {
            y[i] /= self.vals[self.start[i] + (i - self.lo[i])];
            let xi = y[i];
            for k in self.lo[i]..i {
                y[k] -= self.vals[self.start[i] + (k - self.lo[i])] * xi;
            }
        }
        y
    }

    /// Solve with `b` indexed by global dof; the result is scattered back to
    /// global dofs (entries outside the subset untouched).
    pub fn solve_global(&self, b: &[f64], x: &mut [f64]) {
        let bl: Vec<f64> = self.order.iter().map(|&d| b[d]).collect();
        let xl = self.solve_local(&bl);
        for (k, &d) in self.order.iter().enumerate() {
            x[d] = xl[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // 1D Laplacian, 5 unknowns
        let mut trip = Vec::new();
        for i in 0..5usize {
            trip.push((i, i, 2.0));
            if i > 0 {
                trip.push((i, i - 1, -1.0));
                trip.push((i - 1, i, -1.0));
            }
        }
        let a = Csr::from_triplets(5, &trip);
        let subset: Vec<usize> = (0..5).collect();
        let chol = SkylineCholesky::factor(&a, &subset).unwrap();
        let b = vec![1.0, 0.0, 0.0, 0.0, 2.0];
        let mut x = vec![0.0; 5];
        chol.solve_global(&b, &mut x);
        let mut r = vec![0.0; 5];
        a.matvec(&x, &mut r);
        for i in 0..5 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_singular_matrix() {
        // pure Neumann Laplacian has the constant kernel
        let mut trip = Vec::new();
        for i in 0..4usize {
            let d = if i == 0 || i == 3 { 1.0 } else { 2.0 };
            trip.push((i, i, d));
            if i > 0 {
                trip.push((i, i - 1, -1.0));
                trip.push((i - 1, i, -1.0));
            }
        }
        let a = Csr::from_triplets(4, &trip);
        let subset: Vec<usize> = (0..4).collect();
        assert!(SkylineCholesky::factor(&a, &subset).is_err());
    }
}

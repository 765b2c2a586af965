//! P1 finite elements for the Laplace problems on the meshed corner domain:
//! the mixed Dirichlet/Neumann problem behind the harmonic extension and the
//! Kirchhoff potentials, the pure Neumann problem, and variational normal
//! traces.

mod skyline;
mod sparse;

pub use skyline::SkylineCholesky;
pub use sparse::Csr;

use crate::geometry::{Mesh, SegmentTag};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EllipticError {
    #[error("triangle {0} has non-positive area {1:.3e}")]
    SingularElement(usize, f64),
    #[error("sparse solve failed: {0}")]
    SolverBreakdown(String),
    #[error("Neumann data not compatible: total flux {total:.3e} vs scale {scale:.3e}")]
    IncompatibleFlux { total: f64, scale: f64 },
}

/// Discrete field on the mesh dofs, together with the load vector of the
/// solve that produced it (needed for residual-based normal traces).
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub values: DVector<f64>,
    pub load: DVector<f64>,
}

impl ScalarField {
    pub fn from_values(values: DVector<f64>) -> ScalarField {
        let n = values.len();
        ScalarField { values, load: DVector::zeros(n) }
    }

    /// Interpolate a vertex function into dof values.
    pub fn from_fn(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> ScalarField {
        let coords = mesh.dof_coords();
        ScalarField::from_values(DVector::from_iterator(mesh.n_dofs, coords.iter().map(|&p| f(p))))
    }
}

/// Per-edge Neumann flux density (value at the edge midpoint), aligned with
/// `mesh.boundary`. Entries on Dirichlet-tagged edges are ignored by the
/// mixed solve and used by the pure Neumann solve.
#[derive(Debug, Clone)]
pub struct NeumannBc {
    pub edge_values: Vec<f64>,
}

impl NeumannBc {
    pub fn zero(mesh: &Mesh) -> NeumannBc {
        NeumannBc { edge_values: vec![0.0; mesh.boundary.len()] }
    }
}

/// Assembled P1 system: stiffness matrix, free-surface boundary mass,
/// dof partition and the factorization of the free block.
pub struct StiffnessSystem {
    mesh: Mesh,
    a: Csr,
    gamma_d: Vec<usize>,
    gamma_d_components: Vec<Vec<usize>>,
    free: Vec<usize>,
    m_gamma: DMatrix<f64>,
    chol_free: SkylineCholesky,
    boundary_normals: Vec<[f64; 2]>,
    lumped_area: Vec<f64>,
}

impl StiffnessSystem {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn stiffness(&self) -> &Csr {
        &self.a
    }

    /// Free-surface dofs, left to right (both components concatenated).
    pub fn gamma_d(&self) -> &[usize] {
        &self.gamma_d
    }

    pub fn gamma_d_components(&self) -> &[Vec<usize>] {
        &self.gamma_d_components
    }

    /// Consistent boundary mass matrix on the free-surface dofs.
    pub fn m_gamma(&self) -> &DMatrix<f64> {
        &self.m_gamma
    }

    /// Outward unit normal (out of the fluid) per boundary edge.
    pub fn boundary_normals(&self) -> &[[f64; 2]] {
        &self.boundary_normals
    }

    /// x-coordinates of the free-surface dofs, in `gamma_d` order.
    pub fn gamma_d_x(&self) -> Vec<f64> {
        let coords = self.mesh.dof_coords();
        self.gamma_d.iter().map(|&d| coords[d][0]).collect()
    }

    pub fn bilinear(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let mut au = vec![0.0; self.a.n];
        self.a.matvec(u.as_slice(), &mut au);
        au.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
    }

    /// Dirichlet energy of a discrete field.
    pub fn energy(&self, u: &ScalarField) -> f64 {
        self.bilinear(&u.values, &u.values)
    }

    pub fn neumann_from_fn(&self, f: impl Fn([f64; 2], [f64; 2], SegmentTag) -> f64) -> NeumannBc {
        let mut edge_values = Vec::with_capacity(self.mesh.boundary.len());
        for (e, n) in self.mesh.boundary.iter().zip(&self.boundary_normals) {
            let a = self.mesh.vertices[e.vertices[0]];
            let b = self.mesh.vertices[e.vertices[1]];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            edge_values.push(f(mid, *n, e.tag));
        }
        NeumannBc { edge_values }
    }

    fn neumann_load(&self, bc: &NeumannBc, include_dirichlet_edges: bool) -> DVector<f64> {
        let mut b = DVector::zeros(self.a.n);
        for (e, &g) in self.mesh.boundary.iter().zip(&bc.edge_values) {
            if !include_dirichlet_edges && e.tag == SegmentTag::DirichletFree {
                continue;
            }
            let len = self.mesh.edge_length(e);
            for &v in &e.vertices {
                b[self.mesh.vertex_dof[v]] += 0.5 * g * len;
            }
        }
        b
    }

    fn residual(&self, u: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let mut au = vec![0.0; self.a.n];
        self.a.matvec(u.as_slice(), &mut au);
        DVector::from_iterator(self.a.n, au.iter().zip(b.iter()).map(|(a, bb)| a - bb))
    }

    fn check_residual(&self, r: &DVector<f64>, rows: &[usize], b: &DVector<f64>, u: &DVector<f64>) -> Result<(), EllipticError> {
        let scale = b.amax().max(u.amax()).max(1.0);
        let worst = rows.iter().map(|&i| r[i].abs()).fold(0.0f64, f64::max);
        if worst > 1e-10 * scale {
            return Err(EllipticError::SolverBreakdown(format!(
                "linear-system residual {worst:.3e} exceeds 1e-10 * {scale:.3e}"
            )));
        }
        Ok(())
    }

    /// Solve the mixed problem: prescribed values on the free surface,
    /// prescribed flux on the Neumann parts.
    pub fn solve_mixed(&self, dirichlet: &DVector<f64>, bc: &NeumannBc) -> Result<ScalarField, EllipticError> {
        assert_eq!(dirichlet.len(), self.gamma_d.len());
        let b = self.neumann_load(bc, false);
        let mut u = DVector::zeros(self.a.n);
        for (k, &d) in self.gamma_d.iter().enumerate() {
            u[d] = dirichlet[k];
        }
        // eliminate Dirichlet values from the free rows
        let mut au = vec![0.0; self.a.n];
        self.a.matvec(u.as_slice(), &mut au);
        let rhs: Vec<f64> = (0..self.a.n).map(|i| b[i] - au[i]).collect();
        let mut x = vec![0.0; self.a.n];
        self.chol_free.solve_global(&rhs, &mut x);
        for &f in &self.free {
            u[f] = x[f];
        }
        let r = self.residual(&u, &b);
        self.check_residual(&r, &self.free, &b, &u)?;
        Ok(ScalarField { values: u, load: b })
    }

    /// Solve the pure Neumann problem; the result is the mean-zero
    /// representative. The data must satisfy the discrete compatibility
    /// condition (zero total flux).
    pub fn solve_neumann(&self, bc: &NeumannBc) -> Result<ScalarField, EllipticError> {
        let b = self.neumann_load(bc, true);
        let total: f64 = b.iter().sum();
        let scale: f64 = self
            .mesh
            .boundary
            .iter()
            .zip(&bc.edge_values)
            .map(|(e, &g)| g.abs() * self.mesh.edge_length(e))
            .sum::<f64>()
            .max(1e-300);
        if total.abs() > 1e-8 * scale {
            return Err(EllipticError::IncompatibleFlux { total, scale });
        }
        // pin one dof to remove the constant kernel, then shift to mean zero
        let pinned = 0usize;
        let subset: Vec<usize> = (0..self.a.n).filter(|&i| i != pinned).collect();
        let chol = SkylineCholesky::factor(&self.a, &subset)
            .map_err(EllipticError::SolverBreakdown)?;
        let mut u = DVector::zeros(self.a.n);
        chol.solve_global(b.as_slice(), u.as_mut_slice());
        u[pinned] = 0.0;
        let wsum: f64 = self.lumped_area.iter().sum();
        let mean: f64 = u
            .iter()
            .zip(&self.lumped_area)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            / wsum;
        u.add_scalar_mut(-mean);
        let r = self.residual(&u, &b);
        let rows: Vec<usize> = (0..self.a.n).collect();
        self.check_residual(&r, &rows, &b, &u)?;
        Ok(ScalarField { values: u, load: b })
    }

    /// Weak (variationally lifted) normal derivative of a solved field on the
    /// boundary part with the given tag. Returns the participating dofs (in
    /// path order along the boundary part) and the flux density values.
    pub fn normal_trace(&self, field: &ScalarField, tag: SegmentTag) -> (Vec<usize>, DVector<f64>) {
        let dofs = if tag == SegmentTag::DirichletFree {
            self.gamma_d.clone()
        } else {
            let mut dofs: Vec<usize> = Vec::new();
            for e in self.mesh.edges_of(tag) {
                for &v in &e.vertices {
                    let d = self.mesh.vertex_dof[v];
                    if !dofs.contains(&d) {
                        dofs.push(d);
                    }
                }
            }
            dofs.sort_unstable();
            dofs
        };
        let m = boundary_mass(&self.mesh, tag, &dofs);
        let r = self.residual(&field.values, &field.load);
        let r_tag = DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| r[d]));
        let flux = m
            .clone()
            .cholesky()
            .map(|c| c.solve(&r_tag))
            .unwrap_or_else(|| {
                // fall back to lumped masses if the consistent mass is
                // numerically degenerate (hairline edges)
                let lum: Vec<f64> = (0..dofs.len()).map(|i| m.row(i).sum()).collect();
                DVector::from_iterator(dofs.len(), r_tag.iter().zip(&lum).map(|(r, l)| r / l))
            });
        (dofs, flux)
    }

    /// Normal trace on the free surface, in `gamma_d` order.
    pub fn trace_gamma_d(&self, field: &ScalarField) -> DVector<f64> {
        self.normal_trace(field, SegmentTag::DirichletFree).1
    }

    /// Solve `A_ff x_f = rhs_f` for a vector supported on the free dofs;
    /// helper for Schur-complement assembly.
    pub fn solve_free(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.a.n];
        self.chol_free.solve_global(rhs, &mut x);
        x
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Lumped area weights per dof (row sums of the P1 mass matrix).
    pub fn lumped_area(&self) -> &[f64] {
        &self.lumped_area
    }
}

/// Consistent P1 boundary mass on `dofs` from the edges with the given tag.
pub fn boundary_mass(mesh: &Mesh, tag: SegmentTag, dofs: &[usize]) -> DMatrix<f64> {
    let mut idx = std::collections::HashMap::new();
    for (k, &d) in dofs.iter().enumerate() {
        idx.insert(d, k);
    }
    let mut m = DMatrix::zeros(dofs.len(), dofs.len());
    for e in mesh.edges_of(tag) {
        let len = mesh.edge_length(e);
        let a = idx[&mesh.vertex_dof[e.vertices[0]]];
        let b = idx[&mesh.vertex_dof[e.vertices[1]]];
        m[(a, a)] += len / 3.0;
        m[(b, b)] += len / 3.0;
        m[(a, b)] += len / 6.0;
        m[(b, a)] += len / 6.0;
    }
    m
}

/// Assemble the P1 stiffness system on a mesh.
pub fn assemble(mesh: &Mesh) -> Result<StiffnessSystem, EllipticError> {
    let n = mesh.n_dofs;
    let mut triplets = Vec::with_capacity(9 * mesh.triangles.len());
    let mut lumped_area = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices[v]).collect();
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let area = 0.5 * det;
        if !(area > 1e-14 * mesh.target_h * mesh.target_h) {
            return Err(EllipticError::SingularElement(t, area));
        }
        // gradients of the barycentric basis
        let bvec = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let cvec = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        for i in 0..3 {
            let di = mesh.vertex_dof[tri[i]];
            lumped_area[di] += area / 3.0;
            for j in 0..3 {
                let dj = mesh.vertex_dof[tri[j]];
                let k = (bvec[i] * bvec[j] + cvec[i] * cvec[j]) / (4.0 * area);
                triplets.push((di, dj, k));
            }
        }
    }
    let a = Csr::from_triplets(n, &triplets);

    let gamma_d_components = mesh.surface_components();
    let gamma_d: Vec<usize> = gamma_d_components.iter().flatten().cloned().collect();
    let is_gamma: std::collections::HashSet<usize> = gamma_d.iter().cloned().collect();
    let free: Vec<usize> = (0..n).filter(|d| !is_gamma.contains(d)).collect();
    let m_gamma = boundary_mass(mesh, SegmentTag::DirichletFree, &gamma_d);

    let chol_free = SkylineCholesky::factor(&a, &free).map_err(EllipticError::SolverBreakdown)?;

    // outward normals from the adjacent triangle
    let mut edge_tri = std::collections::HashMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (u, v, w) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let key = (u.min(v), u.max(v));
            edge_tri.insert(key, w);
        }
    }
    let mut boundary_normals = Vec::with_capacity(mesh.boundary.len());
    for e in &mesh.boundary {
        let [u, v] = e.vertices;
        let (pu, pv) = (mesh.vertices[u], mesh.vertices[v]);
        let d = [pv[0] - pu[0], pv[1] - pu[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let mut nrm = [d[1] / len, -d[0] / len];
        if let Some(&w) = edge_tri.get(&(u.min(v), u.max(v))) {
            let pw = mesh.vertices[w];
            let mid = [0.5 * (pu[0] + pv[0]), 0.5 * (pu[1] + pv[1])];
            let toward = [mid[0] - pw[0], mid[1] - pw[1]];
            if nrm[0] * toward[0] + nrm[1] * toward[1] < 0.0 {
                nrm = [-nrm[0], -nrm[1]];
            }
        }
        boundary_normals.push(nrm);
    }

    Ok(StiffnessSystem {
        mesh: mesh.clone(),
        a,
        gamma_d,
        gamma_d_components,
        free,
        m_gamma,
        chol_free,
        boundary_normals,
        lumped_area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, BoundaryEdge, DomainSpec};

    fn tank() -> DomainSpec {
        DomainSpec::rectangular(0.0, 4.0, 6.0, 10.0, 1.0, 0.5, 1.0, 9.81, -0.1)
    }

    fn unit_square_two_triangles() -> Mesh {
        Mesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            boundary: vec![
                BoundaryEdge { vertices: [0, 1], tag: SegmentTag::NeumannBottom },
                BoundaryEdge { vertices: [1, 2], tag: SegmentTag::NeumannBottom },
                BoundaryEdge { vertices: [2, 3], tag: SegmentTag::DirichletFree },
                BoundaryEdge { vertices: [3, 0], tag: SegmentTag::NeumannBottom },
            ],
            corner_vertices: vec![],
            vertex_dof: vec![0, 1, 2, 3],
            n_dofs: 4,
            target_h: 1.0,
        }
    }

    #[test]
    fn unit_square_stiffness_matches_hand_assembly() {
        let sys = assemble(&unit_square_two_triangles()).unwrap();
        let expected = [
            [1.0, -0.5, 0.0, -0.5],
            [-0.5, 1.0, -0.5, 0.0],
            [0.0, -0.5, 1.0, -0.5],
            [-0.5, 0.0, -0.5, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((sys.stiffness().get(i, j) - expected[i][j]).abs() < 1e-14,
                    "A[{i}][{j}] = {}", sys.stiffness().get(i, j));
            }
        }
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let mesh = build_mesh(&tank(), 0.25, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let ones = vec![1.0; mesh.n_dofs];
        let mut y = vec![0.0; mesh.n_dofs];
        sys.stiffness().matvec(&ones, &mut y);
        let worst = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-12, "A*1 = {worst:.3e}");
        assert!(sys.stiffness().asymmetry() < 1e-14);
    }

    #[test]
    fn boundary_mass_row_sums_are_edge_weights() {
        let mesh = build_mesh(&tank(), 0.25, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let m = sys.m_gamma();
        // row sums equal half the total length of the adjacent surface edges
        let coords = mesh.dof_coords();
        for (k, &d) in sys.gamma_d().iter().enumerate() {
            let mut w = 0.0;
            for e in mesh.edges_of(SegmentTag::DirichletFree) {
                let dofs = [mesh.vertex_dof[e.vertices[0]], mesh.vertex_dof[e.vertices[1]]];
                if dofs.contains(&d) {
                    w += 0.5 * mesh.edge_length(e);
                }
            }
            let row_sum: f64 = m.row(k).sum();
            assert!((row_sum - w).abs() < 1e-12, "row {k} at x = {}", coords[d][0]);
        }
    }

    #[test]
    fn constant_dirichlet_gives_constant_field() {
        let mesh = build_mesh(&tank(), 0.25, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let g = DVector::from_element(sys.gamma_d().len(), 3.25);
        let u = sys.solve_mixed(&g, &NeumannBc::zero(&mesh)).unwrap();
        for v in u.values.iter() {
            assert!((v - 3.25).abs() < 1e-10);
        }
        // zero flux everywhere
        let flux = sys.trace_gamma_d(&u);
        assert!(flux.amax() < 1e-10);
    }

    /// Manufactured harmonic solution u = x^2 - z^2 for the mixed solve.
    fn mixed_manufactured_error(h: f64) -> f64 {
        let mesh = build_mesh(&tank(), h, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let exact = |p: [f64; 2]| p[0] * p[0] - p[1] * p[1];
        let coords = mesh.dof_coords();
        let g = DVector::from_iterator(
            sys.gamma_d().len(),
            sys.gamma_d().iter().map(|&d| exact(coords[d])),
        );
        let bc = sys.neumann_from_fn(|mid, n, _| 2.0 * mid[0] * n[0] - 2.0 * mid[1] * n[1]);
        let u = sys.solve_mixed(&g, &bc).unwrap();
        // lumped L2 error
        let mut err2 = 0.0;
        let mut vol = 0.0;
        for (d, &w) in sys.lumped_area().iter().enumerate() {
            let e = u.values[d] - exact(coords[d]);
            err2 += w * e * e;
            vol += w;
        }
        (err2 / vol).sqrt()
    }

    #[test]
    fn mixed_solve_converges_at_second_order() {
        let e1 = mixed_manufactured_error(0.4);
        let e2 = mixed_manufactured_error(0.2);
        let e3 = mixed_manufactured_error(0.1);
        let r1 = (e1 / e2).log2();
        let r2 = (e2 / e3).log2();
        assert!(r1 > 1.6 && r2 > 1.6, "rates {r1:.2}, {r2:.2} (errors {e1:.2e}, {e2:.2e}, {e3:.2e})");
    }

    #[test]
    fn neumann_solve_manufactured() {
        let mesh = build_mesh(&tank(), 0.15, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let bc = sys.neumann_from_fn(|mid, n, _| 2.0 * mid[0] * n[0] - 2.0 * mid[1] * n[1]);
        let u = sys.solve_neumann(&bc).unwrap();
        let coords = mesh.dof_coords();
        // compare against the mean-zero representative of x^2 - z^2
        let mut mean = 0.0;
        let mut vol = 0.0;
        for (d, &w) in sys.lumped_area().iter().enumerate() {
            mean += w * (coords[d][0] * coords[d][0] - coords[d][1] * coords[d][1]);
            vol += w;
        }
        mean /= vol;
        let mut err = 0.0f64;
        for d in 0..mesh.n_dofs {
            let exact = coords[d][0] * coords[d][0] - coords[d][1] * coords[d][1] - mean;
            err = err.max((u.values[d] - exact).abs());
        }
        assert!(err < 0.05, "sup error {err}");
    }

    #[test]
    fn zero_flux_gives_zero_field() {
        let mesh = build_mesh(&tank(), 0.3, 0.5, 2).unwrap();
        let sys = assemble(&mesh).unwrap();
        let u = sys.solve_neumann(&NeumannBc::zero(&mesh)).unwrap();
        assert!(u.values.amax() < 1e-12);
    }

    #[test]
    fn incompatible_flux_rejected() {
        let mesh = build_mesh(&tank(), 0.3, 0.5, 2).unwrap();
        let sys = assemble(&mesh).unwrap();
        let bc = sys.neumann_from_fn(|_, _, _| 0.1);
        assert!(matches!(sys.solve_neumann(&bc), Err(EllipticError::IncompatibleFlux { .. })));
    }

    #[test]
    fn normal_trace_of_linear_fields() {
        let mesh = build_mesh(&tank(), 0.2, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        // u = z has unit upward flux through the free surface
        let u = ScalarField::from_fn(&mesh, |p| p[1]);
        let flux = sys.trace_gamma_d(&u);
        for v in flux.iter() {
            assert!((v - 1.0).abs() < 1e-9, "flux {v}");
        }
        // constants have no flux at all
        let c = ScalarField::from_fn(&mesh, |_| 7.0);
        assert!(sys.trace_gamma_d(&c).amax() < 1e-10);
    }

    #[test]
    fn normal_trace_manufactured_vanishes_on_surface() {
        let mesh = build_mesh(&tank(), 0.1, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let exact = |p: [f64; 2]| p[0] * p[0] - p[1] * p[1];
        let coords = mesh.dof_coords();
        let g = DVector::from_iterator(
            sys.gamma_d().len(),
            sys.gamma_d().iter().map(|&d| exact(coords[d])),
        );
        let bc = sys.neumann_from_fn(|mid, n, _| 2.0 * mid[0] * n[0] - 2.0 * mid[1] * n[1]);
        let u = sys.solve_mixed(&g, &bc).unwrap();
        // d/dz (x^2 - z^2) = -2z vanishes on z = 0
        let flux = sys.trace_gamma_d(&u);
        assert!(flux.amax() < 0.05, "surface flux {:.3e}", flux.amax());
    }

    #[test]
    fn flux_balance_over_whole_boundary() {
        let mesh = build_mesh(&tank(), 0.2, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let coords = mesh.dof_coords();
        let g = DVector::from_iterator(
            sys.gamma_d().len(),
            sys.gamma_d().iter().map(|&d| (coords[d][0] * 0.7).sin()),
        );
        let u = sys.solve_mixed(&g, &NeumannBc::zero(&mesh)).unwrap();
        let (_, flux_d) = sys.normal_trace(&u, SegmentTag::DirichletFree);
        // with zero Neumann data the net surface flux must vanish
        let m = sys.m_gamma();
        let total: f64 = (m * &flux_d).iter().sum();
        let scale: f64 = (m * flux_d.abs()).iter().sum::<f64>().max(1e-300);
        assert!(total.abs() <= 1e-8 * scale, "net flux {total:.3e} vs {scale:.3e}");
    }

    #[test]
    fn galerkin_energy_monotone_under_nested_refinement() {
        let mesh0 = build_mesh(&tank(), 0.4, 0.5, 2).unwrap();
        let mut meshes = vec![mesh0];
        for _ in 0..2 {
            meshes.push(meshes.last().unwrap().refine_uniform());
        }
        // linear Dirichlet data is interpolated exactly on every mesh
        let mut energies = Vec::new();
        for mesh in &meshes {
            let sys = assemble(mesh).unwrap();
            let coords = mesh.dof_coords();
            let g = DVector::from_iterator(
                sys.gamma_d().len(),
                sys.gamma_d().iter().map(|&d| coords[d][0]),
            );
            let u = sys.solve_mixed(&g, &NeumannBc::zero(mesh)).unwrap();
            energies.push(sys.energy(&u));
        }
        assert!(energies[1] <= energies[0] + 1e-12);
        assert!(energies[2] <= energies[1] + 1e-12);
    }
}

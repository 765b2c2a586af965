//! Discrete Dirichlet-Neumann operator on the free surface.
//!
//! The operator maps a surface potential trace to the vertical derivative of
//! its harmonic extension. Discretely it is realized as the Schur complement
//! of the P1 stiffness matrix onto the free-surface dofs, which pairs with
//! the boundary mass matrix: `psi1' G psi2 = integral(psi1 * G0 psi2)`. The
//! Schur form is symmetric by construction, so the evolution operator built
//! on top of it is skew-symmetric to round-off.

use crate::elliptic::{EllipticError, StiffnessSystem};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Symmetric positive semidefinite realization of the Dirichlet-Neumann
/// operator on the free-surface dofs, with its generalized spectrum.
pub struct DnOperator {
    /// Schur complement: the weighted pairing matrix.
    pub g: DMatrix<f64>,
    /// Consistent boundary mass on the same dofs.
    pub m: DMatrix<f64>,
    /// Generalized eigenvalues of `G v = lambda M v`, ascending.
    pub eigenvalues: DVector<f64>,
    /// M-orthonormal eigenvectors, one per column.
    pub eigenvectors: DMatrix<f64>,
    m_chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl DnOperator {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// Pointwise action `G0 psi = M^-1 G psi` (the flux density itself).
    pub fn apply_pointwise(&self, psi: &DVector<f64>) -> DVector<f64> {
        self.m_chol.solve(&(&self.g * psi))
    }

    /// Weighted pairing `integral(phi * G0 psi)`.
    pub fn pairing(&self, phi: &DVector<f64>, psi: &DVector<f64>) -> f64 {
        (phi.transpose() * &self.g * psi)[(0, 0)]
    }

    /// Surface L2 product `integral(f * g)`.
    pub fn l2(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        (f.transpose() * &self.m * g)[(0, 0)]
    }

    pub fn l2_norm(&self, f: &DVector<f64>) -> f64 {
        self.l2(f, f).max(0.0).sqrt()
    }

    /// Expand a surface vector in the M-orthonormal eigenbasis.
    pub fn to_modal(&self, f: &DVector<f64>) -> DVector<f64> {
        self.eigenvectors.transpose() * (&self.m * f)
    }

    /// Reconstruct a surface vector from modal coefficients.
    pub fn from_modal(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.eigenvectors * coeffs
    }

    /// Eigenvalues below round-off relative to the top of the spectrum are
    /// the constant kernel; treat them as exact zeros so fractional powers do
    /// not amplify noise.
    fn effective_eigenvalue(&self, lam: f64) -> f64 {
        let lam_max = self.eigenvalues[self.eigenvalues.len() - 1];
        if lam < 1e-12 * lam_max {
            0.0
        } else {
            lam
        }
    }

    /// Spectral power `G0^p psi` for half-integer (or any real, nonnegative)
    /// exponent. The constant mode stays put for p = 0 and is annihilated for
    /// p > 0.
    pub fn power(&self, psi: &DVector<f64>, p: f64) -> DVector<f64> {
        let mut coeffs = self.to_modal(psi);
        for (c, lam) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            let l = self.effective_eigenvalue(*lam);
            *c *= if p == 0.0 { 1.0 } else { l.powf(p) };
        }
        self.from_modal(&coeffs)
    }

    /// The scalars `|G0^{j/2} f|_{L2}` for `j = 1..=n`, the building blocks
    /// of the graded regularity semi-norms.
    pub fn graded_seminorms(&self, f: &DVector<f64>, n: usize) -> Vec<f64> {
        let coeffs = self.to_modal(f);
        (1..=n)
            .map(|j| {
                let p = j as f64 / 2.0;
                coeffs
                    .iter()
                    .zip(self.eigenvalues.iter())
                    .map(|(c, lam)| (c * self.effective_eigenvalue(*lam).powf(p)).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Relative departures from symmetry, positive semidefiniteness and the
    /// constant kernel, for invariant checks.
    pub fn structure_residuals(&self) -> (f64, f64, f64) {
        let n = self.n();
        let scale = self.g.amax().max(1e-300);
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                asym = asym.max((self.g[(i, j)] - self.g[(j, i)]).abs());
            }
        }
        let lam_max = self.eigenvalues[n - 1].max(1e-300);
        let lam_min = self.eigenvalues[0];
        let ones = DVector::from_element(n, 1.0);
        let kernel = (&self.g * ones).amax();
        (asym / scale, lam_min / lam_max, kernel / scale)
    }
}

/// Assemble the Dirichlet-Neumann operator as the Schur complement of the
/// stiffness matrix onto the free-surface dofs, and diagonalize it against
/// the boundary mass.
pub fn assemble_g0(sys: &StiffnessSystem) -> Result<DnOperator, EllipticError> {
    let gamma = sys.gamma_d();
    let nd = gamma.len();
    let n = sys.stiffness().n;

    // W(:, j) = A_ff^-1 A_fD e_j, one solve per surface dof
    let columns: Vec<Vec<f64>> = gamma
        .par_iter()
        .map(|&dj| {
            let mut rhs = vec![0.0; n];
            for (c, v) in sys.stiffness().row(dj) {
                rhs[c] = v; // A[f, dj] by symmetry of A
            }
            rhs[dj] = 0.0;
            for &dk in gamma {
                rhs[dk] = 0.0;
            }
            sys.solve_free(&rhs)
        })
        .collect();

    let mut g = DMatrix::zeros(nd, nd);
    for (j, w) in columns.iter().enumerate() {
        let dj = gamma[j];
        for (i, &di) in gamma.iter().enumerate() {
            // S_ij = A[di, dj] - A[di, f] . w
            let mut s = 0.0;
            for (c, v) in sys.stiffness().row(di) {
                if c == dj {
                    s += v;
                }
                s -= v * w[c]; // w vanishes on Dirichlet dofs
            }
            g[(i, j)] = s;
        }
    }
    // symmetric by construction up to round-off; make it exact
    for i in 0..nd {
        for j in i + 1..nd {
            let s = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }

    let m = sys.m_gamma().clone();
    let m_chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| EllipticError::SolverBreakdown("boundary mass not SPD".into()))?;

    // generalized symmetric eigenproblem via the mass Cholesky:
    // B = L^-1 G L^-T, eigenvectors v = L^-T w
    let l = m_chol.l();
    let linv_g = l.clone().solve_lower_triangular(&g).ok_or_else(|| {
        EllipticError::SolverBreakdown("mass Cholesky solve failed".into())
    })?;
    let b = l
        .clone()
        .solve_lower_triangular(&linv_g.transpose())
        .ok_or_else(|| EllipticError::SolverBreakdown("mass Cholesky solve failed".into()))?;
    let b = (&b + b.transpose()) * 0.5;
    let se = b.symmetric_eigen();
    // sort ascending
    let mut order: Vec<usize> = (0..nd).collect();
    order.sort_by(|&a, &bb| se.eigenvalues[a].partial_cmp(&se.eigenvalues[bb]).unwrap());
    let eigenvalues = DVector::from_iterator(nd, order.iter().map(|&k| se.eigenvalues[k]));
    let mut w = DMatrix::zeros(nd, nd);
    for (col, &k) in order.iter().enumerate() {
        w.set_column(col, &se.eigenvectors.column(k));
    }
    let eigenvectors = l
        .transpose()
        .solve_upper_triangular(&w)
        .ok_or_else(|| EllipticError::SolverBreakdown("mass Cholesky solve failed".into()))?;

    Ok(DnOperator { g, m, eigenvalues, eigenvectors, m_chol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::assemble;
    use crate::geometry::{build_mesh, periodic_strip, DomainSpec};
    use std::f64::consts::PI;

    fn strip_operator(h: f64) -> DnOperator {
        let mesh = periodic_strip(2.0 * PI, 1.0, h).unwrap();
        let sys = assemble(&mesh).unwrap();
        assemble_g0(&sys).unwrap()
    }

    #[test]
    fn strip_spectrum_matches_dispersion_relation() {
        let dn = strip_operator(0.05);
        // eigenvalue 0 (constants), then pairs k tanh k for k = 1, 2, 3, ...
        assert!(dn.eigenvalues[0].abs() < 1e-10 * dn.eigenvalues[dn.n() - 1]);
        for n in 1..=3usize {
            let k = n as f64;
            let exact = k * k.tanh();
            let got = 0.5 * (dn.eigenvalues[2 * n - 1] + dn.eigenvalues[2 * n]);
            assert!(
                (got - exact).abs() / exact < 0.02,
                "mode {n}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn strip_spectrum_converges_second_order() {
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| {
                let dn = strip_operator(h);
                let exact = 1.0f64.tanh();
                (0.5 * (dn.eigenvalues[1] + dn.eigenvalues[2]) - exact).abs() / exact
            })
            .collect();
        let r1 = (errs[0] / errs[1]).log2();
        let r2 = (errs[1] / errs[2]).log2();
        assert!(r1 > 1.8 && r2 > 1.8, "orders {r1:.2} {r2:.2}, errors {errs:?}");
    }

    #[test]
    fn structure_invariants() {
        let spec = DomainSpec::rectangular(0.0, 4.0, 6.0, 10.0, 1.0, 0.5, 1.0, 9.81, -0.1);
        let mesh = build_mesh(&spec, 0.25, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let dn = assemble_g0(&sys).unwrap();
        let (asym, psd, kernel) = dn.structure_residuals();
        assert!(asym < 1e-10, "asymmetry {asym:.3e}");
        assert!(psd > -1e-10, "negative eigenvalue ratio {psd:.3e}");
        assert!(kernel < 1e-10, "constant kernel residual {kernel:.3e}");
    }

    #[test]
    fn schur_action_matches_harmonic_flux() {
        let spec = DomainSpec::rectangular(0.0, 4.0, 6.0, 10.0, 1.0, 0.5, 1.0, 9.81, -0.1);
        let mesh = build_mesh(&spec, 0.25, 0.5, 3).unwrap();
        let sys = assemble(&mesh).unwrap();
        let dn = assemble_g0(&sys).unwrap();
        let xs = sys.gamma_d_x();
        let psi = DVector::from_iterator(xs.len(), xs.iter().map(|&x| (0.8 * x).cos()));
        // pairing equals the Dirichlet energy of the harmonic extension
        let u = sys
            .solve_mixed(&psi, &crate::elliptic::NeumannBc::zero(&mesh))
            .unwrap();
        let energy = sys.energy(&u);
        let pairing = dn.pairing(&psi, &psi);
        assert!(
            (energy - pairing).abs() <= 1e-8 * energy.abs().max(1e-300),
            "energy {energy} vs pairing {pairing}"
        );
        // pointwise action equals the lifted trace of the extension
        let flux = sys.trace_gamma_d(&u);
        let g0psi = dn.apply_pointwise(&psi);
        let scale = flux.amax().max(1e-300);
        assert!((&flux - &g0psi).amax() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn spectral_powers_compose() {
        let dn = strip_operator(0.2);
        let n = dn.n();
        let psi = DVector::from_fn(n, |i, _| ((i * 7 % 13) as f64 - 6.0) / 6.0);
        // square root composed twice equals one application
        let half = dn.power(&psi, 0.5);
        let twice = dn.power(&half, 0.5);
        let once = dn.power(&psi, 1.0);
        assert!((&twice - &once).amax() < 1e-8 * once.amax().max(1e-300));
        // p = 0 is the identity (complete eigenbasis)
        let id = dn.power(&psi, 0.0);
        assert!((&id - &psi).amax() < 1e-10);
        // |G0^(1/2) psi|^2 = <psi, G0 psi>
        let lhs = dn.l2(&half, &half);
        let rhs = dn.pairing(&psi, &psi);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
        // direct application agrees with the spectral power p = 1
        let direct = dn.apply_pointwise(&psi);
        assert!((&once - &direct).amax() <= 1e-8 * direct.amax().max(1e-300));
    }

    #[test]
    fn graded_seminorms_of_eigenvector_scale_geometrically() {
        let dn = strip_operator(0.2);
        let n = dn.n();
        let v = DVector::from_column_slice(dn.eigenvectors.column(n - 1).as_slice());
        let lam = dn.eigenvalues[n - 1];
        let norms = dn.graded_seminorms(&v, 3);
        for (j, norm) in norms.iter().enumerate() {
            let expect = lam.powf((j + 1) as f64 / 2.0);
            assert!((norm - expect).abs() < 1e-6 * expect, "j = {} {norm} vs {expect}", j + 1);
        }
        // constants are annihilated
        let ones = DVector::from_element(n, 1.0);
        for s in dn.graded_seminorms(&ones, 3) {
            assert!(s < 1e-8);
        }
    }

    #[test]
    fn pairing_is_symmetric_for_random_vectors() {
        use rand::{Rng, SeedableRng};
        let dn = strip_operator(0.25);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = DVector::from_fn(dn.n(), |_, _| rng.gen_range(-1.0..1.0));
            let b = DVector::from_fn(dn.n(), |_, _| rng.gen_range(-1.0..1.0));
            let lhs = dn.pairing(&a, &b);
            let rhs = dn.pairing(&b, &a);
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }
}

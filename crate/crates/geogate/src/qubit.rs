//! Dense complex operators, qubit states, and fidelity metrics on small
//! Hilbert spaces.
//!
//! Conventions fixed here and inherited by every other module:
//! basis order is (|g>, |e>) with |g> = (1, 0)^T, and `pauli(3)` is the
//! textbook sigma_z = |g><g| - |e><e|, so |g> is its +1 eigenvector.
//! The measurement-aligned Stokes convention used by tomography
//! (S3 = P_e - P_g = -Tr[sigma_z rho]) is handled in [`crate::tomography`];
//! the round trip implemented here uses the textbook signs S_i = Tr[sigma_i rho].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Construction-level tolerance (unitarity, hermiticity of exact objects).
pub const TOL_CONSTRUCT: f64 = 1e-12;
/// Physicality tolerance (trace, eigenvalue positivity).
pub const TOL_PHYSICAL: f64 = 1e-10;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex square matrix on a small Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        if mat.is_empty() {
            return Err(Error::InvalidArgument("empty operator".into()));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// Row-major construction helper for small matrices.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            mat: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            mat: self.mat.map(|x| x * z),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            mat: &self.mat * &other.mat,
        })
    }

    /// Largest entry of |U^dag U - I|.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mat.adjoint() * &self.mat;
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((p[(i, j)] - expect).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        worst
    }

    /// U rho U^dag.
    pub fn conjugate_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != rho.dim() {
            return Err(Error::DimensionMismatch(self.dim(), rho.dim()));
        }
        let m = &self.mat * rho.matrix() * self.mat.adjoint();
        DensityMatrix::from_matrix_relaxed(m)
    }
}

/// Standard Pauli matrix in the fixed (|g>, |e>) basis order.
///
/// Index 0..3 maps to {I, sigma_x, sigma_y, sigma_z}.
pub fn pauli(index: usize) -> Result<Operator> {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match index {
        0 => [one, zero, zero, one],
        1 => [zero, one, one, zero],
        2 => [zero, -i, i, zero],
        3 => [one, zero, zero, -one],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "pauli index {index} out of range 0..=3"
            )))
        }
    };
    Operator::from_rows(2, &entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationAxis {
    X,
    Z,
}

/// exp(-i angle sigma_axis / 2).
pub fn rotation(axis: RotationAxis, angle: f64) -> Operator {
    assert!(angle.is_finite(), "rotation angle must be finite");
    let h = angle / 2.0;
    let (ch, sh) = (h.cos(), h.sin());
    let entries = match axis {
        RotationAxis::X => [c(ch, 0.0), c(0.0, -sh), c(0.0, -sh), c(ch, 0.0)],
        RotationAxis::Z => [c(ch, -sh), c(0.0, 0.0), c(0.0, 0.0), c(ch, sh)],
    };
    Operator::from_rows(2, &entries).expect("2x2 rotation")
}

/// Z_beta X_theta Z_alpha.
pub fn compose_zxz(theta: f64, alpha: f64, beta: f64) -> Operator {
    let za = rotation(RotationAxis::Z, alpha);
    let xt = rotation(RotationAxis::X, theta);
    let zb = rotation(RotationAxis::Z, beta);
    zb.mul(&xt).and_then(|m| m.mul(&za)).expect("2x2 compose")
}

/// The explicit target matrix [1+i, -1-i; 1-i, 1-i]/2.
pub fn u1_matrix() -> Operator {
    Operator::from_rows(2, &[c(0.5, 0.5), c(-0.5, -0.5), c(0.5, -0.5), c(0.5, -0.5)]).expect("2x2")
}

/// Hadamard (sigma_x + sigma_z)/sqrt(2).
pub fn hadamard_matrix() -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_rows(2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]).expect("2x2")
}

/// Global-phase-insensitive gate overlap |Tr(U^dag V)| / d.
///
/// Equals 1 iff U = e^{i phi} V.
pub fn gate_equivalence(u: &Operator, v: &Operator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let tol = 1e-8;
    if !u.is_unitary(tol) || !v.is_unitary(tol) {
        return Err(Error::InvalidArgument(
            "gate_equivalence requires unitary inputs".into(),
        ));
    }
    let t = (u.matrix().adjoint() * v.matrix()).diagonal().sum();
    Ok(t.norm() / u.dim() as f64)
}

/// Density matrix on a small Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Full physicality check: Hermitian, unit trace, eigenvalues >= -1e-10.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_relaxed(mat)?;
        let min = rho.min_eigenvalue();
        if min < -TOL_PHYSICAL {
            return Err(Error::InvalidArgument(format!(
                "density matrix not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(rho)
    }

    /// Hermiticity and trace checks only.
    ///
    /// Shot-noise tomography reconstructions may carry small negative
    /// eigenvalues; they are reported as-is rather than corrected, so this
    /// constructor skips the positivity check.
    pub fn from_matrix_relaxed(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        let rho = Self { mat };
        if rho.hermiticity_defect() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "density matrix not Hermitian (defect {:.3e})",
                rho.hermiticity_defect()
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        Ok(rho)
    }

    pub fn from_ket(amplitudes: &[C64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "ket not normalized (|psi|^2 = {norm2})"
            )));
        }
        let dim = amplitudes.len();
        let mut mat = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Ok(Self { mat })
    }

    pub fn pure_g() -> Self {
        Self::from_ket(&[c(1.0, 0.0), c(0.0, 0.0)]).expect("|g>")
    }

    pub fn pure_e() -> Self {
        Self::from_ket(&[c(0.0, 0.0), c(1.0, 0.0)]).expect("|e>")
    }

    /// (|g> + |e>)/sqrt(2).
    pub fn pure_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_ket(&[c(s, 0.0), c(s, 0.0)]).expect("|+>")
    }

    /// (|g> - i|e>)/sqrt(2).
    pub fn pure_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_ket(&[c(s, 0.0), c(0.0, -s)]).expect("|->")
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut mat = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            mat[(i, i)] = c(1.0 / dim as f64, 0.0);
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn population(&self, level: usize) -> f64 {
        self.mat[(level, level)].re
    }

    pub fn off_diagonal(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).diagonal().sum().re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()).map(|z| z * c(0.5, 0.0));
        let eig = herm.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues with tiny negatives (within tolerance) clipped to zero,
    /// for reporting only; the stored state is never modified.
    pub fn eigenvalues_clipped(&self) -> Vec<f64> {
        self.eigenvalues()
            .into_iter()
            .map(|v| if v < 0.0 && v > -TOL_PHYSICAL { 0.0 } else { v })
            .collect()
    }
}

/// Tr[rho_exp rho_id]. Only a fidelity when the reference state is pure.
pub fn state_fidelity(rho_exp: &DensityMatrix, rho_id: &DensityMatrix) -> Result<f64> {
    if rho_exp.dim() != rho_id.dim() {
        return Err(Error::DimensionMismatch(rho_exp.dim(), rho_id.dim()));
    }
    Ok((rho_exp.matrix() * rho_id.matrix()).diagonal().sum().re)
}

/// Stokes expansion coefficients of a qubit state, textbook signs
/// (S_i = Tr[sigma_i rho], so |g><g| has S3 = +1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { s0, s1, s2, s3 }
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch(rho.dim(), 2));
        }
        let m = rho.matrix();
        let s1 = 2.0 * m[(0, 1)].re;
        let s2 = -2.0 * m[(0, 1)].im;
        let s3 = m[(0, 0)].re - m[(1, 1)].re;
        Ok(Self::new(rho.trace().re, s1, s2, s3))
    }

    /// rho = (S0 I + S1 sigma_x + S2 sigma_y + S3 sigma_z)/2.
    ///
    /// Exact inverse of [`StokesVector::from_density`]; no physicality
    /// projection is applied, so vectors with |S| > 1 (shot-noise estimates)
    /// reconstruct to non-positive matrices.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let mat = DMatrix::from_row_slice(
            2,
            2,
            &[
                c((self.s0 + self.s3) / 2.0, 0.0),
                c(self.s1 / 2.0, -self.s2 / 2.0),
                c(self.s1 / 2.0, self.s2 / 2.0),
                c((self.s0 - self.s3) / 2.0, 0.0),
            ],
        );
        DensityMatrix::from_matrix_relaxed(mat)
    }

    pub fn bloch_norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }

    /// Full four-component dot product S . S'.
    pub fn dot(&self, other: &Self) -> f64 {
        self.s0 * other.s0 + self.s1 * other.s1 + self.s2 * other.s2 + self.s3 * other.s3
    }
}

//! Dual bases and element matrices for the 1D degrees of freedom.
//!
//! On the reference cell `xi in [0, 1]` the functionals are, in order, the
//! value at `xi = 0`, the averaged moments `int_0^1 xi^l u dxi` for
//! `l = 0..=k-2`, and the value at `xi = 1`. For `k = 2` this is the familiar
//! (left value, average, right value) layout.

use crate::error::{PampaError, Result};
use crate::field::Field;
use crate::linalg::DenseMatrix;
use crate::poly::Poly;

/// Largest order accepted; monomial Gram systems lose accuracy beyond it.
pub const MAX_ORDER: usize = 8;

/// Index of the left point functional.
pub const LEFT: usize = 0;

#[derive(Debug, Clone)]
pub struct DualBasis1D<T> {
    pub k: usize,
    /// Row `q` holds the monomial coefficients of `phi_q`.
    pub basis_coeffs: DenseMatrix<T>,
}

impl<T: Field> DualBasis1D<T> {
    pub fn n_dofs(&self) -> usize {
        self.k + 1
    }

    /// Index of the right point functional.
    pub fn right(&self) -> usize {
        self.k
    }

    pub fn phi(&self, q: usize) -> Poly<T> {
        Poly::new(self.basis_coeffs.row(q).to_vec())
    }

    pub fn phis(&self) -> Vec<Poly<T>> {
        (0..self.n_dofs()).map(|q| self.phi(q)).collect()
    }

    /// Applies functional `l` to a polynomial.
    pub fn functional(&self, l: usize, p: &Poly<T>) -> T {
        apply_functional(self.k, l, p)
    }

    /// Interpolant coefficients `<theta_l, p>`.
    pub fn dofs_of(&self, p: &Poly<T>) -> Vec<T> {
        (0..self.n_dofs()).map(|l| self.functional(l, p)).collect()
    }

    pub fn to_f64(&self) -> DualBasis1D<f64> {
        DualBasis1D {
            k: self.k,
            basis_coeffs: self.basis_coeffs.to_f64(),
        }
    }
}

impl DualBasis1D<f64> {
    /// Reconstruction `sum_q dofs[q] phi_q(xi)`.
    pub fn eval(&self, dofs: &[f64], xi: f64) -> f64 {
        let mut acc = 0.0;
        for (q, d) in dofs.iter().enumerate() {
            acc += d * horner(self.basis_coeffs.row(q), xi);
        }
        acc
    }

    /// Reference derivative `d/dxi` of the reconstruction.
    pub fn eval_derivative(&self, dofs: &[f64], xi: f64) -> f64 {
        let mut acc = 0.0;
        for (q, d) in dofs.iter().enumerate() {
            let c = self.basis_coeffs.row(q);
            let mut dp = 0.0;
            for i in (1..c.len()).rev() {
                dp = dp * xi + i as f64 * c[i];
            }
            acc += d * dp;
        }
        acc
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn apply_functional<T: Field>(k: usize, l: usize, p: &Poly<T>) -> T {
    if l == LEFT {
        p.eval(&T::zero())
    } else if l == k {
        p.eval(&T::one())
    } else {
        p.mul(&Poly::monomial(l - 1)).integral01()
    }
}

pub fn build_dual_basis<T: Field>(k: usize) -> Result<DualBasis1D<T>> {
    if !(2..=MAX_ORDER).contains(&k) {
        return Err(PampaError::UnsupportedOrder(k));
    }
    let n = k + 1;
    // G[l][q] = <theta_l, xi^q>; the coefficient matrix C solves C G^T = I
    let gram = DenseMatrix::from_fn(n, n, |l, q| apply_functional(k, l, &Poly::<T>::monomial(q)));
    let coeffs = gram
        .transpose()
        .inverse()
        .map_err(|e| PampaError::Singular(format!("dual basis of order {k}: {e}")))?;
    Ok(DualBasis1D {
        k,
        basis_coeffs: coeffs,
    })
}

/// `M_{l kappa} = dx int_0^1 phi_l phi_kappa`.
pub fn mass_matrix<T: Field>(basis: &DualBasis1D<T>, dx: T) -> DenseMatrix<T> {
    let phis = basis.phis();
    let n = basis.n_dofs();
    DenseMatrix::from_fn(n, n, |l, q| phis[l].mul(&phis[q]).integral01() * dx.clone())
}

pub fn inverse_mass<T: Field>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let tol = if T::EXACT { 0.0 } else { 1e-12 * m.max_abs() };
    if !m.is_symmetric(tol) || !m.is_positive_definite() {
        return Err(PampaError::NotSpd);
    }
    m.inverse()
}

/// `Q_{l kappa} = int_0^1 phi_l phi_kappa'` (independent of the cell length).
pub fn weak_derivative_matrix<T: Field>(basis: &DualBasis1D<T>) -> DenseMatrix<T> {
    let phis = basis.phis();
    let dphis: Vec<_> = phis.iter().map(Poly::derivative).collect();
    let n = basis.n_dofs();
    DenseMatrix::from_fn(n, n, |l, q| phis[l].mul(&dphis[q]).integral01())
}

/// `B_{l kappa} = phi_l(1) phi_kappa(1) - phi_l(0) phi_kappa(0)`.
pub fn boundary_matrix<T: Field>(basis: &DualBasis1D<T>) -> DenseMatrix<T> {
    let phis = basis.phis();
    let at0: Vec<T> = phis.iter().map(|p| p.eval(&T::zero())).collect();
    let at1: Vec<T> = phis.iter().map(|p| p.eval(&T::one())).collect();
    let n = basis.n_dofs();
    DenseMatrix::from_fn(n, n, |l, q| {
        at1[l].clone() * at1[q].clone() - at0[l].clone() * at0[q].clone()
    })
}

/// Riesz representers `psi_l` with `int_0^1 psi_l v = <theta_l, v>` on the
/// reference cell. Moments are represented by their monomials; the point
/// functionals by `sum_q a_{lq} phi_q` with `a` the inverse reference mass.
pub fn riesz_representers<T: Field>(basis: &DualBasis1D<T>) -> Result<Vec<Poly<T>>> {
    let minv = inverse_mass(&mass_matrix(basis, T::one()))?;
    let phis = basis.phis();
    let k = basis.k;
    Ok((0..basis.n_dofs())
        .map(|l| {
            if l == LEFT || l == k {
                phis.iter()
                    .enumerate()
                    .fold(Poly::new(vec![T::zero()]), |acc, (q, p)| {
                        acc.add(&p.scale(&minv[(l, q)]))
                    })
            } else {
                Poly::monomial(l - 1)
            }
        })
        .collect())
}

/// Element operators for one cell of length `dx`.
#[derive(Debug, Clone)]
pub struct OperatorSet1D<T> {
    pub m: DenseMatrix<T>,
    pub m_inv: DenseMatrix<T>,
    pub q: DenseMatrix<T>,
    pub d: DenseMatrix<T>,
    pub b: DenseMatrix<T>,
}

impl<T: Field> OperatorSet1D<T> {
    pub fn new(basis: &DualBasis1D<T>, dx: T) -> Result<Self> {
        let m = mass_matrix(basis, dx);
        let m_inv = inverse_mass(&m)?;
        let q = weak_derivative_matrix(basis);
        let d = m_inv.matmul(&q);
        let b = boundary_matrix(basis);
        Ok(Self { m, m_inv, q, d, b })
    }

    pub fn to_f64(&self) -> OperatorSet1D<f64> {
        OperatorSet1D {
            m: self.m.to_f64(),
            m_inv: self.m_inv.to_f64(),
            q: self.q.to_f64(),
            d: self.d.to_f64(),
            b: self.b.to_f64(),
        }
    }
}

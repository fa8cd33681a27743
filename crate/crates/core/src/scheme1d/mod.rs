//! Semi-discrete PAMPA operators in one dimension.
//!
//! [`pampa_rhs`] evaluates the point and moment updates directly;
//! [`dg_rhs`] computes the full discontinuous Galerkin update of every local
//! DoF through the element mass matrix. For linear fluxes the two coincide on
//! every DoF; [`project`] then turns the double-valued point derivatives into
//! single-valued ones.

mod convergence;
mod energy;
mod initial;
mod projection;
mod simulation;

pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable};
pub use energy::{energy_and_inequality_check, EnergyCheck};
pub use initial::InitialCondition;
pub use projection::{
    central_projected_point_rhs, node_weights, project, ProjectionKind, ProjectionRule,
};
pub use simulation::{
    error_norms, run_simulation, BpMode, ErrorNorms, SimConfig, SimResult, StepDiagnostics,
    BLOW_UP_LIMIT,
};

use num_traits::One;
use rand::Rng;

use crate::basis1d::{build_dual_basis, DualBasis1D, OperatorSet1D};
use crate::error::{PampaError, Result};
use crate::field::Rational;
use crate::mesh1d::{Mesh1D, Solution1D};
use crate::quadrature::GaussRule;

/// Scalar flux `f` and its derivative.
#[derive(Debug, Clone, Copy)]
pub enum FluxSpec {
    /// `f(u) = a u`.
    LinearAdvection(f64),
    /// `f(u) = u^2 / 2`.
    Burgers,
    General {
        f: fn(f64) -> f64,
        df: fn(f64) -> f64,
    },
}

impl FluxSpec {
    pub fn f(&self, u: f64) -> f64 {
        match self {
            FluxSpec::LinearAdvection(a) => a * u,
            FluxSpec::Burgers => 0.5 * u * u,
            FluxSpec::General { f, .. } => f(u),
        }
    }

    pub fn df(&self, u: f64) -> f64 {
        match self {
            FluxSpec::LinearAdvection(a) => *a,
            FluxSpec::Burgers => u,
            FluxSpec::General { df, .. } => df(u),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, FluxSpec::LinearAdvection(_))
    }

    /// Compares `df` with central differences of `f` at `samples` points
    /// drawn from `[lo, hi]`; returns the largest relative discrepancy.
    pub fn derivative_discrepancy<R: Rng>(
        &self,
        rng: &mut R,
        lo: f64,
        hi: f64,
        samples: usize,
    ) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let u = rng.random_range(lo..=hi);
            let h = 1e-6 * (1.0 + u.abs());
            let fd = (self.f(u + h) - self.f(u - h)) / (2.0 * h);
            let exact = self.df(u);
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
        worst
    }
}

/// Per-cell time derivatives of all local DoFs before projection.
#[derive(Debug, Clone, PartialEq)]
pub struct DGUpdate {
    pub order: usize,
    /// Derivative of the left endpoint value as seen from each cell.
    pub left_point: Vec<f64>,
    /// Derivative of the right endpoint value as seen from each cell.
    pub right_point: Vec<f64>,
    /// Derivatives of the integral moments, `k - 1` per cell.
    pub moments: Vec<f64>,
}

impl DGUpdate {
    fn zeros(n_cells: usize, order: usize) -> Self {
        Self {
            order,
            left_point: vec![0.0; n_cells],
            right_point: vec![0.0; n_cells],
            moments: vec![0.0; n_cells * (order - 1)],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.left_point.len()
    }

    pub fn cell_moments(&self, j: usize) -> &[f64] {
        let m = self.order - 1;
        &self.moments[j * m..(j + 1) * m]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self
            .left_point
            .iter()
            .chain(&self.right_point)
            .chain(&self.moments);
        let b = other
            .left_point
            .iter()
            .chain(&other.right_point)
            .chain(&other.moments);
        a.zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Reference-cell data shared by every evaluation at a fixed order.
#[derive(Debug, Clone)]
pub struct Scheme1D {
    pub basis: DualBasis1D<f64>,
    pub ops: OperatorSet1D<f64>,
    gauss: GaussRule,
    /// `phi_q'(0)` and `phi_q'(1)`.
    dphi_left: Vec<f64>,
    dphi_right: Vec<f64>,
    /// `phi_q` at the Gauss nodes, row per node.
    phi_at_gauss: Vec<Vec<f64>>,
}

impl Scheme1D {
    pub fn new(order: usize) -> Result<Self> {
        // exact assembly, rounded once: the monomial Gram systems are too
        // ill-conditioned to invert in floating point beyond k = 3
        let exact = build_dual_basis::<Rational>(order)?;
        let ops = OperatorSet1D::new(&exact, Rational::one())?.to_f64();
        let basis = exact.to_f64();
        let gauss = GaussRule::new(order + 1);
        let n = order + 1;
        let unit = |q: usize| {
            let mut e = vec![0.0; n];
            e[q] = 1.0;
            e
        };
        let dphi_left = (0..n)
            .map(|q| basis.eval_derivative(&unit(q), 0.0))
            .collect();
        let dphi_right = (0..n)
            .map(|q| basis.eval_derivative(&unit(q), 1.0))
            .collect();
        let phi_at_gauss = gauss
            .nodes
            .iter()
            .map(|&x| (0..n).map(|q| basis.eval(&unit(q), x)).collect())
            .collect();
        Ok(Self {
            basis,
            ops,
            gauss,
            dphi_left,
            dphi_right,
            phi_at_gauss,
        })
    }

    pub fn order(&self) -> usize {
        self.basis.k
    }

    fn check_order(&self, u: &Solution1D) -> Result<()> {
        if u.order() != self.order() {
            return Err(PampaError::OrderMismatch {
                expected: self.order(),
                got: u.order(),
            });
        }
        Ok(())
    }

    fn check_layout(&self, mesh: &Mesh1D, u: &Solution1D) -> Result<()> {
        self.check_order(u)?;
        if u.point_values.len() != mesh.n_points() || u.n_cells() != mesh.n_cells() {
            return Err(PampaError::InvalidArgument(
                "solution layout does not match the mesh".into(),
            ));
        }
        Ok(())
    }

    /// Values of the cell reconstruction at the Gauss nodes.
    fn gauss_values(&self, dofs: &[f64]) -> Vec<f64> {
        self.phi_at_gauss
            .iter()
            .map(|row| row.iter().zip(dofs).map(|(p, d)| p * d).sum())
            .collect()
    }

    pub fn pampa_rhs(&self, mesh: &Mesh1D, u: &Solution1D, flux: &FluxSpec) -> Result<DGUpdate> {
        self.check_layout(mesh, u)?;
        let k = self.order();
        let mut out = DGUpdate::zeros(mesh.n_cells(), k);
        for j in 0..mesh.n_cells() {
            let dx = mesh.cell_length(j);
            let dofs = u.local_reference_dofs(mesh, j);
            let (ul, ur) = (dofs[0], dofs[k]);
            let slope_l: f64 = self.dphi_left.iter().zip(&dofs).map(|(p, d)| p * d).sum();
            let slope_r: f64 = self.dphi_right.iter().zip(&dofs).map(|(p, d)| p * d).sum();
            out.left_point[j] = -flux.df(ul) * slope_l / dx;
            out.right_point[j] = -flux.df(ur) * slope_r / dx;

            let (fl, fr) = (flux.f(ul), flux.f(ur));
            let fq: Vec<f64> = if k > 2 {
                self.gauss_values(&dofs)
                    .into_iter()
                    .map(|v| flux.f(v))
                    .collect()
            } else {
                Vec::new()
            };
            let m = &mut out.moments[j * (k - 1)..(j + 1) * (k - 1)];
            for (l, slot) in m.iter_mut().enumerate() {
                let boundary = if l == 0 { fr - fl } else { fr };
                let volume = if l == 0 {
                    0.0
                } else {
                    let lf = l as f64;
                    self.gauss
                        .nodes
                        .iter()
                        .zip(&self.gauss.weights)
                        .zip(&fq)
                        .map(|((x, w), f)| w * lf * x.powi(l as i32 - 1) * f)
                        .sum()
                };
                *slot = -boundary + volume;
            }
        }
        Ok(out)
    }

    /// Full dG update. `ops` must be the reference-cell (`dx = 1`) operators
    /// of this order; physical cell lengths are applied per cell.
    pub fn dg_rhs(
        &self,
        mesh: &Mesh1D,
        u: &Solution1D,
        flux: &FluxSpec,
        ops: &OperatorSet1D<f64>,
    ) -> Result<DGUpdate> {
        self.check_layout(mesh, u)?;
        let k = self.order();
        if ops.m.rows() != k + 1 {
            return Err(PampaError::OrderMismatch {
                expected: k,
                got: ops.m.rows() - 1,
            });
        }
        let mut out = DGUpdate::zeros(mesh.n_cells(), k);
        for j in 0..mesh.n_cells() {
            let dx = mesh.cell_length(j);
            let dofs = u.local_reference_dofs(mesh, j);
            let du = match flux {
                // D = M^{-1} Q is assembled exactly; one rounding instead of two
                FluxSpec::LinearAdvection(a) => {
                    ops.d.matvec(&dofs).into_iter().map(|v| a * v).collect()
                }
                _ => ops.m_inv.matvec(&self.flux_integrals(&dofs, flux, ops)),
            };
            out.left_point[j] = -du[0] / dx;
            out.right_point[j] = -du[k] / dx;
            for l in 0..k - 1 {
                // integral moments are dx times the reference ones
                out.moments[j * (k - 1) + l] = -du[l + 1];
            }
        }
        Ok(out)
    }

    /// `F_kappa = int_0^1 phi_kappa (f(u_h))' dxi` on the reference cell.
    pub fn flux_integrals(
        &self,
        dofs: &[f64],
        flux: &FluxSpec,
        ops: &OperatorSet1D<f64>,
    ) -> Vec<f64> {
        let k = self.order();
        match flux {
            FluxSpec::LinearAdvection(a) => ops.q.matvec(dofs).into_iter().map(|v| a * v).collect(),
            _ => {
                let (fl, fr) = (flux.f(dofs[0]), flux.f(dofs[k]));
                let fq: Vec<f64> = self
                    .gauss_values(dofs)
                    .into_iter()
                    .map(|v| flux.f(v))
                    .collect();
                let n = k + 1;
                let mut e = vec![0.0; n];
                (0..n)
                    .map(|q| {
                        e.iter_mut().for_each(|x| *x = 0.0);
                        e[q] = 1.0;
                        let at0 = if q == 0 { 1.0 } else { 0.0 };
                        let at1 = if q == k { 1.0 } else { 0.0 };
                        let volume: f64 = self
                            .gauss
                            .nodes
                            .iter()
                            .zip(&self.gauss.weights)
                            .zip(&fq)
                            .map(|((x, w), f)| w * self.basis.eval_derivative(&e, *x) * f)
                            .sum();
                        at1 * fr - at0 * fl - volume
                    })
                    .collect()
            }
        }
    }
}

pub fn pampa_rhs(mesh: &Mesh1D, u: &Solution1D, flux: &FluxSpec) -> Result<DGUpdate> {
    Scheme1D::new(u.order())?.pampa_rhs(mesh, u, flux)
}

pub fn dg_rhs(
    mesh: &Mesh1D,
    u: &Solution1D,
    flux: &FluxSpec,
    ops: &OperatorSet1D<f64>,
) -> Result<DGUpdate> {
    Scheme1D::new(u.order())?.dg_rhs(mesh, u, flux, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::Poly;
    use num_traits::Zero;

    #[test]
    fn dg_rows_are_the_pampa_updates_exactly() {
        // linear flux a = 1 on the reference cell, rational arithmetic
        for k in 2..=6 {
            let basis = build_dual_basis::<Rational>(k).unwrap();
            let ops = OperatorSet1D::new(&basis, Rational::one()).unwrap();
            for q in 0..=k {
                let phi = basis.phi(q);
                let dphi = phi.derivative();
                assert_eq!(ops.d[(0, q)], dphi.eval(&Rational::zero()), "k={k}");
                assert_eq!(ops.d[(k, q)], dphi.eval(&Rational::one()), "k={k}");
                for l in 0..k - 1 {
                    let mut want = phi.eval(&Rational::one());
                    if l == 0 {
                        want = want - phi.eval(&Rational::zero());
                    } else {
                        let w = Poly::monomial(l - 1).scale(&Rational::from_int(l as i64));
                        want = want - w.mul(&phi).integral01();
                    }
                    assert_eq!(ops.d[(l + 1, q)], want, "k={k} l={l}");
                }
            }
        }
    }

    fn unit_mesh() -> Mesh1D {
        Mesh1D::from_nodes(vec![0.0, 1.0], false).unwrap()
    }

    fn one_cell(ul: f64, avg: f64, ur: f64) -> Solution1D {
        Solution1D::from_averages(&unit_mesh(), vec![ul, ur], &[avg]).unwrap()
    }

    #[test]
    fn constant_state_is_steady() {
        let u = one_cell(2.5, 2.5, 2.5);
        let r = pampa_rhs(&unit_mesh(), &u, &FluxSpec::LinearAdvection(1.0)).unwrap();
        assert!(r
            .left_point
            .iter()
            .chain(&r.right_point)
            .chain(&r.moments)
            .all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn linear_data_has_unit_slope() {
        let u = one_cell(0.0, 0.5, 1.0);
        let r = pampa_rhs(&unit_mesh(), &u, &FluxSpec::LinearAdvection(1.0)).unwrap();
        assert!((r.left_point[0] + 1.0).abs() < 1e-14);
        assert!((r.right_point[0] + 1.0).abs() < 1e-14);
        assert!((r.moments[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn dg_matrix_path_example() {
        // M^{-1} F = (6 ubar - 4 u_j - 2 u_{j+1}, u_{j+1} - u_j, 2 u_j + 4 u_{j+1} - 6 ubar)
        let s = Scheme1D::new(2).unwrap();
        let u = one_cell(0.0, 0.0, 1.0);
        let r = s
            .dg_rhs(&unit_mesh(), &u, &FluxSpec::LinearAdvection(1.0), &s.ops)
            .unwrap();
        assert!((r.left_point[0] - 2.0).abs() < 1e-13);
        assert!((r.moments[0] + 1.0).abs() < 1e-13);
        assert!((r.right_point[0] + 4.0).abs() < 1e-13);
    }

    #[test]
    fn flux_vector_example() {
        let s = Scheme1D::new(2).unwrap();
        let f = s.flux_integrals(&[0.0, 1.0, 0.0], &FluxSpec::LinearAdvection(1.0), &s.ops);
        let want = [1.0, 0.0, -1.0];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_point_update_formula() {
        // right point from the left cell: -(a/dx)(2 u_j + 4 u_{j+1} - 6 ubar)
        let mesh = Mesh1D::from_nodes(vec![0.0, 0.5], false).unwrap();
        let (ul, avg, ur, a) = (0.3, -0.7, 1.9, 2.0);
        let u = Solution1D::from_averages(&mesh, vec![ul, ur], &[avg]).unwrap();
        let r = pampa_rhs(&mesh, &u, &FluxSpec::LinearAdvection(a)).unwrap();
        let want = -(a / 0.5) * (2.0 * ul + 4.0 * ur - 6.0 * avg);
        assert!((r.right_point[0] - want).abs() < 1e-12);
    }

    #[test]
    fn order_mismatch() {
        let s = Scheme1D::new(3).unwrap();
        let u = one_cell(0.0, 0.0, 0.0);
        assert!(matches!(
            s.pampa_rhs(&unit_mesh(), &u, &FluxSpec::Burgers),
            Err(PampaError::OrderMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn burgers_derivative_is_consistent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert!(FluxSpec::Burgers.derivative_discrepancy(&mut rng, -2.0, 2.0, 10) < 1e-6);
    }
}

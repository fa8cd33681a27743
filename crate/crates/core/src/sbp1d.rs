//! Summation-by-parts structure of the 1D operators.
//!
//! Element level: `Q + Q^T = B` with `Q = M D`. Global level, third order with
//! central projection on a uniform periodic mesh: the interleaved vector
//! `(u_0, ubar_{1/2}, u_1, ubar_{3/2}, ...)` evolves by `-a D~` and the
//! diagonal norm `M~` makes `M~ D~` skew-symmetric.

use serde::Serialize;

use crate::basis1d::{build_dual_basis, OperatorSet1D};
use crate::error::{PampaError, Result};
use crate::field::Field;
use crate::linalg::DenseMatrix;
use crate::poly::Poly;

#[derive(Debug, Clone)]
pub struct SbpTriple<T> {
    pub k: usize,
    pub q: DenseMatrix<T>,
    pub d: DenseMatrix<T>,
    pub b: DenseMatrix<T>,
    pub m: DenseMatrix<T>,
    /// DoFs of the constant function `1`.
    pub constant: Vec<T>,
}

/// Reference-cell (`dx = 1`) operators in the ordering
/// (left point, moments, right point).
pub fn element_sbp<T: Field>(k: usize) -> Result<SbpTriple<T>> {
    let basis = build_dual_basis::<T>(k)?;
    let ops = OperatorSet1D::new(&basis, T::one())?;
    Ok(SbpTriple {
        k,
        q: ops.q,
        d: ops.d,
        b: ops.b,
        m: ops.m,
        constant: basis.dofs_of(&Poly::monomial(0)),
    })
}

/// Third-order operator on the interleaved periodic vector: slot `2j` holds
/// `u_j`, slot `2j + 1` holds `ubar_{j+1/2}`.
#[derive(Debug, Clone)]
pub struct GlobalPeriodicOperator<T> {
    pub n_cells: usize,
    pub dx: T,
    pub d: DenseMatrix<T>,
    pub m: DenseMatrix<T>,
}

impl<T: Field> GlobalPeriodicOperator<T> {
    pub fn point_slot(&self, j: usize) -> usize {
        2 * (j % self.n_cells)
    }

    pub fn average_slot(&self, j: usize) -> usize {
        2 * (j % self.n_cells) + 1
    }

    pub fn len(&self) -> usize {
        2 * self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.n_cells == 0
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.d.matvec(v)
    }
}

pub fn global_periodic_operator<T: Field>(
    n_cells: usize,
    dx: T,
) -> Result<GlobalPeriodicOperator<T>> {
    if n_cells < 3 {
        return Err(PampaError::InvalidArgument(format!(
            "periodic operator needs at least 3 cells, got {n_cells}"
        )));
    }
    if dx <= T::zero() {
        return Err(PampaError::InvalidArgument(
            "cell length must be positive".into(),
        ));
    }
    let n = 2 * n_cells;
    let p = |j: usize| 2 * (j % n_cells);
    let a = |j: usize| 2 * (j % n_cells) + 1;
    let inv = T::one() / dx.clone();
    let c = |v: i64| T::from_int(v) * inv.clone();
    let mut d = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n_cells {
        // average row: (u_{j+1} - u_j) / dx
        d[(a(j), p(j))] = d[(a(j), p(j))].clone() + c(-1);
        d[(a(j), p(j + 1))] = d[(a(j), p(j + 1))].clone() + c(1);
        // point u_{j+1}: (u_j - 3 ubar_{j+1/2} + 3 ubar_{j+3/2} - u_{j+2}) / dx
        let row = p(j + 1);
        for (col, w) in [(p(j), 1), (a(j), -3), (a(j + 1), 3), (p(j + 2), -1)] {
            d[(row, col)] = d[(row, col)].clone() + c(w);
        }
    }
    let quarter = dx.clone() / T::from_int(4);
    let diag: Vec<T> = (0..n)
        .map(|i| {
            if i % 2 == 1 {
                quarter.clone() * T::from_int(3)
            } else {
                quarter.clone()
            }
        })
        .collect();
    Ok(GlobalPeriodicOperator {
        n_cells,
        dx,
        d,
        m: DenseMatrix::diagonal(&diag),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbpReport {
    /// `(identity, max residual)` pairs.
    pub residuals: Vec<(String, f64)>,
    pub tolerance: f64,
}

impl SbpReport {
    pub fn passes(&self) -> bool {
        self.residuals.iter().all(|(_, r)| *r <= self.tolerance)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| *r)
    }
}

pub const SBP_TOLERANCE: f64 = 1e-12;

fn max_abs<T: Field>(v: &[T]) -> f64 {
    v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

pub fn check_element<T: Field>(t: &SbpTriple<T>) -> SbpReport {
    let qqt_b = t.q.add(&t.q.transpose()).sub(&t.b).max_abs();
    let d1 = max_abs(&t.d.matvec(&t.constant));
    let md_q = t.m.matmul(&t.d).sub(&t.q).max_abs();
    let n = t.b.rows();
    let mut bdiag = DenseMatrix::<T>::zeros(n, n);
    bdiag[(0, 0)] = -T::one();
    bdiag[(n - 1, n - 1)] = T::one();
    let b_form = t.b.sub(&bdiag).max_abs();
    SbpReport {
        residuals: vec![
            ("Q+Q^T-B".into(), qqt_b),
            ("D*1".into(), d1),
            ("M*D-Q".into(), md_q),
            ("B-diag(-1,0,..,0,1)".into(), b_form),
        ],
        tolerance: SBP_TOLERANCE,
    }
}

pub fn check_global<T: Field>(g: &GlobalPeriodicOperator<T>) -> SbpReport {
    let md = g.m.matmul(&g.d);
    let skew = md.add(&md.transpose()).max_abs();
    let ones = vec![T::one(); g.len()];
    let d1 = max_abs(&g.d.matvec(&ones));
    SbpReport {
        residuals: vec![("M~D~+(M~D~)^T".into(), skew), ("D~*1".into(), d1)],
        tolerance: SBP_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational};

    #[test]
    fn quadratic_goldens() {
        let t = element_sbp::<Rational>(2).unwrap();
        let q = DenseMatrix::from_rows(vec![
            vec![rat(-1, 2), rat(1, 1), rat(-1, 2)],
            vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(1, 2), rat(-1, 1), rat(1, 2)],
        ]);
        let d = DenseMatrix::from_rows(vec![
            vec![rat(-4, 1), rat(6, 1), rat(-2, 1)],
            vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(2, 1), rat(-6, 1), rat(4, 1)],
        ]);
        assert_eq!(t.q, q);
        assert_eq!(t.d, d);
        assert_eq!(
            t.b,
            DenseMatrix::diagonal(&[rat(-1, 1), rat(0, 1), rat(1, 1)])
        );
        assert!(check_element(&t).residuals.iter().all(|(_, r)| *r == 0.0));
    }

    #[test]
    fn global_operator_is_skew_in_its_norm() {
        for n in [3, 8, 9] {
            let g = global_periodic_operator::<Rational>(n, rat(1, n as i64)).unwrap();
            let r = check_global(&g);
            assert_eq!(r.get("M~D~+(M~D~)^T"), Some(0.0));
            assert_eq!(r.get("D~*1"), Some(0.0));
        }
        assert!(global_periodic_operator::<f64>(2, 0.5).is_err());
    }

    #[test]
    fn corrupted_q_is_flagged() {
        let mut t = element_sbp::<f64>(2).unwrap();
        t.q[(1, 1)] += 1e-6;
        let r = check_element(&t);
        assert!((r.get("Q+Q^T-B").unwrap() - 2e-6).abs() < 1e-15);
        assert!(!r.passes());
    }

    #[test]
    fn linear_data_has_unit_slope_on_average_rows() {
        let dx = 0.25;
        let g = global_periodic_operator::<f64>(8, dx).unwrap();
        // u(x) = x sampled on cell 3 only; the average row sees (u_3, ubar, u_4)
        let mut v = vec![0.0; g.len()];
        v[g.point_slot(3)] = 3.0 * dx;
        v[g.average_slot(3)] = 3.5 * dx;
        v[g.point_slot(4)] = 4.0 * dx;
        let dv = g.apply(&v);
        assert!((dv[g.average_slot(3)] - 1.0).abs() < 1e-14);
    }
}

//! Dual bases on a triangle: boundary point values at edge nodes plus
//! weighted moments against `l^mu`, `|mu| = d`.
//!
//! Moment functionals are `M_mu(u) = int_K m_mu u` with
//! `m_mu = total * c_mu * l^mu / |K|`, `c_mu` the multinomial coefficient, so
//! `sum_mu M_mu(u) = total * ubar_K`. Every stored polynomial is independent
//! of `|K|`; integrals below are taken on a triangle of unit area and the
//! `1 / |K|` in `m_mu` cancels the area factor of the integral.

use serde::{Deserialize, Serialize};

use crate::error::{PampaError, Result};
use crate::field::{rat, Field, Rational, Surd5};
use crate::linalg::DenseMatrix;

use super::bary::{bary_integral_ratio, BaryPoly, Exponent};

/// Gauss-Lobatto abscissae on `[0, 1]` with `k + 1` points.
pub trait GaussLobatto: Field {
    fn gauss_lobatto(k: usize) -> Result<Vec<Self>>;
}

impl GaussLobatto for f64 {
    fn gauss_lobatto(k: usize) -> Result<Vec<f64>> {
        let inner: Vec<f64> = match k {
            2 => vec![0.0],
            3 => vec![-(0.2f64).sqrt(), (0.2f64).sqrt()],
            4 => vec![-(3.0f64 / 7.0).sqrt(), 0.0, (3.0f64 / 7.0).sqrt()],
            5 => {
                let r = 2.0 * 7f64.sqrt() / 21.0;
                let (a, b) = ((1.0 / 3.0 + r).sqrt(), (1.0 / 3.0 - r).sqrt());
                vec![-a, -b, b, a]
            }
            _ => return Err(PampaError::UnsupportedOrder(k)),
        };
        let mut pts = vec![0.0];
        pts.extend(inner.iter().map(|x| 0.5 * (1.0 + x)));
        pts.push(1.0);
        Ok(pts)
    }
}

impl GaussLobatto for Rational {
    fn gauss_lobatto(k: usize) -> Result<Vec<Rational>> {
        match k {
            2 => Ok(vec![rat(0, 1), rat(1, 2), rat(1, 1)]),
            _ => Err(PampaError::UnsupportedOrder(k)),
        }
    }
}

impl GaussLobatto for Surd5 {
    fn gauss_lobatto(k: usize) -> Result<Vec<Surd5>> {
        match k {
            2 => Ok(vec![
                Surd5::from_int(0),
                Surd5::from_ratio(1, 2),
                Surd5::from_int(1),
            ]),
            3 => {
                let half = Surd5::from_ratio(1, 2);
                let d = Surd5::new(rat(0, 1), rat(1, 10));
                Ok(vec![
                    Surd5::from_int(0),
                    half.clone() - d.clone(),
                    half + d,
                    Surd5::from_int(1),
                ])
            }
            _ => Err(PampaError::UnsupportedOrder(k)),
        }
    }
}

/// Gauss-Lobatto points in floating point, `2 <= k <= 5`.
pub fn gl_points(k: usize) -> Result<Vec<f64>> {
    f64::gauss_lobatto(k)
}

/// Multi-indices with `|mu| = d`, lexicographically descending.
pub fn multi_indices(d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

fn multinomial(e: &Exponent) -> i64 {
    let f = |n: u32| (1..=n as i64).product::<i64>();
    f(e[0] + e[1] + e[2]) / (f(e[0]) * f(e[1]) * f(e[2]))
}

/// `(a, b, c) -> (c, a, b)`.
fn rotate(e: &Exponent) -> Exponent {
    [e[2], e[0], e[1]]
}

const ROTATE_PERM: [usize; 3] = [1, 2, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriVariant {
    /// Quadratic: vertices, edge midpoints, average.
    Quadratic,
    /// Cubic: vertices, two equispaced points per edge, average.
    Cubic,
    /// Cubic with Gauss-Lobatto edge points and three first-order moments.
    CubicMoment,
}

impl TriVariant {
    pub fn abscissae<T: GaussLobatto>(&self) -> Result<Vec<T>> {
        match self {
            TriVariant::Quadratic => T::gauss_lobatto(2),
            TriVariant::Cubic => Ok(vec![
                T::zero(),
                T::from_ratio(1, 3),
                T::from_ratio(2, 3),
                T::one(),
            ]),
            TriVariant::CubicMoment => T::gauss_lobatto(3),
        }
    }

    pub fn moment_degree(&self) -> u32 {
        match self {
            TriVariant::CubicMoment => 1,
            _ => 0,
        }
    }

    pub fn basis<T: GaussLobatto>(&self, total: T) -> Result<TriDualBasis<T>> {
        TriDualBasis::new(self.abscissae()?, self.moment_degree(), total)
    }
}

#[derive(Debug, Clone)]
pub struct TriDualBasis<T> {
    /// Polynomial degree along the edges.
    pub k: usize,
    pub abscissae: Vec<T>,
    /// Boundary nodes: three vertices, then the interior edge nodes of edges
    /// (0,1), (1,2), (2,0), each running from the first vertex to the second.
    pub nodes: Vec<[T; 3]>,
    pub moments: Vec<Exponent>,
    pub moment_total: T,
    /// `|K| m_mu`.
    pub moment_weights: Vec<BaryPoly<T>>,
    /// Boundary Lagrange polynomials `P_sigma`.
    pub lagrange: Vec<BaryPoly<T>>,
    pub phi: Vec<BaryPoly<T>>,
    pub psi: Vec<BaryPoly<T>>,
}

impl<T: Field> TriDualBasis<T> {
    pub fn new(abscissae: Vec<T>, moment_degree: u32, total: T) -> Result<Self> {
        let k = abscissae.len().saturating_sub(1);
        if k < 1 {
            return Err(PampaError::InvalidArgument(
                "need at least two edge nodes".into(),
            ));
        }
        if abscissae[0] != T::zero() || abscissae[k] != T::one() {
            return Err(PampaError::InvalidArgument(
                "edge nodes must include 0 and 1".into(),
            ));
        }
        for i in 0..=k {
            if i > 0 && abscissae[i] <= abscissae[i - 1] {
                return Err(PampaError::InvalidArgument(
                    "edge nodes must increase".into(),
                ));
            }
            let mirror = T::one() - abscissae[k - i].clone();
            if (abscissae[i].clone() - mirror).abs_val().to_f64() > 1e-15 {
                return Err(PampaError::InvalidArgument(
                    "edge nodes must be symmetric".into(),
                ));
            }
        }
        if total <= T::zero() {
            return Err(PampaError::InvalidArgument(
                "moment total must be positive".into(),
            ));
        }
        let interior = &abscissae[1..k];

        let mut nodes = Vec::with_capacity(3 * k);
        let mut lagrange = Vec::with_capacity(3 * k);
        for i in 0..3 {
            let mut p = [T::zero(), T::zero(), T::zero()];
            p[i] = T::one();
            nodes.push(p);
            // l_i prod (l_i - s) / prod (1 - s), s over the interior nodes
            let li = BaryPoly::lambda(i);
            let mut poly = li.clone();
            let mut norm = T::one();
            for s in interior {
                poly = poly.mul(&li.sub(&BaryPoly::constant(s.clone())));
                norm = norm * (T::one() - s.clone());
            }
            lagrange.push(poly.scale(&(T::one() / norm)));
        }
        for e in 0..3 {
            let (i, j) = (e, (e + 1) % 3);
            let li = BaryPoly::lambda(i);
            for (l, xi) in interior.iter().enumerate() {
                let s = T::one() - xi.clone();
                let mut p = [T::zero(), T::zero(), T::zero()];
                p[i] = s.clone();
                p[j] = xi.clone();
                nodes.push(p);
                let mut poly = li.mul(&BaryPoly::lambda(j));
                let mut norm = s.clone() * xi.clone();
                for (m, xm) in interior.iter().enumerate() {
                    if m != l {
                        let sm = T::one() - xm.clone();
                        poly = poly.mul(&li.sub(&BaryPoly::constant(sm.clone())));
                        norm = norm * (s.clone() - sm);
                    }
                }
                lagrange.push(poly.scale(&(T::one() / norm)));
            }
        }

        let moments = multi_indices(moment_degree);
        let moment_weights: Vec<BaryPoly<T>> = moments
            .iter()
            .map(|mu| BaryPoly::monomial(*mu, total.clone() * T::from_int(multinomial(mu))))
            .collect();

        let mut basis = Self {
            k,
            abscissae,
            nodes,
            moments,
            moment_total: total,
            moment_weights,
            lagrange,
            phi: Vec::new(),
            psi: Vec::new(),
        };
        basis.psi = basis.solve_moment_basis()?;
        basis.phi = basis
            .lagrange
            .iter()
            .map(|p| {
                basis
                    .psi
                    .iter()
                    .enumerate()
                    .fold(p.clone(), |acc, (mu, psi)| {
                        acc.sub(&psi.scale(&basis.moment(mu, p)))
                    })
            })
            .collect();
        Ok(basis)
    }

    pub fn n_boundary(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_moments(&self) -> usize {
        self.moments.len()
    }

    /// `M_mu(p)`.
    pub fn moment(&self, mu: usize, p: &BaryPoly<T>) -> T {
        self.moment_weights[mu].mul(p).integrate(&T::one())
    }

    /// The circulant system `A[mu'][p] = M_mu'(l1 l2 l3 l^p)`.
    pub fn moment_system(&self) -> DenseMatrix<T> {
        let n = self.n_moments();
        DenseMatrix::from_fn(n, n, |r, c| {
            let mu = &self.moments[r];
            let p = &self.moments[c];
            let (num, den) =
                bary_integral_ratio(mu[0] + p[0] + 1, mu[1] + p[1] + 1, mu[2] + p[2] + 1);
            self.moment_total.clone()
                * T::from_int(multinomial(mu))
                * T::from_ratio(num as i64, den as i64)
        })
    }

    /// Coefficients `a^mu_p` of `psi_mu = l1 l2 l3 sum_p a_p l^p`.
    pub fn moment_coefficients(&self, mu: usize) -> Vec<T> {
        self.moments
            .iter()
            .map(|p| {
                let e = [p[0] + 1, p[1] + 1, p[2] + 1];
                self.psi[mu].terms.get(&e).cloned().unwrap_or_else(T::zero)
            })
            .collect()
    }

    /// Solves once per orbit of the cyclic relabelling and rotates the rest.
    fn solve_moment_basis(&self) -> Result<Vec<BaryPoly<T>>> {
        let a = self.moment_system();
        let n = self.n_moments();
        let index = |e: &Exponent| {
            self.moments
                .iter()
                .position(|m| m == e)
                .expect("closed under rotation")
        };
        let mut psi: Vec<Option<BaryPoly<T>>> = vec![None; n];
        for mu in 0..n {
            if psi[mu].is_some() {
                continue;
            }
            let mut rhs = vec![T::zero(); n];
            rhs[mu] = T::one();
            let x = a.solve(&rhs)?;
            let mut poly = BaryPoly::zero();
            for (p, c) in self.moments.iter().zip(x) {
                poly = poly.add(&BaryPoly::monomial([p[0] + 1, p[1] + 1, p[2] + 1], c));
            }
            let mut e = self.moments[mu];
            for _ in 0..3 {
                let slot = index(&e);
                if psi[slot].is_none() {
                    psi[slot] = Some(poly.clone());
                }
                e = rotate(&e);
                poly = poly.permute(ROTATE_PERM);
            }
        }
        Ok(psi
            .into_iter()
            .map(|p| p.expect("every orbit solved"))
            .collect())
    }

    /// `[theta_i(basis_j)]` with functionals (points, moments) against
    /// basis (phi, psi); the identity for a dual basis.
    pub fn biorthogonality_matrix(&self) -> DenseMatrix<T> {
        let nb = self.n_boundary();
        let n = nb + self.n_moments();
        let basis: Vec<&BaryPoly<T>> = self.phi.iter().chain(&self.psi).collect();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i < nb {
                basis[j].eval(&self.nodes[i])
            } else {
                self.moment(i - nb, basis[j])
            }
        })
    }

    pub fn centroid() -> [T; 3] {
        let t = T::from_ratio(1, 3);
        [t.clone(), t.clone(), t]
    }

    /// Writes the reconstruction at the centroid as a combination of the
    /// boundary values and the average and inverts it for the average.
    pub fn centroid_weights(&self) -> Result<CentroidWeights<T>> {
        let c = Self::centroid();
        let psi_vals: Vec<T> = self.psi.iter().map(|p| p.eval(&c)).collect();
        let omega = psi_vals[0].clone();
        if psi_vals
            .iter()
            .any(|v| (v.clone() - omega.clone()).abs_val().to_f64() > 1e-13)
        {
            return Err(PampaError::InvalidArgument(
                "moment functions differ at the centroid".into(),
            ));
        }
        let boundary: Vec<T> = self.phi.iter().map(|p| p.eval(&c)).collect();
        let scale = omega.clone() * self.moment_total.clone();
        if scale == T::zero() {
            return Err(PampaError::Singular(
                "centroid coefficient of the average vanishes".into(),
            ));
        }
        let alpha_k = T::one() / scale.clone();
        let alphas = boundary
            .iter()
            .map(|b| -b.clone() / scale.clone())
            .collect();
        Ok(CentroidWeights {
            omega,
            boundary,
            alpha_k,
            alphas,
        })
    }
}

/// `u(x_K) = sum_sigma boundary[sigma] u_sigma + omega sum_mu M_mu(u)`, and
/// its inverse `ubar_K = alpha_k u(x_K) + sum_sigma alphas[sigma] u_sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidWeights<T> {
    pub omega: T,
    pub boundary: Vec<T>,
    pub alpha_k: T,
    pub alphas: Vec<T>,
}

impl<T: Field> CentroidWeights<T> {
    pub fn weight_sum(&self) -> T {
        self.alphas
            .iter()
            .fold(self.alpha_k.clone(), |a, b| a + b.clone())
    }

    /// `omega > 0` and every boundary coefficient negative.
    pub fn sign_pattern_holds(&self) -> bool {
        self.omega > T::zero() && self.boundary.iter().all(|b| *b < T::zero())
    }
}

/// Boundary Lagrange polynomials of the Gauss-Lobatto cubic at the centroid,
/// in node order (vertices, then edge nodes).
pub fn boundary_lagrange_centroid(k: usize) -> Result<Vec<Surd5>> {
    if k != 3 {
        return Err(PampaError::UnsupportedOrder(k));
    }
    let b = TriVariant::CubicMoment.basis(Surd5::from_int(1))?;
    let c = TriDualBasis::<Surd5>::centroid();
    Ok(b.lagrange.iter().map(|p| p.eval(&c)).collect())
}

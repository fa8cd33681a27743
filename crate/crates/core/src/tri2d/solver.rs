//! Quadratic scheme for linear advection `u_t + div(a u) = 0` on triangles.
//!
//! Averages move by the boundary flux, integrated edge by edge with Simpson's
//! rule on the shared point values. Each point value moves by
//! `-a . grad u_h` from the seven-DoF reconstruction of every incident
//! triangle, blended with upwind weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bp1d::{admissible_dt, sample_in, Bounds, TrialReport};
use crate::error::{PampaError, Result};
use crate::quadrature::TriangleRule;
use crate::timestep::{ssp_rk3_step, LinearCombination};

use super::mesh::TriMesh;
use super::quadratic::{
    eval_unchecked, local_nodes, quadratic_basis_bary_gradient, ALPHA_K, ALPHA_MIDPOINT,
    ALPHA_VERTEX, AVERAGE,
};

/// Regularisation of the upwind weights.
pub const UPWIND_EPSILON: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Velocity {
    Constant {
        a: [f64; 2],
    },
    /// `a(x, y) = omega (y, -x)`, clockwise for positive `omega`.
    Rotation {
        omega: f64,
    },
}

impl Velocity {
    pub fn at(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Velocity::Constant { a } => *a,
            Velocity::Rotation { omega } => [omega * x[1], -omega * x[0]],
        }
    }

    pub fn reversed(&self) -> Velocity {
        match self {
            Velocity::Constant { a } => Velocity::Constant { a: [-a[0], -a[1]] },
            Velocity::Rotation { omega } => Velocity::Rotation { omega: -omega },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriSolutionQ2 {
    /// Indexed by mesh point slot.
    pub point_values: Vec<f64>,
    pub averages: Vec<f64>,
}

impl TriSolutionQ2 {
    pub fn zeros(mesh: &TriMesh) -> Self {
        Self {
            point_values: vec![0.0; mesh.n_points()],
            averages: vec![0.0; mesh.n_triangles()],
        }
    }

    pub fn local(&self, mesh: &TriMesh, t: usize) -> [f64; 7] {
        let s = mesh.point_slots(t);
        let mut out = [0.0; 7];
        for (o, &slot) in out.iter_mut().zip(&s) {
            *o = self.point_values[slot];
        }
        out[AVERAGE] = self.averages[t];
        out
    }

    pub fn mass(&self, mesh: &TriMesh) -> f64 {
        self.averages
            .iter()
            .enumerate()
            .map(|(t, a)| mesh.area(t) * a)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.point_values
            .iter()
            .chain(&self.averages)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.point_values
            .iter()
            .chain(&self.averages)
            .all(|v| v.is_finite())
    }

    /// Samples `f` at the nodes and averages it over each triangle.
    pub fn project(mesh: &TriMesh, f: impl Fn([f64; 2]) -> f64 + Sync) -> Self {
        let mut u = Self::zeros(mesh);
        for t in 0..mesh.n_triangles() {
            for n in 0..6 {
                u.point_values[mesh.point_slot(t, n)] = f(mesh.node_position(t, n));
            }
        }
        let rule = TriangleRule::collapsed(6);
        u.averages = (0..mesh.n_triangles())
            .into_par_iter()
            .map(|t| {
                let p = mesh.coords(t);
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| w * f(physical(&p, l)))
                    .sum()
            })
            .collect();
        u
    }

    /// Reconstruction inside triangle `t` at barycentric point `l`.
    pub fn eval(&self, mesh: &TriMesh, t: usize, l: &[f64; 3]) -> f64 {
        let v = self.local(mesh, t);
        eval_unchecked(l).iter().zip(&v).map(|(b, u)| b * u).sum()
    }
}

impl LinearCombination for TriSolutionQ2 {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            point_values: self.point_values.lincomb(a, &other.point_values, b),
            averages: self.averages.lincomb(a, &other.averages, b),
        }
    }
}

fn physical(p: &[[f64; 2]; 3], l: &[f64; 3]) -> [f64; 2] {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Outward normal of local edge `e` scaled by the edge length.
pub fn edge_normal(p: &[[f64; 2]; 3], e: usize) -> [f64; 2] {
    let (a, b) = (p[e], p[(e + 1) % 3]);
    [b[1] - a[1], a[0] - b[0]]
}

/// Gradients of the barycentric coordinates.
pub fn bary_gradients(p: &[[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let two_area =
        (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        [
            (p[j][1] - p[k][1]) / two_area,
            (p[k][0] - p[j][0]) / two_area,
        ]
    })
}

/// Unit outward normals attached to the six local nodes: the edge normal at
/// midpoints, the normalised sum of the two adjacent edge normals at vertices.
pub fn node_normals(p: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let unit = |n: [f64; 2]| {
        let l = n[0].hypot(n[1]);
        [n[0] / l, n[1] / l]
    };
    let en: [[f64; 2]; 3] = std::array::from_fn(|e| unit(edge_normal(p, e)));
    std::array::from_fn(|n| {
        if n < 3 {
            // vertex n sits on edges n and n - 1
            let (a, b) = (en[n], en[(n + 2) % 3]);
            unit([a[0] + b[0], a[1] + b[1]])
        } else {
            en[n - 3]
        }
    })
}

/// Blending weights of the per-element point updates at one node, from the
/// outward normals `n_sigma^K` of the incident elements.
///
/// Element `K` counts as upwind when `a . n_sigma^K > 0`; weights are
/// proportional to `max(sign, 0) + eps`.
pub fn upwind_point_weights(normals: &[[f64; 2]], a: [f64; 2], eps: f64) -> Result<Vec<f64>> {
    if normals.is_empty() {
        return Err(PampaError::InvalidArgument("no incident elements".into()));
    }
    if !(eps > 0.0) {
        return Err(PampaError::InvalidArgument(
            "regularisation must be positive".into(),
        ));
    }
    let tol = 1e-12 * a[0].hypot(a[1]);
    let raw: Vec<f64> = normals
        .iter()
        .map(|n| {
            let d = dot(a, *n);
            let s = if d > tol { 1.0 } else { 0.0 };
            s + eps
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|r| r / total).collect())
}

/// Simpson rule for `int_e u (a . n)` on local edge `e`, from the node
/// values (vertices, then midpoints) and the velocity at those nodes.
pub fn simpson_edge_flux(
    coords: &[[f64; 2]; 3],
    velocity: &[[f64; 2]; 6],
    values: &[f64],
    e: usize,
) -> f64 {
    let n = edge_normal(coords, e);
    let f = |k: usize| values[k] * dot(velocity[k], n);
    (f(e) + 4.0 * f(3 + e) + f((e + 1) % 3)) / 6.0
}

/// Forward-Euler average update of a single triangle.
pub fn euler_average_update(
    coords: &[[f64; 2]; 3],
    velocity: &Velocity,
    values: &[f64; 6],
    average: f64,
    dt: f64,
) -> f64 {
    let nodes: [[f64; 2]; 6] = std::array::from_fn(|n| {
        if n < 3 {
            coords[n]
        } else {
            let (a, b) = (coords[n - 3], coords[(n - 2) % 3]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }
    });
    let vel = nodes.map(|x| velocity.at(x));
    let area = 0.5
        * ((coords[1][0] - coords[0][0]) * (coords[2][1] - coords[0][1])
            - (coords[2][0] - coords[0][0]) * (coords[1][1] - coords[0][1]));
    let flux: f64 = (0..3)
        .map(|e| simpson_edge_flux(coords, &vel, values, e))
        .sum();
    average - dt * flux / area
}

/// One incident element's contribution to a point DoF.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Contribution {
    tri: usize,
    node: usize,
    weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Geometry {
    area: f64,
    coords: [[f64; 2]; 3],
    grad: [[f64; 2]; 3],
    /// Velocity at the six nodes.
    velocity: [[f64; 2]; 6],
}

/// Precomputed geometry and upwind weights for one mesh and velocity field.
#[derive(Debug, Clone)]
pub struct Tri2DSolver {
    pub mesh: TriMesh,
    pub velocity: Velocity,
    geometry: Vec<Geometry>,
    contributions: Vec<Vec<Contribution>>,
    /// Boundary points where the flow enters; their values are held fixed.
    inflow: Vec<bool>,
}

impl Tri2DSolver {
    pub fn new(mesh: TriMesh, velocity: Velocity) -> Result<Self> {
        let geometry: Vec<Geometry> = (0..mesh.n_triangles())
            .map(|t| {
                let coords = mesh.coords(t);
                Geometry {
                    area: mesh.area(t),
                    coords,
                    grad: bary_gradients(&coords),
                    velocity: std::array::from_fn(|n| velocity.at(mesh.node_position(t, n))),
                }
            })
            .collect();

        let mut incident: Vec<Vec<(usize, usize, [f64; 2])>> = vec![Vec::new(); mesh.n_points()];
        let mut outward: Vec<[f64; 2]> = vec![[0.0, 0.0]; mesh.n_points()];
        let mut at: Vec<[f64; 2]> = vec![[0.0, 0.0]; mesh.n_points()];
        for (t, g) in geometry.iter().enumerate() {
            let normals = node_normals(&g.coords);
            for (n, normal) in normals.iter().enumerate() {
                let slot = mesh.point_slot(t, n);
                incident[slot].push((t, n, *normal));
                at[slot] = g.velocity[n];
            }
            for e in 0..3 {
                let edge = &mesh.edges()[mesh.edge_of(t, e)];
                if edge.is_boundary() {
                    let en = edge_normal(&g.coords, e);
                    for n in [e, (e + 1) % 3, 3 + e] {
                        let slot = mesh.point_slot(t, n);
                        outward[slot] = [outward[slot][0] + en[0], outward[slot][1] + en[1]];
                    }
                }
            }
        }
        let boundary = mesh.boundary_points();
        let inflow: Vec<bool> = (0..mesh.n_points())
            .map(|s| {
                let a = at[s];
                boundary[s]
                    && dot(a, outward[s])
                        < -1e-12 * a[0].hypot(a[1]) * outward[s][0].hypot(outward[s][1])
            })
            .collect();
        let contributions = incident
            .iter()
            .zip(&at)
            .map(|(inc, a)| {
                let normals: Vec<[f64; 2]> = inc.iter().map(|c| c.2).collect();
                let w = upwind_point_weights(&normals, *a, UPWIND_EPSILON)?;
                Ok(inc
                    .iter()
                    .zip(w)
                    .map(|(&(tri, node, _), weight)| Contribution { tri, node, weight })
                    .collect())
            })
            .collect::<Result<Vec<Vec<Contribution>>>>()?;
        Ok(Self {
            mesh,
            velocity,
            geometry,
            contributions,
            inflow,
        })
    }

    /// Per-edge Simpson flux `int_e u_h (a . n) dgamma` out of triangle `t`
    /// through local edge `e`.
    pub fn edge_flux(&self, u: &TriSolutionQ2, t: usize, e: usize) -> f64 {
        let g = &self.geometry[t];
        simpson_edge_flux(&g.coords, &g.velocity, &u.local(&self.mesh, t), e)
    }

    /// Element-local rates: the average rate and the six nodal `-a . grad u_h`.
    fn local_rates(&self, u: &TriSolutionQ2, t: usize) -> (f64, [f64; 6]) {
        let g = &self.geometry[t];
        let v = u.local(&self.mesh, t);
        let flux: f64 = (0..3).map(|e| self.edge_flux(u, t, e)).sum();
        let mut pts = [0.0; 6];
        for (n, l) in local_nodes().iter().enumerate() {
            let db = quadratic_basis_bary_gradient(l);
            let mut du = [0.0; 3];
            for (d, uk) in db.iter().zip(&v) {
                for c in 0..3 {
                    du[c] += d[c] * uk;
                }
            }
            let grad = [
                du[0] * g.grad[0][0] + du[1] * g.grad[1][0] + du[2] * g.grad[2][0],
                du[0] * g.grad[0][1] + du[1] * g.grad[1][1] + du[2] * g.grad[2][1],
            ];
            pts[n] = -dot(g.velocity[n], grad);
        }
        (-flux / g.area, pts)
    }

    pub fn rhs(&self, u: &TriSolutionQ2) -> Result<TriSolutionQ2> {
        // phase 1: independent element work
        let local: Vec<(f64, [f64; 6])> = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| self.local_rates(u, t))
            .collect();
        // phase 2: fixed-order combination at shared points
        let point_values = self
            .contributions
            .iter()
            .zip(&self.inflow)
            .map(|(cs, &held)| {
                if held {
                    0.0
                } else {
                    cs.iter().map(|c| c.weight * local[c.tri].1[c.node]).sum()
                }
            })
            .collect();
        Ok(TriSolutionQ2 {
            point_values,
            averages: local.iter().map(|l| l.0).collect(),
        })
    }

    pub fn max_speed(&self) -> f64 {
        self.geometry
            .iter()
            .flat_map(|g| g.velocity.iter())
            .map(|a| a[0].hypot(a[1]))
            .fold(0.0, f64::max)
    }

    /// Time step from the convex decomposition of the average update with
    /// the quadratic centroid weights.
    pub fn admissible_dt(&self) -> Result<f64> {
        admissible_dt(
            ALPHA_K,
            &[
                ALPHA_VERTEX,
                ALPHA_VERTEX,
                ALPHA_VERTEX,
                ALPHA_MIDPOINT,
                ALPHA_MIDPOINT,
                ALPHA_MIDPOINT,
            ],
            1.0,
            self.mesh.min_cell_measure(),
            self.max_speed(),
        )
    }

    pub fn inflow_points(&self) -> &[bool] {
        &self.inflow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian2D {
    pub alpha: f64,
    pub center: [f64; 2],
    /// Sum over periodic images of this rectangle `(lower, size)`.
    pub period: Option<([f64; 2], [f64; 2])>,
}

impl Gaussian2D {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let g = |c: [f64; 2]| (-self.alpha * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2))).exp();
        match self.period {
            None => g(self.center),
            Some((lower, size)) => {
                let wrap = |v: f64, lo: f64, l: f64| lo + (v - lo).rem_euclid(l);
                let c = [
                    wrap(self.center[0], lower[0], size[0]),
                    wrap(self.center[1], lower[1], size[1]),
                ];
                let mut s = 0.0;
                for i in -1..=1 {
                    for j in -1..=1 {
                        s += g([c[0] + i as f64 * size[0], c[1] + j as f64 * size[1]]);
                    }
                }
                s
            }
        }
    }

    /// Exact solution of the advection problem at time `t`.
    pub fn advected(&self, velocity: &Velocity, x: [f64; 2], t: f64) -> f64 {
        match velocity {
            Velocity::Constant { a } => Gaussian2D {
                center: [self.center[0] + a[0] * t, self.center[1] + a[1] * t],
                ..*self
            }
            .eval(x),
            Velocity::Rotation { omega } => {
                let (s, c) = (omega * t).sin_cos();
                self.eval([x[0] * c - x[1] * s, x[0] * s + x[1] * c])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics2D {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub min_average: f64,
    pub max_average: f64,
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct Run2DResult {
    pub final_state: TriSolutionQ2,
    pub t: f64,
    pub steps: usize,
    pub diagnostics: Vec<Diagnostics2D>,
}

fn diagnostics(mesh: &TriMesh, u: &TriSolutionQ2, step: usize, t: f64, dt: f64) -> Diagnostics2D {
    let (lo, hi) = u
        .averages
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(*v), h.max(*v))
        });
    Diagnostics2D {
        step,
        t,
        dt,
        min_average: lo,
        max_average: hi,
        mass: u.mass(mesh),
    }
}

impl Tri2DSolver {
    /// SSP-RK3 from `t0` to `t1` with `dt = dt_fraction * admissible_dt`.
    pub fn advance(
        &self,
        u0: &TriSolutionQ2,
        t0: f64,
        t1: f64,
        dt_fraction: f64,
    ) -> Result<Run2DResult> {
        if !(dt_fraction > 0.0 && dt_fraction.is_finite()) {
            return Err(PampaError::InvalidArgument(format!(
                "bad time-step fraction {dt_fraction}"
            )));
        }
        if !(t1 >= t0) {
            return Err(PampaError::InvalidArgument(
                "end time before start time".into(),
            ));
        }
        let dt_max = dt_fraction * self.admissible_dt()?;
        let mut u = u0.clone();
        let mut t = t0;
        let mut step = 0;
        let mut diags = Vec::new();
        while t < t1 {
            let mut dt = dt_max.min(t1 - t);
            if t1 - (t + dt) < 1e-12 * t1.abs().max(1.0) {
                dt = t1 - t;
            }
            diags.push(diagnostics(&self.mesh, &u, step, t, dt));
            u = ssp_rk3_step(&u, dt, |s: &TriSolutionQ2| self.rhs(s))?;
            t = if dt == t1 - t { t1 } else { t + dt };
            step += 1;
            let big = u.max_abs();
            if !u.all_finite() || big > crate::scheme1d::BLOW_UP_LIMIT {
                return Err(PampaError::BlowUp { t, value: big });
            }
        }
        diags.push(diagnostics(&self.mesh, &u, step, t, 0.0));
        Ok(Run2DResult {
            final_state: u,
            t,
            steps: step,
            diagnostics: diags,
        })
    }

    /// `L2` distance between the reconstruction and `exact`.
    pub fn l2_error(&self, u: &TriSolutionQ2, exact: impl Fn([f64; 2]) -> f64 + Sync) -> f64 {
        let rule = TriangleRule::collapsed(5);
        let sum: f64 = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| {
                let g = &self.geometry[t];
                let v = u.local(&self.mesh, t);
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| {
                        let uh: f64 = eval_unchecked(l).iter().zip(&v).map(|(b, x)| b * x).sum();
                        w * (uh - exact(physical(&g.coords, l))).powi(2)
                    })
                    .sum::<f64>()
                    * g.area
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        sum.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case2D {
    Translation,
    Rotation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Run2DConfig {
    pub case: Case2D,
    /// Half-width of the square domain `[-l, l]^2`.
    pub half_width: f64,
    pub cells: usize,
    pub jitter: f64,
    pub seed: u64,
    pub alpha: f64,
    pub center: [f64; 2],
    pub t_end: f64,
    pub dt_fraction: f64,
}

impl Run2DConfig {
    /// Desk-scale translation: periodic `[-10, 10]^2`, `a = (-1, 1)`.
    pub fn translation(cells: usize) -> Self {
        Self {
            case: Case2D::Translation,
            half_width: 10.0,
            cells,
            jitter: 0.0,
            seed: 0,
            alpha: 0.25,
            center: [5.0, -5.0],
            t_end: 2.0,
            dt_fraction: 1.0,
        }
    }

    /// Desk-scale rotation: `[-8, 8]^2`, `a = (y, -x)`, a quarter turn.
    pub fn rotation(cells: usize) -> Self {
        Self {
            case: Case2D::Rotation,
            half_width: 8.0,
            cells,
            jitter: 0.0,
            seed: 0,
            alpha: 1.0,
            center: [-4.0, 0.0],
            t_end: std::f64::consts::FRAC_PI_2,
            dt_fraction: 1.0,
        }
    }

    pub fn velocity(&self) -> Velocity {
        match self.case {
            Case2D::Translation => Velocity::Constant { a: [-1.0, 1.0] },
            Case2D::Rotation => Velocity::Rotation { omega: 1.0 },
        }
    }

    pub fn initial(&self) -> Gaussian2D {
        let l = self.half_width;
        Gaussian2D {
            alpha: self.alpha,
            center: self.center,
            period: match self.case {
                Case2D::Translation => Some(([-l, -l], [2.0 * l, 2.0 * l])),
                Case2D::Rotation => None,
            },
        }
    }

    pub fn mesh(&self) -> Result<TriMesh> {
        let l = self.half_width;
        TriMesh::structured(
            [-l, -l],
            [l, l],
            self.cells,
            self.cells,
            self.case == Case2D::Translation,
            self.jitter,
            self.seed,
        )
    }
}

#[derive(Debug, Clone)]
pub struct Run2DSummary {
    pub result: Run2DResult,
    pub l2_error: f64,
    pub h: f64,
}

pub fn run_2d(cfg: &Run2DConfig) -> Result<Run2DSummary> {
    run_2d_on(cfg, cfg.mesh()?)
}

/// Runs `cfg` on a given mesh. The exact solution uses periodic images only
/// when the mesh is closed.
pub fn run_2d_on(cfg: &Run2DConfig, mesh: TriMesh) -> Result<Run2DSummary> {
    if !(cfg.half_width > 0.0 && cfg.alpha > 0.0 && cfg.t_end >= 0.0) {
        return Err(PampaError::InvalidArgument("bad 2D configuration".into()));
    }
    let mut ic = cfg.initial();
    if !mesh.is_closed() {
        ic.period = None;
    }
    // for the structured meshes this is the cell width
    let h = (2.0 * mesh.total_area() / mesh.n_triangles() as f64).sqrt();
    let solver = Tri2DSolver::new(mesh, cfg.velocity())?;
    let u0 = TriSolutionQ2::project(&solver.mesh, |x| ic.eval(x));
    let result = solver.advance(&u0, 0.0, cfg.t_end, cfg.dt_fraction)?;
    let v = solver.velocity;
    let t = result.t;
    let l2_error = solver.l2_error(&result.final_state, |x| ic.advected(&v, x, t));
    Ok(Run2DSummary {
        result,
        l2_error,
        h,
    })
}

/// Random triangles, velocities and admissible states (boundary values and
/// centroid value in `[m, M]`, average from the quadratic weights), advanced
/// one forward-Euler step with the admissible time step.
pub fn random_average_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::default();
    while report.trials < trials {
        let mut p: [[f64; 2]; 3] =
            std::array::from_fn(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let mut area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        if area < 0.0 {
            p.swap(1, 2);
            area = -area;
        }
        if area < 1e-3 {
            continue;
        }
        let velocity = if rng.random_bool(0.5) {
            let (s, c) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
            let r = rng.random_range(0.1..3.0);
            Velocity::Constant { a: [r * c, r * s] }
        } else {
            Velocity::Rotation {
                omega: rng.random_range(-2.0..2.0),
            }
        };
        let m = rng.random_range(-2.0..1.0);
        let bounds = Bounds {
            m,
            big_m: m + rng.random_range(0.1..3.0),
        };
        let values: [f64; 6] = std::array::from_fn(|_| sample_in(&mut rng, bounds.m, bounds.big_m));
        let centre = sample_in(&mut rng, bounds.m, bounds.big_m);
        let average = ALPHA_K * centre
            + ALPHA_VERTEX * (values[0] + values[1] + values[2])
            + ALPHA_MIDPOINT * (values[3] + values[4] + values[5]);
        let nodes: [[f64; 2]; 6] = std::array::from_fn(|n| {
            if n < 3 {
                p[n]
            } else {
                let (a, b) = (p[n - 3], p[(n - 2) % 3]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            }
        });
        let speed = nodes.iter().map(|x| {
            let a = velocity.at(*x);
            a[0].hypot(a[1])
        });
        let speed = speed.fold(0.0, f64::max);
        let perimeter: f64 = (0..3)
            .map(|e| {
                let n = edge_normal(&p, e);
                n[0].hypot(n[1])
            })
            .sum();
        let dt_max = admissible_dt(
            ALPHA_K,
            &[
                ALPHA_VERTEX,
                ALPHA_VERTEX,
                ALPHA_VERTEX,
                ALPHA_MIDPOINT,
                ALPHA_MIDPOINT,
                ALPHA_MIDPOINT,
            ],
            1.0,
            area / perimeter,
            speed,
        )
        .expect("valid weights");
        let dt = if dt_max.is_finite() {
            sample_in(&mut rng, 0.0, 1.0) * dt_max
        } else {
            1.0
        };
        let next = euler_average_update(&p, &velocity, &values, average, dt);
        report.record(next, &bounds, 1e-12);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic_mesh(n: usize, jitter: f64) -> TriMesh {
        TriMesh::structured([0.0, 0.0], [1.0, 1.0], n, n, true, jitter, 5).unwrap()
    }

    #[test]
    fn bary_gradients_are_dual_to_edges() {
        let p = [[0.1, 0.2], [1.3, -0.1], [0.4, 0.9]];
        let g = bary_gradients(&p);
        for i in 0..3 {
            for j in 0..3 {
                let d = [p[j][0] - p[(i + 1) % 3][0], p[j][1] - p[(i + 1) % 3][1]];
                let want = if j == i { 1.0 } else { 0.0 };
                assert!((dot(g[i], d) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn upwind_weight_cases() {
        let w =
            upwind_point_weights(&[[1.0, 0.0], [-1.0, 0.0]], [2.0, 0.0], UPWIND_EPSILON).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15 && w[1] < 1e-15);
        let w =
            upwind_point_weights(&[[0.0, 1.0], [0.0, -1.0]], [2.0, 0.0], UPWIND_EPSILON).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
        assert_eq!(
            upwind_point_weights(&[[0.0, 1.0]], [1.0, -3.0], UPWIND_EPSILON).unwrap(),
            vec![1.0]
        );
        assert!(upwind_point_weights(&[], [1.0, 0.0], UPWIND_EPSILON).is_err());
    }

    #[test]
    fn constant_state_is_steady() {
        let s =
            Tri2DSolver::new(periodic_mesh(4, 0.2), Velocity::Constant { a: [0.3, -1.1] }).unwrap();
        let mut u = TriSolutionQ2::zeros(&s.mesh);
        u.point_values.fill(2.5);
        u.averages.fill(2.5);
        let r = s.rhs(&u).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn linear_data_has_exact_rates() {
        let mesh = TriMesh::structured([0.0, 0.0], [1.0, 1.0], 3, 3, false, 0.2, 2).unwrap();
        let s = Tri2DSolver::new(mesh, Velocity::Constant { a: [1.0, 0.0] }).unwrap();
        let u = TriSolutionQ2::project(&s.mesh, |x| x[0]);
        let r = s.rhs(&u).unwrap();
        for (v, held) in r.point_values.iter().zip(s.inflow_points()) {
            if !held {
                assert!((v + 1.0).abs() < 1e-12, "{v}");
            }
        }
        for v in &r.averages {
            assert!((v + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_edge_fluxes_cancel_and_mass_is_kept() {
        let s = Tri2DSolver::new(
            periodic_mesh(6, 0.25),
            Velocity::Constant { a: [-1.0, 0.7] },
        )
        .unwrap();
        let u = TriSolutionQ2::project(&s.mesh, |x| {
            (6.0 * x[0]).sin() * (2.0 * std::f64::consts::PI * x[1]).cos()
        });
        for edge in s.mesh.edges() {
            let [(t0, e0), (t1, e1)] = edge.tris[..] else {
                panic!()
            };
            let sum = s.edge_flux(&u, t0, e0) + s.edge_flux(&u, t1, e1);
            assert!(sum.abs() < 1e-12);
        }
        let dt = s.admissible_dt().unwrap();
        let r = s.advance(&u, 0.0, 3.0 * dt, 1.0).unwrap();
        assert!((r.final_state.mass(&s.mesh) - u.mass(&s.mesh)).abs() < 1e-12);
    }

    #[test]
    fn random_states_keep_averages_in_bounds() {
        let r = random_average_trials(20_000, 11);
        assert_eq!(r.trials, 20_000);
        assert_eq!(r.violations, 0, "{r:?}");
    }

    #[test]
    fn zero_velocity_is_steady() {
        let s =
            Tri2DSolver::new(periodic_mesh(4, 0.1), Velocity::Constant { a: [0.0, 0.0] }).unwrap();
        let u = TriSolutionQ2::project(&s.mesh, |x| x[0] * x[1]);
        let r = s.advance(&u, 0.0, 1.0, 1.0).unwrap();
        let diff = r.final_state.lincomb(1.0, &u, -1.0).max_abs();
        assert!(diff < 1e-15);
    }

    #[test]
    fn periodic_gaussian_sums_images() {
        let g = Gaussian2D {
            alpha: 1.0,
            center: [9.5, 0.0],
            period: Some(([-10.0, -10.0], [20.0, 20.0])),
        };
        let a = g.eval([-9.5, 0.0]);
        assert!((a - (-1.0f64).exp()).abs() < 1e-12);
        let moved = g.advected(&Velocity::Constant { a: [1.0, 0.0] }, [-10.0, 0.0], 0.5);
        assert!((moved - 1.0).abs() < 1e-12);
        let rot = Gaussian2D {
            alpha: 1.0,
            center: [-4.0, 0.0],
            period: None,
        };
        // clockwise quarter turn takes (-4, 0) to (0, 4)
        let v = rot.advected(
            &Velocity::Rotation { omega: 1.0 },
            [0.0, 4.0],
            std::f64::consts::FRAC_PI_2,
        );
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_there_and_back_costs_at_most_twice_one_way() {
        let cfg = Run2DConfig::rotation(20);
        let ic = cfg.initial();
        let forward = Tri2DSolver::new(cfg.mesh().unwrap(), cfg.velocity()).unwrap();
        let u0 = TriSolutionQ2::project(&forward.mesh, |x| ic.eval(x));
        let there = forward.advance(&u0, 0.0, cfg.t_end, 1.0).unwrap();
        let v = forward.velocity;
        let one_way = forward.l2_error(&there.final_state, |x| ic.advected(&v, x, cfg.t_end));

        let back = Tri2DSolver::new(cfg.mesh().unwrap(), cfg.velocity().reversed()).unwrap();
        let home = back
            .advance(&there.final_state, 0.0, cfg.t_end, 1.0)
            .unwrap();
        let round_trip = back.l2_error(&home.final_state, |x| ic.eval(x));
        assert!(one_way > 0.0);
        assert!(round_trip < 2.0 * one_way, "{round_trip} vs {one_way}");
    }
}

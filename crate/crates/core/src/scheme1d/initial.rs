use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mesh1d::{Mesh1D, Solution1D};
use crate::quadrature::GaussRule;

/// Initial profiles for the 1D experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialCondition {
    Constant {
        value: f64,
    },
    /// `cos(2 pi x / period)`.
    Cosine {
        period: f64,
    },
    /// `exp(-alpha x^2)`.
    Gaussian {
        alpha: f64,
    },
    /// Gaussian, square, triangle and semi-ellipse on `[-1, 1]`.
    JiangShu,
}

const JS_A: f64 = 0.5;
const JS_Z: f64 = -0.7;
const JS_DELTA: f64 = 0.005;
const JS_ALPHA: f64 = 10.0;

fn js_g(x: f64, beta: f64, z: f64) -> f64 {
    (-beta * (x - z).powi(2)).exp()
}

fn js_f(x: f64, alpha: f64, a: f64) -> f64 {
    (1.0 - alpha * alpha * (x - a).powi(2)).max(0.0).sqrt()
}

fn jiang_shu(x: f64) -> f64 {
    let beta = 2f64.ln() / (36.0 * JS_DELTA * JS_DELTA);
    if (-0.8..=-0.6).contains(&x) {
        (js_g(x, beta, JS_Z - JS_DELTA)
            + js_g(x, beta, JS_Z + JS_DELTA)
            + 4.0 * js_g(x, beta, JS_Z))
            / 6.0
    } else if (-0.4..=-0.2).contains(&x) {
        1.0
    } else if (0.0..=0.2).contains(&x) {
        1.0 - (10.0 * (x - 0.1)).abs()
    } else if (0.4..=0.6).contains(&x) {
        (js_f(x, JS_ALPHA, JS_A - JS_DELTA)
            + js_f(x, JS_ALPHA, JS_A + JS_DELTA)
            + 4.0 * js_f(x, JS_ALPHA, JS_A))
            / 6.0
    } else {
        0.0
    }
}

impl InitialCondition {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialCondition::Constant { value } => value,
            InitialCondition::Cosine { period } => (2.0 * std::f64::consts::PI * x / period).cos(),
            InitialCondition::Gaussian { alpha } => (-alpha * x * x).exp(),
            InitialCondition::JiangShu => jiang_shu(x),
        }
    }

    /// Exact solution of linear advection with speed `a` on the periodic
    /// interval `[start, start + length)`.
    pub fn advected(&self, x: f64, t: f64, a: f64, start: f64, length: f64) -> f64 {
        let y = start + (x - a * t - start).rem_euclid(length);
        self.eval(y)
    }

    /// Point values at the nodes and moments by composite Gauss quadrature.
    pub fn project(&self, mesh: &Mesh1D, order: usize) -> Result<Solution1D> {
        self.project_with(mesh, order, |x| self.eval(x))
    }

    pub fn project_with(
        &self,
        mesh: &Mesh1D,
        order: usize,
        u0: impl Fn(f64) -> f64,
    ) -> Result<Solution1D> {
        sample(mesh, order, u0)
    }
}

/// Samples `u0` into the DoF layout: exact point values, moments by a
/// composite Gauss rule.
pub(crate) fn sample(mesh: &Mesh1D, order: usize, u0: impl Fn(f64) -> f64) -> Result<Solution1D> {
    const SUB: usize = 16;
    let g = GaussRule::new(8);
    let points = mesh.nodes()[..mesh.n_points()]
        .iter()
        .map(|&x| u0(x))
        .collect();
    let mut moments = Vec::with_capacity(mesh.n_cells() * (order - 1));
    for j in 0..mesh.n_cells() {
        let x0 = mesh.nodes()[j];
        let dx = mesh.cell_length(j);
        for l in 0..order - 1 {
            let mut acc = 0.0;
            for s in 0..SUB {
                let a = s as f64 / SUB as f64;
                let b = (s + 1) as f64 / SUB as f64;
                acc += g.integrate_on(a, b, |xi| xi.powi(l as i32) * u0(x0 + dx * xi));
            }
            moments.push(acc * dx);
        }
    }
    Solution1D::from_parts(mesh, order, points, moments)
}

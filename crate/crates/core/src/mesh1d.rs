//! One-dimensional meshes and the continuous/discontinuous DoF layout.
//!
//! A mesh with `N` cells has nodes `x_0 < ... < x_N`. On a periodic mesh the
//! last node is the image of the first, so point values live on `N` distinct
//! slots; otherwise there are `N + 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PampaError, Result};
use crate::timestep::LinearCombination;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    periodic: bool,
}

impl Mesh1D {
    pub fn from_nodes(nodes: Vec<f64>, periodic: bool) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(PampaError::InvalidMesh("need at least one cell".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(PampaError::InvalidMesh("non-finite node coordinate".into()));
        }
        if let Some(j) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(PampaError::InvalidMesh(format!(
                "nodes not strictly increasing at cell {j}"
            )));
        }
        if periodic && nodes.len() < 4 {
            return Err(PampaError::InvalidMesh(
                "periodic meshes need at least 3 cells".into(),
            ));
        }
        Ok(Self { nodes, periodic })
    }

    pub fn make_uniform(a: f64, b: f64, n_cells: usize, periodic: bool) -> Result<Self> {
        if n_cells == 0 {
            return Err(PampaError::InvalidMesh("zero cells".into()));
        }
        if !(b > a) {
            return Err(PampaError::InvalidMesh(format!(
                "empty interval [{a}, {b}]"
            )));
        }
        let h = (b - a) / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| a + i as f64 * h).collect();
        nodes[n_cells] = b;
        Self::from_nodes(nodes, periodic)
    }

    /// Uniform mesh whose interior nodes are displaced by a uniform random
    /// amount in `[-jitter, jitter] * dx`.
    pub fn make_random(
        a: f64,
        b: f64,
        n_cells: usize,
        jitter: f64,
        seed: u64,
        periodic: bool,
    ) -> Result<Self> {
        if !(0.0..0.5).contains(&jitter) {
            return Err(PampaError::InvalidArgument(format!(
                "jitter {jitter} outside [0, 0.5)"
            )));
        }
        let base = Self::make_uniform(a, b, n_cells, periodic)?;
        if jitter == 0.0 {
            return Ok(base);
        }
        let h = (b - a) / n_cells as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = base.nodes;
        for x in nodes.iter_mut().take(n_cells).skip(1) {
            *x += rng.random_range(-jitter..=jitter) * h;
        }
        Self::from_nodes(nodes, periodic)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of distinct point-value slots.
    pub fn n_points(&self) -> usize {
        if self.periodic {
            self.n_cells()
        } else {
            self.nodes.len()
        }
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.end() - self.start()
    }

    /// `Delta_{j+1/2} = x_{j+1} - x_j`.
    pub fn cell_length(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn cell_lengths(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_cell_length(&self) -> f64 {
        self.cell_lengths()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Point slot of the left endpoint of cell `j`.
    pub fn left_point(&self, j: usize) -> usize {
        j
    }

    /// Point slot of the right endpoint of cell `j`.
    pub fn right_point(&self, j: usize) -> usize {
        if self.periodic && j + 1 == self.n_cells() {
            0
        } else {
            j + 1
        }
    }

    /// Cell to the left of cell `j`, wrapping on periodic meshes.
    pub fn left_cell(&self, j: usize) -> Option<usize> {
        match (j, self.periodic) {
            (0, true) => Some(self.n_cells() - 1),
            (0, false) => None,
            _ => Some(j - 1),
        }
    }

    pub fn right_cell(&self, j: usize) -> Option<usize> {
        let n = self.n_cells();
        match (j + 1 == n, self.periodic) {
            (true, true) => Some(0),
            (true, false) => None,
            _ => Some(j + 1),
        }
    }

    /// Cells `(left, right)` sharing point slot `i`.
    pub fn cells_at_point(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let n = self.n_cells();
        let right = (i < n).then_some(i);
        let left = if i == 0 {
            self.periodic.then_some(n - 1)
        } else {
            Some(i - 1)
        };
        (left, right)
    }

    /// Cell containing `x` (periodically wrapped) and the local coordinate
    /// `xi` in `[0, 1]`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let mut x = x;
        if self.periodic {
            x = self.start() + (x - self.start()).rem_euclid(self.length());
        }
        let j = match self
            .nodes
            .binary_search_by(|n| n.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i.min(self.n_cells() - 1),
            Err(i) => i.saturating_sub(1).min(self.n_cells() - 1),
        };
        let xi = ((x - self.nodes[j]) / self.cell_length(j)).clamp(0.0, 1.0);
        (j, xi)
    }
}

/// Continuous point values plus per-cell moments `int_cell ((x - x_j)/dx)^l u dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    order: usize,
    pub point_values: Vec<f64>,
    /// `k - 1` moments per cell, stored contiguously.
    pub cell_moments: Vec<f64>,
}

impl Solution1D {
    pub fn zeros(mesh: &Mesh1D, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(PampaError::UnsupportedOrder(order));
        }
        Ok(Self {
            order,
            point_values: vec![0.0; mesh.n_points()],
            cell_moments: vec![0.0; mesh.n_cells() * (order - 1)],
        })
    }

    pub fn from_parts(
        mesh: &Mesh1D,
        order: usize,
        point_values: Vec<f64>,
        cell_moments: Vec<f64>,
    ) -> Result<Self> {
        if order < 2 {
            return Err(PampaError::UnsupportedOrder(order));
        }
        if point_values.len() != mesh.n_points() {
            return Err(PampaError::InvalidArgument(format!(
                "expected {} point values, got {}",
                mesh.n_points(),
                point_values.len()
            )));
        }
        if cell_moments.len() != mesh.n_cells() * (order - 1) {
            return Err(PampaError::InvalidArgument(format!(
                "expected {} moments, got {}",
                mesh.n_cells() * (order - 1),
                cell_moments.len()
            )));
        }
        Ok(Self {
            order,
            point_values,
            cell_moments,
        })
    }

    /// Third-order state from point values and cell averages.
    pub fn from_averages(mesh: &Mesh1D, point_values: Vec<f64>, averages: &[f64]) -> Result<Self> {
        let moments = averages
            .iter()
            .enumerate()
            .map(|(j, a)| a * mesh.cell_length(j))
            .collect();
        Self::from_parts(mesh, 2, point_values, moments)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_moments(&self) -> usize {
        self.order - 1
    }

    pub fn n_cells(&self) -> usize {
        self.cell_moments.len() / self.n_moments()
    }

    pub fn moments(&self, j: usize) -> &[f64] {
        let m = self.n_moments();
        &self.cell_moments[j * m..(j + 1) * m]
    }

    pub fn moments_mut(&mut self, j: usize) -> &mut [f64] {
        let m = self.n_moments();
        &mut self.cell_moments[j * m..(j + 1) * m]
    }

    /// Cell average `u_2 / Delta_{j+1/2}`.
    pub fn average(&self, mesh: &Mesh1D, j: usize) -> f64 {
        self.moments(j)[0] / mesh.cell_length(j)
    }

    pub fn averages(&self, mesh: &Mesh1D) -> Vec<f64> {
        (0..mesh.n_cells()).map(|j| self.average(mesh, j)).collect()
    }

    /// Local DoFs `(u_left, moments..., u_right)` with the moments divided by
    /// the cell length, i.e. the coefficients of the reference dual basis.
    pub fn local_reference_dofs(&self, mesh: &Mesh1D, j: usize) -> Vec<f64> {
        let dx = mesh.cell_length(j);
        let mut out = Vec::with_capacity(self.order + 1);
        out.push(self.point_values[mesh.left_point(j)]);
        out.extend(self.moments(j).iter().map(|m| m / dx));
        out.push(self.point_values[mesh.right_point(j)]);
        out
    }

    /// `sum_j u_2(j)`, the discrete mass.
    pub fn mass(&self) -> f64 {
        self.cell_moments.iter().step_by(self.n_moments()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.point_values
            .iter()
            .chain(&self.cell_moments)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.point_values
            .iter()
            .chain(&self.cell_moments)
            .all(|v| v.is_finite())
    }
}

impl LinearCombination for Solution1D {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            point_values: self.point_values.lincomb(a, &other.point_values, b),
            cell_moments: self.cell_moments.lincomb(a, &other.cell_moments, b),
        }
    }
}

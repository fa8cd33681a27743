use crate::error::{PampaError, Result};
use crate::mesh1d::Mesh1D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheck {
    /// `sum_j gamma_j u_j^2` with `u_j` the length-weighted projection.
    pub lhs: f64,
    /// `sum_cells Delta (u_left^2 + u_right^2)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the energy of the length-weighted projection of per-cell endpoint
/// values with the sum of the element energies.
pub fn energy_and_inequality_check(
    mesh: &Mesh1D,
    left: &[f64],
    right: &[f64],
) -> Result<EnergyCheck> {
    let n = mesh.n_cells();
    if left.len() != n || right.len() != n {
        return Err(PampaError::InvalidArgument(format!(
            "expected {n} endpoint pairs, got {} and {}",
            left.len(),
            right.len()
        )));
    }
    let mut lhs = 0.0;
    for i in 0..mesh.n_points() {
        let (cl, cr) = mesh.cells_at_point(i);
        let mut gamma = 0.0;
        let mut weighted = 0.0;
        if let Some(l) = cl {
            gamma += mesh.cell_length(l);
            weighted += mesh.cell_length(l) * right[l];
        }
        if let Some(r) = cr {
            gamma += mesh.cell_length(r);
            weighted += mesh.cell_length(r) * left[r];
        }
        let u = weighted / gamma;
        lhs += gamma * u * u;
    }
    let rhs = (0..n)
        .map(|j| mesh.cell_length(j) * (left[j] * left[j] + right[j] * right[j]))
        .sum::<f64>();
    Ok(EnergyCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

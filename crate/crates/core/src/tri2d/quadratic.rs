//! Closed forms of the quadratic triangle element: six boundary point values
//! (vertices, then midpoints of edges (0,1), (1,2), (2,0)) and the average.

use crate::error::Result;

use super::bary::validate_barycentric;

pub const N_LOCAL: usize = 7;
pub const AVERAGE: usize = 6;

/// `ubar = ALPHA_K u(x_K) + ALPHA_VERTEX sum u_vertex + ALPHA_MIDPOINT sum u_mid`.
pub const ALPHA_K: f64 = 9.0 / 20.0;
pub const ALPHA_VERTEX: f64 = 1.0 / 20.0;
pub const ALPHA_MIDPOINT: f64 = 2.0 / 15.0;

/// Local index of the midpoint of local edge `e`, which joins vertices `e`
/// and `(e + 1) % 3`.
pub fn midpoint(e: usize) -> usize {
    3 + e
}

/// `(phi_1, ..., phi_6, psi_K)` at `l`.
pub fn quadratic_basis_eval(l: &[f64; 3]) -> Result<[f64; N_LOCAL]> {
    validate_barycentric(l)?;
    Ok(eval_unchecked(l))
}

pub(crate) fn eval_unchecked(l: &[f64; 3]) -> [f64; N_LOCAL] {
    let psi = 60.0 * l[0] * l[1] * l[2];
    let mut out = [0.0; N_LOCAL];
    for i in 0..3 {
        out[i] = (2.0 * l[i] - 1.0) * l[i];
        out[midpoint(i)] = 4.0 * l[i] * l[(i + 1) % 3] - psi / 3.0;
    }
    out[AVERAGE] = psi;
    out
}

/// Partial derivatives of the seven functions with respect to `l_0, l_1,
/// l_2`, taken as independent variables.
pub fn quadratic_basis_bary_gradient(l: &[f64; 3]) -> [[f64; 3]; N_LOCAL] {
    let dpsi = [60.0 * l[1] * l[2], 60.0 * l[0] * l[2], 60.0 * l[0] * l[1]];
    let mut out = [[0.0; 3]; N_LOCAL];
    for i in 0..3 {
        out[i][i] = 4.0 * l[i] - 1.0;
        let j = (i + 1) % 3;
        for (c, d) in dpsi.iter().enumerate() {
            out[midpoint(i)][c] = -d / 3.0;
        }
        out[midpoint(i)][i] += 4.0 * l[j];
        out[midpoint(i)][j] += 4.0 * l[i];
    }
    out[AVERAGE] = dpsi;
    out
}

/// Local barycentric coordinates of the six boundary nodes.
pub fn local_nodes() -> [[f64; 3]; 6] {
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ]
}

use crate::mesh1d::{Mesh1D, Solution1D};

use super::{DGUpdate, FluxSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionKind {
    Central,
    Upwind,
    LengthWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionRule {
    pub kind: ProjectionKind,
    /// Wave speeds with `|f'| <= tie_epsilon` use central weights.
    pub tie_epsilon: f64,
}

impl ProjectionRule {
    pub fn new(kind: ProjectionKind) -> Self {
        Self {
            kind,
            tie_epsilon: 1e-12,
        }
    }

    pub fn central() -> Self {
        Self::new(ProjectionKind::Central)
    }

    pub fn upwind() -> Self {
        Self::new(ProjectionKind::Upwind)
    }

    pub fn length_weighted() -> Self {
        Self::new(ProjectionKind::LengthWeighted)
    }
}

/// Weights `(w_left_cell, w_right_cell)` at point slot `i`; the left cell is
/// the one whose right endpoint is the node.
pub fn node_weights(mesh: &Mesh1D, i: usize, speed: f64, rule: &ProjectionRule) -> (f64, f64) {
    match mesh.cells_at_point(i) {
        (Some(l), Some(r)) => match rule.kind {
            ProjectionKind::Central => (0.5, 0.5),
            ProjectionKind::LengthWeighted => {
                let (dl, dr) = (mesh.cell_length(l), mesh.cell_length(r));
                (dl / (dl + dr), dr / (dl + dr))
            }
            ProjectionKind::Upwind => {
                if speed > rule.tie_epsilon {
                    (1.0, 0.0)
                } else if speed < -rule.tie_epsilon {
                    (0.0, 1.0)
                } else {
                    (0.5, 0.5)
                }
            }
        },
        (Some(_), None) => (1.0, 0.0),
        (None, Some(_)) => (0.0, 1.0),
        (None, None) => unreachable!("every point touches a cell"),
    }
}

/// Turns a dG update into a time derivative of the continuous state:
/// moments pass through, point derivatives are blended per node.
pub fn project(
    mesh: &Mesh1D,
    upd: &DGUpdate,
    u: &Solution1D,
    rule: &ProjectionRule,
    flux: &FluxSpec,
) -> Solution1D {
    let mut points = vec![0.0; mesh.n_points()];
    for (i, p) in points.iter_mut().enumerate() {
        let (wl, wr) = node_weights(mesh, i, flux.df(u.point_values[i]), rule);
        let (cl, cr) = mesh.cells_at_point(i);
        // left contribution first, then right, for reproducible rounding
        let mut acc = 0.0;
        if let Some(l) = cl {
            acc += wl * upd.right_point[l];
        }
        if let Some(r) = cr {
            acc += wr * upd.left_point[r];
        }
        *p = acc;
    }
    Solution1D::from_parts(mesh, u.order(), points, upd.moments.clone())
        .expect("update layout follows the mesh")
}

/// Centrally projected third-order point update on a uniform mesh:
/// `-(a/dx)(u_j - 3 ubar_{j+1/2} + 3 ubar_{j+3/2} - u_{j+2})`.
pub fn central_projected_point_rhs(
    u_j: f64,
    ubar_left: f64,
    ubar_right: f64,
    u_j2: f64,
    a: f64,
    dx: f64,
) -> f64 {
    -(a / dx) * (u_j - 3.0 * ubar_left + 3.0 * ubar_right - u_j2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme1d::pampa_rhs;

    fn three_cells(dx: [f64; 3]) -> Mesh1D {
        Mesh1D::from_nodes(
            vec![0.0, dx[0], dx[0] + dx[1], dx[0] + dx[1] + dx[2]],
            false,
        )
        .unwrap()
    }

    fn update_with(mesh: &Mesh1D, left_side: f64, right_side: f64) -> DGUpdate {
        // node 1 sits between cells 0 and 1
        let n = mesh.n_cells();
        let mut upd = DGUpdate {
            order: 2,
            left_point: vec![0.0; n],
            right_point: vec![0.0; n],
            moments: vec![0.0; n],
        };
        upd.right_point[0] = left_side;
        upd.left_point[1] = right_side;
        upd
    }

    #[test]
    fn central_is_mean() {
        let mesh = three_cells([1.0, 1.0, 1.0]);
        let u = Solution1D::zeros(&mesh, 2).unwrap();
        let d = project(
            &mesh,
            &update_with(&mesh, 2.0, 4.0),
            &u,
            &ProjectionRule::central(),
            &FluxSpec::LinearAdvection(1.0),
        );
        assert_eq!(d.point_values[1], 3.0);
    }

    #[test]
    fn length_weighted_example() {
        let mesh = three_cells([1.0, 3.0, 1.0]);
        let u = Solution1D::zeros(&mesh, 2).unwrap();
        let d = project(
            &mesh,
            &update_with(&mesh, 2.0, 4.0),
            &u,
            &ProjectionRule::length_weighted(),
            &FluxSpec::LinearAdvection(1.0),
        );
        assert!((d.point_values[1] - 3.5).abs() < 1e-15);
    }

    #[test]
    fn upwind_keeps_left_cell_for_positive_speed() {
        let mesh = three_cells([1.0, 1.0, 1.0]);
        let u = Solution1D::zeros(&mesh, 2).unwrap();
        let upd = update_with(&mesh, 2.0, 4.0);
        let rule = ProjectionRule::upwind();
        let pos = project(&mesh, &upd, &u, &rule, &FluxSpec::LinearAdvection(1.0));
        let neg = project(&mesh, &upd, &u, &rule, &FluxSpec::LinearAdvection(-1.0));
        let tie = project(&mesh, &upd, &u, &rule, &FluxSpec::LinearAdvection(0.0));
        assert_eq!(pos.point_values[1], 2.0);
        assert_eq!(neg.point_values[1], 4.0);
        assert_eq!(tie.point_values[1], 3.0);
    }

    #[test]
    fn closed_form_central_update() {
        assert_eq!(
            central_projected_point_rhs(1.0, 0.0, 0.0, -1.0, 1.0, 1.0),
            -2.0
        );
        assert_eq!(
            central_projected_point_rhs(0.4, 0.4, 0.4, 0.4, 1.7, 0.1),
            0.0
        );
    }

    #[test]
    fn closed_form_matches_composition() {
        let mesh = Mesh1D::make_uniform(0.0, 1.0, 5, true).unwrap();
        let pts = vec![0.3, -1.2, 0.8, 2.0, -0.4];
        let avgs = [0.1, 0.9, -0.5, 1.1, 0.0];
        let u = Solution1D::from_averages(&mesh, pts.clone(), &avgs).unwrap();
        let flux = FluxSpec::LinearAdvection(1.3);
        let upd = pampa_rhs(&mesh, &u, &flux).unwrap();
        let d = project(&mesh, &upd, &u, &ProjectionRule::central(), &flux);
        let want = central_projected_point_rhs(pts[1], avgs[1], avgs[2], pts[3], 1.3, 0.2);
        assert!((d.point_values[2] - want).abs() < 1e-13);
    }
}

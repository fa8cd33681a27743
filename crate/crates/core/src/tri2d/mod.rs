//! Triangles: exact dual bases, centroid positivity weights, and a quadratic
//! advection solver on unstructured meshes.

pub mod bary;
pub mod dual;
pub mod mesh;
pub mod quadratic;
pub mod solver;

pub use bary::{bary_integral, BaryPoly};
pub use dual::{
    boundary_lagrange_centroid, gl_points, CentroidWeights, GaussLobatto, TriDualBasis, TriVariant,
};
pub use mesh::TriMesh;
pub use quadratic::quadratic_basis_eval;
pub use solver::{
    random_average_trials, run_2d, run_2d_on, upwind_point_weights, Case2D, Diagnostics2D,
    Gaussian2D, Run2DConfig, Run2DResult, Run2DSummary, Tri2DSolver, TriSolutionQ2, Velocity,
};

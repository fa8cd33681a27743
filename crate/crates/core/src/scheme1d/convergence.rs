use serde::Serialize;

use crate::error::{PampaError, Result};
use crate::mesh1d::Mesh1D;

use super::simulation::{run_simulation, ErrorNorms, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub h: f64,
    pub errors: ErrorNorms,
    /// `log2(e_{h_prev} / e_h)` scaled by the actual refinement ratio;
    /// absent on the coarsest level.
    pub eoc_l1: Option<f64>,
    pub eoc_l2: Option<f64>,
    pub eoc_linf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn finest(&self) -> &ConvergenceRow {
        self.rows.last().expect("a study has at least three levels")
    }
}

fn eoc(coarse: f64, fine: f64, ratio: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).ln() / ratio.ln())
}

/// Runs `template` on uniform meshes of the same interval with the given
/// cell counts and reports experimental orders of convergence.
pub fn convergence_study(template: &SimConfig, cells: &[usize]) -> Result<ConvergenceTable> {
    if cells.len() < 3 {
        return Err(PampaError::InvalidArgument(
            "a convergence study needs at least 3 levels".into(),
        ));
    }
    let (a, b) = (template.mesh.start(), template.mesh.end());
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cells.len());
    for &n in cells {
        let mut cfg = template.clone();
        cfg.mesh = Mesh1D::make_uniform(a, b, n, true)?;
        let res = run_simulation(&cfg)?;
        let errors = res
            .errors
            .ok_or_else(|| PampaError::InvalidArgument("no exact solution for this flux".into()))?;
        let h = (b - a) / n as f64;
        let (eoc_l1, eoc_l2, eoc_linf) = match rows.last() {
            Some(prev) => {
                let r = prev.h / h;
                (
                    eoc(prev.errors.l1, errors.l1, r),
                    eoc(prev.errors.l2, errors.l2, r),
                    eoc(prev.errors.linf, errors.linf, r),
                )
            }
            None => (None, None, None),
        };
        rows.push(ConvergenceRow {
            cells: n,
            h,
            errors,
            eoc_l1,
            eoc_l2,
            eoc_linf,
        });
    }
    Ok(ConvergenceTable { rows })
}

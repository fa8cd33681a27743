use serde::{Deserialize, Serialize};

use crate::bp1d::{
    admissible_dt, limit_solution, Bounds, LimiterOptions, LimiterStats, MonotoneFlux,
};
use crate::error::{PampaError, Result};
use crate::mesh1d::{Mesh1D, Solution1D};
use crate::quadrature::GaussRule;
use crate::timestep::ssp_rk3_step_with;

use super::energy::energy_and_inequality_check;
use super::initial::InitialCondition;
use super::projection::{project, ProjectionRule};
use super::{FluxSpec, Scheme1D};

/// Any DoF above this magnitude aborts the run.
pub const BLOW_UP_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BpMode {
    #[default]
    Off,
    /// Limit point values after every stage.
    Point,
    /// Limit point values and cap the time step so the average update is a
    /// convex combination of monotone updates.
    PointAndAverage,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub mesh: Mesh1D,
    pub order: usize,
    pub flux: FluxSpec,
    pub initial: InitialCondition,
    pub cfl: f64,
    pub t_end: f64,
    pub projection: ProjectionRule,
    pub bp: BpMode,
    /// Keep a copy of the state every this many steps (and at the end).
    pub snapshot_every: Option<usize>,
    pub limiter: LimiterOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub min_average: f64,
    pub max_average: f64,
    pub min_point: f64,
    pub max_point: f64,
    pub mass: f64,
    /// Energy of the projected forward-Euler dG point values and the sum of
    /// the element energies they come from.
    pub energy_lhs: f64,
    pub energy_rhs: f64,
    pub limited_cells: usize,
    pub theta_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub final_state: Solution1D,
    pub t: f64,
    pub steps: usize,
    pub bounds: Bounds,
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<(f64, Solution1D)>,
    /// Present when an exact solution is known (linear advection).
    pub errors: Option<ErrorNorms>,
}

fn validate(cfg: &SimConfig) -> Result<()> {
    if !cfg.mesh.is_periodic() {
        return Err(PampaError::InvalidArgument(
            "simulations need a periodic mesh".into(),
        ));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl.is_finite()) {
        return Err(PampaError::InvalidArgument(format!(
            "CFL must be positive, got {}",
            cfg.cfl
        )));
    }
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(PampaError::InvalidArgument(format!(
            "bad end time {}",
            cfg.t_end
        )));
    }
    if cfg.snapshot_every == Some(0) {
        return Err(PampaError::InvalidArgument(
            "snapshot interval must be positive".into(),
        ));
    }
    Ok(())
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn max_speed(flux: &FluxSpec, u: &Solution1D, mesh: &Mesh1D) -> f64 {
    u.point_values
        .iter()
        .cloned()
        .chain(u.averages(mesh))
        .map(|v| flux.df(v).abs())
        .fold(0.0, f64::max)
}

/// Time-dependent error norms of the reconstruction against `exact`.
pub fn error_norms(
    scheme: &Scheme1D,
    mesh: &Mesh1D,
    u: &Solution1D,
    exact: impl Fn(f64) -> f64,
) -> ErrorNorms {
    let g = GaussRule::new(scheme.order() + 3);
    let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
    for j in 0..mesh.n_cells() {
        let dofs = u.local_reference_dofs(mesh, j);
        let x0 = mesh.nodes()[j];
        let dx = mesh.cell_length(j);
        for (&xi, &w) in g.nodes.iter().zip(&g.weights) {
            let e = (scheme.basis.eval(&dofs, xi) - exact(x0 + dx * xi)).abs();
            l1 += w * dx * e;
            l2 += w * dx * e * e;
            linf = linf.max(e);
        }
    }
    for (i, v) in u.point_values.iter().enumerate() {
        linf = linf.max((v - exact(mesh.nodes()[i])).abs());
    }
    ErrorNorms {
        l1,
        l2: l2.sqrt(),
        linf,
    }
}

fn diagnostics(
    scheme: &Scheme1D,
    cfg: &SimConfig,
    u: &Solution1D,
    step: usize,
    t: f64,
    dt: f64,
    stats: LimiterStats,
) -> Result<StepDiagnostics> {
    let mesh = &cfg.mesh;
    let (min_average, max_average) = extremes(u.averages(mesh).into_iter());
    let (min_point, max_point) = extremes(u.point_values.iter().cloned());
    let upd = scheme.pampa_rhs(mesh, u, &cfg.flux)?;
    let n = mesh.n_cells();
    let left: Vec<f64> = (0..n)
        .map(|j| u.point_values[mesh.left_point(j)] + dt * upd.left_point[j])
        .collect();
    let right: Vec<f64> = (0..n)
        .map(|j| u.point_values[mesh.right_point(j)] + dt * upd.right_point[j])
        .collect();
    let energy = energy_and_inequality_check(mesh, &left, &right)?;
    Ok(StepDiagnostics {
        step,
        t,
        dt,
        min_average,
        max_average,
        min_point,
        max_point,
        mass: u.mass(),
        energy_lhs: energy.lhs,
        energy_rhs: energy.rhs,
        limited_cells: stats.limited_cells,
        theta_min: stats.theta_min,
    })
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimResult> {
    validate(cfg)?;
    let scheme = Scheme1D::new(cfg.order)?;
    let mesh = &cfg.mesh;
    let mut u = cfg.initial.project(mesh, cfg.order)?;
    let (lo, hi) = extremes(u.point_values.iter().cloned().chain(u.averages(mesh)));
    let bounds = Bounds::new(lo, hi)?;

    let limit = |s: &mut Solution1D| -> LimiterStats {
        match cfg.bp {
            BpMode::Off => LimiterStats {
                theta_min: 1.0,
                ..Default::default()
            },
            _ => limit_solution(mesh, s, &bounds, &cfg.limiter, |v| cfg.flux.df(v)),
        }
    };
    let mut stats = limit(&mut u);

    let rhs = |s: &Solution1D| -> Result<Solution1D> {
        let upd = scheme.pampa_rhs(mesh, s, &cfg.flux)?;
        Ok(project(mesh, &upd, s, &cfg.projection, &cfg.flux))
    };

    let mut diags = Vec::new();
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let mut step = 0;
    if cfg.snapshot_every.is_some() {
        snapshots.push((t, u.clone()));
    }
    let h = mesh.min_cell_length();
    while t < cfg.t_end {
        let speed = max_speed(&cfg.flux, &u, mesh);
        let mut dt = if speed > 0.0 {
            cfg.cfl * h / speed
        } else {
            cfg.t_end - t
        };
        if cfg.bp == BpMode::PointAndAverage && speed > 0.0 {
            let lambda0 = match cfg.flux {
                FluxSpec::LinearAdvection(a) => MonotoneFlux::UpwindLinear(a),
                other => MonotoneFlux::Rusanov(other),
            }
            .cfl_limit();
            dt = dt.min(admissible_dt(
                4.0 / 6.0,
                &[1.0 / 6.0, 1.0 / 6.0],
                lambda0,
                h,
                speed,
            )?);
        }
        if t + dt >= cfg.t_end || cfg.t_end - (t + dt) < 1e-12 * cfg.t_end {
            dt = cfg.t_end - t;
        }
        let mut stage_stats = LimiterStats {
            theta_min: 1.0,
            ..Default::default()
        };
        let next = ssp_rk3_step_with(&u, dt, rhs, |s| {
            let st = limit(s);
            stage_stats.limited_cells = stage_stats.limited_cells.max(st.limited_cells);
            stage_stats.skipped_cells += st.skipped_cells;
            stage_stats.theta_min = stage_stats.theta_min.min(st.theta_min);
            Ok(())
        })?;
        let d = diagnostics(&scheme, cfg, &u, step, t, dt, stats)?;
        diags.push(d);
        stats = stage_stats;
        u = next;
        step += 1;
        t = if dt == cfg.t_end - t {
            cfg.t_end
        } else {
            t + dt
        };

        let big = u.max_abs();
        if !u.all_finite() || big > BLOW_UP_LIMIT {
            return Err(PampaError::BlowUp { t, value: big });
        }
        if let Some(every) = cfg.snapshot_every {
            if step % every == 0 || t >= cfg.t_end {
                snapshots.push((t, u.clone()));
            }
        }
    }
    diags.push(diagnostics(&scheme, cfg, &u, step, t, 0.0, stats)?);

    let errors = match cfg.flux {
        FluxSpec::LinearAdvection(a) => {
            let ic = cfg.initial;
            let (start, len) = (mesh.start(), mesh.length());
            Some(error_norms(&scheme, mesh, &u, |x| {
                ic.advected(x, t, a, start, len)
            }))
        }
        _ => None,
    };
    Ok(SimResult {
        final_state: u,
        t,
        steps: step,
        bounds,
        diagnostics: diags,
        snapshots,
        errors,
    })
}

//! Bound preservation of the third-order average update in 1D.
//!
//! The average update `ubar - lambda (f(u_{j+1}) - f(u_j))` is rewritten,
//! through the Simpson midpoint, as a convex combination of three monotone
//! two-point updates; each stays in `[m, M]` when `6 lambda <= lambda0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PampaError, Result};
use crate::mesh1d::{Mesh1D, Solution1D};
use crate::scheme1d::FluxSpec;

#[derive(Debug, Clone, Copy)]
pub enum MonotoneFlux {
    /// Upwind flux for `f(u) = a u`.
    UpwindLinear(f64),
    /// Local Lax-Friedrichs flux; the local speed bound
    /// `max(|f'(u_l)|, |f'(u_r)|)` is exact for convex or concave fluxes.
    Rusanov(FluxSpec),
}

impl MonotoneFlux {
    /// Largest `dt/dx` (at unit wave speed) for which the three-point scheme
    /// built on this flux is monotone.
    pub fn cfl_limit(&self) -> f64 {
        match self {
            MonotoneFlux::UpwindLinear(_) => 1.0,
            MonotoneFlux::Rusanov(_) => 0.5,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self {
            MonotoneFlux::UpwindLinear(a) => a * u,
            MonotoneFlux::Rusanov(flux) => flux.f(u),
        }
    }

    /// Largest wave speed over the interval spanned by `a` and `b`.
    pub fn max_speed(&self, a: f64, b: f64) -> f64 {
        match self {
            MonotoneFlux::UpwindLinear(s) => s.abs(),
            MonotoneFlux::Rusanov(flux) => flux.df(a).abs().max(flux.df(b).abs()),
        }
    }

    /// `f_hat(left, right)`: nondecreasing in `left`, nonincreasing in `right`.
    pub fn numerical_flux(&self, left: f64, right: f64) -> f64 {
        match self {
            MonotoneFlux::UpwindLinear(a) => {
                if *a >= 0.0 {
                    a * left
                } else {
                    a * right
                }
            }
            MonotoneFlux::Rusanov(flux) => {
                let alpha = self.max_speed(left, right);
                0.5 * (flux.f(left) + flux.f(right)) - 0.5 * alpha * (right - left)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub m: f64,
    pub big_m: f64,
}

impl Bounds {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if !(m <= big_m) {
            return Err(PampaError::InvalidArgument(format!(
                "empty bounds [{m}, {big_m}]"
            )));
        }
        Ok(Self { m, big_m })
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.m - slack && v <= self.big_m + slack
    }
}

/// `u_{j+1/2}` from `ubar = (u_j + 4 u_{j+1/2} + u_{j+1}) / 6`.
pub fn simpson_midpoint(u_j: f64, ubar: f64, u_j1: f64) -> f64 {
    (6.0 * ubar - u_j - u_j1) / 4.0
}

/// Forward-Euler average update computed directly and through the convex
/// decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageUpdate {
    pub direct: f64,
    pub decomposed: f64,
    /// The three monotone two-point updates (right, middle, left).
    pub brackets: [f64; 3],
}

pub fn convex_average_update(
    u_j: f64,
    ubar: f64,
    u_j1: f64,
    flux: &MonotoneFlux,
    lambda: f64,
) -> AverageUpdate {
    let mid = simpson_midpoint(u_j, ubar, u_j1);
    let direct = ubar - lambda * (flux.f(u_j1) - flux.f(u_j));
    let f_right = flux.numerical_flux(mid, u_j1);
    let f_left = flux.numerical_flux(u_j, mid);
    let b_right = u_j1 - 6.0 * lambda * (flux.f(u_j1) - f_right);
    let b_mid = mid - 1.5 * lambda * (f_right - f_left);
    let b_left = u_j - 6.0 * lambda * (f_left - flux.f(u_j));
    let decomposed = b_right / 6.0 + 4.0 * b_mid / 6.0 + b_left / 6.0;
    AverageUpdate {
        direct,
        decomposed,
        brackets: [b_right, b_mid, b_left],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    Pass,
    Fail,
    /// Preconditions (data in bounds, `6 lambda` below the flux limit) fail.
    NotApplicable,
}

/// Checks that the updated average stays in `bounds` under the
/// convex-decomposition preconditions.
pub fn average_bounds_guarantee(
    u_j: f64,
    ubar: f64,
    u_j1: f64,
    flux: &MonotoneFlux,
    lambda: f64,
    bounds: &Bounds,
) -> Guarantee {
    let mid = simpson_midpoint(u_j, ubar, u_j1);
    let speed = flux
        .max_speed(bounds.m, bounds.big_m)
        .max(flux.max_speed(u_j, u_j1));
    let admissible = [u_j, u_j1, mid].iter().all(|v| bounds.contains(*v, 0.0))
        && lambda >= 0.0
        && 6.0 * lambda * speed <= flux.cfl_limit() * (1.0 + 1e-14);
    if !admissible {
        return Guarantee::NotApplicable;
    }
    let upd = convex_average_update(u_j, ubar, u_j1, flux, lambda);
    if bounds.contains(upd.direct, 1e-12) {
        Guarantee::Pass
    } else {
        Guarantee::Fail
    }
}

/// Time step making every convex term a monotone update:
/// `lambda0 * min(alpha_k, min alphas) * cell_measure / max_speed`.
pub fn admissible_dt(
    alpha_k: f64,
    alphas: &[f64],
    lambda0: f64,
    cell_measure: f64,
    max_speed: f64,
) -> Result<f64> {
    if alpha_k <= 0.0 || alphas.iter().any(|&a| a <= 0.0) {
        return Err(PampaError::InvalidArgument(
            "convex weights must be positive".into(),
        ));
    }
    let total = alpha_k + alphas.iter().sum::<f64>();
    if (total - 1.0).abs() > 1e-12 {
        return Err(PampaError::InvalidArgument(format!(
            "convex weights sum to {total}"
        )));
    }
    if lambda0 < 0.0 || cell_measure <= 0.0 || max_speed < 0.0 {
        return Err(PampaError::InvalidArgument("negative CFL data".into()));
    }
    if max_speed == 0.0 {
        return Ok(f64::INFINITY);
    }
    let wmin = alphas.iter().cloned().fold(alpha_k, f64::min);
    Ok(lambda0 * wmin * cell_measure / max_speed)
}

/// Scaling factor pulling `values` about `avg` into `bounds`.
pub fn limiter_theta(avg: f64, values: &[f64], bounds: &Bounds) -> f64 {
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut theta = 1.0f64;
    if vmax > avg && vmax > bounds.big_m {
        theta = theta.min((bounds.big_m - avg) / (vmax - avg));
    }
    if vmin < avg && vmin < bounds.m {
        theta = theta.min((avg - bounds.m) / (avg - vmin));
    }
    theta.clamp(0.0, 1.0)
}

/// Limits the point values of one cell: `v <- avg + theta (v - avg)`.
/// Returns `None` when the average itself is out of bounds.
pub fn point_value_limiter(avg: f64, values: &[f64], bounds: &Bounds) -> Option<(f64, Vec<f64>)> {
    if !bounds.contains(avg, 0.0) {
        return None;
    }
    let theta = limiter_theta(avg, values, bounds);
    Some((
        theta,
        values.iter().map(|v| avg + theta * (v - avg)).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LimiterStats {
    pub limited_cells: usize,
    pub skipped_cells: usize,
    pub theta_min: f64,
}

/// Which cell's limited value a node shared by two cells receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SharedNode {
    /// The cell with the smaller limiting factor.
    MinTheta,
    /// The cell upstream of the node for the given wave speed sign; the
    /// smaller factor when the speed vanishes.
    #[default]
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterOptions {
    /// Include the Simpson midpoint implied by the average (`k = 2` only).
    pub include_midpoint: bool,
    pub shared: SharedNode,
}

impl Default for LimiterOptions {
    fn default() -> Self {
        Self {
            include_midpoint: true,
            shared: SharedNode::Upwind,
        }
    }
}

/// Applies the per-cell limiter to a whole 1D state, averages untouched.
/// `speed` gives the wave speed at a point value, used by
/// [`SharedNode::Upwind`].
pub fn limit_solution(
    mesh: &Mesh1D,
    u: &mut Solution1D,
    bounds: &Bounds,
    opts: &LimiterOptions,
    speed: impl Fn(f64) -> f64,
) -> LimiterStats {
    let n = mesh.n_cells();
    let mut stats = LimiterStats {
        theta_min: 1.0,
        ..Default::default()
    };
    let mut theta = vec![1.0; n];
    let mut avg = vec![0.0; n];
    for j in 0..n {
        avg[j] = u.average(mesh, j);
        let ul = u.point_values[mesh.left_point(j)];
        let ur = u.point_values[mesh.right_point(j)];
        if !bounds.contains(avg[j], 0.0) {
            stats.skipped_cells += 1;
            continue;
        }
        let t = if u.order() == 2 && opts.include_midpoint {
            limiter_theta(avg[j], &[ul, ur, simpson_midpoint(ul, avg[j], ur)], bounds)
        } else {
            limiter_theta(avg[j], &[ul, ur], bounds)
        };
        theta[j] = t;
        if t < 1.0 {
            stats.limited_cells += 1;
        }
        stats.theta_min = stats.theta_min.min(t);
    }
    if stats.limited_cells == 0 {
        return stats;
    }
    for i in 0..mesh.n_points() {
        let v = u.point_values[i];
        let pick = match mesh.cells_at_point(i) {
            (Some(l), Some(r)) => {
                let min_theta = if theta[r] < theta[l] { r } else { l };
                match opts.shared {
                    SharedNode::MinTheta => min_theta,
                    SharedNode::Upwind => {
                        let s = speed(v);
                        if s > 0.0 {
                            l
                        } else if s < 0.0 {
                            r
                        } else {
                            min_theta
                        }
                    }
                }
            }
            (Some(c), None) | (None, Some(c)) => c,
            (None, None) => continue,
        };
        if theta[pick] < 1.0 {
            u.point_values[i] = avg[pick] + theta[pick] * (v - avg[pick]);
        }
    }
    stats
}

/// Outcome of a batch of random bound-preservation trials.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TrialReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest distance of an updated average outside `[m, M]`.
    pub max_excess: f64,
    /// Largest `|direct - decomposed|` (1D only).
    pub max_identity_error: f64,
}

impl TrialReport {
    pub(crate) fn record(&mut self, v: f64, bounds: &Bounds, slack: f64) {
        self.trials += 1;
        let excess = (bounds.m - v).max(v - bounds.big_m).max(0.0);
        self.max_excess = self.max_excess.max(excess);
        if excess > slack {
            self.violations += 1;
        }
    }
}

/// Draws a value in `[lo, hi]`, hitting the end points now and then.
pub(crate) fn sample_in<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    match rng.random_range(0..10) {
        0 => lo,
        1 => hi,
        _ => rng.random_range(lo..=hi),
    }
}

/// Random admissible states `(u_j, ubar, u_{j+1})` with Simpson midpoint in
/// `[m, M]`, upwind flux for a random speed, and `6 lambda |a| <= 1`.
pub fn random_average_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::default();
    for _ in 0..trials {
        let m = rng.random_range(-2.0..1.0);
        let bounds = Bounds {
            m,
            big_m: m + rng.random_range(0.1..3.0),
        };
        let u_j = sample_in(&mut rng, bounds.m, bounds.big_m);
        let u_j1 = sample_in(&mut rng, bounds.m, bounds.big_m);
        let mid = sample_in(&mut rng, bounds.m, bounds.big_m);
        let ubar = (u_j + 4.0 * mid + u_j1) / 6.0;
        let a = rng.random_range(0.1..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let flux = MonotoneFlux::UpwindLinear(a);
        let lambda = sample_in(&mut rng, 0.0, 1.0) * flux.cfl_limit() / (6.0 * a.abs());
        let upd = convex_average_update(u_j, ubar, u_j1, &flux, lambda);
        report.record(upd.direct, &bounds, 1e-12);
        report.max_identity_error = report
            .max_identity_error
            .max((upd.direct - upd.decomposed).abs());
    }
    report
}

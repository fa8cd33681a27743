//! Explicit time stepping: forward Euler and the three-stage SSP Runge-Kutta
//! scheme in Shu-Osher form.

use crate::error::Result;

/// States that support `a * self + b * other`.
pub trait LinearCombination: Sized {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl LinearCombination for f64 {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
}

impl LinearCombination for Vec<f64> {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        self.iter().zip(other).map(|(x, y)| a * x + b * y).collect()
    }
}

/// `u + dt L(u)`.
pub fn euler_step<S, F>(u: &S, dt: f64, mut rhs: F) -> Result<S>
where
    S: LinearCombination,
    F: FnMut(&S) -> Result<S>,
{
    Ok(u.lincomb(1.0, &rhs(u)?, dt))
}

pub fn ssp_rk3_step<S, F>(u: &S, dt: f64, rhs: F) -> Result<S>
where
    S: LinearCombination,
    F: FnMut(&S) -> Result<S>,
{
    ssp_rk3_step_with(u, dt, rhs, |_| Ok(()))
}

/// SSP-RK3 with a hook applied after every stage (used by limiters).
pub fn ssp_rk3_step_with<S, F, H>(u: &S, dt: f64, mut rhs: F, mut hook: H) -> Result<S>
where
    S: LinearCombination,
    F: FnMut(&S) -> Result<S>,
    H: FnMut(&mut S) -> Result<()>,
{
    let mut u1 = u.lincomb(1.0, &rhs(u)?, dt);
    hook(&mut u1)?;
    let e1 = u1.lincomb(1.0, &rhs(&u1)?, dt);
    let mut u2 = u.lincomb(0.75, &e1, 0.25);
    hook(&mut u2)?;
    let e2 = u2.lincomb(1.0, &rhs(&u2)?, dt);
    let mut u3 = u.lincomb(1.0 / 3.0, &e2, 2.0 / 3.0);
    hook(&mut u3)?;
    Ok(u3)
}

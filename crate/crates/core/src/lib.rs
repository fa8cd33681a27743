//! PAMPA (Active Flux) discretisations of scalar conservation laws.

pub mod basis1d;
pub mod bp1d;
pub mod error;
pub mod field;
pub mod linalg;
pub mod mesh1d;
pub mod poly;
pub mod quadrature;
pub mod sbp1d;
pub mod scheme1d;
pub mod timestep;
pub mod tri2d;

pub use error::{PampaError, Result};

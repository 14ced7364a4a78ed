//! Electromagnetic, fluid and Cartan–Hilbert instantiations of the action 1-form.

use thiserror::Error;

use crate::exterior::ExteriorError;
use crate::thermo::ThermoError;

pub mod cartan_hilbert;
pub mod em;
pub mod navier_stokes;
pub mod vector;

pub use cartan_hilbert::{cartan_hilbert, cartan_hilbert_variety, CartanHilbertReport};
pub use em::{em_fields, hydro_fields, lorentz_work, FieldBundle, Flavor, LorentzWork};
pub use navier_stokes::{
    default_closure, euler_check, flow_field, hydro_action, hydro_sigma, hydro_torsion, ns_residual, ns_work_form,
    EulerCheck, HydroSigma, NSParams, Residual, WorkDecomposition,
};
pub use vector::{Frame, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("process must have unit time component")]
    TimeComponent,
    #[error("work form has a dt residual that is not a fluctuation: {residual}")]
    DecompositionFailure { residual: String },
    #[error("Cartan-Hilbert size {0} is outside 1..=2")]
    SizeUnsupported(usize),
}

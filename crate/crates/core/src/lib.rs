//! Symbolic exterior calculus with a topological-thermodynamics layer.
//!
//! Modules build on each other bottom-up: [`symbolic`] scalars, [`exterior`] forms,
//! [`thermo`] Pfaff analysis and processes, [`spinor`] eigen-analysis of 2-forms, and
//! [`physics`] for electromagnetic, fluid and Cartan–Hilbert instantiations.

pub mod exterior;
pub mod physics;
pub mod spinor;
pub mod symbolic;
pub mod thermo;

pub use symbolic::{CRational, Expr};

//! Two-level atom in a Lorentzian reservoir, restricted to a single
//! excitation: amplitude dynamics (discrete RK4 bath and exact pseudomode
//! solution), two-qubit concurrence, global entanglement, and the
//! atom-mode / mode-mode entanglement densities of the continuum limit.

pub mod density;
pub mod discrete;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod pseudomode;
pub mod quadrature;
pub mod register;
pub mod spectrum;

pub use discrete::{SystemState, Trajectory};
pub use error::{Error, Result};
pub use model::{BathGrid, PhysicalParams};
pub use pseudomode::PseudomodeSolution;
pub use spectrum::{Spectrum, TimePoint};

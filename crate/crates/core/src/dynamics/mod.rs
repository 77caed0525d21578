//! Vertical-plane rail vehicle model: parameters, state, track excitation,
//! equations of motion and modal analysis.

mod excitation;
mod modal;
mod model;
mod params;
mod state;

pub use excitation::{excitation, ExcitationSample, TrackExcitation};
pub use modal::{normal_modes, undamped_frequencies, NormalMode};
pub(crate) use model::rhs_unchecked;
pub use model::{assemble_system, rhs, Matrix6, Matrix6x4, SystemMatrices, Vector6};
pub use params::{Geometry, VehicleParams};
pub use state::{Coord, StateDerivative, VehicleState};

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Three-degree-of-freedom surface ship manoeuvring simulation.

pub mod abkowitz;
pub mod actuator;
pub mod config;
pub mod csv_io;
pub mod environment;
pub mod error;
pub mod fossen;
pub mod identification;
pub mod integrator;
pub mod kinematics;
pub mod maneuver;
pub mod mmg;
pub mod model;
pub mod requirements;
pub mod response;
pub mod simulation;

pub use error::{Error, Result};
pub use kinematics::{ShipGeometry, ShipState, StateRate, TrueWind};
pub use model::{ControlInput, Force3, ForceBreakdown, ShipModel};

//! Bow and stern tunnel thrusters.
//!
//! Each thruster produces a lateral force `rho n^2 D^4 K_T sign(n)` that fades
//! linearly with forward speed and is gone at `|u| >= 1 / c_u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::ShipState;
use crate::model::Force3;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThrusterParams {
    /// longitudinal position from midship, m
    pub x: f64,
    /// duct diameter, m
    pub D: f64,
    /// force coefficient, dimensionless
    pub K_T: f64,
    /// speed decay, s/m
    pub c_u: f64,
}

impl ThrusterParams {
    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.D > 0.0) {
            return Err(Error::invalid(&format!("thrusters.{name}.D"), "must be > 0"));
        }
        if !(self.c_u >= 0.0) {
            return Err(Error::invalid(&format!("thrusters.{name}.c_u"), "must be >= 0"));
        }
        Ok(())
    }

    pub fn force(&self, u: f64, n: f64, rho: f64) -> Force3 {
        if n == 0.0 {
            return Force3::ZERO;
        }
        let decay = (1.0 - self.c_u * u.abs()).max(0.0);
        let y = rho * n * n * self.D.powi(4) * self.K_T * n.signum() * decay;
        Force3::new(0.0, y, y * self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThrusterSet {
    #[serde(default)]
    pub bow: Option<ThrusterParams>,
    #[serde(default)]
    pub stern: Option<ThrusterParams>,
}

impl ThrusterSet {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.bow {
            t.validate("bow")?;
        }
        if let Some(t) = &self.stern {
            t.validate("stern")?;
        }
        Ok(())
    }
}

pub fn thruster_forces(state: &ShipState, n_bt: f64, n_st: f64, thrusters: &ThrusterSet, rho: f64) -> Force3 {
    let mut f = Force3::ZERO;
    if let Some(t) = &thrusters.bow {
        f += t.force(state.u, n_bt, rho);
    }
    if let Some(t) = &thrusters.stern {
        f += t.force(state.u, n_st, rho);
    }
    f
}

//! Three-degree-of-freedom MMG model for berthing-speed manoeuvres.
//!
//! Forces are assembled from independent hull, propeller, rudder, side
//! thruster and wind modules; the added-mass terms live on the left-hand
//! side, so the sway/yaw pair is solved as a coupled 2x2 system.

pub mod hull;
pub mod propeller;
pub mod rudder;
pub mod thruster;
pub mod wind;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{apparent_wind, body_to_earth_rates, ShipGeometry, ShipState, StateRate, TrueWind};
use crate::model::{ControlInput, Force3, ForceBreakdown, ShipModel};

pub use hull::{crossflow_integrals, hull_forces, HullCoeffs};
pub use propeller::{propeller_forces, propeller_quadrant, wake_fraction, PropellerParams, PropellerQuadrant};
pub use rudder::{fujii_lift_gradient, rudder_forces, rudder_inflow, RudderInflow, RudderParams};
pub use thruster::{thruster_forces, ThrusterParams, ThrusterSet};
pub use wind::{wind_forces, WindCoeffs};

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmgMassParams {
    pub m: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub I_zz: f64,
    pub J_zz: f64,
    pub x_G: f64,
    /// x-coordinate where the sway added mass acts, m
    #[serde(default)]
    pub alpha_y: f64,
}

impl MmgMassParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("m", self.m),
            ("m + m_x", self.m + self.m_x),
            ("m + m_y", self.m + self.m_y),
            ("I_zz + J_zz + x_G^2 m", self.yaw_inertia()),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::SingularMassMatrix(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.lateral_matrix().determinant() > 0.0) {
            return Err(Error::SingularMassMatrix(
                "sway/yaw block is not positive definite".into(),
            ));
        }
        Ok(())
    }

    fn yaw_inertia(&self) -> f64 {
        self.I_zz + self.J_zz + self.x_G * self.x_G * self.m
    }

    fn coupling(&self) -> f64 {
        self.x_G * self.m + self.m_y * self.alpha_y
    }

    /// Sway/yaw block of the mass matrix.
    pub fn lateral_matrix(&self) -> Matrix2<f64> {
        let c = self.coupling();
        Matrix2::new(self.m + self.m_y, c, c, self.yaw_inertia())
    }

    /// Right-hand sides of the three equations of motion, with the Coriolis
    /// and centripetal terms moved over.
    pub fn rhs(&self, state: &ShipState, f: &Force3) -> (f64, f64, f64) {
        let (u, v, r) = (state.u, state.v_m, state.r);
        let x = f.x + (self.m + self.m_y) * v * r + self.x_G * self.m * r * r + self.m_y * self.alpha_y * r * r;
        let y = f.y - (self.m + self.m_x) * u * r;
        let n = f.n - self.coupling() * u * r;
        (x, y, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmgParams {
    pub geometry: ShipGeometry,
    pub mass: MmgMassParams,
    pub hull: HullCoeffs,
    pub propeller: PropellerParams,
    pub rudder: RudderParams,
    pub wind: WindCoeffs,
    #[serde(default)]
    pub thrusters: ThrusterSet,
}

impl MmgParams {
    /// Full load-time validation, including the resistance sign checks.
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.mass.validate()?;
        self.hull.validate()?;
        self.propeller.validate()?;
        self.rudder.validate()?;
        self.wind.validate()?;
        self.thrusters.validate()
    }

    /// Variant whose dynamics are exactly mirror-symmetric: the propeller
    /// lateral polynomials are dropped and both flow-straightening branches
    /// share the starboard value.
    pub fn laterally_symmetric(mut self) -> Self {
        self.propeller = self.propeller.without_lateral();
        self.rudder.gamma_N = self.rudder.gamma_P;
        self
    }
}

pub const COMPONENT_LABELS: [&str; 5] = ["H", "P", "R", "T", "wind"];

/// Force components in [`COMPONENT_LABELS`] order.
pub fn mmg_forces(params: &MmgParams, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> [Force3; 5] {
    let g = &params.geometry;
    [
        hull_forces(state, g, &params.hull),
        propeller_forces(state, input.n_p, g, &params.propeller),
        rudder_forces(state, input.n_p, input.delta, g, &params.propeller, &params.rudder),
        thruster_forces(state, input.n_bt, input.n_st, &params.thrusters, g.rho),
        wind_forces(&apparent_wind(state, wind), g, &params.wind),
    ]
}

#[derive(Debug, Clone)]
pub struct MmgModel {
    params: MmgParams,
    lateral_inverse: Matrix2<f64>,
}

impl MmgModel {
    /// Only the mass matrix is checked here; coefficient signs are the
    /// loader's business.
    pub fn new(params: MmgParams) -> Result<Self> {
        params.geometry.validate()?;
        params.mass.validate()?;
        let lateral_inverse = params
            .mass
            .lateral_matrix()
            .try_inverse()
            .ok_or_else(|| Error::SingularMassMatrix("sway/yaw block".into()))?;
        Ok(Self {
            params,
            lateral_inverse,
        })
    }

    pub fn params(&self) -> &MmgParams {
        &self.params
    }

    /// `(du/dt, dv_m/dt, dr/dt)` for a given net force.
    pub fn accelerations(&self, state: &ShipState, total: &Force3) -> (f64, f64, f64) {
        let mass = &self.params.mass;
        let (x, y, n) = mass.rhs(state, total);
        let lat = self.lateral_inverse * Vector2::new(y, n);
        (x / (mass.m + mass.m_x), lat[0], lat[1])
    }
}

pub fn mmg_derivative(state: &ShipState, input: &ControlInput, wind: &TrueWind, model: &MmgModel) -> StateRate {
    let total = mmg_forces(&model.params, state, input, wind)
        .into_iter()
        .fold(Force3::ZERO, |a, b| a + b);
    let (du, dv, dr) = model.accelerations(state, &total);
    let (dx, dy, dpsi) = body_to_earth_rates(state);
    StateRate::from([dx, dy, dpsi, du, dv, dr])
}

impl ShipModel for MmgModel {
    fn name(&self) -> &'static str {
        "mmg"
    }

    fn derivative(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> StateRate {
        mmg_derivative(state, input, wind, self)
    }

    fn forces(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> ForceBreakdown {
        let parts = mmg_forces(&self.params, state, input, wind);
        ForceBreakdown {
            total: parts.iter().fold(Force3::ZERO, |a, b| a + *b),
            components: COMPONENT_LABELS.iter().copied().zip(parts).collect(),
        }
    }

    fn component_labels(&self) -> &'static [&'static str] {
        &COMPONENT_LABELS
    }
}

//! Frames, ship state and the small geometric helpers every model shares.
//!
//! Earth frame `O0-x0y0` has `x0` pointing north and `y0` east; the body frame
//! `O-xy` sits at midship with `x` forward and `y` to starboard. Heading `psi`
//! and yaw rate `r` are positive clockwise seen from above.
//!
//! Wind angle conventions:
//! * `TrueWind::direction` is the direction the wind blows *from*, measured
//!   clockwise from the `x0` axis.
//! * `ApparentWind::angle` is the direction the relative wind comes *from*,
//!   measured clockwise from the bow. `0` is a head wind, `pi/2` is wind on the
//!   starboard beam.

use std::f64::consts::PI;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this resultant speed the drift angle is defined as zero.
pub const DEFAULT_SPEED_EPS: f64 = 1e-9;

/// Wrap an angle into (-pi, pi].
pub fn wrap_pi(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Wrap an angle into [0, 2pi).
pub fn wrap_two_pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShipState {
    pub x0: f64,
    pub y0: f64,
    pub psi: f64,
    pub u: f64,
    pub v_m: f64,
    pub r: f64,
}

/// Time derivative of a [`ShipState`], in the same component order.
pub type StateRate = SVector<f64, 6>;

impl ShipState {
    pub fn new(x0: f64, y0: f64, psi: f64, u: f64, v_m: f64, r: f64) -> Self {
        Self {
            x0,
            y0,
            psi: wrap_pi(psi),
            u,
            v_m,
            r,
        }
    }

    /// A state at the origin moving with the given body velocities.
    pub fn with_velocity(u: f64, v_m: f64, r: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, u, v_m, r)
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    /// `[x0, y0, psi, u, v_m, r]`
    pub fn to_vector(&self) -> SVector<f64, 6> {
        SVector::<f64, 6>::from([self.x0, self.y0, self.psi, self.u, self.v_m, self.r])
    }

    /// Inverse of [`ShipState::to_vector`]. The heading is taken verbatim;
    /// call [`ShipState::normalized`] after an accepted integration step.
    pub fn from_vector(x: &SVector<f64, 6>) -> Self {
        Self {
            x0: x[0],
            y0: x[1],
            psi: x[2],
            u: x[3],
            v_m: x[4],
            r: x[5],
        }
    }

    pub fn normalized(mut self) -> Self {
        self.psi = wrap_pi(self.psi);
        self
    }

    /// Body velocity norm `sqrt(u^2 + v_m^2 + r^2)` (mixed units, used for
    /// decay checks).
    pub fn velocity_norm(&self) -> f64 {
        (self.u * self.u + self.v_m * self.v_m + self.r * self.r).sqrt()
    }

    /// Lateral mirror image: `(y0, psi, v_m, r)` negated.
    pub fn mirrored(&self) -> Self {
        Self {
            x0: self.x0,
            y0: -self.y0,
            psi: wrap_pi(-self.psi),
            u: self.u,
            v_m: -self.v_m,
            r: -self.r,
        }
    }
}

/// Principal dimensions and fluid densities.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShipGeometry {
    pub L_pp: f64,
    pub L_OA: f64,
    pub d: f64,
    pub A_T: f64,
    pub A_L: f64,
    pub rho: f64,
    pub rho_A: f64,
}

impl ShipGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("L_pp", self.L_pp),
            ("L_OA", self.L_OA),
            ("d", self.d),
            ("A_T", self.A_T),
            ("A_L", self.A_L),
            ("rho", self.rho),
            ("rho_A", self.rho_A),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        if self.L_OA < self.L_pp {
            return Err(Error::invalid("L_OA", "must be >= L_pp"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrueWind {
    /// m/s, >= 0
    pub speed: f64,
    /// rad in [0, 2pi), direction the wind blows from
    pub direction: f64,
}

impl TrueWind {
    pub fn new(speed: f64, direction: f64) -> Result<Self> {
        if !(speed.is_finite() && speed >= 0.0) {
            return Err(Error::invalid("wind.speed", "must be finite and >= 0"));
        }
        if !direction.is_finite() {
            return Err(Error::invalid("wind.direction", "must be finite"));
        }
        Ok(Self {
            speed,
            direction: wrap_two_pi(direction),
        })
    }

    pub fn calm() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ApparentWind {
    pub speed: f64,
    /// rad in [0, 2pi), measured clockwise from the bow, 0 = from dead ahead
    pub angle: f64,
}

pub fn resultant_speed(u: f64, v: f64) -> f64 {
    u.hypot(v)
}

/// `beta = -asin(v / U)`, defined as zero when `U < eps`.
pub fn drift_angle(u: f64, v: f64, eps: f64) -> f64 {
    let speed = resultant_speed(u, v);
    if speed < eps {
        return 0.0;
    }
    -(v / speed).clamp(-1.0, 1.0).asin()
}

/// Force scale `rho/2 U^2 L d`.
pub fn force_scale(geom: &ShipGeometry, speed: f64) -> f64 {
    0.5 * geom.rho * speed * speed * geom.L_pp * geom.d
}

/// Moment scale `rho/2 U^2 L^2 d`.
pub fn moment_scale(geom: &ShipGeometry, speed: f64) -> f64 {
    force_scale(geom, speed) * geom.L_pp
}

pub fn nondim_force(force: f64, geom: &ShipGeometry, speed: f64) -> Result<f64> {
    if speed == 0.0 {
        return Err(Error::ZeroReferenceSpeed);
    }
    Ok(force / force_scale(geom, speed))
}

pub fn nondim_moment(moment: f64, geom: &ShipGeometry, speed: f64) -> Result<f64> {
    if speed == 0.0 {
        return Err(Error::ZeroReferenceSpeed);
    }
    Ok(moment / moment_scale(geom, speed))
}

pub fn redim_force(coefficient: f64, geom: &ShipGeometry, speed: f64) -> f64 {
    coefficient * force_scale(geom, speed)
}

pub fn redim_moment(coefficient: f64, geom: &ShipGeometry, speed: f64) -> f64 {
    coefficient * moment_scale(geom, speed)
}

/// `(dx0/dt, dy0/dt, dpsi/dt)` from body velocities.
pub fn body_to_earth_rates(state: &ShipState) -> (f64, f64, f64) {
    let (s, c) = state.psi.sin_cos();
    (state.u * c - state.v_m * s, state.u * s + state.v_m * c, state.r)
}

/// Relative wind seen from the moving ship.
///
/// The air velocity relative to the hull is the true wind velocity minus the
/// ship velocity; it is rotated into the body frame and reported as the
/// direction it comes from.
pub fn apparent_wind(state: &ShipState, wind: &TrueWind) -> ApparentWind {
    let rel = wind.direction - state.psi;
    // "from" vector of the relative wind, body frame
    let ax = wind.speed * rel.cos() + state.u;
    let ay = wind.speed * rel.sin() + state.v_m;
    let speed = ax.hypot(ay);
    let angle = if speed == 0.0 { 0.0 } else { wrap_two_pi(ay.atan2(ax)) };
    ApparentWind { speed, angle }
}

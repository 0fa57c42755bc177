//! The contract every dynamics model implements: `(state, realized input,
//! wind) -> state derivative`.

use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::kinematics::{ShipState, StateRate, TrueWind};

/// Actuator values: rudder angle (rad), propeller revolutions (rps) and bow /
/// stern thruster revolutions (rps).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub delta: f64,
    pub n_p: f64,
    #[serde(default)]
    pub n_bt: f64,
    #[serde(default)]
    pub n_st: f64,
}

impl ControlInput {
    pub fn new(delta: f64, n_p: f64) -> Self {
        Self {
            delta,
            n_p,
            ..Self::default()
        }
    }

    pub fn mirrored(&self) -> Self {
        Self {
            delta: -self.delta,
            n_p: self.n_p,
            n_bt: -self.n_bt,
            n_st: -self.n_st,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.delta.is_finite() && self.n_p.is_finite() && self.n_bt.is_finite() && self.n_st.is_finite()
    }
}

/// Surge force (N), sway force (N) and yaw moment (N m).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Force3 {
    pub x: f64,
    pub y: f64,
    pub n: f64,
}

impl Force3 {
    pub const ZERO: Force3 = Force3 { x: 0.0, y: 0.0, n: 0.0 };

    pub fn new(x: f64, y: f64, n: f64) -> Self {
        Self { x, y, n }
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.n.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.n.is_finite()
    }
}

impl Add for Force3 {
    type Output = Force3;
    fn add(self, o: Force3) -> Force3 {
        Force3::new(self.x + o.x, self.y + o.y, self.n + o.n)
    }
}

impl AddAssign for Force3 {
    fn add_assign(&mut self, o: Force3) {
        *self = *self + o;
    }
}

impl Sub for Force3 {
    type Output = Force3;
    fn sub(self, o: Force3) -> Force3 {
        Force3::new(self.x - o.x, self.y - o.y, self.n - o.n)
    }
}

impl Neg for Force3 {
    type Output = Force3;
    fn neg(self) -> Force3 {
        Force3::new(-self.x, -self.y, -self.n)
    }
}

/// Net right-hand-side force plus, for modular models, the per-component
/// split. Component labels become CSV column suffixes (`X_H`, `Y_H`, ...).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForceBreakdown {
    pub total: Force3,
    pub components: Vec<(&'static str, Force3)>,
}

pub trait ShipModel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Full state derivative in [`ShipState::to_vector`] order.
    fn derivative(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> StateRate;

    fn forces(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> ForceBreakdown;

    /// Labels of the entries in [`ForceBreakdown::components`], in order.
    fn component_labels(&self) -> &'static [&'static str] {
        &[]
    }
}

impl<M: ShipModel + ?Sized> ShipModel for &M {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn derivative(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> StateRate {
        (**self).derivative(state, input, wind)
    }
    fn forces(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> ForceBreakdown {
        (**self).forces(state, input, wind)
    }
    fn component_labels(&self) -> &'static [&'static str] {
        (**self).component_labels()
    }
}

impl<M: ShipModel + ?Sized> ShipModel for Box<M> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn derivative(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> StateRate {
        (**self).derivative(state, input, wind)
    }
    fn forces(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> ForceBreakdown {
        (**self).forces(state, input, wind)
    }
    fn component_labels(&self) -> &'static [&'static str] {
        (**self).component_labels()
    }
}

//! Wind loads from Fourier series in the apparent wind angle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{ApparentWind, ShipGeometry};
use crate::model::Force3;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindCoeffs {
    pub X0: f64,
    pub X1: f64,
    pub X3: f64,
    pub X5: f64,
    pub Y1: f64,
    pub Y3: f64,
    pub Y5: f64,
    pub N1: f64,
    pub N2: f64,
    pub N3: f64,
}

impl WindCoeffs {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.X0, self.X1, self.X3, self.X5, self.Y1, self.Y3, self.Y5, self.N1, self.N2, self.N3,
        ];
        if all.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("wind", "coefficients must be finite"))
        }
    }

    /// `(C_X, C_Y, C_N)` at apparent wind angle `gamma_a`.
    pub fn coefficients(&self, gamma_a: f64) -> (f64, f64, f64) {
        let g = 2.0 * std::f64::consts::PI - gamma_a;
        let cx = self.X0 + self.X1 * g.cos() + self.X3 * (3.0 * g).cos() + self.X5 * (5.0 * g).cos();
        let cy = self.Y1 * g.sin() + self.Y3 * (3.0 * g).sin() + self.Y5 * (5.0 * g).sin();
        let cn = self.N1 * g.sin() + self.N2 * (2.0 * g).sin() + self.N3 * (3.0 * g).sin();
        (cx, cy, cn)
    }
}

pub fn wind_forces(apparent: &ApparentWind, geom: &ShipGeometry, wind: &WindCoeffs) -> Force3 {
    let q = 0.5 * geom.rho_A * apparent.speed * apparent.speed;
    let (cx, cy, cn) = wind.coefficients(apparent.angle);
    Force3::new(q * geom.A_T * cx, q * geom.A_L * cy, q * geom.A_L * geom.L_OA * cn)
}

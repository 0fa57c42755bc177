//! Hull forces with cross-flow drag, valid from open-sea speeds down to
//! harbour manoeuvres and pure rotation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{resultant_speed, ShipGeometry, ShipState};
use crate::model::Force3;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullCoeffs {
    /// ahead resistance coefficient, negative
    pub X0F: f64,
    /// astern resistance coefficient, negative
    pub X0A: f64,
    pub X_vr: f64,
    pub Y_v: f64,
    pub Y_r: f64,
    pub N_v: f64,
    pub N_r: f64,
    /// cross-flow drag coefficient
    pub C_D: f64,
    pub C_rY: f64,
    pub C_rN: f64,
}

impl HullCoeffs {
    pub fn validate(&self) -> Result<()> {
        if !(self.X0F < 0.0) {
            return Err(Error::invalid("hull.X0F", "resistance coefficient must be < 0"));
        }
        if !(self.X0A < 0.0) {
            return Err(Error::invalid("hull.X0A", "resistance coefficient must be < 0"));
        }
        if !(self.C_D >= 0.0) {
            return Err(Error::invalid("hull.C_D", "must be >= 0"));
        }
        Ok(())
    }
}

/// Cross-flow integrals over `x in [-L/2, L/2]`:
///
/// `I_Y = int |v + c r x| (v + c r x) dx`, `I_N = int |v + c r x| (v + c r x) x dx`.
///
/// When the local lateral velocity keeps one sign along the hull the
/// integrand is a signed polynomial; otherwise the span is split at the
/// zero crossing `x* = -v / (c r)` and each side is integrated exactly.
pub fn crossflow_integrals(v_m: f64, r: f64, c_r: f64, l_pp: f64) -> (f64, f64) {
    let a = v_m;
    let b = c_r * r;
    let half = 0.5 * l_pp;
    if b.abs() * half <= a.abs() {
        // no sign change inside the span (or exactly at an end)
        let s = if a >= 0.0 { 1.0 } else { -1.0 };
        let l3 = l_pp * l_pp * l_pp;
        let iy = s * (a * a * l_pp + b * b * l3 / 12.0);
        let i_n = s * a * b * l3 / 6.0;
        return (iy, i_n);
    }
    // Antiderivatives in w = a + b x, smooth through w = 0:
    //   int |w| w dx           = |w| w^2 / (3b)
    //   int |w| w x dx         = (|w| w^3 / 4 - a |w| w^2 / 3) / b^2
    let w1 = a - b * half;
    let w2 = a + b * half;
    let fy = |w: f64| w.abs() * w * w / (3.0 * b);
    let fn_ = |w: f64| (w.abs() * w * w * w / 4.0 - a * w.abs() * w * w / 3.0) / (b * b);
    (fy(w2) - fy(w1), fn_(w2) - fn_(w1))
}

/// Blend angle for the ahead/astern resistance: `0` running ahead, `pi`
/// running astern.
pub fn resistance_blend_angle(u: f64, v_m: f64) -> f64 {
    if u == 0.0 && v_m == 0.0 {
        return 0.0;
    }
    v_m.atan2(u).abs()
}

pub fn hull_forces(state: &ShipState, geom: &ShipGeometry, hull: &HullCoeffs) -> Force3 {
    let (u, v, r) = (state.u, state.v_m, state.r);
    let l = geom.L_pp;
    let q = 0.5 * geom.rho * l * geom.d;
    let speed = resultant_speed(u, v);
    let beta_x = resistance_blend_angle(u, v);

    let x0 = hull.X0F + (hull.X0A - hull.X0F) * (beta_x / PI);
    let x = q * (x0 * u * speed + hull.X_vr * l * v * r);

    let (iy, _) = crossflow_integrals(v, r, hull.C_rY, l);
    let y = q * (hull.Y_v * v * u.abs() + hull.Y_r * l * r * u - (hull.C_D / l) * iy);

    let (_, i_n) = crossflow_integrals(v, r, hull.C_rN, l);
    let n = q * l * (hull.N_v * v * u + hull.N_r * l * r * u.abs() - (hull.C_D / (l * l)) * i_n);

    Force3::new(x, y, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> ShipGeometry {
        ShipGeometry {
            L_pp: 3.0,
            L_OA: 3.2,
            d: 0.2,
            A_T: 0.3,
            A_L: 1.0,
            rho: 1000.0,
            rho_A: 1.225,
        }
    }

    fn hull() -> HullCoeffs {
        HullCoeffs {
            X0F: -0.03,
            X0A: -0.05,
            X_vr: 0.1,
            Y_v: -0.3,
            Y_r: 0.08,
            N_v: -0.1,
            N_r: -0.05,
            C_D: 0.6,
            C_rY: 1.0,
            C_rN: 0.9,
        }
    }

    #[test]
    fn pure_surge_is_resistance_only() {
        let g = geom();
        let h = hull();
        let f = hull_forces(&ShipState::with_velocity(0.8, 0.0, 0.0), &g, &h);
        let expected = 0.5 * g.rho * g.L_pp * g.d * h.X0F * 0.64;
        assert!((f.x - expected).abs() < 1e-12 * expected.abs());
        assert_eq!((f.y, f.n), (0.0, 0.0));

        let f = hull_forces(&ShipState::with_velocity(-0.8, 0.0, 0.0), &g, &h);
        let expected = 0.5 * g.rho * g.L_pp * g.d * h.X0A * -0.64;
        assert!((f.x - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn pure_sway_crossflow_collapse() {
        let g = geom();
        let h = HullCoeffs {
            Y_v: 0.0,
            N_v: 0.0,
            ..hull()
        };
        let v = -0.3;
        let f = hull_forces(&ShipState::with_velocity(0.0, v, 0.0), &g, &h);
        let expected = -0.5 * g.rho * g.L_pp * g.d * h.C_D * v.abs() * v;
        assert!((f.y - expected).abs() < 1e-12 * expected.abs());
        assert_eq!(f.n, 0.0);
    }

    #[test]
    fn crossflow_special_cases() {
        let (iy, i_n) = crossflow_integrals(0.4, 0.0, 1.0, 10.0);
        assert!((iy - 1.6).abs() < 1e-14 && i_n == 0.0);

        let (l, c, r) = (10.0f64, 0.8, -0.05);
        let (iy, i_n) = crossflow_integrals(0.0, r, c, l);
        assert!(iy.abs() < 1e-15);
        let expected = c * c * r * r * r.signum() * l.powi(4) / 32.0;
        assert!((i_n - expected).abs() < 1e-14 * expected.abs());
    }

    #[test]
    fn resistance_opposes_motion() {
        let g = geom();
        let h = hull();
        for u in [-1.0, -0.1, 0.1, 1.0] {
            let f = hull_forces(&ShipState::with_velocity(u, 0.0, 0.0), &g, &h);
            assert!(f.x * u < 0.0);
        }
        for v in [-1.0, -0.1, 0.1, 1.0] {
            let f = hull_forces(&ShipState::with_velocity(0.0, v, 0.0), &g, &h);
            assert!(f.y * v < 0.0);
        }
        for r in [-0.3, -0.01, 0.01, 0.3] {
            let f = hull_forces(&ShipState::with_velocity(0.0, 0.0, r), &g, &h);
            assert!(f.n * r < 0.0);
        }
    }

    #[test]
    fn sign_validation() {
        assert!(hull().validate().is_ok());
        let h = HullCoeffs { X0F: 0.01, ..hull() };
        assert!(h.validate().is_err());
        let h = HullCoeffs { X0A: 0.0, ..hull() };
        assert!(h.validate().is_err());
        let h = HullCoeffs { C_D: -0.1, ..hull() };
        assert!(h.validate().is_err());
    }
}

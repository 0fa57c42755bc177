//! Rudder normal force with quadrant-dependent inflow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{ShipGeometry, ShipState};
use crate::model::Force3;

use super::propeller::{propeller_quadrant, thrust_loading, wake_fraction, PropellerParams, PropellerQuadrant};

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RudderParams {
    pub A_R: f64,
    pub H_R: f64,
    pub lambda: f64,
    pub x_R: f64,
    pub t_R: f64,
    pub a_H: f64,
    pub x_H: f64,
    pub epsilon: f64,
    pub kappa_x: f64,
    pub gamma_P: f64,
    pub gamma_N: f64,
    pub l_R: f64,
    pub k_xPR: f64,
    pub C_PR: f64,
}

impl RudderParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rudder.A_R", self.A_R),
            ("rudder.H_R", self.H_R),
            ("rudder.lambda", self.lambda),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be > 0"));
            }
        }
        Ok(())
    }

    /// Propeller diameter over rudder height.
    pub fn eta(&self, prop: &PropellerParams) -> f64 {
        prop.D_p / self.H_R
    }
}

pub fn fujii_lift_gradient(lambda: f64) -> f64 {
    6.13 * lambda / (2.25 + lambda)
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RudderInflow {
    pub u_R: f64,
    pub v_R: f64,
    pub U_R: f64,
    pub alpha_R: f64,
}

fn signed_square(x: f64) -> f64 {
    x.abs() * x
}

/// Longitudinal inflow for non-negative propeller revolutions.
fn momentum_inflow(u_p: f64, n_p: f64, k_t: f64, eta: f64, rudder: &RudderParams, prop: &PropellerParams) -> f64 {
    let eps = rudder.epsilon;
    let loading = 8.0 * k_t * (n_p * prop.D_p).powi(2) / PI;
    let jet = (u_p * u_p + loading).max(0.0).sqrt();
    let accelerated = u_p + rudder.kappa_x / eps * (jet - u_p);
    eps * (eta * accelerated * accelerated + (1.0 - eta) * u_p * u_p).sqrt()
}

pub fn rudder_inflow(
    state: &ShipState,
    n_p: f64,
    delta: f64,
    geom: &ShipGeometry,
    prop: &PropellerParams,
    rudder: &RudderParams,
) -> RudderInflow {
    let (u, v, r) = (state.u, state.v_m, state.r);
    let gamma = if v + rudder.x_R * r >= 0.0 {
        rudder.gamma_P
    } else {
        rudder.gamma_N
    };
    let v_r = -gamma * (v + rudder.l_R * r);

    let eta = rudder.eta(prop);
    let w_p = wake_fraction(state, prop, geom.L_pp);
    let (_, k_t) = thrust_loading(state, n_p, prop, geom.L_pp);
    let u_r = match propeller_quadrant(u, n_p) {
        PropellerQuadrant::First | PropellerQuadrant::Second | PropellerQuadrant::Idle => {
            momentum_inflow((1.0 - w_p) * u, n_p, k_t, eta, rudder, prop)
        }
        PropellerQuadrant::Third => {
            let base = u * rudder.epsilon * (1.0 - w_p);
            let jet = base + n_p * prop.D_p * rudder.k_xPR * (8.0 * k_t.abs() / PI).sqrt();
            let sq = eta * signed_square(jet) + (1.0 - eta) * signed_square(base) + rudder.C_PR * u;
            sq.signum() * sq.abs().sqrt()
        }
        PropellerQuadrant::Fourth => u,
    };

    let speed = u_r.hypot(v_r);
    RudderInflow {
        u_R: u_r,
        v_R: v_r,
        U_R: speed,
        alpha_R: delta - v_r.atan2(u_r),
    }
}

pub fn rudder_forces(
    state: &ShipState,
    n_p: f64,
    delta: f64,
    geom: &ShipGeometry,
    prop: &PropellerParams,
    rudder: &RudderParams,
) -> Force3 {
    let inflow = rudder_inflow(state, n_p, delta, geom, prop, rudder);
    let f_n = 0.5
        * geom.rho
        * rudder.A_R
        * inflow.U_R
        * inflow.U_R
        * fujii_lift_gradient(rudder.lambda)
        * inflow.alpha_R.sin();
    let (s, c) = delta.sin_cos();
    Force3::new(
        -(1.0 - rudder.t_R) * f_n * s,
        -(1.0 + rudder.a_H) * f_n * c,
        -(rudder.x_R + rudder.a_H * rudder.x_H) * f_n * c,
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::super::propeller::tests::sample_propeller;
    use super::*;

    pub(crate) fn sample_rudder() -> RudderParams {
        RudderParams {
            A_R: 0.02,
            H_R: 0.15,
            lambda: 1.5,
            x_R: -1.5,
            t_R: 0.3,
            a_H: 0.2,
            x_H: -1.3,
            epsilon: 1.1,
            kappa_x: 0.6,
            gamma_P: 0.45,
            gamma_N: 0.45,
            l_R: -1.0,
            k_xPR: 0.6,
            C_PR: 0.1,
        }
    }

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

    #[test]
    fn fujii_examples() {
        assert!((fujii_lift_gradient(2.25) - 3.065).abs() < 1e-12);
        assert_eq!(fujii_lift_gradient(0.0), 0.0);
        assert!((fujii_lift_gradient(1e9) - 6.13).abs() < 1e-7);
        let mut prev = 0.0;
        for i in 1..100 {
            let f = fujii_lift_gradient(i as f64 * 0.1);
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn idle_propeller_inflow_collapses() {
        let p = sample_propeller();
        let rd = sample_rudder();
        let s = ShipState::with_velocity(0.7, 0.0, 0.0);
        let inflow = rudder_inflow(&s, 0.0, 0.1, &geom(), &p, &rd);
        let u_p = (1.0 - p.w_p0) * 0.7;
        assert!((inflow.u_R - rd.epsilon * u_p).abs() < 1e-14);
        assert_eq!(inflow.v_R, 0.0);
        assert!((inflow.alpha_R - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fourth_quadrant_inflow_is_ship_speed() {
        let inflow = rudder_inflow(
            &ShipState::with_velocity(-0.4, 0.05, 0.01),
            -8.0,
            0.2,
            &geom(),
            &sample_propeller(),
            &sample_rudder(),
        );
        assert_eq!(inflow.u_R, -0.4);
    }

    #[test]
    fn third_quadrant_kitagawa() {
        let p = sample_propeller();
        let rd = sample_rudder();
        let g = geom();
        let s = ShipState::with_velocity(0.5, 0.0, 0.0);
        let n = -6.0;
        let inflow = rudder_inflow(&s, n, 0.0, &g, &p, &rd);
        let j = (1.0 - p.w_p0) * 0.5 / (n * p.D_p);
        let kt = p.k0 + p.k1 * j + p.k2 * j * j;
        let u1 = 0.5 * rd.epsilon * (1.0 - p.w_p0) + n * p.D_p * rd.k_xPR * (8.0 * kt.abs() / PI).sqrt();
        let u2 = 0.5 * rd.epsilon * (1.0 - p.w_p0);
        let eta = p.D_p / rd.H_R;
        let sq = eta * u1.signum() * u1 * u1 + (1.0 - eta) * u2.signum() * u2 * u2 + rd.C_PR * 0.5;
        assert!((inflow.u_R - sq.signum() * sq.abs().sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_normal_force_cases() {
        let p = sample_propeller();
        let rd = sample_rudder();
        let g = geom();
        let f = rudder_forces(&ShipState::with_velocity(0.5, 0.0, 0.0), 10.0, 0.0, &g, &p, &rd);
        assert_eq!(f, Force3::ZERO);
        let f = rudder_forces(&ShipState::with_velocity(0.0, 0.0, 0.0), 0.0, 0.3, &g, &p, &rd);
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn mirrored_inflow_parity() {
        let p = sample_propeller();
        let rd = sample_rudder();
        let g = geom();
        for (u, v, r, n, d) in [
            (0.5, 0.1, 0.02, 10.0, 0.2),
            (0.2, -0.05, 0.1, -5.0, -0.3),
            (-0.3, 0.02, -0.05, 6.0, 0.5),
        ] {
            let a = rudder_forces(&ShipState::with_velocity(u, v, r), n, d, &g, &p, &rd);
            let b = rudder_forces(&ShipState::with_velocity(u, -v, -r), n, -d, &g, &p, &rd);
            assert!((a.x - b.x).abs() <= 1e-14 * a.max_abs());
            assert!((a.y + b.y).abs() <= 1e-14 * a.max_abs());
            assert!((a.n + b.n).abs() <= 1e-14 * a.max_abs());
        }
    }

    #[test]
    fn positive_rudder_turns_starboard() {
        let f = rudder_forces(
            &ShipState::with_velocity(0.5, 0.0, 0.0),
            10.0,
            0.3,
            &geom(),
            &sample_propeller(),
            &sample_rudder(),
        );
        assert!(f.n > 0.0);
        assert!(f.x < 0.0);
    }
}

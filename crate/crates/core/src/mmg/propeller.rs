//! Four-quadrant propeller forces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{resultant_speed, ShipGeometry, ShipState};
use crate::model::Force3;

/// Below this revolution rate (rps) the propeller is treated as stopped.
pub const IDLE_RPS: f64 = 1e-6;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerParams {
    pub D_p: f64,
    pub P: f64,
    pub t_p0: f64,
    pub w_p0: f64,
    pub tau: f64,
    /// non-dimensional
    pub C_p: f64,
    /// non-dimensional, position over `L_pp`
    pub x_p: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub A1: f64,
    pub A2: f64,
    pub A3: f64,
    pub A4: f64,
    pub A5: f64,
    pub A6: f64,
    pub A7: f64,
    pub A8: f64,
    pub B1: f64,
    pub B2: f64,
    pub B3: f64,
    pub B4: f64,
    pub B5: f64,
    pub B6: f64,
    pub B7: f64,
    pub B8: f64,
    pub C3: f64,
    pub C6: f64,
    pub C7: f64,
    pub C10: f64,
}

impl PropellerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.D_p > 0.0) {
            return Err(Error::invalid("propeller.D_p", "must be > 0"));
        }
        if !(self.P > 0.0) {
            return Err(Error::invalid("propeller.P", "must be > 0"));
        }
        if !(0.0..1.0).contains(&self.w_p0) {
            return Err(Error::invalid("propeller.w_p0", "must be in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.t_p0) {
            return Err(Error::invalid("propeller.t_p0", "must be in [0, 1)"));
        }
        Ok(())
    }

    /// Thrust coefficient polynomial.
    pub fn k_t(&self, j: f64) -> f64 {
        self.k0 + (self.k1 + self.k2 * j) * j
    }

    /// Copy with every lateral force/moment coefficient zeroed.
    pub fn without_lateral(mut self) -> Self {
        for c in [
            &mut self.A1,
            &mut self.A2,
            &mut self.A3,
            &mut self.A4,
            &mut self.A5,
            &mut self.A6,
            &mut self.A7,
            &mut self.A8,
            &mut self.B1,
            &mut self.B2,
            &mut self.B3,
            &mut self.B4,
            &mut self.B5,
            &mut self.B6,
            &mut self.B7,
            &mut self.B8,
        ] {
            *c = 0.0;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropellerQuadrant {
    /// `u >= 0`, `n > 0`
    First,
    /// `u < 0`, `n > 0`
    Second,
    /// `u >= 0`, `n < 0`
    Third,
    /// `u < 0`, `n < 0`
    Fourth,
    /// `|n| < IDLE_RPS`
    Idle,
}

pub fn propeller_quadrant(u: f64, n_p: f64) -> PropellerQuadrant {
    use PropellerQuadrant::*;
    if n_p.abs() < IDLE_RPS {
        Idle
    } else if n_p > 0.0 {
        if u >= 0.0 {
            First
        } else {
            Second
        }
    } else if u >= 0.0 {
        Third
    } else {
        Fourth
    }
}

/// Effective wake fraction at the propeller.
///
/// The result is kept non-negative so the propeller inflow never exceeds the
/// ship speed; without the floor the sway/yaw terms grow without bound as
/// `U -> 0` during pure rotation.
pub fn wake_fraction(state: &ShipState, prop: &PropellerParams, l_pp: f64) -> f64 {
    if state.u < 0.0 {
        return 0.0;
    }
    let speed = resultant_speed(state.u, state.v_m);
    if speed == 0.0 {
        return prop.w_p0;
    }
    let s = (state.v_m + prop.x_p * l_pp * state.r) / speed;
    let w = prop.w_p0 - prop.tau * s.abs() - prop.C_p * s * s;
    w.max(0.0)
}

/// Thrust deduction: constant ahead, zero when reversing.
pub fn thrust_deduction(n_p: f64, prop: &PropellerParams) -> f64 {
    if n_p < 0.0 {
        0.0
    } else {
        prop.t_p0
    }
}

/// Advance ratio `J_p` and thrust coefficient at the current state.
pub fn thrust_loading(state: &ShipState, n_p: f64, prop: &PropellerParams, l_pp: f64) -> (f64, f64) {
    if n_p.abs() < IDLE_RPS {
        return (0.0, 0.0);
    }
    let w_p = wake_fraction(state, prop, l_pp);
    let j_p = (1.0 - w_p) * state.u / (n_p * prop.D_p);
    (j_p, prop.k_t(j_p))
}

fn reversal_lateral(j_s: f64, c: [f64; 5]) -> f64 {
    let [c1, c2, c3, c4, c5] = c;
    if j_s < -0.35 {
        c3 + c4 * j_s
    } else if j_s <= -0.06 {
        c1 + c2 * j_s
    } else {
        c5
    }
}

pub fn propeller_forces(state: &ShipState, n_p: f64, geom: &ShipGeometry, prop: &PropellerParams) -> Force3 {
    use PropellerQuadrant::*;
    let quadrant = propeller_quadrant(state.u, n_p);
    if quadrant == Idle {
        return Force3::ZERO;
    }
    let rho = geom.rho;
    let (l, d) = (geom.L_pp, geom.d);
    let dp = prop.D_p;
    let j_s = state.u / (n_p * dp);
    let n2d4 = rho * n_p * n_p * dp.powi(4);

    match quadrant {
        First | Second => {
            let (_, k_t) = thrust_loading(state, n_p, prop, l);
            let x = n2d4 * (1.0 - thrust_deduction(n_p, prop)) * k_t;
            if quadrant == First {
                return Force3::new(x, 0.0, 0.0);
            }
            let q = 0.5 * rho * l * l * d * (n_p * prop.P).powi(2);
            let y = q * ((prop.A6 * j_s + prop.A7) * j_s + prop.A8);
            let n = q * ((prop.B6 * j_s + prop.B7) * j_s + prop.B8);
            Force3::new(x, y, n)
        }
        Third | Fourth => {
            let c = if j_s >= prop.C10 {
                prop.C6 + prop.C7 * j_s
            } else {
                prop.C3
            };
            let q = 0.5 * rho * l * d * (n_p * dp).powi(2);
            let y = q * reversal_lateral(j_s, [prop.A1, prop.A2, prop.A3, prop.A4, prop.A5]);
            let n = q * l * reversal_lateral(j_s, [prop.B1, prop.B2, prop.B3, prop.B4, prop.B5]);
            Force3::new(n2d4 * c, y, n)
        }
        Idle => unreachable!(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn sample_propeller() -> PropellerParams {
        PropellerParams {
            D_p: 0.1,
            P: 0.07,
            t_p0: 0.2,
            w_p0: 0.3,
            tau: 0.4,
            C_p: 0.2,
            x_p: -0.45,
            k0: 0.33,
            k1: -0.28,
            k2: -0.1,
            A1: 0.001,
            A2: 0.002,
            A3: -0.001,
            A4: 0.003,
            A5: 0.0005,
            A6: 0.01,
            A7: -0.02,
            A8: 0.003,
            B1: -0.0005,
            B2: 0.001,
            B3: 0.0007,
            B4: -0.001,
            B5: -0.0002,
            B6: -0.004,
            B7: 0.008,
            B8: -0.001,
            C3: -0.35,
            C6: -0.4,
            C7: 0.3,
            C10: 0.0,
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
    fn quadrant_examples() {
        assert_eq!(propeller_quadrant(2.0, 10.0), PropellerQuadrant::First);
        assert_eq!(propeller_quadrant(-0.5, -5.0), PropellerQuadrant::Fourth);
        assert_eq!(propeller_quadrant(0.0, 3.0), PropellerQuadrant::First);
        assert_eq!(propeller_quadrant(-0.1, 3.0), PropellerQuadrant::Second);
        assert_eq!(propeller_quadrant(0.0, -3.0), PropellerQuadrant::Third);
        assert_eq!(propeller_quadrant(1.0, 0.0), PropellerQuadrant::Idle);
    }

    #[test]
    fn wake_examples() {
        let p = sample_propeller();
        assert_eq!(wake_fraction(&ShipState::with_velocity(1.0, 0.0, 0.0), &p, 3.0), p.w_p0);
        assert_eq!(wake_fraction(&ShipState::with_velocity(-1.0, 0.2, 0.1), &p, 3.0), 0.0);
        assert_eq!(wake_fraction(&ShipState::with_velocity(0.0, 0.0, 0.1), &p, 3.0), p.w_p0);
        let w = wake_fraction(&ShipState::with_velocity(1.0, 0.1, 0.0), &p, 3.0);
        let s = 0.1 / 1.01f64.sqrt();
        assert!((w - (p.w_p0 - p.tau * s - p.C_p * s * s)).abs() < 1e-15);
    }

    #[test]
    fn force_examples() {
        let p = sample_propeller();
        let g = geom();
        assert_eq!(
            propeller_forces(&ShipState::with_velocity(0.5, 0.1, 0.0), 0.0, &g, &p),
            Force3::ZERO
        );

        let f = propeller_forces(&ShipState::with_velocity(0.5, 0.1, 0.05), 12.0, &g, &p);
        assert_eq!((f.y, f.n), (0.0, 0.0));
        assert!(f.x > 0.0);

        // third quadrant with J_s < C10
        let n = -10.0;
        let f = propeller_forces(&ShipState::with_velocity(0.4, 0.0, 0.0), n, &g, &p);
        let expected = g.rho * n * n * p.D_p.powi(4) * p.C3;
        assert!((f.x - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn reversal_branches() {
        assert_eq!(reversal_lateral(-0.2, [1.0, 2.0, 3.0, 4.0, 5.0]), 1.0 + 2.0 * -0.2);
        assert_eq!(reversal_lateral(-0.5, [1.0, 2.0, 3.0, 4.0, 5.0]), 3.0 + 4.0 * -0.5);
        assert_eq!(reversal_lateral(0.1, [1.0, 2.0, 3.0, 4.0, 5.0]), 5.0);
        assert_eq!(reversal_lateral(-0.35, [1.0, 2.0, 3.0, 4.0, 5.0]), 1.0 + 2.0 * -0.35);
        assert_eq!(reversal_lateral(-0.06, [1.0, 2.0, 3.0, 4.0, 5.0]), 1.0 + 2.0 * -0.06);
    }

    #[test]
    fn validation() {
        assert!(sample_propeller().validate().is_ok());
        assert!(PropellerParams {
            D_p: 0.0,
            ..sample_propeller()
        }
        .validate()
        .is_err());
        assert!(PropellerParams {
            w_p0: 1.0,
            ..sample_propeller()
        }
        .validate()
        .is_err());
        assert!(PropellerParams {
            t_p0: -0.1,
            ..sample_propeller()
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn dispatch_is_total(u in -5.0f64..5.0, n in -30.0f64..30.0) {
            let p = sample_propeller();
            let f = propeller_forces(&ShipState::with_velocity(u, 0.1, 0.02), n, &geom(), &p);
            prop_assert!(f.is_finite());
        }

        /// At rest the advance ratios vanish and every branch is a pure
        /// `n^2` law.
        #[test]
        fn quadratic_in_n_at_rest(n in -1e-2f64..1e-2) {
            let p = sample_propeller();
            let g = geom();
            let f = propeller_forces(&ShipState::with_velocity(0.0, 0.0, 0.0), n, &g, &p);
            let k = g.rho * p.D_p.powi(4) * 1.0
                + 0.5 * g.rho * g.L_pp.powi(2) * g.d * (p.P.powi(2) + p.D_p.powi(2)) * 1.0;
            prop_assert!(f.max_abs() <= k * n * n);
        }

        /// With the quadratic thrust and second-quadrant terms removed the
        /// forces vanish continuously as `n -> 0` at any speed.
        #[test]
        fn continuous_at_zero_revolutions(u in -2.0f64..2.0, n in -1e-3f64..1e-3) {
            let p = PropellerParams { k2: 0.0, A6: 0.0, B6: 0.0, ..sample_propeller() };
            let g = geom();
            let f = propeller_forces(&ShipState::with_velocity(u, 0.0, 0.0), n, &g, &p);
            let k = 1e6;
            prop_assert!(f.max_abs() <= k * n.abs());
        }
    }
}

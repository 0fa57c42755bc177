//! Third-order whole-ship polynomial model expanded about straight running
//! at speed `U`.
//!
//! Monomials follow the systematic third-order pattern: `X_rd` multiplies
//! `r delta`, `X_rdu` multiplies `r delta du`, `Y_ru` multiplies `r du`, and
//! `Y_vrr` / `Y_rvv` are the distinct monomials `v r^2` / `r v^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{body_to_earth_rates, ShipState, StateRate, TrueWind};
use crate::model::{ControlInput, Force3, ForceBreakdown, ShipModel};

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbkowitzCoefficients {
    /// expansion speed, m/s
    pub U: f64,
    pub m: f64,
    pub x_G: f64,
    pub I_z: f64,
    pub X_udot: f64,
    pub Y_vdot: f64,
    pub Y_rdot: f64,
    pub N_vdot: f64,
    pub N_rdot: f64,

    #[serde(default)]
    pub X_star: f64,
    #[serde(default)]
    pub X_u: f64,
    #[serde(default)]
    pub X_uu: f64,
    #[serde(default)]
    pub X_uuu: f64,
    #[serde(default)]
    pub X_vv: f64,
    #[serde(default)]
    pub X_rr: f64,
    #[serde(default)]
    pub X_dd: f64,
    #[serde(default)]
    pub X_vvu: f64,
    #[serde(default)]
    pub X_rru: f64,
    #[serde(default)]
    pub X_ddu: f64,
    #[serde(default)]
    pub X_vr: f64,
    #[serde(default)]
    pub X_vd: f64,
    #[serde(default)]
    pub X_rd: f64,
    #[serde(default)]
    pub X_vru: f64,
    #[serde(default)]
    pub X_vdu: f64,
    #[serde(default)]
    pub X_rdu: f64,

    #[serde(default)]
    pub Y_star: f64,
    #[serde(default)]
    pub Y_star_u: f64,
    #[serde(default)]
    pub Y_star_uu: f64,
    #[serde(default)]
    pub Y_v: f64,
    #[serde(default)]
    pub Y_vvv: f64,
    #[serde(default)]
    pub Y_vrr: f64,
    #[serde(default)]
    pub Y_vdd: f64,
    #[serde(default)]
    pub Y_vu: f64,
    #[serde(default)]
    pub Y_vuu: f64,
    #[serde(default)]
    pub Y_r: f64,
    #[serde(default)]
    pub Y_rrr: f64,
    #[serde(default)]
    pub Y_rvv: f64,
    #[serde(default)]
    pub Y_rdd: f64,
    #[serde(default)]
    pub Y_ru: f64,
    #[serde(default)]
    pub Y_ruu: f64,
    #[serde(default)]
    pub Y_d: f64,
    #[serde(default)]
    pub Y_ddd: f64,
    #[serde(default)]
    pub Y_dvv: f64,
    #[serde(default)]
    pub Y_drr: f64,
    #[serde(default)]
    pub Y_du: f64,
    #[serde(default)]
    pub Y_duu: f64,
    #[serde(default)]
    pub Y_vrd: f64,

    #[serde(default)]
    pub N_star: f64,
    #[serde(default)]
    pub N_star_u: f64,
    #[serde(default)]
    pub N_star_uu: f64,
    #[serde(default)]
    pub N_v: f64,
    #[serde(default)]
    pub N_vvv: f64,
    #[serde(default)]
    pub N_vrr: f64,
    #[serde(default)]
    pub N_vdd: f64,
    #[serde(default)]
    pub N_vu: f64,
    #[serde(default)]
    pub N_vuu: f64,
    #[serde(default)]
    pub N_r: f64,
    #[serde(default)]
    pub N_rrr: f64,
    #[serde(default)]
    pub N_rvv: f64,
    #[serde(default)]
    pub N_rdd: f64,
    #[serde(default)]
    pub N_ru: f64,
    #[serde(default)]
    pub N_ruu: f64,
    #[serde(default)]
    pub N_d: f64,
    #[serde(default)]
    pub N_ddd: f64,
    #[serde(default)]
    pub N_dvv: f64,
    #[serde(default)]
    pub N_drr: f64,
    #[serde(default)]
    pub N_du: f64,
    #[serde(default)]
    pub N_duu: f64,
    #[serde(default)]
    pub N_vrd: f64,
}

/// Perturbation state about the expansion point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AbkowitzState {
    pub du: f64,
    pub v: f64,
    pub r: f64,
    pub delta: f64,
}

impl AbkowitzCoefficients {
    pub fn surge_mass(&self) -> f64 {
        self.m - self.X_udot
    }

    /// Determinant of the coupled sway/yaw acceleration block.
    pub fn lateral_determinant(&self) -> f64 {
        let mxg = self.m * self.x_G;
        (self.m - self.Y_vdot) * (self.I_z - self.N_rdot) - (mxg - self.N_vdot) * (mxg - self.Y_rdot)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.U.is_finite() && self.U > 0.0) {
            return Err(Error::invalid("abkowitz.U", "must be > 0"));
        }
        if self.surge_mass() == 0.0 || !self.surge_mass().is_finite() {
            return Err(Error::SingularMassMatrix("m - X_udot = 0".into()));
        }
        let det = self.lateral_determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMassMatrix("sway/yaw determinant is zero".into()));
        }
        Ok(())
    }

    /// Zero every coefficient that breaks port/starboard symmetry.
    pub fn laterally_symmetric(mut self) -> Self {
        self.X_vd = 0.0;
        self.X_rd = 0.0;
        self.X_vdu = 0.0;
        self.X_rdu = 0.0;
        self.Y_star = 0.0;
        self.Y_star_u = 0.0;
        self.Y_star_uu = 0.0;
        self.N_star = 0.0;
        self.N_star_u = 0.0;
        self.N_star_uu = 0.0;
        self
    }
}

/// The three force polynomials `(f1, f2, f3)`.
pub fn abkowitz_forces(s: &AbkowitzState, c: &AbkowitzCoefficients) -> (f64, f64, f64) {
    let AbkowitzState { du, v, r, delta: d } = *s;
    let u = c.U + du;
    let (du2, v2, r2, d2) = (du * du, v * v, r * r, d * d);

    let f1 = c.X_star
        + c.X_u * du
        + c.X_uu * du2
        + c.X_uuu * du2 * du
        + c.X_vv * v2
        + (c.X_rr + c.m * c.x_G) * r2
        + c.X_dd * d2
        + c.X_vvu * v2 * du
        + c.X_rru * r2 * du
        + c.X_ddu * d2 * du
        + (c.X_vr + c.m) * v * r
        + c.X_vd * v * d
        + c.X_rd * r * d
        + c.X_vru * v * r * du
        + c.X_vdu * v * d * du
        + c.X_rdu * r * d * du;

    let f2 = c.Y_star
        + c.Y_star_u * du
        + c.Y_star_uu * du2
        + c.Y_v * v
        + c.Y_vvv * v2 * v
        + c.Y_vrr * v * r2
        + c.Y_vdd * v * d2
        + c.Y_vu * v * du
        + c.Y_vuu * v * du2
        + (c.Y_r - c.m * u) * r
        + c.Y_rrr * r2 * r
        + c.Y_rvv * r * v2
        + c.Y_rdd * r * d2
        + c.Y_ru * r * du
        + c.Y_ruu * r * du2
        + c.Y_d * d
        + c.Y_ddd * d2 * d
        + c.Y_dvv * d * v2
        + c.Y_drr * d * r2
        + c.Y_du * d * du
        + c.Y_duu * d * du2
        + c.Y_vrd * v * r * d;

    let f3 = c.N_star
        + c.N_star_u * du
        + c.N_star_uu * du2
        + c.N_v * v
        + c.N_vvv * v2 * v
        + c.N_vrr * v * r2
        + c.N_vdd * v * d2
        + c.N_vu * v * du
        + c.N_vuu * v * du2
        + (c.N_r - c.m * c.x_G * u) * r
        + c.N_rrr * r2 * r
        + c.N_rvv * r * v2
        + c.N_rdd * r * d2
        + c.N_ru * r * du
        + c.N_ruu * r * du2
        + c.N_d * d
        + c.N_ddd * d2 * d
        + c.N_dvv * d * v2
        + c.N_drr * d * r2
        + c.N_du * d * du
        + c.N_duu * d * du2
        + c.N_vrd * v * r * d;

    (f1, f2, f3)
}

/// `(du/dt, dv/dt, dr/dt)` from the solved acceleration form.
pub fn abkowitz_accelerations(s: &AbkowitzState, c: &AbkowitzCoefficients) -> (f64, f64, f64) {
    let (f1, f2, f3) = abkowitz_forces(s, c);
    accelerations_from_forces(f1, f2, f3, c)
}

fn accelerations_from_forces(f1: f64, f2: f64, f3: f64, c: &AbkowitzCoefficients) -> (f64, f64, f64) {
    let mxg = c.m * c.x_G;
    let det = c.lateral_determinant();
    let udot = f1 / c.surge_mass();
    let vdot = ((c.I_z - c.N_rdot) * f2 - (mxg - c.Y_rdot) * f3) / det;
    let rdot = ((c.m - c.Y_vdot) * f3 - (mxg - c.N_vdot) * f2) / det;
    (udot, vdot, rdot)
}

#[derive(Debug, Clone)]
pub struct AbkowitzModel {
    coeffs: AbkowitzCoefficients,
}

impl AbkowitzModel {
    pub fn new(coeffs: AbkowitzCoefficients) -> Result<Self> {
        coeffs.validate()?;
        Ok(Self { coeffs })
    }

    pub fn coefficients(&self) -> &AbkowitzCoefficients {
        &self.coeffs
    }

    fn perturbation(&self, state: &ShipState, delta: f64) -> AbkowitzState {
        AbkowitzState {
            du: state.u - self.coeffs.U,
            v: state.v_m,
            r: state.r,
            delta,
        }
    }
}

/// Full-state derivative with `du = u - U`.
pub fn abkowitz_derivative(state: &ShipState, delta: f64, coeffs: &AbkowitzCoefficients) -> StateRate {
    let s = AbkowitzState {
        du: state.u - coeffs.U,
        v: state.v_m,
        r: state.r,
        delta,
    };
    let (udot, vdot, rdot) = abkowitz_accelerations(&s, coeffs);
    let (dx, dy, dpsi) = body_to_earth_rates(state);
    StateRate::from([dx, dy, dpsi, udot, vdot, rdot])
}

impl ShipModel for AbkowitzModel {
    fn name(&self) -> &'static str {
        "abkowitz"
    }

    fn derivative(&self, state: &ShipState, input: &ControlInput, _wind: &TrueWind) -> StateRate {
        abkowitz_derivative(state, input.delta, &self.coeffs)
    }

    fn forces(&self, state: &ShipState, input: &ControlInput, _wind: &TrueWind) -> ForceBreakdown {
        let (f1, f2, f3) = abkowitz_forces(&self.perturbation(state, input.delta), &self.coeffs);
        ForceBreakdown {
            total: Force3::new(f1, f2, f3),
            components: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(rng: &mut ChaCha8Rng) -> AbkowitzCoefficients {
        let mut c = AbkowitzCoefficients {
            U: rng.random_range(0.5..10.0),
            m: rng.random_range(100.0..1000.0),
            x_G: rng.random_range(-1.0..1.0),
            I_z: rng.random_range(500.0..5000.0),
            X_udot: -rng.random_range(5.0..50.0),
            Y_vdot: -rng.random_range(50.0..500.0),
            Y_rdot: rng.random_range(-50.0..50.0),
            N_vdot: rng.random_range(-50.0..50.0),
            N_rdot: -rng.random_range(100.0..1000.0),
            ..Default::default()
        };
        let mut fields = [
            &mut c.X_star,
            &mut c.X_u,
            &mut c.X_uu,
            &mut c.X_uuu,
            &mut c.X_vv,
            &mut c.X_rr,
            &mut c.X_dd,
            &mut c.X_vvu,
            &mut c.X_rru,
            &mut c.X_ddu,
            &mut c.X_vr,
            &mut c.X_vd,
            &mut c.X_rd,
            &mut c.X_vru,
            &mut c.X_vdu,
            &mut c.X_rdu,
            &mut c.Y_star,
            &mut c.Y_star_u,
            &mut c.Y_star_uu,
            &mut c.Y_v,
            &mut c.Y_vvv,
            &mut c.Y_vrr,
            &mut c.Y_vdd,
            &mut c.Y_vu,
            &mut c.Y_vuu,
            &mut c.Y_r,
            &mut c.Y_rrr,
            &mut c.Y_rvv,
            &mut c.Y_rdd,
            &mut c.Y_ru,
            &mut c.Y_ruu,
            &mut c.Y_d,
            &mut c.Y_ddd,
            &mut c.Y_dvv,
            &mut c.Y_drr,
            &mut c.Y_du,
            &mut c.Y_duu,
            &mut c.Y_vrd,
            &mut c.N_star,
            &mut c.N_star_u,
            &mut c.N_star_uu,
            &mut c.N_v,
            &mut c.N_vvv,
            &mut c.N_vrr,
            &mut c.N_vdd,
            &mut c.N_vu,
            &mut c.N_vuu,
            &mut c.N_r,
            &mut c.N_rrr,
            &mut c.N_rvv,
            &mut c.N_rdd,
            &mut c.N_ru,
            &mut c.N_ruu,
            &mut c.N_d,
            &mut c.N_ddd,
            &mut c.N_dvv,
            &mut c.N_drr,
            &mut c.N_du,
            &mut c.N_duu,
            &mut c.N_vrd,
        ];
        for f in fields.iter_mut() {
            **f = rng.random_range(-100.0..100.0);
        }
        c
    }

    #[test]
    fn expansion_point_gives_bias_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_coeffs(&mut rng);
        let f = abkowitz_forces(&AbkowitzState::default(), &c);
        assert_eq!(f, (c.X_star, c.Y_star, c.N_star));
    }

    #[test]
    fn single_monomial() {
        let c = AbkowitzCoefficients {
            U: 1.0,
            m: 0.0,
            X_vv: 1.0,
            ..Default::default()
        };
        let s = AbkowitzState {
            v: 2.0,
            ..Default::default()
        };
        assert_eq!(abkowitz_forces(&s, &c).0, 4.0);
    }

    #[test]
    fn parity_of_symmetric_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let c = random_coeffs(&mut rng).laterally_symmetric();
            let s = AbkowitzState {
                du: rng.random_range(-1.0..1.0),
                v: rng.random_range(-1.0..1.0),
                r: rng.random_range(-0.2..0.2),
                delta: rng.random_range(-0.6..0.6),
            };
            let m = AbkowitzState {
                v: -s.v,
                r: -s.r,
                delta: -s.delta,
                ..s
            };
            let (a1, a2, a3) = abkowitz_forces(&s, &c);
            let (b1, b2, b3) = abkowitz_forces(&m, &c);
            assert_eq!(a1, b1);
            assert_eq!(a2, -b2);
            assert_eq!(a3, -b3);
        }
    }

    #[test]
    fn zero_force_point_has_zero_acceleration() {
        let c = AbkowitzCoefficients {
            U: 2.0,
            m: 10.0,
            I_z: 30.0,
            X_udot: -1.0,
            Y_vdot: -5.0,
            N_rdot: -4.0,
            ..Default::default()
        };
        let a = abkowitz_accelerations(&AbkowitzState::default(), &c);
        assert_eq!(a, (0.0, 0.0, 0.0));
    }

    #[test]
    fn decoupled_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut c = random_coeffs(&mut rng);
        c.x_G = 0.0;
        c.N_vdot = 0.0;
        c.Y_rdot = 0.0;
        let s = AbkowitzState {
            du: 0.1,
            v: 0.2,
            r: -0.05,
            delta: 0.1,
        };
        let (_, f2, f3) = abkowitz_forces(&s, &c);
        let (_, vdot, rdot) = abkowitz_accelerations(&s, &c);
        assert!((vdot - f2 / (c.m - c.Y_vdot)).abs() <= 1e-14 * vdot.abs());
        assert!((rdot - f3 / (c.I_z - c.N_rdot)).abs() <= 1e-14 * rdot.abs());
    }

    #[test]
    fn residual_of_solved_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let c = random_coeffs(&mut rng);
            let s = AbkowitzState {
                du: rng.random_range(-1.0..1.0),
                v: rng.random_range(-1.0..1.0),
                r: rng.random_range(-0.3..0.3),
                delta: rng.random_range(-0.6..0.6),
            };
            let (f1, f2, f3) = abkowitz_forces(&s, &c);
            let (ud, vd, rd) = abkowitz_accelerations(&s, &c);
            let mxg = c.m * c.x_G;
            let r1 = (c.m - c.X_udot) * ud - f1;
            let r2 = (c.m - c.Y_vdot) * vd + (mxg - c.Y_rdot) * rd - f2;
            let r3 = (mxg - c.N_vdot) * vd + (c.I_z - c.N_rdot) * rd - f3;
            let scale = f1.abs().max(f2.abs()).max(f3.abs()).max(c.I_z.abs());
            for res in [r1, r2, r3] {
                assert!(res.abs() < 1e-12 * scale, "residual {res} scale {scale}");
            }
        }
    }

    #[test]
    fn singular_block_rejected() {
        let c = AbkowitzCoefficients {
            U: 1.0,
            m: 1.0,
            I_z: 1.0,
            Y_vdot: 1.0,
            ..Default::default()
        };
        assert!(matches!(AbkowitzModel::new(c), Err(Error::SingularMassMatrix(_))));
        let c = AbkowitzCoefficients {
            U: 1.0,
            m: 1.0,
            I_z: 1.0,
            X_udot: 1.0,
            ..Default::default()
        };
        assert!(AbkowitzModel::new(c).is_err());
    }

    #[test]
    fn derivative_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_coeffs(&mut rng);
        let s = ShipState::new(1.0, 2.0, 0.3, c.U + 0.1, 0.05, 0.01);
        let a = abkowitz_derivative(&s, 0.1, &c);
        let b = abkowitz_derivative(&s, 0.1, &c);
        assert_eq!(a, b);
    }

    #[test]
    fn expansion_point_rest() {
        let c = AbkowitzCoefficients {
            U: 3.0,
            m: 10.0,
            I_z: 30.0,
            X_udot: -1.0,
            Y_vdot: -5.0,
            N_rdot: -4.0,
            X_u: -2.0,
            Y_v: -3.0,
            N_r: -1.0,
            ..Default::default()
        };
        let s = ShipState::new(0.0, 0.0, 0.0, 3.0, 0.0, 0.0);
        let d = abkowitz_derivative(&s, 0.0, &c);
        assert_eq!((d[3], d[4], d[5]), (0.0, 0.0, 0.0));
    }
}

//! Matrix-vector model `M nu' + C(nu) nu + D(nu) nu = tau + tau_wind + tau_wave`
//! with an azimuth-thruster or rudder/propeller actuator map.

use std::f64::consts::PI;

use nalgebra::{Cholesky, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{apparent_wind, body_to_earth_rates, ShipGeometry, ShipState, StateRate, TrueWind};
use crate::mmg::{fujii_lift_gradient, wind_forces, WindCoeffs};
use crate::model::{ControlInput, Force3, ForceBreakdown, ShipModel};

/// Coriolis-centripetal matrix built from the inertia matrix.
///
/// With `a = M[0] . nu` and `b = M[1] . nu`, `C = [[0, 0, -b], [0, 0, a], [b, -a, 0]]`,
/// so `nu^T C nu = 0` for every `nu`.
#[allow(non_snake_case)]
pub fn coriolis_from_M(nu: &Vector3<f64>, M: &Matrix3<f64>) -> Matrix3<f64> {
    let a = M.row(0).dot(&nu.transpose());
    let b = M.row(1).dot(&nu.transpose());
    Matrix3::new(0.0, 0.0, -b, 0.0, 0.0, a, b, -a, 0.0)
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AzimuthThruster {
    /// thrust deduction
    pub t: f64,
    /// N s^2
    pub T_nn: f64,
    pub l_x: f64,
    pub l_y: f64,
    /// N s / m per rps
    #[serde(default)]
    pub k_loss: f64,
}

impl AzimuthThruster {
    fn direction(&self, alpha: f64) -> Vector3<f64> {
        let (s, c) = alpha.sin_cos();
        Vector3::new(c, s, self.l_x * s - self.l_y * c)
    }

    /// Velocity-dependent loss vector `d_loss(n, alpha)`.
    pub fn d_loss(&self, n: f64, alpha: f64) -> Vector3<f64> {
        self.k_loss * n.abs() * self.direction(alpha)
    }

    /// Input matrix of the linear-in-force form `tau = B u`.
    pub fn b_matrix(&self) -> nalgebra::Matrix3x2<f64> {
        nalgebra::Matrix3x2::new(1.0, 0.0, 0.0, 1.0, -self.l_y, self.l_x)
    }

    /// `D_loss = [d_loss, 0, 0]`.
    pub fn d_loss_matrix(&self, n: f64, alpha: f64) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        m.set_column(0, &self.d_loss(n, alpha));
        m
    }

    /// Virtual input `u = (1-t) T |n| n (cos alpha, sin alpha)`.
    pub fn input(&self, n: f64, alpha: f64) -> nalgebra::Vector2<f64> {
        let f = (1.0 - self.t) * self.T_nn * n.abs() * n;
        nalgebra::Vector2::new(f * alpha.cos(), f * alpha.sin())
    }
}

/// Returns the control force and the loss term already subtracted from it.
pub fn azimuth_tau(n: f64, alpha: f64, u_r: f64, thruster: &AzimuthThruster) -> (Vector3<f64>, Vector3<f64>) {
    let f = (1.0 - thruster.t) * thruster.T_nn * n.abs() * n;
    let loss = thruster.d_loss(n, alpha) * u_r;
    (f * thruster.direction(alpha) - loss, loss)
}

/// Single propeller with a rudder behind it.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RudderPropeller {
    pub rho: f64,
    pub A_R: f64,
    /// rudder aspect ratio, gives `C_N`
    pub lambda: f64,
    pub t_R: f64,
    pub a_H: f64,
    pub x_R: f64,
    pub x_H: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub eta: f64,
    pub w_P: f64,
    pub t_P: f64,
    pub D_p: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl RudderPropeller {
    pub fn c_n(&self) -> f64 {
        fujii_lift_gradient(self.lambda)
    }

    fn k_t(&self, u: f64, n: f64) -> f64 {
        if n == 0.0 {
            return 0.0;
        }
        let j = u * (1.0 - self.w_P) / (n * self.D_p);
        self.k0 + (self.k1 + self.k2 * j) * j
    }

    /// Propeller thrust `rho n^2 D^4 K_T(J_a)`.
    pub fn thrust(&self, u: f64, n: f64) -> f64 {
        self.rho * n * n * self.D_p.powi(4) * self.k_t(u, n)
    }

    /// Longitudinal rudder inflow. Written without dividing by `J_a` so it
    /// stays finite at zero speed.
    pub fn u_r(&self, u: f64, n: f64) -> f64 {
        let u_a = u * (1.0 - self.w_P);
        let loading = 8.0 * self.k_t(u, n) * (n * self.D_p).powi(2) / PI;
        let jet = (u_a * u_a + loading).max(0.0).sqrt();
        let inner = u_a + self.kappa * (jet - u_a);
        self.epsilon * (self.eta * inner * inner + (1.0 - self.eta) * u_a * u_a).sqrt()
    }

    fn dynamic_pressure(&self, u: f64, n: f64) -> f64 {
        let u_r = self.u_r(u, n);
        self.rho * u_r * u_r * self.A_R * self.c_n()
    }

    /// `(X_dd, Y_d, N_d)` of the small-angle form at the given operating point.
    pub fn linearize(&self, u: f64, n: f64) -> (f64, f64, f64) {
        let q = self.dynamic_pressure(u, n);
        (
            0.5 * (1.0 - self.t_R) * q,
            0.5 * (1.0 + self.a_H) * q,
            0.5 * (self.x_R + self.a_H * self.x_H) * q,
        )
    }
}

pub fn rudder_tau_approx(delta: f64, u: f64, n: f64, rp: &RudderPropeller) -> Vector3<f64> {
    let q = rp.dynamic_pressure(u, n);
    let s = delta.sin();
    let s2 = (2.0 * delta).sin();
    Vector3::new(
        -0.5 * (1.0 - rp.t_R) * q * s * s,
        -0.25 * (1.0 + rp.a_H) * q * s2,
        -0.25 * (rp.x_R + rp.a_H * rp.x_H) * q * s2,
    )
}

#[allow(non_snake_case)]
pub fn rudder_tau_linear(delta: f64, X_dd: f64, Y_d: f64, N_d: f64) -> Vector3<f64> {
    Vector3::new(-X_dd * delta * delta, -Y_d * delta, -N_d * delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FossenActuator {
    /// `ControlInput::delta` is the azimuth angle, `n_p` the revolutions.
    Azimuth(AzimuthThruster),
    RudderPropeller(RudderPropeller),
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FossenParams {
    /// inertia including added mass, row-major
    pub M: [[f64; 3]; 3],
    /// linear damping, row-major
    pub D: [[f64; 3]; 3],
    /// diagonal `|nu| nu` damping
    #[serde(default)]
    pub D_quadratic: [f64; 3],
    /// diagonal `nu^3` damping
    #[serde(default)]
    pub D_cubic: [f64; 3],
    /// constant current velocity subtracted from `nu`
    #[serde(default)]
    pub current: [f64; 3],
    /// exogenous wave load
    #[serde(default)]
    pub tau_wave: [f64; 3],
    #[serde(default)]
    pub actuator: Option<FossenActuator>,
}

fn mat(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

impl FossenParams {
    pub fn mass_matrix(&self) -> Matrix3<f64> {
        mat(&self.M)
    }

    pub fn linear_damping(&self) -> Matrix3<f64> {
        mat(&self.D)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.mass_matrix();
        let asym = (m - m.transpose()).amax();
        if !(asym <= 1e-9 * m.amax()) {
            return Err(Error::SingularMassMatrix("M is not symmetric".into()));
        }
        if Cholesky::new(m).is_none() {
            return Err(Error::SingularMassMatrix("M is not positive definite".into()));
        }
        Ok(())
    }

    /// `D(nu) nu`
    pub fn damping_force(&self, nu: &Vector3<f64>) -> Vector3<f64> {
        let mut d = self.linear_damping() * nu;
        for i in 0..3 {
            d[i] += self.D_quadratic[i] * nu[i].abs() * nu[i] + self.D_cubic[i] * nu[i].powi(3);
        }
        d
    }
}

/// Model with its factorized inertia matrix.
#[derive(Debug, Clone)]
pub struct FossenModel {
    params: FossenParams,
    chol: Cholesky<f64, nalgebra::U3>,
    geometry: ShipGeometry,
    wind: WindCoeffs,
}

pub fn fossen_derivative(
    nu: &Vector3<f64>,
    tau: &Vector3<f64>,
    tau_wind: &Vector3<f64>,
    tau_wave: &Vector3<f64>,
    model: &FossenModel,
) -> Vector3<f64> {
    let p = &model.params;
    let nu_r = nu - Vector3::from(p.current);
    let m = p.mass_matrix();
    let rhs = tau + tau_wind + tau_wave - coriolis_from_M(&nu_r, &m) * nu_r - p.damping_force(&nu_r);
    model.chol.solve(&rhs)
}

fn to_vec(f: Force3) -> Vector3<f64> {
    Vector3::new(f.x, f.y, f.n)
}

fn to_force(v: Vector3<f64>) -> Force3 {
    Force3::new(v[0], v[1], v[2])
}

impl FossenModel {
    pub fn new(params: FossenParams, geometry: ShipGeometry, wind: WindCoeffs) -> Result<Self> {
        params.validate()?;
        let chol = Cholesky::new(params.mass_matrix())
            .ok_or_else(|| Error::SingularMassMatrix("M is not positive definite".into()))?;
        Ok(Self {
            params,
            chol,
            geometry,
            wind,
        })
    }

    pub fn params(&self) -> &FossenParams {
        &self.params
    }

    pub fn control_tau(&self, state: &ShipState, input: &ControlInput) -> Vector3<f64> {
        let u_r = state.u - self.params.current[0];
        match &self.params.actuator {
            None => Vector3::zeros(),
            Some(FossenActuator::Azimuth(t)) => azimuth_tau(input.n_p, input.delta, u_r, t).0,
            Some(FossenActuator::RudderPropeller(rp)) => {
                let mut tau = rudder_tau_approx(input.delta, u_r, input.n_p, rp);
                tau[0] += (1.0 - rp.t_P) * rp.thrust(u_r, input.n_p);
                tau
            }
        }
    }

    fn wind_tau(&self, state: &ShipState, wind: &TrueWind) -> Vector3<f64> {
        to_vec(wind_forces(&apparent_wind(state, wind), &self.geometry, &self.wind))
    }
}

pub const FOSSEN_LABELS: [&str; 4] = ["control", "wind", "wave", "damping"];

impl ShipModel for FossenModel {
    fn name(&self) -> &'static str {
        "fossen"
    }

    fn derivative(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> StateRate {
        let nu = Vector3::new(state.u, state.v_m, state.r);
        let dnu = fossen_derivative(
            &nu,
            &self.control_tau(state, input),
            &self.wind_tau(state, wind),
            &Vector3::from(self.params.tau_wave),
            self,
        );
        let (dx, dy, dpsi) = body_to_earth_rates(state);
        StateRate::from([dx, dy, dpsi, dnu[0], dnu[1], dnu[2]])
    }

    fn forces(&self, state: &ShipState, input: &ControlInput, wind: &TrueWind) -> ForceBreakdown {
        let nu = Vector3::new(state.u, state.v_m, state.r) - Vector3::from(self.params.current);
        let parts = [
            to_force(self.control_tau(state, input)),
            to_force(self.wind_tau(state, wind)),
            to_force(Vector3::from(self.params.tau_wave)),
            -to_force(self.params.damping_force(&nu)),
        ];
        ForceBreakdown {
            total: parts.iter().fold(Force3::ZERO, |a, b| a + *b),
            components: FOSSEN_LABELS.iter().copied().zip(parts).collect(),
        }
    }
}

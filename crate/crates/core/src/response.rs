//! Yaw response models: first-order KT, second-order Nomoto and the Norrbin
//! cubic extension, plus the mapping from linear sway-yaw derivatives to the
//! second-order model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{body_to_earth_rates, ShipState, StateRate, TrueWind};
use crate::model::{ControlInput, Force3, ForceBreakdown, ShipModel};

/// `T r' + r = K delta`
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NomotoKT {
    /// rudder gain, 1/s
    pub K: f64,
    /// time constant, s
    pub T: f64,
}

#[allow(non_snake_case)]
impl NomotoKT {
    pub fn new(K: f64, T: f64) -> Result<Self> {
        let m = Self { K, T };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.K.is_finite() {
            return Err(Error::invalid("K", "must be finite"));
        }
        if !(self.T.is_finite() && self.T > 0.0) {
            return Err(Error::invalid("T", "must be > 0"));
        }
        Ok(())
    }
}

/// `T1 T2 r'' + (T1 + T2) r' + r = K delta + K T3 delta'`
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nomoto2nd {
    pub K: f64,
    pub T1: f64,
    pub T2: f64,
    pub T3: f64,
}

#[allow(non_snake_case)]
impl Nomoto2nd {
    pub fn new(K: f64, T1: f64, T2: f64, T3: f64) -> Result<Self> {
        for (name, v) in [("T1", T1), ("T2", T2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !(K.is_finite() && T3.is_finite()) {
            return Err(Error::invalid("K/T3", "must be finite"));
        }
        Ok(Self { K, T1, T2, T3 })
    }
}

/// `T r' + r + c3 r^3 = K delta`
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NorrbinModel {
    pub K: f64,
    pub T: f64,
    pub c3: f64,
}

#[allow(non_snake_case)]
impl NorrbinModel {
    pub fn new(K: f64, T: f64, c3: f64) -> Result<Self> {
        let m = Self { K, T, c3 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        NomotoKT { K: self.K, T: self.T }.validate()?;
        if !(self.c3.is_finite() && self.c3 >= 0.0) {
            return Err(Error::invalid("c3", "must be >= 0"));
        }
        Ok(())
    }
}

/// Non-dimensional linear sway/yaw derivatives of the drift-angle / yaw-rate
/// system, together with the reference speed and length used to scale them.
///
/// The elimination that yields the second-order model uses the combined
/// masses `m + m_x`, `m + m_y` and yaw inertia `I_zz + J_zz`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearDerivativeSet {
    pub m: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub I_zz: f64,
    pub J_zz: f64,
    pub C_Yb: f64,
    pub C_Yr: f64,
    pub C_Yd: f64,
    pub C_Nb: f64,
    pub C_Nr: f64,
    pub C_Nd: f64,
    pub U: f64,
    pub L: f64,
}

impl LinearDerivativeSet {
    /// Checks that both denominators of the mapping are nonzero and the
    /// scaling quantities are positive.
    pub fn validate(&self) -> Result<()> {
        if !(self.U > 0.0 && self.L > 0.0) {
            return Err(Error::invalid("U/L", "must be > 0"));
        }
        if self.stability_denominator() == 0.0 || self.gain_numerator() == 0.0 {
            return Err(Error::DegenerateDerivativeSet);
        }
        Ok(())
    }

    fn stability_denominator(&self) -> f64 {
        self.C_Yb * self.C_Nr - ((self.m + self.m_x) - self.C_Yr) * self.C_Nb
    }

    fn gain_numerator(&self) -> f64 {
        self.C_Nb * self.C_Yd + self.C_Yb * self.C_Nd
    }
}

pub fn kt_rdot(r: f64, delta: f64, model: &NomotoKT) -> f64 {
    (model.K * delta - r) / model.T
}

/// Closed-form yaw rate after a rudder step from rest.
pub fn kt_step_response(model: &NomotoKT, delta: f64, t: f64) -> f64 {
    model.K * delta * -(-t / model.T).exp_m1()
}

pub fn norrbin_rdot(r: f64, delta: f64, model: &NorrbinModel) -> f64 {
    (model.K * delta - r - model.c3 * r * r * r) / model.T
}

/// Second derivative of `r` for the second-order model.
pub fn nomoto2nd_state_derivative(r: f64, rdot: f64, delta: f64, delta_dot: f64, model: &Nomoto2nd) -> f64 {
    (model.K * delta + model.K * model.T3 * delta_dot - r - (model.T1 + model.T2) * rdot) / (model.T1 * model.T2)
}

/// Eliminate the drift angle from the linear sway/yaw system.
///
/// `T1 >= T2` are the real roots of `s^2 - (T1+T2) s + T1 T2`. Complex roots
/// are reported as [`Error::OscillatoryPair`].
pub fn derive_nomoto_from_linear(d: &LinearDerivativeSet) -> Result<Nomoto2nd> {
    d.validate()?;
    let tau = d.L / d.U;
    let my = d.m + d.m_y;
    let inertia = d.I_zz + d.J_zz;
    let den = d.stability_denominator();
    let num = d.gain_numerator();

    let gain = num / (tau * den);
    let sum = tau * (my * d.C_Nr + inertia * d.C_Yb) / den;
    let product = tau * tau * my * inertia / den;
    let t3 = tau * my * d.C_Nd / num;

    let disc = sum * sum - 4.0 * product;
    if disc < 0.0 {
        return Err(Error::OscillatoryPair { sum, product });
    }
    let t1 = 0.5 * (sum + disc.sqrt());
    let t2 = if t1 != 0.0 { product / t1 } else { 0.0 };
    Nomoto2nd::new(gain, t1, t2, t3)
}

/// `(K', T')` with `K' = K / (U/L)` and `T' = T / (L/U)`.
#[allow(non_snake_case)]
pub fn nondim_kt(model: &NomotoKT, U: f64, L: f64) -> Result<(f64, f64)> {
    if U == 0.0 {
        return Err(Error::ZeroReferenceSpeed);
    }
    if !(L > 0.0) {
        return Err(Error::invalid("L", "must be > 0"));
    }
    Ok((model.K / (U / L), model.T / (L / U)))
}

#[allow(non_snake_case)]
pub fn redim_kt(K_prime: f64, T_prime: f64, U: f64, L: f64) -> Result<NomotoKT> {
    if U == 0.0 {
        return Err(Error::ZeroReferenceSpeed);
    }
    NomotoKT::new(K_prime * U / L, T_prime * L / U)
}

fn yaw_only_rate(state: &ShipState, rdot: f64) -> StateRate {
    let (dx, dy, dpsi) = body_to_earth_rates(state);
    StateRate::from([dx, dy, dpsi, 0.0, 0.0, rdot])
}

/// KT model on the shared state: surge and sway are frozen, only `r` evolves.
impl ShipModel for NomotoKT {
    fn name(&self) -> &'static str {
        "kt"
    }

    fn derivative(&self, state: &ShipState, input: &ControlInput, _wind: &TrueWind) -> StateRate {
        yaw_only_rate(state, kt_rdot(state.r, input.delta, self))
    }

    fn forces(&self, _: &ShipState, _: &ControlInput, _: &TrueWind) -> ForceBreakdown {
        ForceBreakdown {
            total: Force3::ZERO,
            components: Vec::new(),
        }
    }
}

impl ShipModel for NorrbinModel {
    fn name(&self) -> &'static str {
        "norrbin"
    }

    fn derivative(&self, state: &ShipState, input: &ControlInput, _wind: &TrueWind) -> StateRate {
        yaw_only_rate(state, norrbin_rdot(state.r, input.delta, self))
    }

    fn forces(&self, _: &ShipState, _: &ControlInput, _: &TrueWind) -> ForceBreakdown {
        ForceBreakdown::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn kt_rdot_examples() {
        let m = NomotoKT::new(0.1, 10.0).unwrap();
        assert_eq!(kt_rdot(0.1 * 0.3, 0.3, &m), 0.0);
        assert!((kt_rdot(0.0, 0.2, &m) - 0.002).abs() < 1e-18);
        assert_eq!(kt_rdot(0.0, 0.0, &m), 0.0);
    }

    #[test]
    fn kt_step_examples() {
        let m = NomotoKT::new(0.08, 12.0).unwrap();
        assert_eq!(kt_step_response(&m, 0.2, 0.0), 0.0);
        assert!(rel(kt_step_response(&m, 0.2, 1e4), 0.016) < 1e-15);
        let expected = 0.016 * (1.0 - (-1.0f64).exp());
        assert!(rel(kt_step_response(&m, 0.2, 12.0), expected) < 1e-14);
        assert!((expected / 0.016 - 0.6321).abs() < 1e-4);
    }

    #[test]
    fn norrbin_reduces_to_kt() {
        let kt = NomotoKT::new(0.3, 7.0).unwrap();
        let nb = NorrbinModel::new(0.3, 7.0, 0.0).unwrap();
        for (r, d) in [(0.01, 0.1), (-0.2, 0.3), (0.0, -0.4)] {
            assert_eq!(kt_rdot(r, d, &kt), norrbin_rdot(r, d, &nb));
        }
        assert_eq!(norrbin_rdot(0.0, 0.0, &nb), 0.0);
    }

    #[test]
    fn norrbin_steady_root_example() {
        // r + r^3 = 0.1: bisection on the cubic
        let (mut lo, mut hi) = (0.0f64, 0.1f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + mid.powi(3) < 0.1 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((lo - 0.09902).abs() < 1e-5);
        let nb = NorrbinModel::new(1.0, 5.0, 1.0).unwrap();
        assert!(norrbin_rdot(lo, 0.1, &nb).abs() < 1e-15);
    }

    #[test]
    fn nomoto2nd_examples() {
        let m = Nomoto2nd::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(nomoto2nd_state_derivative(0.0, 0.0, 1.0, 0.0, &m), 1.0);
        assert_eq!(
            nomoto2nd_state_derivative(0.0, 0.0, 1.0, 5.0, &m),
            nomoto2nd_state_derivative(0.0, 0.0, 1.0, -3.0, &m)
        );
        let m = Nomoto2nd::new(0.5, 3.0, 2.0, 1.5).unwrap();
        assert_eq!(nomoto2nd_state_derivative(0.5 * 0.2, 0.0, 0.2, 0.0, &m), 0.0);
    }

    #[test]
    fn nondim_kt_examples() {
        let m = NomotoKT::new(0.04, 25.0).unwrap();
        let (k, t) = nondim_kt(&m, 2.0, 50.0).unwrap();
        assert!(rel(k, 1.0) < 1e-15 && rel(t, 1.0) < 1e-15);
        let back = redim_kt(k, t, 2.0, 50.0).unwrap();
        assert!(rel(back.K, 0.04) < 1e-15 && rel(back.T, 25.0) < 1e-15);
        assert!(nondim_kt(&m, 0.0, 50.0).is_err());
        assert!(nondim_kt(&m, 2.0, 0.0).is_err());
    }

    fn toy_set() -> LinearDerivativeSet {
        LinearDerivativeSet {
            m: 0.18,
            m_x: 0.01,
            m_y: 0.15,
            I_zz: 0.011,
            J_zz: 0.009,
            C_Yb: 0.35,
            C_Yr: 0.07,
            C_Yd: 0.06,
            C_Nb: 0.10,
            C_Nr: 0.06,
            C_Nd: 0.03,
            U: 5.0,
            L: 100.0,
        }
    }

    #[test]
    fn collapsed_gain_with_zero_cross_terms() {
        let mut d = toy_set();
        d.C_Nb = 0.0;
        let nm = derive_nomoto_from_linear(&d).unwrap();
        assert!(rel(nm.K, (d.U / d.L) * d.C_Nd / d.C_Nr) < 1e-14);
    }

    #[test]
    fn speed_scaling() {
        let d = toy_set();
        let a = derive_nomoto_from_linear(&d).unwrap();
        let b = derive_nomoto_from_linear(&LinearDerivativeSet { U: 2.0 * d.U, ..d }).unwrap();
        assert!(rel(b.K, 2.0 * a.K) < 1e-14);
        assert!(rel(b.T1 + b.T2, 0.5 * (a.T1 + a.T2)) < 1e-14);
        assert!(a.T1 >= a.T2);
    }

    /// Steady turning gain of the two-state system solved directly.
    fn linear_steady_gain(d: &LinearDerivativeSet) -> f64 {
        let tau = d.L / d.U;
        // [C_Yb, -(m+m_x - C_Yr) tau] [beta]   [C_Yd]
        // [-C_Nb, C_Nr tau          ] [r   ] = [C_Nd] delta
        let a11 = d.C_Yb;
        let a12 = -((d.m + d.m_x) - d.C_Yr) * tau;
        let a21 = -d.C_Nb;
        let a22 = d.C_Nr * tau;
        let det = a11 * a22 - a12 * a21;
        (a11 * d.C_Nd - a21 * d.C_Yd) / det
    }

    #[test]
    fn steady_gain_matches_linear_system() {
        let d = toy_set();
        let nm = derive_nomoto_from_linear(&d).unwrap();
        assert!(rel(nm.K, linear_steady_gain(&d)) < 1e-9);
    }

    #[test]
    fn degenerate_and_oscillatory_sets() {
        let mut d = toy_set();
        d.C_Yb = 0.0;
        d.C_Nb = 0.0;
        assert!(matches!(
            derive_nomoto_from_linear(&d),
            Err(Error::DegenerateDerivativeSet)
        ));

        // strong coupling with a negative product of time constants is fine to
        // reject through validation; a negative discriminant must surface as
        // an oscillatory pair
        let d = LinearDerivativeSet {
            C_Yb: 0.05,
            C_Nr: 0.002,
            C_Nb: -0.2,
            ..toy_set()
        };
        match derive_nomoto_from_linear(&d) {
            Err(Error::OscillatoryPair { sum, product }) => {
                assert!(sum * sum < 4.0 * product);
            }
            other => panic!("expected oscillatory pair, got {other:?}"),
        }
    }
}

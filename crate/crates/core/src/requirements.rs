//! Executable checklist of qualitative behaviours a berthing simulator must
//! show. Every item is one scripted probe on an MMG parameter set; a probe
//! that errors counts as a failure and records the error.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::actuator::ActuatorLimits;
use crate::environment::{WindConfig, WindNoise};
use crate::error::Result;
use crate::integrator::AdaptiveConfig;
use crate::kinematics::{ShipState, TrueWind};
use crate::maneuver::{random_maneuver, RandomBounds};
use crate::mmg::{propeller_forces, MmgModel, MmgParams};
use crate::model::{ControlInput, ShipModel};
use crate::simulation::{simulate, SimulationConfig, SimulationSetup, Trajectory};

/// Identifiers of the berthing checklist, in order.
pub const REQUIREMENT_IDS: [&str; 14] = [
    "origin_stability",
    "hull_resistance",
    "stability_depends_on_hull_and_speed",
    "no_improbable_motion",
    "rudder_turning",
    "speed_follows_revolutions",
    "steering_varies_with_speed",
    "thruster_fades_with_speed",
    "reversal_turning",
    "leeward_drift",
    "actuator_delay",
    "actuator_limits",
    "automatic_step_size",
    "real_time",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementItem {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementReport {
    pub ship: String,
    pub items: Vec<RequirementItem>,
    /// items of the wider list that have no probe here
    pub not_applicable: Vec<String>,
}

impl RequirementReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.items.iter().filter(|i| i.passed).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Probe settings; the defaults are what `check` uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub dt: f64,
    /// propeller revolutions of the reference ahead condition, rps
    pub n_ahead: f64,
    pub rudder: f64,
    pub dead_time: f64,
    pub wind_speed: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            dt: 0.1,
            n_ahead: 20.0,
            rudder: 20f64.to_radians(),
            dead_time: 2.0,
            wind_speed: 8.0,
        }
    }
}

struct Probe<'a> {
    model: &'a MmgModel,
    settings: ProbeSettings,
}

fn constant(input: ControlInput) -> impl FnMut(f64, &ShipState) -> ControlInput {
    move |_, _| input
}

impl Probe<'_> {
    fn params(&self) -> &MmgParams {
        self.model.params()
    }

    fn run(
        &self,
        initial: ShipState,
        initial_input: ControlInput,
        wind: WindConfig,
        limits: ActuatorLimits,
        t_end: f64,
        controller: &mut dyn FnMut(f64, &ShipState) -> ControlInput,
    ) -> Result<Trajectory> {
        let setup = SimulationSetup {
            initial_state: initial,
            initial_input,
            actuators: limits,
            wind,
        };
        let cfg = SimulationConfig::fixed(t_end, self.settings.dt).with_control_period(self.settings.dt);
        let mut c = |t: f64, s: &ShipState| controller(t, s);
        simulate(self.model, &mut c, &setup, &cfg)
    }

    fn calm(&self, initial: ShipState, input: ControlInput, t_end: f64) -> Result<Trajectory> {
        self.run(
            initial,
            input,
            WindConfig::default(),
            unlimited(),
            t_end,
            &mut constant(input),
        )
    }

    /// State reached after running straight at `n` revolutions.
    fn steady(&self, n: f64) -> Result<ShipState> {
        Ok(self
            .calm(ShipState::default(), ControlInput::new(0.0, n), 400.0)?
            .last()
            .state)
    }
}

fn unlimited() -> ActuatorLimits {
    ActuatorLimits {
        delta_max: std::f64::consts::PI,
        ..ActuatorLimits::default()
    }
}

fn item(id: &'static str, description: &'static str) -> RequirementItem {
    RequirementItem {
        id,
        description,
        passed: false,
        measured: f64::NAN,
        threshold: String::new(),
        detail: String::new(),
    }
}

fn finish(mut it: RequirementItem, outcome: Result<(bool, f64, String)>) -> RequirementItem {
    match outcome {
        Ok((passed, measured, detail)) => {
            it.passed = passed;
            it.measured = measured;
            it.detail = detail;
        }
        Err(e) => {
            it.passed = false;
            it.detail = format!("probe failed: {e}");
        }
    }
    it
}

fn origin_stability(p: &Probe) -> RequirementItem {
    let mut it = item(
        "origin_stability",
        "with no inputs or disturbances the origin (u, v, r) = 0 is asymptotically stable",
    );
    it.threshold = "|nu(600 s)| / |nu(0)| < 0.01".into();
    let s0 = ShipState::with_velocity(0.1, 0.05, 0.01);
    let out = p.calm(s0, ControlInput::default(), 600.0).map(|t| {
        let ratio = t.last().state.velocity_norm() / s0.velocity_norm();
        {
            let s = t.last().state;
            (
                ratio < 0.01,
                ratio,
                format!("(u, v, r) = ({:.2e}, {:.2e}, {:.2e}) after 600 s", s.u, s.v_m, s.r),
            )
        }
    });
    finish(it, out)
}

fn hull_resistance(p: &Probe) -> RequirementItem {
    let mut it = item(
        "hull_resistance",
        "hydrodynamic resistance acts against each of surge, sway and yaw velocity",
    );
    it.threshold = "force opposes velocity and |velocity| decays on every axis".into();
    let out = (|| {
        let cases = [
            ("surge", ShipState::with_velocity(0.2, 0.0, 0.0), 3usize),
            ("sway", ShipState::with_velocity(0.0, 0.1, 0.0), 4),
            ("yaw", ShipState::with_velocity(0.0, 0.0, 0.05), 5),
        ];
        let mut worst: f64 = 0.0;
        let mut notes = Vec::new();
        let mut ok = true;
        for (axis, s0, k) in cases {
            let f = p.model.forces(&s0, &ControlInput::default(), &TrueWind::calm());
            let hull = f.components.iter().find(|c| c.0 == "H").map(|c| c.1).unwrap_or(f.total);
            let force = [hull.x, hull.y, hull.n][k - 3];
            let v0 = s0.to_vector()[k];
            let opposes = force * v0 < 0.0;
            let t = p.calm(s0, ControlInput::default(), 60.0)?;
            let series: Vec<f64> = t.samples.iter().map(|s| s.state.to_vector()[k].abs()).collect();
            let monotone = series.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let ratio = series.last().unwrap() / v0.abs();
            worst = worst.max(ratio);
            ok &= opposes && monotone && ratio < 1.0;
            notes.push(format!(
                "{axis}: force {force:.4e}, decay ratio {ratio:.3}, monotone {monotone}"
            ));
        }
        Ok((ok, worst, notes.join("; ")))
    })();
    finish(it, out)
}

/// Eigenvalue with the largest real part of the sway/yaw Jacobian about
/// straight running at `state`.
fn lateral_eigen(model: &MmgModel, state: &ShipState, input: &ControlInput) -> f64 {
    let f = |v: f64, r: f64| {
        let s = ShipState { v_m: v, r, ..*state };
        let d = model.derivative(&s, input, &TrueWind::calm());
        (d[4], d[5])
    };
    let (hv, hr) = (1e-6, 1e-6);
    let (a_p, b_p) = f(hv, 0.0);
    let (a_m, b_m) = f(-hv, 0.0);
    let (c_p, d_p) = f(0.0, hr);
    let (c_m, d_m) = f(0.0, -hr);
    let j11 = (a_p - a_m) / (2.0 * hv);
    let j21 = (b_p - b_m) / (2.0 * hv);
    let j12 = (c_p - c_m) / (2.0 * hr);
    let j22 = (d_p - d_m) / (2.0 * hr);
    let tr = j11 + j22;
    let det = j11 * j22 - j12 * j21;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        tr / 2.0 + disc.sqrt()
    } else {
        tr / 2.0
    }
}

fn stability_depends(p: &Probe) -> RequirementItem {
    let mut it = item(
        "stability_depends_on_hull_and_speed",
        "course stability changes with hull form and velocity",
    );
    it.threshold = "dominant sway/yaw eigenvalue shifts by > 10 % between two speeds and between two hull forms".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let slow = p.steady(0.5 * n)?;
        let fast = p.steady(n)?;
        let l_slow = lateral_eigen(p.model, &slow, &ControlInput::new(0.0, 0.5 * n));
        let l_fast = lateral_eigen(p.model, &fast, &ControlInput::new(0.0, n));
        let mut params = *p.params();
        params.hull.N_v *= 3.0;
        let variant = MmgModel::new(params)?;
        let l_variant = lateral_eigen(&variant, &fast, &ControlInput::new(0.0, n));
        let shift = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        let speed_effect = shift(l_fast, l_slow);
        let hull_effect = shift(l_fast, l_variant);
        let ok = speed_effect > 0.1 && hull_effect > 0.1;
        Ok((
            ok,
            speed_effect.min(hull_effect),
            format!(
                "eigenvalues: {l_slow:.4} at u = {:.3}, {l_fast:.4} at u = {:.3}, {l_variant:.4} with 3x N_v",
                slow.u, fast.u
            ),
        ))
    })();
    finish(it, out)
}

/// Largest steady speed the given force bound could sustain against the
/// weakest quadratic resistance, with a safety factor of 3.
fn speed_cap(params: &MmgParams, n_max: f64, thruster_n: f64, wind_speed: f64) -> f64 {
    let g = &params.geometry;
    let pr = &params.propeller;
    let thrust = g.rho
        * n_max
        * n_max
        * pr.D_p.powi(4)
        * [pr.k0.abs(), pr.C3.abs(), pr.C6.abs() + pr.C7.abs()]
            .iter()
            .fold(0.0f64, |a, b| a.max(*b));
    let thrusters: f64 = [params.thrusters.bow, params.thrusters.stern]
        .iter()
        .flatten()
        .map(|t| g.rho * thruster_n * thruster_n * t.D.powi(4) * t.K_T.abs())
        .sum();
    let wind = 0.5 * g.rho_A * wind_speed * wind_speed * (g.A_T + g.A_L) * 2.0;
    let q = 0.5 * g.rho * g.L_pp * g.d;
    let c = params
        .hull
        .X0F
        .abs()
        .min(params.hull.X0A.abs())
        .min(params.hull.C_D.abs().max(1e-3));
    3.0 * ((thrust + thrusters + wind) / (q * c)).sqrt()
}

fn no_improbable_motion(p: &Probe) -> RequirementItem {
    let mut it = item(
        "no_improbable_motion",
        "theoretically or physically improbable motion does not occur",
    );
    let n = p.settings.n_ahead;
    let cap = speed_cap(p.params(), n, n, p.settings.wind_speed);
    it.threshold = format!("finite state and speed below {cap:.3} m/s under bounded random inputs");
    let out = (|| {
        let bounds = RandomBounds {
            seed: 17,
            hold_min: 5.0,
            hold_max: 40.0,
            delta_max: 35f64.to_radians(),
            n_min: -n,
            n_max: n,
        };
        let schedule = random_maneuver(&bounds, 900.0)?;
        let wind = WindConfig {
            speed: p.settings.wind_speed,
            direction: 1.0,
            noise: Some(WindNoise {
                speed_amplitude: 2.0,
                direction_amplitude: 0.3,
                time_constant: 5.0,
                seed: 3,
                grid_dt: 0.1,
            }),
        };
        let mut c = |t: f64, _: &ShipState| {
            let mut u = schedule.at(t);
            u.n_bt = if (t / 100.0).floor() as i64 % 2 == 0 { n } else { -n };
            u
        };
        let t = p.run(
            ShipState::default(),
            ControlInput::default(),
            wind,
            unlimited(),
            900.0,
            &mut c,
        )?;
        let max_speed = t
            .samples
            .iter()
            .map(|s| s.state.u.hypot(s.state.v_m))
            .fold(0.0, f64::max);
        let finite = t
            .samples
            .iter()
            .all(|s| s.state.is_finite() && s.forces.total.max_abs().is_finite());
        Ok((finite && max_speed < cap, max_speed, format!("finite {finite}")))
    })();
    finish(it, out)
}

fn rudder_turning(p: &Probe) -> RequirementItem {
    let mut it = item("rudder_turning", "turning motion follows the rudder angle");
    it.threshold = "r > 0 for starboard rudder, r < 0 for port rudder, after 60 s".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let s0 = p.steady(n)?;
        let stbd = p
            .calm(s0, ControlInput::new(p.settings.rudder, n), 60.0)?
            .last()
            .state
            .r;
        let port = p
            .calm(s0, ControlInput::new(-p.settings.rudder, n), 60.0)?
            .last()
            .state
            .r;
        Ok((
            stbd > 0.0 && port < 0.0,
            stbd,
            format!("r = {stbd:.4} (starboard), {port:.4} (port) rad/s"),
        ))
    })();
    finish(it, out)
}

fn speed_follows_revolutions(p: &Probe) -> RequirementItem {
    let mut it = item(
        "speed_follows_revolutions",
        "ship speed varies appropriately with propeller revolutions",
    );
    it.threshold = "steady speeds strictly increase over three revolution settings".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let speeds = [0.25 * n, 0.5 * n, n]
            .iter()
            .map(|&k| p.steady(k).map(|s| s.u))
            .collect::<Result<Vec<_>>>()?;
        let ok = speeds.windows(2).all(|w| w[1] > w[0]) && speeds[0] > 0.0;
        Ok((ok, speeds[2], format!("steady u = {speeds:.4?} m/s")))
    })();
    finish(it, out)
}

fn steering_varies(p: &Probe) -> RequirementItem {
    let mut it = item(
        "steering_varies_with_speed",
        "the steering response varies with ship speed and propeller revolutions",
    );
    it.threshold = "turn rate after 60 s differs by > 10 % between two speeds".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let mut rates = Vec::new();
        for k in [0.5 * n, n] {
            let s0 = p.steady(k)?;
            rates.push(
                p.calm(s0, ControlInput::new(p.settings.rudder, k), 60.0)?
                    .last()
                    .state
                    .r,
            );
        }
        let rel = (rates[1] - rates[0]).abs() / rates[0].abs().max(rates[1].abs());
        Ok((rel > 0.1, rel, format!("r = {:.4} / {:.4} rad/s", rates[0], rates[1])))
    })();
    finish(it, out)
}

fn thruster_fades(p: &Probe) -> RequirementItem {
    let mut it = item(
        "thruster_fades_with_speed",
        "the response to side thrusters varies with forward speed",
    );
    it.threshold = "yaw rate added by the bow thruster after 20 s strictly decreases over three speeds".into();
    let out = (|| {
        if p.params().thrusters.bow.is_none() && p.params().thrusters.stern.is_none() {
            return Ok((false, f64::NAN, "ship has no side thrusters".to_string()));
        }
        let n = p.settings.n_ahead;
        let mut effects = Vec::new();
        for k in [0.0, 0.25 * n, 0.5 * n] {
            let s0 = if k == 0.0 { ShipState::default() } else { p.steady(k)? };
            let base = ControlInput::new(0.0, k);
            let with = ControlInput {
                n_bt: n,
                n_st: -n,
                ..base
            };
            let r_with = p.calm(s0, with, 20.0)?.last().state.r;
            let r_base = p.calm(s0, base, 20.0)?.last().state.r;
            effects.push((r_with - r_base).abs());
        }
        let ok = effects.windows(2).all(|w| w[1] < w[0]);
        Ok((ok, effects[0], format!("added |r| = {effects:.4?} rad/s")))
    })();
    finish(it, out)
}

fn reversal_turning(p: &Probe) -> RequirementItem {
    let mut it = item(
        "reversal_turning",
        "propeller reversal produces a turn set by the propeller's direction of rotation",
    );
    it.threshold =
        "u crosses zero within 120 s and the mean yaw rate until then has the sign of the reversal moment".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let s0 = p.steady(n)?;
        let g = &p.params().geometry;
        let moment = propeller_forces(&s0, -n, g, &p.params().propeller).n;
        if moment == 0.0 {
            return Ok((false, f64::NAN, "propeller has no reversal moment".to_string()));
        }
        let t = p.calm(s0, ControlInput::new(0.0, -n), 120.0)?;
        let Some(stop) = t.samples.iter().position(|s| s.state.u <= 0.0) else {
            return Ok((false, f64::NAN, "u did not reach zero".to_string()));
        };
        let mean_r = t.samples[..=stop].iter().map(|s| s.state.r).sum::<f64>() / (stop + 1) as f64;
        let ok = mean_r.signum() == moment.signum();
        Ok((
            ok,
            t.samples[stop].t,
            format!(
                "stopped after {:.1} s, mean r {mean_r:.4e}, reversal moment {moment:.4e}",
                t.samples[stop].t
            ),
        ))
    })();
    finish(it, out)
}

fn leeward_drift(p: &Probe) -> RequirementItem {
    let mut it = item("leeward_drift", "with wind the ship drifts to leeward and/or turns");
    it.threshold =
        "cross-track displacement has the sign of C_Y at a starboard beam wind and grows monotonically after 30 s"
            .into();
    let out = (|| {
        let (_, cy, _) = p.params().wind.coefficients(FRAC_PI_2);
        let wind = WindConfig::steady(p.settings.wind_speed, FRAC_PI_2);
        let t = p.run(
            ShipState::default(),
            ControlInput::default(),
            wind,
            unlimited(),
            300.0,
            &mut constant(ControlInput::default()),
        )?;
        let y: Vec<f64> = t.samples.iter().filter(|s| s.t >= 30.0).map(|s| s.state.y0).collect();
        let last = *y.last().unwrap();
        let monotone = y.windows(2).all(|w| (w[1] - w[0]) * cy.signum() >= 0.0);
        let ok = cy != 0.0 && last.signum() == cy.signum() && monotone;
        Ok((
            ok,
            last,
            format!("C_Y = {cy:.3}, y0(300 s) = {last:.3} m, monotone {monotone}"),
        ))
    })();
    finish(it, out)
}

/// Lag maximizing the cross-correlation of two demeaned series.
pub fn correlation_lag(command: &[f64], realized: &[f64], max_lag: usize) -> usize {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let (mc, mr) = (mean(command), mean(realized));
    let mut best = (0, f64::NEG_INFINITY);
    for lag in 0..=max_lag.min(command.len().saturating_sub(1)) {
        let n = command.len() - lag;
        let c: f64 = (0..n)
            .map(|i| (command[i] - mc) * (realized[i + lag] - mr))
            .sum::<f64>()
            / n as f64;
        if c > best.1 {
            best = (lag, c);
        }
    }
    best.0
}

fn actuator_delay(p: &Probe) -> RequirementItem {
    let mut it = item(
        "actuator_delay",
        "the delay between command and actuator is taken into account",
    );
    let d = p.settings.dead_time;
    it.threshold = format!("cross-correlation lag of realized vs commanded rudder within one step of {d} s");
    let out = (|| {
        let bounds = RandomBounds {
            seed: 5,
            hold_min: 3.0,
            hold_max: 15.0,
            delta_max: 20f64.to_radians(),
            n_min: 0.5 * p.settings.n_ahead,
            n_max: p.settings.n_ahead,
        };
        let schedule = random_maneuver(&bounds, 300.0)?;
        let limits = ActuatorLimits {
            dead_time: d,
            ..unlimited()
        };
        let mut c = |t: f64, _: &ShipState| schedule.at(t);
        let t = p.run(
            ShipState::default(),
            ControlInput::default(),
            WindConfig::default(),
            limits,
            300.0,
            &mut c,
        )?;
        let cmd: Vec<f64> = t.samples.iter().map(|s| s.command.delta).collect();
        let real: Vec<f64> = t.samples.iter().map(|s| s.realized.delta).collect();
        let dt = t.samples[1].t - t.samples[0].t;
        let lag = correlation_lag(&cmd, &real, (3.0 * d / dt) as usize + 10) as f64 * dt;
        Ok(((lag - d).abs() <= dt + 1e-9, lag, format!("measured lag {lag:.2} s")))
    })();
    finish(it, out)
}

fn actuator_limits(p: &Probe) -> RequirementItem {
    let mut it = item("actuator_limits", "actuator maxima and rates are respected");
    let (max, rate) = (20f64.to_radians(), 3f64.to_radians());
    it.threshold = "|delta| <= 20 deg and |d delta/dt| <= 3 deg/s on the realized channel".into();
    let out = (|| {
        let limits = ActuatorLimits {
            delta_max: max,
            delta_rate_max: Some(rate),
            ..ActuatorLimits::default()
        };
        let n = p.settings.n_ahead;
        let mut c = |t: f64, _: &ShipState| ControlInput::new(if t < 30.0 { 0.6 } else { -0.6 }, n);
        let t = p.run(
            p.steady(n)?,
            ControlInput::new(0.0, n),
            WindConfig::default(),
            limits,
            60.0,
            &mut c,
        )?;
        let dt = p.settings.dt;
        let peak = t.samples.iter().map(|s| s.realized.delta.abs()).fold(0.0, f64::max);
        let peak_rate = t
            .samples
            .windows(2)
            .map(|w| (w[1].realized.delta - w[0].realized.delta).abs() / dt)
            .fold(0.0, f64::max);
        let ok = peak <= max + 1e-12 && peak_rate <= rate + 1e-9 && peak > 0.99 * max;
        Ok((
            ok,
            peak,
            format!(
                "peak {:.2} deg, peak rate {:.3} deg/s",
                peak.to_degrees(),
                peak_rate.to_degrees()
            ),
        ))
    })();
    finish(it, out)
}

fn automatic_step(p: &Probe) -> RequirementItem {
    let mut it = item(
        "automatic_step_size",
        "time steps are chosen automatically according to the scale of the motion",
    );
    it.threshold = "adaptive run completes with step sizes spanning more than a factor 2".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let setup = SimulationSetup {
            initial_state: p.steady(n)?,
            initial_input: ControlInput::new(0.0, n),
            ..SimulationSetup::default()
        };
        let cfg = SimulationConfig::adaptive(
            200.0,
            AdaptiveConfig {
                rel_tol: 1e-6,
                abs_tol: 1e-9,
                dt_min: 1e-6,
                dt_max: 5.0,
            },
            5.0,
        );
        let mut c = |t: f64, _: &ShipState| ControlInput::new(if t < 100.0 { p.settings.rudder } else { 0.0 }, n);
        let t = simulate(p.model, &mut c, &setup, &cfg)?;
        let st = t.stats.steps;
        let spread = st.max_step / st.smallest_step();
        Ok((
            spread > 2.0 && st.accepted > 0,
            spread,
            format!(
                "{} accepted, {} rejected, steps {:.3e}..{:.3e} s",
                st.accepted,
                st.rejected,
                st.smallest_step(),
                st.max_step
            ),
        ))
    })();
    finish(it, out)
}

fn real_time(p: &Probe) -> RequirementItem {
    let mut it = item("real_time", "each step is computed faster than real time");
    it.threshold = "wall time per simulated second < 1 over 3600 s at dt = 0.1 s".into();
    let out = (|| {
        let n = p.settings.n_ahead;
        let mut c = |t: f64, _: &ShipState| ControlInput::new(p.settings.rudder * (t / 60.0).sin(), n);
        let setup = SimulationSetup {
            initial_input: ControlInput::new(0.0, n),
            ..SimulationSetup::default()
        };
        let cfg = SimulationConfig::fixed(3600.0, 0.1);
        let t = simulate(p.model, &mut c, &setup, &cfg)?;
        let ratio = t.stats.real_time_ratio;
        Ok((ratio < 1.0, ratio, format!("{:.3} s wall time", t.stats.wall_time_s)))
    })();
    finish(it, out)
}

/// Runs every probe on `params`. The parameters are not sign-checked, so
/// deliberately broken sets can be examined.
pub fn check_requirements(name: &str, params: &MmgParams, settings: ProbeSettings) -> Result<RequirementReport> {
    let model = MmgModel::new(*params)?;
    let p = Probe {
        model: &model,
        settings,
    };
    let items = vec![
        origin_stability(&p),
        hull_resistance(&p),
        stability_depends(&p),
        no_improbable_motion(&p),
        rudder_turning(&p),
        speed_follows_revolutions(&p),
        steering_varies(&p),
        thruster_fades(&p),
        reversal_turning(&p),
        leeward_drift(&p),
        actuator_delay(&p),
        actuator_limits(&p),
        automatic_step(&p),
        real_time(&p),
    ];
    debug_assert!(items.iter().map(|i| i.id).eq(REQUIREMENT_IDS));
    Ok(RequirementReport {
        ship: name.to_string(),
        items,
        not_applicable: vec!["wave disturbance: no wave model is implemented".to_string()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_finds_shift() {
        let x: Vec<f64> = (0..200).map(|i| ((i / 13) % 2) as f64).collect();
        let mut y = vec![0.0; 7];
        y.extend_from_slice(&x[..193]);
        assert_eq!(correlation_lag(&x, &y, 30), 7);
    }
}

#[cfg(test)]
mod ship_tests {
    use super::*;
    use crate::config::bundled_ship;

    #[test]
    fn bundled_ship_meets_every_item() {
        let ship = bundled_ship();
        let report = check_requirements(&ship.name, &ship.mmg_params().unwrap(), ProbeSettings::default()).unwrap();
        for it in &report.items {
            eprintln!("{} {} {} | {}", it.id, it.passed, it.measured, it.detail);
        }
        assert!(report.all_passed());
        assert_eq!(report.passed_count(), REQUIREMENT_IDS.len());
    }

    #[test]
    fn reversed_resistance_breaks_origin_stability() {
        let ship = bundled_ship();
        let mut params = ship.mmg_params().unwrap();
        params.hull.X0F = -params.hull.X0F;
        params.hull.X0A = -params.hull.X0A;
        params.hull.C_D = -params.hull.C_D;
        let report = check_requirements("broken", &params, ProbeSettings::default()).unwrap();
        assert!(!report.items[0].passed);
        assert!(!report.all_passed());
    }
}

//! Canonical manoeuvres as controllers, and the summary figures read off
//! their trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actuator::ActuatorLimits;
use crate::error::{Error, Result};
use crate::kinematics::{wrap_pi, ShipState};
use crate::model::ControlInput;
use crate::simulation::{Controller, Trajectory};

/// The two zig-zag switching thresholds are kept at least this far apart.
pub const ZIGZAG_HYSTERESIS: f64 = 0.1 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomBounds {
    pub seed: u64,
    /// hold time range, s
    pub hold_min: f64,
    pub hold_max: f64,
    /// rudder drawn from `[-delta_max, delta_max]`, rad
    pub delta_max: f64,
    /// propeller revolutions drawn from `[n_min, n_max]`, rps
    pub n_min: f64,
    pub n_max: f64,
}

impl RandomBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.hold_min > 0.0 && self.hold_max >= self.hold_min) {
            return Err(Error::invalid("maneuver.hold", "need 0 < hold_min <= hold_max"));
        }
        if !(self.delta_max >= 0.0) {
            return Err(Error::invalid("maneuver.delta_max", "must be >= 0"));
        }
        if !(self.n_max >= self.n_min) {
            return Err(Error::invalid("maneuver.n", "need n_min <= n_max"));
        }
        Ok(())
    }
}

/// Piecewise-constant input: `segments[i].1` holds from `segments[i].0`
/// until the next start time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSchedule {
    pub segments: Vec<(f64, ControlInput)>,
}

impl InputSchedule {
    pub fn at(&self, t: f64) -> ControlInput {
        let i = self.segments.partition_point(|s| s.0 <= t);
        self.segments[i.saturating_sub(1)].1
    }
}

/// Seeded random rudder and propeller schedule covering `[0, t_end]`.
pub fn random_maneuver(bounds: &RandomBounds, t_end: f64) -> Result<InputSchedule> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut segments = Vec::new();
    let mut t = 0.0;
    while t <= t_end || segments.is_empty() {
        let delta = if bounds.delta_max > 0.0 {
            rng.random_range(-bounds.delta_max..=bounds.delta_max)
        } else {
            0.0
        };
        let n_p = if bounds.n_max > bounds.n_min {
            rng.random_range(bounds.n_min..=bounds.n_max)
        } else {
            bounds.n_min
        };
        segments.push((t, ControlInput::new(delta, n_p)));
        t += if bounds.hold_max > bounds.hold_min {
            rng.random_range(bounds.hold_min..=bounds.hold_max)
        } else {
            bounds.hold_min
        };
    }
    Ok(InputSchedule { segments })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Maneuver {
    /// Rudder `+delta` first, reversed whenever the heading change passes
    /// `psi_switch` in the direction of the turn.
    Zigzag {
        delta: f64,
        psi_switch: f64,
        n_p: f64,
    },
    Turning {
        delta: f64,
        n_p: f64,
    },
    /// Constant side-thruster plan.
    Crabbing {
        n_bt: f64,
        n_st: f64,
        delta: f64,
        n_p: f64,
    },
    /// `n_ahead` until `t_reverse`, `n_reverse` afterwards.
    CrashAstern {
        n_ahead: f64,
        n_reverse: f64,
        t_reverse: f64,
    },
    Straight {
        n_p: f64,
    },
    Random(RandomBounds),
}

impl Maneuver {
    pub fn initial_command(&self) -> ControlInput {
        match *self {
            Maneuver::Zigzag { n_p, .. } | Maneuver::Turning { n_p, .. } | Maneuver::Straight { n_p } => {
                ControlInput::new(0.0, n_p)
            }
            Maneuver::Crabbing { n_p, .. } => ControlInput::new(0.0, n_p),
            Maneuver::CrashAstern { n_ahead, .. } => ControlInput::new(0.0, n_ahead),
            Maneuver::Random(_) => ControlInput::default(),
        }
    }

    /// Rejects manoeuvres that ask for more than the actuators can give.
    pub fn check_limits(&self, limits: &ActuatorLimits) -> Result<()> {
        let tol = 1e-12;
        let rudder = |d: f64| {
            if d.abs() > limits.delta_max + tol {
                Err(Error::invalid("maneuver.delta", "exceeds actuators.delta_max"))
            } else {
                Ok(())
            }
        };
        let prop = |n: f64| match limits.n_max {
            Some(m) if n.abs() > m + tol => Err(Error::invalid("maneuver.n_p", "exceeds actuators.n_max")),
            _ => Ok(()),
        };
        let thruster = |n: f64| match limits.thruster_n_max {
            Some(m) if n.abs() > m + tol => {
                Err(Error::invalid("maneuver.n_bt/n_st", "exceeds actuators.thruster_n_max"))
            }
            _ => Ok(()),
        };
        match *self {
            Maneuver::Zigzag { delta, psi_switch, n_p } => {
                if !(psi_switch >= 0.0) {
                    return Err(Error::invalid("maneuver.psi_switch", "must be >= 0"));
                }
                rudder(delta)?;
                prop(n_p)
            }
            Maneuver::Turning { delta, n_p } => {
                rudder(delta)?;
                prop(n_p)
            }
            Maneuver::Crabbing { n_bt, n_st, delta, n_p } => {
                rudder(delta)?;
                prop(n_p)?;
                thruster(n_bt)?;
                thruster(n_st)
            }
            Maneuver::CrashAstern {
                n_ahead,
                n_reverse,
                t_reverse,
            } => {
                if !(t_reverse >= 0.0) {
                    return Err(Error::invalid("maneuver.t_reverse", "must be >= 0"));
                }
                prop(n_ahead)?;
                prop(n_reverse)
            }
            Maneuver::Straight { n_p } => prop(n_p),
            Maneuver::Random(b) => {
                b.validate()?;
                rudder(b.delta_max)?;
                prop(b.n_min)?;
                prop(b.n_max)
            }
        }
    }

    /// Controller for a run of length `t_end` starting from `initial`.
    pub fn controller(&self, initial: &ShipState, t_end: f64) -> Result<ManeuverController> {
        let schedule = match self {
            Maneuver::Random(b) => Some(random_maneuver(b, t_end)?),
            _ => None,
        };
        Ok(ManeuverController {
            maneuver: *self,
            psi0: initial.psi,
            zigzag_sign: 1.0,
            schedule,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ManeuverController {
    maneuver: Maneuver,
    psi0: f64,
    zigzag_sign: f64,
    schedule: Option<InputSchedule>,
}

impl Controller for ManeuverController {
    fn command(&mut self, t: f64, state: &ShipState) -> ControlInput {
        match self.maneuver {
            Maneuver::Zigzag { delta, psi_switch, n_p } => {
                let threshold = psi_switch.max(0.5 * ZIGZAG_HYSTERESIS);
                let change = wrap_pi(state.psi - self.psi0);
                if self.zigzag_sign > 0.0 && change >= threshold {
                    self.zigzag_sign = -1.0;
                } else if self.zigzag_sign < 0.0 && change <= -threshold {
                    self.zigzag_sign = 1.0;
                }
                ControlInput::new(self.zigzag_sign * delta, n_p)
            }
            Maneuver::Turning { delta, n_p } => ControlInput::new(delta, n_p),
            Maneuver::Crabbing { n_bt, n_st, delta, n_p } => ControlInput { delta, n_p, n_bt, n_st },
            Maneuver::CrashAstern {
                n_ahead,
                n_reverse,
                t_reverse,
            } => ControlInput::new(0.0, if t >= t_reverse { n_reverse } else { n_ahead }),
            Maneuver::Straight { n_p } => ControlInput::new(0.0, n_p),
            Maneuver::Random(_) => self
                .schedule
                .as_ref()
                .expect("schedule built with the controller")
                .at(t),
        }
    }
}

/// Position in the frame of the initial heading: `(along, across)`.
fn track_frame(s: &ShipState, origin: &ShipState) -> (f64, f64) {
    let (dx, dy) = (s.x0 - origin.x0, s.y0 - origin.y0);
    let (sn, cs) = origin.psi.sin_cos();
    (dx * cs + dy * sn, -dx * sn + dy * cs)
}

/// Unwrapped heading change from the first sample.
pub fn heading_change(traj: &Trajectory) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut acc = 0.0;
    let mut prev = traj.samples.first().map(|s| s.state.psi).unwrap_or(0.0);
    for s in &traj.samples {
        acc += wrap_pi(s.state.psi - prev);
        prev = s.state.psi;
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningSummary {
    /// along-track distance when the heading has changed by 90 degrees, m
    pub advance: Option<f64>,
    /// cross-track distance at 90 degrees, m
    pub transfer: Option<f64>,
    /// cross-track distance at 180 degrees, m
    pub tactical_diameter: Option<f64>,
}

fn crossing(traj: &Trajectory, psi: &[f64], target: f64) -> Option<(f64, f64)> {
    let origin = &traj.samples[0].state;
    for i in 1..psi.len() {
        let (a, b) = (psi[i - 1].abs(), psi[i].abs());
        if a < target && b >= target {
            let f = (target - a) / (b - a);
            let p0 = track_frame(&traj.samples[i - 1].state, origin);
            let p1 = track_frame(&traj.samples[i].state, origin);
            return Some((p0.0 + f * (p1.0 - p0.0), p0.1 + f * (p1.1 - p0.1)));
        }
    }
    None
}

pub fn turning_summary(traj: &Trajectory) -> TurningSummary {
    let psi = heading_change(traj);
    let quarter = crossing(traj, &psi, std::f64::consts::FRAC_PI_2);
    let half = crossing(traj, &psi, std::f64::consts::PI);
    TurningSummary {
        advance: quarter.map(|p| p.0),
        transfer: quarter.map(|p| p.1.abs()),
        tactical_diameter: half.map(|p| p.1.abs()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZigzagSummary {
    /// overshoot angle after each rudder reversal, rad
    pub overshoots: Vec<f64>,
}

/// Overshoot after each reversal of the commanded rudder: the heading
/// excursion beyond the switching heading before the turn is checked.
pub fn zigzag_summary(traj: &Trajectory, psi_switch: f64) -> ZigzagSummary {
    let psi = heading_change(traj);
    let cmd: Vec<f64> = traj.samples.iter().map(|s| s.command.delta).collect();
    let switches: Vec<usize> = (1..cmd.len())
        .filter(|&i| cmd[i] != 0.0 && cmd[i - 1] != 0.0 && cmd[i].signum() != cmd[i - 1].signum())
        .collect();
    let mut overshoots = Vec::new();
    for (k, &i) in switches.iter().enumerate() {
        let end = switches.get(k + 1).copied().unwrap_or(psi.len());
        // the turn that is being checked went in the direction of the old rudder
        let dir = cmd[i - 1].signum();
        let peak = psi[i..end].iter().map(|p| dir * p).fold(f64::NEG_INFINITY, f64::max);
        // only complete peaks count: the heading must have turned back
        let last = dir * psi[end - 1];
        if end < psi.len() || last < peak {
            overshoots.push(peak - psi_switch);
        }
    }
    ZigzagSummary { overshoots }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingSummary {
    /// time from reversal to the first zero of `u`, s
    pub stopping_time: Option<f64>,
    /// along-track distance covered in that time, m
    pub stopping_distance: Option<f64>,
    /// cross-track deviation at that time, m
    pub lateral_deviation: Option<f64>,
}

pub fn stopping_summary(traj: &Trajectory, t_reverse: f64) -> StoppingSummary {
    let Some(start) = traj.samples.iter().position(|s| s.t >= t_reverse) else {
        return StoppingSummary {
            stopping_time: None,
            stopping_distance: None,
            lateral_deviation: None,
        };
    };
    let origin = traj.samples[start].state;
    for i in start + 1..traj.samples.len() {
        let (a, b) = (&traj.samples[i - 1], &traj.samples[i]);
        if a.state.u > 0.0 && b.state.u <= 0.0 {
            let f = a.state.u / (a.state.u - b.state.u);
            let p0 = track_frame(&a.state, &origin);
            let p1 = track_frame(&b.state, &origin);
            return StoppingSummary {
                stopping_time: Some(a.t + f * (b.t - a.t) - traj.samples[start].t),
                stopping_distance: Some(p0.0 + f * (p1.0 - p0.0)),
                lateral_deviation: Some(p0.1 + f * (p1.1 - p0.1)),
            };
        }
    }
    StoppingSummary {
        stopping_time: None,
        stopping_distance: None,
        lateral_deviation: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManeuverSummary {
    Turning(TurningSummary),
    Zigzag(ZigzagSummary),
    Stopping(StoppingSummary),
    /// final position and velocity only
    Final {
        x0: f64,
        y0: f64,
        psi: f64,
        u: f64,
        v_m: f64,
        r: f64,
    },
}

pub fn summarize(maneuver: &Maneuver, traj: &Trajectory) -> ManeuverSummary {
    match maneuver {
        Maneuver::Turning { .. } => ManeuverSummary::Turning(turning_summary(traj)),
        Maneuver::Zigzag { psi_switch, .. } => ManeuverSummary::Zigzag(zigzag_summary(traj, *psi_switch)),
        Maneuver::CrashAstern { t_reverse, .. } => ManeuverSummary::Stopping(stopping_summary(traj, *t_reverse)),
        _ => {
            let s = traj.last().state;
            ManeuverSummary::Final {
                x0: s.x0,
                y0: s.y0,
                psi: s.psi,
                u: s.u,
                v_m: s.v_m,
                r: s.r,
            }
        }
    }
}

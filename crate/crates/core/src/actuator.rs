//! Realized actuator dynamics: dead time, first-order lag, rate limit and
//! magnitude limit, applied in that order to each channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ControlInput;

/// Tolerance used when a delayed query time lands on a stored sample.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorLimits {
    /// rad
    pub delta_max: f64,
    /// rad/s, unlimited when absent
    #[serde(default)]
    pub delta_rate_max: Option<f64>,
    /// rps
    #[serde(default)]
    pub n_max: Option<f64>,
    /// rps/s
    #[serde(default)]
    pub n_rate_max: Option<f64>,
    /// side thrusters, rps
    #[serde(default)]
    pub thruster_n_max: Option<f64>,
    #[serde(default)]
    pub thruster_rate_max: Option<f64>,
    /// s
    #[serde(default)]
    pub dead_time: f64,
    /// first-order lag time constant, s
    #[serde(default)]
    pub lag: f64,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self {
            delta_max: 35f64.to_radians(),
            delta_rate_max: None,
            n_max: None,
            n_rate_max: None,
            thruster_n_max: None,
            thruster_rate_max: None,
            dead_time: 0.0,
            lag: 0.0,
        }
    }
}

impl ActuatorLimits {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_max > 0.0) {
            return Err(Error::invalid("actuators.delta_max", "must be > 0"));
        }
        let optional = [
            ("actuators.delta_rate_max", self.delta_rate_max),
            ("actuators.n_max", self.n_max),
            ("actuators.n_rate_max", self.n_rate_max),
            ("actuators.thruster_n_max", self.thruster_n_max),
            ("actuators.thruster_rate_max", self.thruster_rate_max),
        ];
        for (name, v) in optional {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::invalid(name, "must be >= 0"));
                }
            }
        }
        for (name, v) in [("actuators.dead_time", self.dead_time), ("actuators.lag", self.lag)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    fn channel_limits(&self) -> [(f64, f64); 4] {
        let inf = f64::INFINITY;
        [
            (self.delta_max, self.delta_rate_max.unwrap_or(inf)),
            (self.n_max.unwrap_or(inf), self.n_rate_max.unwrap_or(inf)),
            (
                self.thruster_n_max.unwrap_or(inf),
                self.thruster_rate_max.unwrap_or(inf),
            ),
            (
                self.thruster_n_max.unwrap_or(inf),
                self.thruster_rate_max.unwrap_or(inf),
            ),
        ]
    }
}

/// Command history of one channel, read back with a delay. Before the first
/// sample it reports the initial value.
#[derive(Debug, Clone)]
struct DelayLine {
    initial: f64,
    samples: Vec<(f64, f64)>,
}

impl DelayLine {
    fn push(&mut self, t: f64, value: f64) {
        if let Some(last) = self.samples.last_mut() {
            if (t - last.0).abs() <= SNAP {
                last.1 = value;
                return;
            }
        }
        self.samples.push((t, value));
    }

    /// Value at `t`, linear between stored samples and held after the last.
    fn at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let Some(first) = s.first() else {
            return self.initial;
        };
        if t < first.0 - SNAP {
            return self.initial;
        }
        let idx = s.partition_point(|p| p.0 <= t + SNAP);
        if idx == 0 {
            return first.1;
        }
        let (t0, v0) = s[idx - 1];
        if (t - t0).abs() <= SNAP || idx == s.len() {
            return v0;
        }
        let (t1, v1) = s[idx];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn prune(&mut self, before: f64) {
        let keep = self.samples.partition_point(|p| p.0 < before).saturating_sub(1);
        if keep > 0 {
            self.samples.drain(..keep);
        }
    }
}

#[derive(Debug, Clone)]
struct Channel {
    max: f64,
    rate_max: f64,
    value: f64,
    delay: DelayLine,
}

impl Channel {
    fn step(&mut self, t: f64, command: f64, dt: f64, dead_time: f64, lag: f64) -> f64 {
        if self.delay.samples.is_empty() {
            // the signal is reconstructed linearly between step samples; the
            // initial value is the sample one step before the first command
            self.delay.push(t - dt, self.delay.initial);
        }
        self.delay.push(t, command);
        let delayed = self.delay.at(t - dead_time);
        let lagged = if lag > 0.0 {
            self.value + (delayed - self.value) * -(-dt / lag).exp_m1()
        } else {
            delayed
        };
        let max_change = self.rate_max * dt;
        let change = lagged - self.value;
        let limited = if change.abs() <= max_change {
            lagged
        } else {
            self.value + max_change.copysign(change)
        };
        self.value = limited.clamp(-self.max, self.max);
        self.delay.prune(t - dead_time);
        self.value
    }
}

/// Owned by one simulation loop.
#[derive(Debug, Clone)]
pub struct ActuatorState {
    limits: ActuatorLimits,
    channels: [Channel; 4],
}

fn to_array(i: &ControlInput) -> [f64; 4] {
    [i.delta, i.n_p, i.n_bt, i.n_st]
}

fn from_array(a: [f64; 4]) -> ControlInput {
    ControlInput {
        delta: a[0],
        n_p: a[1],
        n_bt: a[2],
        n_st: a[3],
    }
}

impl ActuatorState {
    /// The realized values start at `initial`, clamped to the limits; the
    /// delay line reports `initial` for every time before the first command.
    pub fn new(limits: ActuatorLimits, initial: ControlInput) -> Result<Self> {
        limits.validate()?;
        let init = to_array(&initial);
        let lims = limits.channel_limits();
        let channels = std::array::from_fn(|i| Channel {
            max: lims[i].0,
            rate_max: lims[i].1,
            value: init[i].clamp(-lims[i].0, lims[i].0),
            delay: DelayLine {
                initial: init[i],
                samples: Vec::new(),
            },
        });
        Ok(Self { limits, channels })
    }

    pub fn limits(&self) -> &ActuatorLimits {
        &self.limits
    }

    pub fn realized(&self) -> ControlInput {
        from_array(std::array::from_fn(|i| self.channels[i].value))
    }

    /// Advance by `dt` with `command` issued at time `t`; returns the value
    /// held over `[t, t + dt]`.
    pub fn step(&mut self, t: f64, command: &ControlInput, dt: f64) -> ControlInput {
        let c = to_array(command);
        let (dead, lag) = (self.limits.dead_time, self.limits.lag);
        from_array(std::array::from_fn(|i| self.channels[i].step(t, c[i], dt, dead, lag)))
    }
}

/// Functional form of [`ActuatorState::step`].
pub fn actuator_step(command: &ControlInput, state: &mut ActuatorState, t: f64, dt: f64) -> ControlInput {
    state.step(t, command, dt)
}

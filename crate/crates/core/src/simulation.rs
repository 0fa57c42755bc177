//! Time-stepping loop: controller, actuators, wind and model derivative
//! coupled into one trajectory.

use std::time::Instant;

use crate::actuator::{ActuatorLimits, ActuatorState};
use crate::environment::{WindConfig, WindProcess};
use crate::error::{Error, Result};
use crate::integrator::{rk4_step, AdaptiveConfig, Dp54, StepStats};
use crate::kinematics::{apparent_wind, wrap_pi, ApparentWind, ShipState, TrueWind};
use crate::model::{ControlInput, ForceBreakdown, ShipModel};

/// Speeds beyond this are treated as a numerical blow-up, m/s.
const SPEED_LIMIT: f64 = 1e4;

pub trait Controller {
    fn command(&mut self, t: f64, state: &ShipState) -> ControlInput;
}

impl<F: FnMut(f64, &ShipState) -> ControlInput> Controller for F {
    fn command(&mut self, t: f64, state: &ShipState) -> ControlInput {
        self(t, state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Fixed {
        dt: f64,
    },
    Adaptive {
        rel_tol: f64,
        abs_tol: f64,
        dt_min: f64,
        dt_max: f64,
    },
}

impl StepMode {
    pub fn adaptive(config: AdaptiveConfig) -> Self {
        StepMode::Adaptive {
            rel_tol: config.rel_tol,
            abs_tol: config.abs_tol,
            dt_min: config.dt_min,
            dt_max: config.dt_max,
        }
    }
}

/// Default controller sampling period, s.
pub const DEFAULT_CONTROL_PERIOD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub t_end: f64,
    pub mode: StepMode,
    /// Sample spacing of the recorded trajectory. In adaptive mode it is also
    /// the interval over which inputs are held; defaults to `dt` in fixed mode.
    pub output_interval: Option<f64>,
    pub control_period: f64,
    /// the caller asserts a real-time ratio below one
    pub realtime_check: bool,
}

impl SimulationConfig {
    pub fn fixed(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            mode: StepMode::Fixed { dt },
            output_interval: None,
            control_period: DEFAULT_CONTROL_PERIOD,
            realtime_check: false,
        }
    }

    pub fn adaptive(t_end: f64, config: AdaptiveConfig, output_interval: f64) -> Self {
        Self {
            t_end,
            mode: StepMode::adaptive(config),
            output_interval: Some(output_interval),
            control_period: DEFAULT_CONTROL_PERIOD,
            realtime_check: false,
        }
    }

    pub fn with_control_period(mut self, period: f64) -> Self {
        self.control_period = period;
        self
    }

    /// `(input interval, output stride)` after validation.
    fn intervals(&self) -> Result<(f64, usize)> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("t_end", "must be > 0"));
        }
        if !(self.control_period > 0.0) {
            return Err(Error::invalid("control_period", "must be > 0"));
        }
        let input = match self.mode {
            StepMode::Fixed { dt } => {
                if !(dt > 0.0) {
                    return Err(Error::invalid("dt", "must be > 0"));
                }
                dt
            }
            StepMode::Adaptive {
                rel_tol,
                abs_tol,
                dt_min,
                dt_max,
            } => {
                AdaptiveConfig {
                    rel_tol,
                    abs_tol,
                    dt_min,
                    dt_max,
                }
                .validate()?;
                self.output_interval
                    .ok_or_else(|| Error::invalid("output_interval", "required in adaptive mode"))?
            }
        };
        let out = self.output_interval.unwrap_or(input);
        if !(out > 0.0) {
            return Err(Error::invalid("output_interval", "must be > 0"));
        }
        let stride = (out / input).round();
        if stride < 1.0 || (stride * input - out).abs() > 1e-9 * out {
            return Err(Error::invalid("output_interval", "must be a multiple of the step"));
        }
        Ok((input, stride as usize))
    }
}

/// Initial conditions and environment of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimulationSetup {
    pub initial_state: ShipState,
    /// realized actuator values at `t = 0`
    pub initial_input: ControlInput,
    pub actuators: ActuatorLimits,
    pub wind: WindConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: ShipState,
    pub command: ControlInput,
    /// value held from this sample to the next integration boundary
    pub realized: ControlInput,
    pub true_wind: TrueWind,
    pub apparent_wind: ApparentWind,
    pub forces: ForceBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunStats {
    pub wall_time_s: f64,
    pub simulated_s: f64,
    /// wall time per simulated second
    pub real_time_ratio: f64,
    pub steps: StepStats,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: &'static str,
    pub component_labels: Vec<&'static str>,
    pub samples: Vec<Sample>,
    pub stats: RunStats,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn states(&self) -> Vec<ShipState> {
        self.samples.iter().map(|s| s.state).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }
}

fn check_state(state: &ShipState, t: f64) -> Result<()> {
    if !state.is_finite() || state.velocity_norm() > SPEED_LIMIT {
        return Err(Error::ModelBlewUp { t });
    }
    Ok(())
}

fn normalize_heading(y: &mut crate::kinematics::StateRate) {
    y[2] = wrap_pi(y[2]);
}

pub fn simulate(
    model: &dyn ShipModel,
    controller: &mut dyn Controller,
    setup: &SimulationSetup,
    config: &SimulationConfig,
) -> Result<Trajectory> {
    let (dt, stride) = config.intervals()?;
    let started = Instant::now();
    let mut actuators = ActuatorState::new(setup.actuators, setup.initial_input)?;
    let mut wind = WindProcess::new(setup.wind)?;

    let mut adaptive = match config.mode {
        StepMode::Adaptive {
            rel_tol,
            abs_tol,
            dt_min,
            dt_max,
        } => Some(Dp54::<6>::new(AdaptiveConfig {
            rel_tol,
            abs_tol,
            dt_min,
            dt_max,
        })?),
        StepMode::Fixed { .. } => None,
    };
    let mut fixed_stats = StepStats::default();

    let n_steps = (config.t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut state = setup.initial_state.normalized();
    check_state(&state, 0.0)?;
    let mut command = setup.initial_input;
    let mut next_control = 0.0;
    let mut samples = Vec::with_capacity(n_steps / stride + 2);

    let record = |t: f64, state: &ShipState, command: &ControlInput, realized: &ControlInput, tw: &TrueWind| Sample {
        t,
        state: *state,
        command: *command,
        realized: *realized,
        true_wind: *tw,
        apparent_wind: apparent_wind(state, tw),
        forces: model.forces(state, realized, tw),
    };

    for k in 0..n_steps {
        let t = k as f64 * dt;
        let h = if k + 1 == n_steps { config.t_end - t } else { dt };
        if t >= next_control - 1e-9 * config.control_period {
            command = controller.command(t, &state);
            next_control = ((t / config.control_period + 1e-9).floor() + 1.0) * config.control_period;
        }
        let realized = actuators.step(t, &command, h);
        let tw = wind.at(t);
        if k % stride == 0 {
            samples.push(record(t, &state, &command, &realized, &tw));
        }

        let mut f =
            |_t: f64, y: &crate::kinematics::StateRate| model.derivative(&ShipState::from_vector(y), &realized, &tw);
        let y0 = state.to_vector();
        let mut y1 = match adaptive.as_mut() {
            None => {
                let y = rk4_step(&mut f, t, &y0, h)?;
                fixed_stats.record_fixed(h);
                y
            }
            Some(dp) => {
                dp.reset_stage();
                dp.integrate(&mut f, t, y0, t + h, normalize_heading, |_, _| {})?
            }
        };
        normalize_heading(&mut y1);
        state = ShipState::from_vector(&y1);
        check_state(&state, t + h)?;
    }

    let tw = wind.at(config.t_end);
    samples.push(record(config.t_end, &state, &command, &actuators.realized(), &tw));

    let wall = started.elapsed().as_secs_f64();
    let steps = match adaptive {
        Some(dp) => dp.stats,
        None => fixed_stats,
    };
    Ok(Trajectory {
        model: model.name(),
        component_labels: model.component_labels().to_vec(),
        samples,
        stats: RunStats {
            wall_time_s: wall,
            simulated_s: config.t_end,
            real_time_ratio: wall / config.t_end,
            steps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{kt_step_response, NomotoKT};

    fn kt() -> NomotoKT {
        NomotoKT::new(0.08, 12.0).unwrap()
    }

    #[test]
    fn resting_trajectory() {
        let m = kt();
        let mut c = |_t: f64, _s: &ShipState| ControlInput::default();
        let traj = simulate(
            &m,
            &mut c,
            &SimulationSetup::default(),
            &SimulationConfig::fixed(50.0, 0.1),
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 501);
        assert!(traj.samples.iter().all(|s| s.state == ShipState::default()));
        assert_eq!(traj.last().t, 50.0);
    }

    #[test]
    fn kt_step_matches_closed_form() {
        let m = kt();
        let delta = 0.1;
        let mut c = |_t: f64, _s: &ShipState| ControlInput::new(delta, 0.0);
        let traj = simulate(
            &m,
            &mut c,
            &SimulationSetup::default(),
            &SimulationConfig::fixed(120.0, 0.1),
        )
        .unwrap();
        let scale = m.K * delta;
        for s in &traj.samples {
            let err = (s.state.r - kt_step_response(&m, delta, s.t)).abs() / scale;
            assert!(err < 1e-8, "t {} err {err}", s.t);
        }
    }

    #[test]
    fn zero_order_hold_on_control_period() {
        let m = kt();
        let mut calls = Vec::new();
        let mut c = |t: f64, _s: &ShipState| {
            calls.push(t);
            ControlInput::new((t * 0.37).sin() * 0.2, 0.0)
        };
        let traj = simulate(
            &m,
            &mut c,
            &SimulationSetup::default(),
            &SimulationConfig::fixed(20.0, 0.1),
        )
        .unwrap();
        assert_eq!(calls.len(), 20);
        let mut changes = Vec::new();
        for (i, w) in traj.samples.windows(2).enumerate() {
            if w[0].realized != w[1].realized {
                changes.push(i + 1);
            }
        }
        for w in changes.windows(2) {
            assert!(w[1] - w[0] >= 10, "{changes:?}");
        }
    }

    #[test]
    fn adaptive_matches_fine_fixed() {
        let m = kt();
        let mut c = |t: f64, _s: &ShipState| ControlInput::new(if t < 30.0 { 0.1 } else { -0.1 }, 0.0);
        let cfg = AdaptiveConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            dt_min: 1e-6,
            dt_max: 2.0,
        };
        let a = simulate(
            &m,
            &mut c,
            &SimulationSetup::default(),
            &SimulationConfig::adaptive(60.0, cfg, 1.0),
        )
        .unwrap();
        let mut c = |t: f64, _s: &ShipState| ControlInput::new(if t < 30.0 { 0.1 } else { -0.1 }, 0.0);
        let f = simulate(
            &m,
            &mut c,
            &SimulationSetup::default(),
            &SimulationConfig {
                output_interval: Some(1.0),
                ..SimulationConfig::fixed(60.0, 0.001)
            },
        )
        .unwrap();
        assert_eq!(a.samples.len(), f.samples.len());
        for (x, y) in a.samples.iter().zip(&f.samples) {
            assert!((x.t - y.t).abs() < 1e-9);
            assert!((x.state.r - y.state.r).abs() < 1e-5, "{} vs {}", x.state.r, y.state.r);
            assert!((x.state.psi - y.state.psi).abs() < 1e-5);
        }
        assert!(a.stats.steps.accepted < f.stats.steps.accepted);
    }

    #[test]
    fn rejects_bad_intervals() {
        let m = kt();
        let mut c = |_t: f64, _s: &ShipState| ControlInput::default();
        let cfg = SimulationConfig {
            output_interval: Some(0.15),
            ..SimulationConfig::fixed(10.0, 0.1)
        };
        assert!(simulate(&m, &mut c, &SimulationSetup::default(), &cfg).is_err());
        let cfg = SimulationConfig {
            output_interval: None,
            ..SimulationConfig::adaptive(10.0, AdaptiveConfig::default(), 1.0)
        };
        assert!(simulate(&m, &mut c, &SimulationSetup::default(), &cfg).is_err());
    }
}

//! TOML ship and scenario files.
//!
//! A ship file holds the parameters of every model that can describe the
//! vessel; a scenario file picks one of them, references the ship file by a
//! path relative to itself and adds the manoeuvre, initial state, wind,
//! actuator limits and integration settings. Angles in scenario files are in
//! degrees and carry a `_deg` suffix.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::abkowitz::{AbkowitzCoefficients, AbkowitzModel};
use crate::actuator::ActuatorLimits;
use crate::environment::{WindConfig, WindNoise};
use crate::error::{Error, Result};
use crate::fossen::{FossenModel, FossenParams};
use crate::integrator::AdaptiveConfig;
use crate::kinematics::{ShipGeometry, ShipState};
use crate::maneuver::{Maneuver, RandomBounds};
use crate::mmg::{
    HullCoeffs, MmgMassParams, MmgModel, MmgParams, PropellerParams, RudderParams, ThrusterSet, WindCoeffs,
};
use crate::model::{ControlInput, ShipModel};
use crate::response::{NomotoKT, NorrbinModel};
use crate::simulation::{SimulationConfig, SimulationSetup, StepMode};

const BUNDLED_SHIP: &str = include_str!("../data/synthetic_ship.toml");

/// Parse TOML into `T`, reporting the failing key path.
pub fn parse_toml<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<toml>", e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(path, inner.message().to_string())
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSection {
    pub K: f64,
    pub T: f64,
    #[serde(default)]
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShipConfig {
    #[serde(default)]
    pub name: String,
    pub geometry: ShipGeometry,
    #[serde(default)]
    pub wind: WindCoeffs,
    #[serde(default)]
    pub mass: Option<MmgMassParams>,
    #[serde(default)]
    pub hull: Option<HullCoeffs>,
    #[serde(default)]
    pub propeller: Option<PropellerParams>,
    #[serde(default)]
    pub rudder: Option<RudderParams>,
    #[serde(default)]
    pub thrusters: ThrusterSet,
    #[serde(default)]
    pub response: Option<ResponseSection>,
    #[serde(default)]
    pub abkowitz: Option<AbkowitzCoefficients>,
    #[serde(default)]
    pub fossen: Option<FossenParams>,
}

fn missing(section: &str) -> Error {
    Error::config(section, "section is required by the selected model")
}

impl ShipConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let ship: Self = parse_toml(text)?;
        ship.validate()?;
        Ok(ship)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read(path)?).map_err(|e| match e {
            Error::Config { path: key, message } => Error::config(format!("{}: {key}", path.display()), message),
            other => other,
        })
    }

    /// Parses without the sign and range checks, so that a deliberately
    /// broken parameter set can still be examined.
    pub fn load_unchecked(path: &Path) -> Result<Self> {
        parse_toml::<Self>(&read(path)?).map_err(|e| match e {
            Error::Config { path: key, message } => Error::config(format!("{}: {key}", path.display()), message),
            other => other,
        })
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.wind.validate()?;
        self.thrusters.validate()?;
        if let Some(m) = &self.mass {
            m.validate()?;
        }
        if let Some(h) = &self.hull {
            h.validate()?;
        }
        if let Some(p) = &self.propeller {
            p.validate()?;
        }
        if let Some(r) = &self.rudder {
            r.validate()?;
        }
        if let Some(r) = &self.response {
            NorrbinModel::new(r.K, r.T, r.c3)?;
        }
        if let Some(a) = &self.abkowitz {
            a.validate()?;
        }
        if let Some(f) = &self.fossen {
            f.validate()?;
        }
        Ok(())
    }

    pub fn mmg_params(&self) -> Result<MmgParams> {
        Ok(MmgParams {
            geometry: self.geometry,
            mass: self.mass.ok_or_else(|| missing("mass"))?,
            hull: self.hull.ok_or_else(|| missing("hull"))?,
            propeller: self.propeller.ok_or_else(|| missing("propeller"))?,
            rudder: self.rudder.ok_or_else(|| missing("rudder"))?,
            wind: self.wind,
            thrusters: self.thrusters,
        })
    }

    pub fn kt(&self) -> Result<NomotoKT> {
        let r = self.response.ok_or_else(|| missing("response"))?;
        NomotoKT::new(r.K, r.T)
    }

    pub fn norrbin(&self) -> Result<NorrbinModel> {
        let r = self.response.ok_or_else(|| missing("response"))?;
        NorrbinModel::new(r.K, r.T, r.c3)
    }

    /// Model selected by `kind`. With `symmetric` set, every coefficient
    /// that breaks port/starboard symmetry is dropped first.
    pub fn build_model(&self, kind: ModelKind, symmetric: bool) -> Result<Box<dyn ShipModel>> {
        Ok(match kind {
            ModelKind::Kt => Box::new(self.kt()?),
            ModelKind::Norrbin => Box::new(self.norrbin()?),
            ModelKind::Abkowitz => {
                let c = self.abkowitz.ok_or_else(|| missing("abkowitz"))?;
                Box::new(AbkowitzModel::new(if symmetric { c.laterally_symmetric() } else { c })?)
            }
            ModelKind::Mmg => {
                let p = self.mmg_params()?;
                let p = if symmetric { p.laterally_symmetric() } else { p };
                p.validate()?;
                Box::new(MmgModel::new(p)?)
            }
            ModelKind::Fossen => {
                let f = self.fossen.ok_or_else(|| missing("fossen"))?;
                Box::new(FossenModel::new(f, self.geometry, self.wind)?)
            }
        })
    }
}

/// Parameters of the synthetic harbour craft shipped with the crate.
pub fn bundled_ship() -> ShipConfig {
    ShipConfig::from_toml(BUNDLED_SHIP).expect("bundled ship file is valid")
}

/// Text of the bundled ship file.
pub fn bundled_ship_toml() -> &'static str {
    BUNDLED_SHIP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Kt,
    Norrbin,
    Abkowitz,
    Mmg,
    Fossen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManeuverSpec {
    Zigzag {
        delta_deg: f64,
        psi_switch_deg: f64,
        #[serde(default)]
        n_p: f64,
    },
    Turning {
        delta_deg: f64,
        #[serde(default)]
        n_p: f64,
    },
    Crabbing {
        #[serde(default)]
        n_bt: f64,
        #[serde(default)]
        n_st: f64,
        #[serde(default)]
        delta_deg: f64,
        #[serde(default)]
        n_p: f64,
    },
    CrashAstern {
        n_ahead: f64,
        n_reverse: f64,
        #[serde(default)]
        t_reverse: f64,
    },
    Straight {
        #[serde(default)]
        n_p: f64,
    },
    Random {
        seed: u64,
        hold_min: f64,
        hold_max: f64,
        delta_max_deg: f64,
        n_min: f64,
        n_max: f64,
    },
}

impl ManeuverSpec {
    pub fn to_maneuver(&self) -> Maneuver {
        let rad = f64::to_radians;
        match *self {
            ManeuverSpec::Zigzag {
                delta_deg,
                psi_switch_deg,
                n_p,
            } => Maneuver::Zigzag {
                delta: rad(delta_deg),
                psi_switch: rad(psi_switch_deg),
                n_p,
            },
            ManeuverSpec::Turning { delta_deg, n_p } => Maneuver::Turning {
                delta: rad(delta_deg),
                n_p,
            },
            ManeuverSpec::Crabbing {
                n_bt,
                n_st,
                delta_deg,
                n_p,
            } => Maneuver::Crabbing {
                n_bt,
                n_st,
                delta: rad(delta_deg),
                n_p,
            },
            ManeuverSpec::CrashAstern {
                n_ahead,
                n_reverse,
                t_reverse,
            } => Maneuver::CrashAstern {
                n_ahead,
                n_reverse,
                t_reverse,
            },
            ManeuverSpec::Straight { n_p } => Maneuver::Straight { n_p },
            ManeuverSpec::Random {
                seed,
                hold_min,
                hold_max,
                delta_max_deg,
                n_min,
                n_max,
            } => Maneuver::Random(RandomBounds {
                seed,
                hold_min,
                hold_max,
                delta_max: rad(delta_max_deg),
                n_min,
                n_max,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
    #[serde(default)]
    pub psi_deg: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub v_m: f64,
    #[serde(default)]
    pub r_deg_s: f64,
    /// realized propeller revolutions at `t = 0`; defaults to the
    /// manoeuvre's initial setting
    #[serde(default)]
    pub n_p: Option<f64>,
}

impl InitialSpec {
    pub fn state(&self) -> ShipState {
        ShipState::new(
            self.x0,
            self.y0,
            self.psi_deg.to_radians(),
            self.u,
            self.v_m,
            self.r_deg_s.to_radians(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub speed_amplitude: f64,
    #[serde(default)]
    pub direction_amplitude_deg: f64,
    pub time_constant: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid_dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSpec {
    #[serde(default)]
    pub speed: f64,
    /// direction the wind blows from, clockwise from north
    #[serde(default)]
    pub direction_deg: f64,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

impl WindSpec {
    pub fn to_config(&self) -> WindConfig {
        WindConfig {
            speed: self.speed,
            direction: self.direction_deg.to_radians(),
            noise: self.noise.map(|n| WindNoise {
                speed_amplitude: n.speed_amplitude,
                direction_amplitude: n.direction_amplitude_deg.to_radians(),
                time_constant: n.time_constant,
                seed: n.seed,
                grid_dt: n.grid_dt.unwrap_or(0.1),
            }),
        }
    }
}

fn default_delta_max_deg() -> f64 {
    35.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorSpec {
    #[serde(default = "default_delta_max_deg")]
    pub delta_max_deg: f64,
    #[serde(default)]
    pub delta_rate_max_deg: Option<f64>,
    #[serde(default)]
    pub n_max: Option<f64>,
    #[serde(default)]
    pub n_rate_max: Option<f64>,
    #[serde(default)]
    pub thruster_n_max: Option<f64>,
    #[serde(default)]
    pub thruster_rate_max: Option<f64>,
    #[serde(default)]
    pub dead_time: f64,
    #[serde(default)]
    pub lag: f64,
}

impl Default for ActuatorSpec {
    fn default() -> Self {
        Self {
            delta_max_deg: default_delta_max_deg(),
            delta_rate_max_deg: None,
            n_max: None,
            n_rate_max: None,
            thruster_n_max: None,
            thruster_rate_max: None,
            dead_time: 0.0,
            lag: 0.0,
        }
    }
}

impl ActuatorSpec {
    pub fn to_limits(&self) -> ActuatorLimits {
        ActuatorLimits {
            delta_max: self.delta_max_deg.to_radians(),
            delta_rate_max: self.delta_rate_max_deg.map(f64::to_radians),
            n_max: self.n_max,
            n_rate_max: self.n_rate_max,
            thruster_n_max: self.thruster_n_max,
            thruster_rate_max: self.thruster_rate_max,
            dead_time: self.dead_time,
            lag: self.lag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Fixed,
    Adaptive,
}

fn default_control_period() -> f64 {
    crate::simulation::DEFAULT_CONTROL_PERIOD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub t_end: f64,
    #[serde(default)]
    pub mode: ModeSpec,
    /// fixed step, s
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub dt_min: Option<f64>,
    #[serde(default)]
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub output_interval: Option<f64>,
    #[serde(default = "default_control_period")]
    pub control_period: f64,
    #[serde(default)]
    pub realtime_check: bool,
}

impl SimulationSpec {
    pub fn to_config(&self) -> Result<SimulationConfig> {
        let mode = match self.mode {
            ModeSpec::Fixed => StepMode::Fixed {
                dt: self
                    .dt
                    .ok_or_else(|| Error::config("simulation.dt", "required in fixed mode"))?,
            },
            ModeSpec::Adaptive => {
                let d = AdaptiveConfig::default();
                StepMode::adaptive(AdaptiveConfig {
                    rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
                    abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
                    dt_min: self.dt_min.unwrap_or(d.dt_min),
                    dt_max: self.dt_max.unwrap_or(d.dt_max),
                })
            }
        };
        Ok(SimulationConfig {
            t_end: self.t_end,
            mode,
            output_interval: self.output_interval,
            control_period: self.control_period,
            realtime_check: self.realtime_check,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    /// ship file relative to the scenario file; the bundled ship when absent
    #[serde(default)]
    pub ship: Option<PathBuf>,
    pub model: ModelKind,
    /// drop asymmetric coefficients before building the model
    #[serde(default)]
    pub symmetric: bool,
    pub maneuver: ManeuverSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub wind: WindSpec,
    #[serde(default)]
    pub actuators: ActuatorSpec,
    pub simulation: SimulationSpec,
}

/// Scenario with the ship resolved and every unit converted.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub ship: ShipConfig,
    pub model: ModelKind,
    pub symmetric: bool,
    pub maneuver: Maneuver,
    pub setup: SimulationSetup,
    pub simulation: SimulationConfig,
}

impl Scenario {
    /// `base` resolves a relative ship path.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let file: ScenarioFile = parse_toml(text)?;
        let ship = match &file.ship {
            Some(p) => ShipConfig::load(&base.join(p))?,
            None => bundled_ship(),
        };
        Self::from_file(file, ship)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&read(path)?, base).map_err(|e| match e {
            Error::Config { path: key, message } => Error::config(format!("{}: {key}", path.display()), message),
            other => other,
        })
    }

    pub fn from_file(file: ScenarioFile, ship: ShipConfig) -> Result<Self> {
        let maneuver = file.maneuver.to_maneuver();
        let limits = file.actuators.to_limits();
        limits.validate()?;
        maneuver.check_limits(&limits)?;
        let wind = file.wind.to_config();
        wind.validate()?;
        let initial_cmd = maneuver.initial_command();
        let setup = SimulationSetup {
            initial_state: file.initial.state(),
            initial_input: ControlInput {
                n_p: file.initial.n_p.unwrap_or(initial_cmd.n_p),
                ..ControlInput::default()
            },
            actuators: limits,
            wind,
        };
        Ok(Self {
            name: file.name,
            ship,
            model: file.model,
            symmetric: file.symmetric,
            maneuver,
            setup,
            simulation: file.simulation.to_config()?,
        })
    }

    pub fn build_model(&self) -> Result<Box<dyn ShipModel>> {
        self.ship.build_model(self.model, self.symmetric)
    }
}

//! True wind as seen by a simulation: a steady component plus optional
//! low-pass filtered noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{wrap_two_pi, TrueWind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindNoise {
    /// amplitude of the uniform noise driving the speed filter, m/s
    pub speed_amplitude: f64,
    /// amplitude of the uniform noise driving the direction filter, rad
    #[serde(default)]
    pub direction_amplitude: f64,
    /// filter time constant, s
    pub time_constant: f64,
    #[serde(default)]
    pub seed: u64,
    /// spacing of the noise grid, s
    #[serde(default = "default_grid")]
    pub grid_dt: f64,
}

fn default_grid() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindConfig {
    /// m/s
    #[serde(default)]
    pub speed: f64,
    /// direction the wind blows from, rad clockwise from north
    #[serde(default)]
    pub direction: f64,
    #[serde(default)]
    pub noise: Option<WindNoise>,
}

impl WindConfig {
    pub fn steady(speed: f64, direction: f64) -> Self {
        Self {
            speed,
            direction,
            noise: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        TrueWind::new(self.speed, self.direction)?;
        if let Some(n) = &self.noise {
            if !(n.time_constant > 0.0 && n.grid_dt > 0.0) {
                return Err(Error::invalid("wind.noise", "time_constant and grid_dt must be > 0"));
            }
            if !(n.speed_amplitude >= 0.0 && n.direction_amplitude >= 0.0) {
                return Err(Error::invalid("wind.noise", "amplitudes must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Deterministic per seed: the filtered noise lives on a fixed time grid that
/// is extended on demand and interpolated linearly.
#[derive(Debug, Clone)]
pub struct WindProcess {
    config: WindConfig,
    rng: ChaCha8Rng,
    /// filtered (speed, direction) perturbations at `k * grid_dt`
    grid: Vec<(f64, f64)>,
}

impl WindProcess {
    pub fn new(config: WindConfig) -> Result<Self> {
        config.validate()?;
        let seed = config.noise.map(|n| n.seed).unwrap_or(0);
        Ok(Self {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            grid: vec![(0.0, 0.0)],
        })
    }

    pub fn config(&self) -> &WindConfig {
        &self.config
    }

    fn extend_to(&mut self, k: usize, noise: &WindNoise) {
        let a = (-noise.grid_dt / noise.time_constant).exp();
        while self.grid.len() <= k {
            let (s, d) = *self.grid.last().unwrap();
            let es: f64 = self.rng.random_range(-1.0..=1.0);
            let ed: f64 = self.rng.random_range(-1.0..=1.0);
            self.grid.push((
                a * s + (1.0 - a) * noise.speed_amplitude * es,
                a * d + (1.0 - a) * noise.direction_amplitude * ed,
            ));
        }
    }

    pub fn at(&mut self, t: f64) -> TrueWind {
        let Some(noise) = self.config.noise else {
            return TrueWind {
                speed: self.config.speed,
                direction: wrap_two_pi(self.config.direction),
            };
        };
        let x = (t.max(0.0)) / noise.grid_dt;
        let k = x.floor() as usize;
        self.extend_to(k + 1, &noise);
        let f = x - k as f64;
        let (s0, d0) = self.grid[k];
        let (s1, d1) = self.grid[k + 1];
        TrueWind {
            speed: (self.config.speed + s0 + f * (s1 - s0)).max(0.0),
            direction: wrap_two_pi(self.config.direction + d0 + f * (d1 - d0)),
        }
    }
}

/// Wind at time `t` for a fresh process; repeated calls with the same
/// configuration return identical values.
pub fn wind_at(t: f64, config: &WindConfig) -> Result<TrueWind> {
    Ok(WindProcess::new(*config)?.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn noisy(seed: u64) -> WindConfig {
        WindConfig {
            speed: 5.0,
            direction: 1.0,
            noise: Some(WindNoise {
                speed_amplitude: 2.0,
                direction_amplitude: 0.2,
                time_constant: 3.0,
                seed,
                grid_dt: 0.1,
            }),
        }
    }

    #[test]
    fn steady_is_constant() {
        let c = WindConfig::steady(10.0, PI);
        let mut p = WindProcess::new(c).unwrap();
        for t in [0.0, 1.0, 100.0, 3600.0] {
            assert_eq!(
                p.at(t),
                TrueWind {
                    speed: 10.0,
                    direction: PI
                }
            );
        }
    }

    #[test]
    fn default_is_calm_and_deterministic() {
        let c = WindConfig::default();
        assert!(c.noise.is_none());
        assert_eq!(wind_at(12.0, &c).unwrap(), TrueWind::calm());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let mut a = WindProcess::new(noisy(7)).unwrap();
        let mut b = WindProcess::new(noisy(7)).unwrap();
        let mut c = WindProcess::new(noisy(8)).unwrap();
        let ta: Vec<_> = (0..500).map(|i| a.at(i as f64 * 0.37)).collect();
        // query order must not matter
        let tb: Vec<_> = (0..500).rev().map(|i| b.at(i as f64 * 0.37)).rev().collect();
        let tc: Vec<_> = (0..500).map(|i| c.at(i as f64 * 0.37)).collect();
        assert_eq!(ta, tb);
        assert_ne!(ta, tc);
        assert!(ta.iter().any(|w| w.speed != 5.0));
        assert!(ta.iter().all(|w| (w.speed - 5.0).abs() <= 2.0));
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = noisy(1);
        c.noise.as_mut().unwrap().time_constant = 0.0;
        assert!(WindProcess::new(c).is_err());
        assert!(WindProcess::new(WindConfig::steady(-1.0, 0.0)).is_err());
    }
}

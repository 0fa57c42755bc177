//! Classical RK4 and an adaptive Dormand-Prince 5(4) pair with cubic Hermite
//! dense output.

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check<const N: usize>(k: &SVector<f64, N>, t: f64) -> Result<()> {
    if k.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::ModelBlewUp { t })
    }
}

pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &SVector<f64, N>, h: f64) -> Result<SVector<f64, N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let k1 = f(t, y);
    check(&k1, t)?;
    let k2 = f(t + 0.5 * h, &(y + 0.5 * h * k1));
    check(&k2, t)?;
    let k3 = f(t + 0.5 * h, &(y + 0.5 * h * k2));
    check(&k3, t)?;
    let k4 = f(t + h, &(y + h * k3));
    check(&k4, t)?;
    Ok(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            dt_min: 1e-6,
            dt_max: 1.0,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("rel_tol/abs_tol", "tolerances must be > 0"));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return Err(Error::invalid("dt_min/dt_max", "need 0 < dt_min <= dt_max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// smallest accepted step not shortened to land on an interval end
    pub min_step: f64,
    pub max_step: f64,
    pub rhs_evals: usize,
}

impl Default for StepStats {
    fn default() -> Self {
        Self {
            accepted: 0,
            rejected: 0,
            min_step: f64::INFINITY,
            max_step: 0.0,
            rhs_evals: 0,
        }
    }
}

impl StepStats {
    fn record(&mut self, h: f64, truncated: bool) {
        self.accepted += 1;
        if !truncated {
            self.min_step = self.min_step.min(h);
        }
        self.max_step = self.max_step.max(h);
    }

    /// Book-keeping for a fixed-step method.
    pub fn record_fixed(&mut self, h: f64) {
        self.record(h, false);
        self.rhs_evals += 4;
    }

    /// Smallest accepted step, falling back to the largest when every step
    /// was cut short by an interval end.
    pub fn smallest_step(&self) -> f64 {
        if self.min_step.is_finite() {
            self.min_step
        } else {
            self.max_step
        }
    }
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combo<const N: usize>(y: &SVector<f64, N>, h: f64, a: &[f64], k: &[SVector<f64, N>]) -> SVector<f64, N> {
    let mut out = *y;
    for (ai, ki) in a.iter().zip(k) {
        if *ai != 0.0 {
            out += (h * ai) * ki;
        }
    }
    out
}

/// Endpoint of an accepted step, used for dense output.
#[derive(Debug, Clone, Copy)]
pub struct StepPoint<const N: usize> {
    pub t: f64,
    pub y: SVector<f64, N>,
    pub f: SVector<f64, N>,
}

/// Cubic Hermite interpolation between two accepted step endpoints.
pub fn hermite<const N: usize>(a: &StepPoint<N>, b: &StepPoint<N>, t: f64) -> SVector<f64, N> {
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * a.y + (h10 * h) * a.f + h01 * b.y + (h11 * h) * b.f
}

/// Stateful Dormand-Prince stepper. Keeps the step-size proposal and the
/// first-same-as-last stage between calls.
#[derive(Debug, Clone)]
pub struct Dp54<const N: usize> {
    pub config: AdaptiveConfig,
    pub stats: StepStats,
    h: f64,
    fsal: Option<(f64, SVector<f64, N>)>,
}

impl<const N: usize> Dp54<N> {
    pub fn new(config: AdaptiveConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            stats: StepStats::default(),
            h: 0.0,
            fsal: None,
        })
    }

    /// Forget the cached stage, e.g. after the right-hand side changed.
    pub fn reset_stage(&mut self) {
        self.fsal = None;
    }

    fn error_norm(&self, y0: &SVector<f64, N>, y1: &SVector<f64, N>, e: &SVector<f64, N>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            let scale = self.config.abs_tol + self.config.rel_tol * y0[i].abs().max(y1[i].abs());
            worst = worst.max(e[i].abs() / scale);
        }
        worst
    }

    /// Integrate from `(t0, y0)` to exactly `t1`. `post_step` may adjust the
    /// state after every accepted step; `on_accept` sees both endpoints.
    pub fn integrate<F, P, A>(
        &mut self,
        f: &mut F,
        t0: f64,
        y0: SVector<f64, N>,
        t1: f64,
        mut post_step: P,
        mut on_accept: A,
    ) -> Result<SVector<f64, N>>
    where
        F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
        P: FnMut(&mut SVector<f64, N>),
        A: FnMut(&StepPoint<N>, &StepPoint<N>),
    {
        let cfg = self.config;
        if self.h <= 0.0 {
            self.h = (1e-2 * (t1 - t0)).clamp(cfg.dt_min, cfg.dt_max);
        }
        let end_tol = 1e-12 * t1.abs().max(1.0);
        let mut t = t0;
        let mut y = y0;
        while t1 - t > end_tol {
            let k1 = match self.fsal {
                Some((tf, k)) if tf == t => k,
                _ => {
                    self.stats.rhs_evals += 1;
                    let k = f(t, &y);
                    check(&k, t)?;
                    k
                }
            };
            let remaining = t1 - t;
            let mut h = self.h.clamp(cfg.dt_min, cfg.dt_max);
            let truncated = h >= remaining - end_tol;
            if truncated {
                h = remaining;
            }

            let mut k = [k1; 7];
            let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
            for (s, a) in rows.iter().enumerate() {
                k[s + 1] = f(t + C[s + 1] * h, &combo(&y, h, a, &k[..=s]));
            }
            let y5 = combo(&y, h, &B, &k[..6]);
            k[6] = f(t + h, &y5);
            self.stats.rhs_evals += 6;

            let mut e = SVector::<f64, N>::zeros();
            for (ei, ki) in E.iter().zip(&k) {
                e += (h * ei) * ki;
            }
            let finite = k.iter().all(|ki| ki.iter().all(|x| x.is_finite()));
            let err = if finite {
                self.error_norm(&y, &y5, &e)
            } else {
                f64::INFINITY
            };

            if err <= 1.0 {
                let a = StepPoint { t, y, f: k1 };
                t = if truncated { t1 } else { t + h };
                y = y5;
                post_step(&mut y);
                self.stats.record(h, truncated);
                self.fsal = Some((t, k[6]));
                on_accept(&a, &StepPoint { t, y, f: k[6] });
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                let proposal = h * factor;
                self.h = if truncated { proposal.max(self.h) } else { proposal };
            } else {
                self.stats.rejected += 1;
                if h <= cfg.dt_min * (1.0 + 1e-12) {
                    if !finite {
                        return Err(Error::ModelBlewUp { t });
                    }
                    return Err(Error::StepSizeUnderflow { t });
                }
                let factor = if finite {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.5)
                } else {
                    0.1
                };
                self.h = (h * factor).max(cfg.dt_min);
                // keep the cached k1, it belongs to the unchanged (t, y)
                self.fsal = Some((t, k1));
            }
        }
        Ok(y)
    }
}

#[derive(Debug, Clone)]
pub struct AdaptiveSolution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<SVector<f64, N>>,
    pub stats: StepStats,
}

/// Adaptive integration of an autonomous-input system from `t0` to `t_end`,
/// sampled every `sample_interval` through the dense output.
pub fn adaptive_integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: SVector<f64, N>,
    t_end: f64,
    sample_interval: f64,
    config: AdaptiveConfig,
) -> Result<AdaptiveSolution<N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    if !(t_end > t0) {
        return Err(Error::invalid("t_end", "must be after the start time"));
    }
    if !(sample_interval > 0.0) {
        return Err(Error::invalid("sample_interval", "must be > 0"));
    }
    let mut stepper = Dp54::new(config)?;
    let n_samples = ((t_end - t0) / sample_interval + 1e-9).floor() as usize;
    let grid = |i: usize| {
        if i == n_samples {
            t_end.min(t0 + i as f64 * sample_interval)
        } else {
            t0 + i as f64 * sample_interval
        }
    };
    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut next = 1;
    stepper.integrate(
        &mut f,
        t0,
        y0,
        t_end,
        |_| {},
        |a, b| {
            while next <= n_samples && grid(next) <= b.t + 1e-12 * b.t.abs().max(1.0) {
                let ts = grid(next);
                times.push(ts);
                states.push(if (ts - b.t).abs() <= 1e-12 * b.t.abs().max(1.0) {
                    b.y
                } else {
                    hermite(a, b, ts)
                });
                next += 1;
            }
        },
    )?;
    let stats = stepper.stats;
    Ok(AdaptiveSolution { times, states, stats })
}

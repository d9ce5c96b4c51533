//! Coning-motion truth, gyroscope error injection and a fine-step quaternion
//! ODE oracle.
//!
//! The coning body rotates by a fixed half-angle `α` about an axis
//! `e(t) = [0, cos Ωt, sin Ωt]` that itself sweeps around the reference x axis:
//!
//! ```text
//! q(t) = cos(α/2) + sin(α/2) e(t)
//! ω(t) = Ω [−2 sin²(α/2), −sin α sin Ωt, sin α cos Ωt]
//! ```

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fitting::{SampleKind, SampleSet};
use crate::kinematics::{Quaternion, Vec3};

/// deg/h to rad/s.
pub const DEG_PER_HOUR: f64 = PI / 180.0 / 3600.0;
/// deg/√h to rad/√s.
pub const DEG_PER_SQRT_HOUR: f64 = PI / 180.0 / 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConingScenario {
    /// Half-angle, rad.
    pub alpha: f64,
    /// Coning frequency, rad/s.
    pub omega: f64,
    /// Sample period, s.
    pub period: f64,
    /// Samples per reconstruction window.
    pub samples: usize,
    /// Fit order.
    pub order: usize,
    /// Gyro bias, rad/s.
    pub bias: Vec3,
    /// Angle random walk, rad/√s.
    pub arw: f64,
    pub seed: u64,
}

impl ConingScenario {
    pub fn new(alpha: f64, omega: f64, period: f64, samples: usize, order: usize) -> Result<Self> {
        let sc = Self {
            alpha,
            omega,
            period,
            samples,
            order,
            bias: Vec3::zeros(),
            arw: 0.0,
            seed: 0,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Builds a scenario from degrees, multiples of π rad/s and a sample rate in Hz.
    pub fn from_degrees(alpha_deg: f64, freq_pi: f64, rate_hz: f64, samples: usize, order: usize) -> Result<Self> {
        Self::new(alpha_deg.to_radians(), freq_pi * PI, 1.0 / rate_hz, samples, order)
    }

    /// Adds sensor errors given in deg/h and deg/√h.
    pub fn with_sensor_errors(mut self, bias_deg_h: Vec3, arw_deg_sqrt_h: f64, seed: u64) -> Result<Self> {
        self.bias = bias_deg_h * DEG_PER_HOUR;
        self.arw = arw_deg_sqrt_h * DEG_PER_SQRT_HOUR;
        self.seed = seed;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < PI / 2.0) {
            return Err(Error::Domain { what: "coning half-angle must lie in (0, pi/2) rad", value: self.alpha });
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Domain { what: "coning frequency must be positive", value: self.omega });
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::Domain { what: "sample period must be positive", value: self.period });
        }
        if self.samples < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 samples per window, got {}", self.samples)));
        }
        if self.order >= self.samples {
            return Err(Error::InvalidInput(format!(
                "fit order {} must be below the sample count {}",
                self.order, self.samples
            )));
        }
        if !(self.arw >= 0.0 && self.arw.is_finite()) || !self.bias.iter().all(|b| b.is_finite()) {
            return Err(Error::InvalidInput("sensor error parameters must be finite, arw non-negative".into()));
        }
        Ok(())
    }

    pub fn has_sensor_errors(&self) -> bool {
        self.arw != 0.0 || self.bias != Vec3::zeros()
    }

    /// `N·T`.
    pub fn window_span(&self) -> f64 {
        self.samples as f64 * self.period
    }

    /// `2Ω sin(α/2)`, the constant magnitude of `ω`.
    pub fn rate_magnitude(&self) -> f64 {
        2.0 * self.omega * (self.alpha / 2.0).sin()
    }

    pub fn axis(&self, t: f64) -> Vec3 {
        let (s, c) = (self.omega * t).sin_cos();
        Vec3::new(0.0, c, s)
    }

    pub fn omega_at(&self, t: f64) -> Vec3 {
        let (s, c) = (self.omega * t).sin_cos();
        let half = (self.alpha / 2.0).sin();
        let sa = self.alpha.sin();
        Vec3::new(-2.0 * half * half, -sa * s, sa * c) * self.omega
    }

    pub fn truth_quaternion(&self, t: f64) -> Quaternion {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        Quaternion::from_parts(c, self.axis(t) * s)
    }

    pub fn truth_rodrigues(&self, t: f64) -> Vec3 {
        self.axis(t) * (2.0 * (self.alpha / 2.0).tan())
    }

    /// `q(t0)* ∘ q(t1)` evaluated in closed form.
    pub fn incremental_truth(&self, t0: f64, t1: f64) -> Quaternion {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        let d = self.omega * (t1 - t0);
        let m = self.omega * (t1 + t0) / 2.0;
        let sh = (d / 2.0).sin();
        let (sm, cm) = m.sin_cos();
        let w = 1.0 - 2.0 * s * s * sh * sh;
        let v = Vec3::new(-s * s * d.sin(), -2.0 * c * s * sm * sh, 2.0 * c * s * cm * sh);
        Quaternion::from_parts(w, v)
    }

    pub fn truth_sample(&self, t: f64) -> TruthSample {
        TruthSample {
            t,
            omega: self.omega_at(t),
            q_true: self.truth_quaternion(t),
            g_true: self.truth_rodrigues(t),
        }
    }

    /// Exact angular increment over `[(k−1)T, kT]`, `k >= 1`.
    pub fn increment(&self, k: usize) -> Vec3 {
        let t = self.period;
        self.increment_between((k as f64 - 1.0) * t, k as f64 * t)
    }

    /// Exact angular increment `∫ω dt` over `[t0, t1]`.
    pub fn increment_between(&self, t0: f64, t1: f64) -> Vec3 {
        let (s1, c1) = (self.omega * t1).sin_cos();
        let (s0, c0) = (self.omega * t0).sin_cos();
        let half = (self.alpha / 2.0).sin();
        let sa = self.alpha.sin();
        Vec3::new(-2.0 * self.omega * half * half * (t1 - t0), sa * (c1 - c0), sa * (s1 - s0))
    }

    /// Start epoch of window `w` (0-based).
    pub fn window_start(&self, w: usize) -> f64 {
        (w * self.samples) as f64 * self.period
    }

    /// Noise-free samples of window `w` with window-local epochs `T..NT`.
    pub fn window_samples(&self, w: usize, kind: SampleKind) -> Vec<Vec3> {
        let first = w * self.samples;
        (1..=self.samples)
            .map(|k| match kind {
                SampleKind::Velocity => self.omega_at((first + k) as f64 * self.period),
                SampleKind::Increment => self.increment(first + k),
            })
            .collect()
    }

    /// Window-local sample set, passed through `noise` when supplied.
    pub fn window_sample_set(&self, w: usize, kind: SampleKind, noise: Option<&mut SensorNoise>) -> Result<SampleSet> {
        let mut values = self.window_samples(w, kind);
        if let Some(n) = noise {
            n.corrupt(&mut values, kind);
        }
        SampleSet::uniform(kind, self.period, values)
    }

    /// A fresh noise generator seeded from this scenario.
    pub fn noise(&self) -> SensorNoise {
        SensorNoise::new(self.bias, self.arw, self.period, self.seed)
    }
}

pub fn coning_omega(sc: &ConingScenario, t: f64) -> Vec3 {
    sc.omega_at(t)
}

pub fn coning_truth_quaternion(sc: &ConingScenario, t: f64) -> Quaternion {
    sc.truth_quaternion(t)
}

pub fn coning_increments(sc: &ConingScenario, k: usize) -> Result<Vec3> {
    if k == 0 {
        return Err(Error::InvalidInput("increment index starts at 1".into()));
    }
    Ok(sc.increment(k))
}

/// Corrupts `values` with the scenario's sensor errors, drawing from a
/// generator freshly seeded with `sc.seed`.
pub fn corrupt(values: &[Vec3], kind: SampleKind, sc: &ConingScenario) -> Vec<Vec3> {
    let mut out = values.to_vec();
    sc.noise().corrupt(&mut out, kind);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthSample {
    pub t: f64,
    pub omega: Vec3,
    pub q_true: Quaternion,
    pub g_true: Vec3,
}

/// Bias plus angle random walk driven by a seeded ChaCha stream.
#[derive(Debug, Clone)]
pub struct SensorNoise {
    bias: Vec3,
    arw: f64,
    period: f64,
    rng: ChaCha8Rng,
}

impl SensorNoise {
    pub fn new(bias: Vec3, arw: f64, period: f64, seed: u64) -> Self {
        Self { bias, arw, period, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn bias(&self) -> Vec3 {
        self.bias
    }

    pub fn arw(&self) -> f64 {
        self.arw
    }

    fn eta(&mut self) -> Vec3 {
        Vector3::from_fn(|_, _| self.rng.sample::<f64, _>(StandardNormal))
    }

    pub fn corrupt(&mut self, values: &mut [Vec3], kind: SampleKind) {
        if self.arw == 0.0 && self.bias == Vec3::zeros() {
            return;
        }
        let t = self.period;
        for v in values.iter_mut() {
            let eta = self.eta();
            *v += match kind {
                SampleKind::Increment => self.bias * t + eta * (self.arw * t.sqrt()),
                SampleKind::Velocity => self.bias + eta * (self.arw / t.sqrt()),
            };
        }
    }

    /// Largest rate error one sample can carry, taking `k_sigma` standard
    /// deviations of the white part.
    pub fn rate_error_bound(&self, k_sigma: f64) -> f64 {
        self.bias.norm() + k_sigma * 3f64.sqrt() * self.arw / self.period.sqrt()
    }
}

/// Propagates `2q̇ = q ∘ ω` from the identity over `[t0, t1]` with classical
/// RK4, renormalizing after every step.
pub fn ode_oracle(omega_fn: impl Fn(f64) -> Vec3, t0: f64, t1: f64, step: f64) -> Result<Quaternion> {
    if !(t1 >= t0) || !(step > 0.0) {
        return Err(Error::InvalidInput(format!("bad propagation span [{t0}, {t1}] or step {step}")));
    }
    let steps = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let rate = |q: &Quaternion, t: f64| -> Result<Quaternion> {
        let w = omega_fn(t);
        if !w.iter().all(|c| c.is_finite()) {
            return Err(Error::Propagation(format!("non-finite angular velocity at t = {t}")));
        }
        Ok(q.multiply(&Quaternion::pure(w)).scale(0.5))
    };
    let mut q = Quaternion::identity();
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rate(&q, t)?;
        let k2 = rate(&q.add(&k1.scale(h / 2.0)), t + h / 2.0)?;
        let k3 = rate(&q.add(&k2.scale(h / 2.0)), t + h / 2.0)?;
        let k4 = rate(&q.add(&k3.scale(h)), t + h)?;
        let dq = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0);
        q = q.add(&dq).normalize()?;
    }
    Ok(q)
}

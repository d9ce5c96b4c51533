use std::fmt;
use std::str::FromStr;

use rodfiter_core::{ConingScenario, Method, SampleKind, Vec3};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Reconstruct,
    Compare,
    NoiseRun,
    SweepConvergence,
}

/// An attitude algorithm the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Iterative(Method),
    /// Two-sample rotation vector update, always on `N = 2` windows.
    Mainstream,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Iterative(Method::RodFIter),
        Algorithm::Iterative(Method::RotFIterT3),
        Algorithm::Iterative(Method::RotFIterT2),
        Algorithm::Mainstream,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Iterative(m) => m.name(),
            Algorithm::Mainstream => "mainstream",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected rodfiter, rotfiter-t3, rotfiter-t2 or mainstream)"))
    }
}

/// Validated-on-demand description of one harness run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Subcommand,
    pub alpha_deg: f64,
    /// Coning frequency in multiples of π rad/s.
    pub coning_freq_pi: f64,
    pub rate_hz: f64,
    pub samples: usize,
    /// Defaults to `samples − 1`.
    pub order: Option<usize>,
    pub iterations: usize,
    pub method: Algorithm,
    /// Defaults to increments, or velocities for the sweep.
    pub sample_kind: Option<SampleKind>,
    pub horizon_s: f64,
    pub bias_deg_h: [f64; 3],
    pub arw_deg_sqrt_h: f64,
    pub seed: u64,
    pub truncate_degree: Option<usize>,
    /// Evaluation points per window for the iterative methods.
    pub grid_points: usize,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            command: Subcommand::Reconstruct,
            alpha_deg: 10.0,
            coning_freq_pi: 0.74,
            rate_hz: 100.0,
            samples: 8,
            order: None,
            iterations: 7,
            method: Algorithm::Iterative(Method::RodFIter),
            sample_kind: None,
            horizon_s: 2.0,
            bias_deg_h: [0.0; 3],
            arw_deg_sqrt_h: 0.0,
            seed: 0,
            truncate_degree: None,
            grid_points: 20,
        }
    }
}

impl RunSpec {
    pub fn period(&self) -> f64 {
        1.0 / self.rate_hz
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(self.samples.saturating_sub(1))
    }

    pub fn sample_kind(&self) -> SampleKind {
        self.sample_kind.unwrap_or(match self.command {
            Subcommand::SweepConvergence => SampleKind::Velocity,
            _ => SampleKind::Increment,
        })
    }

    /// Checks every flag and builds the coning scenario.
    pub fn scenario(&self) -> Result<ConingScenario, CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return bad(format!("--rate-hz must be positive, got {}", self.rate_hz));
        }
        if self.iterations == 0 {
            return bad("--iterations must be at least 1".into());
        }
        if self.grid_points == 0 {
            return bad("evaluation grid needs at least one point".into());
        }
        if self.command != Subcommand::SweepConvergence {
            if !(self.horizon_s > 0.0 && self.horizon_s.is_finite()) {
                return bad(format!("--horizon-s must be positive, got {}", self.horizon_s));
            }
            let span = self.samples as f64 * self.period();
            if self.samples >= 2 && self.horizon_s + 1e-9 * span < span {
                return bad(format!("--horizon-s {} is shorter than one window ({span} s)", self.horizon_s));
            }
        }
        if self.truncate_degree == Some(0) {
            return bad("--truncate-degree must be at least 1".into());
        }
        if self.method == Algorithm::Mainstream && self.samples != 2 && self.command == Subcommand::Reconstruct {
            return bad("the mainstream method uses two-sample windows; pass --samples 2".into());
        }
        let sc = ConingScenario::from_degrees(
            self.alpha_deg,
            self.coning_freq_pi,
            self.rate_hz,
            self.samples,
            self.order(),
        )
        .and_then(|sc| sc.with_sensor_errors(Vec3::from(self.bias_deg_h), self.arw_deg_sqrt_h, self.seed))
        .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(sc)
    }
}

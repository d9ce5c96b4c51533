//! Functional iteration of kinematic-vector rate equations over one fitting
//! interval.
//!
//! Starting from `g_0 = 0`, each method computes
//!
//! ```text
//! g_{j+1}(τ) = (t_N/2) ∫_{-1}^{τ} K(g_j) ω̂ dτ'
//! ```
//!
//! in closed form on Chebyshev series, where the integrand operator `K` is
//!
//! * RodFIter: `I + ½ g× + ¼ g gᵀ` (exact Rodrigues vector rate),
//! * RotFIter-T3: `I + ½ g× + (1/12)(g×)²` (truncated rotation vector rate),
//! * RotFIter-T2: `I + ½ g×`.
//!
//! RodFIter converges to the true Rodrigues vector of `ω̂` when
//! `t_N·sup|ω̂| < 2`. The RotFIter variants converge to the solution of their
//! own approximate equation, not to the rotation vector.

use nalgebra::Vector3;

use crate::chebpoly::{chebyshev_nodes, ChebSeries3, TimeMap};
use crate::error::{Error, Result};
use crate::kinematics::{quat_from_rodrigues, quat_from_rotvec, Quaternion, Vec3};

/// Nodes used for iterate deltas.
pub const DELTA_NODES: usize = 65;
/// Nodes used for the sup-norm of `ω̂` in [`convergence_precondition`].
pub const PRECONDITION_NODES: usize = 129;
/// Consecutive delta increases that count as divergence.
pub const DIVERGENCE_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    RodFIter,
    RotFIterT3,
    RotFIterT2,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::RodFIter => "rodfiter",
            Method::RotFIterT3 => "rotfiter-t3",
            Method::RotFIterT2 => "rotfiter-t2",
        }
    }

    /// Quaternion of an iterate value, which is a Rodrigues vector for
    /// RodFIter and an (approximate) rotation vector otherwise.
    pub fn to_quaternion(&self, g: &Vec3) -> Quaternion {
        match self {
            Method::RodFIter => quat_from_rodrigues(g),
            Method::RotFIterT3 | Method::RotFIterT2 => quat_from_rotvec(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    pub max_iterations: usize,
    /// Keep at most this many Chebyshev degrees per iterate.
    pub truncate_degree: Option<usize>,
    /// Stop once the iterate delta falls to or below this.
    pub tolerance: f64,
    pub method: Method,
    /// Largest iterate degree allowed before giving up.
    pub degree_budget: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iterations: 7,
            truncate_degree: None,
            tolerance: 1e-14,
            method: Method::RodFIter,
            degree_budget: 1 << 15,
        }
    }
}

impl IterationConfig {
    pub fn new(method: Method, max_iterations: usize) -> Self {
        Self {
            method,
            max_iterations,
            ..Self::default()
        }
    }

    /// Never stop early on the delta tolerance.
    pub fn fixed_count(mut self) -> Self {
        self.tolerance = 0.0;
        self
    }

    pub fn with_truncation(mut self, degree: Option<usize>) -> Self {
        self.truncate_degree = degree;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub method: Method,
    pub map: TimeMap,
    /// `g_1..g_J`.
    pub iterates: Vec<ChebSeries3>,
    /// `sup|g_j − g_{j−1}|` at the delta nodes, one per iterate.
    pub deltas: Vec<f64>,
    /// Largest coefficient discarded by truncation, per iterate.
    pub truncated_mass: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    /// `t_N·sup|ω̂|`.
    pub precondition_value: f64,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len()
    }

    pub fn last(&self) -> &ChebSeries3 {
        self.iterates.last().expect("at least one iterate")
    }

    pub fn final_delta(&self) -> f64 {
        *self.deltas.last().expect("at least one iterate")
    }

    /// Iterate `j` (1-based); the last one if the run stopped earlier.
    pub fn iterate(&self, j: usize) -> &ChebSeries3 {
        let idx = j.clamp(1, self.iterates.len()) - 1;
        &self.iterates[idx]
    }

    /// Incremental attitude from iterate `j` at `τ`.
    pub fn quaternion_at(&self, j: usize, tau: f64) -> Result<Quaternion> {
        let g = self.iterate(j).eval(tau)?;
        Ok(self.method.to_quaternion(&g))
    }
}

/// Runs the iteration selected in `cfg`.
pub fn iterate(omega_hat: &ChebSeries3, map: &TimeMap, cfg: &IterationConfig) -> Result<IterationTrace> {
    if cfg.max_iterations == 0 {
        return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
    }
    let precondition_value = convergence_precondition(omega_hat, map);
    let nodes = chebyshev_nodes(DELTA_NODES);
    let n = omega_hat.degree();

    let mut g = ChebSeries3::zero();
    let mut trace = IterationTrace {
        method: cfg.method,
        map: *map,
        iterates: Vec::with_capacity(cfg.max_iterations),
        deltas: Vec::with_capacity(cfg.max_iterations),
        truncated_mass: Vec::with_capacity(cfg.max_iterations),
        converged: false,
        diverged: false,
        precondition_value,
    };

    for _ in 0..cfg.max_iterations {
        let next_degree = 2 * g.degree() + n + 1;
        if next_degree > cfg.degree_budget && cfg.truncate_degree.is_none() {
            return Err(Error::DegreeBudget {
                degree: next_degree,
                budget: cfg.degree_budget,
            });
        }
        let mut next = step(cfg.method, &g, omega_hat, map);
        let mut dropped = 0.0;
        if let Some(max) = cfg.truncate_degree {
            (next, dropped) = next.truncate(max);
        }
        let delta = next.sub(&g).sup_norm_at(&nodes);
        trace.iterates.push(next.clone());
        trace.deltas.push(delta);
        trace.truncated_mass.push(dropped);
        g = next;

        if !g.is_finite() || !delta.is_finite() || is_diverging(&trace.deltas) {
            trace.diverged = true;
            break;
        }
        if delta <= cfg.tolerance {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// RodFIter on the Rodrigues vector.
pub fn iterate_rodrigues(omega_hat: &ChebSeries3, map: &TimeMap, cfg: &IterationConfig) -> Result<IterationTrace> {
    if cfg.method != Method::RodFIter {
        return Err(Error::InvalidInput(format!(
            "iterate_rodrigues needs the rodfiter method, got {}",
            cfg.method.name()
        )));
    }
    iterate(omega_hat, map, cfg)
}

/// RotFIter on the truncated rotation vector rate.
pub fn iterate_rotation_approx(omega_hat: &ChebSeries3, map: &TimeMap, cfg: &IterationConfig) -> Result<IterationTrace> {
    if cfg.method == Method::RodFIter {
        return Err(Error::InvalidInput(
            "iterate_rotation_approx needs a rotfiter method".into(),
        ));
    }
    iterate(omega_hat, map, cfg)
}

/// One application of the integral operator.
pub fn step(method: Method, g: &ChebSeries3, omega: &ChebSeries3, map: &TimeMap) -> ChebSeries3 {
    if g.is_zero() {
        return omega.integral_from_start(map);
    }
    let g_cross_w = g.cross(omega);
    let mut integrand = omega.add(&g_cross_w.scale(0.5));
    match method {
        Method::RodFIter => {
            let gw = g.dot(omega);
            integrand = integrand.add(&ChebSeries3::scalar_times_vec(&gw, g).scale(0.25));
        }
        Method::RotFIterT3 => {
            integrand = integrand.add(&g.cross(&g_cross_w).scale(1.0 / 12.0));
        }
        Method::RotFIterT2 => {}
    }
    integrand.integral_from_start(map)
}

/// `true` once the last [`DIVERGENCE_RUN`] deltas each exceeded their
/// predecessor, or any delta is non-finite.
pub fn is_diverging(deltas: &[f64]) -> bool {
    if deltas.iter().any(|d| !d.is_finite()) {
        return true;
    }
    deltas.len() > DIVERGENCE_RUN
        && deltas[deltas.len() - DIVERGENCE_RUN - 1..]
            .windows(2)
            .all(|w| w[1] > w[0])
}

/// `t_N · max|ω̂(τ_k)|` over [`PRECONDITION_NODES`] Lobatto nodes; RodFIter is
/// guaranteed to converge when this is below 2.
pub fn convergence_precondition(omega_hat: &ChebSeries3, map: &TimeMap) -> f64 {
    map.span() * omega_hat.sup_norm_at(&chebyshev_nodes(PRECONDITION_NODES))
}

/// Smallest `j >= 1` with `eps0·(precondition/2)^j < delta_acc`.
pub fn required_iterations(delta_acc: f64, eps0: f64, precondition: f64) -> Result<usize> {
    if !(precondition < 2.0) {
        return Err(Error::NoConvergenceGuarantee { precondition });
    }
    if !(eps0 > 0.0) || !(delta_acc > 0.0) || !(precondition > 0.0) {
        return Err(Error::InvalidInput(
            "delta_acc, eps0 and precondition must be positive".into(),
        ));
    }
    // j > ln(δ/ε0) / ln(p/2), strict
    let bound = (delta_acc / eps0).ln() / (precondition / 2.0).ln();
    let nearest = bound.round();
    let floor = if (bound - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        bound.floor()
    };
    Ok((floor + 1.0).max(1.0) as usize)
}

/// [`required_iterations`] with `eps0` taken as the precondition value,
/// since `|g*| ≲ t·sup|ω̂|` bounds the error of the zero start.
pub fn required_iterations_default(delta_acc: f64, precondition: f64) -> Result<usize> {
    required_iterations(delta_acc, precondition, precondition)
}

/// `sup |ġ − ω̂ − ½ g×ω̂ − ¼ g (g·ω̂)|` over the nodes, the defect of `g` in
/// the Rodrigues rate equation.
pub fn fixed_point_residual(g: &ChebSeries3, omega_hat: &ChebSeries3, map: &TimeMap, taus: &[f64]) -> f64 {
    let gdot = g.derivative().scale(1.0 / map.half_span());
    taus.iter()
        .map(|&tau| {
            let (gv, dv, wv) = (g.value_at(tau), gdot.value_at(tau), omega_hat.value_at(tau));
            (dv - wv - gv.cross(&wv) * 0.5 - gv * (0.25 * gv.dot(&wv))).norm()
        })
        .fold(0.0, f64::max)
}

/// Evaluates `ω = (4ġ − 2 g×ġ)/(4 + |g|²)` at the nodes, with `ġ = (2/t_N) dg/dτ`.
pub fn omega_from_rodrigues_poly(g: &ChebSeries3, map: &TimeMap, taus: &[f64]) -> Result<Vec<Vector3<f64>>> {
    let gdot = g.derivative().scale(1.0 / map.half_span());
    taus.iter()
        .map(|&tau| {
            let gv = g.eval(tau)?;
            let dv = gdot.eval(tau)?;
            Ok((dv * 4.0 - gv.cross(&dv) * 2.0) / (4.0 + gv.norm_squared()))
        })
        .collect()
}

/// Mainstream two-sample rotation vector for `ω = c0 + c1 t`:
/// `t c0 + (t²/2) c1 + (t³/12) c0 × c1`.
pub fn mainstream_two_sample(c0: &Vec3, c1: &Vec3, t: f64) -> Vec3 {
    c0 * t + c1 * (0.5 * t * t) + c0.cross(c1) * (t * t * t / 12.0)
}

/// Monomial coefficients `(c0, c1)` in time of a linear series `a0 + a1 τ`.
pub fn linear_in_time(omega_hat: &ChebSeries3, map: &TimeMap) -> Result<(Vec3, Vec3)> {
    if omega_hat.degree() > 1 {
        return Err(Error::InvalidInput(format!(
            "two-sample update needs a linear fit, got degree {}",
            omega_hat.degree()
        )));
    }
    let a0 = omega_hat.coefficient(0);
    let a1 = omega_hat.coefficient(1);
    // τ = 2t/t_N − 1
    Ok((a0 - a1, a1 * (2.0 / map.span())))
}

//! Angular-velocity polynomial fitting from gyroscope samples.
//!
//! Two measurement kinds are supported. Velocity samples `ω̃(t_k)` are
//! matched at the mapped epochs `τ_k`. Angular increments
//! `Δθ̃_k = ∫_{t_{k-1}}^{t_k} ω dt` are matched through the segment integrals
//! `G_{i,[τ_{k-1}, τ_k]}` of the basis polynomials, with `t_0 = 0`.
//!
//! Both systems are solved through a Householder QR factorization; square
//! systems take the same path as overdetermined ones.

use nalgebra::{DMatrix, Vector3};

use crate::chebpoly::{basis_value, segment_integral, ChebSeries3, TimeMap};
use crate::error::{Error, Result};

/// Fits whose condition estimate exceeds this are flagged as ill-conditioned.
pub const CONDITION_FLAG: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Angular rate samples in rad/s.
    Velocity,
    /// Angular increments in rad over consecutive intervals.
    Increment,
}

/// Gyroscope measurements over one fitting interval `[0, t_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    kind: SampleKind,
    epochs: Vec<f64>,
    values: Vec<Vector3<f64>>,
}

impl SampleSet {
    /// `epochs` are `t_1..t_N` (sample times for velocities, interval ends for
    /// increments), strictly increasing and positive.
    pub fn new(kind: SampleKind, epochs: Vec<f64>, values: Vec<Vector3<f64>>) -> Result<Self> {
        if epochs.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} epochs for {} samples",
                epochs.len(),
                values.len()
            )));
        }
        if epochs.len() < 2 {
            return Err(Error::InvalidInput("at least two samples are required".into()));
        }
        if !epochs.iter().all(|t| t.is_finite()) || epochs[0] <= 0.0 {
            return Err(Error::InvalidInput("epochs must be finite and positive".into()));
        }
        if epochs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("epochs must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidInput("sample values must be finite".into()));
        }
        Ok(Self {
            kind,
            epochs,
            values,
        })
    }

    /// Uniformly spaced samples `t_k = k·period`, `k = 1..N`.
    pub fn uniform(kind: SampleKind, period: f64, values: Vec<Vector3<f64>>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput("sample period must be positive".into()));
        }
        let epochs = (1..=values.len()).map(|k| k as f64 * period).collect();
        Self::new(kind, epochs, values)
    }

    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn values(&self) -> &[Vector3<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Interval length `t_N`.
    pub fn span(&self) -> f64 {
        *self.epochs.last().expect("at least two epochs")
    }

    pub fn time_map(&self) -> TimeMap {
        TimeMap::new(self.span()).expect("positive epochs")
    }

    /// `τ_k = 2 t_k / t_N − 1` for `k = 1..N`.
    pub fn mapped_epochs(&self) -> Vec<f64> {
        let map = self.time_map();
        self.epochs.iter().map(|&t| map.to_tau(t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub omega_hat: ChebSeries3,
    pub order: usize,
    pub map: TimeMap,
    /// Largest sample mismatch after the fit, in the sample's own unit.
    pub residual: f64,
    /// Ratio of the largest to the smallest `|R_ii|` of the QR factor.
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
}

/// Fits `ω̂` of the given order to any sample set.
pub fn fit(samples: &SampleSet, order: usize) -> Result<FitResult> {
    match samples.kind {
        SampleKind::Velocity => fit_velocity(samples, order),
        SampleKind::Increment => fit_increment(samples, order),
    }
}

/// Velocity path: `A_ω c = ω̃` with `A_ω[k][i] = F_i(τ_k)`.
pub fn fit_velocity(samples: &SampleSet, order: usize) -> Result<FitResult> {
    expect_kind(samples, SampleKind::Velocity)?;
    check_order(samples, order)?;
    let taus = samples.mapped_epochs();
    let design = DMatrix::from_fn(samples.len(), order + 1, |k, i| basis_value(i, taus[k]));
    solve(samples, design, 1.0, order)
}

/// Increment path: `A_θ c = (2/t_N) Δθ̃` with
/// `A_θ[k][i] = G_{i,[τ_{k-1}, τ_k]}` and `τ_0 = −1`.
pub fn fit_increment(samples: &SampleSet, order: usize) -> Result<FitResult> {
    expect_kind(samples, SampleKind::Increment)?;
    check_order(samples, order)?;
    let mut bounds = vec![-1.0];
    bounds.extend(samples.mapped_epochs());
    let mut design = DMatrix::zeros(samples.len(), order + 1);
    for k in 0..samples.len() {
        for i in 0..=order {
            design[(k, i)] = segment_integral(i, bounds[k], bounds[k + 1])?;
        }
    }
    let rhs_scale = 2.0 / samples.span();
    solve(samples, design, rhs_scale, order)
}

fn expect_kind(samples: &SampleSet, kind: SampleKind) -> Result<()> {
    if samples.kind != kind {
        return Err(Error::InvalidInput(format!(
            "expected {kind:?} samples, got {:?}",
            samples.kind
        )));
    }
    Ok(())
}

fn check_order(samples: &SampleSet, order: usize) -> Result<()> {
    if order + 1 > samples.len() {
        return Err(Error::InvalidInput(format!(
            "order {order} needs at least {} samples, have {}",
            order + 1,
            samples.len()
        )));
    }
    Ok(())
}

fn solve(samples: &SampleSet, design: DMatrix<f64>, rhs_scale: f64, order: usize) -> Result<FitResult> {
    let n = samples.len();
    let rhs = DMatrix::from_fn(n, 3, |k, axis| rhs_scale * samples.values[k][axis]);

    let qr = design.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..=order).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_estimate = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    if !(dmin > dmax * f64::EPSILON * (order + 1) as f64) {
        return Err(Error::SingularFit { condition_estimate });
    }

    let qtb = qr.q().transpose() * &rhs;
    let coeffs = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::SingularFit { condition_estimate })?;

    let c: Vec<Vector3<f64>> = (0..=order)
        .map(|i| Vector3::new(coeffs[(i, 0)], coeffs[(i, 1)], coeffs[(i, 2)]))
        .collect();

    let fitted = &design * &coeffs;
    let residual = (0..n)
        .map(|k| {
            let d = Vector3::new(
                fitted[(k, 0)] - rhs[(k, 0)],
                fitted[(k, 1)] - rhs[(k, 1)],
                fitted[(k, 2)] - rhs[(k, 2)],
            );
            d.norm() / rhs_scale
        })
        .fold(0.0, f64::max);

    Ok(FitResult {
        omega_hat: ChebSeries3::from_coefficients(&c),
        order,
        map: samples.time_map(),
        residual,
        condition_estimate,
        ill_conditioned: condition_estimate > CONDITION_FLAG,
    })
}

/// Analytic increments `∫_{t_{k-1}}^{t_k} ω̂ dt` of a fitted series.
pub fn integrate_increments(omega_hat: &ChebSeries3, map: &TimeMap, epochs: &[f64]) -> Vec<Vector3<f64>> {
    let p = omega_hat.integral_from_start(map);
    let mut prev = Vector3::zeros();
    epochs
        .iter()
        .map(|&t| {
            let cur = p.value_at(map.to_tau(t).clamp(-1.0, 1.0));
            let inc = cur - prev;
            prev = cur;
            inc
        })
        .collect()
}

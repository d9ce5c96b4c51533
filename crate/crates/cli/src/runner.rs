use rayon::prelude::*;

use rodfiter_core::chebpoly::chebyshev_nodes;
use rodfiter_core::fitting::{fit, FitResult, SampleKind, SampleSet};
use rodfiter_core::iteration::{iterate, linear_in_time, mainstream_two_sample, IterationConfig, IterationTrace};
use rodfiter_core::{ConingScenario, Method, Quaternion, SensorNoise, Vec3};

use crate::spec::{Algorithm, RunSpec, Subcommand};
use crate::CliError;

/// Nodes at which fit errors are measured for the sensor-error bound.
const BOUND_NODES: usize = 65;

/// Ground-truth motion seen by the harness.
pub trait Motion: Sync {
    fn omega(&self, t: f64) -> Vec3;
    fn increment(&self, t0: f64, t1: f64) -> Vec3;
    /// Attitude at `t1` relative to the attitude at `t0`.
    fn incremental_truth(&self, t0: f64, t1: f64) -> Quaternion;
}

impl Motion for ConingScenario {
    fn omega(&self, t: f64) -> Vec3 {
        self.omega_at(t)
    }

    fn increment(&self, t0: f64, t1: f64) -> Vec3 {
        self.increment_between(t0, t1)
    }

    fn incremental_truth(&self, t0: f64, t1: f64) -> Quaternion {
        ConingScenario::incremental_truth(self, t0, t1)
    }
}

/// A body at rest.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stationary;

impl Motion for Stationary {
    fn omega(&self, _: f64) -> Vec3 {
        Vec3::zeros()
    }

    fn increment(&self, _: f64, _: f64) -> Vec3 {
        Vec3::zeros()
    }

    fn incremental_truth(&self, _: f64, _: f64) -> Quaternion {
        Quaternion::identity()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub method: String,
    /// Iteration count, 0 for methods that do not iterate.
    pub iteration: usize,
    pub window: usize,
    /// Attitude error in rad.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowDiagnostic {
    pub method: String,
    pub window: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub precondition: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    pub final_delta: f64,
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
}

impl WindowDiagnostic {
    /// Convergence is not guaranteed on this window.
    pub fn precondition_exceeded(&self) -> bool {
        self.precondition.is_nan() || self.precondition >= 2.0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub records: Vec<ErrorRecord>,
    pub windows: Vec<WindowDiagnostic>,
}

impl RunOutput {
    fn extend(&mut self, other: RunOutput) {
        self.records.extend(other.records);
        self.windows.extend(other.windows);
    }

    pub fn method_records<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ErrorRecord> + 'a {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// Largest error of `method` at iteration `iteration`.
    pub fn max_error(&self, method: &str, iteration: usize) -> f64 {
        self.method_records(method)
            .filter(|r| r.iteration == iteration)
            .map(|r| r.error)
            .fold(0.0, f64::max)
    }
}

/// Sampling and sensor setup shared by every method of a run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub period: f64,
    pub horizon: f64,
    pub kind: SampleKind,
    pub grid_points: usize,
    pub truncate_degree: Option<usize>,
    /// Sensor errors; `None` runs on clean samples.
    pub noise: Option<SensorNoise>,
}

/// One method with its window layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub algorithm: Algorithm,
    pub samples: usize,
    pub order: usize,
    pub iterations: usize,
}

impl Plan {
    pub fn new(algorithm: Algorithm, samples: usize, order: usize, iterations: usize) -> Self {
        match algorithm {
            Algorithm::Mainstream => Self { algorithm, samples: 2, order: 1, iterations: 0 },
            Algorithm::Iterative(_) => Self { algorithm, samples, order, iterations },
        }
    }
}

fn numerical(plan: &Plan, window: usize, e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(format!("{} window {window}: {e}", plan.algorithm))
}

/// Samples of window `w` with window-local epochs `T..NT`: clean, and
/// corrupted when the setup carries sensor errors.
fn window_samples(motion: &dyn Motion, setup: &Setup, noise: &mut Option<SensorNoise>, samples: usize, w: usize) -> (Vec<Vec3>, Vec<Vec3>) {
    let first = w * samples;
    let t = |k: usize| (first + k) as f64 * setup.period;
    let clean: Vec<Vec3> = (1..=samples)
        .map(|k| match setup.kind {
            SampleKind::Velocity => motion.omega(t(k)),
            SampleKind::Increment => motion.increment(t(k - 1), t(k)),
        })
        .collect();
    let mut noisy = clean.clone();
    if let Some(n) = noise {
        n.corrupt(&mut noisy, setup.kind);
    }
    (clean, noisy)
}

/// Runs one method over the horizon, chaining the estimated attitude from
/// window to window.
///
/// Errors are tracked as the error quaternion `q_est* ∘ q_true`, updated per
/// window as `q_inc_est* ∘ δ ∘ q_inc_true`, so the metric keeps full
/// precision down to errors far below one ulp of a unit quaternion.
pub fn run_plan(motion: &dyn Motion, setup: &Setup, plan: &Plan) -> Result<RunOutput, CliError> {
    let span = plan.samples as f64 * setup.period;
    let windows = (setup.horizon / span + 1e-9).floor() as usize;
    let name = plan.algorithm.name().to_string();
    let mut noise = setup.noise.clone();
    let mut out = RunOutput::default();
    let bound_name = format!("bound-{name}");
    let mut bound = 0.0;

    // one error state per reported iteration count
    let mut delta = vec![Quaternion::identity(); plan.iterations.max(1)];
    let bound_nodes = chebyshev_nodes(BOUND_NODES);

    for w in 0..windows {
        let (clean, noisy) = window_samples(motion, setup, &mut noise, plan.samples, w);
        let set = SampleSet::uniform(setup.kind, setup.period, noisy).map_err(|e| numerical(plan, w, e))?;
        let fitted = fit(&set, plan.order).map_err(|e| numerical(plan, w, e))?;
        let t0 = (w * plan.samples) as f64 * setup.period;
        let t_end = ((w + 1) * plan.samples) as f64 * setup.period;

        let precondition = rodfiter_core::convergence_precondition(&fitted.omega_hat, &fitted.map);
        let mut diag = WindowDiagnostic {
            method: name.clone(),
            window: w,
            t_start: t0,
            t_end,
            precondition,
            iterations: 0,
            converged: false,
            diverged: false,
            final_delta: 0.0,
            condition_estimate: fitted.condition_estimate,
            ill_conditioned: fitted.ill_conditioned,
        };

        match plan.algorithm {
            Algorithm::Iterative(method) => {
                let cfg = IterationConfig::new(method, plan.iterations).with_truncation(setup.truncate_degree);
                let trace = iterate(&fitted.omega_hat, &fitted.map, &cfg).map_err(|e| numerical(plan, w, e))?;
                diag.iterations = trace.iterations();
                diag.converged = trace.converged;
                diag.diverged = trace.diverged;
                diag.final_delta = trace.final_delta();
                emit_iterative(motion, setup, plan, &trace, w, t0, t_end, &mut delta, &mut out)?;
            }
            Algorithm::Mainstream => {
                let (c0, c1) = linear_in_time(&fitted.omega_hat, &fitted.map).map_err(|e| numerical(plan, w, e))?;
                let phi = mainstream_two_sample(&c0, &c1, span);
                let q_est = rodfiter_core::quat_from_rotvec(&phi);
                let d = step_error(&q_est, &delta[0], &motion.incremental_truth(t0, t_end));
                delta[0] = d;
                out.records.push(record(t_end, &name, 0, w, &d, plan, w)?);
            }
        }

        if setup.noise.is_some() {
            let clean_set = SampleSet::uniform(setup.kind, setup.period, clean).map_err(|e| numerical(plan, w, e))?;
            let clean_fit = fit(&clean_set, plan.order).map_err(|e| numerical(plan, w, e))?;
            bound += window_bound(&fitted, &clean_fit, &bound_nodes);
            out.records.push(ErrorRecord { t: t_end, method: bound_name.clone(), iteration: 0, window: w, error: bound });
        }
        out.windows.push(diag);
    }
    Ok(out)
}

/// `t_N · sup|ω̂_noisy − ω̂_clean|` over the window.
fn window_bound(noisy: &FitResult, clean: &FitResult, nodes: &[f64]) -> f64 {
    noisy.map.span() * noisy.omega_hat.sub(&clean.omega_hat).sup_norm_at(nodes)
}

fn step_error(q_inc_est: &Quaternion, delta: &Quaternion, q_inc_true: &Quaternion) -> Quaternion {
    q_inc_est.conjugate().multiply(delta).multiply(q_inc_true)
}

fn record(t: f64, method: &str, iteration: usize, window: usize, d: &Quaternion, plan: &Plan, w: usize) -> Result<ErrorRecord, CliError> {
    let error = 2.0 * d.vector().norm();
    if !error.is_finite() {
        return Err(numerical(plan, w, format!("non-finite attitude error at t = {t}")));
    }
    Ok(ErrorRecord { t, method: method.to_string(), iteration, window, error })
}

#[allow(clippy::too_many_arguments)]
fn emit_iterative(
    motion: &dyn Motion,
    setup: &Setup,
    plan: &Plan,
    trace: &IterationTrace,
    w: usize,
    t0: f64,
    t_end: f64,
    delta: &mut [Quaternion],
    out: &mut RunOutput,
) -> Result<(), CliError> {
    let name = plan.algorithm.name();
    let grid = setup.grid_points;
    let span = t_end - t0;
    let truths: Vec<(f64, f64, Quaternion)> = (1..=grid)
        .map(|k| {
            let t = if k == grid { t_end } else { t0 + span * k as f64 / grid as f64 };
            let tau = if k == grid { 1.0 } else { -1.0 + 2.0 * k as f64 / grid as f64 };
            (t, tau, motion.incremental_truth(t0, t))
        })
        .collect();
    for (slot, j) in (1..=plan.iterations).enumerate() {
        let series = trace.iterate(j);
        let mut last = delta[slot];
        for (t, tau, q_true) in &truths {
            let g = series.value_at(*tau);
            let q_est = trace.method.to_quaternion(&g);
            let d = step_error(&q_est, &delta[slot], q_true);
            out.records.push(record(*t, name, j, w, &d, plan, w)?);
            last = d;
        }
        delta[slot] = last;
    }
    Ok(())
}

fn setup_from(spec: &RunSpec, sc: &ConingScenario, with_noise: bool) -> Setup {
    Setup {
        period: sc.period,
        horizon: spec.horizon_s,
        kind: spec.sample_kind(),
        grid_points: spec.grid_points,
        truncate_degree: spec.truncate_degree,
        noise: (with_noise && sc.has_sensor_errors()).then(|| sc.noise()),
    }
}

fn run_plans(motion: &dyn Motion, setup: &Setup, plans: &[Plan]) -> Result<RunOutput, CliError> {
    let parts: Vec<Result<RunOutput, CliError>> = plans.par_iter().map(|p| run_plan(motion, setup, p)).collect();
    let mut out = RunOutput::default();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Error curves of the configured method on clean samples.
pub fn run_reconstruct(spec: &RunSpec) -> Result<RunOutput, CliError> {
    let sc = spec.scenario()?;
    let setup = setup_from(spec, &sc, false);
    run_plan(&sc, &setup, &Plan::new(spec.method, sc.samples, sc.order, spec.iterations))
}

/// The four algorithms side by side.
pub fn run_compare(spec: &RunSpec) -> Result<RunOutput, CliError> {
    let sc = spec.scenario()?;
    compare_on(&sc, spec, &setup_from(spec, &sc, false))
}

pub fn compare_on(motion: &dyn Motion, spec: &RunSpec, setup: &Setup) -> Result<RunOutput, CliError> {
    let plans: Vec<Plan> = Algorithm::ALL
        .into_iter()
        .map(|a| Plan::new(a, spec.samples, spec.order(), spec.iterations))
        .collect();
    run_plans(motion, setup, &plans)
}

/// The configured method and the mainstream baseline on corrupted samples,
/// each with its accumulated sensor-error bound.
pub fn run_noise(spec: &RunSpec) -> Result<RunOutput, CliError> {
    let sc = spec.scenario()?;
    let setup = setup_from(spec, &sc, true);
    let mut plans = vec![Plan::new(spec.method, sc.samples, sc.order, spec.iterations)];
    if spec.method != Algorithm::Mainstream {
        plans.push(Plan::new(Algorithm::Mainstream, 2, 1, 0));
    }
    run_plans(&sc, &setup, &plans)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub samples: usize,
    /// `sup|ω|` at the divergence boundary, `None` when not bracketed.
    pub practical: Option<f64>,
    pub theoretical: f64,
}

/// Sample counts covered by the sweep.
pub const SWEEP_SAMPLES: std::ops::RangeInclusive<usize> = 2..=10;

/// Coarse scan range and growth factor, in units of `2/(N·T)`.
const SCAN_START: f64 = 0.25;
const SCAN_END: f64 = 10.0;
const SCAN_GROWTH: f64 = 1.1;
const BISECTIONS: usize = 40;

/// Divergence boundary in `sup|ω|` for every sample count.
pub fn run_sweep_convergence(spec: &RunSpec) -> Result<Vec<SweepRow>, CliError> {
    spec.scenario()?;
    let counts: Vec<usize> = SWEEP_SAMPLES.collect();
    counts
        .par_iter()
        .map(|&n| sweep_boundary(spec, n))
        .collect()
}

/// Whether the first window diverges at coning rate magnitude `sup_omega`.
pub fn diverges_at(spec: &RunSpec, samples: usize, sup_omega: f64) -> Result<bool, CliError> {
    let alpha = spec.alpha_deg.to_radians();
    let omega = sup_omega / (2.0 * (alpha / 2.0).sin());
    let sc = ConingScenario::new(alpha, omega, spec.period(), samples, samples - 1)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let set = sc
        .window_sample_set(0, spec.sample_kind(), None)
        .map_err(|e| CliError::Numerical(format!("N={samples}: {e}")))?;
    let fitted = fit(&set, samples - 1).map_err(|e| CliError::Numerical(format!("N={samples}: {e}")))?;
    let cfg = IterationConfig::new(Method::RodFIter, spec.iterations).with_truncation(spec.truncate_degree);
    let trace = iterate(&fitted.omega_hat, &fitted.map, &cfg).map_err(|e| CliError::Numerical(format!("N={samples}: {e}")))?;
    Ok(trace.diverged)
}

fn sweep_boundary(spec: &RunSpec, samples: usize) -> Result<SweepRow, CliError> {
    let theoretical = 2.0 / (samples as f64 * spec.period());
    let mut row = SweepRow { samples, practical: None, theoretical };
    let mut lo = SCAN_START * theoretical;
    if diverges_at(spec, samples, lo)? {
        return Ok(row);
    }
    let mut hi = None;
    while lo < SCAN_END * theoretical {
        let next = lo * SCAN_GROWTH;
        if diverges_at(spec, samples, next)? {
            hi = Some(next);
            break;
        }
        lo = next;
    }
    let Some(mut hi) = hi else {
        return Ok(row);
    };
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if diverges_at(spec, samples, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    row.practical = Some(0.5 * (lo + hi));
    Ok(row)
}

/// Dispatches on the subcommand.
pub enum Report {
    Errors(RunOutput),
    Sweep(Vec<SweepRow>),
}

pub fn run(spec: &RunSpec) -> Result<Report, CliError> {
    Ok(match spec.command {
        Subcommand::Reconstruct => Report::Errors(run_reconstruct(spec)?),
        Subcommand::Compare => Report::Errors(run_compare(spec)?),
        Subcommand::NoiseRun => Report::Errors(run_noise(spec)?),
        Subcommand::SweepConvergence => Report::Sweep(run_sweep_convergence(spec)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(command: Subcommand) -> RunSpec {
        RunSpec { command, horizon_s: 0.16, ..RunSpec::default() }
    }

    #[test]
    fn records_cover_every_iteration_and_grid_point() {
        let out = run_reconstruct(&short(Subcommand::Reconstruct)).unwrap();
        assert_eq!(out.windows.len(), 2);
        assert_eq!(out.records.len(), 2 * 7 * 20);
        assert!(out.records.iter().all(|r| r.error >= 0.0 && r.t > 0.0 && r.t <= 0.16 + 1e-12));
        let ends: Vec<_> = out.records.iter().filter(|r| r.iteration == 7 && r.window == 1).collect();
        assert_eq!(ends.last().unwrap().t, 0.16);
    }

    #[test]
    fn mainstream_reports_window_ends_only() {
        let spec = RunSpec { samples: 2, method: Algorithm::Mainstream, ..short(Subcommand::Reconstruct) };
        let out = run_reconstruct(&spec).unwrap();
        assert_eq!(out.records.len(), 8);
        for (w, r) in out.records.iter().enumerate() {
            assert_eq!(r.window, w);
            assert_eq!(r.iteration, 0);
            assert!((r.t - 0.02 * (w + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn single_iteration_is_integrated_gyro() {
        // one window, g_1 = ∫ω̂
        let spec = RunSpec { horizon_s: 0.08, iterations: 1, ..RunSpec::default() };
        let out = run_reconstruct(&spec).unwrap();
        assert_eq!(out.records.len(), 20);
        let sc = spec.scenario().unwrap();
        let theta: Vec3 = (1..=8).map(|k| sc.increment(k)).sum();
        let q = rodfiter_core::quat_from_rodrigues(&theta);
        let want = rodfiter_core::attitude_error(&q, &sc.incremental_truth(0.0, 0.08));
        assert!((out.records.last().unwrap().error - want).abs() < 1e-15);
    }

    #[test]
    fn stationary_body_has_zero_error() {
        let spec = short(Subcommand::Compare);
        let setup = Setup {
            period: 0.01,
            horizon: 0.16,
            kind: SampleKind::Increment,
            grid_points: 20,
            truncate_degree: None,
            noise: None,
        };
        let out = compare_on(&Stationary, &spec, &setup).unwrap();
        assert!(!out.records.is_empty());
        assert!(out.records.iter().all(|r| r.error == 0.0));
        for a in Algorithm::ALL {
            assert!(out.method_records(a.name()).count() > 0);
        }
    }

    #[test]
    fn noise_free_noise_run_matches_reconstruct() {
        let a = run_reconstruct(&short(Subcommand::Reconstruct)).unwrap();
        let b = run_noise(&short(Subcommand::NoiseRun)).unwrap();
        let rod: Vec<_> = b.method_records("rodfiter").cloned().collect();
        assert_eq!(rod, a.records);
        assert_eq!(b.method_records("bound-rodfiter").count(), 0);
    }

    #[test]
    fn noise_run_is_deterministic_and_bounded() {
        let spec = RunSpec {
            bias_deg_h: [5e-3, -3e-3, 4e-3],
            arw_deg_sqrt_h: 0.002,
            seed: 11,
            ..short(Subcommand::NoiseRun)
        };
        let a = run_noise(&spec).unwrap();
        assert_eq!(a, run_noise(&spec).unwrap());
        assert_eq!(a.method_records("bound-rodfiter").count(), 2);
        assert_eq!(a.method_records("bound-mainstream").count(), 8);
        let other = run_noise(&RunSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.records, other.records);
    }

    #[test]
    fn truncation_keeps_accuracy() {
        let full = run_reconstruct(&short(Subcommand::Reconstruct)).unwrap();
        let cut = run_reconstruct(&RunSpec { truncate_degree: Some(40), ..short(Subcommand::Reconstruct) }).unwrap();
        assert!(cut.max_error("rodfiter", 7) < 1e-15 + full.max_error("rodfiter", 7) * 2.0);
    }

    #[test]
    fn horizon_covers_whole_windows() {
        let out = run_reconstruct(&RunSpec { horizon_s: 0.2, ..short(Subcommand::Reconstruct) }).unwrap();
        assert_eq!(out.windows.len(), 2);
        assert!(out.windows.iter().all(|d| !d.precondition_exceeded() && d.converged));
    }
}

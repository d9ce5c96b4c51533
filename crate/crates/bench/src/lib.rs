//! Fixtures shared by the criterion benches.

use rodfiter_core::fitting::{fit, FitResult, SampleKind};
use rodfiter_core::ConingScenario;

/// Coning at 10° half-angle, 0.74π rad/s, 100 Hz.
pub fn coning(samples: usize) -> ConingScenario {
    ConingScenario::from_degrees(10.0, 0.74, 100.0, samples, samples - 1).expect("valid scenario")
}

/// First-window velocity fit of [`coning`].
pub fn first_window_fit(samples: usize) -> FitResult {
    let sc = coning(samples);
    let set = sc.window_sample_set(0, SampleKind::Velocity, None).expect("samples");
    fit(&set, sc.order).expect("fit")
}

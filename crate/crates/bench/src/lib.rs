//! Instance builders shared by the criterion benches.

use beamsynth_core::ProblemInstance;

/// Ladder instance used by the benches; see [`beamsynth_core::ladder_instance`].
pub fn ladder_instance(m: usize, n: usize, delta: f64) -> ProblemInstance {
    beamsynth_core::ladder_instance(m, n, delta).expect("valid ladder pair")
}

//! Slow, weak couplings: protective measurements, non-hermitian evolution,
//! and protection of a two-state vector by a pre- and post-selected ancilla.

mod evolve;
mod nonhermitian;
mod protection;
mod protective;
mod ramp;

pub use evolve::{evolve_adiabatic, evolve_adiabatic_with, AdiabaticRun, StepControl, DRIFT_LIMIT, MIN_STEPS};
pub use nonhermitian::{
    adiabatic_nonhermitian_measure, kaon_fidelity_prediction, kaon_toy_hamiltonian, nonhermitian_evolve,
    nonhermitian_outcomes, sequential_nonhermitian_measure, NonHermitianMeasurement,
};
pub use protection::{
    build_spin_protection, effective_hamiltonian, simulate_protected_2sv, unprotected_control, ProtectedRun,
    ProtectionSetup, PROTECTION_GUARD,
};
pub use protective::{
    protective_outcomes, protective_shift, protective_shift_with, OUTCOME_CUTOFF, PROTECTIVE_GAP_TOL,
};
pub use ramp::{RampProfile, DEFAULT_RAMP_FRACTION};

use crate::ensemble::Schedule;
use crate::pointer::{Grid, DEFAULT_POINTS};
use crate::{Result, C64};

/// One possible result of an adiabatic measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticOutcome {
    /// Index of the energy eigenstate or bi-orthogonal pair.
    pub label: usize,
    /// Pointer displacement.
    pub shift: f64,
    /// Expectation value (hermitian case) or pair weak value.
    pub weak_or_expectation: C64,
    pub probability: f64,
}

fn normalize_outcomes(out: &mut [AdiabaticOutcome]) {
    let total: f64 = out.iter().map(|o| o.probability).sum();
    if total > 0.0 {
        for o in out.iter_mut() {
            o.probability /= total;
        }
    }
}

/// Grid, ramp and integrator settings shared by adiabatic runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticOptions {
    pub ramp_fraction: f64,
    pub steps: StepControl,
    /// Grid points; defaults to [`DEFAULT_POINTS`].
    pub points: Option<usize>,
    /// Grid extent; derived from Δ and the largest shift when absent.
    pub extent: Option<f64>,
    pub schedule: Schedule,
}

impl Default for AdiabaticOptions {
    fn default() -> Self {
        AdiabaticOptions {
            ramp_fraction: DEFAULT_RAMP_FRACTION,
            steps: StepControl::Auto,
            points: None,
            extent: None,
            schedule: Schedule::default(),
        }
    }
}

impl AdiabaticOptions {
    pub fn grid(&self, delta: f64, max_shift: f64) -> Result<Grid> {
        let points = self.points.unwrap_or(DEFAULT_POINTS);
        match self.extent {
            Some(l) => Grid::new(points, l),
            None => Grid::auto_with_points(points, delta, max_shift),
        }
    }
}

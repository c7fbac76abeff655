use alloc::vec::Vec;

use super::{evolve_adiabatic_with, AdiabaticOptions, AdiabaticOutcome, RampProfile};
use crate::hilbert::{eig_hermitian, Operator, SpectralDecomposition, StateVector};
use crate::pointer::gaussian_pointer;
use crate::{Error, Result, C64};

/// Smallest level spacing accepted for protection by `H0`.
pub const PROTECTIVE_GAP_TOL: f64 = 1e-6;

/// Outcomes with a smaller probability are not reported.
pub const OUTCOME_CUTOFF: f64 = 1e-14;

fn nondegenerate(h0: &Operator) -> Result<SpectralDecomposition> {
    let spec = eig_hermitian(h0)?;
    let gap = spec.min_gap();
    if spec.dim() > 1 && gap <= PROTECTIVE_GAP_TOL {
        return Err(Error::DegenerateSpectrum {
            gap,
            tolerance: PROTECTIVE_GAP_TOL,
        });
    }
    Ok(spec)
}

/// Pointer mean after an adiabatic measurement of `A` on the energy
/// eigenstate `|E_i⟩` of `H0` (levels ascending).
pub fn protective_shift(h0: &Operator, level: usize, a: &Operator, delta: f64, total_time: f64) -> Result<f64> {
    protective_shift_with(h0, level, a, delta, total_time, &AdiabaticOptions::default())
}

pub fn protective_shift_with(
    h0: &Operator,
    level: usize,
    a: &Operator,
    delta: f64,
    total_time: f64,
    opts: &AdiabaticOptions,
) -> Result<f64> {
    a.require_dim(h0.dim())?;
    let spec = nondegenerate(h0)?;
    let psi = spec
        .eigenvectors
        .get(level)
        .ok_or(Error::invalid("level", "must index an energy level"))?;
    let a_max = eig_hermitian(a)?.max_abs_eigenvalue();
    let grid = opts.grid(delta, a_max)?;
    let w = gaussian_pointer(&grid, delta)?;
    let ramp = RampProfile::new(total_time, opts.ramp_fraction)?;
    let run = evolve_adiabatic_with(h0, a, psi, &w, ramp, opts.steps, opts.schedule)?;
    Ok(run.mean_q())
}

/// One outcome per energy eigenstate: shift `⟨E_i|A|E_i⟩` with probability
/// `|⟨E_i|ψ0⟩|²`.
pub fn protective_outcomes(h0: &Operator, psi0: &StateVector, a: &Operator) -> Result<Vec<AdiabaticOutcome>> {
    a.require_hermitian()?;
    a.require_dim(h0.dim())?;
    let spec = nondegenerate(h0)?;
    let mut out = Vec::new();
    for (i, e) in spec.eigenvectors.iter().enumerate() {
        let probability = e.fidelity(psi0)?;
        if probability <= OUTCOME_CUTOFF {
            continue;
        }
        let shift = a.sandwich(e, e)?.re;
        out.push(AdiabaticOutcome {
            label: i,
            shift,
            weak_or_expectation: C64::new(shift, 0.0),
            probability,
        });
    }
    super::normalize_outcomes(&mut out);
    Ok(out)
}

//! Adiabatic measurements on systems with a non-hermitian effective
//! Hamiltonian, e.g. decaying systems conditioned on survival.

use alloc::vec;
use alloc::vec::Vec;

use super::protective::OUTCOME_CUTOFF;
use super::AdiabaticOutcome;
use crate::ensemble::{sample_discrete, RngStream};
use crate::hilbert::{eig_biorthogonal, BiorthogonalSystem, Operator, StateVector};
use crate::impulsive::JointState;
use crate::math;
use crate::pointer::{Grid, Representation};
use crate::{Error, Result, C64};

/// `|Ψ(t)⟩ ∝ Σ α_i e^{−iω_i t} |ket_i⟩`, renormalized.
pub fn nonhermitian_evolve(h: &Operator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    let sys = eig_biorthogonal(h)?;
    let alpha = sys.ket_coefficients(psi0)?;
    let mut v = nalgebra::DVector::<C64>::zeros(psi0.dim());
    for ((a, w), ket) in alpha.iter().zip(&sys.frequencies).zip(&sys.kets) {
        v += ket.as_vector() * (a * decay_phase(*w, t));
    }
    StateVector::from_vector(v)
}

fn decay_phase(w: C64, t: f64) -> C64 {
    // e^{−iωt} = e^{Im(ω) t} e^{−i Re(ω) t}
    math::cis_neg(w.re * t) * math::exp(w.im * t)
}

/// Outcomes of an adiabatic measurement of `A` over time `T`.
///
/// Outcome `i` shifts the pointer by `Re A_w^i`, where
/// `A_w^i = ⟨bra_i|A|ket_i⟩ / ⟨bra_i|ket_i⟩`, with probability proportional
/// to `|α_i e^{−iω_i T}|²`.
pub fn nonhermitian_outcomes(
    h: &Operator,
    a: &Operator,
    psi0: &StateVector,
    total_time: f64,
) -> Result<(BiorthogonalSystem, Vec<AdiabaticOutcome>)> {
    a.require_dim(h.dim())?;
    let sys = eig_biorthogonal(h)?;
    let alpha = sys.ket_coefficients(psi0)?;
    // |α e^{−iωT}|² = |α|² e^{2 Im(ω) T}, rescaled by the largest exponent
    let log_growth: Vec<f64> = sys.frequencies.iter().map(|w| 2.0 * w.im * total_time).collect();
    let top = alpha
        .iter()
        .zip(&log_growth)
        .filter(|(a, _)| a.norm_sqr() > 0.0)
        .map(|(_, &g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = alpha
        .iter()
        .zip(&log_growth)
        .map(|(a, &g)| a.norm_sqr() * math::exp(g - top))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NormalizationUnderflow { integral: total });
    }
    let mut out = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let probability = w / total;
        if probability <= OUTCOME_CUTOFF {
            continue;
        }
        let aw = sys.pair_weak_value(i, a)?;
        out.push(AdiabaticOutcome {
            label: i,
            shift: aw.re,
            weak_or_expectation: aw,
            probability,
        });
    }
    super::normalize_outcomes(&mut out);
    Ok((sys, out))
}

/// Outcome list plus the joint state `Σ α_i e^{−iω_i T} |ket_i⟩ ⊗ Φ(Q − Re A_w^i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonHermitianMeasurement {
    pub outcomes: Vec<AdiabaticOutcome>,
    /// Normalized, position representation.
    pub joint: JointState,
}

pub fn adiabatic_nonhermitian_measure(
    h: &Operator,
    a: &Operator,
    psi0: &StateVector,
    delta: f64,
    total_time: f64,
) -> Result<NonHermitianMeasurement> {
    let (sys, outcomes) = nonhermitian_outcomes(h, a, psi0, total_time)?;
    let max_shift = outcomes.iter().map(|o| math::abs(o.shift)).fold(0.0, f64::max);
    let grid = Grid::auto(delta, max_shift)?;
    grid.check_width(delta)?;
    let joint = assemble_joint(&sys, &outcomes, psi0, delta, total_time, grid)?;
    Ok(NonHermitianMeasurement { outcomes, joint })
}

fn assemble_joint(
    sys: &BiorthogonalSystem,
    outcomes: &[AdiabaticOutcome],
    psi0: &StateVector,
    delta: f64,
    total_time: f64,
    grid: Grid,
) -> Result<JointState> {
    let alpha = sys.ket_coefficients(psi0)?;
    let d = psi0.dim();
    let m = grid.points();
    let mut amps = vec![C64::new(0.0, 0.0); d * m];
    for o in outcomes {
        let i = o.label;
        grid.check_shift(o.shift)?;
        let c = alpha[i] * decay_phase(sys.frequencies[i], total_time);
        for (s, &ks) in sys.kets[i].amplitudes().iter().enumerate() {
            let f = c * ks;
            for (k, q) in grid.positions().enumerate() {
                let x = (q - o.shift) / delta;
                amps[s * m + k] += f * math::exp(-0.5 * x * x);
            }
        }
    }
    let js = JointState::from_parts(d, grid, amps, Representation::Position);
    let n = js.norm_sqr();
    if !(n > 1e-300) {
        return Err(Error::NormalizationUnderflow { integral: n });
    }
    let s = 1.0 / math::sqrt(n);
    let amps = js.amplitudes().iter().map(|z| z * s).collect();
    Ok(JointState::from_parts(d, grid, amps, Representation::Position))
}

/// Measures each observable in turn within one run: the first measurement
/// picks the pair `i` at random, leaving the system in `|ket_i⟩`, which the
/// later measurements then find with certainty.
pub fn sequential_nonhermitian_measure(
    h: &Operator,
    observables: &[Operator],
    psi0: &StateVector,
    total_time: f64,
    rng: &mut RngStream,
) -> Result<Vec<AdiabaticOutcome>> {
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(observables.len());
    for a in observables {
        let (sys, outcomes) = nonhermitian_outcomes(h, a, &psi, total_time)?;
        let weights: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
        let pick = outcomes[sample_discrete(&weights, rng.uniform())].clone();
        psi = sys.kets[pick.label].clone();
        out.push(pick);
    }
    Ok(out)
}

/// Toy neutral-kaon mass matrix with eigen-kets `(1, 0)` and `(ε, √(1−ε²))`.
///
/// The short-lived state decays fast and the long-lived one slowly.
pub fn kaon_toy_hamiltonian(epsilon: f64) -> Result<Operator> {
    if !(math::abs(epsilon) < 1.0) {
        return Err(Error::invalid("epsilon", "must satisfy |epsilon| < 1"));
    }
    let s = math::sqrt(1.0 - epsilon * epsilon);
    let short = C64::new(1.0, -0.5);
    let long = C64::new(1.2, -0.0005);
    // H = K diag(short, long) K⁻¹ with K = [[1, ε], [0, s]]
    let k = nalgebra::DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(epsilon, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]);
    let k_inv = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.0, 0.0), C64::new(-epsilon / s, 0.0), C64::new(0.0, 0.0), C64::new(1.0 / s, 0.0)],
    );
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![short, long]));
    Operator::from_matrix(&k * d * k_inv)
}

/// Expected bra-to-ket fidelity `1/√(1−ε²)` for eigen-ket overlap `ε`.
pub fn kaon_fidelity_prediction(epsilon: f64) -> f64 {
    1.0 / math::sqrt(1.0 - epsilon * epsilon)
}

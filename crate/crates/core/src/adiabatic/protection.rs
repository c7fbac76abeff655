//! Protection of a spin-1/2 two-state vector by a pre- and post-selected
//! spin-N ancilla.
//!
//! The ancilla is prepared in `|S_x=N⟩`, found in `⟨S_y=N|`, and coupled
//! through `−λ S·σ`. Its weak values `(N, N, iN)` turn the coupling into
//! `−λN(σ_x + σ_y + iσ_z)`, whose ket `|↑_x⟩` and bra `⟨↑_y|` share the
//! eigenvalue `−λN`.

use alloc::vec;

use nalgebra::DMatrix;

use super::evolve::{evolve_slices, SliceIntegrator};
use super::{AdiabaticOptions, RampProfile};
use crate::hilbert::{
    axis_top_state, eig_hermitian, qubit, spin_operators, weak_value, Operator, Spin, StateVector,
    Tensor, TwoStateVector, X_AXIS, Y_AXIS,
};
use crate::impulsive::JointState;
use crate::pointer::{gaussian_pointer, weighted_moments, Representation};
use crate::{Error, Result, C64};

/// Upper bound on `1/(|λ| N T)` for a run to count as protected.
pub const PROTECTION_GUARD: f64 = 0.05;

/// Ancilla spin, coupling, composite Hamiltonian (ancilla ⊗ spin) and the
/// ancilla's pre- and post-selected states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtectionSetup {
    pub n: u32,
    pub lambda: f64,
    pub hamiltonian: Operator,
    pub pre_ancilla: StateVector,
    pub post_ancilla: StateVector,
}

impl ProtectionSetup {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn ancilla_spin(&self) -> Spin {
        Spin::integer(self.n)
    }

    pub fn ancilla_tsv(&self) -> Result<TwoStateVector> {
        TwoStateVector::new(self.pre_ancilla.clone(), self.post_ancilla.clone())
    }
}

/// `H_prot = −λ(S_x⊗σ_x + S_y⊗σ_y + S_z⊗σ_z)` for a spin-`N` ancilla.
pub fn build_spin_protection(n: u32, lambda: f64) -> Result<ProtectionSetup> {
    if n == 0 {
        return Err(Error::InvalidSpin(0.0));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("lambda", "must be finite and nonzero"));
    }
    let spin = Spin::integer(n);
    Ok(ProtectionSetup {
        n,
        lambda,
        hamiltonian: coupling(spin, lambda),
        pre_ancilla: axis_top_state(X_AXIS, spin)?,
        post_ancilla: axis_top_state(Y_AXIS, spin)?,
    })
}

fn coupling(spin: Spin, lambda: f64) -> Operator {
    let s = spin_operators(spin);
    let sum = &(&s.x.tensor(&Operator::pauli_x()) + &s.y.tensor(&Operator::pauli_y()))
        + &s.z.tensor(&Operator::pauli_z());
    &sum * (-lambda)
}

/// `−λ Σ_k (S_k)_w σ_k` with the ancilla weak values computed numerically.
pub fn effective_hamiltonian(setup: &ProtectionSetup) -> Result<Operator> {
    let tsv = setup.ancilla_tsv()?;
    let s = spin_operators(setup.ancilla_spin());
    let paulis = [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()];
    let mut h = Operator::zeros(2);
    for (sk, pk) in s.components().into_iter().zip(&paulis) {
        h = &h + &pk.scale(weak_value(sk, &tsv)? * -setup.lambda);
    }
    Ok(h)
}

/// Result of a full composite simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtectedRun {
    /// Pointer mean conditioned on the ancilla post-selection.
    pub pointer_mean: f64,
    pub post_select_prob: f64,
    /// `1 − ⟨↑_x|ρ|↑_x⟩` for the conditional spin state `ρ`.
    pub disturbance: f64,
    pub max_norm_drift: f64,
}

/// Prepares `|S_x=N⟩|↑_x⟩`, evolves under `H_prot + g(t) P (I⊗A)`, and
/// post-selects the ancilla on `⟨S_y=N|`.
pub fn simulate_protected_2sv(
    setup: &ProtectionSetup,
    a: &Operator,
    delta: f64,
    total_time: f64,
    opts: &AdiabaticOptions,
) -> Result<ProtectedRun> {
    let ratio = 1.0 / (crate::math::abs(setup.lambda) * f64::from(setup.n) * total_time);
    if !(ratio < PROTECTION_GUARD) {
        return Err(Error::ProtectionTooWeak {
            ratio,
            limit: PROTECTION_GUARD,
        });
    }
    run_composite(
        &setup.hamiltonian,
        &setup.pre_ancilla,
        &setup.post_ancilla,
        a,
        delta,
        total_time,
        opts,
    )
}

/// The same run with the ancilla decoupled (`λ = 0`).
pub fn unprotected_control(
    n: u32,
    a: &Operator,
    delta: f64,
    total_time: f64,
    opts: &AdiabaticOptions,
) -> Result<ProtectedRun> {
    if n == 0 {
        return Err(Error::InvalidSpin(0.0));
    }
    let spin = Spin::integer(n);
    let pre = axis_top_state(X_AXIS, spin)?;
    let post = axis_top_state(Y_AXIS, spin)?;
    let h = Operator::zeros(2 * spin.dim());
    run_composite(&h, &pre, &post, a, delta, total_time, opts)
}

fn run_composite(
    h: &Operator,
    pre_ancilla: &StateVector,
    post_ancilla: &StateVector,
    a: &Operator,
    delta: f64,
    total_time: f64,
    opts: &AdiabaticOptions,
) -> Result<ProtectedRun> {
    a.require_hermitian()?;
    a.require_dim(2)?;
    let spin_pre = qubit::up_x();
    let d_anc = pre_ancilla.dim();
    let big_a = Operator::identity(d_anc).tensor(a);
    let psi0 = pre_ancilla.tensor(&spin_pre);

    let a_max = eig_hermitian(a)?.max_abs_eigenvalue();
    let grid = opts.grid(delta, a_max)?;
    let w = gaussian_pointer(&grid, delta)?;
    let ramp = RampProfile::new(total_time, opts.ramp_fraction)?;
    let integrator = SliceIntegrator::new(h, &big_a, ramp, opts.steps)?;
    let (joint, max_norm_drift, _) = evolve_slices(&integrator, psi0.amplitudes(), &w, opts.schedule)?;

    // ⟨S_y=N| on the ancilla factor leaves a spin ⊗ pointer state
    let m = grid.points();
    let mut amps = vec![C64::new(0.0, 0.0); 2 * m];
    for (r, &b) in post_ancilla.amplitudes().iter().enumerate() {
        let b = b.conj();
        for s in 0..2 {
            let src = joint.row(2 * r + s);
            for (o, &z) in amps[s * m..(s + 1) * m].iter_mut().zip(src) {
                *o += b * z;
            }
        }
    }
    let cond = JointState::from_parts(2, grid, amps, Representation::Momentum);
    let post_select_prob = cond.norm_sqr();
    if !(post_select_prob >= 1e-300) {
        return Err(Error::PostSelectionImpossible {
            probability: post_select_prob,
        });
    }
    let rho: DMatrix<C64> = cond.reduced_density_matrix() / C64::new(post_select_prob, 0.0);
    let up = spin_pre.as_vector();
    let kept = (up.adjoint() * &rho * up)[(0, 0)].re;

    let pos = cond.to_representation(Representation::Position);
    let (pointer_mean, _) = weighted_moments(grid.positions(), &pos.marginal());
    Ok(ProtectedRun {
        pointer_mean,
        post_select_prob,
        disturbance: 1.0 - kept,
        max_norm_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setup_shape() {
        let s = build_spin_protection(2, 0.7).unwrap();
        assert_eq!(s.dim(), 10);
        assert!(s.hamiltonian.hermiticity_residual() < 1e-12);
        let tsv = s.ancilla_tsv().unwrap();
        let ops = spin_operators(s.ancilla_spin());
        let w: alloc::vec::Vec<C64> = ops.components().iter().map(|o| weak_value(o, &tsv).unwrap()).collect();
        assert!((w[0] - C64::new(2.0, 0.0)).norm() < 1e-10);
        assert!((w[1] - C64::new(2.0, 0.0)).norm() < 1e-10);
        assert!((w[2] - C64::new(0.0, 2.0)).norm() < 1e-10);
        assert!(build_spin_protection(0, 1.0).is_err());
        assert!(build_spin_protection(1, 0.0).is_err());
    }

    #[test]
    fn effective_hamiltonian_closed_form() {
        let s = build_spin_protection(3, 1.0).unwrap();
        let h = effective_hamiltonian(&s).unwrap();
        let expect = &(&(&Operator::pauli_x() + &Operator::pauli_y())
            + &Operator::pauli_z().scale(C64::new(0.0, 1.0)))
            * -3.0;
        assert!(h.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn guard_rejects_weak_protection() {
        let s = build_spin_protection(1, 0.1).unwrap();
        let err = simulate_protected_2sv(&s, &Operator::pauli_x(), 1.0, 10.0, &AdiabaticOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::ProtectionTooWeak { .. }));
    }
}

//! Slow-coupling evolution under `H(t) = H0 + g(t) P A`.
//!
//! The pointer has no free Hamiltonian, so `P` is conserved and every
//! momentum node evolves its own `d`-dimensional system factor under
//! `H0 + g(t) p A`. The ramps are integrated with classical RK4; on the
//! plateau the Hamiltonian is constant and is exponentiated exactly.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::RampProfile;
use crate::ensemble::{map_indexed, Schedule};
use crate::hilbert::{eig_hermitian, Operator, StateVector};
use crate::impulsive::JointState;
use crate::math;
use crate::pointer::{PointerWave, Representation};
use crate::{Error, Result, C64};

/// Smallest admissible number of RK4 steps per ramp.
pub const MIN_STEPS: usize = 1000;
/// Norm drift of any slice that aborts a run.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Target `h·ρ` per step when steps are chosen automatically, with `ρ` the
/// spectral radius bound of the slice Hamiltonian.
const AUTO_STEP_PHASE: f64 = 0.01;
/// Slices whose pointer amplitude is below this fraction of the peak are
/// carried through unevolved; they hold no resolvable weight.
const SKIP_AMPLITUDE: f64 = 1e-18;

/// RK4 steps per ramp segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepControl {
    /// Per slice, enough steps for `h·ρ ≤ 0.01`, at least [`MIN_STEPS`].
    #[default]
    Auto,
    Fixed(usize),
}

impl StepControl {
    fn validate(self) -> Result<()> {
        match self {
            StepControl::Fixed(n) if n < MIN_STEPS => {
                Err(Error::invalid("steps", "must be at least 1000"))
            }
            _ => Ok(()),
        }
    }
}

/// Outcome of [`evolve_adiabatic`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticRun {
    /// Final joint state, momentum representation.
    pub state: JointState,
    /// Largest `|‖ψ_p(T)‖² − 1|` over all slices.
    pub max_norm_drift: f64,
    /// Largest number of RK4 steps used on one ramp.
    pub max_steps: usize,
}

impl AdiabaticRun {
    pub fn momentum_marginal(&self) -> Vec<f64> {
        self.state.marginal()
    }

    /// Mean of the pointer position after the run.
    pub fn mean_q(&self) -> f64 {
        let pos = self.state.to_representation(Representation::Position);
        let dens = pos.marginal();
        crate::pointer::weighted_moments(self.state.grid().positions(), &dens).0
    }
}

/// Row-compressed matrix with exact zeros dropped.
#[derive(Debug, Clone)]
struct Sparse {
    starts: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Sparse {
    fn new(m: &DMatrix<C64>) -> Self {
        let mut starts = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            starts.push(cols.len());
        }
        Sparse { starts, cols, vals }
    }

    /// `out = −i (self · x)`, with `other` scaled by `c` added in.
    fn apply_generator(&self, other: &Sparse, c: f64, x: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.starts[r]..self.starts[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            let mut acc2 = C64::new(0.0, 0.0);
            for k in other.starts[r]..other.starts[r + 1] {
                acc2 += other.vals[k] * x[other.cols[k]];
            }
            let y = acc + acc2 * c;
            *o = C64::new(y.im, -y.re);
        }
    }
}

/// Per-slice propagation shared by all slices of one run.
#[derive(Debug)]
pub(crate) struct SliceIntegrator {
    h0: Sparse,
    a: Sparse,
    h0_dense: DMatrix<C64>,
    a_dense: DMatrix<C64>,
    h0_radius: f64,
    a_radius: f64,
    ramp: RampProfile,
    steps: StepControl,
}

impl SliceIntegrator {
    pub(crate) fn new(h0: &Operator, a: &Operator, ramp: RampProfile, steps: StepControl) -> Result<Self> {
        h0.require_hermitian()?;
        a.require_hermitian()?;
        a.require_dim(h0.dim())?;
        steps.validate()?;
        Ok(SliceIntegrator {
            h0: Sparse::new(h0.matrix()),
            a: Sparse::new(a.matrix()),
            h0_dense: h0.matrix().clone(),
            a_dense: a.matrix().clone(),
            h0_radius: eig_hermitian(h0)?.max_abs_eigenvalue(),
            a_radius: eig_hermitian(a)?.max_abs_eigenvalue(),
            ramp,
            steps,
        })
    }

    fn steps_for(&self, p: f64) -> usize {
        match self.steps {
            StepControl::Fixed(n) => n,
            StepControl::Auto => {
                let rho = self.h0_radius + math::abs(p) * self.a_radius * self.ramp.plateau_value();
                let n = math::ceil(self.ramp.ramp_duration() * rho / AUTO_STEP_PHASE);
                MIN_STEPS.max(n as usize)
            }
        }
    }

    fn rk4(&self, p: f64, t0: f64, t1: f64, n: usize, x: &mut [C64], buf: &mut [Vec<C64>; 5]) {
        let h = (t1 - t0) / n as f64;
        let [k1, k2, k3, k4, tmp] = buf;
        for step in 0..n {
            let t = t0 + step as f64 * h;
            let c0 = p * self.ramp.value(t);
            let ch = p * self.ramp.value(t + 0.5 * h);
            let c1 = p * self.ramp.value(t + h);
            self.h0.apply_generator(&self.a, c0, x, k1);
            for i in 0..x.len() {
                tmp[i] = x[i] + k1[i] * (0.5 * h);
            }
            self.h0.apply_generator(&self.a, ch, tmp, k2);
            for i in 0..x.len() {
                tmp[i] = x[i] + k2[i] * (0.5 * h);
            }
            self.h0.apply_generator(&self.a, ch, tmp, k3);
            for i in 0..x.len() {
                tmp[i] = x[i] + k3[i] * h;
            }
            self.h0.apply_generator(&self.a, c1, tmp, k4);
            for i in 0..x.len() {
                x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
    }

    fn plateau(&self, p: f64, x: &mut [C64]) {
        let c = C64::new(p * self.ramp.plateau_value(), 0.0);
        let h = &self.h0_dense + &self.a_dense * c;
        let eig = h.symmetric_eigen();
        let tau = self.ramp.plateau_duration();
        let v = &eig.eigenvectors;
        let mut y: DVector<C64> = v.adjoint() * DVector::from_column_slice(x);
        for (yi, &e) in y.iter_mut().zip(eig.eigenvalues.iter()) {
            *yi *= math::cis_neg(e * tau);
        }
        let z = v * y;
        x.copy_from_slice(z.as_slice());
    }

    /// Evolves the system factor of the momentum node `p` over `[0, T]`.
    /// Returns the number of RK4 steps used per ramp.
    pub(crate) fn evolve_slice(&self, p: f64, x: &mut [C64]) -> usize {
        let n = self.steps_for(p);
        let d = x.len();
        let mut buf = [
            vec![C64::new(0.0, 0.0); d],
            vec![C64::new(0.0, 0.0); d],
            vec![C64::new(0.0, 0.0); d],
            vec![C64::new(0.0, 0.0); d],
            vec![C64::new(0.0, 0.0); d],
        ];
        let tr = self.ramp.ramp_duration();
        let t_end = self.ramp.total_time();
        self.rk4(p, 0.0, tr, n, x, &mut buf);
        self.plateau(p, x);
        self.rk4(p, t_end - tr, t_end, n, x, &mut buf);
        n
    }
}

/// Evolves `|ψ0⟩ ⊗ Φ` under `H0 + g(t) P A` over the ramp.
pub fn evolve_adiabatic(
    h0: &Operator,
    a: &Operator,
    psi0: &StateVector,
    w: &PointerWave,
    ramp: RampProfile,
    steps: StepControl,
) -> Result<AdiabaticRun> {
    evolve_adiabatic_with(h0, a, psi0, w, ramp, steps, Schedule::default())
}

/// [`evolve_adiabatic`] with an explicit slice schedule.
pub fn evolve_adiabatic_with(
    h0: &Operator,
    a: &Operator,
    psi0: &StateVector,
    w: &PointerWave,
    ramp: RampProfile,
    steps: StepControl,
    schedule: Schedule,
) -> Result<AdiabaticRun> {
    a.require_dim(psi0.dim())?;
    let integrator = SliceIntegrator::new(h0, a, ramp, steps)?;
    let (state, max_norm_drift, max_steps) =
        evolve_slices(&integrator, psi0.amplitudes(), w, schedule)?;
    Ok(AdiabaticRun {
        state,
        max_norm_drift,
        max_steps,
    })
}

pub(crate) fn evolve_slices(
    integrator: &SliceIntegrator,
    psi0: &[C64],
    w: &PointerWave,
    schedule: Schedule,
) -> Result<(JointState, f64, usize)> {
    let grid = *w.grid();
    let m = grid.points();
    let d = psi0.len();
    let phi = w.momentum_amplitudes();
    let peak = phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norm0: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();

    let slices = map_indexed(m, schedule, |j| {
        let mut x = psi0.to_vec();
        if phi[j].norm() <= SKIP_AMPLITUDE * peak {
            return (x, 0.0, 0);
        }
        let n = integrator.evolve_slice(grid.momentum(j), &mut x);
        let norm: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        (x, math::abs(norm - norm0) / norm0, n)
    });

    let mut amps = vec![C64::new(0.0, 0.0); d * m];
    let mut max_drift = 0.0f64;
    let mut max_steps = 0;
    for (j, (x, drift, n)) in slices.into_iter().enumerate() {
        max_drift = max_drift.max(drift);
        max_steps = max_steps.max(n);
        for (s, &xs) in x.iter().enumerate() {
            amps[s * m + j] = phi[j] * xs;
        }
    }
    if max_drift > DRIFT_LIMIT {
        return Err(Error::UnitarityDrift { drift: max_drift });
    }
    let state = JointState::from_parts(d, grid, amps, Representation::Momentum);
    Ok((state, max_drift, max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::qubit;
    use crate::pointer::{gaussian_pointer, Grid};

    fn run(a: &Operator, t: f64) -> AdiabaticRun {
        let grid = Grid::new(256, 20.0).unwrap();
        let w = gaussian_pointer(&grid, 1.0).unwrap();
        let ramp = RampProfile::with_default_ramp(t).unwrap();
        evolve_adiabatic(&Operator::pauli_z(), a, &qubit::up_z(), &w, ramp, StepControl::Auto).unwrap()
    }

    #[test]
    fn eigenstate_reads_expectation() {
        let r = run(&Operator::pauli_z(), 200.0);
        assert!((r.mean_q() - 1.0).abs() < 1e-3, "{}", r.mean_q());
        assert!(r.max_norm_drift < 1e-8);
        let r = run(&Operator::pauli_x(), 200.0);
        assert!(r.mean_q().abs() < 1e-3, "{}", r.mean_q());
    }

    #[test]
    fn momentum_marginal_is_conserved() {
        let grid = Grid::new(256, 20.0).unwrap();
        let w = gaussian_pointer(&grid, 1.0).unwrap();
        let before = w.momentum_density();
        let r = run(&Operator::pauli_x(), 20.0);
        for (a, b) in before.iter().zip(r.momentum_marginal()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_steps_rejected() {
        let grid = Grid::new(64, 20.0).unwrap();
        let w = gaussian_pointer(&grid, 1.5).unwrap();
        let ramp = RampProfile::with_default_ramp(1.0).unwrap();
        let err = evolve_adiabatic(
            &Operator::pauli_z(),
            &Operator::pauli_x(),
            &qubit::up_z(),
            &w,
            ramp,
            StepControl::Fixed(10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }
}

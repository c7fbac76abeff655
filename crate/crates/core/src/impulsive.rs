//! Impulsive von Neumann measurements.
//!
//! The interaction `H = g(t) P A` with `∫g dt = 1` is applied as the exact
//! unitary `e^{−iPA}`: in the eigenbasis of `A`, the pointer factor of the
//! component `|a_i⟩` is translated by `a_i`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::ensemble::{self, CdfSample, EnsembleReport, InverseCdf, RngStream, Schedule};
use crate::hilbert::{eig_hermitian, weak_moments, weak_value, Operator, StateVector, TwoStateVector};
use crate::math;
use crate::pointer::{
    self, gaussian_pointer, mixture_mean, Grid, MixtureTerm, PointerWave, Representation,
};
use crate::{Error, Result, C64};

/// System ⊗ pointer amplitudes, `amps[s * M + k]` for system index `s`.
///
/// Normalized so that `Σ_s Σ_k |amp|² · cell = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    system_dim: usize,
    grid: Grid,
    amps: Vec<C64>,
    repr: Representation,
}

impl JointState {
    pub(crate) fn from_parts(system_dim: usize, grid: Grid, amps: Vec<C64>, repr: Representation) -> Self {
        debug_assert_eq!(amps.len(), system_dim * grid.points());
        JointState {
            system_dim,
            grid,
            amps,
            repr,
        }
    }

    pub fn product(psi: &StateVector, w: &PointerWave) -> Self {
        let m = w.grid().points();
        let mut amps = Vec::with_capacity(psi.dim() * m);
        for &c in psi.amplitudes() {
            amps.extend(w.amplitudes().iter().map(|&a| c * a));
        }
        JointState {
            system_dim: psi.dim(),
            grid: *w.grid(),
            amps,
            repr: w.representation(),
        }
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Pointer amplitudes attached to system basis state `s`.
    pub fn row(&self, s: usize) -> &[C64] {
        let m = self.grid.points();
        &self.amps[s * m..(s + 1) * m]
    }

    pub(crate) fn cell(&self) -> f64 {
        match self.repr {
            Representation::Position => self.grid.spacing(),
            Representation::Momentum => self.grid.momentum_spacing(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell()
    }

    pub fn to_representation(&self, target: Representation) -> JointState {
        let mut out = self.clone();
        if target != self.repr {
            let m = self.grid.points();
            for row in out.amps.chunks_mut(m) {
                pointer::convert(&self.grid, row, self.repr, target);
            }
            out.repr = target;
        }
        out
    }

    /// Marginal density of the pointer in the current representation.
    pub fn marginal(&self) -> Vec<f64> {
        let m = self.grid.points();
        let mut out = vec![0.0; m];
        for row in self.amps.chunks(m) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.norm_sqr();
            }
        }
        out
    }

    /// System state with the pointer traced out.
    pub fn reduced_density_matrix(&self) -> DMatrix<C64> {
        let d = self.system_dim;
        let cell = self.cell();
        DMatrix::from_fn(d, d, |r, c| {
            self.row(r)
                .iter()
                .zip(self.row(c))
                .map(|(a, b)| a * b.conj())
                .sum::<C64>()
                * cell
        })
    }

    /// Unnormalized system amplitudes at pointer node `k`.
    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.system_dim).map(|s| self.row(s)[k]).collect()
    }
}

/// Applies `e^{−iPA}` to `|ψ⟩ ⊗ Φ`.
pub fn entangle(psi: &StateVector, a: &Operator, w: &PointerWave) -> Result<JointState> {
    a.require_hermitian()?;
    a.require_dim(psi.dim())?;
    let grid = *w.grid();
    let spec = eig_hermitian(a)?;
    for &ai in &spec.eigenvalues {
        grid.check_shift(ai)?;
    }
    let d = psi.dim();
    let m = grid.points();
    let phi = w.momentum_amplitudes();
    let coeffs = spec.coefficients(psi)?;

    let mut amps = vec![C64::new(0.0, 0.0); d * m];
    let mut shifted = vec![C64::new(0.0, 0.0); m];
    for ((&ai, v), &ci) in spec.eigenvalues.iter().zip(&spec.eigenvectors).zip(&coeffs) {
        if ci == C64::new(0.0, 0.0) {
            continue;
        }
        shifted.copy_from_slice(&phi);
        pointer::apply_shift_phase(&grid, &mut shifted, ai);
        for (s, &vs) in v.amplitudes().iter().enumerate() {
            let f = vs * ci;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, &p) in amps[s * m..(s + 1) * m].iter_mut().zip(&shifted) {
                *o += f * p;
            }
        }
    }
    let js = JointState {
        system_dim: d,
        grid,
        amps,
        repr: Representation::Momentum,
    };
    Ok(js.to_representation(w.representation()))
}

/// Marginal pointer density over `Q` with the system traced out.
pub fn pointer_distribution(js: &JointState) -> Vec<f64> {
    match js.repr {
        Representation::Position => js.marginal(),
        Representation::Momentum => js.to_representation(Representation::Position).marginal(),
    }
}

/// One single-shot pointer reading.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutRecord {
    pub reading: f64,
    pub collapsed_system: StateVector,
    /// Whether post-selection succeeded; `true` where none was attempted.
    pub success: bool,
}

/// Draws pointer readings from a joint state, with collapse of the system
/// onto its conditional state at the sampled node.
#[derive(Debug, Clone)]
pub struct ReadoutSampler {
    js: JointState,
    cdf: InverseCdf,
}

impl ReadoutSampler {
    pub fn new(js: &JointState) -> Result<Self> {
        let js = js.to_representation(Representation::Position);
        let cdf = InverseCdf::new(js.grid.positions().collect(), &js.marginal())?;
        Ok(ReadoutSampler { js, cdf })
    }

    pub fn joint_state(&self) -> &JointState {
        &self.js
    }

    fn collapse(&self, s: &CdfSample) -> StateVector {
        let near = s.nearest_node();
        let other = if near == s.node { s.node + 1 } else { s.node };
        StateVector::new(self.js.column(near))
            .or_else(|_| StateVector::new(self.js.column(other)))
            .expect("sampled interval carries probability")
    }

    pub fn draw(&self, rng: &mut RngStream) -> ReadoutRecord {
        let s = self.cdf.draw(rng);
        ReadoutRecord {
            reading: s.value,
            collapsed_system: self.collapse(&s),
            success: true,
        }
    }

    /// Reads the pointer, then post-selects the system on `psi2`.
    ///
    /// On success the collapsed system is `psi2`.
    pub fn draw_post_selected(&self, psi2: &StateVector, rng: &mut RngStream) -> Result<ReadoutRecord> {
        let mut rec = self.draw(rng);
        let p = rec.collapsed_system.fidelity(psi2)?;
        rec.success = rng.uniform() < p;
        if rec.success {
            rec.collapsed_system = psi2.clone();
        }
        Ok(rec)
    }
}

/// Single ideal readout. Builds a fresh sampler; use [`ReadoutSampler`] for
/// repeated draws.
pub fn ideal_readout(js: &JointState, rng: &mut RngStream) -> Result<ReadoutRecord> {
    Ok(ReadoutSampler::new(js)?.draw(rng))
}

/// `n` readouts; readout `i` uses stream `(seed, i)`.
pub fn readout_ensemble(
    js: &JointState,
    n: usize,
    seed: u64,
    schedule: Schedule,
) -> Result<Vec<ReadoutRecord>> {
    let sampler = ReadoutSampler::new(js)?;
    Ok(ensemble::collect_samples(n, seed, schedule, |rng| sampler.draw(rng)))
}

/// Conditional pointer state `∝ ⟨Ψ2|js⟩` and its probability.
pub fn post_select(js: &JointState, psi2: &StateVector) -> Result<(PointerWave, f64)> {
    if psi2.dim() != js.system_dim {
        return Err(Error::DimensionMismatch {
            expected: js.system_dim,
            found: psi2.dim(),
        });
    }
    let m = js.grid.points();
    let mut wave = vec![C64::new(0.0, 0.0); m];
    for (s, &b) in psi2.amplitudes().iter().enumerate() {
        let b = b.conj();
        if b == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, &a) in wave.iter_mut().zip(js.row(s)) {
            *o += b * a;
        }
    }
    let prob = wave.iter().map(|a| a.norm_sqr()).sum::<f64>() * js.cell();
    if !(prob >= 1e-300) {
        return Err(Error::PostSelectionImpossible { probability: prob });
    }
    let w = PointerWave::from_amplitudes(js.grid, wave, js.repr)?;
    Ok((w, prob))
}

/// Mixture terms `c_i = ⟨Ψ2|a_i⟩⟨a_i|Ψ1⟩` centred at the eigenvalues `a_i`.
pub fn post_selection_terms(tsv: &TwoStateVector, a: &Operator) -> Result<Vec<MixtureTerm>> {
    a.require_dim(tsv.dim())?;
    let spec = eig_hermitian(a)?;
    spec.eigenvalues
        .iter()
        .zip(&spec.eigenvectors)
        .map(|(&ai, v)| {
            let c = tsv.bra().inner(v)? * v.inner(tsv.ket())?;
            Ok(MixtureTerm::new(c, ai))
        })
        .collect()
}

/// Exact post-selected pointer mean against the weak-value prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakLimitReport {
    pub delta: f64,
    pub exact_mean: f64,
    pub weak_value: C64,
    /// `Re A_w`.
    pub weak_prediction: f64,
    /// `(A^n)_w − (A_w)^n` for `n = 2, 3, 4`.
    pub residual_moments: Vec<C64>,
}

impl WeakLimitReport {
    pub fn error(&self) -> f64 {
        math::abs(self.exact_mean - self.weak_prediction)
    }
}

pub fn weak_limit_report(tsv: &TwoStateVector, a: &Operator, delta: f64) -> Result<WeakLimitReport> {
    let aw = weak_value(a, tsv)?;
    let terms = post_selection_terms(tsv, a)?;
    let exact_mean = mixture_mean(&terms, delta)?;
    let moments = weak_moments(a, tsv, 4)?;
    let mut power = aw;
    let residual_moments = moments[1..]
        .iter()
        .map(|&m| {
            power *= aw;
            m - power
        })
        .collect();
    Ok(WeakLimitReport {
        delta,
        exact_mean,
        weak_value: aw,
        weak_prediction: aw.re,
        residual_moments,
    })
}

/// Smallest Δ admitted by [`weak_ensemble_estimate`], as a multiple of the
/// largest `|a_i|`.
pub const WEAKNESS_FACTOR: f64 = 5.0;

/// Estimates `⟨A⟩` from `n` weak single shots on copies of `psi`.
pub fn weak_ensemble_estimate(
    psi: &StateVector,
    a: &Operator,
    delta: f64,
    n: usize,
    seed: u64,
    schedule: Schedule,
) -> Result<EnsembleReport> {
    let readings = weak_ensemble_readings(psi, a, delta, n, seed, schedule)?;
    let mut report = ensemble::summarize(&readings, ensemble::DEFAULT_BINS)?;
    report.seed = Some(seed);
    Ok(report)
}

/// The single-shot readings behind [`weak_ensemble_estimate`].
pub fn weak_ensemble_readings(
    psi: &StateVector,
    a: &Operator,
    delta: f64,
    n: usize,
    seed: u64,
    schedule: Schedule,
) -> Result<Vec<f64>> {
    a.require_hermitian()?;
    let a_max = eig_hermitian(a)?.max_abs_eigenvalue();
    let required = WEAKNESS_FACTOR * a_max;
    if !(delta >= required) || !delta.is_finite() {
        return Err(Error::WeaknessViolated { delta, required });
    }
    if n == 0 {
        return Err(Error::EmptyInput("ensemble size must be at least 1"));
    }
    let grid = Grid::auto(delta, a_max)?;
    let js = entangle(psi, a, &gaussian_pointer(&grid, delta)?)?;
    let cdf = InverseCdf::new(grid.positions().collect(), &pointer_distribution(&js))?;
    Ok(ensemble::collect_samples(n, seed, schedule, |rng| cdf.draw(rng).value))
}

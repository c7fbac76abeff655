//! One-dimensional pointer wavefunctions on a periodic grid.
//!
//! Position nodes are `Q_k = −L/2 + k·dq` with `dq = L/M`; the conjugate
//! momentum lattice is `P_j = (j − M/2)·dp` with `dp = 2π/L`. Amplitudes are
//! continuum-normalized (`Σ|Φ|² dq = 1`) and the momentum representation is
//! the unitary discretization of `Φ̃(P) = (2π)^{-1/2} ∫ Φ(Q) e^{−iPQ} dQ`,
//! so multiplying `Φ̃` by `e^{−iPa}` moves the pointer by `+a`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fft::{fft_in_place, Direction};
use crate::math;
use crate::{Error, Result, C64};

/// Grid size used when none is requested.
pub const DEFAULT_POINTS: usize = 1024;
const MIN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    points: usize,
    extent: f64,
}

impl Grid {
    pub fn new(points: usize, extent: f64) -> Result<Self> {
        if !points.is_power_of_two() || points < MIN_POINTS {
            return Err(Error::InvalidGrid("point count must be a power of two >= 64"));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidGrid("extent must be positive and finite"));
        }
        Ok(Grid { points, extent })
    }

    /// `M = 1024`, `L = max(20Δ, 8(max|a| + Δ))`.
    pub fn auto(delta: f64, max_shift: f64) -> Result<Self> {
        Self::auto_with_points(DEFAULT_POINTS, delta, max_shift)
    }

    pub fn auto_with_points(points: usize, delta: f64, max_shift: f64) -> Result<Self> {
        let extent = f64::max(20.0 * delta, 8.0 * (math::abs(max_shift) + delta));
        Self::new(points, extent)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// `dq`
    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    /// `dp`
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / self.extent
    }

    pub fn position(&self, k: usize) -> f64 {
        -0.5 * self.extent + k as f64 * self.spacing()
    }

    pub fn momentum(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.momentum_spacing()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        (0..self.points).map(move |k| self.position(k))
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        (0..self.points).map(move |j| self.momentum(j))
    }

    /// Largest magnitude of `P` on the lattice.
    pub fn max_momentum(&self) -> f64 {
        (self.points / 2) as f64 * self.momentum_spacing()
    }

    /// Shifts must stay below `L/4` to avoid wraparound.
    pub fn shift_limit(&self) -> f64 {
        0.25 * self.extent
    }

    pub(crate) fn check_shift(&self, shift: f64) -> Result<()> {
        let limit = self.shift_limit();
        if math::abs(shift) < limit {
            Ok(())
        } else {
            Err(Error::ShiftTooLarge { shift, limit })
        }
    }

    /// Resolution and truncation guards `4·dq < Δ < L/10`.
    pub(crate) fn check_width(&self, delta: f64) -> Result<()> {
        let (min, max) = (4.0 * self.spacing(), 0.1 * self.extent);
        if delta > min && delta < max {
            Ok(())
        } else {
            Err(Error::GridResolution { delta, min, max })
        }
    }

    fn measure(&self, repr: Representation) -> f64 {
        match repr {
            Representation::Position => self.spacing(),
            Representation::Momentum => self.momentum_spacing(),
        }
    }
}

/// Which conjugate variable the amplitudes are tabulated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Position,
    Momentum,
}

/// Position amplitudes to momentum amplitudes, in place.
pub(crate) fn to_momentum(grid: &Grid, buf: &mut [C64]) {
    alternate_signs(buf);
    fft_in_place(buf, Direction::Forward);
    let scale = grid.spacing() / math::sqrt(2.0 * PI);
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= if j % 2 == 0 { scale } else { -scale };
    }
}

/// Momentum amplitudes to position amplitudes, in place.
pub(crate) fn to_position(grid: &Grid, buf: &mut [C64]) {
    alternate_signs(buf);
    fft_in_place(buf, Direction::Inverse);
    let scale = grid.momentum_spacing() / math::sqrt(2.0 * PI);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= if k % 2 == 0 { scale } else { -scale };
    }
}

pub(crate) fn convert(grid: &Grid, buf: &mut [C64], from: Representation, to: Representation) {
    match (from, to) {
        (Representation::Position, Representation::Momentum) => to_momentum(grid, buf),
        (Representation::Momentum, Representation::Position) => to_position(grid, buf),
        _ => {}
    }
}

fn alternate_signs(buf: &mut [C64]) {
    for z in buf.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}

/// Multiplies momentum amplitudes by `e^{−iPa}`.
pub(crate) fn apply_shift_phase(grid: &Grid, buf: &mut [C64], shift: f64) {
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= math::cis_neg(grid.momentum(j) * shift);
    }
}

/// A pointer wavefunction sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointerWave {
    grid: Grid,
    amps: Vec<C64>,
    repr: Representation,
}

/// First and second moments of the pointer in both representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_q: f64,
    pub var_q: f64,
    pub mean_p: f64,
    pub var_p: f64,
}

impl PointerWave {
    /// Normalizes `amps` (tabulated in `repr`) so that `Σ|amp|² d = 1`.
    pub fn from_amplitudes(grid: Grid, mut amps: Vec<C64>, repr: Representation) -> Result<Self> {
        if amps.len() != grid.points() {
            return Err(Error::DimensionMismatch {
                expected: grid.points(),
                found: amps.len(),
            });
        }
        let integral = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.measure(repr);
        if !(integral > 1e-300) || !integral.is_finite() {
            return Err(Error::NormalizationUnderflow { integral });
        }
        let s = 1.0 / math::sqrt(integral);
        for a in amps.iter_mut() {
            *a *= s;
        }
        Ok(PointerWave { grid, amps, repr })
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

    /// `Σ|amp|²` times the cell size of the current representation.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.measure(self.repr)
    }

    pub fn to_representation(&self, target: Representation) -> PointerWave {
        let mut amps = self.amps.clone();
        convert(&self.grid, &mut amps, self.repr, target);
        PointerWave {
            grid: self.grid,
            amps,
            repr: target,
        }
    }

    pub fn position_amplitudes(&self) -> Vec<C64> {
        self.to_representation(Representation::Position).amps
    }

    pub fn momentum_amplitudes(&self) -> Vec<C64> {
        self.to_representation(Representation::Momentum).amps
    }

    /// `|Φ(Q_k)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.position_amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|Φ̃(P_j)|²`.
    pub fn momentum_density(&self) -> Vec<f64> {
        self.momentum_amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn moments(&self) -> Moments {
        let (mean_q, var_q) = weighted_moments(self.grid.positions(), &self.density());
        let (mean_p, var_p) = weighted_moments(self.grid.momenta(), &self.momentum_density());
        Moments {
            mean_q,
            var_q,
            mean_p,
            var_p,
        }
    }
}

/// Mean and variance of `xs` under the (unnormalized) weights; the uniform
/// cell size cancels.
pub(crate) fn weighted_moments(xs: impl Iterator<Item = f64> + Clone, w: &[f64]) -> (f64, f64) {
    let total: f64 = w.iter().sum();
    let mean = xs.clone().zip(w).map(|(x, p)| x * p).sum::<f64>() / total;
    let var = xs.zip(w).map(|(x, p)| (x - mean) * (x - mean) * p).sum::<f64>() / total;
    (mean, var)
}

/// The Gaussian pointer `Φ(Q) ∝ e^{−Q²/2Δ²}`.
pub fn gaussian_pointer(grid: &Grid, delta: f64) -> Result<PointerWave> {
    grid.check_width(delta)?;
    let amps = grid
        .positions()
        .map(|q| C64::new(math::exp(-q * q / (2.0 * delta * delta)), 0.0))
        .collect();
    PointerWave::from_amplitudes(*grid, amps, Representation::Position)
}

pub fn change_representation(w: &PointerWave, target: Representation) -> PointerWave {
    w.to_representation(target)
}

/// Translates the pointer by `shift` through the momentum phase `e^{−iPa}`.
pub fn shift_pointer(w: &PointerWave, shift: f64) -> Result<PointerWave> {
    w.grid.check_shift(shift)?;
    let mut amps = w.momentum_amplitudes();
    apply_shift_phase(&w.grid, &mut amps, shift);
    let shifted = PointerWave {
        grid: w.grid,
        amps,
        repr: Representation::Momentum,
    };
    Ok(shifted.to_representation(w.repr))
}

/// Position density together with the moments of both representations.
pub fn density_and_moments(w: &PointerWave) -> (Vec<f64>, Moments) {
    (w.density(), w.moments())
}

/// One component `c · e^{−(Q−a)²/2Δ²}` of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureTerm {
    pub coeff: C64,
    pub center: f64,
}

impl MixtureTerm {
    pub fn new(coeff: C64, center: f64) -> Self {
        MixtureTerm { coeff, center }
    }
}

/// `Σ c_i e^{−(Q−a_i)²/2Δ²}`, kept analytic and normalized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureWave {
    width: f64,
    terms: Vec<MixtureTerm>,
}

/// Integrals of the normalized mixture density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureMoments {
    /// `∫|Σ c_i e^{−(Q−a_i)²/2Δ²}|² dQ` before normalization.
    pub integral: f64,
    pub mean: f64,
    pub variance: f64,
}

impl GaussianMixtureWave {
    pub fn new(width: f64, terms: Vec<MixtureTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyInput("mixture needs at least one term"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::invalid("delta", "must be positive and finite"));
        }
        Ok(GaussianMixtureWave { width, terms })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    /// Unnormalized amplitude at `q`.
    pub fn amplitude_at(&self, q: f64) -> C64 {
        let two_d2 = 2.0 * self.width * self.width;
        self.terms
            .iter()
            .map(|t| t.coeff * math::exp(-(q - t.center) * (q - t.center) / two_d2))
            .sum()
    }

    /// Normalized samples of the mixture on `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<PointerWave> {
        grid.check_width(self.width)?;
        for t in &self.terms {
            grid.check_shift(t.center)?;
        }
        let amps = grid.positions().map(|q| self.amplitude_at(q)).collect();
        PointerWave::from_amplitudes(*grid, amps, Representation::Position)
    }

    /// Closed-form moments of `|amplitude|²` from pairwise Gaussian overlaps:
    /// the product of the terms centred at `a_i` and `a_j` is
    /// `e^{−(a_i−a_j)²/4Δ²} e^{−(Q−m)²/Δ²}` with `m = (a_i+a_j)/2`.
    pub fn moments(&self) -> Result<MixtureMoments> {
        let d = self.width;
        let base = math::sqrt(PI) * d;
        let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for ti in &self.terms {
            for tj in &self.terms {
                let sep = ti.center - tj.center;
                let mid = 0.5 * (ti.center + tj.center);
                let w = (ti.coeff.conj() * tj.coeff).re * math::exp(-sep * sep / (4.0 * d * d)) * base;
                z += w;
                s1 += w * mid;
                s2 += w * (mid * mid + 0.5 * d * d);
            }
        }
        if !(z > 1e-300) || !z.is_finite() {
            return Err(Error::NormalizationUnderflow { integral: z });
        }
        let mean = s1 / z;
        Ok(MixtureMoments {
            integral: z,
            mean,
            variance: s2 / z - mean * mean,
        })
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.moments()?.mean)
    }
}

/// Grid sampling of `Σ c_i e^{−(Q−a_i)²/2Δ²}`.
pub fn mixture_wave(terms: &[MixtureTerm], delta: f64, grid: &Grid) -> Result<PointerWave> {
    GaussianMixtureWave::new(delta, terms.to_vec())?.sample(grid)
}

/// Exact mean of the normalized mixture density.
pub fn mixture_mean(terms: &[MixtureTerm], delta: f64) -> Result<f64> {
    GaussianMixtureWave::new(delta, terms.to_vec())?.mean()
}

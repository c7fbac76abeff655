use alloc::vec::Vec;

use nalgebra::DVector;

use crate::math;
use crate::{Error, Result, C64};

/// Relative tolerance used when picking the phase-reference component.
const PHASE_TIE: f64 = 1e-10;

/// A normalized ket in a finite-dimensional Hilbert space.
///
/// Bras are stored as kets and conjugated on use.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    /// Normalizes `amps` into a state. Fails on an empty or null vector.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amps))
    }

    pub fn from_vector(amps: DVector<C64>) -> Result<Self> {
        let norm = vector_norm(amps.as_slice());
        if amps.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            amps: amps.unscale(norm),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Multiplies by a global phase so that the largest-magnitude component
    /// (first one on ties) is real and positive.
    pub fn phase_fixed(mut self) -> Self {
        fix_phase(self.amps.as_mut_slice());
        self
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            })
        }
    }

    pub(crate) fn from_normalized_unchecked(amps: DVector<C64>) -> Self {
        StateVector { amps }
    }
}

pub(crate) fn vector_norm(amps: &[C64]) -> f64 {
    math::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
}

pub(crate) fn fix_phase(amps: &mut [C64]) {
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = amps
        .iter()
        .position(|a| a.norm() >= max * (1.0 - PHASE_TIE))
        .unwrap_or(0);
    let a = amps[pivot];
    let phase = a.conj() / a.norm();
    for z in amps.iter_mut() {
        *z *= phase;
    }
    amps[pivot] = C64::new(amps[pivot].re, 0.0);
}

/// Named single-qubit states in the `(|↑_z⟩, |↓_z⟩)` basis.
pub mod qubit {
    use super::StateVector;
    use crate::C64;
    use core::f64::consts::FRAC_1_SQRT_2 as H;
    use nalgebra::DVector;

    fn make(a: C64, b: C64) -> StateVector {
        StateVector::from_normalized_unchecked(DVector::from_vec(alloc::vec![a, b]))
    }

    pub fn up_z() -> StateVector {
        make(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn down_z() -> StateVector {
        make(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn up_x() -> StateVector {
        make(C64::new(H, 0.0), C64::new(H, 0.0))
    }

    pub fn down_x() -> StateVector {
        make(C64::new(H, 0.0), C64::new(-H, 0.0))
    }

    pub fn up_y() -> StateVector {
        make(C64::new(H, 0.0), C64::new(0.0, H))
    }

    pub fn down_y() -> StateVector {
        make(C64::new(H, 0.0), C64::new(0.0, -H))
    }

    /// `cos θ |↑_z⟩ + sign · sin θ |↓_z⟩`.
    pub fn tilted(theta: f64, sign: f64) -> StateVector {
        let (s, c) = (crate::math::sin(theta), crate::math::cos(theta));
        make(C64::new(c, 0.0), C64::new(sign * s, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_on_construction() {
        let s = StateVector::from_real(&[3.0, 4.0]).unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert!((vector_norm(s.amplitudes()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_null_vector() {
        assert_eq!(StateVector::from_real(&[0.0, 0.0]), Err(Error::ZeroNorm));
        assert_eq!(StateVector::new(Vec::new()), Err(Error::ZeroNorm));
    }

    #[test]
    fn phase_fix_uses_first_of_tied_components() {
        let s = StateVector::new(alloc::vec![C64::new(0.0, 1.0), C64::new(-1.0, 0.0)])
            .unwrap()
            .phase_fixed();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - C64::new(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_conjugates_left_argument() {
        let ov = qubit::up_y().inner(&qubit::up_x()).unwrap();
        assert!((ov - C64::new(0.5, -0.5)).norm() < 1e-15);
        assert!(qubit::up_x().inner(&StateVector::basis(3, 0)).is_err());
    }
}

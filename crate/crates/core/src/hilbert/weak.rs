use alloc::vec::Vec;

use super::{Operator, StateVector};
use crate::{Error, Result, C64};

/// Smallest admissible `|⟨Ψ2|Ψ1⟩|`.
pub const OVERLAP_THRESHOLD: f64 = 1e-12;

/// A pre-selected ket `|Ψ1⟩` together with a post-selected bra `⟨Ψ2|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateVector {
    ket: StateVector,
    bra: StateVector,
    overlap: C64,
}

impl TwoStateVector {
    /// `bra` is given as a ket and conjugated on use.
    pub fn new(ket: StateVector, bra: StateVector) -> Result<Self> {
        let overlap = bra.inner(&ket)?;
        if overlap.norm() <= OVERLAP_THRESHOLD {
            return Err(Error::OverlapVanishes {
                overlap: overlap.norm(),
                threshold: OVERLAP_THRESHOLD,
            });
        }
        Ok(TwoStateVector { ket, bra, overlap })
    }

    pub fn ket(&self) -> &StateVector {
        &self.ket
    }

    pub fn bra(&self) -> &StateVector {
        &self.bra
    }

    /// `⟨Ψ2|Ψ1⟩`.
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn dim(&self) -> usize {
        self.ket.dim()
    }
}

/// `A_w = ⟨Ψ2|A|Ψ1⟩ / ⟨Ψ2|Ψ1⟩`.
pub fn weak_value(a: &Operator, tsv: &TwoStateVector) -> Result<C64> {
    Ok(a.sandwich(tsv.bra(), tsv.ket())? / tsv.overlap())
}

/// `⟨ψ|A|ψ⟩` for hermitian `A`.
pub fn expectation(a: &Operator, psi: &StateVector) -> Result<f64> {
    a.require_hermitian()?;
    Ok(a.sandwich(psi, psi)?.re)
}

/// `[(A^1)_w, …, (A^n_max)_w]`.
pub fn weak_moments(a: &Operator, tsv: &TwoStateVector, n_max: usize) -> Result<Vec<C64>> {
    a.require_dim(tsv.dim())?;
    let mut out = Vec::with_capacity(n_max);
    let mut v = tsv.ket().as_vector().clone();
    for _ in 0..n_max {
        v = a.matrix() * v;
        out.push(tsv.bra().as_vector().dotc(&v) / tsv.overlap());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::qubit;

    #[test]
    fn orthogonal_pair_is_rejected() {
        let err = TwoStateVector::new(qubit::up_z(), qubit::down_z()).unwrap_err();
        assert!(matches!(err, Error::OverlapVanishes { .. }));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let tsv = TwoStateVector::new(qubit::up_x(), qubit::up_y()).unwrap();
        assert!(matches!(
            weak_value(&Operator::identity(3), &tsv),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expectation_requires_hermitian() {
        let nh = Operator::pauli_z().scale(C64::new(0.0, 1.0));
        assert!(matches!(
            expectation(&nh, &qubit::up_x()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn second_moment_of_sigma_z_is_one() {
        let tsv = TwoStateVector::new(qubit::tilted(0.3, 1.0), qubit::up_y()).unwrap();
        let m = weak_moments(&Operator::pauli_z(), &tsv, 4).unwrap();
        assert!((m[1] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((m[3] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((m[0] - weak_value(&Operator::pauli_z(), &tsv).unwrap()).norm() < 1e-14);
    }
}

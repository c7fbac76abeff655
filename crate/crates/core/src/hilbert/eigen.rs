//! Hermitian spectral decompositions and bi-orthogonal eigensystems.
//!
//! A nondegenerate operator `H` is written as
//! `H = Σ_i ω_i |Φ_i⟩⟨Ψ_i| / ⟨Ψ_i|Φ_i⟩`, where the eigen-kets `|Φ_i⟩` are
//! right eigenvectors and the eigen-bras `⟨Ψ_i|` are left eigenvectors.
//! The two families are separately non-orthogonal but satisfy
//! `⟨Ψ_i|Φ_j⟩ = δ_ij ⟨Ψ_i|Φ_i⟩`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::state::{fix_phase, vector_norm};
use super::{Operator, StateVector};
use crate::math;
use crate::{Error, Result, C64};

/// Minimum pairwise eigenvalue distance accepted by [`eig_biorthogonal`].
pub const DEGENERACY_TOL: f64 = 1e-9;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigen-pairs of a hermitian operator, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ a_i |a_i⟩⟨a_i|`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (a, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m += v.as_vector() * v.as_vector().adjoint() * C64::new(*a, 0.0);
        }
        Operator::from_matrix_unchecked(m)
    }

    /// Expansion coefficients `⟨a_i|ψ⟩`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<Vec<C64>> {
        self.eigenvectors.iter().map(|v| v.inner(psi)).collect()
    }

    /// Smallest distance from level `i` to any other level.
    pub fn gap_at(&self, i: usize) -> f64 {
        let a = self.eigenvalues[i];
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &b)| math::abs(a - b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_gap(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.gap_at(i))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|&a| math::abs(a)).fold(0.0, f64::max)
    }
}

/// Diagonalizes a hermitian operator.
///
/// Eigenvalues come out ascending; each eigenvector has its largest-magnitude
/// component real and positive.
pub fn eig_hermitian(a: &Operator) -> Result<SpectralDecomposition> {
    a.require_hermitian()?;
    let eig = a.matrix().clone().symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<C64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&val, col)| {
            let mut v = col.clone_owned();
            fix_phase(v.as_mut_slice());
            (val, v)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (eigenvalues, eigenvectors) = pairs
        .into_iter()
        .map(|(val, v)| {
            let state = StateVector::from_vector(v).expect("eigenvectors are unit vectors");
            (val, state)
        })
        .unzip();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Right/left eigen-pairs of a nondegenerate (generally non-hermitian)
/// operator, ordered by ascending real part of the frequency, then imaginary.
///
/// Kets and bras are unit vectors with the phase convention of
/// [`StateVector::phase_fixed`]; `norms[i] = ⟨Ψ_i|Φ_i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalSystem {
    pub frequencies: Vec<C64>,
    pub kets: Vec<StateVector>,
    pub bras: Vec<StateVector>,
    pub norms: Vec<C64>,
}

impl BiorthogonalSystem {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kets.first().map_or(0, StateVector::dim)
    }

    /// `Σ_i ω_i |Φ_i⟩⟨Ψ_i| / ⟨Ψ_i|Φ_i⟩`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..self.len() {
            let w = self.frequencies[i] / self.norms[i];
            m += self.kets[i].as_vector() * self.bras[i].as_vector().adjoint() * w;
        }
        Operator::from_matrix_unchecked(m)
    }

    /// `max_{i≠j} |⟨Ψ_i|Φ_j⟩|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, bra) in self.bras.iter().enumerate() {
            for (j, ket) in self.kets.iter().enumerate() {
                if i != j {
                    worst = worst.max(bra.as_vector().dotc(ket.as_vector()).norm());
                }
            }
        }
        worst
    }

    /// Coefficients `α_i` with `|ψ⟩ = Σ α_i |Φ_i⟩`, found by projecting on
    /// the dual bras: `α_i = ⟨Ψ_i|ψ⟩ / ⟨Ψ_i|Φ_i⟩`.
    pub fn ket_coefficients(&self, psi: &StateVector) -> Result<Vec<C64>> {
        self.bras
            .iter()
            .zip(&self.norms)
            .map(|(bra, n)| Ok(bra.inner(psi)? / n))
            .collect()
    }

    /// Weak value of `a` for the two-state vector `⟨Ψ_i| |Φ_i⟩`.
    pub fn pair_weak_value(&self, i: usize, a: &Operator) -> Result<C64> {
        Ok(a.sandwich(&self.bras[i], &self.kets[i])? / self.norms[i])
    }

    /// `1 / |⟨Ψ_i|Φ_i⟩|` for unit bra and ket: the overlap of the ket with
    /// its dual bra scaled so that the pair is bi-normalized.
    pub fn bra_ket_fidelity(&self, i: usize) -> f64 {
        1.0 / self.norms[i].norm()
    }
}

/// Computes the bi-orthogonal eigensystem of `h`.
///
/// Hermitian input takes the [`eig_hermitian`] route, so bras coincide with
/// kets exactly. Otherwise the complex Schur form `h = Q T Q†` is computed;
/// right eigenvectors of `T` come from back substitution and left ones from
/// forward substitution on `T†`, both mapped back through `Q`.
pub fn eig_biorthogonal(h: &Operator) -> Result<BiorthogonalSystem> {
    if h.is_hermitian() {
        let spec = eig_hermitian(h)?;
        check_gap(&spec.eigenvalues.iter().map(|&a| C64::new(a, 0.0)).collect::<Vec<_>>())?;
        let n = spec.dim();
        return Ok(BiorthogonalSystem {
            frequencies: spec.eigenvalues.iter().map(|&a| C64::new(a, 0.0)).collect(),
            kets: spec.eigenvectors.clone(),
            bras: spec.eigenvectors,
            norms: alloc::vec![C64::new(1.0, 0.0); n],
        });
    }

    let n = h.dim();
    let schur = h
        .matrix()
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::ConvergenceFailure("Schur iteration did not converge"))?;
    let (q, t) = schur.unpack();
    let omegas: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    check_gap(&omegas)?;

    let mut entries: Vec<(C64, DVector<C64>, DVector<C64>)> = Vec::with_capacity(n);
    for k in 0..n {
        let w = omegas[k];

        // T y = w y with y_k = 1, y_j = 0 for j > k
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            y[i] = -s / (t[(i, i)] - w);
        }

        // T† z = conj(w) z with z_k = 1, z_j = 0 for j < k
        let mut z = DVector::<C64>::zeros(n);
        z[k] = C64::new(1.0, 0.0);
        for i in (k + 1)..n {
            let mut s = C64::new(0.0, 0.0);
            for j in k..i {
                s += t[(j, i)].conj() * z[j];
            }
            z[i] = -s / (t[(i, i)] - w).conj();
        }

        let mut ket = &q * y;
        let mut bra = &q * z;
        normalize_in_place(&mut ket);
        normalize_in_place(&mut bra);
        fix_phase(ket.as_mut_slice());
        fix_phase(bra.as_mut_slice());
        entries.push((w, ket, bra));
    }
    entries.sort_by(|a, b| frequency_order(&a.0, &b.0));

    let mut sys = BiorthogonalSystem {
        frequencies: Vec::with_capacity(n),
        kets: Vec::with_capacity(n),
        bras: Vec::with_capacity(n),
        norms: Vec::with_capacity(n),
    };
    for (w, ket, bra) in entries {
        let norm = bra.dotc(&ket);
        if norm.norm() <= 1e-10 {
            return Err(Error::OverlapVanishes {
                overlap: norm.norm(),
                threshold: 1e-10,
            });
        }
        sys.frequencies.push(w);
        sys.norms.push(norm);
        sys.kets.push(StateVector::from_normalized_unchecked(ket));
        sys.bras.push(StateVector::from_normalized_unchecked(bra));
    }
    Ok(sys)
}

fn normalize_in_place(v: &mut DVector<C64>) {
    let n = vector_norm(v.as_slice());
    v.unscale_mut(n);
}

fn frequency_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn check_gap(omegas: &[C64]) -> Result<()> {
    let mut gap = f64::INFINITY;
    for i in 0..omegas.len() {
        for j in (i + 1)..omegas.len() {
            gap = gap.min((omegas[i] - omegas[j]).norm());
        }
    }
    if gap <= DEGENERACY_TOL {
        Err(Error::DegenerateSpectrum {
            gap,
            tolerance: DEGENERACY_TOL,
        })
    } else {
        Ok(())
    }
}

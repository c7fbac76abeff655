use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use super::StateVector;
use crate::{Error, Result, C64};

/// Entry-wise tolerance of the hermiticity flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A square complex matrix acting on a finite-dimensional Hilbert space.
///
/// The hermiticity flag is computed once at construction. Arithmetic through
/// the `std::ops` traits panics on mismatched dimensions, as nalgebra does.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    /// Builds a `dim × dim` operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_matrix_unchecked(DMatrix::from_row_slice(
            dim, dim, &entries,
        )))
    }

    /// Builds an operator from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(n, rows.concat())
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        let hermitian = hermiticity_residual(&matrix) < HERMITIAN_TOL;
        Operator { matrix, hermitian }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_matrix_unchecked(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::from_matrix_unchecked(DMatrix::from_row_slice(2, 2, &[o, l, l, o]))
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self::from_matrix_unchecked(DMatrix::from_row_slice(2, 2, &[o, -i, i, o]))
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::from_matrix_unchecked(DMatrix::from_row_slice(2, 2, &[l, o, o, -l]))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &DVector<C64>, bra: &DVector<C64>) -> Self {
        Self::from_matrix_unchecked(ket * bra.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                residual: self.hermiticity_residual(),
            })
        }
    }

    pub(crate) fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix_unchecked(self.matrix.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_matrix_unchecked(&self.matrix * factor)
    }

    /// `A|ψ⟩`, left unnormalized.
    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        self.require_dim(psi.dim())?;
        Ok(&self.matrix * psi.as_vector())
    }

    /// `⟨bra|A|ket⟩`.
    pub fn sandwich(&self, bra: &StateVector, ket: &StateVector) -> Result<C64> {
        self.require_dim(bra.dim())?;
        Ok(bra.as_vector().dotc(&self.apply(ket)?))
    }

    /// `A^k`; `A^0` is the identity.
    pub fn power(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim()).matrix;
        for _ in 0..k {
            out = &out * &self.matrix;
        }
        Self::from_matrix_unchecked(out)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Self {
        Self::from_matrix_unchecked(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            fn $f(self, rhs: &Operator) -> Operator {
                Operator::from_matrix_unchecked(&self.matrix $op &rhs.matrix)
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $f(self, rhs: Operator) -> Operator {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        &self * rhs
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_matrix_unchecked(-self.matrix)
    }
}

/// Kronecker product with the first factor as the slow index.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Operator::from_matrix_unchecked(self.matrix.kronecker(&other.matrix))
    }
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        let v = self.as_vector().kronecker(other.as_vector());
        // product of unit vectors; renormalize only to absorb rounding
        StateVector::from_vector(v).expect("product of normalized states is nonzero")
    }
}

/// `a ⊗ b` for two operators or two states.
pub fn tensor_product<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::qubit;

    #[test]
    fn pauli_matrices_are_hermitian() {
        for p in [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()] {
            assert!(p.is_hermitian());
            assert!(p.power(2).max_abs_diff(&Operator::identity(2)) < 1e-15);
        }
        let nh = &Operator::pauli_x() + &Operator::pauli_z().scale(C64::new(0.0, 1.0));
        assert!(!nh.is_hermitian());
        assert!(matches!(nh.require_hermitian(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square_rows() {
        let rows = alloc::vec![
            alloc::vec![C64::new(1.0, 0.0); 3],
            alloc::vec![C64::new(1.0, 0.0); 3],
        ];
        assert_eq!(
            Operator::from_rows(&rows),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn kronecker_ordering_puts_first_factor_slow() {
        let up = qubit::up_z();
        let both = tensor_product(&up, &up);
        assert_eq!(both.dim(), 4);
        assert!((both.amplitudes()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);

        // I ⊗ σ_z = diag(1, -1, 1, -1)
        let iz = tensor_product(&Operator::identity(2), &Operator::pauli_z());
        let diag: Vec<f64> = (0..4).map(|k| iz.entry(k, k).re).collect();
        assert_eq!(diag, [1.0, -1.0, 1.0, -1.0]);
        // σ_z ⊗ I = diag(1, 1, -1, -1)
        let zi = tensor_product(&Operator::pauli_z(), &Operator::identity(2));
        let diag: Vec<f64> = (0..4).map(|k| zi.entry(k, k).re).collect();
        assert_eq!(diag, [1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn commutator_of_paulis() {
        let c = Operator::pauli_x().commutator(&Operator::pauli_y());
        let expect = Operator::pauli_z().scale(C64::new(0.0, 2.0));
        assert!(c.max_abs_diff(&expect) < 1e-15);
    }
}

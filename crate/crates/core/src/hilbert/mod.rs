//! Finite-dimensional complex linear algebra: states, operators, spins,
//! two-state vectors, weak values and eigen-decompositions.

mod eigen;
mod operator;
mod spin;
mod state;
mod weak;

pub use eigen::{
    eig_biorthogonal, eig_hermitian, BiorthogonalSystem, SpectralDecomposition, DEGENERACY_TOL,
};
pub use operator::{tensor_product, Operator, Tensor, HERMITIAN_TOL};
pub use spin::{axis_top_state, spin_operators, Spin, SpinOperators, X_AXIS, Y_AXIS, Z_AXIS};
pub use state::{qubit, StateVector};
pub use weak::{expectation, weak_moments, weak_value, TwoStateVector, OVERLAP_THRESHOLD};

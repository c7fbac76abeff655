//! Pointer-level simulation of quantum measurements that yield weak values.
//!
//! The crate models a measured system coupled to a one-dimensional von Neumann
//! pointer through `H = g(t) P A` and follows the pointer wavefunction through
//! four procedures:
//!
//! * impulsive measurement on a pre-selected ensemble ([`impulsive`]),
//! * protective (adiabatic) measurement under a nondegenerate free
//!   Hamiltonian ([`adiabatic`]),
//! * impulsive weak measurement with post-selection ([`impulsive::post_select`]),
//! * adiabatic measurement under a non-hermitian Hamiltonian, including the
//!   large-spin protection of a two-state vector ([`adiabatic::protection`]).
//!
//! Units are natural (`ħ = 1`). The crate is `no_std` and needs only `alloc`;
//! the `parallel` feature pulls in `std` and spreads ensemble draws and
//! momentum slices over a rayon pool without changing any result bit.
// guards written as `!(x > bound)` also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod adiabatic;
pub mod ensemble;
mod error;
mod fft;
pub mod hilbert;
pub mod impulsive;
mod math;
pub mod pointer;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

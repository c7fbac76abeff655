use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{Operator, StateVector};
use crate::math;
use crate::{Error, Result, C64};

/// A spin quantum number `j`, stored as the integer `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        let rounded = math::round(twice);
        if !j.is_finite() || j < 0.0 || math::abs(twice - rounded) > 1e-12 || rounded > 1e6 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Spin {
            twice: rounded as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Self {
        Spin { twice }
    }

    pub fn integer(n: u32) -> Self {
        Spin { twice: 2 * n }
    }

    pub fn j(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }
}

/// Cartesian spin components in the basis `m = j, j−1, …, −j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators {
    pub x: Operator,
    pub y: Operator,
    pub z: Operator,
}

impl SpinOperators {
    pub fn components(&self) -> [&Operator; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `n · S`.
    pub fn along(&self, axis: [f64; 3]) -> Operator {
        &(&(&self.x * axis[0]) + &(&self.y * axis[1])) + &(&self.z * axis[2])
    }
}

/// Builds `(S_x, S_y, S_z)` for spin `j` from the ladder operators.
pub fn spin_operators(spin: Spin) -> SpinOperators {
    let d = spin.dim();
    let j = spin.j();
    let m: Vec<f64> = (0..d).map(|k| j - k as f64).collect();

    // S+ |m⟩ = sqrt(j(j+1) − m(m+1)) |m+1⟩; |m+1⟩ sits one row above |m⟩
    let mut raise = DMatrix::<C64>::zeros(d, d);
    for k in 1..d {
        raise[(k - 1, k)] = C64::new(math::sqrt(j * (j + 1.0) - m[k] * (m[k] + 1.0)), 0.0);
    }
    let lower = raise.adjoint();
    let half = C64::new(0.5, 0.0);
    let x = (&raise + &lower) * half;
    let y = (&raise - &lower) * C64::new(0.0, -0.5);
    let z = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            C64::new(m[r], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SpinOperators {
        x: Operator::from_matrix_unchecked(x),
        y: Operator::from_matrix_unchecked(y),
        z: Operator::from_matrix_unchecked(z),
    }
}

/// The eigenvector of `axis · S` with the maximal eigenvalue `j`.
///
/// Built in closed form as `e^{−iφS_z} e^{−iθS_y}|j, j⟩`, with amplitude
/// `√C(2j, k) cos(θ/2)^{2j−k} sin(θ/2)^k e^{ikφ}` on `m = j − k`.
pub fn axis_top_state(axis: [f64; 3], spin: Spin) -> Result<StateVector> {
    let norm = math::sqrt(axis.iter().map(|a| a * a).sum());
    if math::abs(norm - 1.0) > 1e-12 {
        return Err(Error::InvalidAxis { norm });
    }
    let [nx, ny, nz] = axis.map(|a| a / norm);
    let c = math::sqrt(0.5 * (1.0 + nz).max(0.0));
    let s = math::sqrt(0.5 * (1.0 - nz).max(0.0));
    let rho = math::sqrt(nx * nx + ny * ny);
    let u = if rho > 0.0 { C64::new(nx / rho, ny / rho) } else { C64::new(1.0, 0.0) };
    let n = spin.twice as usize;
    // log-magnitudes keep large spins finite
    let (ln_c, ln_s) = (math::ln(c), math::ln(s));
    let mut ln_binom = 0.0;
    let mut phase = C64::new(1.0, 0.0);
    let mut amps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            ln_binom += math::ln((n - k + 1) as f64 / k as f64);
            phase *= u;
        }
        let mag = match (n - k, k) {
            (a, _) if a > 0 && c == 0.0 => 0.0,
            (_, b) if b > 0 && s == 0.0 => 0.0,
            (a, b) => {
                let a = if a == 0 { 0.0 } else { a as f64 * ln_c };
                let b = if b == 0 { 0.0 } else { b as f64 * ln_s };
                math::exp(0.5 * ln_binom + a + b)
            }
        };
        amps.push(phase * mag);
    }
    Ok(StateVector::new(amps)?.phase_fixed())
}

pub const X_AXIS: [f64; 3] = [1.0, 0.0, 0.0];
pub const Y_AXIS: [f64; 3] = [0.0, 1.0, 0.0];
pub const Z_AXIS: [f64; 3] = [0.0, 0.0, 1.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::qubit;

    #[test]
    fn spin_half_matches_pauli() {
        let s = spin_operators(Spin::HALF);
        let two = C64::new(2.0, 0.0);
        assert!(s.x.scale(two).max_abs_diff(&Operator::pauli_x()) < 1e-15);
        assert!(s.y.scale(two).max_abs_diff(&Operator::pauli_y()) < 1e-15);
        assert!(s.z.scale(two).max_abs_diff(&Operator::pauli_z()) < 1e-15);
        assert_eq!(s.z.entry(0, 0).re, 0.5);
        assert_eq!(s.z.entry(1, 1).re, -0.5);
    }

    #[test]
    fn top_state_is_eigenvector() {
        let axes = [X_AXIS, Y_AXIS, Z_AXIS, [0.0, 0.0, -1.0], [0.48, -0.6, 0.64]];
        for j in [0.5, 1.0, 3.5, 10.0, 600.0] {
            let spin = Spin::new(j).unwrap();
            let ops = spin_operators(spin);
            for axis in axes {
                let psi = axis_top_state(axis, spin).unwrap();
                let r = (ops.along(axis).apply(&psi).unwrap() - psi.as_vector() * C64::new(j, 0.0)).norm();
                assert!(r < 1e-12 * j.max(1.0), "j {j} axis {axis:?}: {r:e}");
            }
        }
    }

    #[test]
    fn rejects_non_half_integer() {
        assert_eq!(Spin::new(0.3), Err(Error::InvalidSpin(0.3)));
        assert_eq!(Spin::new(-1.0), Err(Error::InvalidSpin(-1.0)));
        assert_eq!(Spin::new(2.5).unwrap().dim(), 6);
    }

    #[test]
    fn qubit_top_states() {
        let up_x = axis_top_state(X_AXIS, Spin::HALF).unwrap();
        let up_y = axis_top_state(Y_AXIS, Spin::HALF).unwrap();
        for (a, b) in up_x.amplitudes().iter().zip(qubit::up_x().amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
        for (a, b) in up_y.amplitudes().iter().zip(qubit::up_y().amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(matches!(
            axis_top_state([1.0, 1.0, 0.0], Spin::HALF),
            Err(Error::InvalidAxis { .. })
        ));
    }
}

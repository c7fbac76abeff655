//! In-place radix-2 FFT for power-of-two lengths.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `X_j = Σ_k x_k e^{−2πi jk/M}`
    Forward,
    /// `x_k = Σ_j X_j e^{+2πi jk/M}` (unscaled)
    Inverse,
}

pub(crate) fn fft_in_place(buf: &mut [C64], dir: Direction) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n < 2 {
        return;
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let twiddles: Vec<C64> = (0..n / 2)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            C64::new(math::cos(a), sign * math::sin(a))
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let u = buf[start + k];
                let v = buf[start + k + half] * w;
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[C64], sign: f64) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (k, &v)| {
                    let a = sign * 2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * C64::new(a.cos(), a.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let x: Vec<C64> = (0..64)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
            let mut y = x.clone();
            fft_in_place(&mut y, dir);
            let z = naive(&x, sign);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn round_trip_scales_by_length() {
        let x: Vec<C64> = (0..128).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let mut y = x.clone();
        fft_in_place(&mut y, Direction::Forward);
        fft_in_place(&mut y, Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 128.0 - b).norm() < 1e-12);
        }
    }
}

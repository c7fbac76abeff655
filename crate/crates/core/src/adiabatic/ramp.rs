use core::f64::consts::PI;

use crate::math;
use crate::{Error, Result};

pub const DEFAULT_RAMP_FRACTION: f64 = 0.1;

/// Coupling profile `g(t)` on `[0, T]`: raised-cosine ramps of length `rT`
/// at both ends around a flat plateau, with `∫g dt = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProfile {
    total_time: f64,
    ramp_fraction: f64,
}

impl RampProfile {
    pub fn new(total_time: f64, ramp_fraction: f64) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::invalid("T", "must be positive and finite"));
        }
        if !(ramp_fraction > 0.0 && ramp_fraction < 0.4) {
            return Err(Error::invalid("ramp_fraction", "must lie in (0, 0.4)"));
        }
        Ok(RampProfile {
            total_time,
            ramp_fraction,
        })
    }

    pub fn with_default_ramp(total_time: f64) -> Result<Self> {
        Self::new(total_time, DEFAULT_RAMP_FRACTION)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn ramp_fraction(&self) -> f64 {
        self.ramp_fraction
    }

    pub fn ramp_duration(&self) -> f64 {
        self.ramp_fraction * self.total_time
    }

    pub fn plateau_duration(&self) -> f64 {
        self.total_time - 2.0 * self.ramp_duration()
    }

    /// `1 / (T(1 − r))`.
    pub fn plateau_value(&self) -> f64 {
        1.0 / (self.total_time * (1.0 - self.ramp_fraction))
    }

    pub fn value(&self, t: f64) -> f64 {
        let g = self.plateau_value();
        let tr = self.ramp_duration();
        if !(0.0..=self.total_time).contains(&t) {
            0.0
        } else if t < tr {
            0.5 * g * (1.0 - math::cos(PI * t / tr))
        } else if t > self.total_time - tr {
            0.5 * g * (1.0 + math::cos(PI * (t - (self.total_time - tr)) / tr))
        } else {
            g
        }
    }

    /// `∫₀ᵗ g`, in closed form.
    pub fn integral_to(&self, t: f64) -> f64 {
        let g = self.plateau_value();
        let tr = self.ramp_duration();
        let t = t.clamp(0.0, self.total_time);
        let rise = |s: f64| 0.5 * g * (s - tr / PI * math::sin(PI * s / tr));
        if t <= tr {
            rise(t)
        } else if t <= self.total_time - tr {
            rise(tr) + g * (t - tr)
        } else {
            let s = t - (self.total_time - tr);
            rise(tr) + g * self.plateau_duration() + 0.5 * g * (s + tr / PI * math::sin(PI * s / tr))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_to_one() {
        for (t, r) in [(1.0, 0.1), (40.0, 0.25), (200.0, 0.39)] {
            let ramp = RampProfile::new(t, r).unwrap();
            assert!((ramp.integral_to(t) - 1.0).abs() < 1e-12);
            // composite Simpson as an independent check
            let n = 20_000;
            let h = t / n as f64;
            let s: f64 = (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    w * ramp.value(k as f64 * h)
                })
                .sum::<f64>()
                * h
                / 3.0;
            assert!((s - 1.0).abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn continuous_and_non_negative() {
        let ramp = RampProfile::new(10.0, 0.1).unwrap();
        assert_eq!(ramp.value(0.0), 0.0);
        assert!(ramp.value(10.0).abs() < 1e-17);
        assert!((ramp.value(1.0) - ramp.plateau_value()).abs() < 1e-15);
        assert!((ramp.value(9.0) - ramp.plateau_value()).abs() < 1e-15);
        for k in 0..=1000 {
            assert!(ramp.value(k as f64 * 0.01) >= 0.0);
        }
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(RampProfile::new(1.0, 0.0).is_err());
        assert!(RampProfile::new(1.0, 0.4).is_err());
        assert!(RampProfile::new(-1.0, 0.1).is_err());
    }
}

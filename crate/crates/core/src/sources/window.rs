//! Smooth compactly supported windows and time profiles.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// `exp(1 - 1 / (1 - x^2))` on `(-1, 1)`, zero outside; equals 1 at 0 and is
/// flat to all orders at `±1`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Bump supported on `[a, b]`.
pub fn bump_on(t: f64, a: f64, b: f64) -> f64 {
    bump((2.0 * t - a - b) / (b - a))
}

/// Smooth step: 0 for `x <= 0`, 1 for `x >= 1`, flat at both ends.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let f = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
        f(x) / (f(x) + f(1.0 - x))
    }
}

/// Plateau window on `[a, b]`: rises over `ramp` at each end, 1 in between.
pub fn plateau(t: f64, a: f64, b: f64, ramp: f64) -> f64 {
    smooth_step((t - a) / ramp) * smooth_step((b - t) / ramp)
}

/// Scalar time profiles `w(t)` supported inside `(0, M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeProfile {
    /// `sin(2 pi f0 (t - start))` under a bump spanning `cycles / f0`.
    WindowedSine { f0: f64, cycles: f64, start: f64 },
    /// Bump on `[start, start + length]`.
    Bump { start: f64, length: f64 },
    /// Flat top on `[start, start + length]` with smooth ramps of width `ramp`.
    Plateau { start: f64, length: f64, ramp: f64 },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::WindowedSine { f0, cycles, start } => {
                let len = cycles / f0;
                bump_on(t, start, start + len) * (TAU * f0 * (t - start)).sin()
            }
            TimeProfile::Bump { start, length } => bump_on(t, start, start + length),
            TimeProfile::Plateau { start, length, ramp } => plateau(t, start, start + length, ramp),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            TimeProfile::WindowedSine { f0, cycles, start } => (start, start + cycles / f0),
            TimeProfile::Bump { start, length } | TimeProfile::Plateau { start, length, .. } => (start, start + length),
        }
    }

    /// Dominant angular frequency.
    pub fn dominant_tau(&self) -> f64 {
        match *self {
            TimeProfile::WindowedSine { f0, .. } => TAU * f0,
            TimeProfile::Bump { length, .. } => 2.0 * PI / length,
            TimeProfile::Plateau { ramp, .. } => 2.0 * PI / ramp,
        }
    }
}

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Mul, MulAssign};

/// A complex amplitude stored as natural-log magnitude plus phase.
///
/// The null weight (exact zero) has `log_magnitude == -inf` and absorbs
/// under multiplication. Phases are kept in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogWeight {
    log_magnitude: f64,
    phase: f64,
}

fn normalize_phase(phase: f64) -> f64 {
    let mut p = phase % TAU;
    if p > PI {
        p -= TAU;
    } else if p <= -PI {
        p += TAU;
    }
    p
}

impl LogWeight {
    pub const NULL: LogWeight = LogWeight {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub const ONE: LogWeight = LogWeight {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::NULL;
        }
        LogWeight {
            log_magnitude,
            phase: normalize_phase(phase),
        }
    }

    /// `i^k`, with the phase taken from `k mod 4` so no rounding accumulates.
    pub fn i_power(k: i64) -> Self {
        let phase = match k.rem_euclid(4) {
            0 => 0.0,
            1 => FRAC_PI_2,
            2 => PI,
            _ => -FRAC_PI_2,
        };
        LogWeight {
            log_magnitude: 0.0,
            phase,
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::NULL
        } else if x > 0.0 {
            LogWeight::new(x.ln(), 0.0)
        } else {
            LogWeight::new((-x).ln(), PI)
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::NULL
        } else {
            LogWeight::new(z.norm().ln(), z.arg())
        }
    }

    pub fn log_magnitude(self) -> f64 {
        self.log_magnitude
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn is_null(self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn magnitude(self) -> f64 {
        self.log_magnitude.exp()
    }

    /// `|amplitude|^2`.
    pub fn probability(self) -> f64 {
        (2.0 * self.log_magnitude).exp()
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_null() {
            Complex64::new(0.0, 0.0)
        } else {
            let r = self.log_magnitude.exp();
            // quarter turns come out exact
            match self.phase {
                p if p == 0.0 => Complex64::new(r, 0.0),
                p if p == FRAC_PI_2 => Complex64::new(0.0, r),
                p if p == PI => Complex64::new(-r, 0.0),
                p if p == -FRAC_PI_2 => Complex64::new(0.0, -r),
                p => Complex64::from_polar(r, p),
            }
        }
    }

    pub fn conj(self) -> Self {
        if self.is_null() {
            self
        } else {
            LogWeight::new(self.log_magnitude, -self.phase)
        }
    }

    /// Multiply the magnitude by `exp(delta)`.
    pub fn scale_log(self, delta: f64) -> Self {
        if self.is_null() {
            self
        } else {
            LogWeight::new(self.log_magnitude + delta, self.phase)
        }
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.is_null() || rhs.is_null() {
            return LogWeight::NULL;
        }
        LogWeight::new(
            self.log_magnitude + rhs.log_magnitude,
            self.phase + rhs.phase,
        )
    }
}

impl MulAssign for LogWeight {
    fn mul_assign(&mut self, rhs: LogWeight) {
        *self = *self * rhs;
    }
}

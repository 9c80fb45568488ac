//! Complex multiplicative arithmetic in logarithmic coordinates.
//!
//! A nonzero complex number `y` is held as `(ln|y|, arg y)` with the phase
//! kept unwrapped, so products become additions and powers become scalings.
//! Values are only turned back into ordinary complex numbers at I/O
//! boundaries.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex value of a real variable.
pub type ComplexNum = Complex64;

/// A nonzero complex number stored as log-magnitude and unwrapped phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    log_mag: f64,
    arg: f64,
}

impl LogValue {
    /// The multiplicative identity.
    pub const ONE: LogValue = LogValue { log_mag: 0.0, arg: 0.0 };

    pub fn new(log_mag: f64, arg: f64) -> Result<Self> {
        if !log_mag.is_finite() || !arg.is_finite() {
            return Err(Error::domain(format!(
                "non-finite log coordinates ({log_mag}, {arg})"
            )));
        }
        Ok(LogValue { log_mag, arg })
    }

    /// Builds the value `exp(w)` directly from its logarithm `w`, keeping
    /// `Im w` as the (unreduced) phase.
    pub fn from_ln(w: ComplexNum) -> Result<Self> {
        LogValue::new(w.re, w.im)
    }

    /// Positive real number `v`.
    pub fn from_positive(v: f64) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{v} is not a positive finite real")));
        }
        LogValue::new(v.ln(), 0.0)
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    /// `|y|`
    pub fn modulus(&self) -> f64 {
        self.log_mag.exp()
    }

    /// The tracked logarithm `ln|y| + i arg`.
    pub fn ln(&self) -> ComplexNum {
        ComplexNum::new(self.log_mag, self.arg)
    }

    pub fn to_complex(&self) -> ComplexNum {
        ComplexNum::from_polar(self.log_mag.exp(), self.arg)
    }

    pub fn is_finite(&self) -> bool {
        self.log_mag.is_finite() && self.arg.is_finite()
    }

    pub fn powf(self, h: f64) -> LogValue {
        mpow(self, h)
    }

    pub fn recip(self) -> LogValue {
        LogValue {
            log_mag: -self.log_mag,
            arg: -self.arg,
        }
    }
}

/// Lifts a nonzero complex number into log coordinates.
///
/// The phase is the branch of `arg z` closest to `hint.arg`; without a hint
/// the principal branch `(-pi, pi]` is used. Exact ties keep the branch
/// nearest the principal one.
pub fn from_complex(z: ComplexNum, hint: Option<&LogValue>) -> Result<LogValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("non-finite value {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::domain("multiplicative representation undefined at 0+0i"));
    }
    let mut arg = z.im.atan2(z.re);
    if let Some(hint) = hint {
        let turns = (hint.arg - arg) / (2.0 * PI);
        let k = if (turns.abs().fract() - 0.5).abs() == 0.0 {
            turns.trunc()
        } else {
            turns.round()
        };
        arg += 2.0 * PI * k;
    }
    LogValue::new(z.re.hypot(z.im).ln(), arg)
}

/// `y^h` under the tracked branch.
pub fn mpow(y: LogValue, h: f64) -> LogValue {
    LogValue {
        log_mag: h * y.log_mag,
        arg: h * y.arg,
    }
}

/// `a * b`; phases add without reduction.
pub fn mmul(a: LogValue, b: LogValue) -> LogValue {
    LogValue {
        log_mag: a.log_mag + b.log_mag,
        arg: a.arg + b.arg,
    }
}

/// `g / y` evaluated as `g * exp(-ln y)` so tiny or huge `|y|` does not
/// round through zero or infinity first.
pub(crate) fn ratio_to_state(g: ComplexNum, y: &LogValue) -> ComplexNum {
    g * (-y.ln()).exp()
}

/// Multiplicative right-hand side `exp(g(x, y) / y)` of an ordinary one.
pub fn ordinary_to_mult_rhs<G>(g: G, x: f64, y: LogValue) -> Result<LogValue>
where
    G: Fn(f64, ComplexNum) -> Result<ComplexNum>,
{
    let gv = g(x, y.to_complex())?;
    if !gv.re.is_finite() || !gv.im.is_finite() {
        return Err(Error::Domain {
            x: Some(x),
            msg: format!("ordinary right-hand side is non-finite ({gv})"),
        });
    }
    LogValue::from_ln(ratio_to_state(gv, &y)).map_err(|e| e.at(x))
}

/// Ordinary state `(y, y')` from a value and its multiplicative derivative,
/// using `y' = y ln y*`.
pub fn mult_to_ordinary_state(y: LogValue, ystar: LogValue) -> (ComplexNum, ComplexNum) {
    let yc = y.to_complex();
    (yc, yc * ystar.ln())
}

/// Multiplicative difference quotient `(f(x+h) / f(x))^(1/h)`.
pub fn numeric_star_derivative<F>(f: F, x: f64, h: f64) -> Result<LogValue>
where
    F: Fn(f64) -> ComplexNum,
{
    if h == 0.0 {
        return Err(Error::domain("zero step in difference quotient"));
    }
    let base = from_complex(f(x), None)?;
    let ahead = from_complex(f(x + h), Some(&base))?;
    Ok(mpow(ahead / base, 1.0 / h))
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, other: LogValue) -> LogValue {
        mmul(self, other)
    }
}

impl std::ops::Div for LogValue {
    type Output = LogValue;

    fn div(self, other: LogValue) -> LogValue {
        LogValue {
            log_mag: self.log_mag - other.log_mag,
            arg: self.arg - other.arg,
        }
    }
}

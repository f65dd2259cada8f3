//! Overflow-safe determinant values.
//!
//! A [`ScaledDet`] stores `mantissa * 10^exponent` with `1 <= |mantissa| < 10`
//! (or an exact zero), so products of many large or tiny factors never leave
//! the range of `f64`.

use std::fmt;
use std::ops::{Div, Mul, MulAssign, Neg};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::BlockDetError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDet {
    mantissa: Complex64,
    exponent: i64,
}

/// Multiplies `z` by `10^k` without overflowing the intermediate power.
fn scale_pow10(mut z: Complex64, mut k: i64) -> Complex64 {
    while k > 300 {
        z *= 1e300;
        k -= 300;
    }
    while k < -300 {
        z *= 1e-300;
        k += 300;
    }
    z * 10f64.powi(k as i32)
}

impl ScaledDet {
    pub const ZERO: ScaledDet = ScaledDet {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };
    pub const ONE: ScaledDet = ScaledDet {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0,
    };

    /// Builds `value * 10^exponent` and normalizes the mantissa.
    ///
    /// Panics if `value` is not finite.
    pub fn new(value: Complex64, exponent: i64) -> Self {
        assert!(
            value.re.is_finite() && value.im.is_finite(),
            "ScaledDet mantissa must be finite, got {value}"
        );
        if value.re == 0.0 && value.im == 0.0 {
            return Self::ZERO;
        }
        let mut z = value;
        let mut e = exponent;
        let mut r = z.norm();
        if !r.is_finite() {
            z *= 1e-300;
            e += 300;
            r = z.norm();
        }
        let shift = r.log10().floor() as i64;
        z = scale_pow10(z, -shift);
        e += shift;
        // log10/floor can be off by one ulp near powers of ten
        let r = z.norm();
        if r >= 10.0 {
            z /= 10.0;
            e += 1;
        } else if r < 1.0 {
            z *= 10.0;
            e -= 1;
        }
        Self {
            mantissa: z,
            exponent: e,
        }
    }

    pub fn from_complex(value: Complex64) -> Self {
        Self::new(value, 0)
    }

    pub fn from_real(value: f64) -> Self {
        Self::new(Complex64::new(value, 0.0), 0)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// The plain complex value. Overflows to infinity or underflows to zero
    /// when the exponent is outside the `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        scale_pow10(self.mantissa, self.exponent)
    }

    /// `log10 |value|`, `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().log10() + self.exponent as f64
        }
    }

    pub fn abs(&self) -> ScaledDet {
        ScaledDet {
            mantissa: Complex64::new(self.mantissa.norm(), 0.0),
            exponent: self.exponent,
        }
        .renormalized()
    }

    fn renormalized(self) -> Self {
        Self::new(self.mantissa, self.exponent)
    }

    pub fn powi(&self, power: u32) -> ScaledDet {
        let mut acc = ScaledDet::ONE;
        let mut base = *self;
        let mut p = power;
        while p > 0 {
            if p & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            p >>= 1;
        }
        acc
    }

    /// `|a - b| / max(|a|, |b|)`, zero when both are zero.
    pub fn relative_difference(&self, other: &ScaledDet) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return 1.0,
            _ => {}
        }
        let e = self.exponent.max(other.exponent);
        let a = scale_pow10(self.mantissa, self.exponent - e);
        let b = scale_pow10(other.mantissa, other.exponent - e);
        (a - b).norm() / a.norm().max(b.norm())
    }
}

impl Default for ScaledDet {
    fn default() -> Self {
        Self::ONE
    }
}

impl From<Complex64> for ScaledDet {
    fn from(value: Complex64) -> Self {
        Self::from_complex(value)
    }
}

impl Mul for ScaledDet {
    type Output = ScaledDet;

    fn mul(self, rhs: ScaledDet) -> ScaledDet {
        if self.is_zero() || rhs.is_zero() {
            return ScaledDet::ZERO;
        }
        ScaledDet::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul<Complex64> for ScaledDet {
    type Output = ScaledDet;

    fn mul(self, rhs: Complex64) -> ScaledDet {
        self * ScaledDet::from_complex(rhs)
    }
}

impl MulAssign for ScaledDet {
    fn mul_assign(&mut self, rhs: ScaledDet) {
        *self = *self * rhs;
    }
}

impl Div for ScaledDet {
    type Output = ScaledDet;

    /// Panics on division by an exact zero.
    fn div(self, rhs: ScaledDet) -> ScaledDet {
        assert!(!rhs.is_zero(), "division of ScaledDet by zero");
        if self.is_zero() {
            return ScaledDet::ZERO;
        }
        ScaledDet::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Neg for ScaledDet {
    type Output = ScaledDet;

    fn neg(self) -> ScaledDet {
        ScaledDet {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl std::iter::Product for ScaledDet {
    fn product<I: Iterator<Item = ScaledDet>>(iter: I) -> Self {
        iter.fold(ScaledDet::ONE, |acc, x| acc * x)
    }
}

const ZERO_FIELD: &str = "0.000000000000";

fn fixed12(x: f64) -> String {
    let s = format!("{:.12}", x.abs());
    if x < 0.0 && s != ZERO_FIELD {
        format!("-{s}")
    } else {
        s
    }
}

/// Fixed text form `m.mmmmmmmmmmmm±i.iiiiiiiiiiiiE±xxx`: real and imaginary
/// mantissa parts to 12 decimals sharing one decimal exponent.
impl fmt::Display for ScaledDet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = self.mantissa;
        let mut e = self.exponent;
        // rounding 9.9999999999996 to 12 decimals would print "10.000..."
        if m.re.abs() >= 9.999_999_999_999_5 || m.im.abs() >= 9.999_999_999_999_5 {
            m /= 10.0;
            e += 1;
        }
        let re = fixed12(m.re);
        let im = fixed12(m.im);
        let (sign, im) = match im.strip_prefix('-') {
            Some(rest) => ('-', rest.to_string()),
            None => ('+', im),
        };
        write!(f, "{re}{sign}{im}E{e:+04}")
    }
}

impl FromStr for ScaledDet {
    type Err = BlockDetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BlockDetError::Parse(format!("malformed determinant value '{s}'"));
        let s = s.trim();
        let (mantissa, exponent) = s.split_once(['E', 'e']).ok_or_else(bad)?;
        let exponent: i64 = exponent.parse().map_err(|_| bad())?;
        let split = mantissa
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let re: f64 = mantissa[..split].parse().map_err(|_| bad())?;
        let im: f64 = mantissa[split..].parse().map_err(|_| bad())?;
        if !re.is_finite() || !im.is_finite() {
            return Err(bad());
        }
        Ok(ScaledDet::new(Complex64::new(re, im), exponent))
    }
}

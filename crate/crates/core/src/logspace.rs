//! Nonnegative reals carried as natural logarithms.
//!
//! Bound formulas routinely involve `r^(k-1)` or `r^(-(t+1)(k-1))` far outside
//! the binary64 range, so every bound is evaluated and compared in log-space.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A nonnegative real `x` stored as `ln x`; zero is `ln = -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { ln: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "NaN log value");
        LogValue { ln }
    }

    /// From a linear value; `None` for negative or NaN input.
    pub fn try_from_value(x: f64) -> Option<Self> {
        (x >= 0.0).then(|| LogValue { ln: x.ln() })
    }

    /// From a linear value. Panics on negative or NaN input.
    pub fn from_value(x: f64) -> Self {
        Self::try_from_value(x).unwrap_or_else(|| panic!("LogValue of negative or NaN {x}"))
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Linear value; underflows to 0 and overflows to +inf.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    /// Linear value when it is a finite, nonzero-unless-exact binary64.
    pub fn representable(self) -> Option<f64> {
        let v = self.value();
        (v.is_finite() && (v > 0.0 || self.is_zero())).then_some(v)
    }

    /// 0 for zero, 1 otherwise.
    pub fn sign(self) -> i8 {
        if self.is_zero() {
            0
        } else {
            1
        }
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.ln.is_finite() || self.is_zero()
    }

    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            return match e.partial_cmp(&0.0) {
                Some(Ordering::Greater) => Self::ZERO,
                Some(Ordering::Equal) => Self::ONE,
                _ => LogValue { ln: f64::INFINITY },
            };
        }
        LogValue { ln: self.ln * e }
    }

    /// `max(self - other, 0)`.
    pub fn saturating_sub(self, other: Self) -> Self {
        if other.is_zero() {
            return self;
        }
        if other.ln >= self.ln {
            return Self::ZERO;
        }
        let d = other.ln - self.ln; // < 0
        // ln(1 - e^d), stable on both sides of d = -ln 2
        let tail = if d < -std::f64::consts::LN_2 { (-d.exp()).ln_1p() } else { (-d.exp_m1()).ln() };
        LogValue { ln: self.ln + tail }
    }

    pub fn max(self, other: Self) -> Self {
        if self.ln >= other.ln {
            self
        } else {
            other
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;

    /// Log-sum-exp of two terms.
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.ln >= rhs.ln { (self.ln, rhs.ln) } else { (rhs.ln, self.ln) };
        if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
            return LogValue { ln: hi };
        }
        LogValue { ln: hi + (lo - hi).exp().ln_1p() }
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogValue { ln: self.ln + rhs.ln }
    }
}

impl Div for LogValue {
    type Output = LogValue;

    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogValue { ln: self.ln - rhs.ln }
    }
}

impl Sum for LogValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        // collect so the sum is anchored at the largest term
        let terms: Vec<f64> = iter.map(|v| v.ln).collect();
        let hi = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !hi.is_finite() {
            return LogValue { ln: hi };
        }
        let s: f64 = terms.iter().map(|&l| (l - hi).exp()).sum();
        LogValue { ln: hi + s.ln() }
    }
}

impl Product for LogValue {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogValue(ln={})", self.ln)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.representable() {
            Some(v) => write!(f, "{v:e} (ln {:.12})", self.ln),
            None => write!(f, "exp({:.12})", self.ln),
        }
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("LogValue", 3)?;
        s.serialize_field("ln", &self.ln.is_finite().then_some(self.ln))?;
        s.serialize_field("sign", &self.sign())?;
        s.serialize_field("value", &self.representable())?;
        s.end()
    }
}

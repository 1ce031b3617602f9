//! Signed log-domain scalars.
//!
//! Hafnian evaluation multiplies factorials against powers of covariance
//! entries; the factors overflow `f64` long before their product does.
//! A `SignedLog` carries `sign * exp(ln_abs)` without ever forming the
//! product in linear space.

/// A real number stored as a sign and the natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// `sign * exp(ln_abs)` with an explicit ln magnitude.
    pub fn new(sign: f64, ln_abs: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln_abs,
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn scale_f64(self, x: f64) -> SignedLog {
        self.mul(SignedLog::from_f64(x))
    }

    pub fn square(self) -> SignedLog {
        SignedLog::new(if self.is_zero() { 0.0 } else { 1.0 }, 2.0 * self.ln_abs)
    }

    /// Converts back to linear space; infinite when the magnitude exceeds
    /// the `f64` range (callers decide whether that is an error).
    pub fn to_f64(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Streaming signed log-sum-exp accumulator.
///
/// Terms are accumulated relative to the largest magnitude seen so far, so
/// a sum whose value fits in `f64` is recovered accurately even when single
/// terms would overflow.
#[derive(Debug, Clone)]
pub struct LogSumAcc {
    max_ln: f64,
    scaled: f64,
}

impl LogSumAcc {
    pub fn new() -> Self {
        LogSumAcc {
            max_ln: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, term: SignedLog) {
        if term.is_zero() {
            return;
        }
        if term.ln_abs > self.max_ln {
            // rescale the running sum to the new pivot
            if self.max_ln > f64::NEG_INFINITY {
                self.scaled *= (self.max_ln - term.ln_abs).exp();
            }
            self.max_ln = term.ln_abs;
            self.scaled += term.sign;
        } else {
            self.scaled += term.sign * (term.ln_abs - self.max_ln).exp();
        }
    }

    pub fn add_f64(&mut self, x: f64) {
        self.add(SignedLog::from_f64(x));
    }

    pub fn total(&self) -> SignedLog {
        if self.scaled == 0.0 || self.max_ln == f64::NEG_INFINITY {
            SignedLog::ZERO
        } else {
            SignedLog::new(self.scaled.signum(), self.max_ln + self.scaled.abs().ln())
        }
    }
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

/// ln(n!) exactly summed for small n, Stirling series beyond the table.
pub fn ln_factorial(n: u64) -> f64 {
    const TABLE_MAX: u64 = 1024;
    if n <= TABLE_MAX {
        use std::sync::OnceLock;
        static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            let mut t = Vec::with_capacity(TABLE_MAX as usize + 1);
            t.push(0.0);
            let mut acc = 0.0;
            for i in 1..=TABLE_MAX {
                acc += (i as f64).ln();
                t.push(acc);
            }
            t
        });
        table[n as usize]
    } else {
        // Stirling with the first two correction terms; relative error
        // below 1e-15 for n > 1024.
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

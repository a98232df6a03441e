//! Natural-log magnitudes and log binomial coefficients.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::fmt;

/// A positive magnitude stored as its natural logarithm.
///
/// Serializes as `{"ln": .., "value": ..}`; `value` is informational (and
/// `null` once it overflows) and ignored when reading.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "LogRepr", from = "LogRepr")]
pub struct LogScale(pub f64);

#[derive(Serialize, Deserialize)]
struct LogRepr {
    ln: f64,
    #[serde(default, skip_deserializing)]
    value: f64,
}

impl From<LogScale> for LogRepr {
    fn from(x: LogScale) -> Self {
        LogRepr {
            ln: x.0,
            value: x.value(),
        }
    }
}

impl From<LogRepr> for LogScale {
    fn from(r: LogRepr) -> Self {
        LogScale(r.ln)
    }
}

impl LogScale {
    pub fn from_value(x: f64) -> Self {
        LogScale(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    pub fn scale(self, factor: f64) -> Self {
        LogScale(self.0 + factor.ln())
    }

    pub fn powi(self, e: i32) -> Self {
        LogScale(self.0 * e as f64)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for LogScale {
    type Output = LogScale;

    fn mul(self, other: LogScale) -> LogScale {
        LogScale(self.0 + other.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Div for LogScale {
    type Output = LogScale;

    fn div(self, other: LogScale) -> LogScale {
        LogScale(self.0 - other.0)
    }
}

impl fmt::Display for LogScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        if v.is_finite() && v.abs() < 1e12 && v.abs() > 1e-6 {
            write!(f, "{v}")
        } else {
            write!(f, "exp({})", self.0)
        }
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Log-space slack of `C(N, m - x) <= (2m/N)^x C(N, m)` with `N = n^2`;
/// non-negative exactly when the bound holds.
pub fn binomial_shift_slack(n: u64, m: u64, x: u64) -> f64 {
    let total = n * n;
    let rhs = x as f64 * (2.0 * m as f64 / total as f64).ln() + ln_binomial(total, m);
    let lhs = ln_binomial(total, m - x.min(m));
    rhs - lhs
}

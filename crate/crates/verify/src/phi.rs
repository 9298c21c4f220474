//! Growth schedules `φ` for the weighted maximal statistic.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, HarnessError, HarnessResult};

/// A non-decreasing weight `φ(n) >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSchedule {
    /// `(1 + ln n)^β`.
    LogPower(f64),
    /// `max(1, ln^{1+α} n / (1 + ln(1 + ln n)))`.
    LogOverLogLog,
    /// `φ(n) = table[n - 1]`, the last entry held for larger `n`.
    Table(Vec<f64>),
}

impl PhiSchedule {
    /// The two schedules used when none is requested.
    pub fn defaults() -> Vec<PhiSchedule> {
        vec![PhiSchedule::LogPower(1.0), PhiSchedule::LogOverLogLog]
    }

    pub fn eval(&self, alpha: f64, n: usize) -> f64 {
        let ln = (n.max(1) as f64).ln();
        match self {
            PhiSchedule::LogPower(beta) => (1.0 + ln).powf(*beta),
            PhiSchedule::LogOverLogLog => (ln.powf(1.0 + alpha) / (1.0 + ln.ln_1p())).max(1.0),
            PhiSchedule::Table(t) => t[(n.max(1) - 1).min(t.len() - 1)],
        }
    }

    /// Checks the schedule against `α`: `β` in `(0, 1+α)` for log-power, and
    /// tables must be non-decreasing with entries `>= 1`.
    pub fn validate(&self, alpha: f64) -> HarnessResult<()> {
        match self {
            PhiSchedule::LogPower(beta) => {
                if !(*beta > 0.0 && *beta < 1.0 + alpha) {
                    return Err(invalid(format!("log-power exponent {beta} outside (0, {})", 1.0 + alpha)));
                }
            }
            PhiSchedule::LogOverLogLog => {}
            PhiSchedule::Table(t) => {
                if t.is_empty() || t.iter().any(|v| *v < 1.0 || !v.is_finite()) {
                    return Err(invalid("phi table entries must be finite and at least 1"));
                }
                if t.windows(2).any(|w| w[1] < w[0]) {
                    return Err(invalid("phi table must be non-decreasing"));
                }
            }
        }
        Ok(())
    }

    /// `ln^{1+α} n / φ(n)` at each probe; increasing along the probes is the
    /// finite-range trace of `limsup = ∞`.
    pub fn growth_ratios(&self, alpha: f64, probes: &[usize]) -> Vec<f64> {
        probes
            .iter()
            .map(|&n| (n as f64).ln().powf(1.0 + alpha) / self.eval(alpha, n))
            .collect()
    }
}

impl fmt::Display for PhiSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSchedule::LogPower(beta) => write!(f, "log-power:{beta}"),
            PhiSchedule::LogOverLogLog => f.write_str("log-over-loglog"),
            PhiSchedule::Table(t) => {
                let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                write!(f, "table:{}", parts.join(";"))
            }
        }
    }
}

/// Accepts `log-power:<β>`, `log-over-loglog` and `table:<v1>;<v2>;...`.
impl FromStr for PhiSchedule {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number {t:?} in phi spec {s:?}")))
        };
        match (head, tail) {
            ("log-power", Some(t)) => Ok(PhiSchedule::LogPower(number(t)?)),
            ("log-over-loglog", None) => Ok(PhiSchedule::LogOverLogLog),
            ("table", Some(t)) => Ok(PhiSchedule::Table(
                t.split(';').map(number).collect::<HarnessResult<_>>()?,
            )),
            _ => Err(invalid(format!("unknown phi spec {s:?}"))),
        }
    }
}

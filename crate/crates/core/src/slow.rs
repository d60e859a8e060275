//! Slowly varying factors `t -> log2(t + 2)^e`.

use serde::{Deserialize, Serialize};

/// A slowly varying factor such as `tau`, `rho_u` or `rho_w`.
///
/// The log-power form is shifted by two so it is positive and finite for every
/// `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "exponent")]
pub enum SlowFactor {
    #[default]
    Const,
    LogPower(f64),
}

impl SlowFactor {
    pub fn log_power(exponent: f64) -> Self {
        if exponent == 0.0 {
            SlowFactor::Const
        } else {
            SlowFactor::LogPower(exponent)
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            SlowFactor::Const => 0.0,
            SlowFactor::LogPower(e) => *e,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SlowFactor::Const => 1.0,
            SlowFactor::LogPower(e) => (t + 2.0).log2().powf(*e),
        }
    }

    /// `self^power`, still a log-power.
    pub fn pow(&self, power: f64) -> SlowFactor {
        SlowFactor::log_power(self.exponent() * power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_is_one() {
        assert_eq!(SlowFactor::Const.eval(123.0), 1.0);
        assert_eq!(SlowFactor::log_power(0.0), SlowFactor::Const);
    }

    #[test]
    fn log_power_shift() {
        // log2(6 + 2) = 3
        assert!((SlowFactor::LogPower(2.0).eval(6.0) - 9.0).abs() < 1e-12);
        assert!((SlowFactor::LogPower(1.0).pow(-2.0).eval(6.0) - 1.0 / 9.0).abs() < 1e-12);
    }
}

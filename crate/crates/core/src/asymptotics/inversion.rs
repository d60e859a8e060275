use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slow::SlowFactor;

/// Growth function `F(y) = y^gamma (log y)^alpha rho(log y)` for `y >= 2`,
/// with base-2 logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFunction {
    pub gamma: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub rho: SlowFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthInverse {
    pub y: f64,
    pub relative_residual: f64,
    /// `x^(1/gamma) (log x)^(-alpha/gamma) rho(log x)^(-1/gamma)`.
    pub asymptotic: f64,
    /// `y / asymptotic`.
    pub ratio: f64,
}

const INVERSION_TOLERANCE: f64 = 1e-10;
const SCAN_MAX_LOG: f64 = 4096.0;

impl GrowthFunction {
    pub fn new(gamma: f64, alpha: f64, rho: SlowFactor) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !alpha.is_finite() {
            return Err(Error::Domain(format!("growth exponents gamma = {gamma}, alpha = {alpha}")));
        }
        Ok(GrowthFunction { gamma, alpha, rho })
    }

    /// `ln F` as a function of `L = log2 y`.
    fn ln_at_log(&self, l: f64) -> f64 {
        self.gamma * l * std::f64::consts::LN_2 + self.alpha * l.ln() + self.rho.eval(l).ln()
    }

    /// `d ln F / dL`.
    fn slope_at_log(&self, l: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let nested = match self.rho {
            SlowFactor::Const => 0.0,
            SlowFactor::LogPower(e) => e / ((l + 2.0) * (l + 2.0).log2() * ln2),
        };
        self.gamma * ln2 + self.alpha / l + nested
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.ln_at_log(y.log2()).exp()
    }

    /// `log2 y0` beyond which `F` is increasing, found on a geometric scan.
    fn monotone_from(&self) -> f64 {
        let mut last_bad = 1.0f64;
        let mut l = 1.0f64;
        while l <= SCAN_MAX_LOG {
            if self.slope_at_log(l) <= 0.0 {
                last_bad = l;
            }
            l *= 1.01;
        }
        last_bad * 1.01
    }

    /// Smallest value the inverse is defined for.
    pub fn threshold(&self) -> f64 {
        self.ln_at_log(self.monotone_from()).exp()
    }

    /// The `y >= y0` with `F(y) = x`, by bisection on `log2 y` followed by
    /// Newton steps.
    pub fn invert(&self, x: f64) -> Result<GrowthInverse> {
        let l0 = self.monotone_from();
        let target = x.ln();
        if !(x.is_finite() && target >= self.ln_at_log(l0)) {
            return Err(Error::BelowThreshold {
                x,
                x0: self.ln_at_log(l0).exp(),
            });
        }
        let mut lo = l0;
        let mut hi = l0.max(1.0) * 2.0;
        while self.ln_at_log(hi) < target {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Domain(format!("no preimage for {x}")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ln_at_log(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-6 * hi {
                break;
            }
        }
        let mut l = 0.5 * (lo + hi);
        for _ in 0..50 {
            let r = self.ln_at_log(l) - target;
            if r.abs() <= 1e-15 * target.abs().max(1.0) {
                break;
            }
            let step = r / self.slope_at_log(l);
            let next = (l - step).clamp(lo, hi);
            if next == l {
                break;
            }
            l = next;
        }
        let y = l.exp2();
        let relative_residual = ((self.ln_at_log(l) - target).exp() - 1.0).abs();
        if relative_residual > INVERSION_TOLERANCE {
            return Err(Error::Domain(format!(
                "inversion residual {relative_residual:e} at x = {x}"
            )));
        }
        let lx = x.log2();
        let asymptotic = if lx > 0.0 {
            (lx.ln() * (-self.alpha / self.gamma)
                + self.rho.eval(lx).ln() * (-1.0 / self.gamma)
                + x.ln() / self.gamma)
                .exp()
        } else {
            f64::NAN
        };
        Ok(GrowthInverse {
            y,
            relative_residual,
            asymptotic,
            ratio: y / asymptotic,
        })
    }
}

/// Inverse of `F(y) = y^gamma (log y)^alpha rho(log y)` at `x`.
pub fn invert_growth(f: &GrowthFunction, x: f64) -> Result<GrowthInverse> {
    f.invert(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlowVariationReport {
    pub epsilon: f64,
    /// Smallest `C` with `t^-eps / C <= L(t y) / L(y) <= C t^eps` on the grid.
    pub constant: f64,
    pub c_max: f64,
    pub pass: bool,
}

pub const DEFAULT_SLOW_C_MAX: f64 = 100.0;

/// Checks the slow-variation inequality for `lambda` on all pairs `y, t`
/// from `grid` (values below 1 are skipped for `t`).
pub fn slowly_varying_check<F: Fn(f64) -> f64>(
    lambda: F,
    epsilon: f64,
    grid: &[f64],
    c_max: f64,
) -> Result<SlowVariationReport> {
    if !(epsilon > 0.0) || grid.is_empty() {
        return Err(Error::Domain("need epsilon > 0 and a nonempty grid".into()));
    }
    let mut constant = 1.0f64;
    for &y in grid {
        let ly = lambda(y);
        if !(ly > 0.0 && ly.is_finite()) {
            return Err(Error::Domain(format!("function not positive at {y}")));
        }
        for &t in grid.iter().filter(|t| **t >= 1.0) {
            let r = lambda(t * y) / ly;
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Domain(format!("function not positive at {}", t * y)));
            }
            let s = t.powf(-epsilon);
            constant = constant.max(r * s).max(s / r);
        }
    }
    Ok(SlowVariationReport {
        epsilon,
        constant,
        c_max,
        pass: constant <= c_max,
    })
}

/// Geometric grid `2^(i / per_octave)` for `i` in `0..=octaves * per_octave`,
/// starting at `start`.
pub fn geometric_grid(start: f64, octaves: usize, per_octave: usize) -> Vec<f64> {
    (0..=octaves * per_octave)
        .map(|i| start * (i as f64 / per_octave as f64).exp2())
        .collect()
}

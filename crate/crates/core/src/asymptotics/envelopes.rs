//! Right-hand sides of the order estimates for `e_n`, evaluated as functions
//! of `n`.
//!
//! Every value has the shape
//! `n^power (log n)^log_power log(n + 2)^rho_power log(log n + 2)^nested`
//! with base-2 logs; `log(n + 2)` stands for `rho(n)` and `log(log n + 2)` for
//! `rho(log n)` and `tau(log n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::Exponent;

/// Tolerance for the equalities that separate branches.
pub const BRANCH_TOLERANCE: f64 = 1e-9;

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= BRANCH_TOLERANCE
}

fn gt(a: f64, b: f64) -> bool {
    a > b + BRANCH_TOLERANCE
}

fn lt(a: f64, b: f64) -> bool {
    a < b - BRANCH_TOLERANCE
}

/// Tree-side parameters: `h` through `theta, gamma, nu`, weights through
/// `kappa, alpha, lambda` (with `rho = log(. + 2)^-lambda`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub theta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub nu: f64,
    pub kappa_u: f64,
    pub kappa_w: f64,
    #[serde(default)]
    pub alpha_u: f64,
    #[serde(default)]
    pub alpha_w: f64,
    #[serde(default)]
    pub lambda_u: f64,
    #[serde(default)]
    pub lambda_w: f64,
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default = "one")]
    pub m_star: usize,
}

fn one() -> usize {
    1
}

/// Weighted Sobolev embedding parameters on a domain in `R^d` with an h-set
/// on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub r: u32,
    pub d: u32,
    pub p: Exponent,
    pub q: Exponent,
    pub theta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub nu: f64,
    pub beta_g: f64,
    pub beta_v: f64,
    #[serde(default)]
    pub alpha_g: f64,
    #[serde(default)]
    pub alpha_v: f64,
    #[serde(default)]
    pub lambda_g: f64,
    #[serde(default)]
    pub lambda_v: f64,
}

impl SobolevParams {
    /// `delta = r + d/q - d/p`.
    pub fn delta(&self) -> f64 {
        let d = self.d as f64;
        self.r as f64 + d * self.q.recip() - d * self.p.recip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "side")]
pub enum EnvelopeParams {
    Tree(TreeParams),
    Sobolev(SobolevParams),
}

/// Exponents of an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnvelopeForm {
    pub power: f64,
    pub log_power: f64,
    /// Exponent of `log(n + 2)`.
    pub rho_power: f64,
    /// Exponent of `log(log n + 2)`.
    pub nested: f64,
}

impl EnvelopeForm {
    pub fn eval(&self, n: f64) -> f64 {
        let l = n.log2();
        let mut v = n.powf(self.power) * l.powf(self.log_power);
        if self.rho_power != 0.0 {
            v *= (n + 2.0).log2().powf(self.rho_power);
        }
        if self.nested != 0.0 {
            v *= (l + 2.0).log2().powf(self.nested);
        }
        v
    }

    /// Total exponent of `log n`, counting `rho(n)` as a power of `log n`.
    pub fn total_log_power(&self) -> f64 {
        self.log_power + self.rho_power
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeValue {
    /// Which estimate applies: "1", "2", "3" (Sobolev side), "8", "9" (tree side).
    pub theorem: &'static str,
    pub case: &'static str,
    pub value: f64,
    pub form: EnvelopeForm,
}

impl EnvelopeValue {
    pub fn power(&self) -> f64 {
        self.form.power
    }

    pub fn log_power(&self) -> f64 {
        self.form.total_log_power()
    }
}

/// Smallest `n` at which envelopes are evaluated.
pub const MIN_N: f64 = 4.0;

fn unsupported<T>(msg: String) -> Result<T> {
    Err(Error::UnsupportedRegime(msg))
}

fn check_exponents(p: Exponent, q: Exponent) -> Result<()> {
    if !(p.recip() < 1.0) {
        return unsupported(format!("source exponent must exceed 1, got {p}"));
    }
    if q.is_infinite() {
        return unsupported("target exponent must be finite".into());
    }
    Ok(())
}

fn check_n(n: f64) -> Result<()> {
    if !(n >= MIN_N) {
        return Err(Error::TooSmall(n));
    }
    Ok(())
}

/// Shared `p < q` branch: with `e = 1/p - 1/q`,
/// `n^(1/q-1/p) (log n)^(-a0 + e) rho(log n)` for `a0 > e` and
/// `n^-a0 rho(n)` for `a0 < e`.
fn small_p_branch(a0: f64, lambda: f64, e: f64) -> Result<(&'static str, EnvelopeForm)> {
    if eq(a0, e) {
        return unsupported(format!("excluded boundary: exponent {a0} equals 1/p - 1/q"));
    }
    if a0 > e {
        Ok((
            "2b-above",
            EnvelopeForm {
                power: -e,
                log_power: -a0 + e,
                nested: -lambda,
                ..Default::default()
            },
        ))
    } else {
        Ok((
            "2b-below",
            EnvelopeForm {
                power: -a0,
                rho_power: -lambda,
                ..Default::default()
            },
        ))
    }
}

fn weight_condition(kappa_w: f64, alpha_w: f64, theta: f64, gamma: f64, q: Exponent) -> Result<bool> {
    let edge = theta * q.recip();
    if gt(kappa_w, edge) {
        Ok(false)
    } else if eq(kappa_w, edge) && gt(alpha_w, (1.0 - gamma) * q.recip()) {
        Ok(true)
    } else {
        Err(Error::Domain(format!(
            "weight condition fails for kappa_w = {kappa_w}, alpha_w = {alpha_w}"
        )))
    }
}

/// Tree side, `theta > 0`.
pub fn theorem8_envelope(t: &TreeParams, n: f64) -> Result<EnvelopeValue> {
    check_n(n)?;
    let form = theorem8_form(t)?;
    Ok(EnvelopeValue {
        theorem: "8",
        case: form.0,
        value: form.1.eval(n),
        form: form.1,
    })
}

fn theorem8_form(t: &TreeParams) -> Result<(&'static str, EnvelopeForm)> {
    check_exponents(t.p, t.q)?;
    if !(t.theta > 0.0) {
        return unsupported("theta must be positive".into());
    }
    let edge = weight_condition(t.kappa_w, t.alpha_w, t.theta, t.gamma, t.q)?;
    let kappa = t.kappa_u + t.kappa_w;
    let alpha = t.alpha_u + t.alpha_w;
    let lambda = t.lambda_u + t.lambda_w;
    let d = t.q.recip() - t.p.recip();
    let critical = t.theta * d.max(0.0);
    if gt(kappa, critical) {
        let a0 = if edge { alpha - t.q.recip() } else { alpha };
        let ratio = kappa / t.theta;
        return Ok((
            "1",
            EnvelopeForm {
                power: -ratio + d,
                log_power: -a0 - ratio * t.gamma,
                nested: -lambda - t.nu * ratio,
                ..Default::default()
            },
        ));
    }
    if !eq(kappa, critical) {
        return unsupported(format!("kappa = {kappa} below theta (1/q - 1/p)_+"));
    }
    if t.p >= t.q {
        let a0 = if edge {
            alpha - 1.0 - (1.0 - t.gamma) * d
        } else {
            alpha - (1.0 - t.gamma) * d
        };
        if !(a0 > 0.0) {
            return unsupported(format!("alpha_0 = {a0} must be positive"));
        }
        Ok((
            "2a",
            EnvelopeForm {
                log_power: -a0,
                nested: -lambda - t.nu * d,
                ..Default::default()
            },
        ))
    } else {
        let a0 = if edge { alpha - t.q.recip() } else { alpha };
        if !(a0 > 0.0) {
            return unsupported(format!("alpha_0 = {a0} must be positive"));
        }
        small_p_branch(a0, lambda, -d)
    }
}

/// Tree side, `theta = 0`, `kappa = 0`, `kappa_w > 0`, with
/// `tau = log(. + 2)^nu`.
pub fn theorem9_envelope(t: &TreeParams, n: f64) -> Result<EnvelopeValue> {
    check_n(n)?;
    let (case, form) = theorem9_form(t)?;
    Ok(EnvelopeValue {
        theorem: "9",
        case,
        value: form.eval(n),
        form,
    })
}

fn theorem9_form(t: &TreeParams) -> Result<(&'static str, EnvelopeForm)> {
    check_exponents(t.p, t.q)?;
    if t.theta != 0.0 || !eq(t.kappa_u + t.kappa_w, 0.0) || !(t.kappa_w > 0.0) {
        return unsupported("needs theta = 0, kappa = 0, kappa_w > 0".into());
    }
    let alpha = t.alpha_u + t.alpha_w;
    let lambda = t.lambda_u + t.lambda_w;
    log_critical_forms(alpha, lambda, t.gamma, t.nu, t.p, t.q, f64::INFINITY)
}

/// The `theta = 0` critical-weight forms shared by the tree side and the
/// Sobolev side. `sobolev_power` is `delta/d` (infinite on the tree side).
fn log_critical_forms(
    alpha: f64,
    lambda: f64,
    gamma: f64,
    nu: f64,
    p: Exponent,
    q: Exponent,
    sobolev_power: f64,
) -> Result<(&'static str, EnvelopeForm)> {
    if !(gamma < 1.0) {
        return unsupported(format!("gamma = {gamma} must be below 1"));
    }
    let d = q.recip() - p.recip();
    let dp = d.max(0.0);
    let c = alpha - (1.0 - gamma) * dp;
    if gt(c, 0.0) {
        let rate = alpha / (1.0 - gamma);
        if eq(rate, sobolev_power) {
            return unsupported("excluded boundary alpha/(1-gamma) = delta/d".into());
        }
        if sobolev_power < rate {
            return Ok((
                "1-smooth",
                EnvelopeForm {
                    power: -sobolev_power + d,
                    ..Default::default()
                },
            ));
        }
        return Ok((
            "1",
            EnvelopeForm {
                power: -rate + d,
                log_power: -lambda - rate * nu,
                ..Default::default()
            },
        ));
    }
    if !eq(c, 0.0) || !gt(lambda, (1.0 - nu) * dp) {
        return unsupported(format!(
            "no estimate for alpha = {alpha}, lambda = {lambda}"
        ));
    }
    if p >= q {
        return Ok((
            "2a",
            EnvelopeForm {
                log_power: -lambda + (1.0 - nu) * d,
                ..Default::default()
            },
        ));
    }
    let e = -d;
    if eq(lambda, e) {
        return unsupported("excluded boundary lambda = 1/p - 1/q".into());
    }
    if lambda > e {
        Ok((
            "2b-above",
            EnvelopeForm {
                power: d,
                log_power: -lambda + e,
                ..Default::default()
            },
        ))
    } else {
        Ok((
            "2b-below",
            EnvelopeForm {
                power: -lambda,
                ..Default::default()
            },
        ))
    }
}

/// Tree side: `theta > 0` goes to the first estimate, `theta = 0` to the
/// second.
pub fn tree_envelope(t: &TreeParams, n: f64) -> Result<EnvelopeValue> {
    if t.theta > 0.0 {
        theorem8_envelope(t, n)
    } else {
        theorem9_envelope(t, n)
    }
}

/// Sobolev side: routes to the estimate matching `theta` and `beta - delta`.
pub fn sobolev_envelopes(s: &SobolevParams, n: f64) -> Result<EnvelopeValue> {
    check_n(n)?;
    let (theorem, case, form) = sobolev_form(s)?;
    Ok(EnvelopeValue {
        theorem,
        case,
        value: form.eval(n),
        form,
    })
}

fn sobolev_form(s: &SobolevParams) -> Result<(&'static str, &'static str, EnvelopeForm)> {
    check_exponents(s.p, s.q)?;
    if s.d == 0 || s.r == 0 {
        return Err(Error::Domain("r and d must be positive".into()));
    }
    let delta = s.delta();
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    let dim = s.d as f64;
    if !(s.theta >= 0.0 && s.theta < dim) {
        return unsupported(format!("theta = {} outside [0, d)", s.theta));
    }
    let beta = s.beta_g + s.beta_v;
    let alpha = s.alpha_g + s.alpha_v;
    let lambda = s.lambda_g + s.lambda_v;
    let dq = s.q.recip() - s.p.recip();
    let dp = dq.max(0.0);
    let qi = s.q.recip();

    let edge_limit = (dim - s.theta) * qi;
    let edge = if lt(s.beta_v, edge_limit) {
        false
    } else if eq(s.beta_v, edge_limit) && gt(s.alpha_v, (1.0 - s.gamma) * qi) {
        true
    } else {
        return Err(Error::Domain(format!(
            "weight condition fails for beta_v = {}, alpha_v = {}",
            s.beta_v, s.alpha_v
        )));
    };

    if s.theta == 0.0 {
        if !lt(s.beta_v, dim * qi) {
            return unsupported("theta = 0 needs beta_v < d/q".into());
        }
        if lt(beta - delta, 0.0) {
            let form = EnvelopeForm {
                power: -(s.r as f64) / dim,
                ..Default::default()
            };
            return Ok(("2", "1", form));
        }
        if eq(beta - delta, 0.0) {
            let (case, form) =
                log_critical_forms(alpha, lambda, s.gamma, s.nu, s.p, s.q, delta / dim)?;
            return Ok(("3", case, form));
        }
        return unsupported("theta = 0 needs beta <= delta".into());
    }

    let gap = beta - delta;
    let critical = -s.theta * dp;
    if lt(gap, critical) {
        let a0 = if edge { alpha - qi } else { alpha };
        let smooth = delta / dim;
        let boundary = (delta - beta) / s.theta;
        if eq(smooth, boundary) {
            return unsupported("excluded boundary delta/d = (delta - beta)/theta".into());
        }
        if smooth < boundary {
            return Ok((
                "1",
                "1-smooth",
                EnvelopeForm {
                    power: -smooth + dq,
                    ..Default::default()
                },
            ));
        }
        let ratio = gap / s.theta;
        return Ok((
            "1",
            "1",
            EnvelopeForm {
                power: -boundary + dq,
                log_power: -a0 + ratio * s.gamma,
                nested: -lambda + s.nu * ratio,
                ..Default::default()
            },
        ));
    }
    if !eq(gap, critical) {
        return unsupported("beta - delta above -theta (1/q - 1/p)_+".into());
    }
    if s.p >= s.q {
        let a0 = if edge {
            alpha - 1.0 - (1.0 - s.gamma) * dq
        } else {
            alpha - (1.0 - s.gamma) * dq
        };
        if !(a0 > 0.0) {
            return unsupported(format!("alpha_0 = {a0} must be positive"));
        }
        return Ok((
            "1",
            "2a",
            EnvelopeForm {
                log_power: -a0,
                nested: -lambda - s.nu * dq,
                ..Default::default()
            },
        ));
    }
    let a0 = if edge { alpha - qi } else { alpha };
    if !(a0 > 0.0) {
        return unsupported(format!("alpha_0 = {a0} must be positive"));
    }
    let (case, form) = small_p_branch(a0, lambda, -dq)?;
    Ok(("1", case, form))
}

/// Dispatch on the parameter side.
pub fn envelope(params: &EnvelopeParams, n: f64) -> Result<EnvelopeValue> {
    match params {
        EnvelopeParams::Tree(t) => tree_envelope(t, n),
        EnvelopeParams::Sobolev(s) => sobolev_envelopes(s, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(theta: f64, kappa_u: f64, kappa_w: f64, alpha_u: f64, alpha_w: f64, p: f64, q: f64) -> TreeParams {
        TreeParams {
            theta,
            gamma: 0.0,
            nu: 0.0,
            kappa_u,
            kappa_w,
            alpha_u,
            alpha_w,
            lambda_u: 0.0,
            lambda_w: 0.0,
            p: Exponent::new(p).unwrap(),
            q: Exponent::new(q).unwrap(),
            m_star: 1,
        }
    }

    #[test]
    fn theorem8_case1_p_eq_q() {
        let t = tree(1.0, 0.0, 1.0, 0.5, 0.0, 2.0, 2.0);
        let v = theorem8_envelope(&t, 1024.0).unwrap();
        assert_eq!(v.case, "1");
        assert!((v.value - 1.0 / 1024.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn theorem8_case2() {
        // p < q, kappa = 0 = theta (1/q - 1/p)_+, alpha_0 = 0.1 < 1/2 - 1/4
        let t = TreeParams {
            lambda_u: 1.0,
            ..tree(1.0, -1.0, 1.0, 0.1, 0.0, 2.0, 4.0)
        };
        let v = theorem8_envelope(&t, 1024.0).unwrap();
        assert_eq!(v.case, "2b-below");
        assert!((v.value - 1024f64.powf(-0.1) / 1026f64.log2()).abs() < 1e-15);
        let v = theorem8_envelope(&TreeParams { alpha_u: 1.0, ..t }, 1024.0).unwrap();
        assert_eq!(v.case, "2b-above");
        assert!((v.power() + 0.25).abs() < 1e-15 && (v.form.log_power + 0.75).abs() < 1e-15);
        // alpha_0 on the excluded boundary
        assert!(matches!(
            theorem8_envelope(&TreeParams { alpha_u: 0.25, ..t }, 64.0),
            Err(Error::UnsupportedRegime(_))
        ));
        // p = q: log form with vanishing tau exponent
        let t = tree(1.0, -1.0, 1.0, 1.5, 0.0, 2.0, 2.0);
        let v = theorem8_envelope(&t, 1024.0).unwrap();
        assert_eq!(v.case, "2a");
        assert!((v.value - 10f64.powf(-1.5)).abs() < 1e-15);
    }

    impl TreeParams {
        fn with_alpha(self, a: f64) -> Self {
            TreeParams { alpha_u: a, alpha_w: 0.0, ..self }
        }
    }

    #[test]
    fn theorem9_cases() {
        let base = tree(0.0, -1.0, 1.0, 1.0, 0.0, 2.0, 2.0);
        let v = theorem9_envelope(&base, 256.0).unwrap();
        assert_eq!(v.case, "1");
        assert!((v.value - 1.0 / 256.0).abs() < 1e-15);
        // critical alpha = 0 with p = q
        let t = TreeParams { lambda_u: 2.0, ..base.with_alpha(0.0) };
        let v = theorem9_envelope(&t, 256.0).unwrap();
        assert_eq!(v.case, "2a");
        assert!((v.value - 1.0 / 64.0).abs() < 1e-15);
        // p < q with lambda below 1/p - 1/q
        let t = TreeParams { lambda_u: 0.1, q: Exponent::new(4.0).unwrap(), ..base.with_alpha(0.0) };
        let v = theorem9_envelope(&t, 256.0).unwrap();
        assert_eq!(v.case, "2b-below");
        assert!((v.value - 256f64.powf(-0.1)).abs() < 1e-15);
        let t = TreeParams { lambda_u: 0.25, ..t };
        assert!(matches!(theorem9_envelope(&t, 256.0), Err(Error::UnsupportedRegime(_))));
    }

    fn sobolev(theta: f64, beta_g: f64, beta_v: f64, p: f64, q: f64) -> SobolevParams {
        SobolevParams {
            r: 1,
            d: 2,
            p: Exponent::new(p).unwrap(),
            q: Exponent::new(q).unwrap(),
            theta,
            gamma: 0.0,
            nu: 0.0,
            beta_g,
            beta_v,
            alpha_g: 0.0,
            alpha_v: 0.0,
            lambda_g: 0.0,
            lambda_v: 0.0,
        }
    }

    #[test]
    fn sobolev_examples() {
        // theta = 0, beta - delta < 0: n^(-r/d)
        let v = sobolev_envelopes(&sobolev(0.0, 0.0, 0.0, 2.0, 2.0), 256.0).unwrap();
        assert_eq!((v.theorem, v.value), ("2", 1.0 / 16.0));
        // theta = 1, delta = 1, beta = 0: delta/d = 1/2 < (delta - beta)/theta = 1
        let v = sobolev_envelopes(&sobolev(1.0, 0.0, 0.0, 2.0, 2.0), 256.0).unwrap();
        assert_eq!((v.theorem, v.case), ("1", "1-smooth"));
        assert!((v.value - 1.0 / 16.0).abs() < 1e-15);
        // theta = 0, beta = delta, p < q, lambda above 1/p - 1/q
        let s = SobolevParams {
            lambda_g: 1.0,
            alpha_g: 0.0,
            ..sobolev(0.0, 1.5, 0.0, 2.0, 4.0)
        };
        assert!((s.delta() - 0.5).abs() < 1e-15);
        let s = SobolevParams { beta_g: 0.5, ..s };
        let v = sobolev_envelopes(&s, 256.0).unwrap();
        assert_eq!((v.theorem, v.case), ("3", "2b-above"));
        assert!((v.value - 256f64.powf(-0.25) * 8f64.powf(-0.75)).abs() < 1e-15);
    }

    #[test]
    fn small_n_and_p_one() {
        let t = tree(1.0, 0.0, 1.0, 0.0, 0.0, 2.0, 2.0);
        assert!(matches!(theorem8_envelope(&t, 2.0), Err(Error::TooSmall(_))));
        let t = tree(1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 2.0);
        assert!(matches!(theorem8_envelope(&t, 16.0), Err(Error::UnsupportedRegime(_))));
    }
}

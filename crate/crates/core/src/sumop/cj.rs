use std::fmt;

use serde::{Deserialize, Serialize};

use super::norms::{norm_estimate, norm_exact, DEFAULT_RESTARTS};
use super::SummationOperator;
use crate::error::{Error, Result};
use crate::slow::SlowFactor;
use crate::spaces::Exponent;
use crate::tree::{generate_hset_tree, HSetProfile};

/// Tolerance for the equalities that separate regimes.
pub const REGIME_TOLERANCE: f64 = 1e-9;

/// Levelwise weights
/// `u_j = 2^(-kappa_u m j) (m j + 1)^(-alpha_u) rho_u(m j + 1)` and the same
/// for `w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub kappa_u: f64,
    pub alpha_u: f64,
    #[serde(default)]
    pub rho_u: SlowFactor,
    pub kappa_w: f64,
    pub alpha_w: f64,
    #[serde(default)]
    pub rho_w: SlowFactor,
    pub m_star: usize,
}

fn weight(kappa: f64, alpha: f64, rho: SlowFactor, m: usize, j: usize) -> f64 {
    let mj = (m * j) as f64;
    (-kappa * mj).exp2() * (mj + 1.0).powf(-alpha) * rho.eval(mj + 1.0)
}

impl WeightProfile {
    pub fn u(&self, j: usize) -> f64 {
        weight(self.kappa_u, self.alpha_u, self.rho_u, self.m_star, j)
    }

    pub fn w(&self, j: usize) -> f64 {
        weight(self.kappa_w, self.alpha_w, self.rho_w, self.m_star, j)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_u + self.kappa_w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_u + self.alpha_w
    }

    /// `lambda` with `rho = rho_u rho_w = log2(. + 2)^(-lambda)`.
    pub fn lambda(&self) -> f64 {
        -(self.rho_u.exponent() + self.rho_w.exponent())
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.rho_u.eval(t) * self.rho_w.eval(t)
    }

    /// The integrability condition on `w`:
    /// `kappa_w > theta/q`, or `kappa_w = theta/q` and `alpha_w > (1 - gamma)/q`.
    pub fn check_condition(&self, h: &HSetProfile, q: Exponent) -> Result<()> {
        let edge = h.theta * q.recip();
        let ok = if self.kappa_w > edge + REGIME_TOLERANCE {
            true
        } else if (self.kappa_w - edge).abs() <= REGIME_TOLERANCE {
            self.alpha_w > (1.0 - h.gamma) * q.recip() + REGIME_TOLERANCE
        } else {
            false
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "weight condition fails: kappa_w = {}, alpha_w = {}, theta = {}, gamma = {}, q = {q}",
                self.kappa_w, self.alpha_w, h.theta, h.gamma
            )))
        }
    }
}

/// Which closed form describes the subtree norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CjCase {
    One,
    Two,
    Three,
    Four,
    /// `theta = kappa = 0` with the critical `alpha`: logarithmic forms.
    Logarithmic,
}

impl fmt::Display for CjCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CjCase::One => "1",
            CjCase::Two => "2",
            CjCase::Three => "3",
            CjCase::Four => "4",
            CjCase::Logarithmic => "log",
        })
    }
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REGIME_TOLERANCE
}

fn gt(a: f64, b: f64) -> bool {
    a > b + REGIME_TOLERANCE
}

/// Order of the norm of the summation operator on a subtree rooted at level
/// `j >= 2`.
pub fn cj_envelope(
    profile: &WeightProfile,
    h: &HSetProfile,
    p: Exponent,
    q: Exponent,
    j: usize,
) -> Result<(CjCase, f64)> {
    if j < 2 {
        return Err(Error::Domain(format!("C(j) needs j >= 2, got {j}")));
    }
    if q.is_infinite() {
        return Err(Error::UnsupportedRegime("target exponent must be finite".into()));
    }
    profile.check_condition(h, q)?;
    let theta = h.theta;
    let gamma = h.gamma;
    let nu = h.tau.exponent();
    let kappa = profile.kappa();
    let alpha = profile.alpha();
    let lambda = profile.lambda();
    let d = q.recip() - p.recip();
    let dp = d.max(0.0);
    let critical = theta * dp;
    let mj = (profile.m_star * j) as f64;
    let rho = profile.rho(mj);
    let p_below_q = p < q;
    let unsupported = || {
        Err(Error::UnsupportedRegime(format!(
            "no closed form for kappa = {kappa}, alpha = {alpha}, theta = {theta}, p = {p}, q = {q}"
        )))
    };

    if gt(profile.kappa_w, theta * q.recip()) {
        if gt(kappa, critical) {
            return Ok((CjCase::One, (-kappa * mj).exp2() * mj.powf(-alpha) * rho));
        }
        if !eq(kappa, critical) {
            return unsupported();
        }
        if gt(alpha, (1.0 - gamma) * dp) {
            return Ok((CjCase::Two, (-critical * mj).exp2() * mj.powf(-alpha + dp) * rho));
        }
        if theta == 0.0 && eq(alpha, (1.0 - gamma) * dp) && gt(lambda, (1.0 - nu) * dp) {
            let lg = mj.log2();
            let value = if p_below_q || p == q {
                lg.powf(-lambda)
            } else {
                mj.powf(gamma * d) * lg.powf(-lambda + d)
            };
            return Ok((CjCase::Logarithmic, value));
        }
        return unsupported();
    }
    if theta > 0.0 {
        if gt(kappa, critical) || (eq(kappa, critical) && gt(alpha, q.recip()) && p_below_q) {
            return Ok((CjCase::Three, (-kappa * mj).exp2() * mj.powf(-alpha + q.recip()) * rho));
        }
        if eq(kappa, critical) && !p_below_q && gt(alpha, 1.0 + (1.0 - gamma) * dp) {
            return Ok((
                CjCase::Four,
                (-theta * d * mj).exp2() * mj.powf(-alpha + 1.0 + d) * rho,
            ));
        }
    }
    unsupported()
}

/// One row of a band experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CjRow {
    pub j: usize,
    pub vertex: usize,
    pub norm: f64,
    pub exact: bool,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CjBand {
    pub case: CjCase,
    pub rows: Vec<CjRow>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub spread: f64,
    pub tree_vertices: usize,
}

/// Builds the h-set tree of depth `j_max + extra_depth` with levelwise
/// weights and compares the norm of the subtree operator at the first vertex
/// of each level `j` in `j_min..=j_max` with the closed form.
pub fn cj_band_experiment(
    profile: &WeightProfile,
    h: &HSetProfile,
    p: Exponent,
    q: Exponent,
    j_min: usize,
    j_max: usize,
    extra_depth: usize,
) -> Result<CjBand> {
    if j_min < 2 || j_min > j_max {
        return Err(Error::Domain(format!("bad level range {j_min}..={j_max}")));
    }
    let generated = generate_hset_tree(h, j_max + extra_depth)?;
    let depth = generated.tree.depth();
    let u: Vec<f64> = (0..=depth).map(|j| profile.u(j)).collect();
    let w: Vec<f64> = (0..=depth).map(|j| profile.w(j)).collect();
    let op = SummationOperator::levelwise(generated.tree, &u, &w, p, q)?;

    let mut rows = Vec::new();
    let mut case = CjCase::One;
    for j in j_min..=j_max {
        let (c, envelope) = cj_envelope(profile, h, p, q, j)?;
        case = c;
        let vertex = op.tree().level_vertices(j)[0];
        let (sub, _) = op.restrict(vertex)?;
        let (norm, exact) = match norm_exact(&sub) {
            Ok(v) => (v, true),
            Err(Error::UnsupportedRegime(_)) => {
                (norm_estimate(&sub, DEFAULT_RESTARTS, j as u64).value, false)
            }
            Err(e) => return Err(e),
        };
        rows.push(CjRow {
            j,
            vertex,
            norm,
            exact,
            envelope,
            ratio: norm / envelope,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(CjBand {
        case,
        rows,
        max_ratio,
        min_ratio,
        spread: max_ratio / min_ratio,
        tree_vertices: op.len(),
    })
}

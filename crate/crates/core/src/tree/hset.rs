use serde::{Deserialize, Serialize};

use super::RootedTree;
use crate::error::{Error, Result};
use crate::slow::SlowFactor;

/// Largest depth accepted by the generator.
pub const MAX_HSET_DEPTH: usize = 30;
/// Largest vertex count accepted by the generator.
pub const MAX_HSET_VERTICES: usize = 10_000_000;

/// `h(t) = t^theta |log t|^gamma tau(|log t|)` near zero, constant above
/// `t_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HSetProfile {
    pub theta: f64,
    pub gamma: f64,
    #[serde(default)]
    pub tau: SlowFactor,
    pub m_star: usize,
    pub c_star: f64,
    #[serde(default = "default_t_floor")]
    pub t_floor: f64,
}

fn default_t_floor() -> f64 {
    0.25
}

impl HSetProfile {
    pub fn new(
        theta: f64,
        gamma: f64,
        tau: SlowFactor,
        m_star: usize,
        c_star: f64,
        t_floor: f64,
    ) -> Result<Self> {
        let p = HSetProfile {
            theta,
            gamma,
            tau,
            m_star,
            c_star,
            t_floor,
        };
        p.validate()?;
        Ok(p)
    }

    /// `h(t) = t^theta`, closed form on all of `(0, 1]`.
    pub fn power(theta: f64) -> Self {
        HSetProfile {
            theta,
            gamma: 0.0,
            tau: SlowFactor::Const,
            m_star: 1,
            c_star: 1.0,
            t_floor: 1.0,
        }
    }

    /// Checks parameter ranges, and that `h` is positive and nondecreasing on
    /// a logarithmic grid down to `2^-256`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleProfile(msg));
        if !(self.theta >= 0.0 && self.theta.is_finite()) || !self.gamma.is_finite() {
            return bad(format!("theta = {}, gamma = {}", self.theta, self.gamma));
        }
        if self.m_star == 0 {
            return bad("m_star must be positive".into());
        }
        if !(self.c_star >= 1.0) {
            return bad(format!("c_star = {} < 1", self.c_star));
        }
        if !(self.t_floor > 0.0 && self.t_floor <= 1.0) {
            return bad(format!("t_floor = {} outside (0, 1]", self.t_floor));
        }
        let mut prev = f64::INFINITY;
        for i in 0..=2048 {
            let t = (-(i as f64) / 8.0).exp2();
            let h = self.h(t);
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("h({t:e}) = {h} is not positive and finite"));
            }
            if h > prev * (1.0 + 1e-12) {
                return bad(format!("h decreases in t near t = {t:e}"));
            }
            prev = h;
        }
        Ok(())
    }

    fn h(&self, t: f64) -> f64 {
        let t = t.min(self.t_floor);
        let s = -t.log2();
        t.powf(self.theta) * s.powf(self.gamma) * self.tau.eval(s)
    }

    /// `h(t)` for `0 < t <= 1`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("h is defined on (0, 1], got {t}")));
        }
        Ok(self.h(t))
    }

    /// `h(2^(-m j)) / h(2^(-m (j + l)))`.
    pub fn branching_target(&self, j: usize, l: usize) -> f64 {
        let m = self.m_star as f64;
        self.h((-m * j as f64).exp2()) / self.h((-m * (j + l) as f64).exp2())
    }
}

/// A generated tree with the level populations that were aimed for.
#[derive(Debug, Clone, PartialEq)]
pub struct HSetTree {
    pub tree: RootedTree,
    /// `h(1) / h(2^(-m j))` for every level.
    pub targets: Vec<f64>,
    pub populations: Vec<usize>,
    /// Children of every vertex on level `j - 1`, for `j >= 1`.
    pub branching: Vec<usize>,
}

/// A tree with levels `0..=depth` in which every vertex of level `j - 1` has
/// the same number `b_j` of children.
///
/// With `P_j = b_1 ... b_j` and targets `T_j = h(1) / h(2^(-m j))`, `b_j` is
/// whichever of `floor(T_j / P_(j-1))`, `ceil(T_j / P_(j-1))` (at least 1) is
/// closer in ratio. This keeps `P_j / T_j` in `(2^(-1/2), 2^(1/2)]`, so
/// every vertex meets the branching condition with `c_star = 2`.
pub fn generate_hset_tree(profile: &HSetProfile, depth: usize) -> Result<HSetTree> {
    profile.validate()?;
    if depth > MAX_HSET_DEPTH {
        return Err(Error::SizeGuard(format!(
            "depth {depth} exceeds {MAX_HSET_DEPTH}"
        )));
    }
    let mut targets = vec![1.0];
    let mut populations = vec![1usize];
    let mut branching = Vec::with_capacity(depth);
    let mut total = 1usize;
    for j in 1..=depth {
        let target = profile.branching_target(0, j);
        if !target.is_finite() {
            return Err(Error::SizeGuard(format!("target at level {j} is not finite")));
        }
        let prev = populations[j - 1];
        let x = target / prev as f64;
        let lo = x.floor().max(1.0);
        let hi = x.ceil().max(1.0);
        let b = if hi * lo <= x * x { hi } else { lo };
        if b * prev as f64 + total as f64 > MAX_HSET_VERTICES as f64 {
            return Err(Error::SizeGuard(format!(
                "predicted vertex count exceeds {MAX_HSET_VERTICES} at level {j}"
            )));
        }
        let b = b as usize;
        let pop = prev * b;
        total += pop;
        targets.push(target);
        populations.push(pop);
        branching.push(b);
    }

    let mut parents = Vec::with_capacity(total);
    parents.push(None);
    let mut level_start = 0usize;
    for (j, &b) in branching.iter().enumerate() {
        for v in level_start..level_start + populations[j] {
            parents.extend(std::iter::repeat_n(Some(v), b));
        }
        level_start += populations[j];
    }
    Ok(HSetTree {
        tree: RootedTree::from_parents(parents)?,
        targets,
        populations,
        branching,
    })
}

/// Extreme values of `card V_l(xi) / target(level(xi), l)` over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HSetReport {
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub pairs_checked: usize,
    pub c_star: f64,
    pub pass: bool,
}

/// Checks the two-sided branching condition for all `(xi, l)` with
/// `level(xi) + l <= depth`, on an evenly strided sample of about `sample`
/// pairs.
pub fn verify_hset_condition(
    tree: &RootedTree,
    profile: &HSetProfile,
    sample: usize,
) -> Result<HSetReport> {
    profile.validate()?;
    let depth = tree.depth();
    let per_vertex = depth + 1;
    let vertices = (sample / per_vertex).clamp(1, tree.len());
    let mut max_ratio = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    let mut pairs = 0usize;
    for s in 0..vertices {
        let v = s * tree.len() / vertices;
        let j = tree.level(v);
        for l in 0..=depth - j {
            let count = tree.descendants_at_depth(v, l)? as f64;
            let ratio = count / profile.branching_target(j, l);
            max_ratio = max_ratio.max(ratio);
            min_ratio = min_ratio.min(ratio);
            pairs += 1;
        }
    }
    let slack = 1e-12;
    let pass = min_ratio >= (1.0 - slack) / profile.c_star && max_ratio <= profile.c_star * (1.0 + slack);
    Ok(HSetReport {
        max_ratio,
        min_ratio,
        pairs_checked: pairs,
        c_star: profile.c_star,
        pass,
    })
}

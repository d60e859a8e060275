use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SummationOperator;
use crate::error::{Error, Result};
use crate::spaces::{lp_norm, Exponent};

pub const DEFAULT_RESTARTS: usize = 64;

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_ITERATIONS: usize = 20_000;
const DENSE_FALLBACK_LIMIT: usize = 2048;
const ASCENT_ITERATIONS: usize = 500;

/// `||S||_{p -> q}` where it has a closed form or a certified iteration:
/// `p = 1`, `p = inf`, or `p = q = 2`.
pub fn norm_exact(s: &SummationOperator) -> Result<f64> {
    match (s.p, s.q) {
        (Exponent::Finite(1.0), _) => Ok(norm_from_l1(s)),
        (Exponent::Infinite, q) => Ok(lp_norm(&s.apply(&vec![1.0; s.len()]), q)),
        (Exponent::Finite(p), Exponent::Finite(q)) if p == 2.0 && q == 2.0 => {
            let (lo, hi) = norm_bracket_l2(s)?;
            Ok(0.5 * (lo + hi))
        }
        (p, q) => Err(Error::UnsupportedRegime(format!(
            "no exact norm for p = {p}, q = {q}"
        ))),
    }
}

/// From `l_1` the norm is the largest image of a basis vector:
/// `max_xi' u(xi') ||w on the subtree of xi'||_q`.
fn norm_from_l1(s: &SummationOperator) -> f64 {
    let tree = s.tree();
    let w = s.w();
    let scale = w.iter().copied().fold(0.0, f64::max);
    let q = s.q;
    // subtree sums of (w / scale)^q, or subtree maxima for q = inf
    let mut acc: Vec<f64> = w
        .iter()
        .map(|x| match q {
            Exponent::Infinite => x / scale,
            Exponent::Finite(q) => (x / scale).powf(q),
        })
        .collect();
    for &v in tree.preorder().iter().rev() {
        if let Some(p) = tree.parent(v) {
            acc[p] = match q {
                Exponent::Infinite => acc[p].max(acc[v]),
                Exponent::Finite(_) => acc[p] + acc[v],
            };
        }
    }
    (0..s.len())
        .map(|v| {
            let sub = match q {
                Exponent::Infinite => acc[v],
                Exponent::Finite(q) => acc[v].powf(1.0 / q),
            };
            s.u()[v] * scale * sub
        })
        .fold(0.0, f64::max)
}

/// Certified bracket for `||S||_{2 -> 2}` from power iteration on `S^T S`
/// started at the all-ones vector: Rayleigh quotient below, Collatz-Wielandt
/// maximum above (the matrix is entrywise nonnegative).
pub fn norm_bracket_l2(s: &SummationOperator) -> Result<(f64, f64)> {
    let n = s.len();
    let mut x = vec![1.0; n];
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for _ in 0..POWER_ITERATIONS {
        let y = s.apply_adjoint(&s.apply(&x));
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let xx: f64 = x.iter().map(|a| a * a).sum();
        lo = lo.max(xy / xx);
        let cw = x
            .iter()
            .zip(&y)
            .map(|(a, b)| b / a)
            .fold(0.0, f64::max);
        hi = hi.min(cw);
        if hi - lo <= POWER_TOLERANCE * lo {
            return Ok((lo.sqrt(), hi.sqrt()));
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        x = y.iter().map(|v| v / scale).collect();
        if x.iter().any(|v| *v <= 0.0) {
            break;
        }
    }
    if n <= DENSE_FALLBACK_LIMIT {
        let m = s.to_matrix()?;
        let a = DMatrix::from_fn(n, n, |r, c| m.get(r, c));
        let gram = a.transpose() * &a;
        let top = SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let top = top.max(lo);
        return Ok((top.sqrt(), top.sqrt().min(hi.sqrt())));
    }
    Err(Error::UnsupportedRegime(format!(
        "power iteration did not reach tolerance on {n} vertices"
    )))
}

/// A feasible point and its value `||S f||_q / ||f||_p`, a lower bound on
/// the norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Vec<f64>,
    /// Start that produced the witness (0 is the deterministic start).
    pub start: usize,
}

fn dual_map(y: &[f64], r: Exponent) -> Vec<f64> {
    match r {
        Exponent::Infinite => {
            // subgradient of the max norm: the largest coordinates
            let m = y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            y.iter()
                .map(|v| if v.abs() >= m * (1.0 - 1e-12) && m > 0.0 { v.signum() } else { 0.0 })
                .collect()
        }
        Exponent::Finite(r) => {
            let m = y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if m == 0.0 {
                return vec![0.0; y.len()];
            }
            y.iter().map(|v| v.signum() * (v.abs() / m).powf(r - 1.0)).collect()
        }
    }
}

/// Maximiser of `<z, x>` over the `l_p` unit sphere.
fn ascent_direction(z: &[f64], p: Exponent) -> Vec<f64> {
    match p {
        Exponent::Finite(1.0) => {
            let m = z.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let i = z.iter().position(|v| v.abs() >= m * (1.0 - 1e-12)).unwrap_or(0);
            let mut x = vec![0.0; z.len()];
            x[i] = if z[i] < 0.0 { -1.0 } else { 1.0 };
            x
        }
        Exponent::Infinite => z.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect(),
        _ => dual_map(z, p.dual()),
    }
}

fn ratio(s: &SummationOperator, x: &[f64]) -> f64 {
    let nx = lp_norm(x, s.p);
    if nx == 0.0 {
        return 0.0;
    }
    lp_norm(&s.apply(x), s.q) / nx
}

/// Multistart dual-map ascent `x <- J_p*(S^T J_q(S x))` on the `l_p` sphere.
///
/// Start 0 is the all-ones vector; for `p = 1` the next starts are all
/// basis vectors, then uniform random positive vectors from `seed`. The best value wins, ties going to the
/// lowest start index.
pub fn norm_estimate(s: &SummationOperator, restarts: usize, seed: u64) -> NormEstimate {
    let n = s.len();
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n]];
    if s.p == Exponent::ONE {
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            starts.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while starts.len() < restarts + 1 {
        starts.push((0..n).map(|_| rng.gen_range(0.0..1.0)).collect());
    }

    let mut best = NormEstimate {
        value: -1.0,
        witness: Vec::new(),
        start: 0,
    };
    for (idx, x0) in starts.into_iter().enumerate() {
        let (value, x) = ascend(s, x0);
        if value > best.value {
            best = NormEstimate {
                value,
                witness: x,
                start: idx,
            };
        }
    }
    best
}

fn ascend(s: &SummationOperator, x0: Vec<f64>) -> (f64, Vec<f64>) {
    let mut x = x0;
    let mut value = ratio(s, &x);
    for _ in 0..ASCENT_ITERATIONS {
        let y = s.apply(&x);
        let z = s.apply_adjoint(&dual_map(&y, s.q));
        let next = ascent_direction(&z, s.p);
        let v = ratio(s, &next);
        if v > value * (1.0 + 1e-15) {
            value = v;
            x = next;
        } else {
            if v > value {
                value = v;
                x = next;
            }
            break;
        }
    }
    let nx = lp_norm(&x, s.p);
    let x: Vec<f64> = x.iter().map(|v| v / nx).collect();
    (value, x)
}

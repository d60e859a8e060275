use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::Exponent;

/// A nonincreasing nonnegative sequence `sigma_1, sigma_2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DiagonalSequence {
    /// `sigma_k = scale * ratio^k`.
    Geometric { scale: f64, ratio: f64 },
    /// `sigma_k = scale * k^(-exponent)`.
    PowerLaw { scale: f64, exponent: f64 },
    /// `sigma_k = values[k - 1]`, zero past the end.
    Finite { values: Vec<f64> },
}

impl DiagonalSequence {
    pub fn value(&self, k: usize) -> f64 {
        assert!(k >= 1, "sequence is indexed from 1");
        match self {
            DiagonalSequence::Geometric { scale, ratio } => scale * ratio.powi(k as i32),
            DiagonalSequence::PowerLaw { scale, exponent } => scale * (k as f64).powf(-exponent),
            DiagonalSequence::Finite { values } => values.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DiagonalSequence::Geometric { scale, ratio } => {
                if !(*scale >= 0.0 && scale.is_finite()) || !(*ratio >= 0.0) {
                    return Err(Error::Domain(format!(
                        "geometric sequence needs scale >= 0 and ratio >= 0, got {scale}, {ratio}"
                    )));
                }
            }
            DiagonalSequence::PowerLaw { scale, exponent } => {
                if !(*scale >= 0.0 && scale.is_finite()) || !(*exponent >= 0.0) {
                    return Err(Error::Domain(format!(
                        "power law needs scale >= 0 and exponent >= 0, got {scale}, {exponent}"
                    )));
                }
            }
            DiagonalSequence::Finite { values } => {
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::Domain("sequence entries must be finite and >= 0".into()));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Domain("sequence must be nonincreasing".into()));
                }
            }
        }
        Ok(())
    }

    /// `sum_{k >= n} sigma_k^e`.
    fn tail_power_sum(&self, e: f64, n: usize) -> Result<f64> {
        match self {
            DiagonalSequence::Geometric { scale, ratio } => {
                if *scale == 0.0 || *ratio == 0.0 {
                    return Ok(0.0);
                }
                if *ratio >= 1.0 {
                    return Err(Error::Divergent(format!("geometric ratio {ratio} >= 1")));
                }
                let re = ratio.powf(e);
                Ok(scale.powf(e) * re.powi(n as i32) / (1.0 - re))
            }
            DiagonalSequence::PowerLaw { scale, exponent } => {
                if *scale == 0.0 {
                    return Ok(0.0);
                }
                let s = exponent * e;
                if s <= 1.0 {
                    return Err(Error::Divergent(format!(
                        "power law tail sum of k^-{s} diverges"
                    )));
                }
                Ok(scale.powf(e) * hurwitz_zeta(s, n))
            }
            DiagonalSequence::Finite { values } => Ok(values
                .iter()
                .skip(n - 1)
                .map(|v| v.powf(e))
                .sum()),
        }
    }
}

/// `zeta(s, n) = sum_{k >= n} k^-s` for `s > 1`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, n: usize) -> f64 {
    assert!(s > 1.0 && n >= 1);
    // B_2j / (2j)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let cut = n.max(24);
    let head: f64 = (n..cut).map(|k| (k as f64).powf(-s)).sum();
    let x = cut as f64;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s+2j)
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        if j > 0 {
            let m = 2.0 * j as f64;
            rising *= (s + m - 1.0) * (s + m);
            power /= x * x;
        }
        tail += b * rising * power;
    }
    head + tail
}

fn check_exponents(p: Exponent, q: Exponent) -> Result<f64> {
    let d = q.recip() - p.recip();
    if d <= 0.0 {
        return Err(Error::Domain(format!(
            "diagonal tail requires q < p, got p = {p}, q = {q}"
        )));
    }
    Ok(d)
}

/// `omega_n = (sum_{k >= n} sigma_k^(pq/(p-q)))^(1/q - 1/p)`.
pub fn kuhn_omega(sigma: &DiagonalSequence, p: Exponent, q: Exponent, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    sigma.validate()?;
    let d = check_exponents(p, q)?;
    let sum = sigma.tail_power_sum(1.0 / d, n)?;
    Ok(sum.powf(d))
}

/// Smallest `C` with `omega_n <= C omega_{2n}` for all `n <= max_n`.
///
/// Indices where `omega_{2n} = 0` are skipped; if no finite ratio exists the
/// result is infinite.
pub fn check_doubling(
    sigma: &DiagonalSequence,
    p: Exponent,
    q: Exponent,
    max_n: usize,
) -> Result<f64> {
    let mut worst: Option<f64> = None;
    for n in 1..=max_n {
        let num = kuhn_omega(sigma, p, q, n)?;
        let den = kuhn_omega(sigma, p, q, 2 * n)?;
        if den > 0.0 {
            let r = num / den;
            worst = Some(worst.map_or(r, |w: f64| w.max(r)));
        }
    }
    Ok(worst.unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_examples() {
        let s = DiagonalSequence::Geometric { scale: 1.0, ratio: 0.5 };
        assert!((kuhn_omega(&s, Exponent::INF, Exponent::ONE, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((kuhn_omega(&s, Exponent::INF, Exponent::ONE, 3).unwrap() - 0.25).abs() < 1e-15);
        assert!((check_doubling(&s, Exponent::INF, Exponent::ONE, 8).unwrap() - 256.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_two() {
        let z = hurwitz_zeta(2.0, 1);
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        let z3 = hurwitz_zeta(3.0, 1);
        assert!((z3 - 1.202_056_903_159_594_2).abs() < 1e-14);
    }

    #[test]
    fn finite_support() {
        let s = DiagonalSequence::Finite { values: vec![1.0] };
        assert_eq!(kuhn_omega(&s, Exponent::TWO, Exponent::ONE, 2).unwrap(), 0.0);
        let c = DiagonalSequence::Finite { values: vec![1.0; 10] };
        let r = check_doubling(&c, Exponent::TWO, Exponent::ONE, 2).unwrap();
        assert!(r.is_finite() && r > 1.0);
    }

    #[test]
    fn errors() {
        let s = DiagonalSequence::Geometric { scale: 1.0, ratio: 1.0 };
        assert!(matches!(kuhn_omega(&s, Exponent::INF, Exponent::ONE, 1), Err(Error::Divergent(_))));
        let h = DiagonalSequence::PowerLaw { scale: 1.0, exponent: 1.0 };
        assert!(kuhn_omega(&h, Exponent::INF, Exponent::ONE, 1).is_err());
        let g = DiagonalSequence::Geometric { scale: 1.0, ratio: 0.5 };
        assert!(kuhn_omega(&g, Exponent::ONE, Exponent::TWO, 1).is_err());
    }
}

//! Combining entropy bounds of operators.

use super::kuhn::{kuhn_omega, DiagonalSequence};
use super::oracle::EntropyInterval;
use crate::error::{Error, Result};
use crate::spaces::Exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// Bounds on `e_1, ..., e_K` of one operator.
///
/// Entropy numbers are nonincreasing, so upper bounds are replaced by their
/// running minimum and lower bounds by the running maximum taken from the end.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSequence {
    values: Vec<f64>,
    kind: BoundKind,
}

impl BoundSequence {
    pub fn upper(mut values: Vec<f64>) -> Self {
        for i in 1..values.len() {
            values[i] = values[i].min(values[i - 1]);
        }
        BoundSequence {
            values,
            kind: BoundKind::Upper,
        }
    }

    pub fn lower(mut values: Vec<f64>) -> Self {
        for i in (0..values.len().saturating_sub(1)).rev() {
            values[i] = values[i].max(values[i + 1]);
        }
        BoundSequence {
            values,
            kind: BoundKind::Lower,
        }
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The bound at index `k` (1-based).
    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

fn require_upper(a: &BoundSequence) -> Result<()> {
    if a.kind != BoundKind::Upper {
        return Err(Error::Domain("bound calculus expects upper bounds".into()));
    }
    Ok(())
}

/// Splits `k + l - 1 = m` with both indices in range.
fn splits(m: usize, ka: usize, kb: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=ka.min(m)).filter_map(move |k| {
        let l = m + 1 - k;
        (l >= 1 && l <= kb).then_some((k, l))
    })
}

/// Upper bounds for `e_m(S + T)` from `e_{k+l-1}(S+T) <= e_k(S) + e_l(T)`.
pub fn bound_sum(a: &BoundSequence, b: &BoundSequence) -> Result<BoundSequence> {
    require_upper(a)?;
    require_upper(b)?;
    let len = a.len().max(b.len());
    let values = (1..=len)
        .map(|m| {
            splits(m, a.len(), b.len())
                .map(|(k, l)| a.values[k - 1] + b.values[l - 1])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(BoundSequence::upper(values))
}

/// Upper bounds for `e_m(S T)` from `e_m(ST) <= ||S|| e_m(T)`,
/// `e_m(ST) <= e_m(S) ||T||` and `e_{k+l-1}(ST) <= e_k(S) e_l(T)`.
pub fn bound_compose(
    a: &BoundSequence,
    b: &BoundSequence,
    norm_s: f64,
    norm_t: f64,
) -> Result<BoundSequence> {
    require_upper(a)?;
    require_upper(b)?;
    let len = a.len().max(b.len());
    let values = (1..=len)
        .map(|m| {
            let mut c = splits(m, a.len(), b.len())
                .map(|(k, l)| a.values[k - 1] * b.values[l - 1])
                .fold(f64::INFINITY, f64::min);
            if let Some(bm) = b.get(m) {
                c = c.min(norm_s * bm);
            }
            if let Some(am) = a.get(m) {
                c = c.min(norm_t * am);
            }
            c
        })
        .collect();
    Ok(BoundSequence::upper(values))
}

/// Entropy bound for an operator approximated by a finite family: returns
/// `(n + floor(log2 |family|) + 1, per_member + approx_error)`.
pub fn family_bound(
    per_member: f64,
    n: usize,
    family_size: usize,
    approx_error: f64,
) -> Result<(usize, f64)> {
    if family_size == 0 {
        return Err(Error::Domain("family must be nonempty".into()));
    }
    if !(approx_error >= 0.0) {
        return Err(Error::Domain(format!(
            "approximation error {approx_error} must be >= 0"
        )));
    }
    let log = (usize::BITS - 1 - family_size.leading_zeros()) as usize;
    Ok((n + log + 1, per_member + approx_error))
}

/// A lower estimate that is either certified or only correct in order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerEstimate {
    pub value: f64,
    pub certified: bool,
}

/// `min(block_norms) * L` where `L` is a certified lower bound for
/// `e_n(I_m : l_p^m -> l_q^m)`.
pub fn block_lower_bound(block_norms: &[f64], n: usize, identity: &EntropyInterval) -> Result<f64> {
    if block_norms.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    if identity.k != n {
        return Err(Error::Domain(format!(
            "identity bracket is for k = {}, expected {n}",
            identity.k
        )));
    }
    let m = block_norms.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(m * identity.lower)
}

/// The tail quantity `(sum_{j >= n} M_j^(pq/(p-q)))^(1/q-1/p)`, which bounds
/// `e_n` from below only up to an unknown constant.
pub fn tail_lower_bound(
    block_norms: &DiagonalSequence,
    p: Exponent,
    q: Exponent,
    n: usize,
) -> Result<LowerEstimate> {
    Ok(LowerEstimate {
        value: kuhn_omega(block_norms, p, q, n)?,
        certified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_examples() {
        let a = BoundSequence::upper(vec![1.0, 0.5, 0.25]);
        let c = bound_sum(&a, &a).unwrap();
        // splits (1, 3), (2, 2), (3, 1) give 1.25, 1.0, 1.25
        assert_eq!(c.get(3), Some(1.0));
        let zero = BoundSequence::upper(vec![0.0; 3]);
        assert_eq!(bound_sum(&a, &zero).unwrap().values(), a.values());
        let one = BoundSequence::upper(vec![1.0]);
        assert_eq!(bound_sum(&one, &one).unwrap().values(), &[2.0]);
    }

    #[test]
    fn compose_examples() {
        let a = BoundSequence::upper(vec![1.0, 0.5]);
        let c = bound_compose(&a, &a, 1.0, 1.0).unwrap();
        assert_eq!(c.values(), &[1.0, 0.5]);
        let a3 = BoundSequence::upper(vec![1.0, 0.5, 1.0]);
        assert!(bound_compose(&a3, &a3, 10.0, 10.0).unwrap().get(3).unwrap() <= 0.25);
        let z = bound_compose(&a, &a, 1.0, 0.0).unwrap();
        assert!(z.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn family_examples() {
        assert_eq!(family_bound(0.5, 3, 1, 0.0).unwrap(), (4, 0.5));
        let (i, b) = family_bound(0.5, 3, 8, 0.1).unwrap();
        assert_eq!(i, 7);
        assert!((b - 0.6).abs() < 1e-15);
        assert_eq!(family_bound(0.0, 3, 2, 0.3).unwrap(), (5, 0.3));
    }

    #[test]
    fn normalisation() {
        let u = BoundSequence::upper(vec![1.0, 2.0, 0.5]);
        assert_eq!(u.values(), &[1.0, 1.0, 0.5]);
        let l = BoundSequence::lower(vec![0.1, 0.3, 0.2]);
        assert_eq!(l.values(), &[0.3, 0.3, 0.2]);
    }
}

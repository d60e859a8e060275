use serde::Serialize;

use super::norms::{norm_estimate, norm_exact, DEFAULT_RESTARTS};
use super::SummationOperator;
use crate::entropy::{block_lower_bound, entropy_oracle, mesh_for_budget, schutt_envelope, OperatorMatrix};
use crate::error::{Error, Result};

/// Net budget for the identity oracle used by the block bound.
const IDENTITY_NET_POINTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockLowerBound {
    pub value: f64,
    /// False when the identity factor comes from the order envelope.
    pub certified: bool,
    /// Smallest norm among the chosen blocks.
    pub min_block_norm: f64,
    /// Roots of the chosen pairwise incomparable subtrees.
    pub vertices: Vec<usize>,
    /// The factor standing for `e_n(I_m)`.
    pub identity_factor: f64,
}

/// Norm of the subtree operator at every vertex (a certified lower bound
/// where no exact formula applies).
fn subtree_norms(s: &SummationOperator) -> Result<Vec<f64>> {
    (0..s.len())
        .map(|v| {
            let (sub, _) = s.restrict(v)?;
            match norm_exact(&sub) {
                Ok(x) => Ok(x),
                Err(Error::UnsupportedRegime(_)) => {
                    Ok(norm_estimate(&sub, DEFAULT_RESTARTS, v as u64).value)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Leaves of the ancestor-closed vertex set `{v : norm(v) >= t}`, in preorder.
fn top_leaves(s: &SummationOperator, norms: &[f64], t: f64) -> Vec<usize> {
    let tree = s.tree();
    tree.preorder()
        .iter()
        .copied()
        .filter(|&v| norms[v] >= t && tree.children(v).iter().all(|&c| norms[c] < t))
        .collect()
}

/// Lower bound for `e_n(S)` from `m` pairwise incomparable subtrees.
///
/// The subtrees carry disjoint diagonal blocks of `S`, so
/// `e_n(S) >= M e_n(I_m : l_p^m -> l_q^m)` with `M` the smallest block norm.
/// The vertices are chosen to maximise `M`. For `m = 1` the identity factor
/// is `2^(1-n)`; for `m <= 4` it is the certified oracle lower bound; beyond
/// that the order envelope is used and the result is not certified.
pub fn entropy_lower_via_blocks(s: &SummationOperator, n: usize, m: usize) -> Result<BlockLowerBound> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("n and m must be positive".into()));
    }
    let norms = subtree_norms(s)?;
    // subtree norms decrease away from the root, so each threshold set is
    // ancestor-closed and its leaves form its largest antichain
    let mut thresholds = norms.clone();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let idx = thresholds.partition_point(|&t| top_leaves(s, &norms, t).len() < m);
    let Some(&t) = thresholds.get(idx) else {
        return Err(Error::NoIncomparableSet(m));
    };
    let vertices: Vec<usize> = top_leaves(s, &norms, t).into_iter().take(m).collect();
    let block_norms: Vec<f64> = vertices.iter().map(|&v| norms[v]).collect();
    let min_block_norm = block_norms.iter().copied().fold(f64::INFINITY, f64::min);

    let (identity_factor, certified) = if m == 1 {
        ((1.0 - n as f64).exp2(), true)
    } else if m <= 4 && n <= crate::entropy::oracle::MAX_ORACLE_K {
        let id = OperatorMatrix::identity(m, s.p, s.q)?;
        let mesh = mesh_for_budget(m, s.p, IDENTITY_NET_POINTS)?;
        let bracket = entropy_oracle(&id, n, mesh)?;
        let v = block_lower_bound(&block_norms, n, &bracket)?;
        return Ok(BlockLowerBound {
            value: v,
            certified: true,
            min_block_norm,
            vertices,
            identity_factor: bracket.lower,
        });
    } else {
        (schutt_envelope(s.p, s.q, m, n), false)
    };
    Ok(BlockLowerBound {
        value: min_block_norm * identity_factor,
        certified,
        min_block_norm,
        vertices,
        identity_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Exponent;
    use crate::tree::RootedTree;

    fn unit(tree: RootedTree, p: Exponent, q: Exponent) -> SummationOperator {
        let n = tree.len();
        SummationOperator::new(tree, vec![1.0; n], vec![1.0; n], p, q).unwrap()
    }

    #[test]
    fn star_uses_both_leaves() {
        let s = unit(RootedTree::star(2), Exponent::INF, Exponent::INF);
        let b = entropy_lower_via_blocks(&s, 1, 2).unwrap();
        assert_eq!(b.vertices, vec![1, 2]);
        assert_eq!(b.min_block_norm, 1.0);
        assert!(b.certified && b.value > 0.9 && b.value <= 1.0);
    }

    #[test]
    fn chain_has_no_pair() {
        let s = unit(RootedTree::chain(4).unwrap(), Exponent::ONE, Exponent::ONE);
        assert_eq!(entropy_lower_via_blocks(&s, 1, 2), Err(Error::NoIncomparableSet(2)));
    }

    #[test]
    fn single_block_is_one_dimensional() {
        let s = unit(RootedTree::chain(3).unwrap(), Exponent::ONE, Exponent::ONE);
        let b = entropy_lower_via_blocks(&s, 3, 1).unwrap();
        assert_eq!(b.vertices, vec![0]);
        assert_eq!(b.value, 3.0 * 0.25);
    }
}

//! Two-weighted summation operators `(S f)(xi) = w(xi) sum_{xi' <= xi} u(xi') f(xi')`.

mod blocks;
mod cj;
mod norms;

pub use blocks::{entropy_lower_via_blocks, BlockLowerBound};
pub use cj::{cj_band_experiment, cj_envelope, CjBand, CjCase, CjRow, WeightProfile};
pub use norms::{norm_bracket_l2, norm_estimate, norm_exact, NormEstimate, DEFAULT_RESTARTS};

use std::fmt::Write as _;

use crate::entropy::OperatorMatrix;
use crate::error::{Error, Result};
use crate::spaces::Exponent;
use crate::tree::RootedTree;

/// Largest vertex count for which a dense matrix is built.
pub const MAX_MATRIX_VERTICES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SummationOperator {
    tree: RootedTree,
    u: Vec<f64>,
    w: Vec<f64>,
    pub p: Exponent,
    pub q: Exponent,
}

impl SummationOperator {
    pub fn new(tree: RootedTree, u: Vec<f64>, w: Vec<f64>, p: Exponent, q: Exponent) -> Result<Self> {
        if u.len() != tree.len() || w.len() != tree.len() {
            return Err(Error::Domain(format!(
                "weights of length {} and {} for {} vertices",
                u.len(),
                w.len(),
                tree.len()
            )));
        }
        if u.iter().chain(&w).any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Domain("weights must be positive and finite".into()));
        }
        Ok(SummationOperator { tree, u, w, p, q })
    }

    /// Weights depending on the level only: vertex at level `j` gets
    /// `u_levels[j]`, `w_levels[j]`.
    pub fn levelwise(
        tree: RootedTree,
        u_levels: &[f64],
        w_levels: &[f64],
        p: Exponent,
        q: Exponent,
    ) -> Result<Self> {
        let depth = tree.depth();
        if u_levels.len() <= depth || w_levels.len() <= depth {
            return Err(Error::Domain(format!(
                "need level weights for levels 0..={depth}"
            )));
        }
        let u = (0..tree.len()).map(|v| u_levels[tree.level(v)]).collect();
        let w = (0..tree.len()).map(|v| w_levels[tree.level(v)]).collect();
        Self::new(tree, u, w, p, q)
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_exponents(&self, p: Exponent, q: Exponent) -> Self {
        SummationOperator {
            p,
            q,
            ..self.clone()
        }
    }

    pub fn scaled_u(&self, lambda: f64) -> Result<Self> {
        let u = self.u.iter().map(|x| x * lambda).collect();
        Self::new(self.tree.clone(), u, self.w.clone(), self.p, self.q)
    }

    pub fn scaled_w(&self, lambda: f64) -> Result<Self> {
        let w = self.w.iter().map(|x| x * lambda).collect();
        Self::new(self.tree.clone(), self.u.clone(), w, self.p, self.q)
    }

    /// `S f` by one prefix pass down the tree.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.len(), "dimension mismatch");
        let mut prefix = vec![0.0; self.len()];
        for &v in self.tree.preorder() {
            let above = self.tree.parent(v).map_or(0.0, |p| prefix[p]);
            prefix[v] = above + self.u[v] * f[v];
        }
        prefix.iter().zip(&self.w).map(|(s, w)| s * w).collect()
    }

    /// `S^T g`: `u(xi') sum_{xi >= xi'} w(xi) g(xi)`, by subtree sums.
    pub fn apply_adjoint(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.len(), "dimension mismatch");
        let mut below: Vec<f64> = g.iter().zip(&self.w).map(|(g, w)| g * w).collect();
        for &v in self.tree.preorder().iter().rev() {
            if let Some(p) = self.tree.parent(v) {
                below[p] += below[v];
            }
        }
        below.iter().zip(&self.u).map(|(b, u)| b * u).collect()
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        let n = self.len();
        if n > MAX_MATRIX_VERTICES {
            return Err(Error::SizeGuard(format!(
                "{n} vertices exceed the dense limit {MAX_MATRIX_VERTICES}"
            )));
        }
        let mut entries = vec![0.0; n * n];
        for xi in 0..n {
            let mut a = Some(xi);
            while let Some(anc) = a {
                entries[xi * n + anc] = self.w[xi] * self.u[anc];
                a = self.tree.parent(anc);
            }
        }
        OperatorMatrix::from_row_major(n, n, entries, self.p, self.q)
    }

    /// The operator on the subtree rooted at `v`, with inherited weights.
    /// Also returns the original id of every new vertex.
    pub fn restrict(&self, v: usize) -> Result<(SummationOperator, Vec<usize>)> {
        let (tree, map) = self.tree.extract_subtree(v)?;
        let u = map.iter().map(|&x| self.u[x]).collect();
        let w = map.iter().map(|&x| self.w[x]).collect();
        Ok((Self::new(tree, u, w, self.p, self.q)?, map))
    }

    /// Level weights `(u_j, w_j)` if the weights depend on the level only.
    pub fn level_weights(&self) -> Option<Vec<(f64, f64)>> {
        let mut levels: Vec<Option<(f64, f64)>> = vec![None; self.tree.depth() + 1];
        for v in 0..self.len() {
            let j = self.tree.level(v);
            match levels[j] {
                None => levels[j] = Some((self.u[v], self.w[v])),
                Some(uw) if uw != (self.u[v], self.w[v]) => return None,
                _ => {}
            }
        }
        levels.into_iter().collect()
    }

    /// Text dump: a `[tree]` section in the tree format followed by a
    /// `[weights]` section with lines `j u_j w_j`.
    pub fn dump(&self) -> Result<String> {
        let levels = self
            .level_weights()
            .ok_or_else(|| Error::Domain("dump needs levelwise weights".into()))?;
        let mut out = format!("# p = {}, q = {}\n[tree]\n", self.p, self.q);
        out.push_str(&self.tree.to_text());
        out.push_str("[weights]\n");
        for (j, (u, w)) in levels.iter().enumerate() {
            writeln!(out, "{j} {u:e} {w:e}").expect("string write");
        }
        Ok(out)
    }

    /// Inverse of [`SummationOperator::dump`].
    pub fn parse_dump(text: &str, p: Exponent, q: Exponent) -> Result<Self> {
        let tree_at = text
            .find("[tree]")
            .ok_or(Error::Parse { line: 0, msg: "missing [tree] section".into() })?;
        let weights_at = text
            .find("[weights]")
            .ok_or(Error::Parse { line: 0, msg: "missing [weights] section".into() })?;
        let tree = RootedTree::parse(&text[tree_at + "[tree]".len()..weights_at])?;
        let mut u_levels = Vec::new();
        let mut w_levels = Vec::new();
        for (i, line) in text[weights_at + "[weights]".len()..].lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = || Error::Parse {
                line: i,
                msg: format!("bad weight line `{line}`"),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 || f[0].parse::<usize>().ok() != Some(u_levels.len()) {
                return Err(err());
            }
            u_levels.push(f[1].parse::<f64>().map_err(|_| err())?);
            w_levels.push(f[2].parse::<f64>().map_err(|_| err())?);
        }
        Self::levelwise(tree, &u_levels, &w_levels, p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(tree: RootedTree) -> SummationOperator {
        let n = tree.len();
        SummationOperator::new(tree, vec![1.0; n], vec![1.0; n], Exponent::ONE, Exponent::ONE).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(unit(RootedTree::chain(3).unwrap()).apply(&[1.0; 3]), vec![1.0, 2.0, 3.0]);
        assert_eq!(unit(RootedTree::star(2)).apply(&[1.0; 3]), vec![1.0, 2.0, 2.0]);
        let s = SummationOperator::new(RootedTree::single(), vec![2.0], vec![3.0], Exponent::TWO, Exponent::TWO)
            .unwrap();
        assert_eq!(s.apply(&[1.5]), vec![9.0]);
        assert_eq!(s.to_matrix().unwrap().row(0), &[6.0]);
    }

    #[test]
    fn matrix_of_chain() {
        let m = unit(RootedTree::chain(2).unwrap()).to_matrix().unwrap();
        assert_eq!(m.row(0), &[1.0, 0.0]);
        assert_eq!(m.row(1), &[1.0, 1.0]);
    }

    #[test]
    fn adjoint_matches_transpose() {
        let t = RootedTree::full(2, 2).unwrap();
        let n = t.len();
        let u: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let w: Vec<f64> = (0..n).map(|i| 0.5 + 0.1 * i as f64).collect();
        let s = SummationOperator::new(t, u, w, Exponent::TWO, Exponent::TWO).unwrap();
        let m = s.to_matrix().unwrap();
        let g: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let a = s.apply_adjoint(&g);
        for (c, ac) in a.iter().enumerate() {
            let expect: f64 = (0..n).map(|r| m.get(r, c) * g[r]).sum();
            assert!((ac - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_round_trip() {
        let t = RootedTree::full(2, 2).unwrap();
        let s = SummationOperator::levelwise(t, &[1.0, 0.5, 0.25], &[2.0, 1.0 / 3.0, 0.1], Exponent::TWO, Exponent::ONE)
            .unwrap();
        let text = s.dump().unwrap();
        assert_eq!(SummationOperator::parse_dump(&text, s.p, s.q).unwrap(), s);
    }
}

//! Finite rooted trees with levels.

mod hset;
mod random;

pub use hset::{generate_hset_tree, verify_hset_condition, HSetProfile, HSetReport, HSetTree};
pub use random::random_tree;

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A rooted tree on vertices `0..V`.
///
/// A preorder (Euler tour) numbering is kept so that the subtree of `v` is the
/// contiguous preorder range `tin[v]..tout[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    children: Vec<Vec<usize>>,
    root: usize,
    preorder: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Vertices of each level, sorted by `tin`.
    by_level: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!("{} roots", roots.len())));
        }
        let root = roots[0];
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidTree(format!("parent {p} of {v} out of range")));
                }
                if p == v {
                    return Err(Error::InvalidTree(format!("vertex {v} is its own parent")));
                }
                children[p].push(v);
            }
        }

        let mut level = vec![0usize; n];
        let mut tin = vec![usize::MAX; n];
        let mut tout = vec![0usize; n];
        let mut preorder = Vec::with_capacity(n);
        // iterative DFS; children visited in increasing id order
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        tin[root] = 0;
        preorder.push(root);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < children[v].len() {
                let c = children[v][*next];
                *next += 1;
                level[c] = level[v] + 1;
                tin[c] = preorder.len();
                preorder.push(c);
                stack.push((c, 0));
            } else {
                tout[v] = preorder.len();
                stack.pop();
            }
        }
        if preorder.len() != n {
            return Err(Error::InvalidTree("parent map contains a cycle".into()));
        }
        let depth = level.iter().copied().max().unwrap_or(0);
        let mut by_level = vec![Vec::new(); depth + 1];
        for &v in &preorder {
            by_level[level[v]].push(v);
        }
        Ok(RootedTree {
            parent,
            level,
            children,
            root,
            preorder,
            tin,
            tout,
            by_level,
        })
    }

    pub fn single() -> Self {
        Self::from_parents(vec![None]).expect("valid")
    }

    /// A path `0 - 1 - ... - (n-1)` rooted at 0.
    pub fn chain(n: usize) -> Result<Self> {
        Self::from_parents((0..n).map(|v| v.checked_sub(1)).collect())
    }

    /// A root with `leaves` children.
    pub fn star(leaves: usize) -> Self {
        let parents = std::iter::once(None).chain((0..leaves).map(|_| Some(0))).collect();
        Self::from_parents(parents).expect("valid")
    }

    /// The complete `k`-ary tree of the given depth, numbered level by level.
    pub fn full(k: usize, depth: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidTree("branching must be positive".into()));
        }
        let mut parents = vec![None];
        let mut prev = 0..1;
        for _ in 0..depth {
            let start = parents.len();
            for p in prev.clone() {
                for _ in 0..k {
                    parents.push(Some(p));
                }
            }
            if parents.len() > 10_000_000 {
                return Err(Error::SizeGuard("complete tree too large".into()));
            }
            prev = start..parents.len();
        }
        Self::from_parents(parents)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Largest level present.
    pub fn depth(&self) -> usize {
        self.by_level.len() - 1
    }

    pub fn max_branching(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.by_level.iter().map(Vec::len).collect()
    }

    /// Vertices at level `j`, in preorder.
    pub fn level_vertices(&self, j: usize) -> &[usize] {
        self.by_level.get(j).map_or(&[], Vec::as_slice)
    }

    /// Vertices with parents before children.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.len() {
            Err(Error::UnknownVertex(v))
        } else {
            Ok(())
        }
    }

    /// Whether `a <= b` in the tree order, i.e. `a` lies on the path from the
    /// root to `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tin[b] < self.tout[a]
    }

    /// Number of descendants of `v` exactly `l` levels below it.
    pub fn descendants_at_depth(&self, v: usize, l: usize) -> Result<usize> {
        self.check(v)?;
        let Some(row) = self.by_level.get(self.level[v] + l) else {
            return Ok(0);
        };
        let lo = row.partition_point(|&u| self.tin[u] < self.tin[v]);
        let hi = row.partition_point(|&u| self.tin[u] < self.tout[v]);
        Ok(hi - lo)
    }

    /// Vertices of the subtree rooted at `v`, in preorder.
    pub fn subtree_at(&self, v: usize) -> Result<&[usize]> {
        self.check(v)?;
        Ok(&self.preorder[self.tin[v]..self.tout[v]])
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        self.tout[v] - self.tin[v]
    }

    /// The subtree at `v` as a tree of its own. Returns the tree and, for each
    /// new id, the original vertex.
    pub fn extract_subtree(&self, v: usize) -> Result<(RootedTree, Vec<usize>)> {
        let members = self.subtree_at(v)?.to_vec();
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, &u) in members.iter().enumerate() {
            new_id[u] = i;
        }
        let parents = members
            .iter()
            .map(|&u| {
                if u == v {
                    None
                } else {
                    self.parent[u].map(|p| new_id[p])
                }
            })
            .collect();
        Ok((RootedTree::from_parents(parents)?, members))
    }

    /// One line per vertex: `id parent level`, root parent `-1`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 16);
        for v in 0..self.len() {
            let p = self.parent[v].map_or(-1, |p| p as i64);
            writeln!(out, "{v} {p} {}", self.level[v]).expect("string write");
        }
        out
    }

    /// Inverse of [`RootedTree::to_text`]. Blank lines and `#` comments are
    /// skipped; ids must be `0..V` in order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parents = Vec::new();
        let mut levels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `id parent level`"));
            }
            let id: usize = fields[0].parse().map_err(|_| err("bad id"))?;
            let parent: i64 = fields[1].parse().map_err(|_| err("bad parent"))?;
            let level: usize = fields[2].parse().map_err(|_| err("bad level"))?;
            if id != parents.len() {
                return Err(err("ids must be consecutive from 0"));
            }
            parents.push(match parent {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                _ => return Err(err("negative parent")),
            });
            levels.push(level);
        }
        let tree = RootedTree::from_parents(parents)?;
        if let Some(v) = (0..tree.len()).find(|&v| tree.level[v] != levels[v]) {
            return Err(Error::InvalidTree(format!(
                "vertex {v} declares level {} but sits at level {}",
                levels[v], tree.level[v]
            )));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_counts() {
        let t = RootedTree::full(2, 4).unwrap();
        assert_eq!(t.len(), 31);
        assert_eq!(t.descendants_at_depth(0, 2).unwrap(), 4);
        let leaf = *t.level_vertices(4).first().unwrap();
        assert_eq!(t.descendants_at_depth(leaf, 1).unwrap(), 0);
        assert_eq!(t.subtree_at(0).unwrap().len(), 31);
        assert_eq!(t.level_sizes(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn rejects_bad_parent_maps() {
        assert!(RootedTree::from_parents(vec![]).is_err());
        assert!(RootedTree::from_parents(vec![None, None]).is_err());
        assert!(RootedTree::from_parents(vec![None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::from_parents(vec![None, Some(5)]).is_err());
        let t = RootedTree::single();
        assert!(matches!(t.descendants_at_depth(3, 0), Err(Error::UnknownVertex(3))));
    }

    #[test]
    fn text_round_trip() {
        let t = RootedTree::from_parents(vec![Some(2), Some(2), None, Some(0)]).unwrap();
        let s = t.to_text();
        assert!(s.starts_with("0 2 1\n"));
        assert_eq!(RootedTree::parse(&s).unwrap(), t);
        assert!(RootedTree::parse("0 -1 1\n").is_err());
        assert!(RootedTree::parse("0 -1 0\n1 0\n").is_err());
    }

    #[test]
    fn subtree_extraction() {
        let t = RootedTree::full(2, 3).unwrap();
        let (s, map) = t.extract_subtree(1).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(map[0], 1);
        assert!(map.iter().all(|&u| t.is_ancestor(1, u)));
        assert_eq!(s.level_sizes(), vec![1, 2, 4]);
    }
}

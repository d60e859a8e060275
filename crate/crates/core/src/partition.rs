//! Balanced partitions of bounded-branching trees into connected subtrees.
//!
//! The weight of a vertex set is the sum of per-vertex weights `phi`. A sweep
//! from the leaves up with threshold `T = Phi(V) / n` produces parts that are
//! either single heavy vertices or carry weight at most `T`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::RootedTree;

/// Result of [`partition_balanced`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancedPartitionReport {
    /// Part index of every vertex.
    pub part_of: Vec<usize>,
    /// Members of each part in preorder; the first member is the part root.
    pub parts: Vec<Vec<usize>>,
    pub n: usize,
    pub k: usize,
    pub parts_count: usize,
    pub max_nonsingleton_phi: f64,
    pub phi_total: f64,
    /// `parts_count / n`.
    pub witness_c: f64,
}

fn check_weights(tree: &RootedTree, phi: &[f64]) -> Result<f64> {
    if phi.len() != tree.len() {
        return Err(Error::Domain(format!(
            "{} weights for {} vertices",
            phi.len(),
            tree.len()
        )));
    }
    if phi.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::Domain("vertex weights must be finite and >= 0".into()));
    }
    let total: f64 = phi.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(total)
}

/// One leaves-up sweep. Vertices flagged in `forced` start a part no matter
/// what, and a vertex never merges with a child that is forced, so the result
/// refines the partition given by `forced`. Returns the new root flags.
fn sweep(tree: &RootedTree, phi: &[f64], threshold: f64, forced: &[bool]) -> Vec<bool> {
    let mut is_root = forced.to_vec();
    // weight of the unfinished component hanging at v; None once closed
    let mut pending: Vec<Option<f64>> = vec![None; tree.len()];
    for &v in tree.preorder().iter().rev() {
        let open = tree.children(v).iter().copied().filter(|&c| !forced[c]);
        if phi[v] > threshold {
            is_root[v] = true;
            for c in tree.children(v) {
                is_root[*c] = true;
            }
            continue;
        }
        let acc: f64 = phi[v] + open.clone().filter_map(|c| pending[c]).sum::<f64>();
        if acc > threshold {
            for c in open {
                if pending[c].is_some() {
                    is_root[c] = true;
                }
            }
            pending[v] = Some(phi[v]);
        } else {
            pending[v] = Some(acc);
        }
    }
    is_root[tree.root()] = true;
    is_root
}

fn report_from_roots(
    tree: &RootedTree,
    phi: &[f64],
    is_root: &[bool],
    n: usize,
    k: usize,
    total: f64,
) -> BalancedPartitionReport {
    let mut part_of = vec![usize::MAX; tree.len()];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &v in tree.preorder() {
        let idx = if is_root[v] {
            parts.push(Vec::new());
            parts.len() - 1
        } else {
            part_of[tree.parent(v).expect("non-root vertex has a parent")]
        };
        part_of[v] = idx;
        parts[idx].push(v);
    }
    let max_nonsingleton_phi = parts
        .iter()
        .filter(|p| p.len() > 1)
        .map(|p| p.iter().map(|&v| phi[v]).sum::<f64>())
        .fold(0.0, f64::max);
    let parts_count = parts.len();
    BalancedPartitionReport {
        part_of,
        parts,
        n,
        k,
        parts_count,
        max_nonsingleton_phi,
        phi_total: total,
        witness_c: parts_count as f64 / n as f64,
    }
}

/// Splits the tree into connected parts, each either a single vertex or of
/// weight at most `Phi(V) / n`.
pub fn partition_balanced(
    tree: &RootedTree,
    phi: &[f64],
    n: usize,
) -> Result<BalancedPartitionReport> {
    let total = check_weights(tree, phi)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let mut forced = vec![false; tree.len()];
    forced[tree.root()] = true;
    let roots = sweep(tree, phi, total / n as f64, &forced);
    Ok(report_from_roots(tree, phi, &roots, n, tree.max_branching().max(1), total))
}

/// Nested partitions for `n = 1, 2, 4, ..., 2^depth`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicChain {
    pub reports: Vec<BalancedPartitionReport>,
    /// Largest number of parts of the next finer partition met by one part.
    pub max_intersections: usize,
}

/// Each partition refines the previous one: every part is re-swept with the
/// halved threshold, so the family is nested.
pub fn dyadic_chain(tree: &RootedTree, phi: &[f64], depth: usize) -> Result<DyadicChain> {
    let total = check_weights(tree, phi)?;
    let k = tree.max_branching().max(1);
    let mut forced = vec![false; tree.len()];
    forced[tree.root()] = true;
    let mut reports = Vec::with_capacity(depth + 1);
    let mut max_intersections = 1;
    for i in 0..=depth {
        let n = 1usize << i;
        let roots = sweep(tree, phi, total / n as f64, &forced);
        let report = report_from_roots(tree, phi, &roots, n, k, total);
        if let Some(prev) = reports.last() {
            max_intersections = max_intersections.max(max_refinement_count(prev, &report));
        }
        reports.push(report);
        forced = roots;
    }
    Ok(DyadicChain {
        reports,
        max_intersections,
    })
}

/// Largest number of `fine` parts meeting a single `coarse` part.
pub fn max_refinement_count(coarse: &BalancedPartitionReport, fine: &BalancedPartitionReport) -> usize {
    let mut counts = vec![0usize; coarse.parts_count];
    for part in &fine.parts {
        let mut seen: Vec<usize> = part.iter().map(|&v| coarse.part_of[v]).collect();
        seen.sort_unstable();
        seen.dedup();
        for c in seen {
            counts[c] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

/// Whether every part of `fine` lies inside one part of `coarse`.
pub fn is_nested(coarse: &BalancedPartitionReport, fine: &BalancedPartitionReport) -> bool {
    fine.parts.iter().all(|part| {
        let c = coarse.part_of[part[0]];
        part.iter().all(|&v| coarse.part_of[v] == c)
    })
}

/// Outcome of an independent check of a partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCheck {
    pub pass: bool,
    pub violations: Vec<String>,
    pub parts_count: usize,
    pub max_nonsingleton_phi: f64,
    /// `(k + 2) Phi(V) / n`.
    pub phi_bound: f64,
    /// `(2k + 4) n`.
    pub count_bound: usize,
}

/// Recomputes, from the vertex sets alone, that `parts` is a partition into
/// connected subtrees, that non-singleton parts weigh at most
/// `(k + 2) Phi(V) / n`, that there are at most `(2k + 4) n` parts, and that
/// the succession relation between parts is a tree.
pub fn verify_partition_lemma(
    tree: &RootedTree,
    parts: &[Vec<usize>],
    phi: &[f64],
    n: usize,
    k: usize,
) -> PartitionCheck {
    let mut violations = Vec::new();
    let total: f64 = phi.iter().sum();
    let phi_bound = (k as f64 + 2.0) * total / n.max(1) as f64;
    let count_bound = (2 * k + 4) * n;

    if tree.max_branching() > k {
        violations.push(format!(
            "tree branching {} exceeds k = {k}",
            tree.max_branching()
        ));
    }
    let mut label = vec![usize::MAX; tree.len()];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            violations.push(format!("part {i} is empty"));
        }
        for &v in part {
            if v >= tree.len() {
                violations.push(format!("part {i} has unknown vertex {v}"));
            } else if label[v] != usize::MAX {
                violations.push(format!("vertex {v} lies in parts {} and {i}", label[v]));
            } else {
                label[v] = i;
            }
        }
    }
    if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
        violations.push(format!("vertex {v} is not covered"));
    }

    let mut roots = vec![usize::MAX; parts.len()];
    for (i, part) in parts.iter().enumerate() {
        let entry: Vec<usize> = part
            .iter()
            .copied()
            .filter(|&v| v < tree.len())
            .filter(|&v| tree.parent(v).is_none_or(|p| label[p] != i))
            .collect();
        if entry.len() != 1 {
            violations.push(format!("part {i} is disconnected ({} components)", entry.len()));
        } else {
            roots[i] = entry[0];
        }
    }

    let mut max_nonsingleton_phi = 0.0f64;
    for (i, part) in parts.iter().enumerate().filter(|(_, p)| p.len() > 1) {
        let w: f64 = part.iter().filter(|&&v| v < phi.len()).map(|&v| phi[v]).sum();
        max_nonsingleton_phi = max_nonsingleton_phi.max(w);
        if w > phi_bound * (1.0 + 1e-12) {
            violations.push(format!("part {i} weighs {w} > {phi_bound}"));
        }
    }
    if parts.len() > count_bound {
        violations.push(format!("{} parts > {count_bound}", parts.len()));
    }

    // succession: the part of parent(root) precedes the part
    if violations.is_empty() {
        let up: Vec<Option<usize>> = roots
            .iter()
            .map(|&r| tree.parent(r).map(|p| label[p]))
            .collect();
        let top = up.iter().filter(|u| u.is_none()).count();
        if top != 1 {
            violations.push(format!("succession relation has {top} top parts"));
        }
        for start in 0..parts.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(next) = up[cur] {
                cur = next;
                steps += 1;
                if steps > parts.len() {
                    violations.push(format!("succession cycle through part {start}"));
                    break;
                }
            }
        }
    }

    PartitionCheck {
        pass: violations.is_empty(),
        violations,
        parts_count: parts.len(),
        max_nonsingleton_phi,
        phi_bound,
        count_bound,
    }
}

/// One line per vertex: `id part_index`.
pub fn partition_to_text(part_of: &[usize]) -> String {
    let mut out = String::new();
    for (v, p) in part_of.iter().enumerate() {
        writeln!(out, "{v} {p}").expect("string write");
    }
    out
}

/// Inverse of [`partition_to_text`]; returns the parts as vertex lists.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut expected = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(err("expected `id part_index`"));
        };
        let v: usize = a.parse().map_err(|_| err("bad id"))?;
        let p: usize = b.parse().map_err(|_| err("bad part index"))?;
        if v != expected {
            return Err(err("ids must be consecutive from 0"));
        }
        expected += 1;
        if p >= parts.len() {
            parts.resize(p + 1, Vec::new());
        }
        parts[p].push(v);
    }
    Ok(parts)
}

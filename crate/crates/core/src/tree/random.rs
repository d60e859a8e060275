use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RootedTree;

/// Uniform attachment: vertex `i` picks its parent uniformly among earlier
/// vertices that still have fewer than `k` children.
pub fn random_tree(seed: u64, vertices: usize, k: usize) -> RootedTree {
    assert!(vertices >= 1 && k >= 1, "need at least one vertex and k >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parents = Vec::with_capacity(vertices);
    parents.push(None);
    let mut open = vec![0usize];
    let mut child_count = vec![0usize; vertices];
    for v in 1..vertices {
        let slot = rng.gen_range(0..open.len());
        let p = open[slot];
        parents.push(Some(p));
        child_count[p] += 1;
        if child_count[p] == k {
            open.swap_remove(slot);
        }
        open.push(v);
    }
    RootedTree::from_parents(parents).expect("attachment produces a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(random_tree(3, 1, 2).len(), 1);
        let chain = random_tree(7, 100, 1);
        assert_eq!(chain.depth(), 99);
        let t = random_tree(7, 1000, 3);
        assert!(t.max_branching() <= 3);
        assert_eq!(t, random_tree(7, 1000, 3));
        assert_ne!(t, random_tree(8, 1000, 3));
    }
}

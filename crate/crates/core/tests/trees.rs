use proptest::prelude::*;
use treentropy_core::partition::{
    dyadic_chain, is_nested, parse_partition, partition_balanced, partition_to_text, verify_partition_lemma,
};
use treentropy_core::slow::SlowFactor;
use treentropy_core::tree::{generate_hset_tree, random_tree, verify_hset_condition, HSetProfile, RootedTree};
use treentropy_core::Error;

/// Descendants at relative depth `l` by walking parent pointers.
fn brute_descendants(t: &RootedTree, v: usize, l: usize) -> usize {
    (0..t.len())
        .filter(|&x| {
            let mut a = x;
            for _ in 0..l {
                match t.parent(a) {
                    Some(p) => a = p,
                    None => return false,
                }
            }
            a == v && t.level(x) == t.level(v) + l
        })
        .count()
}

#[test]
fn binary_tree_meets_the_linear_profile_exactly() {
    let profile = HSetProfile::power(1.0);
    let g = generate_hset_tree(&profile, 4).unwrap();
    assert_eq!(g.tree, RootedTree::full(2, 4).unwrap());
    let r = verify_hset_condition(&g.tree, &profile, 1000).unwrap();
    assert!(r.pass);
    assert_eq!((r.max_ratio, r.min_ratio), (1.0, 1.0));
}

#[test]
fn logarithmic_profile_grows_slowly() {
    let profile = HSetProfile::new(0.0, -1.0, SlowFactor::Const, 1, 2.0, 0.25).unwrap();
    let g = generate_hset_tree(&profile, 12).unwrap();
    let sizes = g.tree.level_sizes();
    assert!(sizes.windows(2).all(|w| w[1] >= w[0]));
    // targets are linear in j, far below any power 2^(c j)
    assert!(sizes[12] <= 8, "{sizes:?}");
    assert!(verify_hset_condition(&g.tree, &profile, 2000).unwrap().pass);
}

#[test]
fn hset_rejects_a_chain_against_the_binary_profile() {
    let chain = RootedTree::chain(6).unwrap();
    let r = verify_hset_condition(&chain, &HSetProfile::power(1.0), 100).unwrap();
    assert!(!r.pass);
}

#[test]
fn chain_of_ten_splits_in_halves() {
    let t = RootedTree::chain(10).unwrap();
    let phi = vec![1.0; 10];
    let r = partition_balanced(&t, &phi, 2).unwrap();
    assert_eq!(r.parts, vec![(0..5).collect::<Vec<_>>(), (5..10).collect()]);
    assert!(verify_partition_lemma(&t, &r.parts, &phi, 2, 1).pass);
}

#[test]
fn dyadic_cascades_on_small_trees() {
    let chain = RootedTree::chain(16).unwrap();
    let c = dyadic_chain(&chain, &[1.0; 16], 2).unwrap();
    for w in c.reports.windows(2) {
        assert!(is_nested(&w[0], &w[1]));
    }
    let binary = RootedTree::full(2, 4).unwrap();
    let phi = vec![1.0; binary.len()];
    let c = dyadic_chain(&binary, &phi, 3).unwrap();
    for r in &c.reports {
        assert!(verify_partition_lemma(&binary, &r.parts, &phi, r.n, 2).pass);
    }
    assert!(c.max_intersections <= 2 * 2 + 4);
}

#[test]
fn zero_weight_is_rejected() {
    let t = RootedTree::chain(3).unwrap();
    assert_eq!(partition_balanced(&t, &[0.0; 3], 1).unwrap_err(), Error::ZeroWeight);
}

fn tree_and_weights() -> impl Strategy<Value = (RootedTree, Vec<f64>, usize)> {
    (any::<u64>(), 1usize..400, prop_oneof![Just(1usize), Just(2), Just(3), Just(5)], 0u32..9).prop_flat_map(
        |(seed, v, k, log_n)| {
            let t = random_tree(seed, v, k);
            (Just(t), prop::collection::vec(0.0f64..3.0, v), Just(1usize << log_n))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_trees_respect_branching(seed in any::<u64>(), v in 1usize..2000, k in 1usize..6) {
        let t = random_tree(seed, v, k);
        prop_assert_eq!(t.len(), v);
        prop_assert!(t.max_branching() <= k);
        prop_assert_eq!(random_tree(seed, v, k), t);
    }

    #[test]
    fn generated_trees_meet_their_profile(theta in 0.0f64..1.5, gamma in -2.0f64..0.0, nu in -1.0f64..0.0, depth in 0usize..12) {
        let profile = HSetProfile::new(theta, gamma, SlowFactor::log_power(nu), 1, 2.0, 0.25).unwrap();
        let g = generate_hset_tree(&profile, depth).unwrap();
        prop_assert_eq!(g.tree.depth(), depth);
        let r = verify_hset_condition(&g.tree, &profile, 1 << 14).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>(), v in 1usize..200) {
        let t = random_tree(seed, v, 3);
        prop_assert_eq!(RootedTree::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn descendant_counts(seed in any::<u64>(), v in 1usize..120, pick in any::<prop::sample::Index>(), l in 0usize..5) {
        let t = random_tree(seed, v, 3);
        let x = pick.index(v);
        prop_assert_eq!(t.descendants_at_depth(x, l).unwrap(), brute_descendants(&t, x, l));
        let sub = t.subtree_at(x).unwrap();
        prop_assert!(sub.iter().all(|&y| t.is_ancestor(x, y)));
        prop_assert_eq!(sub.len(), (0..v).filter(|&y| t.is_ancestor(x, y)).count());
    }

    #[test]
    fn balanced_partitions_are_valid((t, mut phi, n) in tree_and_weights()) {
        phi[0] += 1.0;
        let r = partition_balanced(&t, &phi, n).unwrap();
        let k = t.max_branching().max(1);
        let check = verify_partition_lemma(&t, &r.parts, &phi, n, k);
        prop_assert!(check.pass, "{:?}", check.violations);
        prop_assert!(r.parts_count <= (2 * k + 4) * n);
        let parsed = parse_partition(&partition_to_text(&r.part_of)).unwrap();
        prop_assert_eq!(parsed.len(), r.parts_count);
    }

    #[test]
    fn dyadic_chains_nest((t, mut phi, _n) in tree_and_weights(), depth in 0usize..6) {
        phi[0] += 1.0;
        let c = dyadic_chain(&t, &phi, depth).unwrap();
        let k = t.max_branching().max(1);
        for w in c.reports.windows(2) {
            prop_assert!(is_nested(&w[0], &w[1]));
        }
        for r in &c.reports {
            prop_assert!(verify_partition_lemma(&t, &r.parts, &phi, r.n, k).pass);
        }
        prop_assert!(c.max_intersections <= 2 * k + 4);
    }
}

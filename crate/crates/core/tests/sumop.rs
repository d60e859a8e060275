use proptest::prelude::*;
use treentropy_core::entropy::{entropy_oracle, norm_upper_bound};
use treentropy_core::slow::SlowFactor;
use treentropy_core::spaces::lp_norm;
use treentropy_core::sumop::{
    cj_band_experiment, cj_envelope, entropy_lower_via_blocks, norm_estimate, norm_exact, CjCase,
    SummationOperator, WeightProfile,
};
use treentropy_core::tree::{generate_hset_tree, random_tree, HSetProfile, RootedTree};
use treentropy_core::{Error, Exponent};

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn operator() -> impl Strategy<Value = SummationOperator> {
    (any::<u64>(), 1usize..40, 1usize..4).prop_flat_map(|(seed, v, k)| {
        let t = random_tree(seed, v, k);
        (
            Just(t),
            prop::collection::vec(0.05f64..3.0, v),
            prop::collection::vec(0.05f64..3.0, v),
        )
            .prop_map(|(t, u, w)| SummationOperator::new(t, u, w, Exponent::TWO, Exponent::TWO).unwrap())
    })
}

fn exact_regimes() -> Vec<(Exponent, Exponent)> {
    vec![
        (Exponent::ONE, Exponent::ONE),
        (Exponent::ONE, Exponent::TWO),
        (Exponent::ONE, Exponent::INF),
        (Exponent::INF, Exponent::ONE),
        (Exponent::INF, exp(3.0)),
        (Exponent::TWO, Exponent::TWO),
    ]
}

/// Largest column norm of the dense matrix: the norm from `l_1`.
fn dense_l1_norm(s: &SummationOperator) -> f64 {
    let m = s.to_matrix().unwrap();
    (0..m.cols()).map(|c| lp_norm(&m.column(c), s.q)).fold(0.0, f64::max)
}

#[test]
fn chain_of_three() {
    let t = RootedTree::chain(3).unwrap();
    let s = SummationOperator::new(t, vec![1.0; 3], vec![1.0; 3], Exponent::ONE, Exponent::ONE).unwrap();
    assert_eq!(s.apply(&[1.0; 3]), vec![1.0, 2.0, 3.0]);
    assert_eq!(norm_exact(&s).unwrap(), 3.0);
    assert_eq!(norm_exact(&s.with_exponents(Exponent::INF, Exponent::INF)).unwrap(), 3.0);
}

#[test]
fn estimate_stays_below_the_bound_outside_exact_regimes() {
    let t = random_tree(11, 10, 3);
    let u: Vec<f64> = (0..10).map(|i| 1.0 + 0.1 * i as f64).collect();
    let s = SummationOperator::new(t, u, vec![1.0; 10], exp(3.0), exp(1.5)).unwrap();
    assert!(matches!(norm_exact(&s), Err(Error::UnsupportedRegime(_))));
    let e = norm_estimate(&s, 32, 5);
    assert!(e.value <= norm_upper_bound(&s.to_matrix().unwrap()) * (1.0 + 1e-12));
    // the witness realises the reported value
    let ratio = lp_norm(&s.apply(&e.witness), s.q) / lp_norm(&e.witness, s.p);
    assert!((ratio - e.value).abs() <= 1e-9 * e.value);
}

#[test]
fn cj_case_examples() {
    let flat = |ku: f64, au: f64, kw: f64, aw: f64| WeightProfile {
        kappa_u: ku,
        alpha_u: au,
        rho_u: SlowFactor::Const,
        kappa_w: kw,
        alpha_w: aw,
        rho_w: SlowFactor::Const,
        m_star: 1,
    };
    // theta = 1, q = 2, kappa_w = 1 > 1/2, kappa = 1 > 0
    let (c, v) = cj_envelope(&flat(0.0, 0.5, 1.0, 0.0), &HSetProfile::power(1.0), Exponent::TWO, Exponent::TWO, 6).unwrap();
    assert_eq!(c, CjCase::One);
    assert!((v - 2f64.powi(-6) / 6f64.sqrt()).abs() < 1e-15);
    // theta = 2, q = 2, kappa_w = 1 = theta/q, p = 1
    let (c, v) = cj_envelope(&flat(0.5, 0.0, 1.0, 1.0), &HSetProfile::power(2.0), Exponent::ONE, Exponent::TWO, 6).unwrap();
    assert_eq!(c, CjCase::Three);
    assert!((v - 2f64.powf(-9.0) * 6f64.powf(-0.5)).abs() < 1e-15);
}

#[test]
fn equal_levels_give_equal_norms() {
    let h = HSetProfile::power(1.0);
    let g = generate_hset_tree(&h, 7).unwrap();
    let u: Vec<f64> = (0..=7).map(|j| (-0.5 * j as f64).exp2()).collect();
    let w: Vec<f64> = (0..=7).map(|j| (-(j as f64)).exp2()).collect();
    let s = SummationOperator::levelwise(g.tree, &u, &w, Exponent::ONE, Exponent::TWO).unwrap();
    for j in 1..7 {
        let level = s.tree().level_vertices(j);
        let a = norm_exact(&s.restrict(level[0]).unwrap().0).unwrap();
        let b = norm_exact(&s.restrict(level[level.len() - 1]).unwrap().0).unwrap();
        assert!((a - b).abs() <= 0.05 * a);
    }
}

#[test]
fn band_on_the_binary_profile() {
    let w = WeightProfile {
        kappa_u: 0.0,
        alpha_u: 0.0,
        rho_u: SlowFactor::Const,
        kappa_w: 1.5,
        alpha_w: 0.0,
        rho_w: SlowFactor::Const,
        m_star: 1,
    };
    let band = cj_band_experiment(&w, &HSetProfile::power(1.0), Exponent::ONE, Exponent::ONE, 2, 8, 3).unwrap();
    assert_eq!(band.case, CjCase::One);
    assert!(band.rows.iter().all(|r| r.exact));
    assert!(band.spread <= 10.0, "{band:?}");
}

#[test]
fn block_bounds_stay_below_oracle_uppers() {
    for seed in 0..6u64 {
        let t = random_tree(seed, 4, 2);
        let u: Vec<f64> = (0..4).map(|i| 0.5 + 0.25 * ((seed + i) % 3) as f64).collect();
        let s = SummationOperator::new(t, u, vec![1.0; 4], Exponent::INF, Exponent::INF).unwrap();
        let m = s.to_matrix().unwrap();
        for n in 1..=3 {
            let upper = entropy_oracle(&m, n, 0.25).unwrap().upper;
            match entropy_lower_via_blocks(&s, n, 2) {
                Ok(b) => assert!(b.value <= upper * (1.0 + 1e-9), "{b:?} vs {upper}"),
                Err(Error::NoIncomparableSet(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn apply_matches_the_matrix(s in operator(), f in prop::collection::vec(-2.0f64..2.0, 40)) {
        let f = &f[..s.len()];
        let m = s.to_matrix().unwrap();
        let dense = m.apply(f);
        for (a, b) in s.apply(f).iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn exact_norms_agree_with_estimates(s in operator()) {
        for (p, q) in exact_regimes() {
            let op = s.with_exponents(p, q);
            let x = norm_exact(&op).unwrap();
            let e = norm_estimate(&op, 16, 1).value;
            prop_assert!((e - x).abs() <= 1e-6 * x, "{} {}: {} vs {}", p, q, e, x);
            prop_assert!(x <= norm_upper_bound(&op.to_matrix().unwrap()) * (1.0 + 1e-9));
            if p == Exponent::ONE {
                prop_assert!((x - dense_l1_norm(&op)).abs() <= 1e-12 * x);
            }
        }
    }

    #[test]
    fn norms_are_homogeneous(s in operator(), lam in 0.1f64..10.0) {
        for (p, q) in exact_regimes() {
            let op = s.with_exponents(p, q);
            let x = norm_exact(&op).unwrap();
            let xu = norm_exact(&op.scaled_u(lam).unwrap()).unwrap();
            let xw = norm_exact(&op.scaled_w(lam).unwrap()).unwrap();
            prop_assert!((xu - lam * x).abs() <= 1e-9 * lam * x);
            prop_assert!((xw - lam * x).abs() <= 1e-9 * lam * x);
        }
    }

    #[test]
    fn restriction_never_increases_the_norm(s in operator(), pick in any::<prop::sample::Index>()) {
        let v = pick.index(s.len());
        for (p, q) in exact_regimes() {
            let op = s.with_exponents(p, q);
            let (sub, map) = op.restrict(v).unwrap();
            prop_assert_eq!(map[0], v);
            prop_assert!(norm_exact(&sub).unwrap() <= norm_exact(&op).unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn estimates_are_deterministic(s in operator(), seed in any::<u64>()) {
        let op = s.with_exponents(exp(3.0), exp(1.5));
        prop_assert_eq!(norm_estimate(&op, 8, seed), norm_estimate(&op, 8, seed));
    }
}

use approx::assert_relative_eq;
use proptest::prelude::*;
use treentropy_core::entropy::{
    bound_compose, bound_sum, check_doubling, entropy_oracle, entropy_oracle_range, family_bound,
    kuhn_omega, norm_upper_bound, schutt_envelope, tail_lower_bound, BoundSequence, DiagonalSequence,
    OperatorMatrix,
};
use treentropy_core::spaces::{lp_dist, lp_norm, unit_ball_net};
use treentropy_core::{Error, Exponent};

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn exponents() -> impl Strategy<Value = Exponent> {
    prop_oneof![Just(Exponent::ONE), Just(exp(1.5)), Just(Exponent::TWO), Just(exp(3.0)), Just(Exponent::INF)]
}

#[test]
fn grid_nets_of_the_square() {
    let net = unit_ball_net(2, Exponent::INF, 0.25).unwrap();
    assert!(net.len() >= 81);
    assert!(net.mesh <= 0.25);
    // every node of the 1/4 grid of [-1, 1]^2 is present
    for i in -4..=4 {
        for j in -4..=4 {
            let x = [i as f64 / 4.0, j as f64 / 4.0];
            assert!(net.points.iter().any(|v| lp_dist(v.coords(), &x, Exponent::INF) < 1e-12));
        }
    }
    let l1 = unit_ball_net(2, Exponent::ONE, 0.5).unwrap();
    assert!(l1.points.iter().all(|v| lp_norm(v.coords(), Exponent::ONE) <= 1.0 + 1e-12));
}

#[test]
fn square_tiling_brackets_one_half() {
    // four axis squares of side 1 cover [-1, 1]^2, and corners plus the
    // centre are five points at mutual distance 1
    let id = OperatorMatrix::identity(2, Exponent::INF, Exponent::INF).unwrap();
    let e = entropy_oracle(&id, 3, 0.02).unwrap();
    assert!(e.contains(0.5), "{e:?}");
    assert!(e.upper <= 0.5 + e.norm_bound * e.net_mesh + 1e-12);
}

#[test]
fn interval_law_in_one_dimension() {
    let id = OperatorMatrix::identity(1, Exponent::INF, Exponent::INF).unwrap();
    let range = entropy_oracle_range(&id, 1, 6, 0.005).unwrap();
    for e in range {
        let exact = (1.0 - e.k as f64).exp2();
        assert!(e.lower <= exact && exact <= e.upper, "{e:?}");
        assert!(e.width() <= 0.02);
    }
}

#[test]
fn oracle_preconditions() {
    let id = OperatorMatrix::identity(5, Exponent::ONE, Exponent::ONE).unwrap();
    assert!(matches!(entropy_oracle(&id, 1, 0.5), Err(Error::Scale(_))));
    let id = OperatorMatrix::identity(2, Exponent::ONE, Exponent::ONE).unwrap();
    assert!(matches!(entropy_oracle(&id, 0, 0.1), Err(Error::Scale(_))));
    assert!(matches!(entropy_oracle(&id, 13, 0.1), Err(Error::Scale(_))));
    assert!(matches!(entropy_oracle(&id, 1, 0.75), Err(Error::Scale(_))));
}

#[test]
fn schutt_examples() {
    assert_eq!(schutt_envelope(Exponent::ONE, Exponent::TWO, 16, 4), 1.0);
    assert_relative_eq!(schutt_envelope(Exponent::TWO, Exponent::ONE, 4, 4), 1.0, max_relative = 1e-15);
    assert_relative_eq!(schutt_envelope(Exponent::ONE, Exponent::INF, 8, 8), 0.125, max_relative = 1e-15);
}

fn zeta2_tail(n: usize) -> f64 {
    std::f64::consts::PI.powi(2) / 6.0 - (1..n).map(|k| (k as f64).powi(-2)).sum::<f64>()
}

#[test]
fn kuhn_frozen_values() {
    let inv_sq = DiagonalSequence::PowerLaw { scale: 1.0, exponent: 2.0 };
    // oracle: zeta(2) minus partial sums
    let oracle = (1..=4).map(|n| zeta2_tail(n) / zeta2_tail(2 * n)).fold(0.0, f64::max);
    assert_relative_eq!(oracle, 2.550_546_096_730_430_5, max_relative = 1e-12);
    let c = check_doubling(&inv_sq, Exponent::INF, Exponent::ONE, 4).unwrap();
    assert!((2.0..=4.0).contains(&c));
    assert_relative_eq!(c, 2.550_546_096_730_430_5, max_relative = 1e-10);

    let omega = kuhn_omega(&inv_sq, Exponent::INF, Exponent::ONE, 5).unwrap();
    assert_relative_eq!(omega, zeta2_tail(5), max_relative = 1e-12);
    assert_relative_eq!(omega, 0.221_322_955_737_115_25, max_relative = 1e-12);

    // sigma_k = 1/k from l_2 to l_1: (sum k^-2)^(1/2)
    let harmonic = DiagonalSequence::PowerLaw { scale: 1.0, exponent: 1.0 };
    let w = kuhn_omega(&harmonic, Exponent::TWO, Exponent::ONE, 1).unwrap();
    assert_relative_eq!(w, 1.282_549_830_161_864, max_relative = 1e-12);
}

#[test]
fn tail_lower_bound_examples() {
    let geo = DiagonalSequence::Geometric { scale: 1.0, ratio: 0.5 };
    let t = tail_lower_bound(&geo, Exponent::INF, Exponent::ONE, 2).unwrap();
    assert_relative_eq!(t.value, 0.5, max_relative = 1e-14);
    assert!(!t.certified);
    let inv_sq = DiagonalSequence::PowerLaw { scale: 1.0, exponent: 2.0 };
    let t = tail_lower_bound(&inv_sq, Exponent::INF, Exponent::ONE, 1).unwrap();
    assert_relative_eq!(t.value, std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-13);
}

#[test]
fn geometric_kuhn_matches_closed_form() {
    // sigma_k = s r^k from l_p to l_q: tail sum of (s r^k)^e is s^e r^(e n) / (1 - r^e)
    for (p, q) in [(Exponent::INF, Exponent::ONE), (Exponent::TWO, Exponent::ONE), (exp(4.0), Exponent::TWO)] {
        let d = q.recip() - p.recip();
        let e = 1.0 / d;
        for (s, r) in [(1.0, 0.5), (3.0, 0.9), (0.2, 0.1)] {
            let seq = DiagonalSequence::Geometric { scale: s, ratio: r };
            for n in [1usize, 2, 7, 30] {
                let closed = (s.powf(e) * r.powf(e * n as f64) / (1.0 - r.powf(e))).powf(d);
                let got = kuhn_omega(&seq, p, q, n).unwrap();
                assert_relative_eq!(got, closed, max_relative = 1e-12);
            }
        }
    }
}

#[test]
fn family_examples() {
    assert_eq!(family_bound(0.5, 1, 1, 0.0).unwrap(), (2, 0.5));
    let (i, b) = family_bound(0.5, 1, 8, 0.1).unwrap();
    assert_eq!(i, 5);
    assert_relative_eq!(b, 0.6);
}

fn small_matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, Exponent, Exponent)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(r, c)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, c), r),
            exponents(),
            exponents(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_axioms(x in prop::collection::vec(-10.0f64..10.0, 1..6), y in prop::collection::vec(-10.0f64..10.0, 6), lam in -5.0f64..5.0, p in exponents()) {
        let y = &y[..x.len()];
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert!(lp_norm(&sum, p) <= lp_norm(&x, p) + lp_norm(y, p) + 1e-9);
        let scaled: Vec<f64> = x.iter().map(|a| lam * a).collect();
        prop_assert!((lp_norm(&scaled, p) - lam.abs() * lp_norm(&x, p)).abs() <= 1e-9 * (1.0 + lp_norm(&scaled, p)));
        prop_assert!(lp_norm(&x, Exponent::INF) <= lp_norm(&x, Exponent::TWO) + 1e-12);
        prop_assert!(lp_norm(&x, Exponent::TWO) <= lp_norm(&x, Exponent::ONE) + 1e-12);
    }

    #[test]
    fn nets_cover_the_ball(pt in prop::collection::vec(-1.0f64..1.0, 2), p in exponents(), mesh in 0.1f64..0.5) {
        let n = lp_norm(&pt, p);
        let x: Vec<f64> = if n > 1.0 { pt.iter().map(|v| v / n).collect() } else { pt };
        let net = unit_ball_net(2, p, mesh).unwrap();
        prop_assert!(net.mesh <= mesh);
        let best = net.points.iter().map(|v| lp_dist(v.coords(), &x, p)).fold(f64::INFINITY, f64::min);
        prop_assert!(best <= net.mesh + 1e-12);
    }

    #[test]
    fn oracle_brackets_are_consistent((rows, p, q) in small_matrix(), lam in prop_oneof![Just(0.5), Just(2.0), Just(10.0)]) {
        let t = OperatorMatrix::new(rows, p, q).unwrap();
        let range = entropy_oracle_range(&t, 1, 3, 0.1).unwrap();
        let scaled = entropy_oracle_range(&t.scaled(lam), 1, 3, 0.1).unwrap();
        let bound = norm_upper_bound(&t);
        for (e, s) in range.iter().zip(&scaled) {
            prop_assert!(e.lower <= e.upper);
            prop_assert!(e.lower <= bound * (1.0 + 1e-12));
            prop_assert!((s.lower - lam * e.lower).abs() <= 1e-9 * (1.0 + s.lower));
            prop_assert!((s.upper - lam * e.upper).abs() <= 1e-9 * (1.0 + s.upper));
        }
    }

    #[test]
    fn bound_sequences_are_monotone(v in prop::collection::vec(0.0f64..5.0, 1..10)) {
        let u = BoundSequence::upper(v.clone());
        prop_assert!(u.values().windows(2).all(|w| w[1] <= w[0]));
        let l = BoundSequence::lower(v);
        prop_assert!(l.values().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn calculus_is_at_most_the_trivial_split(a in prop::collection::vec(0.0f64..5.0, 1..8), b in prop::collection::vec(0.0f64..5.0, 1..8)) {
        let a = BoundSequence::upper(a);
        let b = BoundSequence::upper(b);
        let s = bound_sum(&a, &b).unwrap();
        let c = bound_compose(&a, &b, 7.0, 3.0).unwrap();
        prop_assert_eq!(s.len(), a.len().max(b.len()));
        prop_assert!(s.get(1).unwrap() <= a.get(1).unwrap() + b.get(1).unwrap());
        prop_assert!(c.get(1).unwrap() <= a.get(1).unwrap() * b.get(1).unwrap());
    }
}

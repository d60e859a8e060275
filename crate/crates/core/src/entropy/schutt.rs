use crate::spaces::Exponent;

/// Order of `e_k(I_nu : l_p^nu -> l_q^nu)`, without constants.
///
/// For `p <= q` the three regimes are `k <= log nu`, `log nu < k <= nu` and
/// `k > nu`; boundary values of `k` go to the lower regime.
pub fn schutt_envelope(p: Exponent, q: Exponent, nu: usize, k: usize) -> f64 {
    assert!(nu >= 1 && k >= 1, "nu and k must be positive");
    let nu_f = nu as f64;
    let k_f = k as f64;
    let diff = q.recip() - p.recip();
    let tail = (-k_f / nu_f).exp2() * nu_f.powf(diff);
    if q < p {
        return tail;
    }
    if k_f <= nu_f.log2() {
        1.0
    } else if k <= nu {
        ((1.0 + nu_f / k_f).log2() / k_f).powf(-diff)
    } else {
        tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(schutt_envelope(Exponent::ONE, Exponent::TWO, 16, 4), 1.0);
        assert!((schutt_envelope(Exponent::TWO, Exponent::ONE, 4, 4) - 1.0).abs() < 1e-15);
        assert!((schutt_envelope(Exponent::ONE, Exponent::INF, 8, 8) - 0.125).abs() < 1e-15);
        // k > nu, p = q: pure exponential decay
        assert!((schutt_envelope(Exponent::TWO, Exponent::TWO, 2, 4) - 0.25).abs() < 1e-15);
    }
}

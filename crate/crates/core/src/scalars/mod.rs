//! The coefficient field C and commutative polynomials over it.

mod cpoly;
mod gauss;
mod scalar;

pub use cpoly::{gaussian_sqrt, gcd_shifted_coprime, roots_of, CPolynomial};
pub use scalar::{epsilon, re_cmp, re_less, reset_epsilon, set_epsilon, Backend, GaussRat, Scalar};

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn small_gaussian() -> impl Strategy<Value = Scalar> {
        (-6i64..=6, 1i64..=3, -3i64..=3)
            .prop_map(|(n, d, im)| &Scalar::from_ratio(n, d) + &(&Scalar::from_int(im) * &Scalar::i()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roots_reexpand(roots in prop::collection::vec(small_gaussian(), 1..=6)) {
            let p = CPolynomial::from_roots(&roots);
            let found = roots_of(&p).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            prop_assert_eq!(CPolynomial::from_roots(&found), p);
        }

        #[test]
        fn re_less_is_strict_weak_order(a in small_gaussian(), b in small_gaussian(), c in small_gaussian()) {
            prop_assert!(!re_less(&a, &a));
            if re_less(&a, &b) { prop_assert!(!re_less(&b, &a)); }
            if re_less(&a, &b) && re_less(&b, &c) { prop_assert!(re_less(&a, &c)); }
            // incomparability is transitive
            let inc = |x: &Scalar, y: &Scalar| !re_less(x, y) && !re_less(y, x);
            if inc(&a, &b) && inc(&b, &c) { prop_assert!(inc(&a, &c)); }
        }

        #[test]
        fn min_re_root_isolated_is_coprime(roots in prop::collection::vec(small_gaussian(), 2..=6)) {
            let mut sorted = roots.clone();
            sorted.sort_by(re_cmp);
            let g0 = CPolynomial::linear(&sorted[0]);
            let h0 = CPolynomial::from_roots(&sorted[1..]);
            prop_assert!(gcd_shifted_coprime(&g0, &h0, 1, &Scalar::one()).unwrap());
        }
    }
}

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diffset::covering::{cov_exact, ruzsa_cover, theorem_cover_certificate, CoverKind};
use diffset::equations::minimal_divisor_d;
use diffset::{RingCtx, Subset2D, SubsetZq};

fn ctx(q: u64) -> Arc<RingCtx> {
    RingCtx::shared(q).unwrap()
}

#[test]
fn inverse_interval_certificate_random_large_primes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for q in [17u64, 19] {
        let c = ctx(q);
        let mut asserted = 0;
        for _ in 0..100_000 {
            let mask: u64 = rng.gen_range(1..1 << q);
            let a = SubsetZq::from_elements(&c, (0..q).filter(|i| mask >> i & 1 == 1));
            let t = theorem_cover_certificate(&a);
            match t {
                Ok(t) if t.precondition_ok => {
                    asserted += 1;
                    assert!(t.certificate.verified, "{a}");
                }
                // k* reaches q only for sets too sparse for the precondition
                Ok(_) | Err(diffset::Error::NotAUnit { .. }) => {}
                Err(e) => panic!("{a}: {e}"),
            }
        }
        assert!(asserted > 50_000);
    }
}

fn subset(q: u64) -> impl Strategy<Value = SubsetZq> {
    proptest::collection::vec(0..q, 1..=q as usize).prop_map(move |v| SubsetZq::from_elements(&ctx(q), v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn literal_round_trip(q in 1u64..40, elems in proptest::collection::vec(0u64..1000, 0..20)) {
        let s = SubsetZq::from_elements(&ctx(q), elems);
        let back: SubsetZq = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn planar_literal_round_trip(q in 1u64..12, pts in proptest::collection::vec((0u64..12, 0u64..12), 0..20)) {
        let s = Subset2D::from_points(&ctx(q), pts).unwrap();
        let back: Subset2D = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn additive_cover_counting_bound(s in subset(14)) {
        let (k, cert) = cov_exact(&s, CoverKind::Additive).unwrap();
        prop_assert!(cert.verified);
        prop_assert!(k as u64 >= 14u64.div_ceil(s.len() as u64));
    }

    #[test]
    fn ruzsa_bound(s in subset(16)) {
        let c = ruzsa_cover(&s).unwrap();
        prop_assert!(c.verified);
        prop_assert!(c.x_set.len() as u64 <= 16u64.div_ceil(s.len() as u64));
    }

    #[test]
    fn minimal_d_monotone(a in subset(24), b in subset(24), extra in proptest::collection::vec(0u64..24, 0..6)) {
        let mut big = a.clone();
        for x in extra {
            big.insert(x);
        }
        let (d, product) = minimal_divisor_d(&a, &b).unwrap();
        let (d_big, _) = minimal_divisor_d(&big, &b).unwrap();
        prop_assert!(d_big <= d);
        prop_assert!(product.contains_dilated_ring(d).unwrap());
        prop_assert_eq!(24 % d, 0);
    }
}

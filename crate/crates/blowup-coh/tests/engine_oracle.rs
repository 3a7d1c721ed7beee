//! The recursive engine against the direct surface computation.

use blowup_coh::blowup::{proper_subsets, Catalog, TauSet};
use blowup_coh::divisor::{build_divisor, DivisorSpec, InvariantDivisor};
use blowup_coh::engine::{ladder_hypotheses, shift_spec, vanishing_bound, verify, Engine};
use blowup_coh::{oracle, Field};
use proptest::prelude::*;

fn spec_strategy(d: usize, lo: i64, hi: i64) -> impl Strategy<Value = DivisorSpec> {
    (prop::collection::vec(lo..=hi, d), prop::collection::vec(lo..=hi, d), prop::collection::vec(lo..=hi, d))
        .prop_map(|(abar, n, m)| DivisorSpec::new(abar, n, m).unwrap())
}

fn oracle_h(c: &InvariantDivisor, f: &Field) -> [i64; 3] {
    let cat = Catalog::new(f, c.d);
    let class = oracle::pic_class(&c.expand(&cat), f).unwrap();
    let (a, b, c) = oracle::h_all(&class, f).unwrap();
    [a, b, c]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shifting_keeps_every_coefficient(spec in (1usize..=4).prop_flat_map(|d| spec_strategy(d, -4, 4)), t in -5i64..=5) {
        let shifted = shift_spec(&spec, t);
        for sigma in proper_subsets(spec.d) {
            prop_assert_eq!(spec.coefficient(sigma), shifted.coefficient(sigma));
        }
    }

    #[test]
    fn euler_characteristic_matches_riemann_roch(
        q in prop::sample::select(vec![2u32, 3]),
        coeffs in prop::collection::vec(-3i64..=3, 6),
    ) {
        let f = Field::new(q).unwrap();
        let subsets = proper_subsets(2);
        let c = InvariantDivisor::from_fn(2, |s| coeffs[subsets.iter().position(|&t| t == s).unwrap()]);
        let cat = Catalog::new(&f, 2);
        let class = oracle::pic_class(&c.expand(&cat), &f).unwrap();
        let mut engine = Engine::new(q).unwrap();
        prop_assert_eq!(engine.euler_characteristic(&c), class.euler_characteristic(&f).unwrap());
    }

    #[test]
    fn certified_ladder_ranges_vanish_on_the_surface(spec in spec_strategy(2, -2, 2)) {
        prop_assume!(ladder_hypotheses(&spec).is_ok());
        let f = Field::new(2).unwrap();
        let mut engine = Engine::new(2).unwrap();
        if let Ok(cert) = engine.certify(&spec, None) {
            prop_assert!(verify(&cert).is_ok());
            let h = oracle_h(&InvariantDivisor::from_spec(&spec), &f);
            for t in vanishing_bound(&spec.abar) + 1..=2 {
                prop_assert_eq!(h[t], 0, "{:?}", spec);
            }
        }
    }

    #[test]
    fn certified_invariant_divisors_are_acyclic(coeffs in prop::collection::vec(-2i64..=2, 6)) {
        let f = Field::new(2).unwrap();
        let subsets = proper_subsets(2);
        let c = InvariantDivisor::from_fn(2, |s| coeffs[subsets.iter().position(|&t| t == s).unwrap()]);
        let mut engine = Engine::new(2).unwrap();
        if let Ok(cert) = engine.certify_invariant(&c, 1) {
            prop_assert!(verify(&cert).is_ok());
            let h = oracle_h(&c, &f);
            prop_assert_eq!([h[1], h[2]], [0, 0]);
        }
    }
}

#[test]
fn global_sections_match_the_surface_when_certified() {
    let f = Field::new(2).unwrap();
    let cat = Catalog::new(&f, 2);
    let mut engine = Engine::new(2).unwrap();
    let mut certified = 0;
    for a1 in -2..=0 {
        for a2 in -2..=0 {
            for (n1, m1) in [(-1, 0), (0, 0), (0, -1), (-1, -1)] {
                let spec = DivisorSpec::new(vec![a1, a2], vec![n1, 0], vec![m1, 0]).unwrap();
                let Ok((h0, cert)) = engine.h0_dim(&spec) else { continue };
                verify(&cert).unwrap();
                let class = oracle::pic_class(&build_divisor(&spec, &cat).unwrap(), &f).unwrap();
                assert_eq!(h0, oracle::h0(&class, &f).unwrap(), "{spec:?}");
                certified += 1;
            }
        }
    }
    assert!(certified >= 10, "only {certified} specs certified");
}

#[test]
fn projective_line_pieces_have_known_cohomology() {
    let f = Field::new(3).unwrap();
    let mut engine = Engine::new(3).unwrap();
    for k in -4i64..=4 {
        let c = InvariantDivisor::from_fn(1, |s| i64::from(s == TauSet::from_slice(&[0])) * k);
        let h = oracle_h_line(&c, &f);
        assert_eq!(engine.euler_characteristic(&c), h[0] - h[1], "k = {k}");
        assert_eq!(h, [(k + 1).max(0), (-k - 1).max(0)]);
    }
}

fn oracle_h_line(c: &InvariantDivisor, f: &Field) -> [i64; 2] {
    let cat = Catalog::new(f, 1);
    let class = oracle::pic_class(&c.expand(&cat), f).unwrap();
    let (a, b, _) = oracle::h_all(&class, f).unwrap();
    [a, b]
}

#[test]
fn certificates_serialize_with_their_claims() {
    let mut engine = Engine::new(2).unwrap();
    let spec = DivisorSpec::new(vec![1, 0], vec![0, 0], vec![0, 0]).unwrap();
    let cert = engine.certify(&spec, None).unwrap();
    let json = cert.to_json();
    assert_eq!(json["claim"]["vanishing_from"], 2);
    assert!(json["rule"].is_string());
    assert!(cert.node_count() >= 1);
}

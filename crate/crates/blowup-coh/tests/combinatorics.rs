//! Gaussian binomials, subspace enumeration and unipotent orbit counts.

use std::collections::BTreeSet;

use blowup_coh::blowup::{
    enumerate_u_tau, in_u_tau_sigma, proper_subsets, translated_coordinate_subspace, Catalog, TauSet,
};
use blowup_coh::engine::orbit_size;
use blowup_coh::qcomb::{enumerate_linear, gaussian_binomial, q_multinomial, SubspaceForm};
use blowup_coh::Field;
use proptest::prelude::*;

proptest! {
    #[test]
    fn gaussian_binomials_are_symmetric_and_satisfy_pascal(
        q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]),
        (n, k) in (2i64..=12).prop_flat_map(|n| (Just(n), 1..n)),
    ) {
        let g = |n, k| gaussian_binomial(n, k, q).unwrap();
        prop_assert_eq!(g(n, k), g(n, n - k));
        prop_assert_eq!(g(n, k), g(n - 1, k - 1) + (q as u128).pow(k as u32) * g(n - 1, k));
    }

    #[test]
    fn multinomials_ignore_block_order(q in 2u64..=5, mut blocks in prop::collection::vec(0usize..=3, 1..=4)) {
        let a = q_multinomial(&blocks, q).unwrap();
        blocks.reverse();
        prop_assert_eq!(a, q_multinomial(&blocks, q).unwrap());
    }
}

#[test]
fn out_of_range_binomials_are_rejected() {
    assert!(gaussian_binomial(3, 4, 2).is_err());
    assert!(gaussian_binomial(3, -1, 2).is_err());
    assert_eq!(gaussian_binomial(0, 0, 2).unwrap(), 1);
    assert!(gaussian_binomial(40, 20, 256).is_err());
}

#[test]
fn enumeration_finds_every_subspace_once() {
    for (q, max_n) in [(2, 4), (3, 3), (4, 3)] {
        let f = Field::new(q).unwrap();
        for n in 1..=max_n {
            for r in 0..=n {
                let subs = enumerate_linear(&f, n, r, 1 << 22).unwrap();
                let distinct: BTreeSet<&SubspaceForm> = subs.iter().collect();
                assert_eq!(distinct.len(), subs.len());
                assert_eq!(subs.len() as u128, gaussian_binomial(n as i64, r as i64, u64::from(q)).unwrap());
                assert!(subs.iter().all(|s| s.dim() == r && s.is_canonical(&f)));
            }
        }
    }
}

#[test]
fn unipotent_translates_sweep_each_orbit_freely() {
    for q in [2, 3] {
        let f = Field::new(q).unwrap();
        for d in 1..=3 {
            let cat = Catalog::new(&f, d);
            for tau in proper_subsets(d) {
                let group = enumerate_u_tau(&f, d, tau);
                assert!(group.iter().all(|u| in_u_tau_sigma(d, u, tau, TauSet::full(d))));
                let images: BTreeSet<SubspaceForm> =
                    group.iter().map(|u| translated_coordinate_subspace(&f, d, tau, u)).collect();
                assert_eq!(images.len(), group.len(), "q={q} d={d} tau={:?}", tau.members());
                assert_eq!(images.len() as u64, orbit_size(d, tau, q));
                let orbit: BTreeSet<SubspaceForm> = cat.orbit(tau).into_iter().cloned().collect();
                assert_eq!(images, orbit);
            }
            let total: u64 = proper_subsets(d).into_iter().map(|t| orbit_size(d, t, q)).sum();
            assert_eq!(total as usize, cat.len());
        }
    }
}

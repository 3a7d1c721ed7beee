//! Logarithmic forms: bases, ranks, the invariant forms and their divisors.

use blowup_coh::blowup::TauSet;
use blowup_coh::divisor::DivisorSpec;
use blowup_coh::engine::{verify, Engine};
use blowup_coh::logforms::{
    atau, gamma_poly, log_basis, log_basis_rank, log_basis_size, omega_s_identities, p_s, steinberg_dim, RatFunc,
    Sampling, SymbolicForm,
};
use blowup_coh::poly::Poly;
use blowup_coh::Field;
use proptest::prelude::*;

const BUDGET: u128 = 1 << 24;

#[test]
fn basis_enumeration_has_the_counted_size() {
    for q in [2, 3] {
        let f = Field::new(q).unwrap();
        for d in 1..=3 {
            for s in 0..=d {
                let basis = log_basis(s, d, &f).unwrap();
                assert_eq!(basis.len() as u128, log_basis_size(s, d, u64::from(q)).unwrap(), "q={q} d={d} s={s}");
            }
        }
    }
}

#[test]
fn basis_forms_are_linearly_independent() {
    for (q, d) in [(2, 3), (3, 2), (5, 1)] {
        let f = Field::new(q).unwrap();
        for s in 0..=d {
            let size = log_basis_size(s, d, u64::from(q)).unwrap();
            assert_eq!(log_basis_rank(s, d, &f).unwrap() as u128, size, "q={q} d={d} s={s}");
        }
    }
}

#[test]
fn graded_pieces_add_up_to_the_basis_size() {
    for q in [2, 3] {
        let mut engine = Engine::new(q).unwrap();
        for d in 1..=3 {
            for s in 0..=d {
                let mut total = 0i64;
                for tau in p_s(d, s) {
                    let spec = DivisorSpec::new(atau(tau, d).unwrap(), vec![0; d], vec![0; d]).unwrap();
                    let (h0, cert) = engine.h0_dim(&spec).unwrap();
                    verify(&cert).unwrap();
                    total += h0;
                }
                assert_eq!(total as u128, log_basis_size(s, d, u64::from(q)).unwrap(), "q={q} d={d} s={s}");
            }
        }
    }
}

#[test]
fn log_vectors_reject_the_origin_index() {
    assert!(atau(TauSet::from_slice(&[0, 1]), 2).is_err());
    assert!(atau(TauSet::from_slice(&[3]), 2).is_err());
    assert_eq!(atau(TauSet::from_slice(&[2]), 3).unwrap(), vec![0, -1, 0]);
}

#[test]
fn gamma_is_fixed_by_upper_unitriangular_substitutions() {
    let f = Field::new(3).unwrap();
    let d = 2;
    let one = Poly::constant(d, 1);
    for j in 1..=d {
        let g = gamma_poly(j, &f, d, BUDGET).unwrap();
        assert_eq!(g.degree(), Some(3u32.pow(j as u32)));
        let g = RatFunc::from_poly(g);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    // z_1 -> z_1 + a, z_2 -> z_2 + b z_1 + c
                    let z1 = Poly::linear(&f, &[1, 0], a);
                    let z2 = Poly::linear(&f, &[b, 1], c);
                    assert!(g.substitute(&f, &one, &[z1, z2]).same(&f, &g), "j={j} a={a} b={b} c={c}");
                }
            }
        }
    }
}

#[test]
fn plain_differentials_are_not_torus_invariant() {
    let f = Field::new(3).unwrap();
    let one = RatFunc::from_poly(Poly::constant(1, 1));
    let dz = SymbolicForm::monomial(&f, 1, &[1], one.clone());
    let t = vec![vec![1, 0], vec![0, 2]];
    assert!(!dz.act(&f, &t).same(&f, &dz));
    let log = SymbolicForm::monomial(&f, 1, &[1], RatFunc::new(&f, Poly::constant(1, 1), Poly::var(1, 0)).unwrap());
    assert!(log.act(&f, &t).same(&f, &log));
}

#[test]
fn invariant_forms_pass_every_identity_exhaustively() {
    for (q, d) in [(2, 3), (3, 2)] {
        let f = Field::new(q).unwrap();
        for s in 0..=d {
            let r = omega_s_identities(s, d, &f, Sampling::Exhaustive, BUDGET).unwrap();
            assert!(r.passed, "q={q} d={d} s={s}: {:?}", r.failures);
            assert_eq!(r.torus_elements, ((q - 1) as usize).pow(d as u32 + 1));
            assert_eq!(r.unipotent_elements, (q as usize).pow((d * (d + 1) / 2) as u32));
        }
    }
}

#[test]
fn invariant_forms_pass_seeded_identities() {
    let f = Field::new(3).unwrap();
    for s in 1..=3 {
        let sampling = Sampling::Seeded { count: 12, seed: 7 + s as u64 };
        let r = omega_s_identities(s, 3, &f, sampling, BUDGET).unwrap();
        assert!(r.passed, "s={s}: {:?}", r.failures);
        assert_eq!((r.torus_elements, r.unipotent_elements), (12, 12));
        assert!(r.divisor_rows.iter().all(|row| row.zero_pole <= row.bound));
    }
}

#[test]
fn degree_beyond_dimension_is_rejected() {
    let f = Field::new(2).unwrap();
    assert!(log_basis_size(3, 2, 2).is_err());
    assert!(omega_s_identities(3, 2, &f, Sampling::Exhaustive, BUDGET).is_err());
}

proptest! {
    #[test]
    fn steinberg_dimension_counts_log_forms(
        q in prop::sample::select(vec![2u64, 3, 4, 5, 7]),
        (d, s) in (1usize..=5).prop_flat_map(|d| (Just(d), 0..=d)),
    ) {
        let dim = steinberg_dim(d, q, s).unwrap();
        prop_assert_eq!(dim as u128, log_basis_size(s, d, q).unwrap());
        if s == d {
            prop_assert_eq!(dim, (q as i128).pow((d * (d + 1) / 2) as u32));
        }
        if s == 0 {
            prop_assert_eq!(dim, 1);
        }
    }
}

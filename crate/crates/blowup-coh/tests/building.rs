//! Apartment arithmetic, lattice neighbors and section complexes.

use blowup_coh::blowup::{is_stable, Catalog, TauSet};
use blowup_coh::building::{
    apartment_ball, apartment_identity_check, enumerate_n_eta, exponent_profile, lattice_stable, lattice_to_component,
    neighbors_of_standard, scaled_value, stability_corresponds, three_term_exactness, tree_star_triple,
    ApartmentVertex, CoefficientTriple, Coefficients, PointedSimplex, SpaceDescriptor,
};
use blowup_coh::engine::Engine;
use blowup_coh::qcomb::{enumerate_linear, gaussian_binomial, SubspaceForm};
use blowup_coh::weights::{derive_weight_data, Weight};
use blowup_coh::Field;
use proptest::prelude::*;

const BUDGET: u128 = 1 << 20;

fn weight(d: usize) -> impl Strategy<Value = Weight> {
    prop::collection::vec(-8i64..=8, d).prop_map(Weight::new)
}

fn weight_and_vertex() -> impl Strategy<Value = (Weight, Vec<i64>)> {
    (1usize..=4).prop_flat_map(|d| (weight(d), prop::collection::vec(-6i64..=6, d + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn diagonal_translation_adds_the_value_of_g((mu, x) in weight_and_vertex(), seed in any::<u64>()) {
        let g: Vec<i64> = (0..x.len()).map(|i| ((seed >> (4 * i)) & 15) as i64 - 8).collect();
        prop_assert!(apartment_identity_check(&mu, &g, &ApartmentVertex::new(x).unwrap()).unwrap());
    }

    #[test]
    fn exponents_are_the_shifted_ceilings((mu, x) in weight_and_vertex()) {
        let z = ApartmentVertex::new(x).unwrap();
        let p = exponent_profile(&mu, &z).unwrap();
        let den = z.coords().len() as i64;
        for (s, &e) in p.exponents.iter().enumerate() {
            let target = p.scaled_value - s as i64;
            prop_assert!(e * den >= target && (e - 1) * den < target);
        }
        prop_assert!(p.exponents.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
    }

    #[test]
    fn homothety_does_not_change_the_profile((mu, x) in weight_and_vertex(), t in -5i64..=5) {
        let shifted: Vec<i64> = x.iter().map(|c| c + t).collect();
        let a = exponent_profile(&mu, &ApartmentVertex::new(x).unwrap()).unwrap();
        let b = exponent_profile(&mu, &ApartmentVertex::new(shifted).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn subset_vertices_carry_the_summed_multiplicity((mu, _) in weight_and_vertex(), bits in any::<u32>()) {
        let d = mu.d();
        let sigma = TauSet(bits & ((1 << (d + 1)) - 1));
        let data = derive_weight_data(&mu);
        let expected: i64 = sigma.members().iter().map(|&j| data.abar_scaled[j]).sum();
        prop_assert_eq!(scaled_value(&mu, &ApartmentVertex::of_subset(d, sigma)).unwrap(), expected);
    }
}

#[test]
fn integral_weights_give_flat_profiles() {
    for mu in [vec![2, 1], vec![3, 0], vec![3, 1, 0], vec![0, 0, 0]] {
        let mu = Weight::new(mu);
        assert_eq!(derive_weight_data(&mu).delta_scaled, 0);
        for z in apartment_ball(mu.d(), 2) {
            let p = exponent_profile(&mu, &z).unwrap();
            assert_eq!(p.s_z, None);
            assert!(p.exponents.iter().all(|&e| e == p.exponents[0]), "{mu:?} at {:?}", z.coords());
        }
    }
}

#[test]
fn basis_steps_change_the_residue() {
    for d in 1..=3 {
        let side: Vec<i64> = (-2..=3).collect();
        for a in 0..side.len().pow(d as u32) {
            let mu = Weight::new((0..d).map(|i| side[a / side.len().pow(i as u32) % side.len()]).collect());
            if derive_weight_data(&mu).delta_scaled == 0 {
                continue;
            }
            for z in apartment_ball(d, 2) {
                let here = exponent_profile(&mu, &z).unwrap().s_z.unwrap();
                for n in z.basis_neighbors() {
                    assert_ne!(exponent_profile(&mu, &n).unwrap().s_z.unwrap(), here, "{mu:?} at {:?}", z.coords());
                }
            }
        }
    }
}

#[test]
fn two_coordinate_steps_can_keep_the_residue() {
    // |V| = 2 mod 4 on P^3, so moving two coordinates changes the value by a multiple of 4
    let mu = Weight::new(vec![1, 1, 0]);
    assert_eq!(derive_weight_data(&mu).delta_scaled, 2);
    let z = ApartmentVertex::standard(3);
    let step = ApartmentVertex::of_subset(3, TauSet::from_slice(&[1, 2]));
    assert_eq!(exponent_profile(&mu, &z).unwrap().s_z, exponent_profile(&mu, &step).unwrap().s_z);
}

#[test]
fn translation_length_must_match() {
    assert!(ApartmentVertex::standard(2).translate(&[1, 0]).is_err());
    assert!(ApartmentVertex::new(vec![]).is_err());
    assert!(scaled_value(&Weight::new(vec![1]), &ApartmentVertex::standard(2)).is_err());
}

#[test]
fn standard_neighbors_match_the_components() {
    for (q, d) in [(2, 1), (2, 2), (3, 2), (2, 3)] {
        let f = Field::new(q).unwrap();
        let cat = Catalog::new(&f, d);
        let nbrs = neighbors_of_standard(&f, d, BUDGET).unwrap();
        let expected: u128 = (1..=d as i64).map(|r| gaussian_binomial(d as i64 + 1, r, u64::from(q)).unwrap()).sum();
        assert_eq!(nbrs.len() as u128, expected);
        assert_eq!(nbrs.len(), cat.len());
        for n in &nbrs {
            assert_eq!(n.component.dim() + n.lattice.dim(), d + 1);
            assert_eq!(cat.tau_of(&n.component), Some(n.tau));
        }
        let mut comps: Vec<&SubspaceForm> = nbrs.iter().map(|n| &n.component).collect();
        comps.sort();
        comps.dedup();
        assert_eq!(comps.len(), nbrs.len());
    }
}

#[test]
fn lattice_and_component_stability_agree_on_small_sets() {
    let f = Field::new(2).unwrap();
    let lattices: Vec<SubspaceForm> =
        neighbors_of_standard(&f, 2, BUDGET).unwrap().into_iter().map(|n| n.lattice).collect();
    let mut checked = 0;
    for mask in 1u32..1 << lattices.len() {
        if mask.count_ones() > 3 {
            continue;
        }
        let set: Vec<SubspaceForm> =
            lattices.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect();
        assert!(stability_corresponds(&f, &set), "{set:?}");
        checked += 1;
    }
    assert_eq!(checked, 14 + 91 + 364);
}

#[test]
fn points_of_a_line_are_not_stable_but_the_line_with_them_is() {
    let f = Field::new(2).unwrap();
    let line = SubspaceForm::coordinate(3, &[0, 1]);
    let points: Vec<SubspaceForm> =
        enumerate_linear(&f, 3, 1, BUDGET).unwrap().into_iter().filter(|p| line.contains(&f, p)).collect();
    assert!(!lattice_stable(&f, &points[..2]));
    let mut with = points.clone();
    with.push(line.clone());
    let comps: Vec<SubspaceForm> = points.iter().map(|p| lattice_to_component(&f, p)).collect();
    assert!(!is_stable(&f, &comps[..2]));
    assert!(!lattice_stable(&f, &with));
    assert!(lattice_stable(&f, &[line, points[0].clone()]));
}

#[test]
fn pointed_simplex_neighborhoods_have_gaussian_size() {
    for q in [2, 3] {
        let f = Field::new(q).unwrap();
        for d in 1..=3 {
            for r in 1..=d + 1 {
                let bottom = SubspaceForm::coordinate(d + 1, &(0..r).collect::<Vec<_>>());
                let mut flag = vec![bottom];
                if r < d + 1 {
                    flag.push(SubspaceForm::whole(d + 1));
                }
                let eta = PointedSimplex::new(&f, flag).unwrap();
                let got = enumerate_n_eta(&f, &eta, BUDGET).unwrap();
                let expected: u128 = (1..r as i64).map(|k| gaussian_binomial(r as i64, k, u64::from(q)).unwrap()).sum();
                assert_eq!(got.len() as u128, expected, "q={q} d={d} r={r}");
                assert!(got.iter().all(|l| eta.flag()[0].contains(&f, l) && l.dim() > 0));
            }
        }
    }
}

#[test]
fn malformed_simplices_are_rejected() {
    let f = Field::new(2).unwrap();
    let p = SubspaceForm::coordinate(3, &[0]);
    let l = SubspaceForm::coordinate(3, &[1, 2]);
    assert!(PointedSimplex::new(&f, vec![]).is_err());
    assert!(PointedSimplex::new(&f, vec![p.clone()]).is_err());
    assert!(PointedSimplex::new(&f, vec![SubspaceForm::zero(3), SubspaceForm::whole(3)]).is_err());
    assert!(PointedSimplex::new(&f, vec![p, l, SubspaceForm::whole(3)]).is_err());
}

#[test]
fn tree_star_is_exact_exactly_when_points_do_not_outnumber_sections() {
    for q in [2, 3] {
        let f = Field::new(q).unwrap();
        let points = enumerate_linear(&f, 2, 1, BUDGET).unwrap();
        for k in 0..=4i64 {
            for mask in 0u32..1 << points.len() {
                let m0: Vec<SubspaceForm> =
                    points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect();
                let rep = three_term_exactness(&tree_star_triple(&f, k, &m0).unwrap()).unwrap();
                let excess = m0.len().saturating_sub(k as usize + 1);
                assert_eq!(rep.defect, excess, "q={q} k={k} m0={m0:?}");
                if m0.len() <= 1 {
                    assert!(rep.exact);
                }
            }
        }
        assert!(tree_star_triple(&f, 1, &[SubspaceForm::whole(2)]).is_err());
    }
}

fn rational_triple(first: Vec<Vec<i64>>, second: Vec<Vec<i64>>, dims: [usize; 3]) -> CoefficientTriple {
    let space = |dim| SpaceDescriptor { label: String::new(), dim };
    CoefficientTriple { coefficients: Coefficients::Rationals, spaces: dims.map(space), first, second }
}

#[test]
fn rational_cochains_of_graphs() {
    // constants -> vertex values -> edge differences on a path of three vertices
    let path = rational_triple(vec![vec![1]; 3], vec![vec![1, -1, 0], vec![0, 1, -1]], [1, 3, 2]);
    let rep = three_term_exactness(&path).unwrap();
    assert!(rep.exact);
    assert_eq!((rep.rank_first, rep.rank_second), (1, 2));
    let split = rational_triple(vec![vec![1]; 2], vec![], [1, 2, 0]);
    assert_eq!(three_term_exactness(&split).unwrap().defect, 1);
    let not_complex = rational_triple(vec![vec![1], vec![0]], vec![vec![1, 1]], [1, 2, 1]);
    assert!(three_term_exactness(&not_complex).is_err());
    let wrong_shape = rational_triple(vec![vec![1, 2]], vec![], [1, 1, 0]);
    assert!(three_term_exactness(&wrong_shape).is_err());
}

#[test]
fn engine_triples_translate_to_coefficient_triples() {
    let f = Field::new(2).unwrap();
    let mut engine = Engine::new(2).unwrap();
    let line = SubspaceForm::coordinate(3, &[0, 1]);
    let point = SubspaceForm::coordinate(3, &[0]);
    let t = engine.build_exact_triple(std::slice::from_ref(&line), &[line.clone(), point], &[-1, 0]).unwrap();
    let triple = CoefficientTriple::from_exact_triple(2, &t);
    assert_eq!(triple.dims(), t.dims);
    assert_eq!(three_term_exactness(&triple).unwrap(), t.report);
    assert!(t.report.exact);
    assert!(f.q() == 2 && t.certificate.is_some());
}

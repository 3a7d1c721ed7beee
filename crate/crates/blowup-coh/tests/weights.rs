//! Weight combinatorics against tableau counts and closed forms.

use std::collections::BTreeSet;

use blowup_coh::blowup::TauSet;
use blowup_coh::engine::Engine;
use blowup_coh::logforms::{atau, p_s};
use blowup_coh::weights::{
    ceil_identity_check, certify_global_vanishing, derive_weight_data, graded_piece_divisor, lex_less, weight_set,
    weyl_dimension, Weight,
};
use proptest::prelude::*;

/// Number of semistandard tableaux of shape `shape` with content `content`.
fn kostka(shape: &[i64], content: &[i64]) -> u64 {
    let cells: Vec<(usize, usize)> =
        shape.iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect();
    let mut grid = vec![vec![0usize; shape.first().copied().unwrap_or(0) as usize]; shape.len()];
    let mut left = content.to_vec();
    fn fill(i: usize, cells: &[(usize, usize)], grid: &mut Vec<Vec<usize>>, left: &mut Vec<i64>) -> u64 {
        if i == cells.len() {
            return 1;
        }
        let (r, c) = cells[i];
        let lo = if c > 0 { grid[r][c - 1] } else { 1 };
        let lo = if r > 0 { lo.max(grid[r - 1][c] + 1) } else { lo };
        let mut total = 0;
        for v in lo..=left.len() {
            if left[v - 1] > 0 {
                left[v - 1] -= 1;
                grid[r][c] = v;
                total += fill(i + 1, cells, grid, left);
                left[v - 1] += 1;
            }
        }
        total
    }
    fill(0, &cells, &mut grid, &mut left)
}

fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|x| {
            compositions(total - x, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, x);
                rest
            })
        })
        .collect()
}

fn partitions(d: usize, max: i64) -> Vec<Vec<i64>> {
    if d == 0 {
        return vec![vec![]];
    }
    (0..=max)
        .flat_map(|x| {
            partitions(d - 1, x).into_iter().map(move |mut rest| {
                rest.insert(0, x);
                rest
            })
        })
        .collect()
}

#[test]
fn weight_multiplicities_count_tableaux() {
    for d in 1..=4 {
        for shape in partitions(d, if d == 4 { 3 } else { 4 }) {
            let lambda = Weight::new(shape.clone());
            let got: Vec<(Weight, u64)> = weight_set(&lambda).unwrap();
            let expected: BTreeSet<(Vec<i64>, u64)> = compositions(lambda.size(), d)
                .into_iter()
                .map(|mu| {
                    let k = kostka(&shape, &mu);
                    (mu, k)
                })
                .filter(|(_, k)| *k > 0)
                .collect();
            let got_set: BTreeSet<(Vec<i64>, u64)> = got.iter().map(|(w, m)| (w.a.clone(), *m)).collect();
            assert_eq!(got_set, expected, "lambda = {shape:?}");
            let total: u64 = got.iter().map(|(_, m)| m).sum();
            assert_eq!(u128::from(total), weyl_dimension(&lambda).unwrap(), "lambda = {shape:?}");
        }
    }
}

#[test]
fn weights_come_in_decreasing_lexicographic_order() {
    let set = weight_set(&Weight::new(vec![3, 1, 0])).unwrap();
    for pair in set.windows(2) {
        assert!(lex_less(&pair[1].0, &pair[0].0).unwrap());
    }
    assert!(lex_less(&Weight::new(vec![1]), &Weight::new(vec![1, 0])).is_err());
}

#[test]
fn non_dominant_highest_weights_are_rejected() {
    assert!(weight_set(&Weight::new(vec![0, 1])).is_err());
    assert!(weyl_dimension(&Weight::new(vec![0, 1])).is_err());
}

#[test]
fn determinant_twists_of_exterior_powers_give_the_log_divisors() {
    for d in 1..=3 {
        for s in 0..=d {
            let shape: Vec<i64> = (0..d).map(|i| if i < s { s as i64 + 1 } else { s as i64 }).collect();
            let got: BTreeSet<Vec<i64>> = weight_set(&Weight::new(shape))
                .unwrap()
                .iter()
                .map(|(mu, m)| {
                    assert_eq!(*m, 1);
                    let spec = graded_piece_divisor(mu);
                    assert!(spec.n.iter().chain(&spec.m).all(|&x| x == 0));
                    spec.abar
                })
                .collect();
            let expected: BTreeSet<Vec<i64>> = p_s(d, s).into_iter().map(|t| atau(t, d).unwrap()).collect();
            assert_eq!(got, expected, "d = {d}, s = {s}");
        }
    }
}

#[test]
fn one_dimensional_weights_all_certify() {
    let mut engine = Engine::new(2).unwrap();
    for a in 0..=6 {
        let report = certify_global_vanishing(&mut engine, &Weight::new(vec![a]), true).unwrap();
        assert!(report.strongly_dominant);
        assert!(report.succeeded, "a = {a}");
        assert!(report.weights.iter().all(|w| w.oracle_higher_vanish() == Some(true)));
    }
}

#[test]
fn ceiling_identity_needs_a_fractional_shift() {
    assert!(ceil_identity_check(&Weight::new(vec![2, 1]), TauSet::from_slice(&[1])).is_err());
    assert!(ceil_identity_check(&Weight::new(vec![1, 0]), TauSet::from_slice(&[0, 1, 2])).is_err());
    assert!(ceil_identity_check(&Weight::new(vec![1, 0]), TauSet::from_slice(&[1])).unwrap());
}

fn weight_strategy() -> impl Strategy<Value = Weight> {
    (1usize..=12).prop_flat_map(|d| prop::collection::vec(-20i64..=20, d)).prop_map(Weight::new)
}

proptest! {
    #[test]
    fn shift_is_the_least_making_abar_integral(mu in weight_strategy()) {
        let data = derive_weight_data(&mu);
        let den = data.denominator();
        prop_assert!((0..den).contains(&data.delta_scaled));
        for (k, &a) in data.abar_scaled.iter().enumerate() {
            prop_assert_eq!((a + data.delta_scaled).rem_euclid(den), 0);
            prop_assert!((0..data.delta_scaled).all(|e| (a + e).rem_euclid(den) != 0));
            if k > 0 {
                prop_assert_eq!(data.ceil_abar[k - 1] * den, a + data.delta_scaled);
            }
        }
    }

    #[test]
    fn floor_vectors_bracket_their_rationals(mu in weight_strategy()) {
        let data = derive_weight_data(&mu);
        let (d, den, ds) = (data.d as i64, data.denominator(), data.delta_scaled);
        for i in 1..=d {
            let (n, m) = (data.n[i as usize - 1], data.m[i as usize - 1]);
            let (xn, xm) = ((i - 1 - d) * ds, i * ds);
            prop_assert!(n * den <= xn && xn < (n + 1) * den);
            prop_assert!(m * den <= xm && xm < (m + 1) * den);
        }
    }

    #[test]
    fn ceiling_identity_holds_for_every_orbit(mu in (1usize..=5).prop_flat_map(|d| prop::collection::vec(-9i64..=9, d)).prop_map(Weight::new)) {
        let data = derive_weight_data(&mu);
        prop_assume!(data.delta_scaled != 0);
        let d = data.d;
        for sigma in (1u32..(1 << (d + 1)) - 1).map(TauSet) {
            prop_assert!(ceil_identity_check(&mu, sigma).unwrap());
        }
    }

    #[test]
    fn multiplicities_are_symmetric(shape in (1usize..=3).prop_flat_map(|d| prop::collection::vec(0i64..=4, d))) {
        let mut shape = shape;
        shape.sort_unstable_by(|a, b| b.cmp(a));
        let set = weight_set(&Weight::new(shape)).unwrap();
        for (mu, m) in &set {
            let mut sorted = mu.a.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let rep = set.iter().find(|(w, _)| w.a == sorted).unwrap();
            prop_assert_eq!(rep.1, *m);
        }
    }
}

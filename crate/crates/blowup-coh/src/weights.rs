//! Weights of `GL_d`, the derived data `abar(mu)`, `delta(mu)`, `n(mu)`,
//! `m(mu)`, and the vanishing pipeline over the weight filtration of an
//! irreducible representation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::blowup::{Catalog, TauSet};
use crate::divisor::{build_divisor, DivisorSpec};
use crate::engine::{ladder_hypotheses, vanishing_bound, Certificate, Engine};
use crate::error::{domain, Error, Result};
use crate::oracle;
use crate::par;

/// A character `sum_i a_i eps_i` of the diagonal torus of `GL_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Weight {
    pub a: Vec<i64>,
}

impl Weight {
    pub fn new(a: Vec<i64>) -> Weight {
        Weight { a }
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    /// `|V| = sum_i a_i`.
    pub fn size(&self) -> i64 {
        self.a.iter().sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.a.windows(2).all(|w| w[0] >= w[1])
    }

    fn dominant_representative(&self) -> Weight {
        let mut a = self.a.clone();
        a.sort_unstable_by(|x, y| y.cmp(x));
        Weight { a }
    }
}

/// Rationals with denominator `d + 1` are stored as their numerators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedWeightData {
    pub d: usize,
    /// `(d+1) abar_j(mu)` for `j = 0..=d`.
    pub abar_scaled: Vec<i64>,
    /// `(d+1) delta(mu)`.
    pub delta_scaled: i64,
    /// `ceil(abar_j(mu))` for `j = 1..=d`.
    pub ceil_abar: Vec<i64>,
    /// `ceil(abar(mu))_0 = -d delta(mu) - sum_{i >= 1} abar_i(mu)`.
    pub ceil_abar0: i64,
    pub n: Vec<i64>,
    pub m: Vec<i64>,
    pub v_size: i64,
}

impl DerivedWeightData {
    pub fn denominator(&self) -> i64 {
        self.d as i64 + 1
    }

    /// `abar(mu)` for `j = 1..=d` when `delta(mu) = 0`.
    pub fn integral_abar(&self) -> Option<Vec<i64>> {
        let den = self.denominator();
        (self.delta_scaled == 0).then(|| self.abar_scaled[1..].iter().map(|x| x / den).collect())
    }
}

pub fn derive_weight_data(mu: &Weight) -> DerivedWeightData {
    let d = mu.d();
    let den = d as i64 + 1;
    let size = mu.size();
    // abar_j = |V|/(d+1) - a_j with a_0 = 0
    let abar_scaled: Vec<i64> = std::iter::once(0).chain(mu.a.iter().copied()).map(|a| size - den * a).collect();
    let delta_scaled = (-size).rem_euclid(den);
    let ceil_abar: Vec<i64> = abar_scaled[1..].iter().map(|x| (x + delta_scaled) / den).collect();
    let ceil_abar0 = (-(d as i64) * delta_scaled - abar_scaled[1..].iter().sum::<i64>()) / den;
    let n = (1..=d as i64).map(|i| ((i - 1 - d as i64) * delta_scaled).div_euclid(den)).collect();
    let m = (1..=d as i64).map(|i| (i * delta_scaled).div_euclid(den)).collect();
    DerivedWeightData { d, abar_scaled, delta_scaled, ceil_abar, ceil_abar0, n, m, v_size: size }
}

/// First `(mu, j)` with `sum_{i != j} a_i > d a_j`, if any.
pub fn strong_dominance_violation(weights: &[Weight]) -> Option<(Weight, usize)> {
    for mu in weights {
        let d = mu.d() as i64;
        let size = mu.size();
        for (j, &aj) in mu.a.iter().enumerate() {
            if size - aj > d * aj {
                return Some((mu.clone(), j + 1));
            }
        }
    }
    None
}

pub fn strongly_dominant(weights: &[Weight]) -> bool {
    strong_dominance_violation(weights).is_none()
}

/// Weyl dimension formula `prod_{i<j} (l_i - l_j + j - i) / (j - i)`.
pub fn weyl_dimension(lambda: &Weight) -> Result<u128> {
    if !lambda.is_dominant() {
        return domain(format!("{:?} is not dominant", lambda.a));
    }
    let d = lambda.d();
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..d {
        for j in i + 1..d {
            num *= (lambda.a[i] - lambda.a[j]) as u128 + (j - i) as u128;
            den *= (j - i) as u128;
        }
    }
    Ok(num / den)
}

/// Dominant weights `mu <= lambda` in the dominance order.
fn dominant_weights_below(lambda: &Weight) -> Vec<Weight> {
    fn rec(lambda: &[i64], prefix: &mut Vec<i64>, acc: i64, out: &mut Vec<Weight>) {
        let d = lambda.len();
        let k = prefix.len();
        if k == d {
            if acc == lambda.iter().sum::<i64>() {
                out.push(Weight::new(prefix.clone()));
            }
            return;
        }
        let hi = prefix.last().copied().unwrap_or(lambda[0]);
        let cap = lambda[..=k].iter().sum::<i64>() - acc;
        for x in (lambda[d - 1]..=hi.min(cap)).rev() {
            prefix.push(x);
            rec(lambda, prefix, acc + x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if lambda.d() > 0 {
        rec(&lambda.a, &mut Vec::new(), 0, &mut out);
    } else {
        out.push(lambda.clone());
    }
    out
}

fn permutations(w: &Weight) -> Vec<Weight> {
    let mut a = w.a.clone();
    a.sort_unstable();
    let mut out = vec![Weight::new(a.clone())];
    // next lexicographic permutation
    loop {
        let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
            return out;
        };
        let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
        a.swap(i - 1, j);
        a[i..].reverse();
        out.push(Weight::new(a.clone()));
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All weights of the irreducible representation of highest weight `lambda`
/// with multiplicities, computed by Freudenthal's formula, in decreasing
/// lexicographic order.
pub fn weight_set(lambda: &Weight) -> Result<Vec<(Weight, u64)>> {
    if !lambda.is_dominant() {
        return domain(format!("highest weight {:?} is not dominant", lambda.a));
    }
    let d = lambda.d();
    let rho: Vec<i64> = (0..d).map(|i| (d - 1 - i) as i64).collect();
    let shifted = |w: &[i64]| -> Vec<i64> { w.iter().zip(&rho).map(|(x, r)| x + r).collect() };
    let lr = shifted(&lambda.a);
    let top = dot(&lr, &lr);
    let mut dominant = dominant_weights_below(lambda);
    // Freudenthal runs downward from lambda; higher weights have larger partial sums
    dominant.sort_by(|x, y| y.cmp(x));
    let mut mult: BTreeMap<Weight, u64> = BTreeMap::new();
    let lookup =
        |mult: &BTreeMap<Weight, u64>, w: &Weight| mult.get(&w.dominant_representative()).copied().unwrap_or(0);
    let roots: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let mut pending: BTreeSet<Weight> = dominant.iter().cloned().collect();
    while let Some(mu) = pending.iter().next_back().cloned() {
        pending.remove(&mu);
        if mu == *lambda {
            mult.insert(mu, 1);
            continue;
        }
        let mr = shifted(&mu.a);
        let den = top - dot(&mr, &mr);
        let mut num = 0i64;
        for &(i, j) in &roots {
            let mut k = 1i64;
            loop {
                let mut w = mu.a.clone();
                w[i] += k;
                w[j] -= k;
                let w = Weight::new(w);
                // weights above lambda in the dominance order have multiplicity zero
                if w.a[i] > lambda.a[0] || w.a[j] < lambda.a[d - 1] {
                    break;
                }
                let m = lookup(&mult, &w) as i64;
                num += 2 * m * (w.a[i] - w.a[j]);
                k += 1;
            }
        }
        if den <= 0 || num % den != 0 {
            return Err(Error::Unstructured(format!("Freudenthal recursion is not integral at {:?}", mu.a)));
        }
        mult.insert(mu, (num / den) as u64);
    }
    let mut out: Vec<(Weight, u64)> = mult
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .flat_map(|(w, m)| permutations(&w).into_iter().map(move |p| (p, m)))
        .collect();
    out.sort_by(|x, y| lex_cmp(&y.0, &x.0));
    Ok(out)
}

/// Lexicographic order in the `eps` coordinates.
pub fn lex_cmp(mu: &Weight, nu: &Weight) -> Ordering {
    mu.a.cmp(&nu.a)
}

pub fn lex_less(mu: &Weight, nu: &Weight) -> Result<bool> {
    if mu.d() != nu.d() {
        return Err(Error::DimensionMismatch(format!("weights of length {} and {}", mu.d(), nu.d())));
    }
    Ok(lex_cmp(mu, nu) == Ordering::Less)
}

/// Checks the multiplicity of `V_sigma` in the graded divisor:
/// `-ceil(sum_{j in sigma} abar_j) = m_{|sigma|} - sum_{j in sigma} ceil(abar)_j`
/// for `0 not in sigma`, and the same with `n` for `0 in sigma`.
pub fn ceil_identity_check(mu: &Weight, sigma: TauSet) -> Result<bool> {
    let data = derive_weight_data(mu);
    let d = data.d;
    if data.delta_scaled == 0 {
        return domain("the identity concerns delta(mu) != 0");
    }
    if sigma.is_empty() || !sigma.is_proper(d) {
        return domain(format!("sigma must be a proper nonempty subset of 0..={d}"));
    }
    let den = data.denominator();
    let total: i64 = sigma.members().iter().map(|&j| data.abar_scaled[j]).sum();
    let lhs = -total.div_euclid(den) - i64::from(total.rem_euclid(den) != 0);
    let ceil_at = |j: usize| if j == 0 { data.ceil_abar0 } else { data.ceil_abar[j - 1] };
    let shift = if sigma.contains(0) { data.n[sigma.len() - 1] } else { data.m[sigma.len() - 1] };
    let rhs = shift - sigma.members().iter().map(|&j| ceil_at(j)).sum::<i64>();
    Ok(lhs == rhs)
}

/// The divisor whose line bundle is the graded piece of weight `mu` on `Y`.
pub fn graded_piece_divisor(mu: &Weight) -> DivisorSpec {
    let data = derive_weight_data(mu);
    let d = data.d;
    match data.integral_abar() {
        Some(abar) => DivisorSpec { d, abar, n: vec![0; d], m: vec![0; d] },
        None => DivisorSpec { d, abar: data.ceil_abar, n: data.n, m: data.m },
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightReport {
    pub mu: Weight,
    pub multiplicity: u64,
    /// `(d+1) delta(mu)` over the denominator `d+1`.
    pub delta: String,
    pub spec: DivisorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Arc<Certificate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    /// `(h^0, h^1, h^2)` from the surface oracle when `d <= 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<[i64; 3]>,
}

impl WeightReport {
    pub fn oracle_higher_vanish(&self) -> Option<bool> {
        self.oracle.map(|h| h[1] == 0 && h[2] == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub mu: Weight,
    pub j: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalVanishingReport {
    pub lambda: Weight,
    pub q: u32,
    pub strongly_dominant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    pub weights: Vec<WeightReport>,
    /// Strongly dominant, every weight certified, and no oracle disagreement.
    pub succeeded: bool,
}

fn format_delta(data: &DerivedWeightData) -> String {
    if data.delta_scaled == 0 {
        "0".into()
    } else {
        format!("{}/{}", data.delta_scaled, data.denominator())
    }
}

/// Vanishing of the higher cohomology of every graded piece on `Y` for the
/// representation of highest weight `lambda`, certified weight by weight.
pub fn certify_global_vanishing(
    engine: &mut Engine,
    lambda: &Weight,
    with_oracle: bool,
) -> Result<GlobalVanishingReport> {
    let weights = weight_set(lambda)?;
    let d = lambda.d();
    let plain: Vec<Weight> = weights.iter().map(|(w, _)| w.clone()).collect();
    let violation = strong_dominance_violation(&plain).map(|(mu, j)| Violation { mu, j });
    let oracle_results: Vec<Option<[i64; 3]>> = if with_oracle && (1..=2).contains(&d) {
        let f = engine.field().clone();
        let cat = Catalog::new(&f, d);
        let specs: Vec<DivisorSpec> = plain.iter().map(graded_piece_divisor).collect();
        let results = par::map(specs, |spec| -> Result<[i64; 3]> {
            let class = oracle::pic_class(&build_divisor(&spec, &cat)?, &f)?;
            let (a, b, c) = oracle::h_all(&class, &f)?;
            Ok([a, b, c])
        });
        results.into_iter().map(|r| r.map(Some)).collect::<Result<_>>()?
    } else {
        vec![None; plain.len()]
    };
    let mut reports = Vec::new();
    for ((mu, mult), oracle) in weights.into_iter().zip(oracle_results) {
        let data = derive_weight_data(&mu);
        let spec = graded_piece_divisor(&mu);
        let attempt = match data.integral_abar() {
            Some(abar) if abar.iter().all(|&a| a <= 0) => engine.certify_intersection(&[], &[], &abar),
            Some(_) => Err(Error::Precondition("abar(mu) has a positive entry".into())),
            None => match ladder_hypotheses(&spec) {
                Err(e) => Err(Error::Precondition(format!("n(mu), m(mu) violate the ladder hypotheses: {e}"))),
                Ok(()) if vanishing_bound(&spec.abar) != 0 => {
                    Err(Error::Precondition("ceil(abar(mu)) has a positive entry, so e > 0".into()))
                }
                Ok(()) => engine.certify(&spec, Some(1)),
            },
        };
        let (certificate, refusal) = match attempt {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        reports.push(WeightReport {
            mu,
            multiplicity: mult,
            delta: format_delta(&data),
            spec,
            certificate,
            refusal,
            oracle,
        });
    }
    let succeeded = violation.is_none()
        && reports.iter().all(|r| r.certificate.is_some() && r.oracle_higher_vanish() != Some(false));
    Ok(GlobalVanishingReport {
        lambda: lambda.clone(),
        q: engine.q(),
        strongly_dominant: violation.is_none(),
        violation,
        weights: reports,
        succeeded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: &[i64]) -> Weight {
        Weight::new(a.to_vec())
    }

    #[test]
    fn derived_data_examples() {
        let x = derive_weight_data(&w(&[2, 1]));
        assert_eq!(x.abar_scaled, vec![3, -3, 0]);
        assert_eq!(x.delta_scaled, 0);
        let y = derive_weight_data(&w(&[1, 0]));
        assert_eq!(y.abar_scaled[1..], [-2, 1]);
        assert_eq!(y.delta_scaled, 2);
        assert_eq!(y.m, vec![0, 1]);
        assert_eq!(y.n, vec![-2, -1]);
        let z = derive_weight_data(&w(&[0, 0, 0]));
        assert_eq!((z.delta_scaled, z.n.clone(), z.m.clone()), (0, vec![0; 3], vec![0; 3]));
    }

    #[test]
    fn graded_divisor_examples() {
        assert_eq!(graded_piece_divisor(&w(&[0, 0])), DivisorSpec::zero(2));
        assert_eq!(graded_piece_divisor(&w(&[1, 0])), DivisorSpec::new(vec![0, 1], vec![-2, -1], vec![0, 1]).unwrap());
        assert_eq!(graded_piece_divisor(&w(&[2, 1])), DivisorSpec::new(vec![-1, 0], vec![0, 0], vec![0, 0]).unwrap());
    }

    #[test]
    fn ceil_identity_examples() {
        assert!(ceil_identity_check(&w(&[1, 0]), TauSet::from_slice(&[1])).unwrap());
        assert!(ceil_identity_check(&w(&[1, 0]), TauSet::from_slice(&[1, 2])).unwrap());
        assert!(ceil_identity_check(&w(&[2, 1]), TauSet::from_slice(&[1])).is_err());
    }

    #[test]
    fn small_weight_sets() {
        let std3 = weight_set(&w(&[1, 0, 0])).unwrap();
        assert_eq!(std3.len(), 3);
        assert!(std3.iter().all(|(_, m)| *m == 1));
        let ext = weight_set(&w(&[1, 1, 0])).unwrap();
        assert_eq!(
            ext.iter().map(|x| x.0.clone()).collect::<Vec<_>>(),
            vec![w(&[1, 1, 0]), w(&[1, 0, 1]), w(&[0, 1, 1])]
        );
        let adj = weight_set(&w(&[2, 1, 0])).unwrap();
        assert_eq!(adj.iter().map(|x| x.1).sum::<u64>(), 8);
        assert_eq!(adj.iter().find(|x| x.0 == w(&[1, 1, 1])).unwrap().1, 2);
        assert!(weight_set(&w(&[0, 1])).is_err());
    }

    #[test]
    fn strong_dominance_examples() {
        assert!(strongly_dominant(&[w(&[0, 0])]));
        assert!(strongly_dominant(&[w(&[2, 1]), w(&[1, 2])]));
        let all: Vec<Weight> = weight_set(&w(&[8, 3])).unwrap().into_iter().map(|x| x.0).collect();
        assert!(!strongly_dominant(&all));
    }

    #[test]
    fn lex_examples() {
        assert!(!lex_less(&w(&[1, 0]), &w(&[1, 0])).unwrap());
        assert!(lex_less(&w(&[0, 5]), &w(&[1, 0])).unwrap());
        assert!(lex_less(&w(&[0]), &w(&[0, 1])).is_err());
    }
}

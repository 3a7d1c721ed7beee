//! Local combinatorics of the building at the standard vertex and the
//! exactness checker for three-term complexes of coefficient spaces.

use serde::Serialize;

use crate::blowup::{is_stable, Catalog, TauSet};
use crate::engine::ExactTriple;
use crate::error::{domain, Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{self, Matrix};
use crate::qcomb::{enumerate_linear, SubspaceForm};
use crate::weights::{derive_weight_data, Weight};

/// A vertex `t.Y` of the standard apartment, by the valuations
/// `(w(t_0), ..., w(t_d))` modulo the all-ones vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ApartmentVertex {
    coords: Vec<i64>,
}

impl ApartmentVertex {
    pub fn new(coords: Vec<i64>) -> Result<ApartmentVertex> {
        let Some(&c0) = coords.first() else {
            return domain("apartment vertices need at least one coordinate");
        };
        Ok(ApartmentVertex { coords: coords.iter().map(|c| c - c0).collect() })
    }

    pub fn standard(d: usize) -> ApartmentVertex {
        ApartmentVertex { coords: vec![0; d + 1] }
    }

    /// `Z_sigma = t_sigma Y` with `t_{sigma,j} = pi` exactly for `j in sigma`.
    pub fn of_subset(d: usize, sigma: TauSet) -> ApartmentVertex {
        ApartmentVertex::new((0..=d).map(|j| i64::from(sigma.contains(j))).collect()).unwrap()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn d(&self) -> usize {
        self.coords.len() - 1
    }

    /// `g Z` for a diagonal `g` with valuations `g`.
    pub fn translate(&self, g: &[i64]) -> Result<ApartmentVertex> {
        if g.len() != self.coords.len() {
            return Err(Error::DimensionMismatch(format!(
                "translation has {} entries, vertex has {}",
                g.len(),
                self.coords.len()
            )));
        }
        ApartmentVertex::new(self.coords.iter().zip(g).map(|(a, b)| a + b).collect())
    }

    /// The vertices obtained by raising one coordinate by one.
    pub fn basis_neighbors(&self) -> Vec<ApartmentVertex> {
        (0..self.coords.len())
            .map(|j| {
                let mut c = self.coords.clone();
                c[j] += 1;
                ApartmentVertex::new(c).unwrap()
            })
            .collect()
    }
}

/// All vertices with normalized coordinates in `[-radius, radius]`.
pub fn apartment_ball(d: usize, radius: i64) -> Vec<ApartmentVertex> {
    let side = (2 * radius + 1) as usize;
    (0..side.pow(d as u32))
        .map(|mut code| {
            let mut c = vec![0; d + 1];
            for x in c.iter_mut().skip(1) {
                *x = (code % side) as i64 - radius;
                code /= side;
            }
            ApartmentVertex { coords: c }
        })
        .collect()
}

/// `(d+1) mu-bar(Z)`.
pub fn scaled_value(mu: &Weight, z: &ApartmentVertex) -> Result<i64> {
    let data = derive_weight_data(mu);
    if z.coords.len() != data.d + 1 {
        return Err(Error::DimensionMismatch(format!(
            "weight has rank {} but vertex has {} coordinates",
            data.d,
            z.coords.len()
        )));
    }
    Ok(data.abar_scaled.iter().zip(&z.coords).map(|(a, c)| a * c).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExponentProfile {
    /// `(d+1) mu-bar(Z)`.
    pub scaled_value: i64,
    /// `s(Z)` with `mu-bar(Z) - s(Z)/(d+1)` integral, when `delta(mu) != 0`.
    pub s_z: Option<usize>,
    /// `ceil(mu-bar(Z) - s/(d+1))` for `s = 0..=d`.
    pub exponents: Vec<i64>,
}

pub fn exponent_profile(mu: &Weight, z: &ApartmentVertex) -> Result<ExponentProfile> {
    let n = scaled_value(mu, z)?;
    let den = z.coords.len() as i64;
    let exponents = (0..den).map(|s| -((s - n).div_euclid(den))).collect();
    let delta = derive_weight_data(mu).delta_scaled;
    Ok(ExponentProfile { scaled_value: n, s_z: (delta != 0).then_some(n.rem_euclid(den) as usize), exponents })
}

/// `mu-bar(g x) = mu-bar(x) + w(mu-bar(g))` for diagonal `g` with valuations `g`.
pub fn apartment_identity_check(mu: &Weight, g: &[i64], x: &ApartmentVertex) -> Result<bool> {
    let data = derive_weight_data(mu);
    let lhs = scaled_value(mu, &x.translate(g)?)?;
    let of_g: i64 = data.abar_scaled.iter().zip(g).map(|(a, b)| a * b).sum();
    Ok(lhs == scaled_value(mu, x)? + of_g)
}

/// A lattice `pi L_s < L < L_s` as the subspace `L / pi L_s` of `k^{d+1}`,
/// with the component of `Y` it corresponds to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeNeighbor {
    pub lattice: SubspaceForm,
    pub component: SubspaceForm,
    #[serde(serialize_with = "tau_members")]
    pub tau: TauSet,
}

fn tau_members<S: serde::Serializer>(t: &TauSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.members().serialize(s)
}

/// The component attached to a lattice: the annihilator of `L / pi L_s` in
/// the dual space, read in point coordinates.
pub fn lattice_to_component(f: &Field, lattice: &SubspaceForm) -> SubspaceForm {
    lattice.annihilator(f)
}

/// The neighbors of the standard vertex and their components.
pub fn neighbors_of_standard(f: &Field, d: usize, budget: u128) -> Result<Vec<LatticeNeighbor>> {
    let cat = Catalog::new(f, d);
    let mut out = Vec::new();
    for r in 1..=d {
        for lattice in enumerate_linear(f, d + 1, r, budget)? {
            let component = lattice_to_component(f, &lattice);
            let tau =
                cat.tau_of(&component).ok_or_else(|| Error::Domain("component missing from the catalog".into()))?;
            out.push(LatticeNeighbor { lattice, component, tau });
        }
    }
    Ok(out)
}

/// Closed under intersection, where a zero intersection (the lattice `pi L_s`)
/// never belongs to the set.
pub fn lattice_stable(f: &Field, set: &[SubspaceForm]) -> bool {
    set.iter().enumerate().all(|(i, a)| {
        set[i + 1..].iter().all(|b| {
            let c = a.intersection(f, b);
            c.dim() > 0 && set.contains(&c)
        })
    })
}

/// Whether lattice stability and component stability agree on `set`.
pub fn stability_corresponds(f: &Field, set: &[SubspaceForm]) -> bool {
    let comps: Vec<SubspaceForm> = set.iter().map(|l| lattice_to_component(f, l)).collect();
    lattice_stable(f, set) == is_stable(f, &comps)
}

/// A chain `pi L_s < L_1 < ... < L_s` with `L_s` the standard lattice,
/// stored as subspaces `L_i / pi L_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointedSimplex {
    flag: Vec<SubspaceForm>,
}

impl PointedSimplex {
    pub fn new(f: &Field, flag: Vec<SubspaceForm>) -> Result<PointedSimplex> {
        let Some(top) = flag.last() else {
            return domain("a pointed simplex needs at least one lattice");
        };
        if top.dim() != top.ambient {
            return domain("the last lattice must be the standard lattice");
        }
        if flag[0].dim() == 0 {
            return domain("the first lattice must strictly contain pi L_s");
        }
        for w in flag.windows(2) {
            if w[0].ambient != w[1].ambient || w[0].dim() >= w[1].dim() || !w[1].contains(f, &w[0]) {
                return domain("the chain must be strictly increasing");
            }
        }
        Ok(PointedSimplex { flag })
    }

    pub fn flag(&self) -> &[SubspaceForm] {
        &self.flag
    }
}

/// `N = {L : pi L_s < L < L_1}`.
pub fn enumerate_n_eta(f: &Field, eta: &PointedSimplex, budget: u128) -> Result<Vec<SubspaceForm>> {
    let bottom = &eta.flag[0];
    let r = bottom.dim();
    let mut out = Vec::new();
    for k in 1..r {
        for sub in enumerate_linear(f, r, k, budget)? {
            let rows: Vec<Vec<Elem>> = sub
                .rows
                .iter()
                .map(|c| {
                    (0..bottom.ambient)
                        .map(|x| c.iter().zip(&bottom.rows).fold(0, |acc, (&ci, row)| f.add(acc, f.mul(ci, row[x]))))
                        .collect()
                })
                .collect();
            out.push(SubspaceForm::from_rows(f, bottom.ambient, &rows));
        }
    }
    Ok(out)
}

/// Arithmetic in which ranks are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Coefficients {
    FiniteField { q: u32 },
    Rationals,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceDescriptor {
    pub label: String,
    pub dim: usize,
}

/// `V0 -first-> V1 -second-> V2` with explicit matrices; `first` is
/// `dim V1 x dim V0` and `second` is `dim V2 x dim V1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoefficientTriple {
    pub coefficients: Coefficients,
    pub spaces: [SpaceDescriptor; 3],
    pub first: Vec<Vec<i64>>,
    pub second: Vec<Vec<i64>>,
}

impl CoefficientTriple {
    pub fn dims(&self) -> [usize; 3] {
        [self.spaces[0].dim, self.spaces[1].dim, self.spaces[2].dim]
    }

    /// The section complex of an engine-built exact triple.
    pub fn from_exact_triple(q: u32, t: &ExactTriple) -> CoefficientTriple {
        let lift = |m: &Matrix| m.iter().map(|r| r.iter().map(|&x| i64::from(x)).collect()).collect();
        let [a, b, c] = t.dims;
        CoefficientTriple {
            coefficients: Coefficients::FiniteField { q },
            spaces: [
                SpaceDescriptor { label: "sections on W_S".into(), dim: a },
                SpaceDescriptor { label: "product over M0".into(), dim: b },
                SpaceDescriptor { label: "product over meeting pairs".into(), dim: c },
            ],
            first: lift(&t.first_map),
            second: lift(&t.second_map),
        }
    }
}

/// Rank data of `V0 -A-> V1 -B-> V2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactnessReport {
    pub dims: [usize; 3],
    pub rank_first: usize,
    pub rank_second: usize,
    /// `dim ker B - rank A`, the dimension of the middle cohomology.
    pub defect: usize,
    pub exact: bool,
}

fn check_shape<T>(m: &[Vec<T>], rows: usize, cols: usize, name: &str) -> Result<()> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!("{name} must be {rows} x {cols}")));
    }
    Ok(())
}

fn report(dims: [usize; 3], rank_first: usize, rank_second: usize) -> ExactnessReport {
    let defect = dims[1] - rank_second - rank_first;
    ExactnessReport { dims, rank_first, rank_second, defect, exact: defect == 0 }
}

/// Exactness at the middle term of `V0 -A-> V1 -B-> V2` over `F_q`, with
/// `A` given as a `dims[1] x dims[0]` matrix and `B` as `dims[2] x dims[1]`.
pub fn exactness_over_field(f: &Field, a: &Matrix, b: &Matrix, dims: [usize; 3]) -> Result<ExactnessReport> {
    check_shape(a, dims[1], dims[0], "first map")?;
    check_shape(b, dims[2], dims[1], "second map")?;
    if dims[0] > 0 && dims[2] > 0 && linalg::matmul(f, b, a).iter().flatten().any(|&x| x != 0) {
        return Err(Error::Precondition("the composite of the two maps is not zero".into()));
    }
    let rank_first = if dims[0] == 0 { 0 } else { linalg::rank(f, a) };
    let rank_second = if dims[1] == 0 { 0 } else { linalg::rank(f, b) };
    Ok(report(dims, rank_first, rank_second))
}

/// Exactness at the middle term, with ranks over the declared coefficients.
pub fn three_term_exactness(t: &CoefficientTriple) -> Result<ExactnessReport> {
    let dims = t.dims();
    match t.coefficients {
        Coefficients::FiniteField { q } => {
            let f = Field::new(q)?;
            let reduce =
                |m: &[Vec<i64>]| -> Matrix { m.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect() };
            exactness_over_field(&f, &reduce(&t.first), &reduce(&t.second), dims)
        }
        Coefficients::Rationals => {
            check_shape(&t.first, dims[1], dims[0], "first map")?;
            check_shape(&t.second, dims[2], dims[1], "second map")?;
            for row in &t.second {
                for c in 0..dims[0] {
                    let v: i128 = row.iter().zip(&t.first).map(|(&x, r)| x as i128 * r[c] as i128).sum();
                    if v != 0 {
                        return Err(Error::Precondition("the composite of the two maps is not zero".into()));
                    }
                }
            }
            let rank_first = if dims[0] == 0 { 0 } else { linalg::rational_rank(&t.first) };
            let rank_second = if dims[1] == 0 { 0 } else { linalg::rational_rank(&t.second) };
            Ok(report(dims, rank_first, rank_second))
        }
    }
}

/// Degree-`k` binary forms on the star of a vertex of the tree of `PGL_2`:
/// sections at the center, their values at the points `m0` of `P^1(k)`, and
/// nothing on pairs since no two neighbors of the center are adjacent.
pub fn tree_star_triple(f: &Field, k: i64, m0: &[SubspaceForm]) -> Result<CoefficientTriple> {
    if m0.iter().any(|p| p.ambient != 2 || p.dim() != 1) {
        return domain("tree star neighbors must be points of P^1");
    }
    let n0 = (k + 1).max(0) as usize;
    let first: Vec<Vec<i64>> = m0
        .iter()
        .map(|p| {
            let (s, t) = (p.rows[0][0], p.rows[0][1]);
            (0..n0).map(|i| i64::from(f.mul(f.pow(s, i as u64), f.pow(t, (n0 - 1 - i) as u64)))).collect()
        })
        .collect();
    Ok(CoefficientTriple {
        coefficients: Coefficients::FiniteField { q: f.q() },
        spaces: [
            SpaceDescriptor { label: format!("binary forms of degree {k}"), dim: n0 },
            SpaceDescriptor { label: "values at M0".into(), dim: m0.len() },
            SpaceDescriptor { label: "pairs".into(), dim: 0 },
        ],
        first,
        second: vec![],
    })
}

//! Components of the iterated blow-up `Y` of `P^d` in all rational linear
//! subvarieties, indexed by pairs `(tau, u)` with `tau` a nonempty proper
//! subset of `{0,...,d}` and `u` unipotent.
//!
//! Conventions: linear forms `Xi_i` are column vectors and a matrix `g` acts on
//! them by `xi -> g xi`. The component `u.V_tau` is the strict transform of the
//! common zero set of the forms `u e_i`, `i in tau`. Subspaces are stored in
//! point coordinates, so `g` acts on points by the inverse transpose.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::{Elem, Field};
use crate::linalg::{self, Matrix};
use crate::qcomb::SubspaceForm;

/// A subset of `{0,...,d}` stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauSet(pub u32);

impl TauSet {
    pub fn from_slice(members: &[usize]) -> TauSet {
        TauSet(members.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn empty() -> TauSet {
        TauSet(0)
    }

    pub fn full(d: usize) -> TauSet {
        TauSet((1u32 << (d + 1)) - 1)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn complement(self, d: usize) -> TauSet {
        TauSet(!self.0 & TauSet::full(d).0)
    }

    pub fn is_subset(self, other: TauSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: TauSet) -> TauSet {
        TauSet(self.0 | other.0)
    }

    pub fn minus(self, other: TauSet) -> TauSet {
        TauSet(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> TauSet {
        TauSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> TauSet {
        TauSet(self.0 & !(1 << i))
    }

    /// Whether this is a nonempty proper subset of `{0,...,d}`.
    pub fn is_proper(self, d: usize) -> bool {
        !self.is_empty() && self.is_subset(TauSet::full(d)) && self != TauSet::full(d)
    }

    /// Relabels a subset of `self` along the order preserving bijection
    /// `{0,...,|self|-1} -> self`.
    pub fn relative(self, sub: TauSet) -> TauSet {
        let m = self.members();
        TauSet::from_slice(&m.iter().enumerate().filter(|(_, &x)| sub.contains(x)).map(|(i, _)| i).collect::<Vec<_>>())
    }

    /// Inverse of [`TauSet::relative`].
    pub fn absolute(self, rel: TauSet) -> TauSet {
        let m = self.members();
        TauSet::from_slice(&rel.members().iter().map(|&i| m[i]).collect::<Vec<_>>())
    }
}

impl Serialize for TauSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TauSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Ok(TauSet::from_slice(&v))
    }
}

/// All nonempty proper subsets of `{0,...,d}` ordered by size, then mask.
pub fn proper_subsets(d: usize) -> Vec<TauSet> {
    let mut v: Vec<TauSet> = (1..(1u32 << (d + 1)) - 1).map(TauSet).collect();
    v.sort_by_key(|t| (t.len(), t.0));
    v
}

/// Upper unitriangular `(d+1) x (d+1)` matrix.
pub type UnipotentMatrix = Matrix;

/// Positions `(i, j)` that may be nonzero off the diagonal in `U_tau^sigma`.
pub fn free_entries(tau: TauSet, sigma: TauSet) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in tau.members() {
        for i in 0..j {
            if !tau.contains(i) && sigma.contains(i) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Positions that may be nonzero off the diagonal in `U(tau)`.
pub fn free_entries_log(tau: TauSet) -> Vec<(usize, usize)> {
    tau.members().into_iter().flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

/// All unipotent matrices with the given free positions, in residue order.
pub fn unipotents_with(f: &Field, d: usize, free: &[(usize, usize)]) -> Vec<UnipotentMatrix> {
    let q = f.q() as usize;
    let total = q.pow(free.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut u = linalg::identity(d + 1);
            for &(i, j) in free.iter().rev() {
                u[i][j] = (code % q) as Elem;
                code /= q;
            }
            u
        })
        .collect()
}

/// The exponent `sum_i (a_i - |sigma^c cap [0,a_i]| - i)` with `|U_tau^sigma| = q^exponent`.
pub fn count_exponent(d: usize, tau: TauSet, sigma: TauSet) -> usize {
    let sc = sigma.complement(d);
    tau.members().iter().enumerate().map(|(i, &a)| a - (0..=a).filter(|&x| sc.contains(x)).count() - i).sum()
}

/// Enumerates `U_tau^sigma`. Requires `tau` contained in `sigma`.
pub fn enumerate_u_tau_sigma(f: &Field, d: usize, tau: TauSet, sigma: TauSet) -> Result<Vec<UnipotentMatrix>> {
    if !tau.is_subset(sigma) || !sigma.is_subset(TauSet::full(d)) {
        return domain(format!("tau {:?} is not contained in sigma {:?}", tau.members(), sigma.members()));
    }
    Ok(unipotents_with(f, d, &free_entries(tau, sigma)))
}

/// `U_tau`.
pub fn enumerate_u_tau(f: &Field, d: usize, tau: TauSet) -> Vec<UnipotentMatrix> {
    unipotents_with(f, d, &free_entries(tau, TauSet::full(d)))
}

/// `U_tau^{{b}} = U^{Upsilon - {b}}_{tau - {b}}`.
pub fn enumerate_u_tau_b(f: &Field, d: usize, tau: TauSet, b: usize) -> Vec<UnipotentMatrix> {
    let sigma = TauSet::full(d).without(b);
    unipotents_with(f, d, &free_entries(tau.without(b), sigma))
}

/// Membership in `U_tau^sigma`.
pub fn in_u_tau_sigma(d: usize, u: &[Vec<Elem>], tau: TauSet, sigma: TauSet) -> bool {
    let free = free_entries(tau, sigma);
    (0..=d).all(|i| {
        (0..=d).all(|j| {
            let v = u[i][j];
            if i == j {
                v == 1
            } else {
                v == 0 || free.contains(&(i, j))
            }
        })
    })
}

/// Membership in `U_tau^{{b}}`.
pub fn in_u_tau_b(d: usize, u: &[Vec<Elem>], tau: TauSet, b: usize) -> bool {
    in_u_tau_sigma(d, u, tau.without(b), TauSet::full(d).without(b))
}

/// A pair `(tau, u)` naming the component `u.V_tau`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentIndex {
    pub tau: TauSet,
    pub u: UnipotentMatrix,
}

/// Point subspace annihilated by the forms `g e_i`, `i in tau`.
pub fn translated_coordinate_subspace(f: &Field, d: usize, tau: TauSet, g: &[Vec<Elem>]) -> SubspaceForm {
    let forms: Vec<Vec<Elem>> = tau.members().iter().map(|&i| (0..=d).map(|r| g[r][i]).collect()).collect();
    let k = linalg::kernel(f, &forms, d + 1);
    SubspaceForm::from_rows(f, d + 1, &k)
}

/// The linear subspace `u.V_{tau,0}` underlying the component `u.V_tau`.
pub fn component_of(f: &Field, d: usize, idx: &ComponentIndex) -> SubspaceForm {
    translated_coordinate_subspace(f, d, idx.tau, &idx.u)
}

/// The standard subspace `V_{tau,0}`.
pub fn standard_component(d: usize, tau: TauSet) -> SubspaceForm {
    SubspaceForm::coordinate(d + 1, &tau.complement(d).members())
}

/// Action of an invertible `g` on point subspaces, compatible with `component_of`.
pub fn act_on_points(f: &Field, g: &[Vec<Elem>], v: &SubspaceForm) -> SubspaceForm {
    v.annihilator(f).transform(f, g).annihilator(f)
}

/// Join of two components: the smallest linear subspace containing both,
/// or `None` when that is all of `P^d`.
pub fn join(f: &Field, v: &SubspaceForm, w: &SubspaceForm) -> Result<Option<SubspaceForm>> {
    for x in [v, w] {
        if x.dim() == 0 || x.dim() >= x.ambient {
            return domain("join expects proper nonzero subspaces");
        }
    }
    let s = v.sum(f, w);
    Ok((s.dim() < s.ambient).then_some(s))
}

/// Whether every pairwise join is defined and lies in `s`.
pub fn is_stable(f: &Field, s: &[SubspaceForm]) -> bool {
    let set: BTreeSet<&SubspaceForm> = s.iter().collect();
    s.iter().enumerate().all(|(i, v)| {
        s[i + 1..].iter().all(|w| match join(f, v, w) {
            Ok(Some(j)) => set.contains(&j),
            _ => false,
        })
    })
}

/// Whether two components meet in `Y`, which happens exactly when their
/// linear subspaces are nested.
pub fn components_meet(f: &Field, v: &SubspaceForm, w: &SubspaceForm) -> bool {
    v.contains(f, w) || w.contains(f, v)
}

/// Every component of `Y` together with its `(tau, u)` name.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub d: usize,
    pub field: Field,
    pub entries: Vec<(ComponentIndex, SubspaceForm)>,
    index: BTreeMap<SubspaceForm, usize>,
}

impl Catalog {
    pub fn new(f: &Field, d: usize) -> Catalog {
        let mut entries = Vec::new();
        for tau in proper_subsets(d) {
            for u in enumerate_u_tau(f, d, tau) {
                let idx = ComponentIndex { tau, u };
                let v = component_of(f, d, &idx);
                entries.push((idx, v));
            }
        }
        entries.sort_by(|a, b| a.1.cmp(&b.1));
        let index = entries.iter().enumerate().map(|(i, (_, v))| (v.clone(), i)).collect();
        Catalog { d, field: f.clone(), entries, index }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = &SubspaceForm> {
        self.entries.iter().map(|(_, v)| v)
    }

    pub fn lookup(&self, v: &SubspaceForm) -> Option<&ComponentIndex> {
        self.index.get(v).map(|&i| &self.entries[i].0)
    }

    pub fn tau_of(&self, v: &SubspaceForm) -> Option<TauSet> {
        self.lookup(v).map(|c| c.tau)
    }

    /// Components in the `U_tau`-orbit of `V_tau`.
    pub fn orbit(&self, tau: TauSet) -> Vec<&SubspaceForm> {
        self.entries.iter().filter(|(c, _)| c.tau == tau).map(|(_, v)| v).collect()
    }
}

/// The components meeting `V_sigma` split into the two families indexed by
/// `N^sigma` and `N^{sigma^c}`.
#[derive(Clone, Debug, Serialize)]
pub struct NeighborSplit {
    pub inner: Vec<(ComponentIndex, SubspaceForm)>,
    pub outer: Vec<(ComponentIndex, SubspaceForm)>,
    pub neighbors: Vec<SubspaceForm>,
    pub injective: bool,
    pub disjoint: bool,
    pub covering: bool,
}

impl NeighborSplit {
    pub fn is_bijection(&self) -> bool {
        self.injective && self.disjoint && self.covering
    }
}

pub fn split_component_neighbors(f: &Field, d: usize, sigma: TauSet) -> Result<NeighborSplit> {
    if !sigma.is_proper(d) {
        return domain("sigma must be a nonempty proper subset");
    }
    let sc = sigma.complement(d);
    let mut inner = Vec::new();
    for tau in proper_subsets(d).into_iter().filter(|t| t.is_subset(sigma) && *t != sigma) {
        for u in enumerate_u_tau_sigma(f, d, tau, sigma)? {
            let v = translated_coordinate_subspace(f, d, tau, &u);
            inner.push((ComponentIndex { tau, u }, v));
        }
    }
    let mut outer = Vec::new();
    for tau in proper_subsets(d).into_iter().filter(|t| t.is_subset(sc) && *t != sc) {
        for u in enumerate_u_tau_sigma(f, d, tau, sc)? {
            let v = translated_coordinate_subspace(f, d, tau.union(sigma), &u);
            outer.push((ComponentIndex { tau, u }, v));
        }
    }
    let base = standard_component(d, sigma);
    let catalog = Catalog::new(f, d);
    let neighbors: Vec<SubspaceForm> =
        catalog.components().filter(|v| **v != base && components_meet(f, v, &base)).cloned().collect();
    let inner_set: BTreeSet<&SubspaceForm> = inner.iter().map(|(_, v)| v).collect();
    let outer_set: BTreeSet<&SubspaceForm> = outer.iter().map(|(_, v)| v).collect();
    let injective = inner_set.len() == inner.len() && outer_set.len() == outer.len();
    let disjoint = inner_set.is_disjoint(&outer_set);
    let union: BTreeSet<&SubspaceForm> = inner_set.union(&outer_set).copied().collect();
    let target: BTreeSet<&SubspaceForm> = neighbors.iter().collect();
    let covering = union == target;
    Ok(NeighborSplit { inner, outer, neighbors, injective, disjoint, covering })
}

//! Vanishing certificates and section dimensions for line bundles on `Y`.
//!
//! A claim states `h^t = 0` for every `t >= vanishing_from`. Claims are
//! proved only through exact sequences of restrictions to boundary
//! components, the Künneth formula on `V_tau = Y^tau x Y^{tau^c}`, linear
//! equivalence, and three base facts: line bundles on `P^1`, pullbacks of
//! `O(k)` from `P^d`, and degrees above the dimension. The inductions of the
//! vanishing theorems serve as search strategies; when a strategy reaches a
//! piece it cannot prove, the strategy is abandoned, so a returned
//! certificate never rests on an unproved step.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::blowup::{
    components_meet, enumerate_u_tau, enumerate_u_tau_b, free_entries, in_u_tau_b, is_stable, proper_subsets,
    translated_coordinate_subspace, Catalog, TauSet,
};
use crate::building::{exactness_over_field, ExactnessReport};
use crate::divisor::{build_divisor, divisor_of_set, ladder_restriction_specs, principal_span, restrict_general};
use crate::divisor::{DivisorOnY, DivisorSpec, InvariantDivisor};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::Matrix;
use crate::oracle;
use crate::par;
use crate::qcomb::{enumerate_subspaces, SubspaceForm, DEFAULT_BUDGET};

/// `(dimension, stage, quantity)`, compared lexicographically.
pub type Measure = [i64; 3];

const STAGE_LEAF: i64 = 0;
const STAGE_ACYCLIC: i64 = 1;
const STAGE_HIGHER: i64 = 2;
const STAGE_RAISE: i64 = 3;
const STAGE_LOWER: i64 = 4;
const STAGE_REMOVAL: i64 = 5;
const STAGE_INTERSECTION: i64 = 6;
const STAGE_ORBIT: i64 = 7;
const STAGE_TRIPLE: i64 = 8;
const STAGE_PRODUCT: i64 = 9;
const UNBOUNDED: Measure = [i64::MAX; 3];

/// Consecutive single-orbit steps tried when no theorem strategy applies.
pub const ORBIT_SEARCH_DEPTH: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Acyclicity of `D(0, n, m)` with `n_d <= -1`, `m_1 = 0`.
    #[serde(rename = "nullsta-b")]
    ShiftAcyclic,
    /// Vanishing in positive degrees of `D(0, n, m)`.
    #[serde(rename = "nullsta-a")]
    ShiftHigher,
    /// Vanishing above `e(abar)` of `D(abar, n, m)` through the `D_k` ladder.
    #[serde(rename = "gallgvan")]
    WeightLadder,
    /// Vanishing in positive degrees of `D(abar, 0, 0) - D_S` for stable `S`.
    #[serde(rename = "wellvan")]
    StableRemoval,
    /// The same after restriction to `W_S`.
    #[serde(rename = "kritvan-a")]
    IntersectionRemoval,
    /// Exactness of the three-term section complex.
    #[serde(rename = "kritvan-b")]
    ExactTriple,
    #[serde(rename = "base-P1")]
    BaseP1,
    #[serde(rename = "base-pullback")]
    BasePullback,
    /// `h^t = 0` for `t` above the dimension.
    #[serde(rename = "dimension")]
    Dimension,
    #[serde(rename = "kunneth")]
    Kunneth,
    /// One orbit `W_sigma` added or removed.
    #[serde(rename = "orbit-step")]
    OrbitStep,
}

impl Rule {
    pub fn is_leaf(self) -> bool {
        matches!(self, Rule::BaseP1 | Rule::BasePullback | Rule::Dimension)
    }
}

/// Place of the claimed sheaf in the short exact sequence `0 -> K -> M -> Q -> 0`
/// used at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Position {
    Kernel,
    Middle,
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Kernel,
    Middle,
    Quotient,
    InnerFactor,
    OuterFactor,
    Equivalent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClaimDivisor {
    /// `sum_sigma c(sigma) W_sigma`, with a structured form when one is known.
    Invariant { spec: Option<DivisorSpec>, coefficients: InvariantDivisor },
    /// `D(abar, 0, 0) - D_S`.
    Removed { abar: Vec<i64>, removed: Vec<SubspaceForm> },
    /// `D(abar, 0, 0) - D_{S'}` restricted to `W_S`, where `S` is `along`.
    Restricted { abar: Vec<i64>, removed: Vec<SubspaceForm>, along: Vec<SubspaceForm> },
    /// Exterior product on `Y^tau x Y^{tau^c}`.
    Product { inner_d: usize, inner: Box<ClaimDivisor>, outer_d: usize, outer: Box<ClaimDivisor> },
}

impl ClaimDivisor {
    pub fn from_spec(spec: &DivisorSpec) -> ClaimDivisor {
        ClaimDivisor::Invariant { spec: Some(spec.clone()), coefficients: InvariantDivisor::from_spec(spec) }
    }

    fn invariant(c: InvariantDivisor, spec: Option<DivisorSpec>) -> ClaimDivisor {
        ClaimDivisor::Invariant { spec, coefficients: c }
    }

    fn restricted(abar: &[i64], removed: Vec<SubspaceForm>, along: Vec<SubspaceForm>) -> ClaimDivisor {
        if along.is_empty() {
            ClaimDivisor::Removed { abar: abar.to_vec(), removed }
        } else {
            ClaimDivisor::Restricted { abar: abar.to_vec(), removed, along }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub d: usize,
    pub q: u32,
    pub divisor: ClaimDivisor,
    /// `h^t = 0` for every `t >= vanishing_from`.
    pub vanishing_from: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Child {
    pub role: Role,
    /// Number of isomorphic copies of this piece in the quotient.
    pub multiplicity: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<TauSet>,
    #[serde(flatten)]
    pub cert: Arc<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub rule: Rule,
    pub claim: Claim,
    pub measure: Measure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    /// The index `j` moved by a ladder node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0: Option<i64>,
    pub children: Vec<Child>,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificates serialize")
    }

    /// Number of distinct nodes.
    pub fn node_count(&self) -> usize {
        fn walk(c: &Certificate, seen: &mut HashSet<*const Certificate>) {
            for ch in &c.children {
                if seen.insert(Arc::as_ptr(&ch.cert)) {
                    walk(&ch.cert, seen);
                }
            }
        }
        let mut seen = HashSet::new();
        walk(self, &mut seen);
        seen.len() + 1
    }

    /// Whether any node uses the given rule.
    pub fn uses(&self, rule: Rule) -> bool {
        self.rule == rule || self.children.iter().any(|c| c.cert.uses(rule))
    }
}

/// `e = min{0 <= i <= d : abar_t <= 0 for all t > i}`.
pub fn vanishing_bound(abar: &[i64]) -> usize {
    abar.iter().rposition(|&a| a > 0).map_or(0, |i| i + 1)
}

/// `h^0(P^1, O(k))`.
pub fn line_h0(k: i64) -> i64 {
    (k + 1).max(0)
}

fn line_threshold(deg: i64) -> usize {
    match deg {
        -1 => 0,
        k if k >= 0 => 1,
        _ => 2,
    }
}

fn pullback_threshold(k: i64, d: usize) -> usize {
    let d = d as i64;
    if (-d..=-1).contains(&k) {
        0
    } else if k >= 0 {
        1
    } else {
        d as usize + 1
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

/// `|U_sigma|`, the number of components in the orbit of `V_sigma`.
pub fn orbit_size(d: usize, sigma: TauSet, q: u32) -> u64 {
    (q as u64).pow(free_entries(sigma, TauSet::full(d)).len() as u32)
}

/// Degree on `P^1` of an invariant divisor of dimension one.
fn line_degree(c: &InvariantDivisor, q: u32) -> i64 {
    proper_subsets(1).into_iter().map(|s| c.coeff(s) * orbit_size(1, s, q) as i64).sum()
}

/// `k` when `c = k sum_{0 in sigma} W_sigma`, the pullback of `O(k)`.
fn pullback_degree(c: &InvariantDivisor) -> Option<i64> {
    let k = c.coeff(TauSet::from_slice(&[0]));
    proper_subsets(c.d).into_iter().all(|s| c.coeff(s) == if s.contains(0) { k } else { 0 }).then_some(k)
}

fn kunneth(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a + b - 1
    }
}

/// `D(abar + t, n + (i-1-d) t, m + i t)`, which has the same coefficients.
pub fn shift_spec(spec: &DivisorSpec, t: i64) -> DivisorSpec {
    let d = spec.d as i64;
    DivisorSpec {
        d: spec.d,
        abar: spec.abar.iter().map(|a| a + t).collect(),
        n: spec.n.iter().enumerate().map(|(i, x)| x + (i as i64 - d) * t).collect(),
        m: spec.m.iter().enumerate().map(|(i, x)| x + (i as i64 + 1) * t).collect(),
    }
}

fn monotone(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// Hypotheses on `(n, m)` shared by both parts of the shift proposition.
pub fn shift_hypotheses(spec: &DivisorSpec) -> std::result::Result<(), String> {
    let d = spec.d as i64;
    let (n, m) = (&spec.n, &spec.m);
    if spec.d == 0 {
        return Ok(());
    }
    if n[0] < -d {
        return Err(format!("n_1 = {} < -d", n[0]));
    }
    if !monotone(n) {
        return Err("n is not nondecreasing".into());
    }
    if m[0] < 0 {
        return Err(format!("m_1 = {} < 0", m[0]));
    }
    if !monotone(m) {
        return Err("m is not nondecreasing".into());
    }
    for i in 0..spec.d {
        if n[i] - n[0] > i as i64 {
            return Err(format!("n_{} - n_1 > {}", i + 1, i));
        }
        if m[i] - m[0] > i as i64 {
            return Err(format!("m_{} - m_1 > {}", i + 1, i));
        }
    }
    Ok(())
}

/// Hypotheses on `(n, m)` of the ladder theorem.
pub fn ladder_hypotheses(spec: &DivisorSpec) -> std::result::Result<(), String> {
    let d = spec.d as i64;
    let (n, m) = (&spec.n, &spec.m);
    if spec.d == 0 {
        return Ok(());
    }
    if n[0] < -d {
        return Err(format!("n_1 = {} < -d", n[0]));
    }
    if !monotone(n) {
        return Err("n is not nondecreasing".into());
    }
    if m[0] < 0 {
        return Err(format!("m_1 = {} < 0", m[0]));
    }
    if !monotone(m) {
        return Err("m is not nondecreasing".into());
    }
    for i in 1..spec.d {
        if n[i] - n[i - 1] > 1 {
            return Err(format!("n_{} - n_{} > 1", i + 1, i));
        }
        if m[i] - m[i - 1] > 1 {
            return Err(format!("m_{} - m_{} > 1", i + 1, i));
        }
    }
    Ok(())
}

fn s_measure(spec: &DivisorSpec) -> i64 {
    spec.m.iter().zip(&spec.n).map(|(m, n)| m + n - spec.n[0]).sum()
}

fn r_measure(spec: &DivisorSpec) -> i64 {
    let d = spec.d as i64;
    d * d + spec.m.iter().zip(&spec.n).map(|(m, n)| m + n).sum::<i64>()
}

fn relative_abar(spec: &DivisorSpec, tau: TauSet) -> Vec<i64> {
    tau.members().iter().skip(1).map(|&i| spec.abar_full(i)).collect()
}

fn sorted(mut v: Vec<SubspaceForm>) -> Vec<SubspaceForm> {
    v.sort();
    v.dedup();
    v
}

/// Explicit complex `H^0(W_S) -> prod H^0(W_{S+V}) -> prod H^0(W_{S+V+V'})`.
#[derive(Clone, Debug, Serialize)]
pub struct ExactTriple {
    /// Degree of the restricted bundle on `W_S`.
    pub degree: i64,
    pub dims: [usize; 3],
    pub first_map: Matrix,
    pub second_map: Matrix,
    pub report: ExactnessReport,
    pub certificate: Option<Arc<Certificate>>,
}

/// Engine session: memo tables and component catalogs for one field.
pub struct Engine {
    field: Field,
    cats: Vec<Catalog>,
    proved: HashMap<(usize, ClaimDivisor, usize), Arc<Certificate>>,
    failed: HashMap<(usize, ClaimDivisor, usize), Measure>,
    chi: HashMap<InvariantDivisor, i64>,
    separation: HashMap<(usize, TauSet, usize), Option<u64>>,
}

impl Engine {
    pub fn new(q: u32) -> Result<Engine> {
        Ok(Engine::with_field(Field::new(q)?))
    }

    pub fn with_field(field: Field) -> Engine {
        Engine {
            field,
            cats: Vec::new(),
            proved: HashMap::new(),
            failed: HashMap::new(),
            chi: HashMap::new(),
            separation: HashMap::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Catalogs of every dimension up to `d`.
    pub fn catalogs(&mut self, d: usize) -> &[Catalog] {
        while self.cats.len() <= d {
            let k = self.cats.len();
            self.cats.push(Catalog::new(&self.field, k));
        }
        &self.cats[..=d]
    }

    pub fn memo_size(&self) -> usize {
        self.proved.len()
    }

    fn node(
        &self,
        rule: Rule,
        d: usize,
        divisor: ClaimDivisor,
        vanishing_from: usize,
        measure: Measure,
        position: Option<Position>,
        children: Vec<Child>,
    ) -> Arc<Certificate> {
        Arc::new(Certificate {
            rule,
            claim: Claim { d, q: self.q(), divisor, vanishing_from },
            measure,
            position,
            pivot: None,
            h0: None,
            children,
        })
    }

    fn leaf(&self, rule: Rule, d: usize, divisor: ClaimDivisor, from: usize, h0: Option<i64>) -> Arc<Certificate> {
        Arc::new(Certificate {
            rule,
            claim: Claim { d, q: self.q(), divisor, vanishing_from: from },
            measure: [d as i64, STAGE_LEAF, 0],
            position: None,
            pivot: None,
            h0,
            children: vec![],
        })
    }

    /// Proves `h^t = 0` for `t >= need` using only strategies whose measure
    /// is below `bound`.
    fn prove(&mut self, d: usize, div: ClaimDivisor, need: usize, bound: Measure) -> Option<Arc<Certificate>> {
        if need > d {
            return Some(self.leaf(Rule::Dimension, d, div, d + 1, None));
        }
        let key = (d, div, need);
        if let Some(c) = self.proved.get(&key) {
            if c.measure < bound {
                return Some(c.clone());
            }
        }
        if let Some(m) = self.failed.get(&key) {
            if bound <= *m {
                return None;
            }
        }
        let div = key.1.clone();
        let out = match &div {
            ClaimDivisor::Invariant { spec, coefficients } => {
                self.prove_invariant(d, coefficients, spec.as_ref(), need, bound)
            }
            ClaimDivisor::Removed { abar, removed } => self.prove_removal(d, abar, removed, need, bound),
            ClaimDivisor::Restricted { abar, removed, along } => {
                self.prove_intersection(d, abar, removed, along, need, bound)
            }
            ClaimDivisor::Product { inner_d, inner, outer_d, outer } => {
                self.prove_product(d, *inner_d, inner, *outer_d, outer, need, bound)
            }
        };
        match &out {
            Some(c) => {
                self.proved.insert(key, c.clone());
            }
            None => {
                let e = self.failed.entry(key).or_insert(bound);
                if bound > *e {
                    *e = bound;
                }
            }
        }
        out
    }

    fn prove_product(
        &mut self,
        d: usize,
        inner_d: usize,
        inner: &ClaimDivisor,
        outer_d: usize,
        outer: &ClaimDivisor,
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        let measure = [d as i64, STAGE_PRODUCT, 0];
        if measure >= bound {
            return None;
        }
        let div =
            ClaimDivisor::Product { inner_d, inner: Box::new(inner.clone()), outer_d, outer: Box::new(outer.clone()) };
        for ta in (1..=inner_d + 1).chain(std::iter::once(0)) {
            let tb = if ta == 0 {
                outer_d + 1
            } else if need + 1 >= ta {
                need + 1 - ta
            } else {
                continue;
            };
            let mut children = Vec::new();
            let mut got = [inner_d + 1, outer_d + 1];
            if ta <= inner_d {
                match self.prove(inner_d, inner.clone(), ta, measure) {
                    Some(c) => {
                        got[0] = c.claim.vanishing_from;
                        children.push(Child { role: Role::InnerFactor, multiplicity: 1, component: None, cert: c });
                    }
                    None => continue,
                }
            }
            if tb <= outer_d {
                match self.prove(outer_d, outer.clone(), tb, measure) {
                    Some(c) => {
                        got[1] = c.claim.vanishing_from;
                        children.push(Child { role: Role::OuterFactor, multiplicity: 1, component: None, cert: c });
                    }
                    None => continue,
                }
            }
            let from = kunneth(got[0], got[1]);
            debug_assert!(from <= need);
            let h0 = match children.as_slice() {
                [a, b] => a.cert.h0.zip(b.cert.h0).map(|(x, y)| x * y),
                _ => None,
            };
            let mut cert = (*self.node(Rule::Kunneth, d, div, from, measure, None, children)).clone();
            cert.h0 = h0;
            return Some(Arc::new(cert));
        }
        None
    }

    fn candidate_specs(c: &InvariantDivisor, hint: Option<&DivisorSpec>) -> Vec<DivisorSpec> {
        let mut out: Vec<DivisorSpec> = Vec::new();
        if let Some(h) = hint {
            if InvariantDivisor::from_spec(h) == *c {
                out.push(h.clone());
            }
        }
        if let Some(s) = c.to_spec() {
            if !out.contains(&s) {
                out.push(s.clone());
            }
            if c.d > 0 && s.abar.iter().all(|&a| a == s.abar[0]) && s.abar[0] != 0 {
                let z = shift_spec(&s, -s.abar[0]);
                if !out.contains(&z) {
                    out.push(z);
                }
            }
        }
        out
    }

    fn prove_invariant(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        hint: Option<&DivisorSpec>,
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        let div = ClaimDivisor::invariant(c.clone(), hint.cloned());
        if d == 0 {
            return None;
        }
        if d == 1 {
            let deg = line_degree(c, self.q());
            let t = line_threshold(deg);
            return (t <= need).then(|| self.leaf(Rule::BaseP1, 1, div, t, Some(line_h0(deg))));
        }
        if let Some(k) = pullback_degree(c) {
            let t = pullback_threshold(k, d);
            if t <= need {
                let h0 = if k >= 0 { binomial(k + d as i64, d as i64) } else { 0 };
                return Some(self.leaf(Rule::BasePullback, d, div, t, Some(h0)));
            }
            return None;
        }
        let specs = Self::candidate_specs(c, hint);
        for sp in &specs {
            if let Some(x) = self.try_shift_acyclic(d, c, sp, bound) {
                return Some(x);
            }
        }
        if need >= 1 {
            for sp in &specs {
                if let Some(x) = self.try_shift_higher(d, c, sp, bound) {
                    return Some(x);
                }
            }
        }
        for sp in &specs {
            if let Some(x) = self.try_ladder(d, c, sp, need, bound) {
                return Some(x);
            }
        }
        self.try_orbit_step(d, c, need, bound)
    }

    /// Quotient pieces `L(c)|_{V_sigma}` for each `sigma`, as Künneth claims.
    fn orbit_pieces(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        sigmas: &[TauSet],
        hints: &dyn Fn(TauSet) -> (Option<DivisorSpec>, Option<DivisorSpec>),
        need: usize,
        bound: Measure,
    ) -> Option<Vec<Child>> {
        let mut out = Vec::new();
        for &sigma in sigmas {
            let (i, o) = c.restrict(sigma);
            let (hi, ho) = hints(sigma);
            let div = ClaimDivisor::Product {
                inner_d: i.d,
                inner: Box::new(ClaimDivisor::invariant(i, hi)),
                outer_d: o.d,
                outer: Box::new(ClaimDivisor::invariant(o, ho)),
            };
            let cert = self.prove(d - 1, div, need, bound)?;
            out.push(Child {
                role: Role::Quotient,
                multiplicity: orbit_size(d, sigma, self.q()),
                component: Some(sigma),
                cert,
            });
        }
        Some(out)
    }

    fn try_shift_acyclic(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        spec: &DivisorSpec,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        if spec.abar.iter().any(|&a| a != 0) || shift_hypotheses(spec).is_err() {
            return None;
        }
        if spec.n[d - 1] > -1 || spec.m[0] != 0 {
            return None;
        }
        let s = s_measure(spec);
        let measure = [d as i64, STAGE_ACYCLIC, s];
        if s == 0 || measure >= bound {
            return None;
        }
        let (n, m) = (&spec.n, &spec.m);
        let mut sub = spec.clone();
        let (i0, zero_in) = match (1..d).find(|&i| n[i] != n[0]) {
            Some(i) => {
                sub.n[i] -= 1;
                (i + 1, true)
            }
            None => {
                let i = (1..d).find(|&i| m[i] != 0)?;
                sub.m[i] -= 1;
                (i + 1, false)
            }
        };
        let kernel = self.prove(d, ClaimDivisor::from_spec(&sub), 0, measure)?;
        let sigmas: Vec<TauSet> =
            proper_subsets(d).into_iter().filter(|s| s.len() == i0 && s.contains(0) == zero_in).collect();
        let hints = |_: TauSet| {
            let tn: Vec<i64> = (0..i0 - 1).map(|i| if zero_in { n[i] - n[i0 - 1] } else { m[i] - m[i0 - 1] }).collect();
            let tm: Vec<i64> = m[..i0 - 1].to_vec();
            (Some(DivisorSpec { d: i0 - 1, abar: vec![0; i0 - 1], n: tn, m: tm }), None)
        };
        let mut children = vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: kernel }];
        children.extend(self.orbit_pieces(d, c, &sigmas, &hints, 0, measure)?);
        let div = ClaimDivisor::invariant(c.clone(), Some(spec.clone()));
        Some(self.node(Rule::ShiftAcyclic, d, div, 0, measure, Some(Position::Middle), children))
    }

    fn try_shift_higher(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        spec: &DivisorSpec,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        if spec.abar.iter().any(|&a| a != 0) || shift_hypotheses(spec).is_err() {
            return None;
        }
        let r = r_measure(spec);
        let measure = [d as i64, STAGE_HIGHER, r];
        if r == 0 || measure >= bound {
            return None;
        }
        let (n, m) = (&spec.n, &spec.m);
        // case (i) lowers m, case (ii) lowers n; the smallest valid index in each
        let lower_m = (0..d).find(|&i| {
            let mut t = spec.clone();
            t.m[i] -= 1;
            shift_hypotheses(&t).is_ok()
        });
        let lower_n = (0..d).find(|&i| {
            let mut t = spec.clone();
            t.n[i] -= 1;
            shift_hypotheses(&t).is_ok()
        });
        let cases = [lower_m.map(|i| (i, false)), lower_n.map(|i| (i, true))];
        for (i, zero_in) in cases.into_iter().flatten() {
            let mut sub = spec.clone();
            if zero_in {
                sub.n[i] -= 1;
            } else {
                sub.m[i] -= 1;
            }
            let i0 = i + 1;
            let Some(kernel) = self.prove(d, ClaimDivisor::from_spec(&sub), 1, measure) else {
                continue;
            };
            let sigmas: Vec<TauSet> =
                proper_subsets(d).into_iter().filter(|s| s.len() == i0 && s.contains(0) == zero_in).collect();
            let hints = |_: TauSet| {
                let tn: Vec<i64> =
                    (0..i0 - 1).map(|k| if zero_in { n[k] - n[i0 - 1] } else { m[k] - m[i0 - 1] }).collect();
                let tm: Vec<i64> = m[..i0 - 1].to_vec();
                let hn: Vec<i64> = (i0..d).map(|k| n[k]).collect();
                let hm: Vec<i64> = (i0..d).map(|k| if zero_in { n[k] - n[i0 - 1] } else { m[k] - m[i0 - 1] }).collect();
                (
                    Some(DivisorSpec { d: i0 - 1, abar: vec![0; i0 - 1], n: tn, m: tm }),
                    Some(DivisorSpec { d: d - i0, abar: vec![0; d - i0], n: hn, m: hm }),
                )
            };
            let Some(pieces) = self.orbit_pieces(d, c, &sigmas, &hints, 1, measure) else {
                continue;
            };
            let mut children = vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: kernel }];
            children.extend(pieces);
            let div = ClaimDivisor::invariant(c.clone(), Some(spec.clone()));
            return Some(self.node(Rule::ShiftHigher, d, div, 1, measure, Some(Position::Middle), children));
        }
        None
    }

    /// `|U_tau| - |U_tau^{{j}}|` after checking that the components removed
    /// at earlier ladder levels miss every `u.V_tau` with `u` outside `U_tau^{{j}}`.
    fn ladder_separation(&mut self, d: usize, tau: TauSet, j: usize) -> Option<u64> {
        if let Some(v) = self.separation.get(&(d, tau, j)) {
            return *v;
        }
        let f = self.field.clone();
        let moving: Vec<SubspaceForm> = enumerate_u_tau(&f, d, tau)
            .into_iter()
            .filter(|u| !in_u_tau_b(d, u, tau, j))
            .map(|u| translated_coordinate_subspace(&f, d, tau, &u))
            .collect();
        let mut earlier = Vec::new();
        for t2 in proper_subsets(d) {
            if t2.contains(j) && t2.is_subset(tau) && t2 != tau {
                for u in enumerate_u_tau_b(&f, d, t2, j) {
                    earlier.push(translated_coordinate_subspace(&f, d, t2, &u));
                }
            }
        }
        let ok = par::all(&moving, |v| earlier.iter().all(|w| !components_meet(&f, v, w)));
        let out = ok.then_some(moving.len() as u64);
        self.separation.insert((d, tau, j), out);
        out
    }

    /// Quotient pieces of `L(D_0) / L(D_d)` for the ladder started at `base`.
    fn ladder_pieces(
        &mut self,
        d: usize,
        base: &DivisorSpec,
        j: usize,
        need: usize,
        bound: Measure,
    ) -> Option<Vec<Child>> {
        let c = InvariantDivisor::from_spec(base);
        let mut out = Vec::new();
        for k in 1..=d {
            let hat = InvariantDivisor::from_fn(d, |s| c.coeff(s) - i64::from(s.contains(j) && s.len() < k));
            for tau in proper_subsets(d) {
                if tau.len() != k || !tau.contains(j) {
                    continue;
                }
                let mult = self.ladder_separation(d, tau, j)?;
                if mult == 0 {
                    continue;
                }
                let (i, o) = hat.restrict(tau);
                let (hi, ho) = ladder_restriction_specs(base, tau, j);
                let div = ClaimDivisor::Product {
                    inner_d: i.d,
                    inner: Box::new(ClaimDivisor::invariant(i, Some(hi))),
                    outer_d: o.d,
                    outer: Box::new(ClaimDivisor::invariant(o, Some(ho))),
                };
                let cert = self.prove(d - 1, div, need, bound)?;
                out.push(Child { role: Role::Quotient, multiplicity: mult, component: Some(tau), cert });
            }
        }
        Some(out)
    }

    fn try_ladder(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        spec: &DivisorSpec,
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        if ladder_hypotheses(spec).is_err() {
            return None;
        }
        let e = vanishing_bound(&spec.abar);
        let t = e + 1;
        if need < t || spec.abar.iter().all(|&a| a == 0) {
            return None;
        }
        let div = ClaimDivisor::invariant(c.clone(), Some(spec.clone()));
        if spec.abar.iter().all(|&a| a >= 0) {
            let measure = [d as i64, STAGE_RAISE, spec.abar.iter().sum()];
            if measure >= bound {
                return None;
            }
            for j in 1..=d {
                if spec.abar[j - 1] <= 0 {
                    continue;
                }
                let mut prev = spec.clone();
                prev.abar[j - 1] -= 1;
                let Some(middle) = self.prove(d, ClaimDivisor::from_spec(&prev), t, measure) else {
                    continue;
                };
                let Some(pieces) = self.ladder_pieces(d, &prev, j, t - 1, measure) else {
                    continue;
                };
                let mut children = vec![Child { role: Role::Middle, multiplicity: 1, component: None, cert: middle }];
                children.extend(pieces);
                let mut node =
                    (*self.node(Rule::WeightLadder, d, div, t, measure, Some(Position::Kernel), children)).clone();
                node.pivot = Some(j);
                return Some(Arc::new(node));
            }
        } else {
            let neg: i64 = spec.abar.iter().filter(|&&a| a < 0).map(|a| -a).sum();
            let measure = [d as i64, STAGE_LOWER, neg];
            if measure >= bound {
                return None;
            }
            for j in 1..=d {
                if spec.abar[j - 1] >= 0 {
                    continue;
                }
                let mut next = spec.clone();
                next.abar[j - 1] += 1;
                let Some(kernel) = self.prove(d, ClaimDivisor::from_spec(&next), t, measure) else {
                    continue;
                };
                let Some(pieces) = self.ladder_pieces(d, spec, j, t, measure) else {
                    continue;
                };
                let mut children = vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: kernel }];
                children.extend(pieces);
                let mut node =
                    (*self.node(Rule::WeightLadder, d, div, t, measure, Some(Position::Middle), children)).clone();
                node.pivot = Some(j);
                return Some(Arc::new(node));
            }
        }
        None
    }

    fn orbit_depth(d: usize, bound: Measure) -> Option<i64> {
        let full = [d as i64, STAGE_ORBIT, ORBIT_SEARCH_DEPTH];
        if full < bound {
            Some(ORBIT_SEARCH_DEPTH)
        } else if bound[0] == d as i64 && bound[1] == STAGE_ORBIT && bound[2] >= 2 {
            Some(bound[2] - 1)
        } else {
            None
        }
    }

    fn try_orbit_step(
        &mut self,
        d: usize,
        c: &InvariantDivisor,
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        let depth = Self::orbit_depth(d, bound)?;
        let measure = [d as i64, STAGE_ORBIT, depth];
        let div = ClaimDivisor::invariant(c.clone(), None);
        let none = |_: TauSet| (None, None);
        for sigma in proper_subsets(d) {
            let mut smaller = c.clone();
            smaller.set(sigma, c.coeff(sigma) - 1);
            if let Some(kernel) = self.prove(d, ClaimDivisor::invariant(smaller, None), need, measure) {
                if let Some(pieces) = self.orbit_pieces(d, c, &[sigma], &none, need, measure) {
                    let mut children =
                        vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: kernel }];
                    children.extend(pieces);
                    return Some(self.node(Rule::OrbitStep, d, div, need, measure, Some(Position::Middle), children));
                }
            }
            let mut larger = c.clone();
            larger.set(sigma, c.coeff(sigma) + 1);
            if let Some(middle) = self.prove(d, ClaimDivisor::invariant(larger.clone(), None), need, measure) {
                if let Some(pieces) = self.orbit_pieces(d, &larger, &[sigma], &none, need.saturating_sub(1), measure) {
                    let mut children =
                        vec![Child { role: Role::Middle, multiplicity: 1, component: None, cert: middle }];
                    children.extend(pieces);
                    return Some(self.node(Rule::OrbitStep, d, div, need, measure, Some(Position::Kernel), children));
                }
            }
        }
        None
    }

    /// `S''` with `X = D(b, 0, 0) - D_{S''}` on `Y^k`, if `X` has that shape.
    fn removed_part(&mut self, b: &[i64], x: &DivisorOnY) -> Option<Vec<SubspaceForm>> {
        let k = b.len();
        let spec = DivisorSpec { d: k, abar: b.to_vec(), n: vec![0; k], m: vec![0; k] };
        let full = build_divisor(&spec, &self.catalogs(k)[k]).ok()?;
        let diff = full.sub(x);
        diff.support.values().all(|&v| v == 1).then(|| diff.support.keys().cloned().collect())
    }

    fn prove_removal(
        &mut self,
        d: usize,
        abar: &[i64],
        s: &[SubspaceForm],
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        let f = self.field.clone();
        if abar.iter().any(|&a| a > 0) || !is_stable(&f, s) {
            return None;
        }
        let spec0 = DivisorSpec { d, abar: abar.to_vec(), n: vec![0; d], m: vec![0; d] };
        if s.is_empty() {
            return self.prove(d, ClaimDivisor::from_spec(&spec0), need, bound);
        }
        let div = ClaimDivisor::Removed { abar: abar.to_vec(), removed: s.to_vec() };
        if d == 1 {
            let deg = line_degree(&InvariantDivisor::from_spec(&spec0), self.q()) - s.len() as i64;
            let t = line_threshold(deg);
            return (t <= need).then(|| self.leaf(Rule::BaseP1, 1, div, t, Some(line_h0(deg))));
        }
        if need == 0 || [d as i64, STAGE_REMOVAL, d as i64] >= bound {
            return None;
        }
        self.catalogs(d);
        let span = s.iter().skip(1).fold(s[0].clone(), |acc, v| acc.sum(&f, v));
        let w = enumerate_subspaces(&f, d, d - 1, DEFAULT_BUDGET).ok()?.into_iter().find(|h| h.contains(&f, &span))?;
        let below_w: Vec<SubspaceForm> = self.cats[d].components().filter(|v| w.contains(&f, v)).cloned().collect();
        let base = build_divisor(&spec0, &self.cats[d]).ok()?;
        let minus_one = DivisorSpec { n: vec![-1; d], ..spec0.clone() };
        // D_{T(W)} is the total transform of W, equivalent to that of Xi_0 = 0
        let below_xi0: Vec<SubspaceForm> =
            self.cats[d].components().filter(|v| v.rows.iter().all(|r| r[0] == 0)).cloned().collect();
        let diff =
            base.sub(&divisor_of_set(d, self.q(), &below_xi0)).sub(&build_divisor(&minus_one, &self.cats[d]).ok()?);
        principal_span(&diff, &self.cats[d])?;
        let start = [d as i64, STAGE_REMOVAL, 0];
        let equivalent = self.prove(d, ClaimDivisor::from_spec(&minus_one), 1, start)?;
        let mut prev = self.node(
            Rule::StableRemoval,
            d,
            ClaimDivisor::Removed { abar: abar.to_vec(), removed: sorted(below_w.clone()) },
            equivalent.claim.vanishing_from.max(1),
            start,
            None,
            vec![Child { role: Role::Equivalent, multiplicity: 1, component: None, cert: equivalent }],
        );
        let s_set: BTreeSet<SubspaceForm> = s.iter().cloned().collect();
        let level = |i: i64| -> BTreeSet<SubspaceForm> {
            let mut q: BTreeSet<SubspaceForm> = s_set.clone();
            q.extend(below_w.iter().filter(|v| v.projective_dim() >= i).cloned());
            q
        };
        for i in 1..=d as i64 {
            let qi = level(i);
            let qprev = level(i - 1);
            let fresh: Vec<SubspaceForm> = qprev.difference(&qi).cloned().collect();
            if fresh.is_empty() {
                continue;
            }
            let qi_vec: Vec<SubspaceForm> = qi.iter().cloned().collect();
            let big = base.sub(&divisor_of_set(d, self.q(), &qi_vec));
            let cats = &self.cats;
            let restricted: Vec<Result<(TauSet, DivisorOnY, DivisorOnY)>> =
                par::map(fresh, |v| restrict_general(&big, &v, cats));
            let measure = [d as i64, STAGE_REMOVAL, i];
            let mut children = vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: prev }];
            for r in restricted {
                let (tau, x, z) = r.ok()?;
                let tc = tau.complement(d);
                let (b_in, b_out) = (relative_abar(&spec0, tau), relative_abar(&spec0, tc));
                let s_in = self.removed_part(&b_in, &x)?;
                let s_out = self.removed_part(&b_out, &z)?;
                let piece = ClaimDivisor::Product {
                    inner_d: b_in.len(),
                    inner: Box::new(ClaimDivisor::Removed { abar: b_in, removed: s_in }),
                    outer_d: b_out.len(),
                    outer: Box::new(ClaimDivisor::Removed { abar: b_out, removed: s_out }),
                };
                let cert = self.prove(d - 1, piece, 1, measure)?;
                children.push(Child { role: Role::Quotient, multiplicity: 1, component: Some(tau), cert });
            }
            prev = self.node(
                Rule::StableRemoval,
                d,
                ClaimDivisor::Removed { abar: abar.to_vec(), removed: qi_vec },
                1,
                measure,
                Some(Position::Middle),
                children,
            );
        }
        debug_assert_eq!(prev.claim.divisor, div);
        Some(prev)
    }

    fn prove_intersection(
        &mut self,
        d: usize,
        abar: &[i64],
        removed: &[SubspaceForm],
        along: &[SubspaceForm],
        need: usize,
        bound: Measure,
    ) -> Option<Arc<Certificate>> {
        let Some((last, rest)) = along.split_last() else {
            return self.prove(d, ClaimDivisor::restricted(abar, removed.to_vec(), vec![]), need, bound);
        };
        let measure = [d as i64, STAGE_INTERSECTION, along.len() as i64];
        if measure >= bound {
            return None;
        }
        let middle = self.prove(d, ClaimDivisor::restricted(abar, removed.to_vec(), rest.to_vec()), need, measure)?;
        let mut more = removed.to_vec();
        more.push(last.clone());
        let kernel = self.prove(d, ClaimDivisor::restricted(abar, sorted(more), rest.to_vec()), need + 1, measure)?;
        let div = ClaimDivisor::restricted(abar, removed.to_vec(), along.to_vec());
        let children = vec![
            Child { role: Role::Middle, multiplicity: 1, component: None, cert: middle },
            Child { role: Role::Kernel, multiplicity: 1, component: None, cert: kernel },
        ];
        Some(self.node(Rule::IntersectionRemoval, d, div, need, measure, Some(Position::Quotient), children))
    }

    /// Certificate that `h^t(D(abar, n, m)) = 0` for `t >= from`. With `from`
    /// absent the ladder range `t > e(abar)` is used.
    pub fn certify(&mut self, spec: &DivisorSpec, from: Option<usize>) -> Result<Arc<Certificate>> {
        let from = from.unwrap_or_else(|| vanishing_bound(&spec.abar) + 1);
        self.prove(spec.d, ClaimDivisor::from_spec(spec), from, UNBOUNDED)
            .ok_or_else(|| Error::NoApplicableRule(diagnose(spec, from)))
    }

    /// Certificate for an invariant divisor given by its orbit coefficients.
    pub fn certify_invariant(&mut self, c: &InvariantDivisor, from: usize) -> Result<Arc<Certificate>> {
        self.prove(c.d, ClaimDivisor::invariant(c.clone(), None), from, UNBOUNDED)
            .ok_or_else(|| Error::NoApplicableRule(format!("no proof of h^t = 0 for t >= {from}")))
    }

    /// `h^0(Y, L(D(abar, n, m)))`, defined when higher cohomology is certified
    /// to vanish so that `h^0 = chi`.
    pub fn h0_dim(&mut self, spec: &DivisorSpec) -> Result<(i64, Arc<Certificate>)> {
        let cert = self
            .prove(spec.d, ClaimDivisor::from_spec(spec), 1, UNBOUNDED)
            .ok_or_else(|| Error::NoApplicableRule(diagnose(spec, 1)))?;
        let h0 = if cert.claim.vanishing_from == 0 {
            0
        } else {
            self.euler_characteristic(&InvariantDivisor::from_spec(spec))
        };
        let mut top = (*cert).clone();
        top.h0 = Some(h0);
        Ok((h0, Arc::new(top)))
    }

    /// `chi(Y, L(c))`, from `chi(c) = chi(c - e_sigma) + |U_sigma| chi(inner) chi(outer)`.
    pub fn euler_characteristic(&mut self, c: &InvariantDivisor) -> i64 {
        if c.d == 0 {
            return 1;
        }
        if let Some(&v) = self.chi.get(c) {
            return v;
        }
        let v = match proper_subsets(c.d).into_iter().find(|&s| c.coeff(s) != 0) {
            None => 1,
            Some(sigma) => {
                let k = c.coeff(sigma);
                let mult = orbit_size(c.d, sigma, self.q()) as i64;
                let mut other = c.clone();
                if k > 0 {
                    other.set(sigma, k - 1);
                    let (i, o) = c.restrict(sigma);
                    self.euler_characteristic(&other)
                        + mult * self.euler_characteristic(&i) * self.euler_characteristic(&o)
                } else {
                    other.set(sigma, k + 1);
                    let (i, o) = other.restrict(sigma);
                    self.euler_characteristic(&other)
                        - mult * self.euler_characteristic(&i) * self.euler_characteristic(&o)
                }
            }
        };
        self.chi.insert(c.clone(), v);
        v
    }

    /// Certificate for `h^t(D(abar, 0, 0) - D_S) = 0`, `t > 0`, for stable `S`.
    pub fn certify_stable_removal(&mut self, abar: &[i64], s: &[SubspaceForm]) -> Result<Arc<Certificate>> {
        let d = abar.len();
        if abar.iter().any(|&a| a > 0) {
            return Err(Error::Precondition("abar must be <= 0".into()));
        }
        if s.iter().any(|v| v.ambient != d + 1 || v.dim() == 0 || v.dim() > d) {
            return Err(Error::Precondition("S must consist of components of Y".into()));
        }
        if !is_stable(&self.field, s) {
            return Err(Error::Precondition("S is not stable".into()));
        }
        self.prove(d, ClaimDivisor::Removed { abar: abar.to_vec(), removed: sorted(s.to_vec()) }, 1, UNBOUNDED)
            .ok_or_else(|| Error::NoApplicableRule("the T(W)/Q_i induction did not close".into()))
    }

    /// Certificate for `h^t((D(abar, 0, 0) - D_{S'}) on W_S) = 0`, `t > 0`.
    pub fn certify_intersection(
        &mut self,
        s: &[SubspaceForm],
        s_prime: &[SubspaceForm],
        abar: &[i64],
    ) -> Result<Arc<Certificate>> {
        let d = abar.len();
        if abar.iter().any(|&a| a > 0) {
            return Err(Error::Precondition("abar must be <= 0".into()));
        }
        if s.iter().any(|v| s_prime.contains(v)) {
            return Err(Error::Precondition("S and S' must be disjoint".into()));
        }
        let all: Vec<&SubspaceForm> = s.iter().chain(s_prime).collect();
        for (i, v) in all.iter().enumerate() {
            for w in &all[i + 1..] {
                if !components_meet(&self.field, v, w) {
                    return Err(Error::Precondition("W_{S u S'} is empty".into()));
                }
            }
        }
        let div = ClaimDivisor::restricted(abar, sorted(s_prime.to_vec()), sorted(s.to_vec()));
        self.prove(d, div, 1, UNBOUNDED)
            .ok_or_else(|| Error::NoApplicableRule("the induction on |S| did not close".into()))
    }

    /// The section complex for `S = {line}` on the surface, with explicit
    /// evaluation matrices, and the vanishing certificate behind its exactness.
    pub fn build_exact_triple(&mut self, s: &[SubspaceForm], m0: &[SubspaceForm], abar: &[i64]) -> Result<ExactTriple> {
        let d = abar.len();
        let f = self.field.clone();
        if d != 2 || s.len() != 1 || s[0].dim() != 2 || s[0].ambient != 3 {
            return Err(Error::Precondition("explicit matrices need d = 2 and S a single line".into()));
        }
        if abar.iter().any(|&a| a > 0) {
            return Err(Error::Precondition("abar must be <= 0".into()));
        }
        let line = &s[0];
        if m0.is_empty() || !is_stable(&f, m0) {
            return Err(Error::Precondition("M0 must be nonempty and stable".into()));
        }
        if m0.iter().any(|v| v.ambient != 3 || !components_meet(&f, v, line)) {
            return Err(Error::Precondition("M0 must lie in N(S)".into()));
        }
        let m0 = sorted(m0.to_vec());
        let spec = DivisorSpec { d, abar: abar.to_vec(), n: vec![0; d], m: vec![0; d] };
        let cat = self.catalogs(2)[2].clone();
        let class = oracle::pic_class(&build_divisor(&spec, &cat)?, &f)?;
        let line_class = oracle::pic_class(&divisor_of_set(2, f.q(), std::slice::from_ref(line)), &f)?;
        let degree = class.pairing(&line_class);
        let n0 = line_h0(degree) as usize;
        // point P = s v1 + t v2 on the line; (s, t) read off at the pivots
        let pivots: Vec<usize> = line.rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
        let eval = |p: &SubspaceForm| -> Vec<Elem> {
            let (sv, tv) = (p.rows[0][pivots[0]], p.rows[0][pivots[1]]);
            (0..n0).map(|i| f.mul(f.pow(sv, i as u64), f.pow(tv, (n0 - 1 - i) as u64))).collect()
        };
        let mut offsets = Vec::new();
        let mut n1 = 0;
        for v in &m0 {
            offsets.push(n1);
            n1 += if v == line { n0 } else { 1 };
        }
        let mut first: Matrix = vec![vec![0; n0]; n1];
        for (k, v) in m0.iter().enumerate() {
            if v == line {
                for i in 0..n0 {
                    first[offsets[k] + i][i] = 1;
                }
            } else {
                first[offsets[k]] = eval(v);
            }
        }
        let mut second: Matrix = Vec::new();
        for (a, va) in m0.iter().enumerate() {
            for (b, vb) in m0.iter().enumerate().skip(a + 1) {
                if !components_meet(&f, va, vb) {
                    continue;
                }
                let (pt, lk, pk) = match (va == line, vb == line) {
                    (true, false) => (vb, a, b),
                    (false, true) => (va, b, a),
                    _ => return Err(Error::Precondition("unsupported pair in M0".into())),
                };
                let mut row = vec![0; n1];
                row[offsets[pk]] = 1;
                for (i, x) in eval(pt).into_iter().enumerate() {
                    row[offsets[lk] + i] = f.neg(x);
                }
                second.push(row);
            }
        }
        let n2 = second.len();
        let report = exactness_over_field(&f, &first, &second, [n0, n1, n2])?;
        let cert = self.prove(2, ClaimDivisor::restricted(abar, m0.clone(), s.to_vec()), 1, UNBOUNDED).map(|c| {
            let div = ClaimDivisor::restricted(abar, vec![], s.to_vec());
            let measure = [2, STAGE_TRIPLE, 0];
            self.node(
                Rule::ExactTriple,
                2,
                div,
                c.claim.vanishing_from,
                measure,
                None,
                vec![Child { role: Role::Kernel, multiplicity: 1, component: None, cert: c }],
            )
        });
        Ok(ExactTriple { degree, dims: [n0, n1, n2], first_map: first, second_map: second, report, certificate: cert })
    }
}

/// The hypotheses of each rule that `spec` violates.
pub fn diagnose(spec: &DivisorSpec, from: usize) -> String {
    let mut why = Vec::new();
    match shift_hypotheses(spec) {
        Ok(()) if spec.abar.iter().any(|&a| a != 0) => why.push("nullsta: abar != 0".to_string()),
        Ok(()) => {}
        Err(e) => why.push(format!("nullsta: {e}")),
    }
    if let Err(e) = ladder_hypotheses(spec) {
        why.push(format!("gallgvan: {e}"));
    } else {
        let e = vanishing_bound(&spec.abar);
        if from <= e {
            why.push(format!("gallgvan: requested range t >= {from} but e = {e}"));
        }
    }
    if why.is_empty() {
        why.push("hypotheses hold but a recursion piece could not be proved".into());
    }
    format!("no proof of h^t = 0 for t >= {from}: {}", why.join("; "))
}

/// Replays a certificate: measures decrease along every edge, leaves are
/// valid base facts, Künneth and exact-sequence thresholds are consistent,
/// and for invariant divisors the pieces are the stated restrictions.
pub fn verify(cert: &Certificate) -> Result<()> {
    let mut seen = HashSet::new();
    verify_node(cert, &mut seen)
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(format!("certificate check failed: {}", msg.into())))
}

fn claim_coefficients(div: &ClaimDivisor) -> Option<&InvariantDivisor> {
    match div {
        ClaimDivisor::Invariant { coefficients, .. } => Some(coefficients),
        _ => None,
    }
}

fn verify_node(cert: &Certificate, seen: &mut HashSet<*const Certificate>) -> Result<()> {
    let claim = &cert.claim;
    let from = claim.vanishing_from;
    for ch in &cert.children {
        if ch.cert.measure >= cert.measure {
            return fail(format!("measure {:?} does not decrease to {:?}", cert.measure, ch.cert.measure));
        }
    }
    match cert.rule {
        Rule::Dimension => {
            if from <= claim.d {
                return fail("dimension leaf below the dimension");
            }
        }
        Rule::BaseP1 => {
            let deg = match &claim.divisor {
                ClaimDivisor::Invariant { coefficients, .. } if claim.d == 1 => line_degree(coefficients, claim.q),
                ClaimDivisor::Removed { abar, removed } if claim.d == 1 => {
                    let spec = DivisorSpec { d: 1, abar: abar.clone(), n: vec![0], m: vec![0] };
                    line_degree(&InvariantDivisor::from_spec(&spec), claim.q) - removed.len() as i64
                }
                _ => return fail("P^1 leaf on a claim that is not a line bundle on P^1"),
            };
            if line_threshold(deg) > from {
                return fail(format!("O({deg}) on P^1 does not vanish from {from}"));
            }
        }
        Rule::BasePullback => {
            let c = claim_coefficients(&claim.divisor).ok_or_else(|| Error::Precondition("pullback leaf".into()))?;
            match pullback_degree(c) {
                Some(k) if pullback_threshold(k, claim.d) <= from => {}
                _ => return fail("not a pullback with the claimed vanishing"),
            }
        }
        Rule::Kunneth => {
            let ClaimDivisor::Product { inner_d, inner, outer_d, outer } = &claim.divisor else {
                return fail("Künneth node without a product claim");
            };
            let mut got = [inner_d + 1, outer_d + 1];
            for ch in &cert.children {
                let (slot, d, div) = match ch.role {
                    Role::InnerFactor => (0, *inner_d, inner.as_ref()),
                    Role::OuterFactor => (1, *outer_d, outer.as_ref()),
                    _ => return fail("unexpected child of a Künneth node"),
                };
                if ch.cert.claim.d != d || !same_bundle(&ch.cert.claim.divisor, div) {
                    return fail("Künneth factor does not match the product");
                }
                got[slot] = ch.cert.claim.vanishing_from;
            }
            if claim.d != inner_d + outer_d || kunneth(got[0], got[1]) > from {
                return fail("Künneth threshold");
            }
        }
        _ => {
            if cert.children.is_empty() {
                return fail(format!("{:?} node without children", cert.rule));
            }
        }
    }
    for ch in &cert.children {
        let t = ch.cert.claim.vanishing_from;
        let ok = match (cert.position, ch.role) {
            (_, Role::InnerFactor | Role::OuterFactor) => true,
            (_, Role::Equivalent) => t <= from,
            (Some(Position::Middle), Role::Kernel | Role::Quotient) => t <= from,
            (Some(Position::Kernel), Role::Middle) => t <= from,
            (Some(Position::Kernel), Role::Quotient) => t <= from.saturating_sub(1),
            (Some(Position::Quotient), Role::Middle) => t <= from,
            (Some(Position::Quotient), Role::Kernel) => t <= from + 1,
            (None, Role::Kernel) if cert.rule == Rule::ExactTriple => t <= 1,
            _ => false,
        };
        if !ok {
            return fail(format!("{:?} child of {:?} node vanishes only from {t}, need {from}", ch.role, cert.rule));
        }
    }
    verify_invariant_step(cert)?;
    for ch in &cert.children {
        if seen.insert(Arc::as_ptr(&ch.cert)) {
            verify_node(&ch.cert, seen)?;
        }
    }
    Ok(())
}

/// Coefficients of claims that are invariant divisors, in any notation.
fn invariant_form(div: &ClaimDivisor) -> Option<InvariantDivisor> {
    match div {
        ClaimDivisor::Invariant { coefficients, .. } => Some(coefficients.clone()),
        ClaimDivisor::Removed { abar, removed } if removed.is_empty() => {
            let d = abar.len();
            Some(InvariantDivisor::from_spec(&DivisorSpec { d, abar: abar.clone(), n: vec![0; d], m: vec![0; d] }))
        }
        _ => None,
    }
}

/// Whether two claims describe the same line bundle.
fn same_bundle(a: &ClaimDivisor, b: &ClaimDivisor) -> bool {
    match (a, b) {
        (
            ClaimDivisor::Product { inner_d: i1, inner: a1, outer_d: o1, outer: b1 },
            ClaimDivisor::Product { inner_d: i2, inner: a2, outer_d: o2, outer: b2 },
        ) => i1 == i2 && o1 == o2 && same_bundle(a1, a2) && same_bundle(b1, b2),
        _ => match (invariant_form(a), invariant_form(b)) {
            (Some(x), Some(y)) => x == y,
            _ => a == b,
        },
    }
}

fn product_parts(div: &ClaimDivisor) -> Option<(&InvariantDivisor, &InvariantDivisor)> {
    match div {
        ClaimDivisor::Product { inner, outer, .. } => Some((claim_coefficients(inner)?, claim_coefficients(outer)?)),
        _ => None,
    }
}

/// Divisor arithmetic of orbit and ladder steps on invariant divisors.
fn verify_invariant_step(cert: &Certificate) -> Result<()> {
    let Some(c) = claim_coefficients(&cert.claim.divisor) else {
        return Ok(());
    };
    let (d, q) = (cert.claim.d, cert.claim.q);
    let pieces: Vec<&Child> = cert.children.iter().filter(|ch| ch.role == Role::Quotient).collect();
    let other = cert.children.iter().find(|ch| matches!(ch.role, Role::Kernel | Role::Middle));
    match cert.rule {
        Rule::ShiftAcyclic | Rule::ShiftHigher | Rule::OrbitStep => {
            let other = other.ok_or_else(|| Error::Precondition("missing sub-term".into()))?;
            let oc = claim_coefficients(&other.cert.claim.divisor)
                .ok_or_else(|| Error::Precondition("sub-term is not invariant".into()))?;
            let (big, small) = match cert.position {
                Some(Position::Middle) => (c, oc),
                Some(Position::Kernel) => (oc, c),
                _ => return fail("orbit step without a position"),
            };
            let mut expect = small.clone();
            for ch in &pieces {
                let sigma = ch.component.ok_or_else(|| Error::Precondition("piece without component".into()))?;
                expect.set(sigma, expect.coeff(sigma) + 1);
                if ch.multiplicity != orbit_size(d, sigma, q) {
                    return fail("orbit multiplicity");
                }
                let (i, o) = big.restrict(sigma);
                if product_parts(&ch.cert.claim.divisor) != Some((&i, &o)) {
                    return fail("piece is not the restriction to V_sigma");
                }
            }
            if expect != *big {
                return fail("kernel and middle differ by more than the listed orbits");
            }
            let sizes: BTreeSet<usize> = pieces.iter().filter_map(|p| p.component.map(|s| s.len())).collect();
            if sizes.len() > 1 {
                return fail("orbits of different sizes may meet");
            }
        }
        Rule::WeightLadder => {
            let j = cert.pivot.ok_or_else(|| Error::Precondition("ladder without pivot".into()))?;
            let ClaimDivisor::Invariant { spec: Some(spec), .. } = &cert.claim.divisor else {
                return fail("ladder on an unstructured claim");
            };
            let other = other.ok_or_else(|| Error::Precondition("missing sub-term".into()))?;
            let oc = claim_coefficients(&other.cert.claim.divisor)
                .ok_or_else(|| Error::Precondition("ladder sub-term is not invariant".into()))?;
            let mut shifted = spec.clone();
            let base = match cert.position {
                Some(Position::Kernel) => {
                    shifted.abar[j - 1] -= 1;
                    &shifted
                }
                Some(Position::Middle) => {
                    shifted.abar[j - 1] += 1;
                    spec
                }
                _ => return fail("ladder without a position"),
            };
            if InvariantDivisor::from_spec(&shifted) != *oc {
                return fail("ladder endpoints are not abar and abar + e_j");
            }
            let bc = InvariantDivisor::from_spec(base);
            let f = Field::new(q)?;
            let mut expected = Vec::new();
            for k in 1..=d {
                for tau in proper_subsets(d) {
                    if tau.len() != k || !tau.contains(j) {
                        continue;
                    }
                    let mult = enumerate_u_tau(&f, d, tau).iter().filter(|u| !in_u_tau_b(d, u, tau, j)).count() as u64;
                    if mult > 0 {
                        expected.push((tau, mult));
                    }
                }
            }
            if expected.len() != pieces.len() {
                return fail("ladder pieces do not cover the quotient");
            }
            for ((tau, mult), ch) in expected.into_iter().zip(&pieces) {
                if ch.component != Some(tau) || ch.multiplicity != mult {
                    return fail("ladder piece component or multiplicity");
                }
                let k = tau.len();
                let hat = InvariantDivisor::from_fn(d, |s| bc.coeff(s) - i64::from(s.contains(j) && s.len() < k));
                let (i, o) = hat.restrict(tau);
                if product_parts(&ch.cert.claim.divisor) != Some((&i, &o)) {
                    return fail("ladder piece is not the restriction of the hat divisor");
                }
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(vanishing_bound(&[-1, 0]), 0);
        assert_eq!(vanishing_bound(&[1, 0]), 1);
        assert_eq!(vanishing_bound(&[0, 1]), 2);
        assert_eq!(vanishing_bound(&[]), 0);
    }

    #[test]
    fn shift_kernel_preserves_coefficients() {
        let spec = DivisorSpec::new(vec![1, -2, 0], vec![-2, -1, -1], vec![0, 1, 1]).unwrap();
        for t in -3..=3 {
            assert_eq!(InvariantDivisor::from_spec(&shift_spec(&spec, t)), InvariantDivisor::from_spec(&spec));
        }
    }

    #[test]
    fn orbit_sizes_match_catalog() {
        let f = Field::new(3).unwrap();
        for d in 1..=3 {
            let cat = Catalog::new(&f, d);
            for s in proper_subsets(d) {
                assert_eq!(cat.orbit(s).len() as u64, orbit_size(d, s, 3));
            }
        }
    }

    #[test]
    fn line_bundles_on_p1() {
        let mut e = Engine::new(2).unwrap();
        for k in -3..=3i64 {
            // D(0, (k), (0)) on P^1 is O(k)
            let spec = DivisorSpec::new(vec![0], vec![k], vec![0]).unwrap();
            match e.h0_dim(&spec) {
                Ok((h0, _)) => assert_eq!(h0, line_h0(k)),
                Err(_) => assert!(k < -1),
            }
        }
    }

    #[test]
    fn pullback_sections() {
        let mut e = Engine::new(3).unwrap();
        for d in 1..=3usize {
            for k in 0..=3i64 {
                let spec = DivisorSpec::new(vec![0; d], vec![k; d], vec![0; d]).unwrap();
                let (h0, cert) = e.h0_dim(&spec).unwrap();
                assert_eq!(h0, binomial(k + d as i64, d as i64));
                verify(&cert).unwrap();
            }
        }
    }

    #[test]
    fn euler_characteristic_of_pullbacks() {
        let mut e = Engine::new(2).unwrap();
        for k in -4..=3i64 {
            let c = InvariantDivisor::from_fn(2, |s| if s.contains(0) { k } else { 0 });
            // chi(P^2, O(k)) = (k+1)(k+2)/2
            assert_eq!(e.euler_characteristic(&c), (k + 1) * (k + 2) / 2);
        }
    }

    #[test]
    fn acyclic_example_has_no_sections() {
        // abar(tau={1}) with n = -1 on the surface over F_3
        let mut e = Engine::new(3).unwrap();
        let spec = DivisorSpec::new(vec![-1, 0], vec![-1, -1], vec![0, 0]).unwrap();
        let (h0, cert) = e.h0_dim(&spec).unwrap();
        assert_eq!(h0, 0);
        verify(&cert).unwrap();
    }

    #[test]
    fn refusal_names_hypothesis() {
        let mut e = Engine::new(2).unwrap();
        let spec = DivisorSpec::new(vec![0, 0], vec![-3, -3], vec![0, 0]).unwrap();
        let err = e.certify(&spec, None).unwrap_err().to_string();
        assert!(err.contains("n_1 = -3 < -d"), "{err}");
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let mut e = Engine::new(2).unwrap();
        let spec = DivisorSpec::new(vec![-1, 0], vec![0, 0], vec![0, 0]).unwrap();
        let cert = e.certify(&spec, None).unwrap();
        verify(&cert).unwrap();
        let mut bad = (*cert).clone();
        bad.claim.vanishing_from = 0;
        assert!(verify(&bad).is_err() || cert.claim.vanishing_from == 0);
        let mut bad = (*cert).clone();
        bad.measure = [0, 0, 0];
        assert!(verify(&bad).is_err());
    }
}

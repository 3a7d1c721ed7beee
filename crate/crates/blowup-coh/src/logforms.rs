//! Logarithmic differential forms on `Y`, the polynomials `gamma_j`, the forms
//! `omega_s` and generalized Steinberg dimensions.
//!
//! `GL_{d+1}(k)` acts on the homogeneous coordinates by `Xi_j -> sum_i Xi_i g_ij`,
//! hence on `z_r = Xi_r / Xi_0` by fractional linear substitution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::blowup::{free_entries_log, proper_subsets, unipotents_with, Catalog, TauSet, UnipotentMatrix};
use crate::divisor::{gamma_invariant, InvariantDivisor};
use crate::error::{domain, Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{self, Matrix};
use crate::oracle::valuation_of_poly;
use crate::poly::Poly;
use crate::qcomb::q_multinomial;

/// `abar(tau)`: `-1` at the members of `tau`, `0` elsewhere.
pub fn atau(tau: TauSet, d: usize) -> Result<Vec<i64>> {
    if tau.contains(0) || !tau.is_subset(TauSet::full(d)) {
        return domain(format!("{:?} is not a subset of [1, {d}]", tau.members()));
    }
    Ok((1..=d).map(|i| -i64::from(tau.contains(i))).collect())
}

/// `m_j^s = max(0, s-j) q - max(0, s-j+1)`.
pub fn mjs(j: usize, s: usize, q: u32) -> i64 {
    let (j, s) = (j as i64, s as i64);
    (s - j).max(0) * i64::from(q) - (s - j + 1).max(0)
}

/// The `s`-element subsets of `{1, ..., d}`, ordered by bitmask.
pub fn p_s(d: usize, s: usize) -> Vec<TauSet> {
    (0u32..1 << d).map(|b| TauSet(b << 1)).filter(|t| t.len() == s).collect()
}

/// `sum_{tau in P_s} q^{sum tau}`.
pub fn log_basis_size(s: usize, d: usize, q: u64) -> Result<u128> {
    if s > d {
        return domain(format!("degree {s} exceeds dimension {d}"));
    }
    p_s(d, s).iter().try_fold(0u128, |acc, t| {
        let e: usize = t.members().iter().sum();
        (q as u128)
            .checked_pow(e as u32)
            .and_then(|v| acc.checked_add(v))
            .ok_or_else(|| Error::Domain("log basis size overflows".into()))
    })
}

/// `gamma_j = prod_{(a_0..a_{j-1}) in k^j} (z_j + a_{j-1} z_{j-1} + ... + a_1 z_1 + a_0)`
/// as a polynomial in `z_1, ..., z_d`.
pub fn gamma_poly(j: usize, f: &Field, d: usize, budget: u128) -> Result<Poly> {
    if j == 0 || j > d {
        return domain(format!("gamma index must satisfy 1 <= j <= {d}"));
    }
    let q = f.q() as u128;
    let needed = q.pow(j as u32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Poly::constant(d, 1);
    for mut code in 0..needed {
        let mut coeffs = vec![0; d];
        coeffs[j - 1] = 1;
        let a0 = (code % q) as Elem;
        code /= q;
        for c in coeffs.iter_mut().take(j - 1) {
            *c = (code % q) as Elem;
            code /= q;
        }
        out = out.mul(f, &Poly::linear(f, &coeffs, a0));
    }
    Ok(out)
}

/// `A . dlog z_{t_1} ^ ... ^ dlog z_{t_s}` with `A in U(tau)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogBasisElement {
    #[serde(serialize_with = "members")]
    pub tau: TauSet,
    pub matrix: UnipotentMatrix,
}

fn members<S: Serializer>(t: &TauSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.members().serialize(s)
}

/// The basis `{A . dlog(z_tau) : tau in P_s, A in U(tau)}` of `H^0(Y, Omega^s)`.
pub fn log_basis(s: usize, d: usize, f: &Field) -> Result<Vec<LogBasisElement>> {
    if s > d {
        return domain(format!("degree {s} exceeds dimension {d}"));
    }
    Ok(p_s(d, s)
        .into_iter()
        .flat_map(|tau| {
            unipotents_with(f, d, &free_entries_log(tau)).into_iter().map(move |matrix| LogBasisElement { tau, matrix })
        })
        .collect())
}

/// Dimension of the generalized Steinberg representation attached to `P_s`,
/// by alternating summation of `|G(k)/P(k)|` over the parabolics containing
/// `P_s` (block sizes `(1, ..., 1, d+1-s)`).
pub fn steinberg_dim(d: usize, q: u64, s: usize) -> Result<i128> {
    if s > d {
        return domain(format!("degree {s} exceeds dimension {d}"));
    }
    let mut fine = vec![1usize; s];
    fine.push(d + 1 - s);
    let mut total: i128 = 0;
    for kept in 0u32..1 << s {
        let mut blocks = Vec::new();
        let mut cur = 0;
        for (i, &b) in fine.iter().enumerate() {
            cur += b;
            if i == fine.len() - 1 || kept >> i & 1 == 1 {
                blocks.push(cur);
                cur = 0;
            }
        }
        let count = q_multinomial(&blocks, q)? as i128;
        let removed = s as u32 - kept.count_ones();
        total += if removed.is_multiple_of(2) { count } else { -count };
    }
    Ok(total)
}

/// A fraction of polynomials. The denominator is normalized to have leading
/// coefficient one and no common monomial factor with the numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> RatFunc {
        let n = p.nvars;
        RatFunc { num: p, den: Poly::constant(n, 1) }
    }

    pub fn new(f: &Field, num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return domain("zero denominator");
        }
        Ok(RatFunc { num, den }.normalized(f))
    }

    fn normalized(self, f: &Field) -> RatFunc {
        let n = self.num.nvars;
        if self.num.is_zero() {
            return RatFunc { num: self.num, den: Poly::constant(n, 1) };
        }
        let mut num = self.num;
        let mut den = self.den;
        let common: Vec<u32> = (0..n).map(|i| num.min_exponent(i).unwrap().min(den.min_exponent(i).unwrap())).collect();
        if common.iter().any(|&e| e > 0) {
            let shift = |p: &Poly| Poly {
                nvars: n,
                terms: p.terms.iter().map(|(m, &c)| (m.iter().zip(&common).map(|(a, b)| a - b).collect(), c)).collect(),
            };
            num = shift(&num);
            den = shift(&den);
        }
        if let Some(h) = div_exact(f, &num, &den) {
            return RatFunc { num: h, den: Poly::constant(n, 1) };
        }
        let lead = *den.terms.values().next_back().unwrap();
        let inv = f.inv(lead);
        RatFunc { num: num.scale(f, inv), den: den.scale(f, inv) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, f: &Field, o: &RatFunc) -> RatFunc {
        RatFunc { num: self.num.mul(f, &o.num), den: self.den.mul(f, &o.den) }.normalized(f)
    }

    pub fn add(&self, f: &Field, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc { num: self.num.add(f, &o.num), den: self.den.clone() }.normalized(f);
        }
        let num = self.num.mul(f, &o.den).add(f, &o.num.mul(f, &self.den));
        RatFunc { num, den: self.den.mul(f, &o.den) }.normalized(f)
    }

    pub fn scale(&self, f: &Field, c: Elem) -> RatFunc {
        RatFunc { num: self.num.scale(f, c), den: self.den.clone() }.normalized(f)
    }

    pub fn inv(&self, f: &Field) -> Result<RatFunc> {
        RatFunc::new(f, self.den.clone(), self.num.clone())
    }

    /// `self^e` for any integer `e`.
    pub fn pow(&self, f: &Field, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv(f)? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFunc { num: base.num.pow(f, k), den: base.den.pow(f, k) }.normalized(f))
    }

    /// Equality as rational functions.
    pub fn same(&self, f: &Field, o: &RatFunc) -> bool {
        self.num.mul(f, &o.den) == o.num.mul(f, &self.den)
    }

    /// Substitutes `z_r -> numerators[r] / den`.
    pub fn substitute(&self, f: &Field, den: &Poly, numerators: &[Poly]) -> RatFunc {
        let mut images = vec![den.clone()];
        images.extend_from_slice(numerators);
        let lift = |p: &Poly| -> (Poly, u32) {
            match p.degree() {
                None => (p.clone(), 0),
                Some(deg) => (p.homogenize(deg).substitute(f, &images), deg),
            }
        };
        let (pn, dn) = lift(&self.num);
        let (pd, dd) = lift(&self.den);
        let k = dn.min(dd);
        let num = pn.mul(f, &den.pow(f, dd - k));
        let dnm = pd.mul(f, &den.pow(f, dn - k));
        RatFunc { num, den: dnm }.normalized(f)
    }
}

/// Exact quotient `p / q` when `q` divides `p`.
pub fn div_exact(f: &Field, p: &Poly, q: &Poly) -> Option<Poly> {
    let (lm, &lc) = q.terms.iter().next_back()?;
    let inv = f.inv(lc);
    let mut rem = p.clone();
    let mut out = Poly::zero(p.nvars);
    while let Some((m, &c)) = rem.terms.iter().next_back() {
        if m.iter().zip(lm).any(|(a, b)| a < b) {
            return None;
        }
        let e: Vec<u32> = m.iter().zip(lm).map(|(a, b)| a - b).collect();
        let t = Poly::monomial(p.nvars, e, f.mul(c, inv));
        rem = rem.sub(f, &t.mul(f, q));
        out = out.add(f, &t);
    }
    Some(out)
}

/// A differential form `sum_tau c_tau dz_tau` of degree `s` in `z_1, ..., z_d`.
#[derive(Clone, Debug)]
pub struct SymbolicForm {
    pub d: usize,
    pub degree: usize,
    /// Sorted index sets (1-based) to nonzero coefficients.
    pub terms: BTreeMap<Vec<usize>, RatFunc>,
}

impl SymbolicForm {
    pub fn zero(d: usize, degree: usize) -> SymbolicForm {
        SymbolicForm { d, degree, terms: BTreeMap::new() }
    }

    /// `c dz_{idx}` with `idx` in any order.
    pub fn monomial(f: &Field, d: usize, idx: &[usize], c: RatFunc) -> SymbolicForm {
        let mut sorted = idx.to_vec();
        let mut sign_neg = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    sign_neg = !sign_neg;
                }
            }
        }
        let mut out = SymbolicForm::zero(d, idx.len());
        if sorted.windows(2).any(|w| w[0] == w[1]) || c.is_zero() {
            return out;
        }
        let c = if sign_neg { c.scale(f, f.neg(1)) } else { c };
        out.terms.insert(sorted, c);
        out
    }

    pub fn add(&self, f: &Field, o: &SymbolicForm) -> SymbolicForm {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            let v = match out.terms.get(k) {
                Some(e) => e.add(f, c),
                None => c.clone(),
            };
            if v.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    /// Equality after clearing denominators termwise.
    pub fn same(&self, f: &Field, o: &SymbolicForm) -> bool {
        let zero = RatFunc::from_poly(Poly::zero(self.d));
        let keys: std::collections::BTreeSet<&Vec<usize>> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter().all(|k| self.terms.get(k).unwrap_or(&zero).same(f, o.terms.get(k).unwrap_or(&zero)))
    }

    /// `g . self`, the pullback along `Xi -> Xi g`.
    pub fn act(&self, f: &Field, g: &[Vec<Elem>]) -> SymbolicForm {
        let d = self.d;
        let (den, nums) = substitution(f, g);
        // Jacobian numerators over den^2
        let jac: Vec<Vec<Poly>> = nums
            .iter()
            .map(|nr| {
                (0..d).map(|k| nr.derivative(f, k).mul(f, &den).sub(f, &nr.mul(f, &den.derivative(f, k)))).collect()
            })
            .collect();
        let s = self.degree;
        let den_power = den.pow(f, 2 * s as u32);
        let mut out = SymbolicForm::zero(d, s);
        let targets: Vec<Vec<usize>> = p_s(d, s).iter().map(|t| t.members()).collect();
        for (idx, c) in &self.terms {
            let c = c.substitute(f, &den, &nums);
            for sigma in &targets {
                let minor: Vec<Vec<Poly>> =
                    idx.iter().map(|&r| sigma.iter().map(|&k| jac[r - 1][k - 1].clone()).collect()).collect();
                let det = poly_det(f, &minor, d);
                if det.is_zero() {
                    continue;
                }
                let term = c.mul(f, &RatFunc { num: det, den: den_power.clone() }.normalized(f));
                out = out.add(f, &SymbolicForm::monomial(f, d, sigma, term));
            }
        }
        out
    }
}

/// `(D, N_1..N_d)` with `z_r -> N_r / D` under `Xi -> Xi g`.
fn substitution(f: &Field, g: &[Vec<Elem>]) -> (Poly, Vec<Poly>) {
    let d = g.len() - 1;
    let col = |c: usize| {
        let coeffs: Vec<Elem> = (1..=d).map(|i| g[i][c]).collect();
        Poly::linear(f, &coeffs, g[0][c])
    };
    (col(0), (1..=d).map(col).collect())
}

fn poly_det(f: &Field, m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::constant(nvars, 1);
    }
    let mut out = Poly::zero(nvars);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let sub: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, p)| p.clone()).collect())
            .collect();
        let t = m[0][c].mul(f, &poly_det(f, &sub, nvars));
        out = if c % 2 == 0 { out.add(f, &t) } else { out.sub(f, &t) };
    }
    out
}

/// The form `A . dlog z_{t_1} ^ ... ^ dlog z_{t_s}`.
pub fn log_form(f: &Field, d: usize, e: &LogBasisElement) -> Result<SymbolicForm> {
    let idx = e.tau.members();
    let mut den = Poly::constant(d, 1);
    for &t in &idx {
        den = den.mul(f, &Poly::var(d, t - 1));
    }
    let base = SymbolicForm::monomial(f, d, &idx, RatFunc::new(f, Poly::constant(d, 1), den)?);
    Ok(base.act(f, &e.matrix))
}

/// Rank over `k` of the forms of `log_basis(s, d)`, computed on numerators
/// over a common denominator.
pub fn log_basis_rank(s: usize, d: usize, f: &Field) -> Result<usize> {
    let basis = log_basis(s, d, f)?;
    let forms: Vec<SymbolicForm> = basis.iter().map(|e| log_form(f, d, e)).collect::<Result<_>>()?;
    // every denominator divides a product of the distinct pulled-back z_t
    let mut factors: Vec<Poly> = basis
        .iter()
        .flat_map(|e| {
            let (_, nums) = substitution(f, &e.matrix);
            e.tau.members().into_iter().map(move |t| nums[t - 1].clone())
        })
        .collect();
    factors.sort();
    factors.dedup();
    let common = factors.iter().fold(Poly::constant(d, 1), |acc, p| acc.mul(f, p));
    let mut columns: BTreeMap<(Vec<usize>, Vec<u32>), usize> = BTreeMap::new();
    let mut sparse = Vec::new();
    for w in &forms {
        let mut row = Vec::new();
        for (idx, c) in &w.terms {
            let scaled = c.num.mul(f, &div_exact(f, &common, &c.den).expect("denominator divides the product"));
            for (m, &v) in &scaled.terms {
                let n = columns.len();
                let col = *columns.entry((idx.clone(), m.clone())).or_insert(n);
                row.push((col, v));
            }
        }
        sparse.push(row);
    }
    let rows: Matrix = sparse
        .into_iter()
        .map(|r| {
            let mut dense = vec![0; columns.len()];
            for (c, v) in r {
                dense[c] = v;
            }
            dense
        })
        .collect();
    Ok(linalg::rank(f, &rows))
}

/// `prod_j gamma_j^{m_j^s}`.
pub fn omega_coefficient(s: usize, d: usize, f: &Field, budget: u128) -> Result<RatFunc> {
    let mut acc = RatFunc::from_poly(Poly::constant(d, 1));
    for j in 1..=d {
        let m = mjs(j, s, f.q());
        if m != 0 {
            acc = acc.mul(f, &RatFunc::from_poly(gamma_poly(j, f, d, budget)?).pow(f, m)?);
        }
    }
    Ok(acc)
}

/// `omega_s = (prod_j gamma_j^{m_j^s}) dz_1 ^ ... ^ dz_s`.
pub fn omega_s(s: usize, d: usize, f: &Field, budget: u128) -> Result<SymbolicForm> {
    if s > d {
        return domain(format!("degree {s} exceeds dimension {d}"));
    }
    let idx: Vec<usize> = (1..=s).collect();
    Ok(SymbolicForm::monomial(f, d, &idx, omega_coefficient(s, d, f, budget)?))
}

/// Zero-pole divisor `D_s` bounding `omega_s`.
pub fn ds_divisor(s: usize, d: usize) -> InvariantDivisor {
    InvariantDivisor::from_fn(d, |sigma| {
        let low = (1..=s).filter(|&i| sigma.contains(i)).count() as i64;
        if sigma.contains(0) {
            low - s as i64
        } else {
            low
        }
    })
}

/// Zero-pole divisor of `prod_j gamma_j^{m_j^s}`, i.e. `-sum_j m_j^s div(gamma_j)`.
pub fn omega_zero_pole_divisor(s: usize, d: usize, q: u32) -> Result<InvariantDivisor> {
    let mut acc = InvariantDivisor::zero(d);
    for j in 1..=d {
        acc = acc.add(&gamma_invariant(j, d, q)?.scale(-mjs(j, s, q)));
    }
    Ok(acc)
}

/// How group elements are drawn for symbolic invariance checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "mode")]
pub enum Sampling {
    Exhaustive,
    Seeded { count: usize, seed: u64 },
}

fn all_unipotents(f: &Field, d: usize) -> Vec<Matrix> {
    let free: Vec<(usize, usize)> = (0..=d).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    unipotents_with(f, d, &free)
}

fn all_tori(f: &Field, d: usize) -> Vec<Matrix> {
    let units: Vec<Elem> = f.units().collect();
    let k = units.len();
    (0..k.pow(d as u32 + 1))
        .map(|mut code| {
            let mut t = linalg::identity(d + 1);
            for (i, row) in t.iter_mut().enumerate() {
                row[i] = units[code % k];
                code /= k;
            }
            t
        })
        .collect()
}

fn sample_group(f: &Field, d: usize, sampling: Sampling, torus: bool) -> Vec<Matrix> {
    match sampling {
        Sampling::Exhaustive => {
            if torus {
                all_tori(f, d)
            } else {
                all_unipotents(f, d)
            }
        }
        Sampling::Seeded { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(torus));
            let q = f.q();
            (0..count)
                .map(|_| {
                    let mut g = linalg::identity(d + 1);
                    for i in 0..=d {
                        if torus {
                            g[i][i] = rng.gen_range(1..q);
                        } else {
                            for j in i + 1..=d {
                                g[i][j] = rng.gen_range(0..q);
                            }
                        }
                    }
                    g
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DivisorBoundRow {
    #[serde(serialize_with = "members")]
    pub sigma: TauSet,
    pub zero_pole: i64,
    pub bound: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OmegaCheckReport {
    pub s: usize,
    pub d: usize,
    pub q: u32,
    pub exponents: Vec<i64>,
    pub sampling: Sampling,
    pub torus_elements: usize,
    pub unipotent_elements: usize,
    /// `t . gamma_j^{m_j^s} = (a_00 / a_jj) gamma_j^{m_j^s}` for every `j` with `m_j^s != 0`.
    pub torus_eigenvalues: bool,
    /// `t . omega_s = omega_s`.
    pub torus_invariant: bool,
    /// `u . omega_s = omega_s`.
    pub unipotent_invariant: bool,
    pub divisor_rows: Vec<DivisorBoundRow>,
    pub divisor_bound: bool,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Checks the torus eigenvalue identities, `U(k)`-invariance of `omega_s` and
/// the divisor bound by `D_s`.
pub fn omega_s_identities(s: usize, d: usize, f: &Field, sampling: Sampling, budget: u128) -> Result<OmegaCheckReport> {
    if s > d {
        return domain(format!("degree {s} exceeds dimension {d}"));
    }
    let q = f.q();
    let mut failures = Vec::new();
    let omega = omega_s(s, d, f, budget)?;
    let gammas: Vec<(usize, i64, RatFunc)> = (1..=d)
        .filter(|&j| mjs(j, s, q) != 0)
        .map(|j| {
            let m = mjs(j, s, q);
            Ok((j, m, RatFunc::from_poly(gamma_poly(j, f, d, budget)?).pow(f, m)?))
        })
        .collect::<Result<_>>()?;

    let tori = sample_group(f, d, sampling, true);
    let mut torus_eigenvalues = true;
    let mut torus_invariant = true;
    for t in &tori {
        let (den, nums) = substitution(f, t);
        for (j, _, g) in &gammas {
            let lhs = g.substitute(f, &den, &nums);
            let rhs = g.scale(f, f.div(t[0][0], t[*j][*j]));
            if !lhs.same(f, &rhs) {
                torus_eigenvalues = false;
                failures.push(format!("torus eigenvalue of gamma_{j} fails at diag {:?}", diag(t)));
            }
        }
        if !omega.act(f, t).same(f, &omega) {
            torus_invariant = false;
            failures.push(format!("omega_{s} is not fixed by diag {:?}", diag(t)));
        }
    }

    let unis = sample_group(f, d, sampling, false);
    let mut unipotent_invariant = true;
    for u in &unis {
        if !omega.act(f, u).same(f, &omega) {
            unipotent_invariant = false;
            failures.push(format!("omega_{s} is not fixed by {:?}", u));
        }
    }

    let zp = omega_zero_pole_divisor(s, d, q)?;
    let ds = ds_divisor(s, d);
    let divisor_rows: Vec<DivisorBoundRow> = proper_subsets(d)
        .into_iter()
        .map(|sigma| DivisorBoundRow { sigma, zero_pole: zp.coeff(sigma), bound: ds.coeff(sigma) })
        .collect();
    let divisor_bound = divisor_rows.iter().all(|r| r.zero_pole <= r.bound);
    if !divisor_bound {
        failures.push(format!("zero-pole divisor of omega_{s} exceeds D_{s}"));
    }
    Ok(OmegaCheckReport {
        s,
        d,
        q,
        exponents: (1..=d).map(|j| mjs(j, s, q)).collect(),
        sampling,
        torus_elements: tori.len(),
        unipotent_elements: unis.len(),
        torus_eigenvalues,
        torus_invariant,
        unipotent_invariant,
        divisor_bound,
        passed: failures.is_empty(),
        divisor_rows,
        failures,
    })
}

fn diag(t: &[Vec<Elem>]) -> Vec<Elem> {
    (0..t.len()).map(|i| t[i][i]).collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct GammaValuationRow {
    pub j: usize,
    pub component: Vec<Vec<Elem>>,
    #[serde(serialize_with = "members")]
    pub tau: TauSet,
    pub valuation: i64,
    pub formula: i64,
}

/// Vanishing order of `gamma_j` along every component of `Y` next to the
/// closed-form divisor, `d <= 2`.
pub fn gamma_valuations(f: &Field, d: usize, budget: u128) -> Result<Vec<GammaValuationRow>> {
    let cat = Catalog::new(f, d);
    let mut rows = Vec::new();
    for j in 1..=d {
        let g = gamma_poly(j, f, d, budget)?;
        let formula = gamma_invariant(j, d, f.q())?;
        for comp in cat.components() {
            let tau = cat.tau_of(comp).expect("catalog component");
            rows.push(GammaValuationRow {
                j,
                component: comp.rows.clone(),
                tau,
                valuation: valuation_of_poly(&g, comp, f)?,
                formula: formula.coeff(tau),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u128 = 1 << 20;

    #[test]
    fn atau_examples() {
        assert_eq!(atau(TauSet::empty(), 3).unwrap(), vec![0, 0, 0]);
        assert_eq!(atau(TauSet::from_slice(&[1, 2]), 2).unwrap(), vec![-1, -1]);
        assert!(atau(TauSet::from_slice(&[0]), 2).is_err());
    }

    #[test]
    fn mjs_examples() {
        assert_eq!(mjs(1, 0, 5), 0);
        for d in 1..5 {
            assert_eq!(mjs(d, d, 3), -1);
        }
        assert_eq!(mjs(1, 2, 2), 0);
        assert_eq!(mjs(1, 3, 3), 3);
    }

    #[test]
    fn gamma_one_over_f2() {
        let f = Field::new(2).unwrap();
        let g = gamma_poly(1, &f, 1, BUDGET).unwrap();
        let z = Poly::var(1, 0);
        assert_eq!(g, z.pow(&f, 2).add(&f, &z));
        assert!(matches!(gamma_poly(3, &f, 3, 4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn log_basis_small_sizes() {
        let f = Field::new(2).unwrap();
        assert_eq!(log_basis(0, 2, &f).unwrap().len(), 1);
        assert_eq!(log_basis(1, 2, &f).unwrap().len(), 6);
        assert_eq!(log_basis(2, 2, &f).unwrap().len(), 8);
        for s in 0..=2 {
            assert_eq!(log_basis_rank(s, 2, &f).unwrap(), log_basis(s, 2, &f).unwrap().len());
        }
    }

    #[test]
    fn steinberg_examples() {
        assert_eq!(steinberg_dim(3, 5, 0).unwrap(), 1);
        assert_eq!(steinberg_dim(2, 2, 2).unwrap(), 8);
        assert_eq!(steinberg_dim(2, 3, 1).unwrap(), 12);
    }

    #[test]
    fn rational_functions_cancel() {
        let f = Field::new(3).unwrap();
        let z = RatFunc::from_poly(Poly::var(2, 0));
        let w = RatFunc::from_poly(Poly::var(2, 1).add(&f, &Poly::constant(2, 1)));
        let r = z.mul(&f, &w).mul(&f, &w.inv(&f).unwrap());
        assert_eq!(r, z);
        assert!(z
            .pow(&f, -2)
            .unwrap()
            .mul(&f, &z.pow(&f, 2).unwrap())
            .same(&f, &RatFunc::from_poly(Poly::constant(2, 1))));
    }

    #[test]
    fn wedge_is_alternating() {
        let f = Field::new(3).unwrap();
        let one = RatFunc::from_poly(Poly::constant(2, 1));
        let a = SymbolicForm::monomial(&f, 2, &[2, 1], one.clone());
        let b = SymbolicForm::monomial(&f, 2, &[1, 2], one.clone());
        assert!(a.add(&f, &b).terms.is_empty());
        assert!(SymbolicForm::monomial(&f, 2, &[1, 1], one).terms.is_empty());
    }

    #[test]
    fn omega_zero_is_trivial() {
        let f = Field::new(2).unwrap();
        let r = omega_s_identities(0, 2, &f, Sampling::Exhaustive, BUDGET).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn omega_one_on_the_line() {
        let f = Field::new(2).unwrap();
        let om = omega_s(1, 1, &f, BUDGET).unwrap();
        let c = &om.terms[&vec![1]];
        assert!(c.same(&f, &RatFunc::from_poly(gamma_poly(1, &f, 1, BUDGET).unwrap()).inv(&f).unwrap()));
        let r = omega_s_identities(1, 1, &f, Sampling::Exhaustive, BUDGET).unwrap();
        assert_eq!(r.unipotent_elements, 2);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn log_forms_are_closed_under_their_group() {
        let f = Field::new(3).unwrap();
        let e = LogBasisElement { tau: TauSet::from_slice(&[1]), matrix: linalg::identity(2) };
        let base = log_form(&f, 1, &e).unwrap();
        // dlog z is fixed by the torus
        let t = vec![vec![1, 0], vec![0, 2]];
        assert!(base.act(&f, &t).same(&f, &base));
        let u = vec![vec![1, 1], vec![0, 1]];
        assert!(!base.act(&f, &u).same(&f, &base));
    }
}

//! q-analog counting and enumeration of rational linear subspaces.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{Elem, Field};
use crate::linalg;
use crate::par;

/// Default cap on the number of candidate matrices an enumeration may touch.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: i64, k: i64, q: u64) -> Result<u128> {
    if k < 0 || k > n {
        return domain(format!("gaussian_binomial needs 0 <= k <= n, got n={n}, k={k}"));
    }
    let q = q as u128;
    let (n, k) = (n as u32, k as u32);
    let overflow = || Error::Domain("gaussian binomial overflow".into());
    let minus_one = |e: u32| q.checked_pow(e).map(|v| v - 1).ok_or_else(overflow);
    // [n, i+1] = [n, i] (q^{n-i} - 1) / (q^{i+1} - 1), and each quotient is exact
    let mut value: u128 = 1;
    for i in 0..k {
        let (a, b) = (minus_one(n - i)?, minus_one(i + 1)?);
        let g = gcd(value, b);
        let (v, b) = (value / g, b / g);
        let h = gcd(a, b);
        value = v.checked_mul(a / h).ok_or_else(overflow)? / (b / h);
    }
    Ok(value)
}

/// q-multinomial coefficient for block sizes summing to `n`: the number of
/// flags with these successive block dimensions in `F_q^n`.
pub fn q_multinomial(blocks: &[usize], q: u64) -> Result<u128> {
    let mut total: u128 = 1;
    let mut used = 0i64;
    let n: i64 = blocks.iter().map(|&b| b as i64).sum();
    for &b in blocks {
        total = total
            .checked_mul(gaussian_binomial(n - used, b as i64, q)?)
            .ok_or_else(|| Error::Domain("q-multinomial overflow".into()))?;
        used += b as i64;
    }
    Ok(total)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A linear subspace of `F_q^n` in reduced row echelon form.
///
/// As a subvariety of `P^{n-1}` its projective dimension is `rows - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubspaceForm {
    pub ambient: usize,
    pub rows: Vec<Vec<Elem>>,
}

impl Ord for SubspaceForm {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient, self.rows.len(), &self.rows).cmp(&(other.ambient, other.rows.len(), &other.rows))
    }
}

impl PartialOrd for SubspaceForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl SubspaceForm {
    /// Canonical form of the row space of `basis` inside `F_q^ambient`.
    pub fn from_rows(f: &Field, ambient: usize, basis: &[Vec<Elem>]) -> SubspaceForm {
        let (rows, _) = linalg::rref(f, basis);
        SubspaceForm { ambient, rows }
    }

    pub fn zero(ambient: usize) -> SubspaceForm {
        SubspaceForm { ambient, rows: vec![] }
    }

    pub fn whole(ambient: usize) -> SubspaceForm {
        SubspaceForm { ambient, rows: linalg::identity(ambient) }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> SubspaceForm {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let rows = idx.iter().map(|&i| (0..ambient).map(|j| Elem::from(i == j)).collect()).collect();
        SubspaceForm { ambient, rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Projective dimension, `-1` for the zero space.
    pub fn projective_dim(&self) -> i64 {
        self.rows.len() as i64 - 1
    }

    pub fn is_canonical(&self, f: &Field) -> bool {
        Self::from_rows(f, self.ambient, &self.rows) == *self
    }

    pub fn sum(&self, f: &Field, other: &SubspaceForm) -> SubspaceForm {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Self::from_rows(f, self.ambient, &all)
    }

    pub fn contains_vector(&self, f: &Field, v: &[Elem]) -> bool {
        let mut all = self.rows.clone();
        all.push(v.to_vec());
        linalg::rank(f, &all) == self.rows.len()
    }

    pub fn contains(&self, f: &Field, other: &SubspaceForm) -> bool {
        other.rows.iter().all(|r| self.contains_vector(f, r))
    }

    /// Vectors orthogonal to the subspace under the standard pairing.
    pub fn annihilator(&self, f: &Field) -> SubspaceForm {
        let k = linalg::kernel(f, &self.rows, self.ambient);
        Self::from_rows(f, self.ambient, &k)
    }

    pub fn intersection(&self, f: &Field, other: &SubspaceForm) -> SubspaceForm {
        let a = self.annihilator(f).sum(f, &other.annihilator(f));
        a.annihilator(f)
    }

    /// Image under `x -> g x` for a square matrix `g`.
    pub fn transform(&self, f: &Field, g: &[Vec<Elem>]) -> SubspaceForm {
        let imgs: Vec<Vec<Elem>> = self
            .rows
            .iter()
            .map(|r| {
                (0..self.ambient)
                    .map(|i| (0..self.ambient).fold(0, |acc, j| f.add(acc, f.mul(g[i][j], r[j]))))
                    .collect()
            })
            .collect();
        Self::from_rows(f, self.ambient, &imgs)
    }

    /// Coordinates of the vectors restricted to `indices`.
    pub fn project(&self, f: &Field, indices: &[usize]) -> SubspaceForm {
        let rows: Vec<Vec<Elem>> = self.rows.iter().map(|r| indices.iter().map(|&i| r[i]).collect()).collect();
        Self::from_rows(f, indices.len(), &rows)
    }
}

fn pivot_sets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(c + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn forms_with_pivots(f: &Field, n: usize, pivots: &[usize]) -> Vec<SubspaceForm> {
    let free: Vec<(usize, usize)> = pivots
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| (p + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
        .collect();
    let q = f.q() as usize;
    let total = q.pow(free.len() as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut rows = vec![vec![0; n]; pivots.len()];
        for (i, &p) in pivots.iter().enumerate() {
            rows[i][p] = 1;
        }
        for &(i, c) in &free {
            rows[i][c] = (code % q) as Elem;
            code /= q;
        }
        out.push(SubspaceForm { ambient: n, rows });
    }
    out
}

/// All linear subspaces of `F_q^n` of dimension `r`, sorted.
pub fn enumerate_linear(f: &Field, n: usize, r: usize, budget: u128) -> Result<Vec<SubspaceForm>> {
    if r > n {
        return domain(format!("subspace dimension {r} exceeds ambient dimension {n}"));
    }
    let needed = (f.q() as u128).checked_pow((r * n) as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut all = par::flat_map(pivot_sets(n, r), |p| forms_with_pivots(f, n, &p));
    all.sort();
    Ok(all)
}

/// All `j`-dimensional rational linear subvarieties of `P^d`, i.e. the
/// `(j+1)`-dimensional subspaces of `F_q^{d+1}`, in canonical order.
pub fn enumerate_subspaces(f: &Field, d: usize, j: usize, budget: u128) -> Result<Vec<SubspaceForm>> {
    if j + 1 > d {
        return domain(format!("need 0 <= j <= d-1, got d={d}, j={j}"));
    }
    enumerate_linear(f, d + 1, j + 1, budget)
}

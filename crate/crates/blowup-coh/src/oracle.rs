//! Brute-force cohomology of line bundles on `Y` for `d <= 2`.
//!
//! For `d = 2`, `Y` is `P^2` blown up in its `q^2+q+1` rational points and
//! `Pic(Y)` has basis `H, E_P`. `h^0` counts degree-`a` forms with prescribed
//! multiplicities, `h^2` comes from Serre duality and `h^1` from Riemann-Roch.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::divisor::DivisorOnY;
use crate::error::{domain, Error, Result};
use crate::field::{Elem, Field};
use crate::linalg;
use crate::poly::Poly;
use crate::qcomb::{enumerate_subspaces, SubspaceForm, DEFAULT_BUDGET};

/// Divisor class `a H + sum_P c_P E_P` on `Y` (`d = 2`), or a degree on `P^1` (`d = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PicClass {
    pub d: usize,
    pub q: u32,
    pub a: i64,
    #[serde(serialize_with = "serialize_points")]
    pub c: BTreeMap<SubspaceForm, i64>,
}

fn serialize_points<S: serde::Serializer>(
    c: &BTreeMap<SubspaceForm, i64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (p, m) in c {
        seq.serialize_element(&(&p.rows[0], m))?;
    }
    seq.end()
}

impl PicClass {
    pub fn zero(d: usize, q: u32) -> PicClass {
        PicClass { d, q, a: 0, c: BTreeMap::new() }
    }

    pub fn hyperplane(d: usize, q: u32) -> PicClass {
        PicClass { a: 1, ..PicClass::zero(d, q) }
    }

    pub fn exceptional(q: u32, p: &SubspaceForm) -> PicClass {
        let mut c = PicClass::zero(2, q);
        c.c.insert(p.clone(), 1);
        c
    }

    pub fn coeff(&self, p: &SubspaceForm) -> i64 {
        self.c.get(p).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &PicClass) -> PicClass {
        let mut out = self.clone();
        out.a += o.a;
        for (p, &m) in &o.c {
            let e = out.c.entry(p.clone()).or_insert(0);
            *e += m;
            if *e == 0 {
                out.c.remove(p);
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> PicClass {
        let mut out = PicClass::zero(self.d, self.q);
        if k != 0 {
            out.a = k * self.a;
            out.c = self.c.iter().map(|(p, &m)| (p.clone(), k * m)).collect();
        }
        out
    }

    pub fn sub(&self, o: &PicClass) -> PicClass {
        self.add(&o.scale(-1))
    }

    /// Intersection pairing `H^2 = 1`, `E_P^2 = -1`, all other products zero.
    pub fn pairing(&self, o: &PicClass) -> i64 {
        self.a * o.a - self.c.iter().map(|(p, &m)| m * o.coeff(p)).sum::<i64>()
    }

    pub fn canonical(f: &Field) -> Result<PicClass> {
        let mut k = PicClass { a: -3, ..PicClass::zero(2, f.q()) };
        for p in points(f)? {
            k.c.insert(p, 1);
        }
        Ok(k)
    }

    pub fn euler_characteristic(&self, f: &Field) -> Result<i64> {
        match self.d {
            1 => Ok(self.a + 1),
            2 => {
                let k = PicClass::canonical(f)?;
                let dk = self.sub(&k);
                Ok(1 + self.pairing(&dk) / 2)
            }
            _ => domain("the oracle handles d <= 2 only"),
        }
    }
}

/// The rational points of `P^2`.
pub fn points(f: &Field) -> Result<Vec<SubspaceForm>> {
    enumerate_subspaces(f, 2, 0, DEFAULT_BUDGET)
}

/// Class of a divisor on `Y` in the basis `H, E_P`.
pub fn pic_class(div: &DivisorOnY, f: &Field) -> Result<PicClass> {
    match div.d {
        1 => Ok(PicClass { a: div.support.values().sum(), ..PicClass::zero(1, f.q()) }),
        2 => {
            let pts = points(f)?;
            let mut out = PicClass::zero(2, f.q());
            for (v, &m) in &div.support {
                if v.dim() == 1 {
                    out = out.add(&PicClass::exceptional(f.q(), v).scale(m));
                } else {
                    out.a += m;
                    for p in pts.iter().filter(|p| v.contains(f, p)) {
                        out = out.add(&PicClass::exceptional(f.q(), p).scale(-m));
                    }
                }
            }
            Ok(out)
        }
        d => domain(format!("pic_class needs d in {{1, 2}}, got {d}")),
    }
}

fn component_class(f: &Field, comp: &SubspaceForm) -> Result<PicClass> {
    if comp.ambient != 3 || comp.dim() == 0 || comp.dim() == 3 {
        return domain("component must be a point or a line of P^2");
    }
    let mut single = DivisorOnY::zero(2, f.q());
    single.add_component(comp, 1);
    pic_class(&single, f)
}

fn binomial_mod(n: u32, k: u32, p: u32) -> u32 {
    // Lucas
    let (mut n, mut k) = (n, k);
    let mut out = 1u64;
    while k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let mut b = 1u64;
        for i in 0..ki {
            b = b * u64::from(ni - i) / u64::from(i + 1);
        }
        out = out * (b % u64::from(p)) % u64::from(p);
        n /= p;
        k /= p;
    }
    out as u32
}

fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    if nvars == 1 {
        return vec![vec![deg]];
    }
    (0..=deg)
        .rev()
        .flat_map(|e| {
            monomials(nvars - 1, deg - e).into_iter().map(move |mut rest| {
                rest.insert(0, e);
                rest
            })
        })
        .collect()
}

/// Rows expressing "the coefficient of `t^beta` vanishes" for `|beta| < r`
/// after translating the point `p` to the origin of its standard chart.
fn multiplicity_conditions(f: &Field, p: &SubspaceForm, monos: &[Vec<u32>], r: u32) -> Vec<Vec<Elem>> {
    let pt = &p.rows[0];
    let k = pt.iter().position(|&x| x != 0).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let ch = f.characteristic();
    let mut rows = Vec::new();
    for total in 0..r {
        for b0 in 0..=total {
            let beta = [b0, total - b0];
            let row = monos
                .iter()
                .map(|alpha| {
                    let mut c: Elem = 1;
                    for (slot, &i) in others.iter().enumerate() {
                        if alpha[i] < beta[slot] {
                            return 0;
                        }
                        let b = f.from_int(i64::from(binomial_mod(alpha[i], beta[slot], ch)));
                        c = f.mul(c, f.mul(b, f.pow(pt[i], u64::from(alpha[i] - beta[slot]))));
                    }
                    c
                })
                .collect();
            rows.push(row);
        }
    }
    rows
}

/// `h^0` of a class, with an explicit cap on the size of the linear system.
pub fn h0_with_budget(c: &PicClass, f: &Field, budget: u128) -> Result<i64> {
    match c.d {
        1 => Ok((c.a + 1).max(0)),
        2 => {
            if c.a < 0 {
                return Ok(0);
            }
            let monos = monomials(3, c.a as u32);
            let conds: u128 = c.c.values().filter(|&&m| m < 0).map(|&m| (m * (m - 1) / 2) as u128).sum();
            let needed = conds * monos.len() as u128;
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let mut rows = Vec::new();
            for (p, &m) in &c.c {
                if m < 0 {
                    rows.extend(multiplicity_conditions(f, p, &monos, (-m) as u32));
                }
            }
            Ok((monos.len() - linalg::rank(f, &rows)) as i64)
        }
        d => domain(format!("the oracle handles d <= 2 only, got {d}")),
    }
}

pub fn h0(c: &PicClass, f: &Field) -> Result<i64> {
    h0_with_budget(c, f, DEFAULT_BUDGET)
}

/// `(h^0, h^1, h^2)` of the line bundle of class `c`.
pub fn h_all(c: &PicClass, f: &Field) -> Result<(i64, i64, i64)> {
    match c.d {
        1 => Ok(((c.a + 1).max(0), (-c.a - 1).max(0), 0)),
        2 => {
            let k = PicClass::canonical(f)?;
            let h0v = h0(c, f)?;
            let h2v = h0(&k.sub(c), f)?;
            let chi = c.euler_characteristic(f)?;
            let h1v = h0v + h2v - chi;
            if h1v < 0 {
                return Err(Error::Domain(format!("negative h1 for {c:?}")));
            }
            Ok((h0v, h1v, h2v))
        }
        d => domain(format!("the oracle handles d <= 2 only, got {d}")),
    }
}

/// `(h^0, h^1)` of the restriction of `c` to a curve component of `Y` (`d = 2`).
pub fn h_on_curve(c: &PicClass, comp: &SubspaceForm, f: &Field) -> Result<(i64, i64)> {
    if c.d != 2 {
        return domain("curve restrictions need d = 2");
    }
    let deg = c.pairing(&component_class(f, comp)?);
    Ok(((deg + 1).max(0), (-deg - 1).max(0)))
}

/// Order of a homogeneous form along the linear subspace `comp` of
/// `P^d`: the largest `r` with the form in the `r`-th power of its ideal.
fn order_along(f: &Field, form: &Poly, comp: &SubspaceForm) -> Result<i64> {
    let n = comp.ambient;
    let ann = comp.annihilator(f);
    let codim = ann.dim();
    // new coordinates: first the forms cutting out comp, then coordinates completing them
    let mut m = ann.rows.clone();
    for i in 0..n {
        if m.len() == n {
            break;
        }
        let mut e = vec![0; n];
        e[i] = 1;
        let mut trial = m.clone();
        trial.push(e);
        if linalg::rank(f, &trial) == trial.len() {
            m = trial;
        }
    }
    let minv = linalg::inverse(f, &m).ok_or_else(|| Error::Domain("coordinate change is singular".into()))?;
    let images: Vec<Poly> = (0..n).map(|i| Poly::linear(f, &minv[i], 0)).collect();
    let g = form.substitute(f, &images);
    Ok(g.terms.keys().map(|e| e[..codim].iter().sum::<u32>()).min().unwrap() as i64)
}

/// Vanishing order of `poly` along a component of `Y`, `d <= 2`.
///
/// A polynomial in `d+1` variables must be a form in `Xi_0, ..., Xi_d`; a
/// polynomial in `d` variables is read as the rational function in the affine
/// coordinates `z_i = Xi_i / Xi_0`.
pub fn valuation_of_poly(poly: &Poly, comp: &SubspaceForm, f: &Field) -> Result<i64> {
    let d = comp.ambient - 1;
    if d > 2 || d == 0 {
        return domain("valuations are supported for d in {1, 2}");
    }
    if poly.is_zero() {
        return domain("the zero polynomial has no valuation");
    }
    if poly.nvars == d + 1 {
        if !poly.is_homogeneous() {
            return domain("forms must be homogeneous");
        }
        order_along(f, poly, comp)
    } else if poly.nvars == d {
        let deg = poly.degree().unwrap();
        let form = poly.homogenize(deg);
        let at_infinity = SubspaceForm::coordinate(d + 1, &(1..=d).collect::<Vec<_>>()).contains(f, comp);
        Ok(order_along(f, &form, comp)? - i64::from(deg) * i64::from(at_infinity))
    } else {
        domain(format!("polynomial has {} variables, expected {} or {}", poly.nvars, d, d + 1))
    }
}

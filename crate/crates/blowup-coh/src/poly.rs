//! Sparse multivariate polynomials over `F_q`.

use std::collections::BTreeMap;

use crate::field::{Elem, Field};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, Elem>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Elem) -> Poly {
        Poly::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exps: Monomial, c: Elem) -> Poly {
        let mut p = Poly::zero(nvars);
        if c != 0 {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, 1)
    }

    /// `sum_i coeffs[i] x_i + c`.
    pub fn linear(f: &Field, coeffs: &[Elem], c: Elem) -> Poly {
        let n = coeffs.len();
        let mut p = Poly::constant(n, c);
        for (i, &a) in coeffs.iter().enumerate() {
            p = p.add(f, &Poly::var(n, i).scale(f, a));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Elem {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.lowest_degree()
    }

    /// Smallest exponent of `x_i` over all terms.
    pub fn min_exponent(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[i]).min()
    }

    fn add_term(&mut self, f: &Field, m: Monomial, c: Elem) {
        let v = f.add(self.coeff(&m), c);
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add(&self, f: &Field, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(f, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, f: &Field, c: Elem) -> Poly {
        if c == 0 {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, &v)| (m.clone(), f.mul(v, c))).collect() }
    }

    pub fn neg(&self, f: &Field) -> Poly {
        self.scale(f, f.neg(1))
    }

    pub fn sub(&self, f: &Field, o: &Poly) -> Poly {
        self.add(f, &o.neg(f))
    }

    pub fn mul(&self, f: &Field, o: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, Elem> = BTreeMap::new();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &o.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                let e = acc.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(c1, c2));
            }
        }
        acc.retain(|_, v| *v != 0);
        Poly { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, f: &Field, e: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, 1);
        for _ in 0..e {
            out = out.mul(f, self);
        }
        out
    }

    pub fn eval(&self, f: &Field, x: &[Elem]) -> Elem {
        self.terms.iter().fold(0, |acc, (m, &c)| {
            let t = m.iter().zip(x).fold(c, |p, (&e, &xi)| f.mul(p, f.pow(xi, e as u64)));
            f.add(acc, t)
        })
    }

    /// Substitutes `x_i -> images[i]`; the result lives in the images' ring.
    pub fn substitute(&self, f: &Field, images: &[Poly]) -> Poly {
        let n = images.first().map_or(0, |p| p.nvars);
        let mut out = Poly::zero(n);
        for (m, &c) in &self.terms {
            let mut t = Poly::constant(n, c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(f, &images[i].pow(f, e));
                }
            }
            out = out.add(f, &t);
        }
        out
    }

    /// Homogenization of degree `deg` with the new variable in front.
    pub fn homogenize(&self, deg: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| {
                let mut e = vec![deg - m.iter().sum::<u32>()];
                e.extend_from_slice(m);
                (e, c)
            })
            .collect();
        Poly { nvars: self.nvars + 1, terms }
    }

    /// Partial derivative in `x_i`, with exponents reduced into the field.
    pub fn derivative(&self, f: &Field, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, &c) in &self.terms {
            if m[i] > 0 {
                let mut e = m.clone();
                e[i] -= 1;
                out.add_term(f, e, f.mul(c, f.from_int(m[i] as i64)));
            }
        }
        out
    }
}

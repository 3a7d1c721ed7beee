//! Finite fields of small order.
//!
//! Elements are encoded as integers in `0..q`. For a prime field this is the
//! residue itself; for an extension field of degree `k` over `F_p` the integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` encodes the class of
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` modulo a fixed Conway polynomial.
//! The residue order used for sorting is the natural order on these codes.

use crate::error::{Error, Result};

/// Encoded field element.
pub type Elem = u32;

/// Largest field order for which tables are built.
pub const MAX_Q: u32 = 256;

/// Conway polynomials for the tabulated extension fields, lowest degree first,
/// monic leading coefficient omitted.
const CONWAY: &[(u32, u32, &[u32])] = &[
    // F_4 = F_2[x]/(x^2 + x + 1)
    (2, 2, &[1, 1]),
    // F_8 = F_2[x]/(x^3 + x + 1)
    (2, 3, &[1, 1, 0]),
    // F_9 = F_3[x]/(x^2 + 2x + 2)
    (3, 2, &[2, 2]),
];

/// A finite field `F_q` with precomputed operation tables.
#[derive(Clone, Debug)]
pub struct Field {
    q: u32,
    p: u32,
    degree: u32,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Returns `(p, k)` with `q = p^k` if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, k))
}

impl Field {
    /// Builds `F_q`. Rejects non prime powers and untabulated extension degrees.
    pub fn new(q: u32) -> Result<Field> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(Error::UnsupportedField(q));
        }
        let modulus: Vec<u32> = if k == 1 {
            vec![]
        } else {
            CONWAY
                .iter()
                .find(|(pp, kk, _)| *pp == p && *kk == k)
                .map(|(_, _, c)| c.to_vec())
                .ok_or(Error::UnsupportedField(q))?
        };
        let qs = q as usize;
        let digits = |mut v: u32| -> Vec<u32> {
            let mut out = vec![0; k as usize];
            for d in out.iter_mut() {
                *d = v % p;
                v /= p;
            }
            out
        };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&s);
                let prod = if k == 1 {
                    (a * b) % p
                } else {
                    let mut full = vec![0u32; 2 * k as usize];
                    for (i, x) in da.iter().enumerate() {
                        for (j, y) in db.iter().enumerate() {
                            full[i + j] = (full[i + j] + x * y) % p;
                        }
                    }
                    // reduce x^t for t >= k using x^k = -(c_0 + ... + c_{k-1} x^{k-1})
                    for t in (k as usize..full.len()).rev() {
                        let c = full[t];
                        if c == 0 {
                            continue;
                        }
                        full[t] = 0;
                        for (i, m) in modulus.iter().enumerate() {
                            let idx = t - k as usize + i;
                            full[idx] = (full[idx] + (p - m % p) * c) % p;
                        }
                    }
                    encode(&full[..k as usize])
                };
                mul[(a * q + b) as usize] = prod;
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..q {
            neg[a as usize] = (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap();
            if a != 0 {
                inv[a as usize] = (1..q).find(|&b| mul[(a * q + b) as usize] == 1).ok_or(Error::UnsupportedField(q))?;
            }
        }
        Ok(Field { q, p, degree: k, add, mul, neg, inv })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// All elements in residue order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.q
    }

    /// Nonzero elements in residue order.
    pub fn units(&self) -> impl Iterator<Item = Elem> + Clone {
        1..self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        let mut r = 1;
        let mut b = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(Field::new(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(Field::new(1), Err(Error::NotPrimePower(1))));
        assert!(matches!(Field::new(16), Err(Error::UnsupportedField(16))));
        assert!(Field::new(4).is_ok());
    }

    #[test]
    fn field_axioms_small_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            // no zero divisors and the unit group is cyclic of order q-1
            let gen_exists =
                f.units().any(|g| (1..q - 1).all(|e| f.pow(g, e as u64) != 1) && f.pow(g, (q - 1) as u64) == 1);
            assert!(gen_exists, "q={q}");
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for q in [4, 8, 9] {
            let f = Field::new(q).unwrap();
            let p = f.characteristic() as u64;
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                }
            }
        }
    }
}

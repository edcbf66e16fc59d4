//! Exact finite-field arithmetic.
//!
//! Fields are context objects: elements are plain `Copy` values and every
//! operation goes through the field that owns them. Two implementations are
//! provided: [`GaloisField`] (the coefficient field with `p^k` elements, table
//! driven) and [`PrimeField`] (a large prime field used by the matrix oracle).

use std::fmt::Debug;

use rand::Rng;

use crate::error::{Error, Result};

/// Arithmetic over a finite field.
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Copy + Eq + Ord + std::hash::Hash + Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    fn order(&self) -> u64;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Image of an integer under the prime-field embedding.
    fn from_int(&self, n: i64) -> Self::Elem;
    /// Inverse of the Frobenius `x -> x^p`.
    fn frobenius_inv(&self, a: Self::Elem) -> Self::Elem;
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Printed form of an element.
    fn display(&self, a: Self::Elem) -> String;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn pow(&self, mut a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative order of `q` modulo the prime `p`. Requires `q` prime to `p`.
pub fn multiplicative_order(q: i64, p: u64) -> u64 {
    let q = q.rem_euclid(p as i64) as u64;
    debug_assert!(q != 0);
    let mut x = q;
    let mut k = 1;
    while x != 1 {
        x = x * q % p;
        k += 1;
    }
    k
}

/// Largest field order accepted by [`GaloisField`]; tables are `O(order)`.
pub const MAX_GALOIS_ORDER: u64 = 1 << 20;

/// An element of a [`GaloisField`]: the base-`p` digits of the index are the
/// coefficients of the element as a polynomial in the generator `g`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fq(pub u32);

/// The field with `p^k` elements, represented as `F_p[g] / (m(g))` with `m`
/// primitive, so `g` also generates the multiplicative group.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u64,
    k: u32,
    order: u64,
    // exp[i] = g^i for 0 <= i < order - 1; log is its inverse on nonzero elements.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("field degree must be positive".into()));
        }
        let order = p
            .checked_pow(k)
            .filter(|&o| o <= MAX_GALOIS_ORDER)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("field of order {p}^{k} is too large"))
            })?;
        // Search monic degree-k moduli (low coefficients encoded as an index)
        // until g has multiplicative order `order - 1`.
        for tail in 0..order {
            let modulus = digits(tail, p, k as usize);
            if modulus[0] == 0 {
                continue;
            }
            if let Some(exp) = power_table(p, &modulus, order) {
                let mut log = vec![0u32; order as usize];
                for (i, &x) in exp.iter().enumerate() {
                    log[x as usize] = i as u32;
                }
                return Ok(GaloisField { p, k, order, exp, log });
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Digits of an element as coefficients of `1, g, g^2, ...`.
    pub fn coefficients(&self, a: Fq) -> Vec<u64> {
        digits(a.0 as u64, self.p, self.k as usize)
    }

    /// Canonical residue representation used in all printed output.
    pub fn format(&self, a: Fq) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coefficients(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "g".to_string(),
                (1, c) => format!("{c}g"),
                (i, 1) => format!("g^{i}"),
                (i, c) => format!("{c}g^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else if terms.len() == 1 {
            terms[0].clone()
        } else {
            format!("({})", terms.join("+"))
        }
    }

    /// Parses an element from its index encoding (`0 <= n < order`).
    pub fn element(&self, n: u64) -> Result<Fq> {
        if n >= self.order {
            return Err(Error::InvalidArgument(format!(
                "{n} is not an element index of the field of order {}",
                self.order
            )));
        }
        Ok(Fq(n as u32))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Fq) -> u64 {
        let n = self.order - 1;
        let l = self.log[a.0 as usize] as u64;
        n / gcd(n, l)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn digits(mut n: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(n % p);
        n /= p;
    }
    out
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

// Successive powers of g modulo g^k + tail; None unless g is primitive.
fn power_table(p: u64, tail: &[u64], order: u64) -> Option<Vec<u32>> {
    let k = tail.len();
    let mut cur = vec![0u64; k];
    cur[0] = 1;
    let mut exp = Vec::with_capacity(order as usize - 1);
    for i in 0..order - 1 {
        let idx = undigits(&cur, p);
        if i > 0 && idx == 1 {
            return None;
        }
        exp.push(idx as u32);
        // multiply by g: shift up, then reduce g^k = -tail
        let top = cur[k - 1];
        for j in (1..k).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        for j in 0..k {
            cur[j] = (cur[j] + (p - tail[j]) * top) % p;
        }
    }
    (undigits(&cur, p) == 1).then_some(exp)
}

impl Field for GaloisField {
    type Elem = Fq;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn order(&self) -> u64 {
        self.order
    }

    fn zero(&self) -> Fq {
        Fq(0)
    }

    fn one(&self) -> Fq {
        Fq(1)
    }

    fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.k == 1 {
            return Fq(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fq(out as u32)
    }

    fn neg(&self, a: Fq) -> Fq {
        let mut x = a.0 as u64;
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fq(out as u32)
    }

    fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        let n = self.order - 1;
        let l = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        Fq(self.exp[l as usize])
    }

    fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = (n - self.log[a.0 as usize] as u64) % n;
        Some(Fq(self.exp[l as usize]))
    }

    fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    fn frobenius_inv(&self, a: Fq) -> Fq {
        // x -> x^(p^(k-1)) inverts x -> x^p on a field of order p^k
        self.pow(a, self.p.pow(self.k - 1))
    }

    fn display(&self, a: Fq) -> String {
        self.format(a)
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(1..self.order) as u32)
    }
}

/// The prime field `Z/pZ` for a prime below `2^32`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
}

/// `2^31 - 1`. Used by the matrix oracle as a stand-in for characteristic zero.
pub const ORACLE_PRIME: u64 = 2_147_483_647;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn oracle() -> Self {
        PrimeField { p: ORACLE_PRIME }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn order(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.p - 2))
    }

    fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    fn frobenius_inv(&self, a: u64) -> u64 {
        a
    }

    fn display(&self, a: u64) -> String {
        a.to_string()
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }
}

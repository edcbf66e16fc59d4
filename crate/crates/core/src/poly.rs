//! Dense univariate polynomials over a [`Field`].

use crate::field::Field;

/// Coefficients from the constant term upward; never has a trailing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Copy + Eq> Poly<E> {
    pub fn from_coeffs<F: Field<Elem = E>>(f: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|&c| f.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::from_coeffs(f, vec![c])
    }

    pub fn one<F: Field<Elem = E>>(f: &F) -> Self {
        Self::constant(f, f.one())
    }

    /// `x - a`
    pub fn linear_root<F: Field<Elem = E>>(f: &F, a: E) -> Self {
        Poly { coeffs: vec![f.neg(a), f.one()] }
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<E> {
        self.coeffs.last().copied()
    }

    pub fn coeff<F: Field<Elem = E>>(&self, f: &F, i: usize) -> E {
        self.coeffs.get(i).copied().unwrap_or_else(|| f.zero())
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.add(self.coeff(f, i), other.coeff(f, i)))
            .collect();
        Self::from_coeffs(f, c)
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.sub(self.coeff(f, i), other.coeff(f, i)))
            .collect();
        Self::from_coeffs(f, c)
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(f, c)
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: E) -> Self {
        Self::from_coeffs(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn monic<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.leading() {
            Some(l) => self.scale(f, f.inv(l).expect("nonzero leading coefficient")),
            None => Self::zero(),
        }
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem<F: Field<Elem = E>>(&self, f: &F, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + d], lead_inv);
            quot[i] = c;
            if f.is_zero(c) {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, b));
            }
        }
        rem.truncate(d);
        (Self::from_coeffs(f, quot), Self::from_coeffs(f, rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(f, &b).1;
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| f.mul(f.from_int(i as i64), a))
            .collect();
        Self::from_coeffs(f, c)
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, x: E) -> E {
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Removes the largest power of `x` dividing `self`.
    pub fn strip_x_power<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let k = self.coeffs.iter().take_while(|&&c| f.is_zero(c)).count();
        Self::from_coeffs(f, self.coeffs[k..].to_vec())
    }

    /// Product of the distinct monic irreducible factors.
    ///
    /// Works in every characteristic: factors whose multiplicity is divisible
    /// by `p` are recovered through a `p`-th root.
    pub fn radical<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let f0 = self.monic(f);
        match f0.degree() {
            None => return Self::zero(),
            Some(0) => return Self::one(f),
            _ => {}
        }
        let d = f0.derivative(f);
        if d.is_zero() {
            return f0.pth_root(f).radical(f);
        }
        let g = f0.gcd(f, &d);
        let w = f0.div_rem(f, &g).0.monic(f);
        let mut rest = g;
        loop {
            let c = rest.gcd(f, &w);
            if c.degree() == Some(0) {
                break;
            }
            rest = rest.div_rem(f, &c).0;
        }
        if rest.degree() == Some(0) {
            w
        } else {
            w.mul(f, &rest.pth_root(f).radical(f)).monic(f)
        }
    }

    // Only valid when every exponent with a nonzero coefficient is divisible by p.
    fn pth_root<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let p = f.characteristic() as usize;
        let c = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&a| f.frobenius_inv(a))
            .collect();
        Self::from_coeffs(f, c)
    }
}

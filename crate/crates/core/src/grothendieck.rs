//! Grothendieck group of Deligne classes, the subgroup `G_0` spanned by
//! `[0,k-1] (x) St_0(Z) - [0,k-1] (x) C(Z)`, and normal forms in `G / G_0`.
//!
//! The generators are triangular in the indecomposable basis: each one has a
//! single cycle-core term. Eliminating cycles gives the normal form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cv_map;
use crate::deligne_algebra::{tensor_indec, Core, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::expr::format_linear;
use crate::weil_model::{AtomId, WeilModel};

/// Integer combination of indecomposables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VirtualRep {
    coeffs: BTreeMap<Indec, BigInt>,
}

/// Element of `G / G_0` in normal form: atom-core terms only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientClass {
    coeffs: BTreeMap<Indec, BigInt>,
}

fn add_term(map: &mut BTreeMap<Indec, BigInt>, i: Indec, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(i).or_default();
    *slot += c;
    if slot.is_zero() {
        map.remove(&i);
    }
}

impl VirtualRep {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Indec, BigInt)>) -> Self {
        let mut v = Self::zero();
        for (i, c) in terms {
            add_term(&mut v.coeffs, i, c);
        }
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Indec, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, i: &Indec) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.coeffs.iter().chain(&other.coeffs).map(|(i, c)| (*i, c.clone())))
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(i, c)| (*i, -c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(i, c)| (*i, c * k)))
    }

    /// The effective class, if every coefficient is nonnegative.
    pub fn to_class(&self) -> Option<DeligneClass> {
        let mut x = DeligneClass::zero();
        for (i, c) in &self.coeffs {
            if c.is_negative() {
                return None;
            }
            x.add_part(*i, c.to_u64()?);
        }
        Some(x)
    }

    pub fn format(&self, model: &WeilModel) -> String {
        format_linear(model, self.terms())
    }
}

impl From<&DeligneClass> for VirtualRep {
    fn from(x: &DeligneClass) -> Self {
        Self::from_terms(x.parts().map(|(i, n)| (*i, BigInt::from(n))))
    }
}

impl QuotientClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Indec, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, i: &Indec) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    pub fn to_virtual(&self) -> VirtualRep {
        VirtualRep { coeffs: self.coeffs.clone() }
    }

    pub fn format(&self, model: &WeilModel) -> String {
        format_linear(model, self.terms())
    }
}

/// Canonical projection `G -> G / G_0`.
pub fn h(model: &WeilModel, v: &VirtualRep) -> QuotientClass {
    let mut out = BTreeMap::new();
    for (i, c) in v.terms() {
        match i.core {
            Core::Atom(_) => add_term(&mut out, *i, c.clone()),
            Core::Cycle(z) => {
                for m in model.line_of(z).members {
                    add_term(&mut out, Indec::atom(i.len, m), c.clone());
                }
            }
        }
    }
    QuotientClass { coeffs: out }
}

pub fn in_g0(model: &WeilModel, v: &VirtualRep) -> bool {
    h(model, v).is_zero()
}

/// The generator `[0,r-1] (x) St_0(Z) - [0,r-1] (x) C(Z)`.
pub fn generator(model: &WeilModel, r: u32, z: AtomId) -> VirtualRep {
    let mut terms: Vec<(Indec, BigInt)> = model
        .line_of(z)
        .members
        .into_iter()
        .map(|m| (Indec::atom(r, m), BigInt::from(1)))
        .collect();
    terms.push((Indec::cycle(model, r, z), BigInt::from(-1)));
    VirtualRep::from_terms(terms)
}

pub fn h_c(model: &WeilModel, y: &DeligneClass) -> Result<QuotientClass> {
    if !cv_map::is_c_parameter(model, y) {
        return Err(Error::NotCParameter(crate::expr::format_class(model, y)));
    }
    Ok(h(model, &y.into()))
}

pub fn h_nilp(model: &WeilModel, x: &DeligneClass) -> Result<QuotientClass> {
    if !x.is_nilpotent() {
        return Err(Error::NotNilpotent(crate::expr::format_class(model, x)));
    }
    Ok(h(model, &x.into()))
}

/// The unique C-parameter with normal form `qc`.
pub fn h_c_inverse(model: &WeilModel, qc: &QuotientClass) -> Result<DeligneClass> {
    let x = qc
        .to_virtual()
        .to_class()
        .ok_or_else(|| {
            if qc.is_nonnegative() {
                Error::Overflow(qc.format(model))
            } else {
                Error::NegativeCoefficient(qc.format(model))
            }
        })?;
    cv_map::cv(model, &x)
}

pub fn quotient_add(a: &QuotientClass, b: &QuotientClass) -> QuotientClass {
    let mut out = a.coeffs.clone();
    for (i, c) in &b.coeffs {
        add_term(&mut out, *i, c.clone());
    }
    QuotientClass { coeffs: out }
}

/// Bilinear extension of the semisimple tensor product.
pub fn tensor_virtual(model: &WeilModel, a: &VirtualRep, b: &VirtualRep) -> Result<VirtualRep> {
    let mut out = BTreeMap::new();
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            let cd = c * d;
            for (z, n) in tensor_indec(model, x, y)? {
                add_term(&mut out, z, &cd * BigInt::from(n));
            }
        }
    }
    Ok(VirtualRep { coeffs: out })
}

/// Product in `G / G_0`, computed on the normal-form representatives.
pub fn quotient_mul(model: &WeilModel, a: &QuotientClass, b: &QuotientClass) -> Result<QuotientClass> {
    Ok(h(model, &tensor_virtual(model, &a.to_virtual(), &b.to_virtual())?))
}

pub fn cv_via_quotient(model: &WeilModel, x: &DeligneClass) -> Result<DeligneClass> {
    h_c_inverse(model, &h_nilp(model, x)?)
}

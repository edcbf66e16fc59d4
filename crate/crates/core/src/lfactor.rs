//! Formal Euler factors `1/P(X)` with `P(0) = 1` over the model's coefficient field.
//!
//! A segment `[0,r-1] (x) psi` contributes `1 - c X` where `c` is the Frobenius
//! eigenvalue of its top atom `nu^{r-1} psi`, when that atom is unramified and
//! one-dimensional. Everything else, cycles included, contributes 1.

use serde_json::{json, Value};

use crate::deligne_algebra::{Core, DeligneClass};
use crate::error::Result;
use crate::field::{Field, Fq, GaloisField};
use crate::poly::Poly;
use crate::weil_model::WeilModel;

#[derive(Clone, Debug)]
pub struct EulerFactor {
    field: GaloisField,
    // sorted; each has constant term 1
    factors: Vec<Poly<Fq>>,
}

impl PartialEq for EulerFactor {
    fn eq(&self, other: &Self) -> bool {
        self.denominator() == other.denominator()
    }
}

impl Eq for EulerFactor {}

impl EulerFactor {
    pub fn one(field: &GaloisField) -> Self {
        EulerFactor { field: field.clone(), factors: Vec::new() }
    }

    /// `1 / (1 - c X)`
    pub fn linear(field: &GaloisField, c: Fq) -> Self {
        let p = Poly::from_coeffs(field, vec![field.one(), field.neg(c)]);
        let factors = if p.degree() == Some(0) { Vec::new() } else { vec![p] };
        EulerFactor { field: field.clone(), factors }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors: Vec<_> = self.factors.iter().chain(&other.factors).cloned().collect();
        factors.sort();
        EulerFactor { field: self.field.clone(), factors }
    }

    pub fn denominator(&self) -> Poly<Fq> {
        self.factors
            .iter()
            .fold(Poly::one(&self.field), |acc, p| acc.mul(&self.field, p))
    }

    pub fn is_trivial(&self) -> bool {
        self.denominator().degree() == Some(0)
    }

    /// Denominator coefficients from the constant term up.
    pub fn to_json(&self) -> Value {
        let f = &self.field;
        let coeffs: Vec<Value> = self
            .denominator()
            .coeffs()
            .iter()
            .map(|&c| if f.degree() == 1 { json!(c.0) } else { json!(f.format(c)) })
            .collect();
        json!({ "denominator": coeffs, "field_order": f.order() })
    }
}

impl std::fmt::Display for EulerFactor {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(out, "1");
        }
        let f = &self.field;
        write!(out, "1/")?;
        for p in &self.factors {
            write!(out, "(1")?;
            for (i, &a) in p.coeffs().iter().enumerate().skip(1) {
                if f.is_zero(a) {
                    continue;
                }
                let c = f.neg(a);
                let coeff = f.format(c);
                let power = if i == 1 { "X".to_string() } else { format!("X^{i}") };
                if c == f.one() {
                    write!(out, " - {power}")?;
                } else {
                    write!(out, " - {coeff}*{power}")?;
                }
            }
            write!(out, ")")?;
        }
        Ok(())
    }
}

pub fn l_class(model: &WeilModel, x: &DeligneClass) -> EulerFactor {
    let mut out = EulerFactor::one(model.field());
    for (i, n) in x.parts() {
        if let Core::Atom(a) = i.core {
            let top = model.twist_pow(a, i.len as i64 - 1);
            if let Some(c) = model.atom(top).frob_eig {
                let f = EulerFactor::linear(model.field(), c);
                for _ in 0..n {
                    out = out.mul(&f);
                }
            }
        }
    }
    out
}

pub fn l_pair(model: &WeilModel, x: &DeligneClass, y: &DeligneClass) -> Result<EulerFactor> {
    Ok(l_class(model, &x.tensor(y, model)?))
}

pub fn is_trivial_factor(f: &EulerFactor) -> bool {
    f.is_trivial()
}

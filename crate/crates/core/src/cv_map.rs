//! Acyclic/cyclic splitting of nilpotent classes and the map CV.

use std::collections::BTreeMap;

use crate::deligne_algebra::{Core, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::expr::format_class;
use crate::weil_model::{AtomId, WeilModel};

/// `x = acyclic + sum n_{Z,r} [0,r-1] (x) St_0(Z)`, keyed by `(r, anchor of Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvSplit {
    pub acyclic: DeligneClass,
    pub cyclic_mult: BTreeMap<(u32, AtomId), u64>,
}

impl CvSplit {
    pub fn reassemble(&self, model: &WeilModel) -> DeligneClass {
        let mut out = self.acyclic.clone();
        for (&(r, z), &n) in &self.cyclic_mult {
            for m in model.line_of(z).members {
                out.add_part(Indec::atom(r, m), n);
            }
        }
        out
    }
}

// Minimum multiplicity of the full line block, for each (r, Z) touched by an
// atom part.
fn full_line_blocks(model: &WeilModel, x: &DeligneClass) -> BTreeMap<(u32, AtomId), u64> {
    let mut out = BTreeMap::new();
    for (i, _) in x.parts() {
        if let Core::Atom(a) = i.core {
            let key = (i.len, model.anchor_of(a));
            out.entry(key).or_insert_with(|| {
                model
                    .line_of(a)
                    .members
                    .iter()
                    .map(|&m| x.multiplicity(&Indec::atom(i.len, m)))
                    .min()
                    .unwrap_or(0)
            });
        }
    }
    out.retain(|_, n| *n > 0);
    out
}

pub fn split_cyclic(model: &WeilModel, x: &DeligneClass) -> Result<CvSplit> {
    if !x.is_nilpotent() {
        return Err(Error::NotNilpotent(format_class(model, x)));
    }
    let cyclic_mult = full_line_blocks(model, x);
    let mut acyclic = x.clone();
    for (&(r, z), &n) in &cyclic_mult {
        for m in model.line_of(z).members {
            acyclic.remove_part(&Indec::atom(r, m), n);
        }
    }
    Ok(CvSplit { acyclic, cyclic_mult })
}

pub fn cv(model: &WeilModel, x: &DeligneClass) -> Result<DeligneClass> {
    let s = split_cyclic(model, x)?;
    let mut out = s.acyclic;
    for (&(r, z), &n) in &s.cyclic_mult {
        out.add_part(Indec::cycle(model, r, z), n);
    }
    Ok(out)
}

/// No `(r, Z)` has its whole line among the atom parts.
pub fn is_c_parameter(model: &WeilModel, y: &DeligneClass) -> bool {
    full_line_blocks(model, y).is_empty()
}

pub fn cv_inverse(model: &WeilModel, y: &DeligneClass) -> Result<DeligneClass> {
    if !is_c_parameter(model, y) {
        return Err(Error::NotCParameter(format_class(model, y)));
    }
    Ok(expand_cycles(model, y))
}

/// Replaces every `[0,r-1] (x) C(Z)` by `[0,r-1] (x) St_0(Z)`.
pub fn expand_cycles(model: &WeilModel, y: &DeligneClass) -> DeligneClass {
    let mut out = DeligneClass::zero();
    for (i, n) in y.parts() {
        match i.core {
            Core::Atom(_) => out.add_part(*i, n),
            Core::Cycle(z) => {
                for m in model.line_of(z).members {
                    out.add_part(Indec::atom(i.len, m), n);
                }
            }
        }
    }
    out
}

/// `Some((k, anchor))` when `x` is `ell^k` copies of `St_0(Z)`.
pub fn is_nonbanal_cuspidal_parameter(model: &WeilModel, x: &DeligneClass) -> Option<(u32, AtomId)> {
    let (first, n) = x.parts().next()?;
    let Core::Atom(a) = first.core else { return None };
    let line = model.line_of(a);
    let expected = DeligneClass::from_parts(line.members.iter().map(|&m| (Indec::atom(1, m), n)));
    if *x != expected {
        return None;
    }
    let ell = model.ell();
    let mut k = 0;
    let mut p = 1u64;
    while p < n {
        p = p.checked_mul(ell)?;
        k += 1;
    }
    (p == n).then_some((k, line.anchor()))
}

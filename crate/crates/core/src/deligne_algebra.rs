//! Canonical forms of Deligne classes and their semiring operations.
//!
//! An indecomposable class is `[0, r-1] (x) Theta` with `Theta` either an atom
//! or the cycle of a line. Shifts are absorbed into the core atom, so a
//! segment `[a, b] (x) psi` is stored as `(b - a + 1, nu^a psi)`, and twisting
//! a cycle leaves it unchanged. With that normalization class equality is
//! multiset equality.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::weil_model::{AtomId, WeilModel};

/// Irreducible core of an indecomposable: an atom, or the cycle on a line
/// (identified by the line's anchor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Core {
    Atom(AtomId),
    Cycle(AtomId),
}

impl Core {
    pub fn is_cycle(self) -> bool {
        matches!(self, Core::Cycle(_))
    }

    /// `nu^k` applied to the core; cycles are twist-invariant.
    pub fn shift(self, model: &WeilModel, k: i64) -> Core {
        match self {
            Core::Atom(a) => Core::Atom(model.twist_pow(a, k)),
            c @ Core::Cycle(_) => c,
        }
    }
}

/// `[0, len - 1] (x) core`. Ordered by `(len, core kind, id)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Indec {
    pub len: u32,
    pub core: Core,
}

impl Indec {
    pub fn atom(len: u32, a: AtomId) -> Self {
        debug_assert!(len >= 1);
        Indec { len, core: Core::Atom(a) }
    }

    /// `[start, start + len - 1] (x) a`, normalized.
    pub fn segment(model: &WeilModel, start: i64, len: u32, a: AtomId) -> Self {
        Indec::atom(len, model.twist_pow(a, start))
    }

    /// `[0, len - 1] (x) C(Z)` for the line through `a`.
    pub fn cycle(model: &WeilModel, len: u32, a: AtomId) -> Self {
        Indec { len, core: Core::Cycle(model.anchor_of(a)) }
    }

    pub fn is_cycle(&self) -> bool {
        self.core.is_cycle()
    }

    pub fn dual(&self, model: &WeilModel) -> Indec {
        match self.core {
            Core::Atom(a) => {
                Indec::atom(self.len, model.twist_pow(model.dual(a), 1 - self.len as i64))
            }
            Core::Cycle(z) => Indec::cycle(model, self.len, model.dual(z)),
        }
    }

    /// W_F-support as `(atom, multiplicity)` pairs.
    pub fn support(&self, model: &WeilModel) -> Vec<(AtomId, u64)> {
        match self.core {
            Core::Atom(a) => (0..self.len as i64).map(|k| (model.twist_pow(a, k), 1)).collect(),
            Core::Cycle(z) => model
                .line_of(z)
                .members
                .into_iter()
                .map(|m| (m, self.len as u64))
                .collect(),
        }
    }

    pub fn dim(&self, model: &WeilModel) -> u64 {
        self.support(model)
            .iter()
            .map(|&(a, n)| n * model.atom(a).dim as u64)
            .sum()
    }
}

/// Multiset of atoms.
pub type AtomMultiset = BTreeMap<AtomId, u64>;

/// A class in the semiring of Deligne representations: a finite multiset of
/// indecomposables. The empty multiset is the zero representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeligneClass {
    parts: BTreeMap<Indec, u64>,
}

impl DeligneClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(i: Indec) -> Self {
        Self::from_parts([(i, 1)])
    }

    pub fn from_parts(parts: impl IntoIterator<Item = (Indec, u64)>) -> Self {
        let mut x = Self::zero();
        for (i, n) in parts {
            x.add_part(i, n);
        }
        x
    }

    pub fn add_part(&mut self, i: Indec, n: u64) {
        if n > 0 {
            *self.parts.entry(i).or_insert(0) += n;
        }
    }

    /// Removes `n` copies of `i`; returns false (leaving `self` unchanged) if
    /// fewer are present.
    pub fn remove_part(&mut self, i: &Indec, n: u64) -> bool {
        match self.parts.get_mut(i) {
            Some(m) if *m >= n => {
                *m -= n;
                if *m == 0 {
                    self.parts.remove(i);
                }
                true
            }
            _ => n == 0,
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Indec, u64)> + '_ {
        self.parts.iter().map(|(i, &n)| (i, n))
    }

    pub fn multiplicity(&self, i: &Indec) -> u64 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of indecomposable summands, counted with multiplicity.
    pub fn num_parts(&self) -> u64 {
        self.parts.values().sum()
    }

    pub fn max_len(&self) -> u32 {
        self.parts.keys().map(|i| i.len).max().unwrap_or(0)
    }

    /// No part has a cycle core.
    pub fn is_nilpotent(&self) -> bool {
        self.parts.keys().all(|i| !i.is_cycle())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, n) in other.parts() {
            out.add_part(*i, n);
        }
        out
    }

    pub fn scale(&self, n: u64) -> Self {
        Self::from_parts(self.parts().map(|(i, m)| (*i, m * n)))
    }

    /// Multiset inclusion.
    pub fn contains(&self, other: &Self) -> bool {
        other.parts().all(|(i, n)| self.multiplicity(i) >= n)
    }

    /// `self - other` when `other` is contained in `self`.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (i, n) in other.parts() {
            if !out.remove_part(i, n) {
                return None;
            }
        }
        Some(out)
    }

    /// Flattened list of parts, repeated by multiplicity, in canonical order.
    pub fn expanded(&self) -> Vec<Indec> {
        self.parts()
            .flat_map(|(i, n)| std::iter::repeat_n(*i, n as usize))
            .collect()
    }

    pub fn dual(&self, model: &WeilModel) -> Self {
        Self::from_parts(self.parts().map(|(i, n)| (i.dual(model), n)))
    }

    pub fn support(&self, model: &WeilModel) -> AtomMultiset {
        let mut out = AtomMultiset::new();
        for (i, n) in self.parts() {
            for (a, k) in i.support(model) {
                *out.entry(a).or_insert(0) += k * n;
            }
        }
        out
    }

    pub fn dim(&self, model: &WeilModel) -> u64 {
        self.parts().map(|(i, n)| n * i.dim(model)).sum()
    }

    /// Checks that every atom and line anchor belongs to `model`.
    pub fn check(&self, model: &WeilModel) -> Result<()> {
        for i in self.parts.keys() {
            match i.core {
                Core::Atom(a) => {
                    model.check_atom(a)?;
                }
                Core::Cycle(z) => {
                    model.check_atom(z)?;
                    if model.anchor_of(z) != z {
                        return Err(crate::Error::InvalidArgument(format!(
                            "cycle core {} is not a line anchor",
                            model.name(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Semisimple tensor product.
    pub fn tensor(&self, other: &Self, model: &WeilModel) -> Result<Self> {
        let mut out = Self::zero();
        for (x, n) in self.parts() {
            for (y, m) in other.parts() {
                for (z, k) in tensor_indec(model, x, y)? {
                    out.add_part(z, k * n * m);
                }
            }
        }
        Ok(out)
    }
}

impl FromIterator<Indec> for DeligneClass {
    fn from_iter<T: IntoIterator<Item = Indec>>(iter: T) -> Self {
        Self::from_parts(iter.into_iter().map(|i| (i, 1)))
    }
}

/// `[0, n-1] (x) [0, m-1] = [0, n+m-2] + [1, n+m-3] + ... + [m-1, n-1]`,
/// returned as `(shift, length)` pairs.
pub fn segment_tensor(n: u32, m: u32) -> Vec<(u32, u32)> {
    let (n, m) = if n >= m { (n, m) } else { (m, n) };
    (0..m).map(|k| (k, n + m - 1 - 2 * k)).collect()
}

/// `St_0(Z)` stretched to length `len`: one `(len, psi)` for every `psi` in the line.
pub fn st0(model: &WeilModel, len: u32, a: AtomId) -> DeligneClass {
    model
        .line_of(a)
        .members
        .into_iter()
        .map(|m| Indec::atom(len, m))
        .collect()
}

/// Tensor product of two irreducible cores, as a multiset of cores.
pub fn core_tensor(model: &WeilModel, x: Core, y: Core) -> Result<BTreeMap<Core, u64>> {
    let mut out = BTreeMap::new();
    match (x, y) {
        (Core::Atom(a), Core::Atom(b)) => {
            for c in model.fuse(a, b)? {
                *out.entry(Core::Atom(c)).or_insert(0) += 1;
            }
        }
        (Core::Atom(a), Core::Cycle(z)) | (Core::Cycle(z), Core::Atom(a)) => {
            let mut fused = AtomMultiset::new();
            for m in model.line_of(z).members {
                for c in model.fuse(a, m)? {
                    *fused.entry(c).or_insert(0) += 1;
                }
            }
            let mut per_line: BTreeMap<AtomId, u64> = BTreeMap::new();
            for (c, n) in fused {
                *per_line.entry(model.anchor_of(c)).or_insert(0) += n;
            }
            for (anchor, total) in per_line {
                let o = model.line_order(anchor) as u64;
                debug_assert_eq!(total % o, 0, "fused support is twist-invariant");
                out.insert(Core::Cycle(anchor), total / o);
            }
        }
        (Core::Cycle(z0), Core::Cycle(z1)) => {
            for m in model.line_of(z0).members {
                for (c, n) in core_tensor(model, Core::Atom(m), Core::Cycle(z1))? {
                    *out.entry(c).or_insert(0) += n;
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of two indecomposables.
pub fn tensor_indec(model: &WeilModel, x: &Indec, y: &Indec) -> Result<Vec<(Indec, u64)>> {
    let cores = core_tensor(model, x.core, y.core)?;
    let mut out = Vec::new();
    for (shift, len) in segment_tensor(x.len, y.len) {
        for (&c, &n) in &cores {
            out.push((Indec { len, core: c.shift(model, shift as i64) }, n));
        }
    }
    Ok(out)
}

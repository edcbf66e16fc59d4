//! Finite models of the irreducible representations of the Weil group.
//!
//! A [`WeilModel`] is a finite set of atoms closed under the twist by the
//! unramified character `nu`, under duality and (where known) under the
//! semisimplified tensor product. Character models realise the atoms as the
//! group `Z/e x prod Z/t_i`; table models are given explicitly and may carry
//! higher-dimensional atoms with opaque fusion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, multiplicative_order, Field, Fq, GaloisField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub dim: u32,
    pub unramified: bool,
    /// Frobenius eigenvalue; present iff the atom is one-dimensional and unramified.
    pub frob_eig: Option<Fq>,
}

/// A twist orbit, listed from its minimal atom id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    pub members: Vec<AtomId>,
}

impl Line {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn anchor(&self) -> AtomId {
        self.members[0]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub name: String,
    pub dim: u32,
    pub unramified: bool,
    /// Index encoding of a coefficient-field element (the residue when `k = 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frob_eig: Option<u64>,
}

fn one() -> u32 {
    1
}

/// On-disk model description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Character {
        ell: u64,
        q: i64,
        #[serde(default)]
        tame_orders: Vec<u32>,
        #[serde(default = "one")]
        field_degree: u32,
    },
    Table {
        ell: u64,
        e: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<i64>,
        #[serde(default = "one")]
        field_degree: u32,
        atoms: Vec<AtomSpec>,
        twist: Vec<u32>,
        dual: Vec<u32>,
        #[serde(default)]
        fusion: BTreeMap<String, Vec<String>>,
        /// Index of the trivial atom (defaults to 0).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trivial: Option<u32>,
    },
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("model config: {e}")))
    }

    pub fn build(&self) -> Result<WeilModel> {
        match self {
            ModelConfig::Character { ell, q, tame_orders, field_degree } => {
                WeilModel::character(*ell, *q, tame_orders, *field_degree)
            }
            ModelConfig::Table { .. } => WeilModel::table(self.clone()),
        }
    }
}

/// Every violated invariant found while validating a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    fn push(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.violations.contains(&msg) {
            self.violations.push(msg);
        }
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Fusion {
    /// Atoms are `(j, t)` in `Z/e x prod Z/t_i`, id = `j + e * mixed_radix(t)`.
    Group { tame_orders: Vec<u32> },
    Table(HashMap<(AtomId, AtomId), Vec<AtomId>>),
}

#[derive(Clone, Debug)]
pub struct WeilModel {
    ell: u64,
    e: u32,
    field: GaloisField,
    q_inv: Fq,
    atoms: Vec<Atom>,
    twist: Vec<AtomId>,
    untwist: Vec<AtomId>,
    dual: Vec<AtomId>,
    fusion: Fusion,
    trivial: AtomId,
    config: ModelConfig,
    by_name: HashMap<String, AtomId>,
    // (anchor, position in line) for each atom
    line_index: Vec<(AtomId, u32)>,
    line_order: Vec<u32>,
}

impl WeilModel {
    /// Character model: atoms `<nu> x T` with `T = prod Z/t_i`, fusion the group law.
    pub fn character(ell: u64, q: i64, tame_orders: &[u32], field_degree: u32) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if q.rem_euclid(ell as i64) == 0 {
            return Err(Error::QDivisibleByEll { q, ell });
        }
        if tame_orders.contains(&0) {
            return Err(Error::InvalidArgument("tame orders must be positive".into()));
        }
        let field = GaloisField::new(ell, field_degree)?;
        let e = multiplicative_order(q, ell) as u32;
        let q_inv = field.inv(field.from_int(q)).expect("q is a unit");
        let tame_count: u32 = tame_orders.iter().product();
        let n = e * tame_count;
        let mut atoms = Vec::with_capacity(n as usize);
        let mut twist = Vec::with_capacity(n as usize);
        let mut dual = Vec::with_capacity(n as usize);
        for id in 0..n {
            let (j, t) = split_group_id(id, e, tame_orders);
            let name = character_atom_name(j, &t);
            let unramified = t.iter().all(|&c| c == 0);
            let frob_eig = unramified.then(|| field.pow(q_inv, j as u64));
            atoms.push(Atom { name, dim: 1, unramified, frob_eig });
            let tj: Vec<u32> = t.clone();
            twist.push(AtomId(join_group_id((j + 1) % e, &tj, e, tame_orders)));
            let nt: Vec<u32> = t
                .iter()
                .zip(tame_orders)
                .map(|(&c, &m)| (m - c) % m)
                .collect();
            dual.push(AtomId(join_group_id((e - j) % e, &nt, e, tame_orders)));
        }
        let config = ModelConfig::Character {
            ell,
            q,
            tame_orders: tame_orders.to_vec(),
            field_degree,
        };
        let model = Self::assemble(
            ell,
            e,
            field,
            q_inv,
            atoms,
            twist,
            dual,
            Fusion::Group { tame_orders: tame_orders.to_vec() },
            AtomId(0),
            config,
        );
        let report = model.validate();
        if report.is_ok() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(report))
        }
    }

    /// `ell = 3, q = 2`: `e = 2`, a single line `{1, nu}`.
    pub fn m0() -> Self {
        Self::character(3, 2, &[], 1).expect("built-in model")
    }

    /// `ell = 3, q = 4`: `e = 1`, every line is a singleton.
    pub fn m1() -> Self {
        Self::character(3, 4, &[], 1).expect("built-in model")
    }

    /// `ell = 5, q = 2` with a tame character of order 2: `e = 4`, two lines.
    pub fn m2() -> Self {
        Self::character(5, 2, &[2], 1).expect("built-in model")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "m0" => Some(Self::m0()),
            "m1" => Some(Self::m1()),
            "m2" => Some(Self::m2()),
            _ => None,
        }
    }

    /// Table model from explicit data. Every violated invariant is reported.
    pub fn table(config: ModelConfig) -> Result<Self> {
        let ModelConfig::Table { ell, e, q, field_degree, atoms, twist, dual, fusion, trivial } =
            &config
        else {
            return config.build();
        };
        let mut report = ValidationReport::default();
        if !is_prime(*ell) {
            return Err(Error::NotPrime(*ell));
        }
        let field = GaloisField::new(*ell, *field_degree)?;
        if *e == 0 {
            report.push("e must be positive");
        } else if (*ell - 1) % *e as u64 != 0 {
            report.push(format!("e = {e} must divide ell - 1 = {}", ell - 1));
        }
        let q_inv = match q {
            Some(q) => {
                if q.rem_euclid(*ell as i64) == 0 {
                    return Err(Error::QDivisibleByEll { q: *q, ell: *ell });
                }
                let ord = multiplicative_order(*q, *ell);
                if ord != *e as u64 {
                    report.push(format!("e = {e} must equal the order of q = {q} mod ell ({ord})"));
                }
                field.inv(field.from_int(*q)).unwrap()
            }
            None => (1..*ell)
                .map(|x| field.from_int(x as i64))
                .find(|&x| *e > 0 && field.element_order(x) == *e as u64)
                .unwrap_or_else(|| field.one()),
        };
        let n = atoms.len();
        if n == 0 {
            report.push("a model needs at least the trivial atom");
        }
        if twist.len() != n || dual.len() != n {
            report.push("twist and dual tables must have one entry per atom");
        }
        if twist.iter().chain(dual.iter()).any(|&i| i as usize >= n) {
            report.push("twist and dual entries must be atom indices");
        }
        let trivial = trivial.unwrap_or(0);
        if trivial as usize >= n {
            report.push("trivial atom index out of range");
        }
        let mut by_name = HashMap::new();
        let mut built_atoms = Vec::with_capacity(n);
        for (i, a) in atoms.iter().enumerate() {
            if a.dim == 0 {
                report.push(format!("atom {} must have positive dimension", a.name));
            }
            if !valid_name(&a.name) {
                report.push(format!("atom name {:?} is not a valid identifier", a.name));
            }
            if by_name.insert(a.name.clone(), AtomId(i as u32)).is_some() {
                report.push(format!("duplicate atom name {}", a.name));
            }
            let frob_eig = match a.frob_eig {
                Some(v) => match field.element(v) {
                    Ok(x) if !field.is_zero(x) => Some(x),
                    _ => {
                        report.push(format!("frob_eig of {} must be a nonzero field element", a.name));
                        None
                    }
                },
                None => None,
            };
            built_atoms.push(Atom {
                name: a.name.clone(),
                dim: a.dim,
                unramified: a.unramified,
                frob_eig,
            });
        }
        if !report.is_ok() {
            return Err(Error::InvalidModel(report));
        }
        let mut table = HashMap::new();
        for (key, outs) in fusion {
            let Some((a, b)) = split_fusion_key(key, &by_name) else {
                report.push(format!("fusion key {key:?} does not name two atoms"));
                continue;
            };
            let mut ids = Vec::with_capacity(outs.len());
            for o in outs {
                match by_name.get(o) {
                    Some(&id) => ids.push(id),
                    None => report.push(format!("fusion output {o:?} is not an atom")),
                }
            }
            ids.sort();
            if let Some(prev) = table.insert((a, b), ids.clone()) {
                if prev != ids {
                    report.push(format!("fusion key {key:?} given twice with different values"));
                }
            }
        }
        if !report.is_ok() {
            return Err(Error::InvalidModel(report));
        }
        let model = Self::assemble(
            *ell,
            *e,
            field,
            q_inv,
            built_atoms,
            twist.iter().map(|&i| AtomId(i)).collect(),
            dual.iter().map(|&i| AtomId(i)).collect(),
            Fusion::Table(table),
            AtomId(trivial),
            config.clone(),
        );
        let mut full = model.validate();
        full.violations.splice(0..0, report.violations);
        if full.is_ok() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(full))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        ell: u64,
        e: u32,
        field: GaloisField,
        q_inv: Fq,
        atoms: Vec<Atom>,
        twist: Vec<AtomId>,
        dual: Vec<AtomId>,
        fusion: Fusion,
        trivial: AtomId,
        config: ModelConfig,
    ) -> Self {
        let n = atoms.len();
        let mut untwist = vec![AtomId(0); n];
        for (i, t) in twist.iter().enumerate() {
            if t.index() < n {
                untwist[t.index()] = AtomId(i as u32);
            }
        }
        let by_name = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.clone(), AtomId(i as u32)))
            .collect();
        let mut line_index = vec![(AtomId(u32::MAX), 0); n];
        let mut line_order = vec![0; n];
        for start in 0..n {
            if line_index[start].0 .0 != u32::MAX {
                continue;
            }
            let mut orbit = vec![AtomId(start as u32)];
            let mut cur = twist[start];
            while cur.index() != start && orbit.len() <= n && cur.index() < n {
                orbit.push(cur);
                cur = twist[cur.index()];
            }
            let anchor = *orbit.iter().min().unwrap();
            let offset = orbit.iter().position(|&a| a == anchor).unwrap();
            for (k, a) in orbit.iter().enumerate() {
                let pos = (k + orbit.len() - offset) % orbit.len();
                line_index[a.index()] = (anchor, pos as u32);
                line_order[a.index()] = orbit.len() as u32;
            }
        }
        WeilModel {
            ell,
            e,
            field,
            q_inv,
            atoms,
            twist,
            untwist,
            dual,
            fusion,
            trivial,
            config,
            by_name,
            line_index,
            line_order,
        }
    }

    /// Checks every model invariant, collecting all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.atoms.len();
        let e = self.e as usize;
        let mut seen = vec![false; n];
        for t in &self.twist {
            if seen[t.index()] {
                r.push("twist must be a permutation");
            }
            seen[t.index()] = true;
        }
        if !r.is_ok() {
            return r;
        }
        for a in self.atom_ids() {
            if self.twist_pow(a, self.e as i64) != a {
                r.push("twist^e must be the identity");
            }
            let o = self.line_order[a.index()] as usize;
            if e > 0 && !e.is_multiple_of(o) {
                r.push(format!("orbit size must divide e (orbit of size {o}, e = {e})"));
            }
            if (o as u64).is_multiple_of(self.ell) {
                r.push(format!("orbit size must be coprime to ell (orbit of size {o}, ell = {})", self.ell));
            }
            let d = self.dual(a);
            if self.dual(d) != a {
                r.push("dual must be an involution");
            }
            if self.dual(self.twist(a)) != self.untwist(d) {
                r.push("dual(twist(a)) must equal twist^-1(dual(a))");
            }
            let atom = self.atom(a);
            if self.atom(self.twist(a)).dim != atom.dim {
                r.push("twist must preserve dimension");
            }
            if self.atom(d).dim != atom.dim {
                r.push("dual must preserve dimension");
            }
            let expect_eig = atom.dim == 1 && atom.unramified;
            if atom.frob_eig.is_some() != expect_eig {
                r.push(format!("frob_eig must be present iff dim = 1 and unramified (atom {})", atom.name));
            }
            if let (Some(x), Some(y)) = (atom.frob_eig, self.atom(self.twist(a)).frob_eig) {
                if y != self.field.mul(self.q_inv, x) {
                    r.push(format!("frob_eig(twist(a)) must equal q^-1 * frob_eig(a) (atom {})", atom.name));
                }
            }
        }
        let triv = self.atom(self.trivial);
        if self.dual(self.trivial) != self.trivial
            || triv.dim != 1
            || !triv.unramified
            || triv.frob_eig != Some(self.field.one())
        {
            r.push("the trivial atom must be self-dual, one-dimensional, unramified with Frobenius eigenvalue 1");
        }
        self.validate_fusion(&mut r);
        r
    }

    fn validate_fusion(&self, r: &mut ValidationReport) {
        // entries with a nu-power factor are shadowed by the twist, so they must agree with it
        if let Fusion::Table(table) = &self.fusion {
            for (&(a, b), out) in table {
                if self.nu_power(a).is_none() && self.nu_power(b).is_none() {
                    continue;
                }
                let mut given = out.clone();
                given.sort();
                if self.fuse(a, b).is_ok_and(|expect| expect != given) {
                    r.push(format!("fusion table entry {} * {} disagrees with the twist", self.name(a), self.name(b)));
                }
            }
        }
        let ids: Vec<AtomId> = self.atom_ids().collect();
        for &a in &ids {
            for &b in &ids {
                let Ok(ab) = self.fuse(a, b) else { continue };
                let dim: u32 = ab.iter().map(|&c| self.atom(c).dim).sum();
                if dim != self.atom(a).dim * self.atom(b).dim {
                    r.push(format!("fusion must be dimension-additive ({} * {})", self.name(a), self.name(b)));
                }
                if let Ok(ba) = self.fuse(b, a) {
                    if ba != ab {
                        r.push(format!("fusion must be commutative ({} * {})", self.name(a), self.name(b)));
                    }
                }
                if let Ok(tab) = self.fuse(self.twist(a), b) {
                    let mut expect: Vec<AtomId> = ab.iter().map(|&c| self.twist(c)).collect();
                    expect.sort();
                    if tab != expect {
                        r.push(format!("fusion must be twist-equivariant ({} * {})", self.name(a), self.name(b)));
                    }
                }
                if let Ok(dd) = self.fuse(self.dual(a), self.dual(b)) {
                    let mut expect: Vec<AtomId> = ab.iter().map(|&c| self.dual(c)).collect();
                    expect.sort();
                    if dd != expect {
                        r.push(format!("fusion must be dual-equivariant ({} * {})", self.name(a), self.name(b)));
                    }
                }
            }
            if self.atom(a).dim == 1 {
                if let Ok(out) = self.fuse(a, self.dual(a)) {
                    if out != [self.trivial] {
                        r.push(format!("a * dual(a) must be exactly the trivial atom ({})", self.name(a)));
                    }
                }
            }
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q_inv(&self) -> Fq {
        self.q_inv
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn is_character_model(&self) -> bool {
        matches!(self.fusion, Fusion::Group { .. })
    }

    /// True when every atom is one-dimensional and fusion is total, which is
    /// what the matrix oracle needs.
    pub fn supports_explicit(&self) -> bool {
        self.is_character_model() || {
            self.atoms.iter().all(|a| a.dim == 1)
                && self
                    .atom_ids()
                    .all(|a| self.atom_ids().all(|b| self.fuse(a, b).is_ok_and(|v| v.len() == 1)))
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.atoms.len() as u32).map(AtomId)
    }

    pub fn atom(&self, a: AtomId) -> &Atom {
        &self.atoms[a.index()]
    }

    pub fn name(&self, a: AtomId) -> &str {
        &self.atoms[a.index()].name
    }

    pub fn trivial(&self) -> AtomId {
        self.trivial
    }

    pub fn check_atom(&self, a: AtomId) -> Result<AtomId> {
        if a.index() < self.atoms.len() {
            Ok(a)
        } else {
            Err(Error::UnknownAtom(format!("#{}", a.0)))
        }
    }

    pub fn atom_by_name(&self, name: &str) -> Result<AtomId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn twist(&self, a: AtomId) -> AtomId {
        self.twist[a.index()]
    }

    pub fn untwist(&self, a: AtomId) -> AtomId {
        self.untwist[a.index()]
    }

    /// `nu^k a` for any integer `k`.
    pub fn twist_pow(&self, a: AtomId, k: i64) -> AtomId {
        let o = self.line_order[a.index()] as i64;
        let (anchor, pos) = self.line_index[a.index()];
        let target = (pos as i64 + k).rem_euclid(o);
        let mut cur = anchor;
        for _ in 0..target {
            cur = self.twist(cur);
        }
        cur
    }

    pub fn dual(&self, a: AtomId) -> AtomId {
        self.dual[a.index()]
    }

    /// The twist orbit of `a`, starting at its minimal id.
    pub fn line_of(&self, a: AtomId) -> Line {
        let anchor = self.line_index[a.index()].0;
        let mut members = vec![anchor];
        let mut cur = self.twist(anchor);
        while cur != anchor {
            members.push(cur);
            cur = self.twist(cur);
        }
        Line { members }
    }

    pub fn anchor_of(&self, a: AtomId) -> AtomId {
        self.line_index[a.index()].0
    }

    /// Position of `a` in its line, counted from the anchor.
    pub fn position_in_line(&self, a: AtomId) -> usize {
        self.line_index[a.index()].1 as usize
    }

    pub fn line_order(&self, a: AtomId) -> usize {
        self.line_order[a.index()] as usize
    }

    pub fn lines(&self) -> Vec<Line> {
        let mut anchors: Vec<AtomId> = self.line_index.iter().map(|&(a, _)| a).collect();
        anchors.sort();
        anchors.dedup();
        anchors.into_iter().map(|a| self.line_of(a)).collect()
    }

    /// If `a` is `nu^k` (the trivial atom twisted `k` times), returns `k`.
    pub fn nu_power(&self, a: AtomId) -> Option<usize> {
        (self.anchor_of(a) == self.anchor_of(self.trivial)).then(|| {
            let o = self.line_order(a);
            (self.position_in_line(a) + o - self.position_in_line(self.trivial)) % o
        })
    }

    /// Semisimplified tensor product of two atoms, as a sorted multiset.
    ///
    /// Tensoring with a power of `nu` is the twist, in every model.
    pub fn fuse(&self, a: AtomId, b: AtomId) -> Result<Vec<AtomId>> {
        self.check_atom(a)?;
        self.check_atom(b)?;
        if let Some(k) = self.nu_power(a) {
            return Ok(vec![self.twist_pow(b, k as i64)]);
        }
        if let Some(k) = self.nu_power(b) {
            return Ok(vec![self.twist_pow(a, k as i64)]);
        }
        match &self.fusion {
            Fusion::Group { tame_orders } => {
                let (ja, ta) = split_group_id(a.0, self.e, tame_orders);
                let (jb, tb) = split_group_id(b.0, self.e, tame_orders);
                let t: Vec<u32> = ta
                    .iter()
                    .zip(&tb)
                    .zip(tame_orders)
                    .map(|((&x, &y), &m)| (x + y) % m)
                    .collect();
                Ok(vec![AtomId(join_group_id((ja + jb) % self.e, &t, self.e, tame_orders))])
            }
            Fusion::Table(table) => table
                .get(&(a, b))
                .or_else(|| table.get(&(b, a)))
                .cloned()
                .ok_or_else(|| Error::OpaqueFusion(self.name(a).into(), self.name(b).into())),
        }
    }
}

fn split_group_id(id: u32, e: u32, tame_orders: &[u32]) -> (u32, Vec<u32>) {
    let j = id % e;
    let mut rest = id / e;
    let t = tame_orders
        .iter()
        .map(|&m| {
            let c = rest % m;
            rest /= m;
            c
        })
        .collect();
    (j, t)
}

fn join_group_id(j: u32, t: &[u32], e: u32, tame_orders: &[u32]) -> u32 {
    let tame = t
        .iter()
        .zip(tame_orders)
        .rev()
        .fold(0, |acc, (&c, &m)| acc * m + c);
    j + e * tame
}

fn character_atom_name(j: u32, t: &[u32]) -> String {
    if t.iter().all(|&c| c == 0) {
        return format!("nu^{j}");
    }
    let tame = format!(
        "t{}",
        t.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_")
    );
    if j == 0 {
        tame
    } else {
        format!("nu^{j}*{tame}")
    }
}

/// Atom names are identifiers, optionally prefixed by `nu^j*`.
pub fn valid_name(name: &str) -> bool {
    let base = match name.strip_prefix("nu^") {
        Some(rest) => {
            let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
            if digits == 0 {
                return false;
            }
            match rest[digits..].strip_prefix('*') {
                Some(b) => b,
                None => return rest.len() == digits,
            }
        }
        None => name,
    };
    let mut chars = base.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !base.starts_with("nu^")
        && base != "C"
}

fn split_fusion_key(key: &str, names: &HashMap<String, AtomId>) -> Option<(AtomId, AtomId)> {
    key.match_indices('*').find_map(|(i, _)| {
        let (a, b) = (&key[..i], &key[i + 1..]);
        Some((*names.get(a)?, *names.get(b)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(atoms: &[(&str, u32, bool, Option<u64>)], twist: &[u32], dual: &[u32], e: u32, ell: u64) -> ModelConfig {
        ModelConfig::Table {
            ell,
            e,
            q: None,
            field_degree: 1,
            atoms: atoms
                .iter()
                .map(|&(n, d, u, f)| AtomSpec { name: n.into(), dim: d, unramified: u, frob_eig: f })
                .collect(),
            twist: twist.to_vec(),
            dual: dual.to_vec(),
            fusion: BTreeMap::new(),
            trivial: None,
        }
    }

    #[test]
    fn character_model_m0() {
        let m = WeilModel::m0();
        assert_eq!(m.e(), 2);
        assert_eq!(m.num_atoms(), 2);
        let lines = m.lines();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].order(), 2);
        assert_eq!(m.name(AtomId(1)), "nu^1");
        // frob_eig(nu) = q^-1 = 2 in F_3
        assert_eq!(m.atom(AtomId(1)).frob_eig, Some(Fq(2)));
    }

    #[test]
    fn character_model_m1_has_singleton_lines() {
        let m = WeilModel::m1();
        assert_eq!(m.e(), 1);
        assert!(m.lines().iter().all(|l| l.order() == 1));
        assert_eq!(m.line_of(m.trivial()).members, vec![m.trivial()]);
    }

    #[test]
    fn character_model_e4_with_tame_part() {
        let m = WeilModel::m2();
        assert_eq!(m.e(), 4);
        assert_eq!(m.num_atoms(), 8);
        assert_eq!(m.lines().len(), 2);
        assert!(m.lines().iter().all(|l| l.order() == 4));
        let t = m.atom_by_name("t1").unwrap();
        assert!(!m.atom(t).unramified);
        assert_eq!(m.name(m.twist(t)), "nu^1*t1");
        assert_eq!(m.dual(t), t);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(WeilModel::character(4, 3, &[], 1), Err(Error::NotPrime(4))));
        assert!(matches!(
            WeilModel::character(3, 6, &[], 1),
            Err(Error::QDivisibleByEll { .. })
        ));
    }

    #[test]
    fn line_of_is_constant_on_orbits() {
        for m in [WeilModel::m0(), WeilModel::m1(), WeilModel::m2()] {
            for a in m.atom_ids() {
                let l = m.line_of(a);
                assert_eq!(m.line_of(m.twist(a)), l);
                assert!(l.members.contains(&a));
                assert_eq!(l.anchor(), *l.members.iter().min().unwrap());
                for w in l.members.windows(2) {
                    assert_eq!(m.twist(w[0]), w[1]);
                }
                assert_eq!(m.twist(*l.members.last().unwrap()), l.anchor());
            }
        }
    }

    #[test]
    fn fuse_examples() {
        let m = WeilModel::m0();
        let (one, nu) = (AtomId(0), AtomId(1));
        assert_eq!(m.fuse(nu, nu).unwrap(), vec![one]);
        assert_eq!(m.fuse(one, nu).unwrap(), vec![nu]);
        for mm in [WeilModel::m0(), WeilModel::m1(), WeilModel::m2()] {
            for a in mm.atom_ids() {
                assert!(mm.fuse(a, mm.dual(a)).unwrap().contains(&mm.trivial()));
            }
        }
    }

    #[test]
    fn frobenius_eigenvalues_multiply_under_fusion() {
        let m = WeilModel::character(7, 3, &[3], 1).unwrap();
        let f = m.field();
        for a in m.atom_ids() {
            for b in m.atom_ids() {
                let (Some(x), Some(y)) = (m.atom(a).frob_eig, m.atom(b).frob_eig) else { continue };
                let c = m.fuse(a, b).unwrap()[0];
                assert_eq!(m.atom(c).frob_eig, Some(f.mul(x, y)));
            }
        }
    }

    #[test]
    fn table_model_two_atoms_accepted() {
        let cfg = table(&[("nu^0", 1, true, Some(1)), ("nu^1", 1, true, Some(2))], &[1, 0], &[0, 1], 2, 3);
        let m = WeilModel::table(cfg).unwrap();
        assert_eq!(m.lines().len(), 1);
        assert_eq!(m.fuse(AtomId(1), AtomId(1)).unwrap(), vec![AtomId(0)]);
    }

    #[test]
    fn table_model_orbit_must_divide_e() {
        let cfg = table(
            &[("nu^0", 1, true, Some(1)), ("nu^1", 1, true, Some(2)), ("psi", 2, false, None), ("nu^1*psi", 2, false, None), ("nu^2*psi", 2, false, None)],
            &[1, 0, 3, 4, 2],
            &[0, 1, 2, 4, 3],
            2,
            3,
        );
        let Err(Error::InvalidModel(report)) = WeilModel::table(cfg) else { panic!() };
        assert!(report.contains("orbit size must divide e"), "{report}");
    }

    #[test]
    fn table_model_orbit_must_be_prime_to_ell() {
        // ell = 2: an orbit of size 2 cannot occur
        let cfg = table(
            &[("nu^0", 1, true, Some(1)), ("psi", 1, false, None), ("nu^1*psi", 1, false, None)],
            &[0, 2, 1],
            &[0, 1, 2],
            1,
            2,
        );
        let Err(Error::InvalidModel(report)) = WeilModel::table(cfg) else { panic!() };
        assert!(report.contains("orbit size must be coprime to ell"), "{report}");
    }

    #[test]
    fn table_model_with_opaque_fusion() {
        // e = 2 over ell = 3; psi is a 2-dim atom fixed by nu (orbit size 1 < e)
        let cfg = ModelConfig::from_json(
            r#"{"kind":"table","ell":3,"e":2,"q":2,
                "atoms":[{"name":"nu^0","dim":1,"unramified":true,"frob_eig":1},
                         {"name":"nu^1","dim":1,"unramified":true,"frob_eig":2},
                         {"name":"psi","dim":2,"unramified":false}],
                "twist":[1,0,2],"dual":[0,1,2]}"#,
        )
        .unwrap();
        let m = cfg.build().unwrap();
        let psi = m.atom_by_name("psi").unwrap();
        assert_eq!(m.line_order(psi), 1);
        assert_eq!(m.fuse(AtomId(1), psi).unwrap(), vec![psi]);
        assert!(matches!(m.fuse(psi, psi), Err(Error::OpaqueFusion(..))));
        assert!(!m.supports_explicit());
    }

    #[test]
    fn table_model_reports_every_violation() {
        let cfg = table(&[("nu^0", 1, true, Some(2)), ("b", 1, false, None)], &[0, 1], &[1, 0], 1, 3);
        let Err(Error::InvalidModel(report)) = WeilModel::table(cfg) else { panic!() };
        assert!(report.contains("trivial atom"));
        assert!(report.contains("dual"));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ModelConfig::from_json(r#"{"kind":"character","ell":3,"q":2,"tame_orders":[2],"field_degree":1}"#).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ModelConfig::from_json(&text).unwrap(), cfg);
        let m = cfg.build().unwrap();
        assert_eq!(m.num_atoms(), 4);
    }

    #[test]
    fn fusion_table_keys_may_contain_twisted_names() {
        let mut names = HashMap::new();
        names.insert("nu^1*psi".to_string(), AtomId(3));
        names.insert("phi".to_string(), AtomId(4));
        assert_eq!(split_fusion_key("nu^1*psi*phi", &names), Some((AtomId(3), AtomId(4))));
        assert!(valid_name("nu^1*psi"));
        assert!(valid_name("nu^12"));
        assert!(!valid_name("nu^"));
        assert!(!valid_name("1abc"));
    }
}

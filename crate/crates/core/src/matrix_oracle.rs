//! Brute-force realization of classes as explicit operators, used to check
//! the symbolic rules.
//!
//! An explicit representation is a list of one-dimensional atoms (one per
//! slot) and a matrix `U` with `U[i][j] != 0` only if `atoms[i] = nu atoms[j]`.
//! Restricted to one line this is a representation of the cyclic quiver with
//! `o` vertices, and [`decompose`] recovers its strings and bands from ranks.
//!
//! The segment tensor formula holds only in characteristic 0 or when the
//! segments are short compared to the characteristic, so tensor checks are
//! run over [`PrimeField::oracle`](crate::field::PrimeField::oracle).

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use crate::deligne_algebra::{Core, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::weil_model::{AtomId, WeilModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitRep<E> {
    pub atoms: Vec<AtomId>,
    pub op: Matrix<E>,
}

impl<E: Copy + Eq> ExplicitRep<E> {
    pub fn dim(&self) -> usize {
        self.atoms.len()
    }

    pub fn validate<F: Field<Elem = E>>(&self, f: &F, model: &WeilModel) -> Result<()> {
        let n = self.atoms.len();
        if self.op.rows() != n || self.op.cols() != n {
            return Err(Error::InvalidExplicitRep(format!(
                "{n} slots but a {}x{} operator",
                self.op.rows(),
                self.op.cols()
            )));
        }
        for &a in &self.atoms {
            model.check_atom(a)?;
            if model.atom(a).dim != 1 {
                return Err(Error::InvalidExplicitRep(format!("{} is not one-dimensional", model.name(a))));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !f.is_zero(self.op.get(i, j)) && self.atoms[i] != model.twist(self.atoms[j]) {
                    return Err(Error::InvalidExplicitRep(format!(
                        "entry ({i},{j}) links {} to {}, which is not its twist",
                        model.name(self.atoms[j]),
                        model.name(self.atoms[i])
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dump_text<F: Field<Elem = E>>(&self, f: &F, model: &WeilModel) -> String {
        let names: Vec<&str> = self.atoms.iter().map(|&a| model.name(a)).collect();
        let mut out = format!("atoms: {}\n", names.join(" "));
        for i in 0..self.op.rows() {
            let row: Vec<String> = self.op.row(i).iter().map(|&x| f.display(x)).collect();
            out.push_str(&format!("[{}]\n", row.join(" ")));
        }
        out
    }

    pub fn dump_json<F: Field<Elem = E>>(&self, f: &F, model: &WeilModel) -> Value {
        let rows: Vec<Vec<String>> = (0..self.op.rows())
            .map(|i| self.op.row(i).iter().map(|&x| f.display(x)).collect())
            .collect();
        json!({
            "atoms": self.atoms.iter().map(|&a| model.name(a)).collect::<Vec<_>>(),
            "field_order": f.order(),
            "op": rows,
        })
    }
}

fn require_explicit(model: &WeilModel) -> Result<()> {
    if model.supports_explicit() {
        Ok(())
    } else {
        Err(Error::NonCharacterModel)
    }
}

/// Number of cycle summands counted with multiplicity; one holonomy each.
pub fn num_cycle_parts(x: &DeligneClass) -> usize {
    x.parts().filter(|(i, _)| i.is_cycle()).map(|(_, n)| n as usize).sum()
}

/// Block-diagonal realization. Cycle summands consume `holonomies` in
/// canonical order.
pub fn realize<F: Field>(
    f: &F,
    model: &WeilModel,
    x: &DeligneClass,
    holonomies: &[F::Elem],
) -> Result<ExplicitRep<F::Elem>> {
    require_explicit(model)?;
    x.check(model)?;
    let needed = num_cycle_parts(x);
    if holonomies.len() < needed {
        return Err(Error::InvalidArgument(format!(
            "{needed} holonomies needed, {} given",
            holonomies.len()
        )));
    }
    if holonomies[..needed].iter().any(|&h| f.is_zero(h)) {
        return Err(Error::InvalidArgument("holonomies must be nonzero".into()));
    }
    let parts = x.expanded();
    let n = x.dim(model) as usize;
    let mut atoms = Vec::with_capacity(n);
    let mut op = Matrix::zeros(f, n, n);
    let mut hol = holonomies.iter();
    for part in parts {
        let base = atoms.len();
        match part.core {
            Core::Atom(a) => {
                for k in 0..part.len as usize {
                    atoms.push(model.twist_pow(a, k as i64));
                    if k > 0 {
                        op.set(base + k, base + k - 1, f.one());
                    }
                }
            }
            Core::Cycle(z) => {
                let line = model.line_of(z).members;
                let o = line.len();
                let lambda = *hol.next().unwrap();
                let slot = |i: usize, k: usize| base + i * o + k;
                for i in 0..part.len as usize {
                    atoms.extend(&line);
                    for k in 0..o {
                        if k + 1 < o {
                            op.set(slot(i, k + 1), slot(i, k), f.one());
                        } else {
                            op.set(slot(i, 0), slot(i, k), lambda);
                            if i + 1 < part.len as usize {
                                op.set(slot(i + 1, 0), slot(i, k), f.one());
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ExplicitRep { atoms, op })
}

/// [`realize`] with holonomies drawn uniformly from the nonzero elements.
pub fn realize_random<F: Field, R: Rng + ?Sized>(
    f: &F,
    model: &WeilModel,
    x: &DeligneClass,
    rng: &mut R,
) -> Result<ExplicitRep<F::Elem>> {
    let hol: Vec<F::Elem> = (0..num_cycle_parts(x)).map(|_| f.random_nonzero(rng)).collect();
    realize(f, model, x, &hol)
}

/// `U (x) 1 + 1 (x) U'` on the pairwise fusions of the slots.
pub fn tensor_explicit<F: Field>(
    f: &F,
    model: &WeilModel,
    a: &ExplicitRep<F::Elem>,
    b: &ExplicitRep<F::Elem>,
) -> Result<ExplicitRep<F::Elem>> {
    require_explicit(model)?;
    let (n, m) = (a.dim(), b.dim());
    let mut atoms = Vec::with_capacity(n * m);
    for &x in &a.atoms {
        for &y in &b.atoms {
            match model.fuse(x, y)?.as_slice() {
                [z] => atoms.push(*z),
                _ => return Err(Error::NonCharacterModel),
            }
        }
    }
    let mut op = Matrix::zeros(f, n * m, n * m);
    for i in 0..n {
        for k in 0..n {
            let u = a.op.get(i, k);
            if !f.is_zero(u) {
                for j in 0..m {
                    op.set(i * m + j, k * m + j, u);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..m {
            for l in 0..m {
                let u = b.op.get(j, l);
                if !f.is_zero(u) {
                    let (r, c) = (i * m + j, i * m + l);
                    op.set(r, c, f.add(op.get(r, c), u));
                }
            }
        }
    }
    Ok(ExplicitRep { atoms, op })
}

/// Canonical class of an explicit representation.
pub fn decompose<F: Field>(f: &F, model: &WeilModel, rep: &ExplicitRep<F::Elem>) -> Result<DeligneClass> {
    rep.validate(f, model)?;
    // slots of each line, grouped by position in the line
    let mut lines: BTreeMap<AtomId, Vec<Vec<usize>>> = BTreeMap::new();
    for (s, &a) in rep.atoms.iter().enumerate() {
        let z = model.anchor_of(a);
        let verts = lines.entry(z).or_insert_with(|| vec![Vec::new(); model.line_order(z)]);
        verts[model.position_in_line(a)].push(s);
    }
    let mut out = DeligneClass::zero();
    for (z, verts) in lines {
        decompose_line(f, model, &rep.op, z, &verts, &mut out);
    }
    Ok(out)
}

fn decompose_line<F: Field>(
    f: &F,
    model: &WeilModel,
    op: &Matrix<F::Elem>,
    z: AtomId,
    verts: &[Vec<usize>],
    out: &mut DeligneClass,
) {
    let o = verts.len();
    let total: usize = verts.iter().map(Vec::len).sum();
    let block = |v: usize| op.submatrix(&verts[(v + 1) % o], &verts[v]);
    let blocks: Vec<_> = (0..o).map(block).collect();

    // ranks[v][j] = rank of U^j on the slots at vertex v
    let mut ranks: Vec<Vec<usize>> = verts.iter().map(|s| vec![s.len()]).collect();
    let mut chains: Vec<Matrix<F::Elem>> = verts.iter().map(|s| Matrix::identity(f, s.len())).collect();
    let mut holonomy = None;
    for j in 1.. {
        let mut changed = false;
        for v in 0..o {
            if chains[v].cols() == 0 {
                ranks[v].push(0);
                continue;
            }
            chains[v] = blocks[(v + j - 1) % o].mul(f, &chains[v]);
            let r = chains[v].rank(f);
            changed |= r != ranks[v][j - 1];
            ranks[v].push(r);
        }
        if j == o {
            holonomy = Some(chains[0].clone());
        }
        if !changed && j >= o {
            break;
        }
    }
    let rank = |v: usize, j: usize| ranks[v].get(j).copied().unwrap_or(*ranks[v].last().unwrap());
    // strings starting at v of length at least j
    let s = |v: usize, j: usize| rank(v, j - 1) - rank((v + o - 1) % o, j);
    let max_j = ranks[0].len() + 1;
    let mut string_dim = 0;
    let line = model.line_of(z).members;
    for (v, &atom) in line.iter().enumerate() {
        for r in 1..=max_j {
            let n = s(v, r) - s(v, r + 1);
            if n > 0 {
                out.add_part(Indec::atom(r as u32, atom), n as u64);
                string_dim += n * r;
            }
        }
    }
    if string_dim == total {
        return;
    }

    // bands: Jordan blocks of the invertible part of the holonomy at vertex 0
    let h = holonomy.expect("holonomy computed");
    let g = h.charpoly(f).strip_x_power(f).radical(f);
    let gh = h.eval_poly(f, &g);
    let mut band_rank = vec![h.rows()];
    let mut pow = Matrix::identity(f, h.rows());
    loop {
        pow = gh.mul(f, &pow);
        let r = pow.rank(f);
        let last = *band_rank.last().unwrap();
        band_rank.push(r);
        if r == last {
            break;
        }
    }
    let at_least = |j: usize| band_rank[j - 1] - band_rank.get(j).copied().unwrap_or(*band_rank.last().unwrap());
    for m in 1..band_rank.len() {
        let n = at_least(m) - at_least(m + 1);
        if n > 0 {
            out.add_part(Indec::cycle(model, m as u32, z), n as u64);
        }
    }
}

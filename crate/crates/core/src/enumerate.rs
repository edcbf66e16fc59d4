//! Exhaustive and random generation of classes.

use rand::Rng;

use crate::deligne_algebra::{AtomMultiset, DeligneClass, Indec};
use crate::weil_model::WeilModel;

/// All indecomposables of dimension at most `max_dim`, in canonical order.
pub fn indecs(model: &WeilModel, max_dim: u64, nilpotent_only: bool) -> Vec<Indec> {
    let mut out = Vec::new();
    for r in 1..=max_dim as u32 {
        for a in model.atom_ids() {
            let i = Indec::atom(r, a);
            if i.dim(model) <= max_dim {
                out.push(i);
            }
        }
        if !nilpotent_only {
            for line in model.lines() {
                let i = Indec::cycle(model, r, line.anchor());
                if i.dim(model) <= max_dim {
                    out.push(i);
                }
            }
        }
    }
    out.sort();
    out
}

/// Every class of dimension at most `max_dim`, the zero class included.
pub fn classes_up_to_dim(model: &WeilModel, max_dim: u64, nilpotent_only: bool) -> Vec<DeligneClass> {
    let basis: Vec<(Indec, u64)> = indecs(model, max_dim, nilpotent_only)
        .into_iter()
        .map(|i| (i, i.dim(model)))
        .collect();
    let mut out = Vec::new();
    let mut cur = DeligneClass::zero();
    fn rec(basis: &[(Indec, u64)], budget: u64, cur: &mut DeligneClass, out: &mut Vec<DeligneClass>) {
        let Some((&(i, d), rest)) = basis.split_first() else {
            out.push(cur.clone());
            return;
        };
        rec(rest, budget, cur, out);
        let mut n = 0;
        while (n + 1) * d <= budget {
            n += 1;
            cur.add_part(i, 1);
            rec(rest, budget - n * d, cur, out);
        }
        cur.remove_part(&i, n);
    }
    rec(&basis, max_dim, &mut cur, &mut out);
    out.sort();
    out
}

/// Every class whose support is exactly `target`.
pub fn classes_with_support(model: &WeilModel, target: &AtomMultiset, nilpotent_only: bool) -> Vec<DeligneClass> {
    let total: u64 = target.iter().map(|(&a, &n)| n * model.atom(a).dim as u64).sum();
    let basis: Vec<(Indec, AtomMultiset)> = indecs(model, total, nilpotent_only)
        .into_iter()
        .filter_map(|i| {
            let s = DeligneClass::single(i).support(model);
            s.iter().all(|(a, n)| target.get(a).is_some_and(|m| m >= n)).then_some((i, s))
        })
        .collect();
    let mut out = Vec::new();
    fn rec(
        basis: &[(Indec, AtomMultiset)],
        remaining: &mut AtomMultiset,
        cur: &mut DeligneClass,
        out: &mut Vec<DeligneClass>,
    ) {
        if remaining.values().all(|&n| n == 0) {
            out.push(cur.clone());
            return;
        }
        let Some(((i, s), rest)) = basis.split_first() else { return };
        rec(rest, remaining, cur, out);
        let mut n = 0;
        while s.iter().all(|(a, k)| remaining[a] >= *k) {
            for (a, k) in s {
                *remaining.get_mut(a).unwrap() -= k;
            }
            cur.add_part(*i, 1);
            n += 1;
            rec(rest, remaining, cur, out);
        }
        for (a, k) in s {
            *remaining.get_mut(a).unwrap() += k * n;
        }
        cur.remove_part(i, n);
    }
    let mut remaining = target.clone();
    rec(&basis, &mut remaining, &mut DeligneClass::zero(), &mut out);
    out.sort();
    out
}

/// Nilpotent classes with every segment of length at most `max_len` and at
/// most `max_parts` summands. Closed under taking summands.
pub fn bounded_nilpotent(model: &WeilModel, max_len: u32, max_parts: u64) -> Vec<DeligneClass> {
    let basis: Vec<Indec> = (1..=max_len)
        .flat_map(|r| model.atom_ids().map(move |a| Indec::atom(r, a)))
        .collect();
    let mut out = Vec::new();
    fn rec(basis: &[Indec], budget: u64, cur: &mut DeligneClass, out: &mut Vec<DeligneClass>) {
        let Some((&i, rest)) = basis.split_first() else {
            out.push(cur.clone());
            return;
        };
        rec(rest, budget, cur, out);
        for n in 1..=budget {
            cur.add_part(i, 1);
            rec(rest, budget - n, cur, out);
        }
        cur.remove_part(&i, budget);
    }
    rec(&basis, max_parts, &mut DeligneClass::zero(), &mut out);
    out.sort();
    out
}

/// All sub-multisets of `x`, `x` and the zero class included.
pub fn sub_multisets(x: &DeligneClass) -> Vec<DeligneClass> {
    let parts: Vec<(Indec, u64)> = x.parts().map(|(i, n)| (*i, n)).collect();
    let mut out = vec![DeligneClass::zero()];
    for (i, n) in parts {
        let prev = std::mem::take(&mut out);
        for base in prev {
            for k in 0..=n {
                let mut y = base.clone();
                y.add_part(i, k);
                out.push(y);
            }
        }
    }
    out
}

/// Random nilpotent class with up to `max_parts` summands of length up to `max_len`.
pub fn random_nilpotent<R: Rng + ?Sized>(
    model: &WeilModel,
    rng: &mut R,
    max_parts: u64,
    max_len: u32,
) -> DeligneClass {
    let n = rng.gen_range(0..=max_parts);
    (0..n)
        .map(|_| {
            let a = crate::weil_model::AtomId(rng.gen_range(0..model.num_atoms() as u32));
            Indec::atom(rng.gen_range(1..=max_len), a)
        })
        .collect()
}

/// Random class where each summand is a cycle with probability one third.
pub fn random_class<R: Rng + ?Sized>(model: &WeilModel, rng: &mut R, max_parts: u64, max_len: u32) -> DeligneClass {
    let n = rng.gen_range(0..=max_parts);
    (0..n)
        .map(|_| {
            let a = crate::weil_model::AtomId(rng.gen_range(0..model.num_atoms() as u32));
            let r = rng.gen_range(1..=max_len);
            if rng.gen_ratio(1, 3) {
                Indec::cycle(model, r, a)
            } else {
                Indec::atom(r, a)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_small_dims() {
        let m0 = WeilModel::m0();
        // dim <= 1: 0, nu^0, nu^1
        assert_eq!(classes_up_to_dim(&m0, 1, false).len(), 3);
        // dim 2 adds 2*nu^0, nu^0+nu^1, 2*nu^1, [0,1], [1,2], C(nu^0)
        assert_eq!(classes_up_to_dim(&m0, 2, false).len(), 9);
        assert_eq!(classes_up_to_dim(&m0, 2, true).len(), 8);
    }

    #[test]
    fn support_enumeration_matches_filter() {
        for m in [WeilModel::m0(), WeilModel::m1(), WeilModel::m2()] {
            let all = classes_up_to_dim(&m, 4, false);
            let target = all[all.len() / 2].support(&m);
            let expect: Vec<_> = all.iter().filter(|x| x.support(&m) == target).cloned().collect();
            assert_eq!(classes_with_support(&m, &target, false), expect);
        }
    }

    #[test]
    fn st0_support_classes_m0() {
        let m = WeilModel::m0();
        let line: AtomMultiset = m.line_of(m.trivial()).members.iter().map(|&a| (a, 1)).collect();
        assert_eq!(classes_with_support(&m, &line, false).len(), 4);
        assert_eq!(classes_with_support(&m, &line, true).len(), 3);
    }

    #[test]
    fn bounded_domain_is_closed_under_summands() {
        let m = WeilModel::m0();
        let d = bounded_nilpotent(&m, 3, 3);
        // multisets of at most 3 out of 6 indecomposables
        assert_eq!(d.len(), 84);
        for x in &d {
            for y in sub_multisets(x) {
                assert!(d.binary_search(&y).is_ok());
            }
        }
    }

    #[test]
    fn sub_multiset_count() {
        let m = WeilModel::m0();
        let x = crate::expr::parse_class(&m, "2*nu^0 + [0,1]").unwrap();
        assert_eq!(sub_multisets(&x).len(), 6);
    }
}

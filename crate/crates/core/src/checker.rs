//! Bounded mechanical verification of the characterization of CV and of the
//! semiring identities, with JSON certificates.
//!
//! The forced-map solver starts from every class with the right support and
//! prunes candidates with the rules a map `CV'` must satisfy:
//!
//! * dual: `CV'(x^dual) = CV'(x)^dual`;
//! * L-condition on `St_0(Z)`: `L(c (x) c^dual) = 1`;
//! * segments: `CV'([0,j-1] (x) x) = [0,j-1] (x) CV'(x)`;
//! * summands: summands of images are images, and preimages of the summands
//!   of `CV'(x)` add up to `x`.
//!
//! A class is certified outside the image when every nilpotent class with its
//! support lies in the domain and none of them keeps it as a candidate.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cv_map;
use crate::deligne_algebra::{st0, AtomMultiset, DeligneClass, Indec};
use crate::enumerate;
use crate::error::Result;
use crate::expr::format_class;
use crate::grothendieck as gs;
use crate::lfactor::l_pair;
use crate::weil_model::{AtomId, WeilModel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub statement: String,
    pub model: Value,
    pub bounds: Value,
    pub pass: bool,
    pub counts: BTreeMap<String, u64>,
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Certificate {
    fn new(statement: &str, model: &WeilModel, bounds: Value) -> Self {
        Certificate {
            statement: statement.into(),
            model: serde_json::to_value(model.config()).expect("config serializes"),
            bounds,
            pass: true,
            counts: BTreeMap::new(),
            counterexample: None,
            details: None,
        }
    }

    fn fail(&mut self, why: String) {
        if self.pass {
            self.counterexample = Some(why);
        }
        self.pass = false;
    }

    fn count(&mut self, key: &str, n: u64) {
        self.counts.insert(key.into(), n);
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

fn line_support(model: &WeilModel, z: AtomId) -> AtomMultiset {
    model.line_of(z).members.into_iter().map(|a| (a, 1)).collect()
}

/// Classes with the support of `St_0(Z)`: the nilpotent ones plus `C(Z)`.
pub fn enumerate_st0_candidates(model: &WeilModel, z: AtomId) -> Vec<DeligneClass> {
    enumerate::classes_with_support(model, &line_support(model, z), false)
}

/// Keeps the candidates `c` with `L(c (x) c^dual) = 1`.
fn l_condition_survivors(model: &WeilModel, cands: &[DeligneClass]) -> Result<Vec<DeligneClass>> {
    let mut out = Vec::new();
    for c in cands {
        if l_pair(model, c, &c.dual(model))?.is_trivial() {
            out.push(c.clone());
        }
    }
    Ok(out)
}

pub fn check_prop_observation1(model: &WeilModel, z: AtomId) -> Result<Certificate> {
    let z = model.anchor_of(z);
    let mut cert = Certificate::new(
        "prop_observation_1",
        model,
        json!({ "line": model.name(z), "order": model.line_order(z) }),
    );
    let cands = enumerate_st0_candidates(model, z);
    let survivors = l_condition_survivors(model, &cands)?;
    cert.count("candidates", cands.len() as u64);
    cert.count("survivors", survivors.len() as u64);
    let cycle = DeligneClass::single(Indec::cycle(model, 1, z));
    if survivors != [cycle.clone()] {
        let extra = survivors.iter().find(|c| **c != cycle);
        cert.fail(match extra {
            Some(c) => format!("surviving candidate {}", format_class(model, c)),
            None => "the cycle candidate was eliminated".into(),
        });
    }
    cert.details = Some(json!({
        "survivors": survivors.iter().map(|c| format_class(model, c)).collect::<Vec<_>>(),
    }));
    Ok(cert)
}

/// Rule sets and orders for [`ForcedCvSolver`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Dual,
    Segment,
    NotInImage,
    Preimage,
}

const RULE_ORDER: [Rule; 4] = [Rule::Dual, Rule::Segment, Rule::NotInImage, Rule::Preimage];

/// Candidate images of every class in a summand-closed nilpotent domain.
pub struct ForcedCvSolver<'a> {
    model: &'a WeilModel,
    domain: Vec<DeligneClass>,
    index: HashMap<DeligneClass, usize>,
    cand: Vec<BTreeSet<DeligneClass>>,
    by_support: HashMap<AtomMultiset, Vec<usize>>,
    complete: HashMap<AtomMultiset, bool>,
    not_im: HashSet<DeligneClass>,
    // image -> preimage, from forced values and their segment twists
    facts: HashMap<DeligneClass, DeligneClass>,
    fact_sources: HashSet<usize>,
    max_j: u32,
    max_w_dim: u64,
    pub rounds: usize,
    pub contradiction: Option<String>,
}

impl<'a> ForcedCvSolver<'a> {
    /// `domain` must be closed under taking summands.
    pub fn new(model: &'a WeilModel, domain: Vec<DeligneClass>, l_condition: bool) -> Result<Self> {
        let index: HashMap<_, _> = domain.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut by_support: HashMap<AtomMultiset, Vec<usize>> = HashMap::new();
        let mut support_cands: HashMap<AtomMultiset, Vec<DeligneClass>> = HashMap::new();
        let mut cand = Vec::with_capacity(domain.len());
        for (i, x) in domain.iter().enumerate() {
            let s = x.support(model);
            by_support.entry(s.clone()).or_default().push(i);
            let all = support_cands
                .entry(s.clone())
                .or_insert_with(|| enumerate::classes_with_support(model, &s, false));
            let mut c: BTreeSet<DeligneClass> = all.iter().cloned().collect();
            if l_condition && cv_map::is_nonbanal_cuspidal_parameter(model, x).is_some_and(|(k, _)| k == 0) {
                let all: Vec<_> = c.into_iter().collect();
                c = l_condition_survivors(model, &all)?.into_iter().collect();
            }
            cand.push(c);
        }
        let max_dim = domain.iter().map(|x| x.dim(model)).max().unwrap_or(0);
        let mut s = ForcedCvSolver {
            model,
            domain,
            index,
            cand,
            by_support,
            complete: HashMap::new(),
            not_im: HashSet::new(),
            facts: HashMap::new(),
            fact_sources: HashSet::new(),
            max_j: max_dim.max(1) as u32,
            max_w_dim: 0,
            rounds: 0,
            contradiction: None,
        };
        s.max_w_dim = s
            .by_support
            .keys()
            .cloned()
            .collect::<Vec<_>>()
            .into_iter()
            .filter(|k| s.is_complete(k))
            .map(|k| k.iter().map(|(&a, &n)| n * model.atom(a).dim as u64).sum())
            .max()
            .unwrap_or(0);
        s.refresh_facts()?;
        Ok(s)
    }

    pub fn domain(&self) -> &[DeligneClass] {
        &self.domain
    }

    pub fn candidates(&self, x: &DeligneClass) -> Option<&BTreeSet<DeligneClass>> {
        self.index.get(x).map(|&i| &self.cand[i])
    }

    fn is_complete(&mut self, s: &AtomMultiset) -> bool {
        if let Some(&b) = self.complete.get(s) {
            return b;
        }
        let b = enumerate::classes_with_support(self.model, s, true)
            .iter()
            .all(|x| self.index.contains_key(x));
        self.complete.insert(s.clone(), b);
        b
    }

    /// Certified outside the image of any admissible map.
    pub fn not_in_image(&mut self, w: &DeligneClass) -> bool {
        if self.not_im.contains(w) {
            return true;
        }
        let s = w.support(self.model);
        if !self.is_complete(&s) {
            return false;
        }
        let out = self.by_support.get(&s).is_none_or(|xs| xs.iter().all(|&i| !self.cand[i].contains(w)));
        if out {
            self.not_im.insert(w.clone());
        }
        out
    }

    fn set_contradiction(&mut self, msg: String) {
        if self.contradiction.is_none() {
            self.contradiction = Some(msg);
        }
    }

    fn add_fact(&mut self, x: DeligneClass, y: DeligneClass) {
        match self.facts.get(&y) {
            Some(p) if *p != x => {
                let msg = format!(
                    "{} has two preimages {} and {}",
                    format_class(self.model, &y),
                    format_class(self.model, p),
                    format_class(self.model, &x)
                );
                self.set_contradiction(msg);
            }
            Some(_) => {}
            None => {
                self.facts.insert(y, x);
            }
        }
    }

    fn refresh_facts(&mut self) -> Result<()> {
        for i in 0..self.domain.len() {
            if self.cand[i].len() != 1 || self.fact_sources.contains(&i) {
                continue;
            }
            self.fact_sources.insert(i);
            let x = self.domain[i].clone();
            let y = self.cand[i].first().unwrap().clone();
            for j in 1..=self.max_j {
                let seg = DeligneClass::single(Indec::atom(j, self.model.trivial()));
                let xj = seg.tensor(&x, self.model)?;
                let yj = seg.tensor(&y, self.model)?;
                self.add_fact(xj, yj);
            }
        }
        Ok(())
    }

    fn restrict(&mut self, i: usize, keep: impl Fn(&DeligneClass) -> bool) -> bool {
        let before = self.cand[i].len();
        self.cand[i].retain(|c| keep(c));
        let after = self.cand[i].len();
        if after == 0 {
            let msg = format!("no admissible image for {}", format_class(self.model, &self.domain[i]));
            self.set_contradiction(msg);
        }
        after != before
    }

    fn apply(&mut self, rule: Rule, i: usize) -> Result<bool> {
        let model = self.model;
        let x = self.domain[i].clone();
        match rule {
            Rule::Dual => {
                let Some(&d) = self.index.get(&x.dual(model)) else { return Ok(false) };
                let allowed: HashSet<DeligneClass> = self.cand[d].iter().map(|c| c.dual(model)).collect();
                Ok(self.restrict(i, |c| allowed.contains(c)))
            }
            Rule::Segment => {
                let mut changed = false;
                for j in 2..=self.max_j {
                    let seg = DeligneClass::single(Indec::atom(j, model.trivial()));
                    let xj = seg.tensor(&x, model)?;
                    let Some(&k) = self.index.get(&xj) else { continue };
                    let mut up = HashSet::new();
                    let mut back = HashMap::new();
                    for c in &self.cand[i] {
                        let t = seg.tensor(c, model)?;
                        up.insert(t.clone());
                        back.insert(c.clone(), t);
                    }
                    changed |= self.restrict(k, |c| up.contains(c));
                    let allowed = self.cand[k].clone();
                    changed |= self.restrict(i, |c| allowed.contains(&back[c]));
                }
                Ok(changed)
            }
            Rule::NotInImage => {
                let mut bad = Vec::new();
                for c in self.cand[i].clone() {
                    if self.excluded_by_descent(&c)? {
                        bad.push(c);
                    }
                }
                Ok(self.restrict(i, |c| !bad.contains(c)))
            }
            Rule::Preimage => {
                let mut bad = Vec::new();
                for c in &self.cand[i] {
                    if let Some(p) = self.facts.get(c) {
                        if *p != x {
                            bad.push(c.clone());
                            continue;
                        }
                    }
                    let mut known = DeligneClass::zero();
                    for (w, n) in c.parts() {
                        if let Some(p) = self.facts.get(&DeligneClass::single(*w)) {
                            known = known.direct_sum(&p.scale(n));
                        }
                    }
                    if !x.contains(&known) {
                        bad.push(c.clone());
                    }
                }
                Ok(self.restrict(i, |c| !bad.contains(c)))
            }
        }
    }

    /// `c` cannot be an image if some `[0,j-1] (x) c` has a summand that is
    /// certified outside the image.
    fn excluded_by_descent(&mut self, c: &DeligneClass) -> Result<bool> {
        for j in 1..=c.max_len().max(1) {
            let seg = DeligneClass::single(Indec::atom(j, self.model.trivial()));
            let t = seg.tensor(c, self.model)?;
            for w in small_summands(self.model, &t, self.max_w_dim) {
                if self.not_in_image(&w) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Runs the rules to a fixed point in the given order.
    pub fn solve(&mut self, rules: &[Rule], reverse_domain: bool) -> Result<()> {
        let order: Vec<usize> = if reverse_domain {
            (0..self.domain.len()).rev().collect()
        } else {
            (0..self.domain.len()).collect()
        };
        loop {
            self.rounds += 1;
            let mut changed = false;
            for &rule in rules {
                for &i in &order {
                    changed |= self.apply(rule, i)?;
                    self.refresh_facts()?;
                }
            }
            if !changed || self.contradiction.is_some() {
                return Ok(());
            }
        }
    }

    pub fn candidate_map(&self) -> BTreeMap<DeligneClass, BTreeSet<DeligneClass>> {
        self.domain.iter().cloned().zip(self.cand.iter().cloned()).collect()
    }
}

/// Nonzero summands of `t` of dimension at most `max_dim`.
fn small_summands(model: &WeilModel, t: &DeligneClass, max_dim: u64) -> Vec<DeligneClass> {
    let parts: Vec<(Indec, u64, u64)> = t
        .parts()
        .map(|(i, n)| (*i, n, i.dim(model)))
        .filter(|&(_, _, d)| d <= max_dim)
        .collect();
    let mut out = vec![(DeligneClass::zero(), 0u64)];
    for (i, n, d) in parts {
        let prev = out.clone();
        for (base, dim) in prev {
            for k in 1..=n {
                if dim + k * d > max_dim {
                    break;
                }
                let mut y = base.clone();
                y.add_part(i, k);
                out.push((y, dim + k * d));
            }
        }
    }
    out.into_iter().skip(1).map(|(x, _)| x).collect()
}

#[derive(Clone, Debug)]
pub struct ForcedCvOutcome {
    pub candidates: BTreeMap<DeligneClass, BTreeSet<DeligneClass>>,
    pub certificate: Certificate,
}

impl ForcedCvOutcome {
    /// The inputs whose image is forced, with that image.
    pub fn forced_map(&self) -> BTreeMap<DeligneClass, DeligneClass> {
        self.candidates
            .iter()
            .filter(|(_, c)| c.len() == 1)
            .map(|(x, c)| (x.clone(), c.first().unwrap().clone()))
            .collect()
    }
}

/// Derives the forced values of `CV'` on nilpotent classes with segments of
/// length at most `max_len` and at most `max_parts` summands, and checks they
/// agree with `cv`.
pub fn derive_forced_cv(model: &WeilModel, max_len: u32, max_parts: u64) -> Result<ForcedCvOutcome> {
    let domain = enumerate::bounded_nilpotent(model, max_len, max_parts);
    let bounds = json!({ "max_len": max_len, "max_parts": max_parts });
    let mut cert = Certificate::new("forced_cv", model, bounds);

    let mut a = ForcedCvSolver::new(model, domain.clone(), true)?;
    a.solve(&RULE_ORDER, false)?;
    let mut reversed = RULE_ORDER;
    reversed.reverse();
    let mut b = ForcedCvSolver::new(model, domain.clone(), true)?;
    b.solve(&reversed, true)?;
    let mut no_l = ForcedCvSolver::new(model, domain.clone(), false)?;
    no_l.solve(&RULE_ORDER, false)?;

    let map = a.candidate_map();
    cert.count("domain", domain.len() as u64);
    cert.count("rounds", a.rounds as u64);
    cert.count("forced", map.values().filter(|c| c.len() == 1).count() as u64);
    cert.count("not_in_image_certified", a.not_im.len() as u64);
    let ambiguous_without_l = no_l.candidate_map().values().filter(|c| c.len() > 1).count();
    cert.count("ambiguous_without_l_condition", ambiguous_without_l as u64);
    // St_0 of such a line is outside the domain, so its image cannot be forced
    let long_lines = model.lines().iter().filter(|l| l.order() as u64 > max_parts).count();
    cert.count("lines_longer_than_max_parts", long_lines as u64);

    if let Some(msg) = a.contradiction.clone().or(b.contradiction.clone()) {
        cert.fail(format!("contradiction: {msg}"));
    }
    if map != b.candidate_map() {
        cert.fail("rule orders reached different fixed points".into());
    }
    let mut mismatches = 0u64;
    for (x, c) in &map {
        let expect = cv_map::cv(model, x)?;
        if c.len() != 1 || c.first() != Some(&expect) {
            mismatches += 1;
            let got: Vec<String> = c.iter().map(|y| format_class(model, y)).collect();
            cert.fail(format!(
                "{}: candidates {{{}}}, cv gives {}",
                format_class(model, x),
                got.join("; "),
                format_class(model, &expect)
            ));
        }
    }
    cert.count("mismatches", mismatches);
    Ok(ForcedCvOutcome { candidates: map, certificate: cert })
}

/// `[0,j-1] (x) St_0(Z)` is outside the image for every line and `j <= max_j`.
pub fn check_image_exclusion(model: &WeilModel, max_j: u32) -> Result<Certificate> {
    let mut cert = Certificate::new("image_exclusion", model, json!({ "max_j": max_j }));
    let mut checked = 0;
    let mut lines_details = Vec::new();
    for line in model.lines() {
        let z = line.anchor();
        // nilpotent classes supported inside one copy of the line
        let full = line_support(model, z);
        let mut domain = Vec::new();
        let members = line.members.clone();
        for mask in 0u32..(1 << members.len()) {
            let s: AtomMultiset = members
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &a)| (a, 1))
                .collect();
            domain.extend(enumerate::classes_with_support(model, &s, true));
        }
        domain.sort();
        domain.dedup();
        let mut solver = ForcedCvSolver::new(model, domain, true)?;
        solver.solve(&RULE_ORDER, false)?;
        let st = st0(model, 1, z);
        debug_assert_eq!(st.support(model), full);
        let base = solver.not_in_image(&st);
        if !base {
            cert.fail(format!("{} is not certified outside the image", format_class(model, &st)));
        }
        for j in 1..=max_j {
            let seg = DeligneClass::single(Indec::atom(j, model.trivial()));
            let w = seg.tensor(&st, model)?;
            let descent = seg.tensor(&w, model)?.contains(&st);
            checked += 1;
            if !(base && descent) || cv_map::is_c_parameter(model, &w) {
                cert.fail(format!("{} is not excluded from the image", format_class(model, &w)));
            }
        }
        lines_details.push(json!({
            "line": model.name(z),
            "domain": solver.domain().len(),
            "st0_not_in_image": base,
        }));
    }
    cert.count("classes_excluded", checked);
    cert.details = Some(json!({ "lines": lines_details }));
    Ok(cert)
}

/// `CV = h_C^{-1} o h_Nilp`, compatibly with both semiring operations.
pub fn check_semiring_corollary(model: &WeilModel, trials: u64, seed: u64) -> Result<Certificate> {
    let mut cert = Certificate::new("semiring_corollary", model, json!({ "trials": trials, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = vec![(DeligneClass::zero(), DeligneClass::zero())];
    for line in model.lines() {
        pairs.push((st0(model, 1, line.anchor()), DeligneClass::single(Indec::atom(1, model.trivial()))));
    }
    for _ in 0..trials {
        pairs.push((
            enumerate::random_nilpotent(model, &mut rng, 3, 3),
            enumerate::random_nilpotent(model, &mut rng, 3, 3),
        ));
    }
    let mut failures = 0u64;
    for (x, y) in &pairs {
        let hx = gs::h_nilp(model, x)?;
        let hy = gs::h_nilp(model, y)?;
        let via_q = gs::cv_via_quotient(model, x)?;
        let sum = gs::h_c_inverse(model, &gs::quotient_add(&hx, &hy))?;
        let prod = gs::h_c_inverse(model, &gs::quotient_mul(model, &hx, &hy)?)?;
        let ok = via_q == cv_map::cv(model, x)?
            && sum == cv_map::cv(model, &x.direct_sum(y))?
            && prod == cv_map::cv(model, &x.tensor(y, model)?)?;
        if !ok {
            failures += 1;
            cert.fail(format!("x = {}, y = {}", format_class(model, x), format_class(model, y)));
        }
    }
    cert.count("pairs", pairs.len() as u64);
    cert.count("failures", failures);
    Ok(cert)
}

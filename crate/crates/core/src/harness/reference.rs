//! A deliberately naive evaluator, written without caches or shared helpers
//! from the semantics module, used as an oracle for it.

use std::collections::{BTreeMap, BTreeSet};

use crate::axioms::{match_axiom, ConstantSpec};
use crate::semantics::{Evidence, FittingModel};
use crate::syntax::{Formula, Term, Var};
use crate::transform::rename_var;

struct Naive<'m> {
    m: &'m FittingModel,
    reach: Vec<Vec<bool>>,
    implications: Vec<Formula>,
}

fn assignments(vars: &[Var], options: &[Option<Var>]) -> Vec<BTreeMap<Var, Var>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        let mut next = Vec::new();
        for partial in &out {
            for o in options {
                let mut m: BTreeMap<Var, Var> = partial.clone();
                if let Some(d) = o {
                    m.insert(v.clone(), d.clone());
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn free_basics(f: &Formula) -> Vec<Var> {
    f.free_vars().into_iter().filter(Var::is_basic).collect()
}

fn subformulas(f: &Formula, out: &mut Vec<Formula>) {
    out.push(f.clone());
    match f {
        Formula::Atom(..) | Formula::Bottom => {}
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Just(_, _, a) => subformulas(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            subformulas(a, out);
            subformulas(b, out);
        }
    }
}

impl<'m> Naive<'m> {
    fn new(m: &'m FittingModel) -> Self {
        let n = m.worlds.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &m.rel {
                for c in 0..n {
                    if reach[c][a] && !reach[c][b] {
                        reach[c][b] = true;
                        changed = true;
                    }
                }
            }
        }
        let mut seeds: Vec<Formula> = Vec::new();
        if let Evidence::Closure(base) = &m.evidence {
            seeds.extend(base.iter().map(|(_, f, _)| f.clone()));
        }
        if let ConstantSpec::Explicit(entries) = &m.cs {
            seeds.extend(entries.iter().map(|(_, f)| f.clone()));
        }
        let mut subs = Vec::new();
        for f in &seeds {
            subformulas(f, &mut subs);
        }
        let options: Vec<Option<Var>> = std::iter::once(None).chain(m.domain.iter().cloned().map(Some)).collect();
        let mut implications = BTreeSet::new();
        for f in subs.iter().filter(|f| matches!(f, Formula::Implies(..))) {
            for map in assignments(&free_basics(f), &options) {
                implications.insert(f.replace_free(&map));
            }
        }
        Naive {
            m,
            reach,
            implications: implications.into_iter().collect(),
        }
    }

    fn instance_of(&self, pattern: &Formula, target: &Formula) -> bool {
        let options: Vec<Option<Var>> = std::iter::once(None).chain(self.m.domain.iter().cloned().map(Some)).collect();
        assignments(&free_basics(pattern), &options)
            .iter()
            .any(|map| &pattern.replace_free(map) == target)
    }

    fn constant_covers(&self, c: &str, f: &Formula) -> bool {
        match &self.m.cs {
            ConstantSpec::Explicit(entries) => entries.iter().any(|(d, g)| d == c && self.instance_of(g, f)),
            ConstantSpec::Schematic(_) => {
                let mut g = f.clone();
                for (i, w) in f.witness_vars().into_iter().enumerate() {
                    g = rename_var(&g, &w, &Var::basic(&format!("wv{i}")));
                }
                self.m
                    .cs
                    .schemas_of(c)
                    .into_iter()
                    .any(|s| match_axiom(s, f, self.m.logic).is_some() || match_axiom(s, &g, self.m.logic).is_some())
            }
        }
    }

    fn evidence(&self, t: &Term, f: &Formula, w: usize) -> bool {
        let base = match &self.m.evidence {
            Evidence::Full => return true,
            Evidence::Table(entries) => {
                return entries.iter().any(|(s, g, ws)| s == t && ws.contains(&w) && self.instance_of(g, f));
            }
            Evidence::Closure(base) => base,
        };
        if base.iter().any(|(s, g, w0)| s == t && self.reach[*w0][w] && self.instance_of(g, f)) {
            return true;
        }
        let dom: BTreeSet<Var> = self.m.domain.iter().cloned().collect();
        let sub_ok = |xs: &BTreeSet<Var>, body: &Formula| xs.is_subset(&dom) && body.witness_vars().is_subset(xs);
        match t {
            Term::Var(_) => false,
            Term::Const(c) => self.constant_covers(c, f),
            Term::App(s, u) => self.implications.iter().any(|imp| match imp {
                Formula::Implies(a, b) => **b == *f && self.evidence(s, imp, w) && self.evidence(u, a, w),
                _ => false,
            }),
            Term::Sum(s, u) => self.evidence(s, f, w) || self.evidence(u, f, w),
            Term::Bang(s) => match f {
                Formula::Just(s2, xs, body) => s2 == s && sub_ok(xs, body) && self.evidence(s, body, w),
                _ => false,
            },
            Term::Gen(x, s) => match f {
                Formula::Forall(y, body) => x == y && self.evidence(s, body, w),
                _ => false,
            },
            Term::Bar(s) => match f {
                Formula::Forall(y, body) => self
                    .m
                    .domain
                    .iter()
                    .all(|d| self.evidence(s, &body.replace_free(&BTreeMap::from([(y.clone(), d.clone())])), w)),
                _ => false,
            },
            Term::Query(s) => match f {
                Formula::Not(inner) => match &**inner {
                    Formula::Just(s2, xs, body) => {
                        s2 == s
                            && sub_ok(xs, body)
                            && (0..self.m.worlds.len()).any(|v| self.reach[v][w] && !self.evidence(s, body, v))
                    }
                    _ => false,
                },
                _ => false,
            },
        }
    }

    fn truth(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(p, args) => self
                .m
                .interp
                .get(&(p.to_string(), w))
                .is_some_and(|ts| ts.contains(args)),
            Formula::Bottom => false,
            Formula::Not(a) => !self.truth(w, a),
            Formula::And(a, b) => self.truth(w, a) && self.truth(w, b),
            Formula::Or(a, b) => self.truth(w, a) || self.truth(w, b),
            Formula::Implies(a, b) => !self.truth(w, a) || self.truth(w, b),
            Formula::Iff(a, b) => self.truth(w, a) == self.truth(w, b),
            Formula::Forall(x, a) => self
                .m
                .domain
                .iter()
                .all(|d| self.truth(w, &a.replace_free(&BTreeMap::from([(x.clone(), d.clone())])))),
            Formula::Exists(x, a) => self
                .m
                .domain
                .iter()
                .any(|d| self.truth(w, &a.replace_free(&BTreeMap::from([(x.clone(), d.clone())])))),
            Formula::Just(t, _, body) => {
                if !self.evidence(t, body, w) {
                    return false;
                }
                let options: Vec<Option<Var>> = self.m.domain.iter().cloned().map(Some).collect();
                let closings = assignments(&free_basics(body), &options);
                self.m
                    .rel
                    .iter()
                    .filter(|(a, _)| *a == w)
                    .all(|(_, v)| closings.iter().all(|map| self.truth(*v, &body.replace_free(map))))
            }
        }
    }
}

/// Evidence by direct recursion. `None` for closure models with a schematic
/// specification, whose implication universe is infinite.
pub fn reference_evidence(m: &FittingModel, t: &Term, f: &Formula, w: usize) -> Option<bool> {
    if matches!(m.evidence, Evidence::Closure(_)) && m.cs.is_schematic() {
        return None;
    }
    Some(Naive::new(m).evidence(t, f, w))
}

/// Truth of a closed formula at world `w`; `None` when `f` is open, mentions
/// witnesses outside the domain, or the model is out of scope.
pub fn reference_eval(m: &FittingModel, w: usize, f: &Formula) -> Option<bool> {
    if matches!(m.evidence, Evidence::Closure(_)) && m.cs.is_schematic() {
        return None;
    }
    let dom: BTreeSet<Var> = m.domain.iter().cloned().collect();
    if !free_basics(f).is_empty() || !f.witness_vars().is_subset(&dom) || w >= m.worlds.len() {
        return None;
    }
    Some(Naive::new(m).truth(w, f))
}

//! Terms, formulas and the variable discipline.
//!
//! Individual variables come in two lexical classes. Basic variables are plain
//! lowercase identifiers; witness variables carry a leading `@` and are never
//! bound. Both classes share the [`Var`] type and the class is read off the name.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

/// An individual variable. Witness variables are spelled with a leading `@`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Basic,
    Witness,
}

impl Var {
    /// Builds a variable from its concrete spelling (`x`, `@a`).
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    pub fn basic(name: &str) -> Var {
        debug_assert!(!name.starts_with('@'));
        Var::new(name)
    }

    pub fn witness(name: &str) -> Var {
        if name.starts_with('@') {
            Var::new(name)
        } else {
            Var(Arc::from(format!("@{name}")))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> VarKind {
        if self.0.starts_with('@') {
            VarKind::Witness
        } else {
            VarKind::Basic
        }
    }

    pub fn is_witness(&self) -> bool {
        self.kind() == VarKind::Witness
    }

    pub fn is_basic(&self) -> bool {
        self.kind() == VarKind::Basic
    }
}

impl std::fmt::Debug for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type VarSet = BTreeSet<Var>;

/// Convenience for building subscript sets in code and tests.
pub fn varset<'a>(names: impl IntoIterator<Item = &'a str>) -> VarSet {
    names.into_iter().map(Var::new).collect()
}

/// Justification terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Arc<str>),
    Const(Arc<str>),
    App(Arc<Term>, Arc<Term>),
    Sum(Arc<Term>, Arc<Term>),
    Bang(Arc<Term>),
    Query(Arc<Term>),
    Bar(Arc<Term>),
    Gen(Var, Arc<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Arc::from(name))
    }

    pub fn app(t: Term, s: Term) -> Term {
        Term::App(Arc::new(t), Arc::new(s))
    }

    pub fn sum(t: Term, s: Term) -> Term {
        Term::Sum(Arc::new(t), Arc::new(s))
    }

    pub fn bang(t: Term) -> Term {
        Term::Bang(Arc::new(t))
    }

    pub fn query(t: Term) -> Term {
        Term::Query(Arc::new(t))
    }

    pub fn bar(t: Term) -> Term {
        Term::Bar(Arc::new(t))
    }

    pub fn gen(x: Var, t: Term) -> Term {
        Term::Gen(x, Arc::new(t))
    }

    /// Nesting depth; atomic terms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(a, b) | Term::Sum(a, b) => 1 + a.depth().max(b.depth()),
            Term::Bang(a) | Term::Query(a) | Term::Bar(a) | Term::Gen(_, a) => 1 + a.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(a, b) | Term::Sum(a, b) => 1 + a.size() + b.size(),
            Term::Bang(a) | Term::Query(a) | Term::Bar(a) | Term::Gen(_, a) => 1 + a.size(),
        }
    }

    pub fn any(&self, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(a, b) | Term::Sum(a, b) => a.any(pred) || b.any(pred),
            Term::Bang(a) | Term::Query(a) | Term::Bar(a) | Term::Gen(_, a) => a.any(pred),
        }
    }

    pub fn has_query(&self) -> bool {
        self.any(&mut |t| matches!(t, Term::Query(_)))
    }

    pub fn has_bar(&self) -> bool {
        self.any(&mut |t| matches!(t, Term::Bar(_)))
    }

    /// Variables used as `gen` subscripts.
    pub fn gen_vars(&self, out: &mut VarSet) {
        match self {
            Term::Var(_) | Term::Const(_) => {}
            Term::App(a, b) | Term::Sum(a, b) => {
                a.gen_vars(out);
                b.gen_vars(out);
            }
            Term::Bang(a) | Term::Query(a) | Term::Bar(a) => a.gen_vars(out),
            Term::Gen(x, a) => {
                out.insert(x.clone());
                a.gen_vars(out);
            }
        }
    }

    /// Constant names occurring in the term.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.to_string());
            }
            Term::App(a, b) | Term::Sum(a, b) => {
                a.constants(out);
                b.constants(out);
            }
            Term::Bang(a) | Term::Query(a) | Term::Bar(a) | Term::Gen(_, a) => a.constants(out),
        }
    }
}

/// First-order justification formulas.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(Arc<str>, Vec<Var>),
    Bottom,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Forall(Var, Arc<Formula>),
    Exists(Var, Arc<Formula>),
    Just(Arc<Term>, VarSet, Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{replacement} is not free for {target} in `{at}`")]
pub struct CaptureError {
    pub target: Var,
    pub replacement: Var,
    pub at: String,
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom(Arc::from(pred), args.iter().map(|a| Var::new(a)).collect())
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Arc::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: Var, a: Formula) -> Formula {
        Formula::Forall(x, Arc::new(a))
    }

    pub fn exists(x: Var, a: Formula) -> Formula {
        Formula::Exists(x, Arc::new(a))
    }

    pub fn just(t: Term, xs: VarSet, a: Formula) -> Formula {
        Formula::Just(Arc::new(t), xs, Arc::new(a))
    }

    /// Splits `a -> b`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Implies(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_just(&self) -> Option<(&Term, &VarSet, &Formula)> {
        match self {
            Formula::Just(t, xs, a) => Some((t, xs, a)),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bottom => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Just(_, _, a) => {
                1 + a.depth()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bottom => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::Just(t, xs, a) => 1 + t.size() + xs.len() + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Free individual variables. For `t:_X A` this is exactly `X`.
    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut VarSet) {
        match self {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Bottom => {}
            Formula::Not(a) => a.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let mut inner = a.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
            Formula::Just(_, xs, _) => out.extend(xs.iter().cloned()),
        }
    }

    /// Every variable that occurs anywhere: free, bound, in subscripts or as a
    /// `gen` subscript.
    pub fn all_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut VarSet) {
        match self {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Bottom => {}
            Formula::Not(a) => a.collect_all(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                out.insert(x.clone());
                a.collect_all(out);
            }
            Formula::Just(t, xs, a) => {
                t.gen_vars(out);
                out.extend(xs.iter().cloned());
                a.collect_all(out);
            }
        }
    }

    /// Witness variables occurring anywhere in the formula.
    pub fn witness_vars(&self) -> VarSet {
        self.all_vars().into_iter().filter(Var::is_witness).collect()
    }

    pub fn has_witness(&self) -> bool {
        self.all_vars().iter().any(Var::is_witness)
    }

    /// Visits every term inside justification assertions.
    pub fn any_term(&self, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        match self {
            Formula::Atom(..) | Formula::Bottom => false,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.any_term(pred),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.any_term(pred) || b.any_term(pred)
            }
            Formula::Just(t, _, a) => t.any(pred) || a.any_term(pred),
        }
    }

    /// Predicate symbols with their arities.
    pub fn predicates(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Atom(p, args) => {
                out.insert(p.to_string(), args.len());
            }
            Formula::Bottom => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Just(_, _, a) => {
                a.predicates(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
        }
    }

    pub fn is_closed_henkin(&self) -> bool {
        self.free_vars().iter().all(Var::is_witness)
    }

    /// Universal closure over the free basic variables, outermost quantifier
    /// first in lexicographic order.
    pub fn universal_closure(&self) -> Formula {
        let basics: Vec<Var> = self.free_vars().into_iter().filter(Var::is_basic).collect();
        basics
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, x| Formula::forall(x, acc))
    }

    /// Simultaneous substitution of free occurrences, subscripts included.
    pub fn substitute(&self, pairs: &[(Var, Var)]) -> Result<Formula, CaptureError> {
        let map: BTreeMap<Var, Var> = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .cloned()
            .collect();
        subst(self, &map)
    }

    pub fn substitute_map(&self, map: &BTreeMap<Var, Var>) -> Result<Formula, CaptureError> {
        let map: BTreeMap<Var, Var> = map
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        subst(self, &map)
    }

    /// Replaces free occurrences without the free-for check. Used to form
    /// domain instances, where the replacements are witness variables.
    pub fn replace_free(&self, map: &BTreeMap<Var, Var>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|a| map.get(a).unwrap_or(a).clone()).collect(),
            ),
            Formula::Bottom => Formula::Bottom,
            Formula::Not(a) => Formula::not(a.replace_free(map)),
            Formula::And(a, b) => Formula::and(a.replace_free(map), b.replace_free(map)),
            Formula::Or(a, b) => Formula::or(a.replace_free(map), b.replace_free(map)),
            Formula::Implies(a, b) => Formula::implies(a.replace_free(map), b.replace_free(map)),
            Formula::Iff(a, b) => Formula::iff(a.replace_free(map), b.replace_free(map)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let inner: BTreeMap<Var, Var> = map
                    .iter()
                    .filter(|(k, _)| *k != x)
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let body = a.replace_free(&inner);
                if matches!(self, Formula::Forall(..)) {
                    Formula::forall(x.clone(), body)
                } else {
                    Formula::exists(x.clone(), body)
                }
            }
            Formula::Just(t, xs, a) => {
                let inner: BTreeMap<Var, Var> = map
                    .iter()
                    .filter(|(k, _)| xs.contains(*k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let new_xs = xs.iter().map(|v| inner.get(v).unwrap_or(v).clone()).collect();
                Formula::Just(t.clone(), new_xs, Arc::new(a.replace_free(&inner)))
            }
        }
    }
}

fn capture(target: &Var, replacement: &Var, at: &Formula) -> CaptureError {
    CaptureError {
        target: target.clone(),
        replacement: replacement.clone(),
        at: at.to_string(),
    }
}

fn subst(f: &Formula, map: &BTreeMap<Var, Var>) -> Result<Formula, CaptureError> {
    if map.is_empty() {
        return Ok(f.clone());
    }
    Ok(match f {
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter().map(|a| map.get(a).unwrap_or(a).clone()).collect(),
        ),
        Formula::Bottom => Formula::Bottom,
        Formula::Not(a) => Formula::not(subst(a, map)?),
        Formula::And(a, b) => Formula::and(subst(a, map)?, subst(b, map)?),
        Formula::Or(a, b) => Formula::or(subst(a, map)?, subst(b, map)?),
        Formula::Implies(a, b) => Formula::implies(subst(a, map)?, subst(b, map)?),
        Formula::Iff(a, b) => Formula::iff(subst(a, map)?, subst(b, map)?),
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let fa = a.free_vars();
            let inner: BTreeMap<Var, Var> = map
                .iter()
                .filter(|(k, _)| *k != x && fa.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if let Some((k, r)) = inner.iter().find(|(_, r)| *r == x) {
                return Err(capture(k, r, f));
            }
            let body = subst(a, &inner)?;
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(x.clone(), body)
            } else {
                Formula::exists(x.clone(), body)
            }
        }
        Formula::Just(t, xs, a) => {
            let inner: BTreeMap<Var, Var> = map
                .iter()
                .filter(|(k, _)| xs.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return Ok(f.clone());
            }
            let fa = a.free_vars();
            for (k, r) in &inner {
                if fa.contains(r) && !xs.contains(r) {
                    return Err(capture(k, r, f));
                }
            }
            let body_map: BTreeMap<Var, Var> = inner
                .iter()
                .filter(|(k, _)| fa.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let new_xs = xs.iter().map(|v| inner.get(v).unwrap_or(v).clone()).collect();
            Formula::Just(t.clone(), new_xs, Arc::new(subst(a, &body_map)?))
        }
    })
}

/// Whether `y` may replace the free occurrences of `x` in `f` without capture.
pub fn free_for(y: &Var, x: &Var, f: &Formula) -> bool {
    f.substitute(&[(x.clone(), y.clone())]).is_ok()
}

/// Looks for a bijection between the free variables of `f` and of `g` whose
/// simultaneous renaming turns `f` into `g`.
pub fn variable_variant(f: &Formula, g: &Formula) -> Option<BTreeMap<Var, Var>> {
    let mut map = BTreeMap::new();
    let mut bound = Vec::new();
    let mut filters = Vec::new();
    if !collect_variant(f, g, true, &mut bound, &mut filters, &mut map) {
        return None;
    }
    let ff = f.free_vars();
    let fg = g.free_vars();
    if ff.len() != fg.len() {
        return None;
    }
    let rest_dom: Vec<Var> = ff.iter().filter(|v| !map.contains_key(*v)).cloned().collect();
    let image: VarSet = map.values().cloned().collect();
    let rest_cod: Vec<Var> = fg.iter().filter(|v| !image.contains(*v)).cloned().collect();
    if rest_dom.len() != rest_cod.len() || rest_dom.len() > 6 {
        return None;
    }
    let mut perm: Vec<usize> = (0..rest_cod.len()).collect();
    loop {
        let mut cand = map.clone();
        for (i, v) in rest_dom.iter().enumerate() {
            cand.insert(v.clone(), rest_cod[perm[i]].clone());
        }
        if is_bijection_onto(&cand, &ff, &fg) {
            if let Ok(h) = f.substitute_map(&cand) {
                if &h == g {
                    return Some(cand);
                }
            }
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn is_bijection_onto(map: &BTreeMap<Var, Var>, dom: &VarSet, cod: &VarSet) -> bool {
    let keys: VarSet = map.keys().cloned().collect();
    let vals: VarSet = map.values().cloned().collect();
    &keys == dom && &vals == cod && vals.len() == map.len()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn occurrence_free(v: &Var, bound: &[Var], filters: &[VarSet]) -> bool {
    !bound.contains(v) && filters.iter().all(|xs| xs.contains(v))
}

fn collect_variant(
    f: &Formula,
    g: &Formula,
    exact_size: bool,
    bound: &mut Vec<Var>,
    filters: &mut Vec<VarSet>,
    map: &mut BTreeMap<Var, Var>,
) -> bool {
    let link = |a: &Var, b: &Var, bound: &[Var], filters: &[VarSet], map: &mut BTreeMap<Var, Var>| {
        if occurrence_free(a, bound, filters) {
            match map.get(a) {
                Some(prev) => prev == b,
                None => {
                    map.insert(a.clone(), b.clone());
                    true
                }
            }
        } else {
            a == b
        }
    };
    match (f, g) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
            p == q
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(a, b)| link(a, b, bound, filters, map))
        }
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Not(a), Formula::Not(b)) => collect_variant(a, b, exact_size, bound, filters, map),
        (Formula::And(a1, b1), Formula::And(a2, b2))
        | (Formula::Or(a1, b1), Formula::Or(a2, b2))
        | (Formula::Implies(a1, b1), Formula::Implies(a2, b2))
        | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
            collect_variant(a1, a2, exact_size, bound, filters, map) && collect_variant(b1, b2, exact_size, bound, filters, map)
        }
        (Formula::Forall(x, a), Formula::Forall(y, b)) | (Formula::Exists(x, a), Formula::Exists(y, b)) => {
            if x != y || std::mem::discriminant(f) != std::mem::discriminant(g) {
                return false;
            }
            bound.push(x.clone());
            let ok = collect_variant(a, b, exact_size, bound, filters, map);
            bound.pop();
            ok
        }
        (Formula::Just(t, xs, a), Formula::Just(s, ys, b)) => {
            if t != s || (exact_size && xs.len() != ys.len()) || ys.len() > xs.len() {
                return false;
            }
            // Subscript elements that are not free must be literally shared.
            for x in xs {
                if !occurrence_free(x, bound, filters) && !ys.contains(x) {
                    return false;
                }
            }
            filters.push(xs.clone());
            let ok = collect_variant(a, b, exact_size, bound, filters, map);
            filters.pop();
            ok
        }
        _ => false,
    }
}

/// Finds a map from free variables of `pattern` (each to itself or to a
/// variable accepted by `ok`) whose raw replacement yields `target`.
pub fn match_instance(
    pattern: &Formula,
    target: &Formula,
    ok: impl Fn(&Var, &Var) -> bool,
) -> Option<BTreeMap<Var, Var>> {
    let mut map = BTreeMap::new();
    if !collect_variant(pattern, target, false, &mut Vec::new(), &mut Vec::new(), &mut map) {
        return None;
    }
    if map.iter().any(|(a, b)| a != b && !ok(a, b)) {
        return None;
    }
    let rest: Vec<Var> = pattern
        .free_vars()
        .into_iter()
        .filter(|v| !map.contains_key(v))
        .collect();
    if rest.len() > 4 {
        return None;
    }
    let mut options: Vec<Vec<Var>> = Vec::new();
    for v in &rest {
        let mut cands = vec![v.clone()];
        cands.extend(target.free_vars().into_iter().filter(|w| w != v && ok(v, w)));
        options.push(cands);
    }
    let mut choice = vec![0usize; rest.len()];
    loop {
        let mut cand = map.clone();
        for (i, v) in rest.iter().enumerate() {
            cand.insert(v.clone(), options[i][choice[i]].clone());
        }
        if &pattern.replace_free(&cand) == target {
            return Some(cand);
        }
        let mut k = 0;
        loop {
            if k == rest.len() {
                return None;
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// A basic variable name that occurs nowhere in `avoid`, derived from `hint`.
pub fn fresh_basic(hint: &str, avoid: &VarSet) -> Var {
    let base: String = hint.trim_start_matches('@').to_string();
    let base = if base.is_empty() { "v".to_string() } else { base };
    let candidate = Var::basic(&base);
    if !avoid.contains(&candidate) {
        return candidate;
    }
    (0..)
        .map(|i| Var::basic(&format!("{base}{i}")))
        .find(|v| !avoid.contains(v))
        .expect("unbounded supply of names")
}

/// A witness variable name that occurs nowhere in `avoid`.
pub fn fresh_witness(hint: &str, avoid: &VarSet) -> Var {
    let base = hint.trim_start_matches('@');
    let candidate = Var::witness(base);
    if !avoid.contains(&candidate) {
        return candidate;
    }
    (0..)
        .map(|i| Var::witness(&format!("{base}{i}")))
        .find(|v| !avoid.contains(v))
        .expect("unbounded supply of names")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn free_vars_of_justification_is_subscript() {
        assert_eq!(f("[t]{x} P(x,y)").free_vars(), varset(["x"]));
        assert_eq!(f("P(x,y)").free_vars(), varset(["x", "y"]));
        assert_eq!(f("forall x. P(x,y)").free_vars(), varset(["y"]));
    }

    #[test]
    fn free_for_cases() {
        let x = Var::new("x");
        let y = Var::new("y");
        assert!(free_for(&y, &x, &f("P(x)")));
        assert!(!free_for(&y, &x, &f("forall y. P(x,y)")));
        assert!(!free_for(&y, &x, &f("[t]{x} P(x,y)")));
    }

    #[test]
    fn substitution_touches_subscripts_only_when_free() {
        let x = Var::new("x");
        let y = Var::new("y");
        let z = Var::new("z");
        assert_eq!(f("[t]{x} P(x,y)").substitute(&[(x.clone(), z.clone())]).unwrap(), f("[t]{z} P(z,y)"));
        assert_eq!(f("[t]{x} P(x,y)").substitute(&[(y, z)]).unwrap(), f("[t]{x} P(x,y)"));
        assert_eq!(f("P(x)").substitute(&[(x.clone(), x)]).unwrap(), f("P(x)"));
    }

    #[test]
    fn variants() {
        let m = variable_variant(&f("P(x,y)"), &f("P(u,v)")).unwrap();
        assert_eq!(m[&Var::new("x")], Var::new("u"));
        assert_eq!(m[&Var::new("y")], Var::new("v"));
        assert!(variable_variant(&f("P(x,x)"), &f("P(u,v)")).is_none());
        let m = variable_variant(&f("[c]{@a} P(@a)"), &f("[c]{x} P(x)")).unwrap();
        assert_eq!(m[&Var::new("@a")], Var::new("x"));
    }

    #[test]
    fn variant_of_subscript_only_variables() {
        let m = variable_variant(&f("[c]{x,y} P(x)"), &f("[c]{u,v} P(u)")).unwrap();
        assert_eq!(m[&Var::new("y")], Var::new("v"));
    }

    #[test]
    fn closedness_and_closure() {
        assert!(f("[t]{@a} P(@a)").is_closed_henkin());
        assert!(!f("P(x)").is_closed_henkin());
        assert!(f("forall x. P(x)").is_closed_henkin());
        assert_eq!(f("P(x,y)").universal_closure(), f("forall x. forall y. P(x,y)"));
        assert_eq!(f("P(@a)").universal_closure(), f("P(@a)"));
    }
}

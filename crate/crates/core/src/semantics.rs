//! Finite Fitting models, evidence modes, truth and condition auditing.

use std::cell::RefCell;
use std::rc::Rc;
use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap as HashMap;

use thiserror::Error;

use crate::axioms::{match_axiom, ConstantSpec, Logic};
use crate::syntax::{match_instance, Formula, Term, Var, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Every term is evidence for every formula everywhere.
    Full,
    /// Least evidence relation containing these `(t, formula, world)` triples.
    Closure(Vec<(Term, Formula, usize)>),
    /// Explicit entries; an entry on `A(x)` also covers each `A(d)`.
    Table(Vec<(Term, Formula, BTreeSet<usize>)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingModel {
    pub logic: Logic,
    pub worlds: Vec<String>,
    pub rel: BTreeSet<(usize, usize)>,
    /// Domain members, spelled as witness variables.
    pub domain: Vec<Var>,
    pub interp: BTreeMap<(String, usize), BTreeSet<Vec<Var>>>,
    pub evidence: Evidence,
    pub cs: ConstantSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("`{0}` has free basic variables")]
    NotClosed(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("`{0}` is not a domain member")]
    UnknownWitness(String),
    #[error("evidence universe exceeds {0} formulas")]
    UniverseOverflow(usize),
}

/// Deliberate faults used to check that the soundness harness can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    None,
    /// Evidence is not propagated along the accessibility relation.
    SkipRClosure,
    /// `b(t)` never receives evidence from the instances of `t`.
    SkipBCondition,
    /// `?t` never receives evidence from the absence of `t`.
    SkipQueryCondition,
}

pub const DEFAULT_BUDGET: usize = 20_000;

impl FittingModel {
    pub fn world_index(&self, name: &str) -> Result<usize, SemanticsError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| SemanticsError::UnknownWorld(name.to_string()))
    }

    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.rel.iter().filter(move |(a, _)| *a == w).map(|(_, b)| *b)
    }

    pub fn holds(&self, pred: &str, w: usize, args: &[Var]) -> bool {
        self.interp
            .get(&(pred.to_string(), w))
            .is_some_and(|tuples| tuples.contains(args))
    }

    pub fn domain_set(&self) -> VarSet {
        self.domain.iter().cloned().collect()
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::new(self, Fault::None)
    }

    /// Rejects formulas mentioning witnesses outside the domain.
    pub fn check_witnesses(&self, f: &Formula) -> Result<(), SemanticsError> {
        let dom = self.domain_set();
        match f.witness_vars().into_iter().find(|v| !dom.contains(v)) {
            Some(v) => Err(SemanticsError::UnknownWitness(v.to_string())),
            None => Ok(()),
        }
    }
}

/// Implications a term is evidence for, indexed by consequent.
#[derive(Default)]
struct Implications {
    all: BTreeSet<Formula>,
    by_consequent: HashMap<Formula, Vec<Formula>>,
}

/// Memoizing evaluator over one model.
pub struct Evaluator<'m> {
    model: &'m FittingModel,
    fault: Fault,
    reach: Vec<Vec<bool>>,
    budget: usize,
    ev_cache: RefCell<HashMap<(Term, Formula, usize), bool>>,
    imp_cache: RefCell<HashMap<(Term, usize), Rc<Implications>>>,
    /// Explicit entries by constant, ground entries split off for exact lookup.
    cs_ground: HashMap<String, BTreeSet<Formula>>,
    cs_open: HashMap<String, Vec<Formula>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m FittingModel, fault: Fault) -> Self {
        let n = model.worlds.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        if fault != Fault::SkipRClosure {
            for &(a, b) in &model.rel {
                reach[a][b] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    if reach[i][k] {
                        for j in 0..n {
                            if reach[k][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
            }
        }
        let mut cs_ground: HashMap<String, BTreeSet<Formula>> = HashMap::default();
        let mut cs_open: HashMap<String, Vec<Formula>> = HashMap::default();
        if let ConstantSpec::Explicit(entries) = &model.cs {
            for (c, g) in entries {
                if g.free_vars().iter().any(Var::is_basic) {
                    cs_open.entry(c.clone()).or_default().push(g.clone());
                } else {
                    cs_ground.entry(c.clone()).or_default().insert(g.clone());
                }
            }
        }
        Evaluator {
            model,
            fault,
            reach,
            budget: DEFAULT_BUDGET,
            ev_cache: RefCell::new(HashMap::default()),
            imp_cache: RefCell::new(HashMap::default()),
            cs_ground,
            cs_open,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn model(&self) -> &FittingModel {
        self.model
    }

    fn is_d_instance(&self, pattern: &Formula, target: &Formula) -> bool {
        let dom = self.model.domain_set();
        pattern == target || match_instance(pattern, target, |from, to| from.is_basic() && dom.contains(to)).is_some()
    }

    /// All partial instantiations of the free basic variables by domain members.
    fn d_instances(&self, f: &Formula) -> Vec<Formula> {
        let vars: Vec<Var> = f.free_vars().into_iter().filter(Var::is_basic).collect();
        let mut out = Vec::new();
        let options = self.model.domain.len() + 1;
        let total = options.pow(vars.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut map = BTreeMap::new();
            for v in &vars {
                let pick = c % options;
                c /= options;
                if pick > 0 {
                    map.insert(v.clone(), self.model.domain[pick - 1].clone());
                }
            }
            out.push(f.replace_free(&map));
        }
        out
    }

    fn cs_covers(&self, c: &str, f: &Formula) -> bool {
        match &self.model.cs {
            ConstantSpec::Explicit(_) => {
                self.cs_ground.get(c).is_some_and(|set| set.contains(f))
                    || self
                        .cs_open
                        .get(c)
                        .is_some_and(|gs| gs.iter().any(|g| self.is_d_instance(g, f)))
            }
            ConstantSpec::Schematic(_) => {
                let schemas = self.model.cs.schemas_of(c);
                if schemas.is_empty() {
                    return false;
                }
                // Witnesses are generalized per name; instances identifying two
                // variables of a schema instance are not recognized here.
                let mut candidates = vec![f.clone()];
                let ws: Vec<Var> = f.witness_vars().into_iter().collect();
                if !ws.is_empty() {
                    let avoid = f.all_vars();
                    let mut map = BTreeMap::new();
                    let mut taken = avoid.clone();
                    for w in &ws {
                        let fresh = crate::syntax::fresh_basic(&format!("v{}", w.name().trim_start_matches('@')), &taken);
                        taken.insert(fresh.clone());
                        map.insert(w.clone(), fresh);
                    }
                    candidates.push(rename_witnesses(f, &map));
                }
                candidates
                    .iter()
                    .any(|g| schemas.iter().any(|s| match_axiom(*s, g, self.model.logic).is_some()))
            }
        }
    }

    fn base_covers(&self, t: &Term, f: &Formula, w: usize) -> bool {
        let entries_ok = |pat: &Formula| self.is_d_instance(pat, f);
        match &self.model.evidence {
            Evidence::Full => true,
            Evidence::Closure(base) => base
                .iter()
                .any(|(s, g, w0)| s == t && self.reach[*w0][w] && entries_ok(g)),
            Evidence::Table(entries) => entries
                .iter()
                .any(|(s, g, ws)| s == t && ws.contains(&w) && entries_ok(g)),
        }
    }

    /// Whether `w` is in the evidence set of `t` for the D-formula `f`.
    pub fn evidence(&self, t: &Term, f: &Formula, w: usize) -> Result<bool, SemanticsError> {
        match &self.model.evidence {
            Evidence::Full => Ok(true),
            Evidence::Table(_) => Ok(self.base_covers(t, f, w)),
            Evidence::Closure(_) => {
                let key = (t.clone(), f.clone(), w);
                if let Some(v) = self.ev_cache.borrow().get(&key) {
                    return Ok(*v);
                }
                let v = self.closure_evidence(t, f, w)?;
                self.ev_cache.borrow_mut().insert(key, v);
                Ok(v)
            }
        }
    }

    fn subscript_ok(&self, xs: &VarSet, body: &Formula) -> bool {
        let dom = self.model.domain_set();
        xs.iter().all(|x| dom.contains(x)) && body.witness_vars().is_subset(xs)
    }

    fn closure_evidence(&self, t: &Term, f: &Formula, w: usize) -> Result<bool, SemanticsError> {
        if self.base_covers(t, f, w) {
            return Ok(true);
        }
        if let Term::Const(c) = t {
            if self.cs_covers(c, f) {
                return Ok(true);
            }
        }
        match t {
            Term::Var(_) | Term::Const(_) => Ok(false),
            Term::App(s, u) => {
                let imps = self.implications(s, w)?;
                for a in imps.by_consequent.get(f).into_iter().flatten() {
                    if self.evidence(u, a, w)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::Sum(s, u) => Ok(self.evidence(s, f, w)? || self.evidence(u, f, w)?),
            Term::Bang(s) => match f {
                Formula::Just(s2, xs, body) if **s2 == **s && self.subscript_ok(xs, body) => self.evidence(s, body, w),
                _ => Ok(false),
            },
            Term::Gen(x, s) => match f {
                Formula::Forall(y, body) if y == x => self.evidence(s, body, w),
                _ => Ok(false),
            },
            Term::Bar(s) => {
                if self.fault == Fault::SkipBCondition {
                    return Ok(false);
                }
                match f {
                    Formula::Forall(y, body) => {
                        for a in &self.model.domain {
                            let inst = body.replace_free(&BTreeMap::from([(y.clone(), a.clone())]));
                            if !self.evidence(s, &inst, w)? {
                                return Ok(false);
                            }
                        }
                        Ok(true)
                    }
                    _ => Ok(false),
                }
            }
            Term::Query(s) => {
                if self.fault == Fault::SkipQueryCondition {
                    return Ok(false);
                }
                match f {
                    Formula::Not(inner) => match &**inner {
                        Formula::Just(s2, xs, body) if **s2 == **s && self.subscript_ok(xs, body) => {
                            for v in 0..self.model.worlds.len() {
                                if self.reach[v][w] && !self.evidence(s, body, v)? {
                                    return Ok(true);
                                }
                            }
                            Ok(false)
                        }
                        _ => Ok(false),
                    },
                    _ => Ok(false),
                }
            }
        }
    }

    /// Implication-shaped formulas `t` is evidence for at `w`, closed under
    /// domain instantiation.
    fn implications(&self, t: &Term, w: usize) -> Result<Rc<Implications>, SemanticsError> {
        let key = (t.clone(), w);
        if let Some(v) = self.imp_cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let mut out: BTreeSet<Formula> = BTreeSet::new();
        let add_instances = |f: &Formula, out: &mut BTreeSet<Formula>| -> Result<(), SemanticsError> {
            if matches!(f, Formula::Implies(..)) {
                out.extend(self.d_instances(f));
            }
            if out.len() > self.budget {
                return Err(SemanticsError::UniverseOverflow(self.budget));
            }
            Ok(())
        };
        if let Evidence::Closure(base) = &self.model.evidence {
            for (s, g, w0) in base {
                if s == t && self.reach[*w0][w] {
                    add_instances(g, &mut out)?;
                }
            }
        }
        if let Term::Const(c) = t {
            match &self.model.cs {
                ConstantSpec::Explicit(entries) => {
                    for (d, g) in entries {
                        if d.as_str() == &**c {
                            add_instances(g, &mut out)?;
                        }
                    }
                }
                ConstantSpec::Schematic(_) => {
                    if !self.model.cs.schemas_of(c).is_empty() {
                        return Err(SemanticsError::UniverseOverflow(self.budget));
                    }
                }
            }
        }
        match t {
            Term::App(s, u) => {
                for imp in self.implications(s, w)?.all.iter() {
                    if let Formula::Implies(a, b) = imp {
                        if matches!(**b, Formula::Implies(..)) && self.evidence(u, a, w)? {
                            out.insert((**b).clone());
                        }
                    }
                }
            }
            Term::Sum(s, u) => {
                out.extend(self.implications(s, w)?.all.iter().cloned());
                out.extend(self.implications(u, w)?.all.iter().cloned());
            }
            _ => {}
        }
        if out.len() > self.budget {
            return Err(SemanticsError::UniverseOverflow(self.budget));
        }
        let mut by_consequent: HashMap<Formula, Vec<Formula>> = HashMap::default();
        for imp in &out {
            if let Formula::Implies(a, b) = imp {
                by_consequent.entry((**b).clone()).or_default().push((**a).clone());
            }
        }
        let v = Rc::new(Implications { all: out, by_consequent });
        self.imp_cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// Truth of a closed D-formula at `w`.
    pub fn eval(&self, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
        if f.free_vars().iter().any(Var::is_basic) {
            return Err(SemanticsError::NotClosed(f.to_string()));
        }
        self.model.check_witnesses(f)?;
        self.truth(w, f)
    }

    fn truth(&self, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Atom(p, args) => self.model.holds(p, w, args),
            Formula::Bottom => false,
            Formula::Not(a) => !self.truth(w, a)?,
            Formula::And(a, b) => self.truth(w, a)? && self.truth(w, b)?,
            Formula::Or(a, b) => self.truth(w, a)? || self.truth(w, b)?,
            Formula::Implies(a, b) => !self.truth(w, a)? || self.truth(w, b)?,
            Formula::Iff(a, b) => self.truth(w, a)? == self.truth(w, b)?,
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let universal = matches!(f, Formula::Forall(..));
                for d in &self.model.domain {
                    let inst = a.replace_free(&BTreeMap::from([(x.clone(), d.clone())]));
                    let v = self.truth(w, &inst)?;
                    if v != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
            Formula::Just(t, _, body) => {
                if !self.evidence(t, body, w)? {
                    return Ok(false);
                }
                let succs: Vec<usize> = self.model.successors(w).collect();
                for inst in self.d_instances(body) {
                    if inst.free_vars().iter().any(Var::is_basic) {
                        continue;
                    }
                    for &v in &succs {
                        if !self.truth(v, &inst)? {
                            return Ok(false);
                        }
                    }
                }
                true
            }
        })
    }

    /// Truth of the universal closure at every world.
    pub fn valid(&self, f: &Formula) -> Result<bool, SemanticsError> {
        let closed = f.universal_closure();
        self.model.check_witnesses(&closed)?;
        for w in 0..self.model.worlds.len() {
            if !self.truth(w, &closed)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn rename_witnesses(f: &Formula, map: &BTreeMap<Var, Var>) -> Formula {
    // Witnesses are never bound, so a raw replacement of free positions
    // reaches every occurrence except those hidden under a subscript filter.
    fn go(f: &Formula, map: &BTreeMap<Var, Var>) -> Formula {
        let r = |v: &Var| map.get(v).unwrap_or(v).clone();
        match f {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(r).collect()),
            Formula::Bottom => Formula::Bottom,
            Formula::Not(a) => Formula::not(go(a, map)),
            Formula::And(a, b) => Formula::and(go(a, map), go(b, map)),
            Formula::Or(a, b) => Formula::or(go(a, map), go(b, map)),
            Formula::Implies(a, b) => Formula::implies(go(a, map), go(b, map)),
            Formula::Iff(a, b) => Formula::iff(go(a, map), go(b, map)),
            Formula::Forall(x, a) => Formula::forall(x.clone(), go(a, map)),
            Formula::Exists(x, a) => Formula::exists(x.clone(), go(a, map)),
            Formula::Just(t, xs, a) => Formula::just((**t).clone(), xs.iter().map(r).collect(), go(a, map)),
        }
    }
    go(f, map)
}

pub fn evidence(m: &FittingModel, t: &Term, f: &Formula, w: usize) -> Result<bool, SemanticsError> {
    m.evaluator().evidence(t, f, w)
}

pub fn eval(m: &FittingModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    if w >= m.worlds.len() {
        return Err(SemanticsError::UnknownWorld(w.to_string()));
    }
    m.evaluator().eval(w, f)
}

pub fn valid(m: &FittingModel, f: &Formula) -> Result<bool, SemanticsError> {
    m.evaluator().valid(f)
}

// ---------------------------------------------------------------- audit

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub instance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn flag(&mut self, condition: &'static str, instance: String) {
        self.violations.push(Violation { condition, instance });
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AuditOptions {
    pub exempt_strong_evidence: bool,
}

pub fn audit(m: &FittingModel) -> AuditReport {
    audit_with(m, AuditOptions::default())
}

fn subsets_containing(base: &VarSet, domain: &[Var]) -> Vec<VarSet> {
    let extra: Vec<&Var> = domain.iter().filter(|d| !base.contains(*d)).collect();
    (0..(1usize << extra.len()))
        .map(|mask| {
            let mut s = base.clone();
            for (i, d) in extra.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.insert((*d).clone());
                }
            }
            s
        })
        .collect()
}

fn check_frame(m: &FittingModel, report: &mut AuditReport) {
    let n = m.worlds.len();
    for w in 0..n {
        if !m.rel.contains(&(w, w)) {
            report.flag("R reflexive", m.worlds[w].clone());
        }
    }
    for &(a, b) in &m.rel {
        for &(b2, c) in &m.rel {
            if b == b2 && !m.rel.contains(&(a, c)) {
                report.flag("R transitive", format!("{} {} {}", m.worlds[a], m.worlds[b], m.worlds[c]));
            }
        }
        if m.logic == Logic::Fojt45 && !m.rel.contains(&(b, a)) {
            report.flag("R symmetric", format!("{} {}", m.worlds[a], m.worlds[b]));
        }
    }
}

/// Checks the frame class and the evidence conditions over the finite entry
/// universe. Table conditions are checked for conclusion terms that occur in
/// the table; closure models are sampled on their base and CS entries.
pub fn audit_with(m: &FittingModel, opts: AuditOptions) -> AuditReport {
    let mut report = AuditReport::default();
    check_frame(m, &mut report);
    let ev = m.evaluator();
    let all_worlds: BTreeSet<usize> = (0..m.worlds.len()).collect();
    let strong = m.logic == Logic::Fojt45 && !opts.exempt_strong_evidence;
    let strong_check = |t: &Term, f: &Formula, w: usize, report: &mut AuditReport| {
        let xs = f.witness_vars();
        let claim = Formula::just(t.clone(), xs, f.clone());
        if !matches!(ev.eval(w, &claim), Ok(true)) {
            report.flag("strong evidence", format!("{claim} @ {}", m.worlds[w]));
        }
    };
    match &m.evidence {
        Evidence::Full => {
            report.notes.push("full evidence meets every closure condition".into());
            if strong {
                let probe = Term::var("p0");
                for w in 0..m.worlds.len() {
                    strong_check(&probe, &Formula::Bottom, w, &mut report);
                }
            }
        }
        Evidence::Closure(base) => {
            report.notes.push("closure evidence meets the closure conditions by construction; strong evidence sampled".into());
            if strong {
                for (t, f, w) in base {
                    for inst in ev.d_instances(f) {
                        strong_check(t, &inst, *w, &mut report);
                    }
                }
                if let ConstantSpec::Explicit(entries) = &m.cs {
                    for (c, f) in entries {
                        for w in 0..m.worlds.len() {
                            strong_check(&Term::constant(c), f, w, &mut report);
                        }
                    }
                }
            }
        }
        Evidence::Table(entries) => {
            report.notes.push("table conditions checked for conclusion terms present in the table".into());
            audit_table(m, &ev, entries, &all_worlds, &mut report);
            if strong {
                for (t, f, ws) in entries {
                    for &w in ws {
                        strong_check(t, f, w, &mut report);
                    }
                }
            }
        }
    }
    report
}

fn audit_table(
    m: &FittingModel,
    ev: &Evaluator<'_>,
    entries: &[(Term, Formula, BTreeSet<usize>)],
    all_worlds: &BTreeSet<usize>,
    report: &mut AuditReport,
) {
    let terms: BTreeSet<String> = entries.iter().map(|(t, _, _)| t.to_string()).collect();
    let present = |t: &Term| terms.contains(&t.to_string());
    let covered = |t: &Term, f: &Formula| -> BTreeSet<usize> {
        all_worlds
            .iter()
            .copied()
            .filter(|w| ev.evidence(t, f, *w).unwrap_or(false))
            .collect()
    };
    let require = |cond: &'static str, t: &Term, f: &Formula, need: &BTreeSet<usize>, report: &mut AuditReport| {
        let have = covered(t, f);
        if let Some(w) = need.difference(&have).next() {
            report.flag(cond, format!("{t} | {f} | {}", m.worlds[*w]));
        }
    };
    let show = |t: &Term, f: &Formula| format!("{t} | {f}");
    for (t, f, ws) in entries {
        // R closure.
        let mut need = BTreeSet::new();
        for &w in ws {
            need.extend(m.successors(w));
        }
        require("R closure", t, f, &need, report);
        // Instantiation.
        for inst in ev.d_instances(f) {
            require("instantiation", t, &inst, ws, report);
        }
        // + condition.
        for (u, _, _) in entries {
            for sum in [Term::sum(t.clone(), u.clone()), Term::sum(u.clone(), t.clone())] {
                if present(&sum) {
                    require("+ condition", &sum, f, ws, report);
                }
            }
        }
        // ! condition.
        let bang = Term::bang(t.clone());
        if present(&bang) {
            for xs in subsets_containing(&f.witness_vars(), &m.domain) {
                require("! condition", &bang, &Formula::just(t.clone(), xs, f.clone()), ws, report);
            }
        }
        // gen condition.
        for (u, _, _) in entries {
            if let Term::Gen(x, inner) = u {
                if **inner == *t {
                    require("gen condition", u, &Formula::forall(x.clone(), f.clone()), ws, report);
                }
            }
        }
        // . condition.
        if let Formula::Implies(a, b) = f {
            for (s, g, ws2) in entries {
                let app = Term::app(t.clone(), s.clone());
                if g == &**a && present(&app) {
                    let need: BTreeSet<usize> = ws.intersection(ws2).copied().collect();
                    require(". condition", &app, b, &need, report);
                }
            }
        }
        // b condition.
        if m.logic == Logic::Folpb {
            let bar = Term::bar(t.clone());
            if present(&bar) {
                for y in f.free_vars().into_iter().filter(Var::is_basic) {
                    let all = Formula::forall(y.clone(), f.clone());
                    let need: BTreeSet<usize> = all_worlds
                        .iter()
                        .copied()
                        .filter(|w| {
                            m.domain.iter().all(|a| {
                                let inst = f.replace_free(&BTreeMap::from([(y.clone(), a.clone())]));
                                ev.evidence(t, &inst, *w).unwrap_or(false)
                            })
                        })
                        .collect();
                    require("b condition", &bar, &all, &need, report);
                }
            }
        }
        // ? condition.
        if m.logic == Logic::Fojt45 {
            let q = Term::query(t.clone());
            if present(&q) {
                let xs = f.witness_vars();
                let need: BTreeSet<usize> = all_worlds.difference(&covered(t, f)).copied().collect();
                require("? condition", &q, &Formula::not(Formula::just(t.clone(), xs, f.clone())), &need, report);
            }
        }
        // CS condition over the table universe.
        let mut consts = BTreeSet::new();
        for (u, _, _) in entries {
            u.constants(&mut consts);
        }
        for c in &consts {
            if ev.cs_covers(c, f) {
                require("CS condition", &Term::constant(c), f, all_worlds, report);
            }
        }
        let _ = show;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_formula, parse_model, parse_term};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn closure_application_and_instantiation() {
        let m = parse_model(
            "LOGIC FOLPb\nWORLDS\nw\nREL\nw w\nDOMAIN\n@a\nINTERP\nEVIDENCE mode=closure\np1 | (P -> Q) | w\np2 | P | w\np3 | P(x) | w\nCS explicit\n",
        )
        .unwrap();
        assert!(evidence(&m, &t("(p1 . p2)"), &f("Q"), 0).unwrap());
        assert!(!evidence(&m, &t("(p2 . p1)"), &f("Q"), 0).unwrap());
        assert!(evidence(&m, &t("p3"), &f("P(@a)"), 0).unwrap());
        assert!(evidence(&m, &t("!p3"), &f("[p3]{@a} P(@a)"), 0).unwrap());
    }

    #[test]
    fn truth_examples() {
        let m = parse_model("LOGIC FOLPb\nWORLDS\nw\nREL\nw w\nDOMAIN\n@a @b\nINTERP\nP @ w : (@a)\nP @ w : (@b)\nEVIDENCE mode=full\n").unwrap();
        assert!(!eval(&m, 0, &Formula::Bottom).unwrap());
        assert!(eval(&m, 0, &f("[t]{} forall x. P(x)")).unwrap());
        let m2 = parse_model("LOGIC FOLPb\nWORLDS\nw v\nREL\nw w\nv v\nw v\nDOMAIN\n@d\nINTERP\nP @ w : (@d)\nEVIDENCE mode=full\n").unwrap();
        assert!(!eval(&m2, 0, &f("[t]{} P(@d)")).unwrap());
        assert!(valid(&m2, &f("P(x) -> P(x)")).unwrap());
        assert!(!valid(&m2, &f("P(x)")).unwrap());
        assert!(eval(&m2, 0, &f("P(x)")).is_err());
    }

    #[test]
    fn audit_examples() {
        let full = parse_model("LOGIC FOLPb\nWORLDS\nw\nREL\nw w\nDOMAIN\n@a\nEVIDENCE mode=full\n").unwrap();
        assert!(audit(&full).passed());
        let table = parse_model("LOGIC FOLPb\nWORLDS\nw v\nREL\nw w\nv v\nw v\nDOMAIN\n@a\nEVIDENCE mode=table\np1 | P(@a) | w\n").unwrap();
        let report = audit(&table);
        assert!(report.violations.iter().any(|v| v.condition == "R closure"));
        let strong = parse_model("LOGIC FOJT45\nWORLDS\nw\nREL\nw w\nDOMAIN\n@a\nINTERP\nEVIDENCE mode=table\np1 | P(@a) | w\n").unwrap();
        assert!(audit(&strong).violations.iter().any(|v| v.condition == "strong evidence"));
        let missing_refl = parse_model("LOGIC FOLPb\nWORLDS\nw v\nREL\nw w\nDOMAIN\n@a\nEVIDENCE mode=full\n").unwrap();
        assert!(audit(&missing_refl).violations.iter().any(|v| v.condition == "R reflexive"));
    }

    #[test]
    fn query_condition() {
        let m = parse_model("LOGIC FOJT45\nWORLDS\nw\nREL\nw w\nDOMAIN\n@a\nINTERP\nEVIDENCE mode=closure\nCS explicit\n").unwrap();
        assert!(evidence(&m, &t("?p1"), &f("~[p1]{} P"), 0).unwrap());
        assert!(evidence(&m, &t("?p1"), &f("~[p1]{@a} P(@a)"), 0).unwrap());
        assert!(!evidence(&m, &t("?p1"), &f("~[p1]{} P(@a)"), 0).unwrap());
    }
}

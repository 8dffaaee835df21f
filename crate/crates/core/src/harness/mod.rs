//! Random generators and property drivers: soundness fuzzing, reference
//! oracles and the mutation suite.

mod mutate;
mod oracle;
mod reference;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::axioms::{match_axiom, ConstantSpec, Logic, SchemaId};
use crate::kernel::{check, Derivation, Rule};
use crate::semantics::{audit, Evaluator, Evidence, Fault, FittingModel};
use crate::syntax::{free_for, fresh_basic, Formula, Term, Var, VarSet};
use crate::templates::{self, Template, TemplateError};
use crate::textio::{print_formula, print_model};
use crate::transform::{self, Builder};

pub use mutate::{mutants, Mutant};
pub use oracle::{brute_member, term_universe, MEMBER_BUDGET};
pub use reference::{reference_eval, reference_evidence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("enumeration exceeded {0} members")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub logic: Logic,
    pub max_worlds: usize,
    pub max_domain: usize,
    pub term_depth: usize,
    pub formula_depth: usize,
    pub trials: usize,
    pub fault: Fault,
}

impl GenConfig {
    pub fn new(logic: Logic, seed: u64) -> Self {
        GenConfig {
            seed,
            logic,
            max_worlds: 4,
            max_domain: 3,
            term_depth: 2,
            formula_depth: 4,
            trials: 500,
            fault: Fault::None,
        }
    }
}

const BASICS: [&str; 3] = ["x", "y", "z"];
const PREDICATES: [(&str, usize); 4] = [("P", 1), ("Q", 1), ("R", 2), ("S", 0)];

/// Seeded source of terms, formulas, axiom instances, derivations and models.
pub struct Generator {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Generator { cfg, rng }
    }

    /// Independent stream for one trial, so trials can be replayed alone.
    pub fn for_trial(cfg: &GenConfig, trial: usize) -> Self {
        let seed = cfg.seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        Generator {
            cfg: cfg.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn witnesses(&self) -> Vec<Var> {
        (0..self.cfg.max_domain.max(1)).map(|i| Var::witness(&format!("d{i}"))).collect()
    }

    pub fn basic(&mut self) -> Var {
        Var::basic(BASICS.choose(&mut self.rng).expect("non-empty"))
    }

    pub fn witness(&mut self) -> Var {
        let ws = self.witnesses();
        ws.choose(&mut self.rng).expect("non-empty").clone()
    }

    fn individual(&mut self) -> Var {
        if self.rng.gen_bool(0.7) {
            self.basic()
        } else {
            self.witness()
        }
    }

    pub fn term(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return match self.rng.gen_range(0..5) {
                0 | 1 => Term::var("p0"),
                2 | 3 => Term::var("p1"),
                _ => Term::constant("c0"),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 | 1 => Term::app(self.term(d), self.term(d)),
            2 => Term::sum(self.term(d), self.term(d)),
            3 => Term::bang(self.term(d)),
            4 => Term::gen(self.basic(), self.term(d)),
            _ => match self.cfg.logic {
                Logic::Folpb => Term::bar(self.term(d)),
                Logic::Fojt45 => Term::query(self.term(d)),
            },
        }
    }

    pub fn atom(&mut self) -> Formula {
        let (p, arity) = *PREDICATES.choose(&mut self.rng).expect("non-empty");
        let args: Vec<Var> = (0..arity).map(|_| self.individual()).collect();
        Formula::Atom(p.into(), args)
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return if self.rng.gen_bool(0.05) { Formula::Bottom } else { self.atom() };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 | 4 => Formula::implies(self.formula(d), self.formula(d)),
            5 => Formula::iff(self.formula(d), self.formula(d)),
            6 => Formula::forall(self.basic(), self.formula(d)),
            7 => Formula::exists(self.basic(), self.formula(d)),
            _ => self.just(d),
        }
    }

    /// `[t]{X} A` with `X` covering the witnesses of `A`.
    pub fn just(&mut self, depth: usize) -> Formula {
        let body = self.formula(depth);
        let t = self.term(self.cfg.term_depth);
        let xs = self.subscript(&body);
        Formula::just(t, xs, body)
    }

    /// Witnesses of `body`, some of its free basic variables and rarely an
    /// unrelated one.
    pub fn subscript(&mut self, body: &Formula) -> VarSet {
        let mut xs = body.witness_vars();
        for v in body.free_vars().into_iter().filter(Var::is_basic) {
            if self.rng.gen_bool(0.6) {
                xs.insert(v);
            }
        }
        if self.rng.gen_bool(0.15) {
            xs.insert(self.individual());
        }
        xs
    }

    fn component(&mut self) -> Formula {
        if self.rng.gen_bool(0.3) {
            return self.atom();
        }
        let depth = self.cfg.formula_depth.saturating_sub(2);
        self.formula(depth)
    }

    /// A random instance of `schema`, checked with the axiom matcher.
    pub fn axiom_instance(&mut self, schema: SchemaId) -> Formula {
        assert!(schema.admitted_in(self.cfg.logic), "{schema} is not a schema of {}", self.cfg.logic);
        for _ in 0..10_000 {
            if let Some(f) = self.try_axiom(schema) {
                if match_axiom(schema, &f, self.cfg.logic).is_some() {
                    return f;
                }
            }
        }
        panic!("no instance of {schema} found");
    }

    fn try_axiom(&mut self, schema: SchemaId) -> Option<Formula> {
        use SchemaId as S;
        let imp = Formula::implies;
        let a = self.component();
        let b = self.component();
        let c = self.component();
        let f = match schema {
            S::K => imp(a.clone(), imp(b, a)),
            S::S => imp(
                imp(a.clone(), imp(b.clone(), c.clone())),
                imp(imp(a.clone(), b), imp(a, c)),
            ),
            S::Neg => imp(imp(Formula::not(a.clone()), Formula::not(b.clone())), imp(b, a)),
            S::And1 => imp(Formula::and(a.clone(), b), a),
            S::And2 => imp(Formula::and(a, b.clone()), b),
            S::And3 => imp(a.clone(), imp(b.clone(), Formula::and(a, b))),
            S::Or1 => imp(a.clone(), Formula::or(a, b)),
            S::Or2 => imp(b.clone(), Formula::or(a, b)),
            S::Or3 => imp(
                imp(a.clone(), c.clone()),
                imp(imp(b.clone(), c.clone()), imp(Formula::or(a, b), c)),
            ),
            S::Iff1 => imp(Formula::iff(a.clone(), b.clone()), imp(a, b)),
            S::Iff2 => imp(Formula::iff(a.clone(), b.clone()), imp(b, a)),
            S::Iff3 => imp(
                imp(a.clone(), b.clone()),
                imp(imp(b.clone(), a.clone()), Formula::iff(a, b)),
            ),
            S::Bot => imp(Formula::Bottom, a),
            S::Ui | S::Ei => {
                let x = self.basic();
                let e = self.individual();
                if !free_for(&e, &x, &a) {
                    return None;
                }
                let inst = a.substitute(&[(x.clone(), e)]).ok()?;
                if schema == S::Ui {
                    imp(Formula::forall(x, a), inst)
                } else {
                    imp(inst, Formula::exists(x, a))
                }
            }
            S::Ud => {
                let x = self.basic();
                if a.free_vars().contains(&x) {
                    return None;
                }
                imp(
                    Formula::forall(x.clone(), imp(a.clone(), b.clone())),
                    imp(a, Formula::forall(x, b)),
                )
            }
            S::Ed => {
                let x = self.basic();
                if b.free_vars().contains(&x) {
                    return None;
                }
                imp(
                    Formula::forall(x.clone(), imp(a.clone(), b.clone())),
                    imp(Formula::exists(x, a), b),
                )
            }
            S::A2 | S::A3 => {
                let t = self.term(self.cfg.term_depth);
                let small = self.subscript(&a);
                let y = self.individual();
                if small.contains(&y) || (schema == S::A2 && a.free_vars().contains(&y)) {
                    return None;
                }
                let mut big = small.clone();
                big.insert(y);
                let (l, r) = if schema == S::A2 { (big, small) } else { (small, big) };
                imp(Formula::just(t.clone(), l, a.clone()), Formula::just(t, r, a))
            }
            S::B1 => {
                let t = self.term(self.cfg.term_depth);
                let xs = self.subscript(&a);
                imp(Formula::just(t, xs, a.clone()), a)
            }
            S::B2 => {
                let t = self.term(self.cfg.term_depth);
                let s = self.term(self.cfg.term_depth);
                let ab = imp(a.clone(), b.clone());
                let xs = self.subscript(&ab);
                imp(
                    Formula::just(t.clone(), xs.clone(), ab),
                    imp(Formula::just(s.clone(), xs.clone(), a), Formula::just(Term::app(t, s), xs, b)),
                )
            }
            S::B3L | S::B3R => {
                let t = self.term(self.cfg.term_depth);
                let s = self.term(self.cfg.term_depth);
                let xs = self.subscript(&a);
                let picked = if schema == S::B3L { t.clone() } else { s.clone() };
                imp(Formula::just(picked, xs.clone(), a.clone()), Formula::just(Term::sum(t, s), xs, a))
            }
            S::B4 => {
                let t = self.term(self.cfg.term_depth);
                let xs = self.subscript(&a);
                let inner = Formula::just(t.clone(), xs.clone(), a);
                imp(inner.clone(), Formula::just(Term::bang(t), xs, inner))
            }
            S::B5 => {
                let t = self.term(self.cfg.term_depth);
                let xs = self.subscript(&a);
                let x = self.basic();
                if xs.contains(&x) {
                    return None;
                }
                imp(
                    Formula::just(t.clone(), xs.clone(), a.clone()),
                    Formula::just(Term::gen(x.clone(), t), xs, Formula::forall(x, a)),
                )
            }
            S::Bb => {
                let t = self.term(self.cfg.term_depth);
                let y = self.basic();
                let a = if self.rng.gen_bool(0.5) {
                    Formula::Atom(if self.rng.gen_bool(0.5) { "P" } else { "Q" }.into(), vec![y.clone()])
                } else {
                    a
                };
                if !a.free_vars().contains(&y) && self.rng.gen_bool(0.8) {
                    return None;
                }
                let mut xs = self.subscript(&a);
                xs.remove(&y);
                let mut xy = xs.clone();
                xy.insert(y.clone());
                imp(
                    Formula::forall(y.clone(), Formula::just(t.clone(), xy, a.clone())),
                    Formula::just(Term::bar(t), xs, Formula::forall(y, a)),
                )
            }
            S::B6 => {
                let t = self.term(self.cfg.term_depth);
                let xs = self.subscript(&a);
                let neg = Formula::not(Formula::just(t.clone(), xs.clone(), a));
                imp(neg.clone(), Formula::just(Term::query(t), xs, neg))
            }
        };
        Some(f)
    }

    /// A kernel-accepted hypothesis-free derivation built by one of the
    /// transformers. Returns the source name with it.
    pub fn derivation(&mut self, kind: usize) -> Option<(&'static str, Derivation)> {
        let logic = self.cfg.logic;
        // The explicit Barcan derivation has hundreds of steps; one source
        // in twenty-four uses it.
        let slot = if kind % 24 == 5 { 5 } else { kind % 5 };
        let built = match slot {
            0 | 1 => {
                let t = self.term(1);
                let y = self.basic();
                let phi = self.formula(2);
                let mut xs = self.subscript(&phi);
                xs.remove(&y);
                if slot == 0 {
                    ("converse_barcan", transform::converse_barcan(logic, &t, &xs, &y, &phi).ok()?.derivation)
                } else {
                    ("converse_buridan", transform::converse_buridan(logic, &t, &xs, &y, &phi).ok()?.derivation)
                }
            }
            2 => ("internalize", transform::internalize(&self.small_theorem()).ok()?.derivation),
            3 => {
                let a = self.formula(2);
                let b = self.formula(2);
                let ab = Formula::implies(a.clone(), b);
                let mut bld = Builder::with_hypotheses(logic, ConstantSpec::schematic(), vec![a, ab]);
                let h1 = bld.hyp(1);
                let h2 = bld.hyp(2);
                let m = bld.mp(h1, h2).ok()?;
                let d = bld.finish(m);
                let d = transform::deduction(&d, 2).ok()?;
                ("deduction", transform::deduction(&d, 1).ok()?)
            }
            4 => {
                let (template, phis) = self.disjunctive_instance(1);
                let k = self.rng.gen_range(1..=3);
                let psis: Vec<Formula> = (0..k).map(|_| self.member_of(&template, &phis)).collect();
                ("combine", templates::combine(logic, &template, &phis, &psis).ok()?.derivation)
            }
            _ => match logic {
                Logic::Fojt45 => {
                    let t = self.term(1);
                    let y = self.basic();
                    let phi = self.atom();
                    let mut xs = self.subscript(&phi);
                    xs.remove(&y);
                    ("jt45_barcan", transform::jt45_barcan(&t, &xs, &y, &phi).ok()?.derivation)
                }
                Logic::Folpb => {
                    let t = self.term(1);
                    let y = self.basic();
                    let phi = self.formula(1);
                    let member = Formula::just(t, templates::wit(&phi), phi.clone());
                    let template = Template::boxed(Template::letter(0));
                    let out = templates::generalized_barcan(logic, &template, &y, &phi, &[], &member).ok()?;
                    ("generalized_barcan", out.derivation)
                }
            },
        };
        debug_assert!(check(&built.1).accepted());
        Some(built)
    }

    /// A short theorem: an axiom, weakened by K and sometimes generalized.
    pub fn small_theorem(&mut self) -> Derivation {
        let schemas: Vec<SchemaId> = SchemaId::for_logic(self.cfg.logic).collect();
        let schema = *schemas.choose(&mut self.rng).expect("non-empty");
        let a = self.axiom_instance(schema);
        let mut b = Builder::new(self.cfg.logic, ConstantSpec::schematic());
        let s1 = b.ax(schema, a.clone()).expect("generated instance");
        if self.rng.gen_bool(0.3) {
            return b.finish(s1);
        }
        let extra = self.formula(1);
        let k = b
            .ax(SchemaId::K, Formula::implies(a.clone(), Formula::implies(extra, a)))
            .expect("K instance");
        let last = b.mp(s1, k).expect("modus ponens");
        if self.rng.gen_bool(0.5) {
            let x = self.basic();
            let g = b.gen(last, &x);
            return b.finish(g);
        }
        b.finish(last)
    }

    /// A derivation under hypotheses `p_i:{X_i} A_i` on distinct variables.
    pub fn hypothesis_derivation(&mut self) -> Derivation {
        let k = self.rng.gen_range(1..=3);
        let mut hyps = Vec::new();
        for i in 0..k {
            let body = self.formula(2);
            let xs = self.subscript(&body);
            hyps.push(Formula::just(Term::var(&format!("h{i}")), xs, body));
        }
        let mut b = Builder::with_hypotheses(self.cfg.logic, ConstantSpec::schematic(), hyps.clone());
        let mut facts = Vec::new();
        for (i, h) in hyps.iter().enumerate() {
            let hi = b.hyp(i + 1);
            let Formula::Just(_, _, body) = h else { unreachable!() };
            let f = (**body).clone();
            let unbox = b.ax(SchemaId::B1, Formula::implies(h.clone(), f)).expect("B1 instance");
            let fact = if self.rng.gen_bool(0.3) { hi } else { b.mp(hi, unbox).expect("modus ponens") };
            facts.push(fact);
        }
        let mut acc = facts[0];
        for &next in &facts[1..] {
            let (l, r) = (b.formula(acc).clone(), b.formula(next).clone());
            let and3 = Formula::implies(l.clone(), Formula::implies(r.clone(), Formula::and(l, r)));
            let and3 = b.ax(SchemaId::And3, and3).expect("And3 instance");
            let m = b.mp(acc, and3).expect("modus ponens");
            acc = b.mp(next, m).expect("modus ponens");
        }
        let hyp_vars: VarSet = hyps.iter().flat_map(Formula::free_vars).collect();
        if let Some(x) = BASICS.iter().map(|n| Var::basic(n)).find(|x| !hyp_vars.contains(x)) {
            if self.rng.gen_bool(0.5) {
                let f = b.formula(acc).clone();
                let extra = Formula::Atom("P".into(), vec![x.clone()]);
                let k = b
                    .ax(SchemaId::K, Formula::implies(f.clone(), Formula::implies(extra, f)))
                    .expect("K instance");
                let m = b.mp(acc, k).expect("modus ponens");
                acc = b.gen(m, &x);
            }
        }
        b.finish(acc)
    }

    /// Random disjunctive template over `letters` letters, with a formula for
    /// each letter.
    pub fn disjunctive_instance(&mut self, letters: usize) -> (Template, Vec<Formula>) {
        let template = self.template(letters, false);
        let phis = (0..letters).map(|_| self.formula(1)).collect();
        (template, phis)
    }

    /// A random template using each of `0..letters` exactly once, built from
    /// `box` and `|`, plus `~` and `&` when `general`.
    pub fn template(&mut self, letters: usize, general: bool) -> Template {
        let mut order: Vec<usize> = (0..letters).collect();
        order.shuffle(&mut self.rng);
        let mut parts: Vec<Template> = order.into_iter().map(Template::letter).collect();
        for p in &mut parts {
            if self.rng.gen_bool(0.5) {
                *p = Template::boxed(p.clone());
            }
            if general && self.rng.gen_bool(0.2) {
                *p = Template::not(p.clone());
            }
        }
        while parts.len() > 1 {
            let b = parts.pop().expect("len > 1");
            let a = parts.pop().expect("len > 1");
            let joined = if general && self.rng.gen_bool(0.3) { Template::and(a, b) } else { Template::or(a, b) };
            let joined = if self.rng.gen_bool(0.3) { Template::boxed(joined) } else { joined };
            parts.push(joined);
        }
        parts.pop().expect("at least one letter")
    }

    /// A random member of the instantiation set of `template` over `phis`.
    pub fn member_of(&mut self, template: &Template, phis: &[Formula]) -> Formula {
        match template {
            Template::Letter(i) => phis[*i].clone(),
            Template::Not(a) => Formula::not(self.member_of(a, phis)),
            Template::And(a, b) => Formula::and(self.member_of(a, phis), self.member_of(b, phis)),
            Template::Or(a, b) => Formula::or(self.member_of(a, phis), self.member_of(b, phis)),
            Template::Box(a) => {
                let body = self.member_of(a, phis);
                let t = self.term(1);
                Formula::just(t, templates::wit(&body), body)
            }
        }
    }

    /// A random model over the witnesses of `targets`, seeded with evidence
    /// for their justification subformulas. Closure models use `cs`.
    pub fn model_for(&mut self, targets: &[&Formula], cs: &ConstantSpec, allow_full: bool) -> FittingModel {
        let n = self.rng.gen_range(1..=self.cfg.max_worlds.max(1));
        let rel = self.frame(n);
        let size = self.rng.gen_range(1..=self.cfg.max_domain.max(1));
        let kind = if allow_full && self.cfg.logic == Logic::Folpb && self.rng.gen_bool(0.1) {
            EvidenceKind::Full
        } else {
            EvidenceKind::Closure
        };
        self.model_on(n, rel, size, targets, cs, kind)
    }

    /// A random model on a fixed frame. The domain holds the witnesses of
    /// the targets, padded to `size`. FOJT45 closure entries are kept only
    /// while the audit passes.
    pub fn model_on(
        &mut self,
        n: usize,
        rel: BTreeSet<(usize, usize)>,
        size: usize,
        targets: &[&Formula],
        cs: &ConstantSpec,
        kind: EvidenceKind,
    ) -> FittingModel {
        let logic = self.cfg.logic;
        let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut used: VarSet = targets.iter().flat_map(|f| f.witness_vars()).collect();
        if let ConstantSpec::Explicit(entries) = cs {
            used.extend(entries.iter().flat_map(|(_, f)| f.witness_vars()));
        }
        let size = size.max(used.len()).max(1);
        let mut domain: Vec<Var> = used.iter().cloned().collect();
        for w in self.witnesses() {
            if domain.len() >= size {
                break;
            }
            if !used.contains(&w) {
                domain.push(w);
            }
        }
        if domain.is_empty() {
            domain.push(Var::witness("d0"));
        }

        let mut preds: BTreeMap<String, usize> = PREDICATES.iter().map(|(p, a)| (p.to_string(), *a)).collect();
        for f in targets {
            f.predicates(&mut preds);
        }
        if let ConstantSpec::Explicit(entries) = cs {
            for (_, f) in entries {
                f.predicates(&mut preds);
            }
        }
        // Dense models make universal antecedents true often enough to exercise Bb.
        let density = *[0.2, 0.5, 0.85, 1.0].choose(&mut self.rng).expect("non-empty");
        let mut interp = BTreeMap::new();
        for (p, arity) in &preds {
            for w in 0..n {
                let mut tuples = BTreeSet::new();
                for tuple in tuples_over(&domain, *arity) {
                    if self.rng.gen_bool(density) {
                        tuples.insert(tuple);
                    }
                }
                interp.insert((p.clone(), w), tuples);
            }
        }

        let mut model = FittingModel {
            logic,
            worlds,
            rel,
            domain,
            interp,
            evidence: Evidence::Full,
            cs: cs.clone(),
        };
        let rel = model.rel.clone();
        let candidates = self.base_candidates(targets, n, &rel);
        match kind {
            EvidenceKind::Full => {}
            EvidenceKind::Table => {
                let entries = candidates
                    .into_iter()
                    .map(|(t, f, w)| {
                        let mut ws = BTreeSet::from([w]);
                        for v in 0..n {
                            if self.rng.gen_bool(0.3) {
                                ws.insert(v);
                            }
                        }
                        (t, f, ws)
                    })
                    .collect();
                model.evidence = Evidence::Table(entries);
            }
            EvidenceKind::Closure => {
                let mut base = Vec::new();
                for entry in candidates {
                    base.push(entry);
                    if logic == Logic::Fojt45 {
                        model.evidence = Evidence::Closure(base.clone());
                        if !strong_everywhere(&model) {
                            base.pop();
                        }
                    }
                }
                model.evidence = Evidence::Closure(base);
            }
        }
        model
    }

    fn frame(&mut self, n: usize) -> BTreeSet<(usize, usize)> {
        let mut m = vec![vec![false; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = i == j || self.rng.gen_bool(0.35);
            }
        }
        if self.cfg.logic == Logic::Fojt45 {
            for i in 0..n {
                for j in 0..n {
                    if m[i][j] {
                        m[j][i] = true;
                    }
                }
            }
        }
        close_transitive(&mut m);
        let mut rel = BTreeSet::new();
        for (i, row) in m.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if *cell {
                    rel.insert((i, j));
                }
            }
        }
        rel
    }

    /// A world for a base entry, often one with a strict successor so that
    /// the entry has somewhere to propagate.
    fn seed_world(&mut self, n: usize, rel: &BTreeSet<(usize, usize)>) -> usize {
        let open: Vec<usize> = (0..n).filter(|w| rel.iter().any(|(a, b)| a == w && b != w)).collect();
        match open.choose(&mut self.rng) {
            Some(w) if self.rng.gen_bool(0.75) => *w,
            _ => self.rng.gen_range(0..n),
        }
    }

    fn base_candidates(&mut self, targets: &[&Formula], n: usize, rel: &BTreeSet<(usize, usize)>) -> Vec<(Term, Formula, usize)> {
        // Seeding the consequent of an implication directly would make it true
        // without exercising any condition, so it is seeded only rarely.
        let mut justs = Vec::new();
        for f in targets {
            match f.as_implies() {
                Some((a, b)) => {
                    collect_justs(a, &mut justs);
                    if self.rng.gen_bool(0.2) {
                        collect_justs(b, &mut justs);
                    }
                }
                None => collect_justs(f, &mut justs),
            }
        }
        let mut out = Vec::new();
        for (t, body) in justs {
            if self.rng.gen_bool(0.15) {
                out.extend((0..n).map(|w| (t.clone(), body.clone(), w)));
            } else if self.rng.gen_bool(0.7) {
                out.push((t.clone(), body.clone(), self.seed_world(n, rel)));
            }
            if let Term::App(s, u) = &t {
                if self.rng.gen_bool(0.5) {
                    let a = self.atom();
                    let w = self.seed_world(n, rel);
                    out.push(((**s).clone(), Formula::implies(a.clone(), body.clone()), w));
                    out.push(((**u).clone(), a, w));
                }
            }
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let t = Term::var(if self.rng.gen_bool(0.5) { "p0" } else { "p1" });
            let body = self.formula(1);
            out.push((t, body, self.seed_world(n, rel)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceKind {
    Full,
    Closure,
    Table,
}

/// Every relation on `n` worlds in the frame class of `logic`.
pub fn frames(n: usize, logic: Logic) -> Vec<BTreeSet<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let mut out = Vec::new();
    for mask in 0..(1u32 << pairs.len()) {
        let mut rel: BTreeSet<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        for (k, p) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                rel.insert(*p);
            }
        }
        let transitive = rel
            .iter()
            .all(|&(a, b)| rel.iter().filter(|(c, _)| *c == b).all(|&(_, d)| rel.contains(&(a, d))));
        let symmetric = rel.iter().all(|&(a, b)| rel.contains(&(b, a)));
        if transitive && (logic == Logic::Folpb || symmetric) {
            out.push(rel);
        }
    }
    out
}

/// Each base entry makes its own justification assertion true, for every
/// domain instance. Specification entries are left to the audit.
fn strong_everywhere(m: &FittingModel) -> bool {
    let Evidence::Closure(base) = &m.evidence else { return true };
    let ev = Evaluator::new(m, Fault::None);
    let options: Vec<Option<Var>> = std::iter::once(None).chain(m.domain.iter().cloned().map(Some)).collect();
    base.iter().all(|(t, f, w)| {
        let vars: Vec<Var> = f.free_vars().into_iter().filter(Var::is_basic).collect();
        partial_maps(&vars, &options).iter().all(|map| {
            let inst = f.replace_free(map);
            let claim = Formula::just(t.clone(), inst.witness_vars(), inst);
            matches!(ev.eval(*w, &claim), Ok(true))
        })
    })
}

fn partial_maps(vars: &[Var], options: &[Option<Var>]) -> Vec<BTreeMap<Var, Var>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                options.iter().map(move |o| {
                    let mut m = m.clone();
                    if let Some(d) = o {
                        m.insert(v.clone(), d.clone());
                    }
                    m
                })
            })
            .collect();
    }
    out
}

fn close_transitive(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

fn tuples_over(domain: &[Var], arity: usize) -> Vec<Vec<Var>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                domain.iter().map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn collect_justs(f: &Formula, out: &mut Vec<(Term, Formula)>) {
    match f {
        Formula::Atom(..) | Formula::Bottom => {}
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => collect_justs(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_justs(a, out);
            collect_justs(b, out);
        }
        Formula::Just(t, _, body) => {
            out.push(((**t).clone(), (**body).clone()));
            collect_justs(body, out);
        }
    }
}

/// Explicit specification listing the CS steps of `d`, each with its witness
/// variables turned back into fresh basic ones. A model must meet these basic
/// entries; the witnessed steps are then instances of them.
pub fn used_constants(d: &Derivation) -> ConstantSpec {
    let mut entries: Vec<(String, Formula)> = Vec::new();
    for s in &d.steps {
        if let (Rule::Cs(c), Formula::Just(_, _, body)) = (&s.rule, &s.formula) {
            let mut basic = (**body).clone();
            for w in body.witness_vars() {
                let fresh = fresh_basic(w.name(), &basic.all_vars());
                basic = transform::rename_var(&basic, &w, &fresh);
            }
            let entry = (c.clone(), basic);
            if !entries.contains(&entry) {
                entries.push(entry);
            }
        }
    }
    ConstantSpec::Explicit(entries)
}

/// A random model for `cfg`; its audit is asserted.
pub fn gen_model(cfg: &GenConfig) -> FittingModel {
    let mut g = Generator::new(cfg.clone());
    let f = g.just(1);
    let m = g.model_for(&[&f], &ConstantSpec::Explicit(Vec::new()), true);
    assert!(audit(&m).passed(), "generated model fails its audit");
    m
}

/// A random instance of `schema` for `cfg.logic`.
pub fn gen_axiom_instance(cfg: &GenConfig, schema: SchemaId) -> Formula {
    Generator::new(cfg.clone()).axiom_instance(schema)
}

/// Trial order: quantifier and classical schemas once, justification
/// schemas twice, then the derivation sources.
fn schedule(logic: Logic) -> Vec<Option<SchemaId>> {
    let mut out = Vec::new();
    let (prop, just): (Vec<SchemaId>, Vec<SchemaId>) = SchemaId::for_logic(logic).partition(|s| {
        s.is_propositional() || matches!(s, SchemaId::Ui | SchemaId::Ud | SchemaId::Ei | SchemaId::Ed)
    });
    for (i, s) in prop.iter().enumerate() {
        out.push(Some(just[i % just.len()]));
        out.push(Some(*s));
        if i % 2 == 1 {
            out.push(None);
        }
    }
    out.extend(just.iter().chain(&just).map(|s| Some(*s)));
    out.extend([None, None]);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub source: String,
    pub formula: Formula,
    pub model: FittingModel,
    pub detail: String,
}

impl Counterexample {
    /// Model file followed by the offending formula, for replay.
    pub fn replay(&self) -> String {
        format!("{}# formula\n# {}\n", print_model(&self.model), print_formula(&self.formula))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessReport {
    pub logic: Logic,
    pub seed: u64,
    pub fault: Fault,
    pub trials: usize,
    pub checked: usize,
    pub skipped: usize,
    pub by_source: BTreeMap<String, usize>,
    pub violations: Vec<Counterexample>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "logic={} seed={} fault={:?} trials={} checked={} skipped={} violations={}",
            self.logic,
            self.seed,
            self.fault,
            self.trials,
            self.checked,
            self.skipped,
            self.violations.len()
        )
    }
}

#[derive(Debug)]
enum Outcome {
    Valid,
    Invalid(String),
    Skipped,
}

/// One soundness trial: a theorem and a model meeting its specification.
fn run_trial(cfg: &GenConfig, trial: usize) -> (String, Formula, FittingModel, Outcome) {
    let plan = schedule(cfg.logic);
    let slot = plan[trial % plan.len()];
    let per_cycle = plan.iter().filter(|s| s.is_none()).count();
    let kind = (trial / plan.len()) * per_cycle + plan[..trial % plan.len()].iter().filter(|s| s.is_none()).count();
    let mut g = Generator::for_trial(cfg, trial);
    let (source, formula, cs) = match slot {
        Some(schema) => {
            let f = g.axiom_instance(schema);
            let c0 = g.axiom_instance(SchemaId::K);
            (schema.name().to_string(), f, ConstantSpec::Explicit(vec![("c0".into(), c0)]))
        }
        None => {
            let mut found = None;
            for attempt in 0..20 {
                if let Some(hit) = g.derivation(kind + attempt * 24) {
                    found = Some(hit);
                    break;
                }
            }
            match found {
                Some((name, d)) => {
                    let concl = d.conclusion().expect("non-empty derivation").clone();
                    (name.to_string(), concl, used_constants(&d))
                }
                None => {
                    let f = g.axiom_instance(SchemaId::K);
                    ("K".to_string(), f, ConstantSpec::Explicit(Vec::new()))
                }
            }
        }
    };
    let mut model = g.model_for(&[&formula], &cs, true);
    let report = audit(&model);
    if !report.passed() {
        // Only the specification entries can fail here: each is an axiom
        // instance, so a failed strong-evidence check is itself a finding.
        let detail = report
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.condition, v.instance))
            .collect::<Vec<_>>()
            .join("; ");
        model.evidence = Evidence::Closure(Vec::new());
        if !audit(&model).passed() {
            return (source, formula, model, Outcome::Invalid(format!("audit: {detail}")));
        }
    }
    let outcome = match Evaluator::new(&model, cfg.fault).valid(&formula) {
        Ok(true) => Outcome::Valid,
        Ok(false) => Outcome::Invalid("not valid".into()),
        Err(_) => Outcome::Skipped,
    };
    (source, formula, model, outcome)
}

/// Checks validity of generated theorems in generated audited models.
pub fn run_soundness(cfg: &GenConfig) -> SoundnessReport {
    let mut report = SoundnessReport {
        logic: cfg.logic,
        seed: cfg.seed,
        fault: cfg.fault,
        trials: cfg.trials,
        checked: 0,
        skipped: 0,
        by_source: BTreeMap::new(),
        violations: Vec::new(),
    };
    for trial in 0..cfg.trials {
        let (source, formula, model, outcome) = run_trial(cfg, trial);
        *report.by_source.entry(source.clone()).or_default() += 1;
        match outcome {
            Outcome::Valid => report.checked += 1,
            Outcome::Skipped => report.skipped += 1,
            Outcome::Invalid(detail) => {
                report.checked += 1;
                report.violations.push(Counterexample {
                    trial,
                    source,
                    formula,
                    model,
                    detail,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_match_their_schema() {
        for logic in [Logic::Folpb, Logic::Fojt45] {
            let mut g = Generator::new(GenConfig::new(logic, 7));
            for schema in SchemaId::for_logic(logic) {
                for _ in 0..20 {
                    let f = g.axiom_instance(schema);
                    assert!(match_axiom(schema, &f, logic).is_some(), "{schema}: {f}");
                }
            }
        }
    }

    #[test]
    fn models_are_deterministic_and_audited() {
        let mut cfg = GenConfig::new(Logic::Folpb, 1);
        cfg.max_worlds = 1;
        let m = gen_model(&cfg);
        assert_eq!(m.worlds.len(), 1);
        assert!(m.rel.contains(&(0, 0)));
        assert_eq!(gen_model(&cfg), m);
        for seed in 0..30 {
            let m = gen_model(&GenConfig::new(Logic::Fojt45, seed));
            assert!(audit(&m).passed());
            for &(a, b) in &m.rel {
                assert!(m.rel.contains(&(b, a)));
            }
        }
    }

    #[test]
    fn derivation_sources_are_accepted() {
        for logic in [Logic::Folpb, Logic::Fojt45] {
            let mut g = Generator::new(GenConfig::new(logic, 3));
            let mut built = 0;
            for kind in 0..24 {
                if let Some((name, d)) = g.derivation(kind) {
                    assert!(check(&d).accepted(), "{name}");
                    assert!(d.hypotheses.is_empty());
                    built += 1;
                }
            }
            assert!(built >= 12, "{built}");
        }
    }

    #[test]
    fn hypothesis_derivations_are_accepted() {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, 5));
        for _ in 0..10 {
            let d = g.hypothesis_derivation();
            assert!(check(&d).accepted());
        }
    }

    #[test]
    fn small_soundness_runs() {
        let mut cfg = GenConfig::new(Logic::Folpb, 42);
        cfg.trials = 0;
        let r = run_soundness(&cfg);
        assert!(r.passed() && r.checked == 0);
        cfg.trials = 40;
        let r = run_soundness(&cfg);
        assert!(r.passed(), "{}", r.violations[0].replay());
        assert_eq!(run_soundness(&cfg), r);
    }
}

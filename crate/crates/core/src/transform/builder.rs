//! Incremental derivation construction with formula-level sharing.

use rustc_hash::FxHashMap as HashMap;

use crate::axioms::{match_axiom, ConstantSpec, Logic, SchemaId};
use crate::kernel::{Derivation, Rule, Step};
use crate::syntax::{Formula, Term, Var, VarSet};

use super::TransformError;

/// Appends steps to a derivation. A formula that is already proved is never
/// proved twice; the earlier index is returned instead.
#[derive(Debug, Clone)]
pub struct Builder {
    logic: Logic,
    cs: ConstantSpec,
    hypotheses: Vec<Formula>,
    steps: Vec<Step>,
    proved: HashMap<Formula, usize>,
}

impl Builder {
    pub fn new(logic: Logic, cs: ConstantSpec) -> Self {
        Builder {
            logic,
            cs,
            hypotheses: Vec::new(),
            steps: Vec::new(),
            proved: HashMap::default(),
        }
    }

    pub fn with_hypotheses(logic: Logic, cs: ConstantSpec, hypotheses: Vec<Formula>) -> Self {
        let mut b = Builder::new(logic, cs);
        b.hypotheses = hypotheses;
        b
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    pub fn cs(&self) -> &ConstantSpec {
        &self.cs
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn formula(&self, idx: usize) -> &Formula {
        &self.steps[idx - 1].formula
    }

    pub fn lookup(&self, f: &Formula) -> Option<usize> {
        self.proved.get(f).copied()
    }

    fn push(&mut self, formula: Formula, rule: Rule) -> usize {
        if let Some(i) = self.proved.get(&formula) {
            return *i;
        }
        let index = self.steps.len() + 1;
        self.proved.insert(formula.clone(), index);
        self.steps.push(Step {
            index,
            formula,
            rule,
            note: None,
        });
        index
    }

    pub fn note(&mut self, idx: usize, text: impl Into<String>) {
        let text = text.into();
        let step = &mut self.steps[idx - 1];
        step.note = Some(match step.note.take() {
            Some(old) => format!("{old}; {text}"),
            None => text,
        });
    }

    pub fn ax(&mut self, schema: SchemaId, f: Formula) -> Result<usize, TransformError> {
        if match_axiom(schema, &f, self.logic).is_none() {
            return Err(TransformError::Internal(format!("{f} is not an instance of {schema}")));
        }
        Ok(self.push(f, Rule::Ax(schema)))
    }

    /// `[c]{} body` for the constant the specification assigns to `schema`.
    pub fn cs_axiom(&mut self, schema: SchemaId, body: Formula) -> Result<(Term, usize), TransformError> {
        let c = self
            .cs
            .constant_for(schema)
            .ok_or(TransformError::CsNotSchematic)?
            .to_string();
        let f = Formula::just(Term::constant(&c), VarSet::new(), body);
        Ok((Term::constant(&c), self.push(f, Rule::Cs(c))))
    }

    /// A CS step for an arbitrary axiom instance, classifying it first.
    pub fn cs_for(&mut self, body: Formula) -> Result<(Term, usize), TransformError> {
        let schema = crate::axioms::classify_axiom(&body, self.logic)
            .ok_or_else(|| TransformError::Internal(format!("{body} is not an axiom")))?
            .schema;
        self.cs_axiom(schema, body)
    }

    pub fn cs_step(&mut self, c: &str, body: Formula) -> usize {
        let f = Formula::just(Term::constant(c), VarSet::new(), body);
        self.push(f, Rule::Cs(c.to_string()))
    }

    pub fn hyp(&mut self, k: usize) -> usize {
        let f = self.hypotheses[k - 1].clone();
        self.push(f, Rule::Hyp(k))
    }

    /// Modus ponens from `minor: A` and `major: A -> B`.
    pub fn mp(&mut self, minor: usize, major: usize) -> Result<usize, TransformError> {
        let a = self.formula(minor).clone();
        let (l, r) = self
            .formula(major)
            .as_implies()
            .ok_or_else(|| TransformError::Internal(format!("step {major} is not an implication")))?;
        if *l != a {
            return Err(TransformError::Internal(format!("MP mismatch at {minor}, {major}")));
        }
        let r = r.clone();
        Ok(self.push(r, Rule::Mp(minor, major)))
    }

    pub fn gen(&mut self, idx: usize, x: &Var) -> usize {
        let f = Formula::forall(x.clone(), self.formula(idx).clone());
        self.push(f, Rule::Gen(idx, x.clone()))
    }

    /// A TAUT step, checked here. Past the kernel's atom limit the goal is
    /// proved axiomatically instead.
    pub fn taut(&mut self, premises: &[usize], goal: Formula) -> Result<usize, TransformError> {
        if let Some(i) = self.lookup(&goal) {
            return Ok(i);
        }
        let fs: Vec<&Formula> = premises.iter().map(|i| self.formula(*i)).collect();
        match crate::kernel::tautological_consequence(&fs, &goal) {
            Ok(true) => Ok(self.push(goal, Rule::Taut(premises.to_vec()))),
            Ok(false) => Err(TransformError::Internal(format!("{goal} does not follow tautologically"))),
            Err(_) => super::prop::prove(self, premises, &goal),
        }
    }

    /// Applies an axiom `A -> B` of the given schema to the proved `A`.
    pub fn apply(&mut self, schema: SchemaId, idx: usize, conclusion: Formula) -> Result<usize, TransformError> {
        let imp = Formula::implies(self.formula(idx).clone(), conclusion);
        let ax = self.ax(schema, imp)?;
        self.mp(idx, ax)
    }

    /// From `[t]{X} A` derives `[t]{Y} A` for `Y ⊇ X`, one A3 step per variable.
    pub fn widen(&mut self, idx: usize, target: &VarSet) -> Result<usize, TransformError> {
        let mut cur = idx;
        loop {
            let (t, xs, body) = just_parts(self.formula(cur))?;
            let Some(y) = target.difference(&xs).next().cloned() else {
                return Ok(cur);
            };
            let mut ys = xs.clone();
            ys.insert(y);
            cur = self.apply(SchemaId::A3, cur, Formula::just(t, ys, body))?;
        }
    }

    /// From `[t]{X} A` derives `[t]{Y} A`: A3 adds `Y \ X`, then A2 drops
    /// `X \ Y`, which must not be free in `A`.
    pub fn retarget(&mut self, idx: usize, target: &VarSet) -> Result<usize, TransformError> {
        let mut cur = self.widen(idx, target)?;
        loop {
            let (t, xs, body) = just_parts(self.formula(cur))?;
            let Some(y) = xs.difference(target).next().cloned() else {
                return Ok(cur);
            };
            let mut ys = xs.clone();
            ys.remove(&y);
            cur = self.apply(SchemaId::A2, cur, Formula::just(t, ys, body))?;
        }
    }

    /// B2 on `[u]{X}(A -> B)` and `[s]{X} A`.
    pub fn app(&mut self, fun: usize, arg: usize) -> Result<usize, TransformError> {
        let (u, xs, imp) = just_parts(self.formula(fun))?;
        let (s, _, _) = just_parts(self.formula(arg))?;
        let (_, b) = imp
            .as_implies()
            .ok_or_else(|| TransformError::Internal("B2 needs an implication".into()))?;
        let b = b.clone();
        let concl = Formula::implies(
            self.formula(arg).clone(),
            Formula::just(Term::app(u, s), xs.clone(), b),
        );
        let step = self.apply(SchemaId::B2, fun, concl)?;
        self.mp(arg, step)
    }

    /// `[u]{X}(A -> B)` to `[s]{X}A -> [(u . s)]{X}B`, one B2 step.
    pub fn app_implication(&mut self, fun: usize, s: &Term) -> Result<usize, TransformError> {
        let (u, xs, imp) = just_parts(self.formula(fun))?;
        let (a, b) = imp
            .as_implies()
            .ok_or_else(|| TransformError::Internal("B2 needs an implication".into()))?;
        let concl = Formula::implies(
            Formula::just(s.clone(), xs.clone(), a.clone()),
            Formula::just(Term::app(u, s.clone()), xs.clone(), b.clone()),
        );
        self.apply(SchemaId::B2, fun, concl)
    }

    /// Identity `A -> A` from K and S.
    pub fn identity(&mut self, a: &Formula) -> Result<usize, TransformError> {
        let aa = Formula::implies(a.clone(), a.clone());
        if let Some(i) = self.lookup(&aa) {
            return Ok(i);
        }
        let a_aa_a = Formula::implies(a.clone(), Formula::implies(aa.clone(), a.clone()));
        let s = Formula::implies(
            a_aa_a.clone(),
            Formula::implies(Formula::implies(a.clone(), aa.clone()), aa.clone()),
        );
        let k1 = self.ax(SchemaId::K, a_aa_a)?;
        let s = self.ax(SchemaId::S, s)?;
        let m = self.mp(k1, s)?;
        let k2 = self.ax(SchemaId::K, Formula::implies(a.clone(), aa.clone()))?;
        self.mp(k2, m)
    }

    /// Copies a derivation in, returning the new index of each step in order.
    /// Its hypotheses must agree with ours at every label it cites.
    pub fn embed(&mut self, d: &Derivation) -> Result<Vec<usize>, TransformError> {
        let mut map: HashMap<usize, usize> = HashMap::default();
        let mut out = Vec::new();
        for s in &d.steps {
            let get = |i: &usize| {
                map.get(i)
                    .copied()
                    .ok_or_else(|| TransformError::Internal(format!("dangling step {i}")))
            };
            let rule = match &s.rule {
                Rule::Ax(a) => Rule::Ax(*a),
                Rule::Cs(c) => Rule::Cs(c.clone()),
                Rule::Hyp(k) if d.hypotheses.get(k - 1) == self.hypotheses.get(k - 1) => Rule::Hyp(*k),
                Rule::Hyp(_) => return Err(TransformError::Internal("embedded hypotheses differ".into())),
                Rule::Mp(i, j) => Rule::Mp(get(i)?, get(j)?),
                Rule::Gen(i, x) => Rule::Gen(get(i)?, x.clone()),
                Rule::Taut(is) => Rule::Taut(is.iter().map(get).collect::<Result<_, _>>()?),
            };
            let idx = self.push(s.formula.clone(), rule);
            map.insert(s.index, idx);
            out.push(idx);
        }
        Ok(out)
    }

    /// Finishes with `idx` as the conclusion, repeating it at the end if it
    /// was proved earlier.
    pub fn finish(mut self, idx: usize) -> Derivation {
        if idx != self.steps.len() {
            let mut copy = self.steps[idx - 1].clone();
            copy.index = self.steps.len() + 1;
            copy.note = None;
            self.steps.push(copy);
        }
        let constants = self.cs.constant_names().into_iter().filter(|c| !crate::textio::is_constant_name(c, &Default::default())).collect();
        Derivation {
            logic: self.logic,
            cs: self.cs,
            hypotheses: self.hypotheses,
            steps: self.steps,
            constants,
        }
    }

    /// Snapshot of the steps so far, concluding with `idx`.
    pub fn snapshot(&self, idx: usize) -> Derivation {
        let mut b = self.clone();
        b.steps.truncate(idx.max(1));
        b.finish(idx)
    }
}

pub(crate) fn just_parts(f: &Formula) -> Result<(Term, VarSet, Formula), TransformError> {
    match f {
        Formula::Just(t, xs, a) => Ok(((**t).clone(), xs.clone(), (**a).clone())),
        _ => Err(TransformError::Internal(format!("{f} is not a justification assertion"))),
    }
}

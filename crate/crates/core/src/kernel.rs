//! The trusted derivation checker.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::axioms::{classify_axiom, csv_contains, match_axiom, ConstantSpec, Logic, SchemaId};
use crate::syntax::{Formula, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Ax(SchemaId),
    Cs(String),
    Hyp(usize),
    Mp(usize, usize),
    Gen(usize, Var),
    Taut(Vec<usize>),
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Ax(_) => "AX",
            Rule::Cs(_) => "CS",
            Rule::Hyp(_) => "HYP",
            Rule::Mp(..) => "MP",
            Rule::Gen(..) => "GEN",
            Rule::Taut(_) => "TAUT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub index: usize,
    pub formula: Formula,
    pub rule: Rule,
    /// Trailing comment from the source file.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub logic: Logic,
    pub cs: ConstantSpec,
    /// Hypothesis `k` is `hypotheses[k - 1]`.
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<Step>,
    /// Names declared as constants beyond the lexical convention.
    pub constants: BTreeSet<String>,
}

impl Derivation {
    pub fn new(logic: Logic, cs: ConstantSpec) -> Self {
        Derivation {
            logic,
            cs,
            hypotheses: Vec::new(),
            steps: Vec::new(),
            constants: BTreeSet::new(),
        }
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    pub fn step(&self, index: usize) -> Option<&Step> {
        self.steps.iter().find(|s| s.index == index)
    }

    /// Steps whose note starts with `key`, in order.
    pub fn milestones(&self) -> Vec<&Step> {
        self.steps
            .iter()
            .filter(|s| s.note.as_deref().is_some_and(|n| n.starts_with("key")))
            .collect()
    }

    /// The numbers `N` of every `key N` note, in step order.
    pub fn milestone_numbers(&self) -> Vec<usize> {
        self.milestones()
            .iter()
            .flat_map(|s| s.note.as_deref().unwrap_or("").split(';'))
            .filter_map(|part| part.trim().strip_prefix("key")?.trim().parse().ok())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    BadAxiomInstance,
    BadCsEntry,
    BadHypIndex,
    MpMismatch,
    GenOnHypFreeVar,
    GenShapeMismatch,
    TautTooManyAtoms,
    TautNotConsequence,
    TautNotAllowed,
    IllFormed,
    NoSteps,
    NonEmptyHypotheses,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, reason: Reason, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub steps: usize,
    pub rules_used: BTreeMap<&'static str, usize>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn rejection(&self) -> Option<(usize, Reason)> {
        match &self.verdict {
            Verdict::Accepted => None,
            Verdict::Rejected { step, reason, .. } => Some((*step, *reason)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub allow_taut: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { allow_taut: true }
    }
}

pub const MAX_TAUT_ATOMS: usize = 16;

/// Quantifier and `gen` variables are basic, and the term operators belong to
/// the logic.
pub fn well_formed(f: &Formula, logic: Logic) -> bool {
    fn binders_ok(f: &Formula) -> bool {
        match f {
            Formula::Atom(..) | Formula::Bottom => true,
            Formula::Not(a) => binders_ok(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                binders_ok(a) && binders_ok(b)
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => x.is_basic() && binders_ok(a),
            Formula::Just(t, _, a) => !t.any(&mut |s| matches!(s, Term::Gen(x, _) if x.is_witness())) && binders_ok(a),
        }
    }
    logic.admits(f) && binders_ok(f)
}

pub fn check(d: &Derivation) -> CheckReport {
    check_with(d, CheckOptions::default())
}

pub fn check_theorem(d: &Derivation) -> CheckReport {
    check_theorem_with(d, CheckOptions::default())
}

pub fn check_theorem_with(d: &Derivation, opts: CheckOptions) -> CheckReport {
    if !d.hypotheses.is_empty() {
        return CheckReport {
            verdict: Verdict::Rejected {
                step: 0,
                reason: Reason::NonEmptyHypotheses,
                detail: format!("{} hypotheses", d.hypotheses.len()),
            },
            steps: d.steps.len(),
            rules_used: BTreeMap::new(),
        };
    }
    check_with(d, opts)
}

pub fn check_with(d: &Derivation, opts: CheckOptions) -> CheckReport {
    let mut rules_used = BTreeMap::new();
    let reject = |step: usize, reason: Reason, detail: String, rules_used: BTreeMap<&'static str, usize>| CheckReport {
        verdict: Verdict::Rejected { step, reason, detail },
        steps: d.steps.len(),
        rules_used,
    };
    if d.steps.is_empty() {
        return reject(0, Reason::NoSteps, "derivation has no steps".into(), rules_used);
    }
    if let Some(h) = d.hypotheses.iter().find(|h| !well_formed(h, d.logic)) {
        return reject(0, Reason::IllFormed, format!("hypothesis {h}"), rules_used);
    }
    let hyp_free: BTreeSet<Var> = d.hypotheses.iter().flat_map(|h| h.free_vars()).filter(Var::is_basic).collect();
    let mut proved: BTreeMap<usize, &Formula> = BTreeMap::new();
    let mut last = 0usize;
    for step in &d.steps {
        let n = step.index;
        if n <= last && !proved.is_empty() {
            return reject(n, Reason::IllFormed, "indices must increase".into(), rules_used);
        }
        last = n;
        *rules_used.entry(step.rule.tag()).or_insert(0) += 1;
        let f = &step.formula;
        if !well_formed(f, d.logic) {
            return reject(n, Reason::IllFormed, format!("{f} is not a {} formula", d.logic), rules_used);
        }
        let outcome = check_step(d, step, &proved, &hyp_free, opts);
        if let Err((reason, detail)) = outcome {
            return reject(n, reason, detail, rules_used);
        }
        proved.insert(n, f);
    }
    CheckReport {
        verdict: Verdict::Accepted,
        steps: d.steps.len(),
        rules_used,
    }
}

fn check_step(
    d: &Derivation,
    step: &Step,
    proved: &BTreeMap<usize, &Formula>,
    hyp_free: &BTreeSet<Var>,
    opts: CheckOptions,
) -> Result<(), (Reason, String)> {
    let f = &step.formula;
    match &step.rule {
        Rule::Ax(schema) => match match_axiom(*schema, f, d.logic) {
            Some(_) => Ok(()),
            None => Err((Reason::BadAxiomInstance, format!("not an instance of {schema}"))),
        },
        Rule::Cs(c) => {
            let Formula::Just(t, xs, body) = f else {
                return Err((Reason::BadCsEntry, "CS step must have the form [c]{} A".into()));
            };
            if !matches!(&**t, Term::Const(name) if name.as_ref() == c.as_str()) || !xs.is_empty() {
                return Err((Reason::BadCsEntry, format!("CS step must have the form [{c}]{{}} A")));
            }
            match csv_contains(&d.cs, c, body, d.logic) {
                Ok(true) => {}
                Ok(false) => return Err((Reason::BadCsEntry, format!("{c} does not justify {body}"))),
                Err(e) => return Err((Reason::BadCsEntry, e.to_string())),
            }
            if !d.cs.is_schematic() && classify_axiom(body, d.logic).is_none() {
                return Err((Reason::BadCsEntry, format!("entry for {c} is not an axiom")));
            }
            Ok(())
        }
        Rule::Hyp(k) => match k.checked_sub(1).and_then(|i| d.hypotheses.get(i)) {
            Some(h) if h == f => Ok(()),
            Some(h) => Err((Reason::BadHypIndex, format!("hypothesis {k} is {h}"))),
            None => Err((Reason::BadHypIndex, format!("no hypothesis {k}"))),
        },
        Rule::Mp(i, j) => {
            let (Some(a), Some(imp)) = (proved.get(i), proved.get(j)) else {
                return Err((Reason::MpMismatch, format!("steps {i} and {j} must both precede")));
            };
            match imp.as_implies() {
                Some((l, r)) if l == *a && r == f => Ok(()),
                _ => Err((Reason::MpMismatch, format!("step {j} is not step {i} -> this step"))),
            }
        }
        Rule::Gen(i, x) => {
            let Some(a) = proved.get(i) else {
                return Err((Reason::GenShapeMismatch, format!("step {i} must precede")));
            };
            match f {
                Formula::Forall(y, body) if y == x && **body == **a => {}
                _ => return Err((Reason::GenShapeMismatch, format!("expected forall {x}. <step {i}>"))),
            }
            if x.is_basic() && hyp_free.contains(x) {
                return Err((Reason::GenOnHypFreeVar, format!("{x} is free in a hypothesis")));
            }
            Ok(())
        }
        Rule::Taut(is) => {
            if !opts.allow_taut {
                return Err((Reason::TautNotAllowed, "TAUT disabled".into()));
            }
            let mut premises = Vec::new();
            for i in is {
                match proved.get(i) {
                    Some(p) => premises.push(*p),
                    None => return Err((Reason::TautNotConsequence, format!("step {i} must precede"))),
                }
            }
            match tautological_consequence(&premises, f) {
                Ok(true) => Ok(()),
                Ok(false) => Err((Reason::TautNotConsequence, "a valuation satisfies the premises but not the step".into())),
                Err(n) => Err((Reason::TautTooManyAtoms, format!("{n} atoms"))),
            }
        }
    }
}

fn collect_atoms<'a>(f: &'a Formula, atoms: &mut HashMap<&'a Formula, usize>) {
    match f {
        Formula::Bottom => {}
        Formula::Not(a) => collect_atoms(a, atoms),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_atoms(a, atoms);
            collect_atoms(b, atoms);
        }
        _ => {
            let next = atoms.len();
            atoms.entry(f).or_insert(next);
        }
    }
}

fn truth(f: &Formula, atoms: &HashMap<&Formula, usize>, valuation: u32) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Not(a) => !truth(a, atoms, valuation),
        Formula::And(a, b) => truth(a, atoms, valuation) && truth(b, atoms, valuation),
        Formula::Or(a, b) => truth(a, atoms, valuation) || truth(b, atoms, valuation),
        Formula::Implies(a, b) => !truth(a, atoms, valuation) || truth(b, atoms, valuation),
        Formula::Iff(a, b) => truth(a, atoms, valuation) == truth(b, atoms, valuation),
        _ => valuation >> atoms[f] & 1 == 1,
    }
}

/// Truth-table check treating atomic, quantified and justification
/// subformulas as opaque. Errors with the atom count past the limit.
pub fn tautological_consequence(premises: &[&Formula], goal: &Formula) -> Result<bool, usize> {
    let mut atoms = HashMap::new();
    for p in premises {
        collect_atoms(p, &mut atoms);
    }
    collect_atoms(goal, &mut atoms);
    if atoms.len() > MAX_TAUT_ATOMS {
        return Err(atoms.len());
    }
    for v in 0..(1u32 << atoms.len()) {
        if premises.iter().all(|p| truth(p, &atoms, v)) && !truth(goal, &atoms, v) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_derivation;

    fn verdict(text: &str) -> Option<(usize, Reason)> {
        check(&parse_derivation(text).unwrap()).rejection()
    }

    #[test]
    fn basic_rejections() {
        assert_eq!(verdict("logic FOLPb\n1. P(x) ; AX A1.K\n"), Some((1, Reason::BadAxiomInstance)));
        assert_eq!(
            verdict("logic FOLPb\nhyp 1: P(x)\n1. P(x) ; HYP 1\n2. forall x. P(x) ; GEN 1 x\n"),
            Some((2, Reason::GenOnHypFreeVar))
        );
        assert_eq!(verdict("logic FOLPb\n"), Some((0, Reason::NoSteps)));
        assert_eq!(verdict("logic FOLPb\n1. (P -> P) ; MP 1 2\n"), Some((1, Reason::MpMismatch)));
    }

    #[test]
    fn accepts_modus_ponens_and_taut() {
        let text = "logic FOLPb\nhyp 1: A\nhyp 2: (A -> B)\n1. A ; HYP 1\n2. (A -> B) ; HYP 2\n3. B ; MP 1 2\n4. (B | ~B) ; TAUT\n5. ~~B ; TAUT 3\n";
        assert!(check(&parse_derivation(text).unwrap()).accepted());
        let d = parse_derivation(text).unwrap();
        assert_eq!(check_theorem(&d).rejection(), Some((0, Reason::NonEmptyHypotheses)));
        let strict = check_with(&d, CheckOptions { allow_taut: false });
        assert_eq!(strict.rejection(), Some((4, Reason::TautNotAllowed)));
    }

    #[test]
    fn cs_steps() {
        let ok = "logic FOLPb\ncs schematic\n1. [c_b1]{} ([t]{} P -> P) ; CS c_b1\n";
        assert!(check(&parse_derivation(ok).unwrap()).accepted());
        let bad = "logic FOLPb\ncs schematic\n1. [c_k]{} ([t]{} P -> P) ; CS c_k\n";
        assert_eq!(verdict(bad), Some((1, Reason::BadCsEntry)));
    }

    #[test]
    fn taut_atom_limit() {
        let atoms: Vec<String> = (0..17).map(|i| format!("P{i}")).collect();
        let goal = format!("({} | ~{})", atoms.join(" | "), atoms[0]);
        let text = format!("logic FOLPb\n1. {goal} ; TAUT\n");
        assert_eq!(verdict(&text), Some((1, Reason::TautTooManyAtoms)));
    }
}

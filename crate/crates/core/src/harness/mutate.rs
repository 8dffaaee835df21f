//! Single-step mutations of accepted derivations.

use crate::axioms::{csv_contains, match_axiom, SchemaId};
use crate::kernel::{tautological_consequence, Derivation, Rule};
use crate::syntax::{Formula, Term, Var};

/// A derivation differing from its source at exactly one step.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub step: usize,
    pub operator: &'static str,
    pub derivation: Derivation,
}

fn first_just_widened(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Atom(..) | Formula::Bottom => None,
        Formula::Not(a) => first_just_widened(a).map(Formula::not),
        Formula::Forall(x, a) => first_just_widened(a).map(|a| Formula::forall(x.clone(), a)),
        Formula::Exists(x, a) => first_just_widened(a).map(|a| Formula::exists(x.clone(), a)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let rebuild = |l: Formula, r: Formula| match f {
                Formula::And(..) => Formula::and(l, r),
                Formula::Or(..) => Formula::or(l, r),
                Formula::Implies(..) => Formula::implies(l, r),
                _ => Formula::iff(l, r),
            };
            if let Some(l) = first_just_widened(a) {
                Some(rebuild(l, (**b).clone()))
            } else {
                first_just_widened(b).map(|r| rebuild((**a).clone(), r))
            }
        }
        Formula::Just(t, xs, body) => {
            let mut wider = xs.clone();
            wider.insert(Var::witness("mut"));
            Some(Formula::just((**t).clone(), wider, (**body).clone()))
        }
    }
}

fn rename_first_term_var(t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) => Some(Term::var("q_mut")),
        Term::Const(_) => None,
        Term::App(a, b) | Term::Sum(a, b) => {
            let rebuild = |l: Term, r: Term| if matches!(t, Term::App(..)) { Term::app(l, r) } else { Term::sum(l, r) };
            if let Some(l) = rename_first_term_var(a) {
                Some(rebuild(l, (**b).clone()))
            } else {
                rename_first_term_var(b).map(|r| rebuild((**a).clone(), r))
            }
        }
        Term::Bang(a) => rename_first_term_var(a).map(Term::bang),
        Term::Query(a) => rename_first_term_var(a).map(Term::query),
        Term::Bar(a) => rename_first_term_var(a).map(Term::bar),
        Term::Gen(x, a) => rename_first_term_var(a).map(|a| Term::gen(x.clone(), a)),
    }
}

/// Applies `op` to the first position where it changes something.
fn map_first(f: &Formula, op: &dyn Fn(&Formula) -> Option<Formula>) -> Option<Formula> {
    if let Some(g) = op(f) {
        return Some(g);
    }
    match f {
        Formula::Atom(..) | Formula::Bottom => None,
        Formula::Not(a) => map_first(a, op).map(Formula::not),
        Formula::Forall(x, a) => map_first(a, op).map(|a| Formula::forall(x.clone(), a)),
        Formula::Exists(x, a) => map_first(a, op).map(|a| Formula::exists(x.clone(), a)),
        Formula::Just(t, xs, a) => map_first(a, op).map(|a| Formula::just((**t).clone(), xs.clone(), a)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let rebuild = |l: Formula, r: Formula| match f {
                Formula::And(..) => Formula::and(l, r),
                Formula::Or(..) => Formula::or(l, r),
                Formula::Implies(..) => Formula::implies(l, r),
                _ => Formula::iff(l, r),
            };
            if let Some(l) = map_first(a, op) {
                Some(rebuild(l, (**b).clone()))
            } else {
                map_first(b, op).map(|r| rebuild((**a).clone(), r))
            }
        }
    }
}

fn formula_mutations(f: &Formula) -> Vec<(&'static str, Formula)> {
    let mut out = vec![("negate", Formula::not(f.clone()))];
    if let Some(g) = map_first(f, &|g| match g {
        Formula::Atom(_, args) => Some(Formula::Atom("Zmut".into(), args.clone())),
        _ => None,
    }) {
        out.push(("predicate", g));
    }
    if let Some(g) = first_just_widened(f) {
        out.push(("subscript", g));
    }
    if let Some(g) = map_first(f, &|g| match g {
        Formula::Just(t, xs, a) => rename_first_term_var(t).map(|t| Formula::just(t, xs.clone(), (**a).clone())),
        _ => None,
    }) {
        out.push(("term-var", g));
    }
    if let Some(g) = map_first(f, &|g| match g {
        Formula::Forall(_, a) | Formula::Exists(_, a) => Some((**a).clone()),
        _ => None,
    }) {
        out.push(("drop-quantifier", g));
    }
    if let Formula::Implies(a, b) = f {
        if a != b {
            out.push(("converse", Formula::implies((**b).clone(), (**a).clone())));
        }
    }
    out
}

/// Whether a content mutation could still be accepted at this step; such
/// mutants are equivalent, not wrong, and are discarded.
fn still_valid(d: &Derivation, pos: usize, f: &Formula) -> bool {
    let step = &d.steps[pos];
    let earlier = |i: &usize| d.steps[..pos].iter().find(|s| s.index == *i).map(|s| &s.formula);
    match &step.rule {
        Rule::Ax(schema) => match_axiom(*schema, f, d.logic).is_some(),
        Rule::Cs(c) => match f {
            Formula::Just(t, xs, body) => {
                matches!(&**t, Term::Const(k) if &**k == c.as_str())
                    && xs.is_empty()
                    && csv_contains(&d.cs, c, body, d.logic).unwrap_or(false)
            }
            _ => false,
        },
        Rule::Hyp(k) => d.hypotheses.get(k.wrapping_sub(1)) == Some(f),
        Rule::Mp(_, j) => earlier(j).and_then(Formula::as_implies).is_some_and(|(_, b)| b == f),
        Rule::Gen(i, x) => matches!(f, Formula::Forall(y, a) if y == x && earlier(i) == Some(&**a)),
        Rule::Taut(is) => {
            let premises: Vec<&Formula> = is.iter().filter_map(earlier).collect();
            !matches!(tautological_consequence(&premises, f), Ok(false))
        }
    }
}

fn with_step(d: &Derivation, pos: usize, formula: Option<Formula>, rule: Option<Rule>) -> Derivation {
    let mut out = d.clone();
    if let Some(f) = formula {
        out.steps[pos].formula = f;
    }
    if let Some(r) = rule {
        out.steps[pos].rule = r;
    }
    out
}

/// Every single-step mutant of `d` that the kernel must reject at the
/// mutated step.
pub fn mutants(d: &Derivation) -> Vec<Mutant> {
    let mut out = Vec::new();
    let beyond = d.steps.iter().map(|s| s.index).max().unwrap_or(0) + 5;
    for (pos, step) in d.steps.iter().enumerate() {
        let mut push = |operator: &'static str, derivation: Derivation| {
            out.push(Mutant {
                step: step.index,
                operator,
                derivation,
            })
        };
        for (op, f) in formula_mutations(&step.formula) {
            if f != step.formula && !still_valid(d, pos, &f) {
                push(op, with_step(d, pos, Some(f), None));
            }
        }
        match &step.rule {
            Rule::Ax(schema) => {
                if let Some(other) = SchemaId::ALL
                    .into_iter()
                    .find(|s| s != schema && match_axiom(*s, &step.formula, d.logic).is_none())
                {
                    push("relabel", with_step(d, pos, None, Some(Rule::Ax(other))));
                }
            }
            Rule::Cs(_) => push("constant", with_step(d, pos, None, Some(Rule::Cs("c_mut".into())))),
            Rule::Hyp(k) => push("dangling", with_step(d, pos, None, Some(Rule::Hyp(d.hypotheses.len() + k + 1)))),
            Rule::Mp(i, j) => {
                push("swap", with_step(d, pos, None, Some(Rule::Mp(*j, *i))));
                push("dangling", with_step(d, pos, None, Some(Rule::Mp(*i, beyond))));
                push("forward", with_step(d, pos, None, Some(Rule::Mp(step.index, *j))));
            }
            Rule::Gen(i, _) => {
                push("gen-var", with_step(d, pos, None, Some(Rule::Gen(*i, Var::basic("v_mut")))));
                push("dangling", with_step(d, pos, None, Some(Rule::Gen(beyond, Var::basic("v_mut")))));
            }
            Rule::Taut(is) => {
                let mut cited = is.clone();
                cited.push(beyond);
                push("dangling", with_step(d, pos, None, Some(Rule::Taut(cited))));
            }
        }
    }
    out.retain(|m| {
        // The swapped premises may coincide.
        m.operator != "swap" || m.derivation != *d
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::textio::parse_derivation;

    #[test]
    fn every_mutant_fails_at_its_step() {
        let d = parse_derivation(
            "logic FOLPb\n1. [c_k]{} (P -> (Q -> P)) ; CS c_k\n2. [c_k]{} (P -> (Q -> P)) -> (P -> (Q -> P)) ; AX B1\n3. P -> (Q -> P) ; MP 1 2\n4. forall x. (P -> (Q -> P)) ; GEN 3 x\n",
        )
        .unwrap();
        let ms = mutants(&d);
        assert!(ms.len() > 15);
        for m in &ms {
            let got = check(&m.derivation).rejection();
            assert_eq!(got.map(|(s, _)| s), Some(m.step), "{} at {}", m.operator, m.step);
        }
    }
}

//! Witness replacement and generalization over a witness.

use crate::kernel::{Derivation, Rule};
use crate::syntax::{fresh_basic, Formula, Term, Var, VarSet};

use super::{require_accepted, TransformError};

fn rename_term(t: &Term, from: &Var, to: &Var) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(a, b) => Term::app(rename_term(a, from, to), rename_term(b, from, to)),
        Term::Sum(a, b) => Term::sum(rename_term(a, from, to), rename_term(b, from, to)),
        Term::Bang(a) => Term::bang(rename_term(a, from, to)),
        Term::Query(a) => Term::query(rename_term(a, from, to)),
        Term::Bar(a) => Term::bar(rename_term(a, from, to)),
        Term::Gen(x, a) => Term::gen(if x == from { to.clone() } else { x.clone() }, rename_term(a, from, to)),
    }
}

/// Replaces every occurrence of `from`, bound, free or in a subscript.
pub fn rename_var(f: &Formula, from: &Var, to: &Var) -> Formula {
    let r = |v: &Var| if v == from { to.clone() } else { v.clone() };
    match f {
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(r).collect()),
        Formula::Bottom => Formula::Bottom,
        Formula::Not(a) => Formula::not(rename_var(a, from, to)),
        Formula::And(a, b) => Formula::and(rename_var(a, from, to), rename_var(b, from, to)),
        Formula::Or(a, b) => Formula::or(rename_var(a, from, to), rename_var(b, from, to)),
        Formula::Implies(a, b) => Formula::implies(rename_var(a, from, to), rename_var(b, from, to)),
        Formula::Iff(a, b) => Formula::iff(rename_var(a, from, to), rename_var(b, from, to)),
        Formula::Forall(x, a) => Formula::forall(r(x), rename_var(a, from, to)),
        Formula::Exists(x, a) => Formula::exists(r(x), rename_var(a, from, to)),
        Formula::Just(t, xs, a) => Formula::just(rename_term(t, from, to), xs.iter().map(r).collect(), rename_var(a, from, to)),
    }
}

fn derivation_vars(d: &Derivation) -> VarSet {
    let mut vars = VarSet::new();
    for h in &d.hypotheses {
        vars.extend(h.all_vars());
    }
    for s in &d.steps {
        vars.extend(s.formula.all_vars());
        if let Rule::Gen(_, x) = &s.rule {
            vars.insert(x.clone());
        }
    }
    vars
}

/// Replaces the witness `a` by the basic variable `y` throughout a
/// hypothesis-free derivation.
pub fn replace_witness(d: &Derivation, a: &Var, y: &Var) -> Result<Derivation, TransformError> {
    require_accepted(d)?;
    if !d.hypotheses.is_empty() {
        return Err(TransformError::PreconditionViolation("derivation has hypotheses".into()));
    }
    if !a.is_witness() || !y.is_basic() {
        return Err(TransformError::PreconditionViolation(format!("{a} must be a witness and {y} basic")));
    }
    if derivation_vars(d).contains(y) {
        return Err(TransformError::VarNotFresh(y.clone()));
    }
    let mut out = d.clone();
    for s in &mut out.steps {
        s.formula = rename_var(&s.formula, a, y);
    }
    Ok(out)
}

/// From a derivation of `phi(a)`, one of `forall y. phi(y)` for a new `y`.
pub fn generalize_witness(d: &Derivation, a: &Var) -> Result<(Var, Derivation), TransformError> {
    let y = fresh_basic("y", &derivation_vars(d));
    let mut out = replace_witness(d, a, &y)?;
    let last = out.steps.last().ok_or(TransformError::Internal("empty derivation".into()))?;
    let index = last.index + 1;
    let formula = Formula::forall(y.clone(), last.formula.clone());
    let rule = Rule::Gen(last.index, y.clone());
    out.steps.push(crate::kernel::Step {
        index,
        formula,
        rule,
        note: None,
    });
    Ok((y, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::textio::{parse_derivation, parse_formula};

    #[test]
    fn witness_examples() {
        let d = parse_derivation(
            "logic FOLPb\n1. [c_ui]{} (forall x. P(x) -> P(@a)) ; CS c_ui\n2. [c_ui]{} (forall x. P(x) -> P(@a)) -> (forall x. P(x) -> P(@a)) ; AX B1\n3. forall x. P(x) -> P(@a) ; MP 1 2\n",
        )
        .unwrap();
        assert!(check(&d).accepted());
        let out = replace_witness(&d, &Var::witness("a"), &Var::basic("y")).unwrap();
        assert!(check(&out).accepted());
        assert_eq!(out.conclusion().unwrap(), &parse_formula("forall x. P(x) -> P(y)").unwrap());
        assert!(matches!(
            replace_witness(&d, &Var::witness("a"), &Var::basic("x")),
            Err(TransformError::VarNotFresh(_))
        ));
        let (y, g) = generalize_witness(&d, &Var::witness("a")).unwrap();
        assert!(check(&g).accepted());
        assert_eq!(g.conclusion().unwrap(), &Formula::forall(y, parse_formula("forall x. P(x) -> P(y)").unwrap()));
        let same = replace_witness(&d, &Var::witness("b"), &Var::basic("z")).unwrap();
        assert_eq!(same, d);
    }
}

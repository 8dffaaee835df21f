//! Internalization: a derivation of `psi` becomes one of `[t]{X} psi`.

use std::collections::{BTreeSet, HashMap};

use crate::axioms::SchemaId;
use crate::kernel::{Derivation, Rule, Step};
use crate::syntax::{Formula, Term, VarSet};

use super::builder::{just_parts, Builder};
use super::{expand_tauts, require_accepted, TransformError};

#[derive(Debug, Clone)]
pub struct Internalized {
    pub term: Term,
    pub subscript: VarSet,
    pub derivation: Derivation,
}

/// Lifts a derivation whose hypotheses are `p_i:_{X_i} phi_i` (distinct
/// justification variables) to one concluding `t:_X psi`, `X` the union of
/// the `X_i`. Only steps the conclusion depends on are lifted. A step that is
/// already `s:_Y A` with `Y` inside `X` is copied unlifted and lifted with `!`.
pub fn internalize(d: &Derivation) -> Result<Internalized, TransformError> {
    require_accepted(d)?;
    if !d.cs.is_schematic() {
        return Err(TransformError::CsNotSchematic);
    }
    let mut seen = BTreeSet::new();
    let mut subscript = VarSet::new();
    for (k, h) in d.hypotheses.iter().enumerate() {
        match h {
            Formula::Just(t, xs, _) if matches!(**t, Term::Var(_)) && seen.insert((**t).clone()) => {
                subscript.extend(xs.iter().cloned());
            }
            _ => return Err(TransformError::HypShapeError(k + 1)),
        }
    }
    let d = expand_tauts(d)?;
    let last_index = d.steps.last().ok_or(TransformError::Internal("empty derivation".into()))?.index;
    let by_index: HashMap<usize, &Step> = d.steps.iter().map(|s| (s.index, s)).collect();
    let bangable = |s: &Step| matches!(&s.formula, Formula::Just(_, ys, _) if ys.is_subset(&subscript));

    // Which steps are needed lifted and which unlifted.
    let mut lift_need = BTreeSet::new();
    let mut raw_need = BTreeSet::new();
    let mut stack = vec![(last_index, true)];
    while let Some((i, lifted)) = stack.pop() {
        let s = by_index[&i];
        if lifted && !bangable(s) {
            if !lift_need.insert(i) {
                continue;
            }
            match &s.rule {
                Rule::Mp(a, b) => stack.extend([(*a, true), (*b, true)]),
                Rule::Gen(a, _) => stack.push((*a, true)),
                _ => {}
            }
        } else {
            if lifted {
                lift_need.insert(i);
            }
            if !raw_need.insert(i) {
                continue;
            }
            match &s.rule {
                Rule::Mp(a, b) => stack.extend([(*a, false), (*b, false)]),
                Rule::Gen(a, _) => stack.push((*a, false)),
                _ => {}
            }
        }
    }

    let mut b = Builder::with_hypotheses(d.logic, d.cs.clone(), d.hypotheses.clone());
    let mut raw: HashMap<usize, usize> = HashMap::new();
    // Step index to (term, index of `[term]{X} formula`).
    let mut lifted: HashMap<usize, (Term, usize)> = HashMap::new();
    for s in &d.steps {
        if raw_need.contains(&s.index) {
            let idx = match &s.rule {
                Rule::Ax(schema) => b.ax(*schema, s.formula.clone())?,
                Rule::Cs(c) => {
                    let (_, _, body) = just_parts(&s.formula)?;
                    b.cs_step(c, body)
                }
                Rule::Hyp(k) => b.hyp(*k),
                Rule::Mp(i, j) => b.mp(raw[i], raw[j])?,
                Rule::Gen(i, x) => b.gen(raw[i], x),
                Rule::Taut(_) => unreachable!("expanded above"),
            };
            raw.insert(s.index, idx);
        }
        if !lift_need.contains(&s.index) {
            continue;
        }
        let psi = &s.formula;
        let entry = if bangable(s) {
            let (t, xs, _) = just_parts(psi)?;
            let bang = Term::bang(t);
            let lifted_f = Formula::just(bang.clone(), xs, psi.clone());
            let idx = b.apply(SchemaId::B4, raw[&s.index], lifted_f)?;
            (bang, b.widen(idx, &subscript)?)
        } else {
            match &s.rule {
                Rule::Ax(schema) => {
                    let (c, idx) = b.cs_axiom(*schema, psi.clone())?;
                    (c, b.widen(idx, &subscript)?)
                }
                Rule::Mp(i, j) => {
                    let (s_term, s_idx) = lifted[i].clone();
                    let (u_term, u_idx) = lifted[j].clone();
                    let idx = b.app(u_idx, s_idx)?;
                    (Term::app(u_term, s_term), idx)
                }
                Rule::Gen(i, x) => {
                    let (t, idx) = lifted[i].clone();
                    let g = Term::gen(x.clone(), t);
                    let concl = Formula::just(g.clone(), subscript.clone(), psi.clone());
                    (g, b.apply(SchemaId::B5, idx, concl)?)
                }
                Rule::Cs(_) | Rule::Hyp(_) => unreachable!("justification steps are lifted with !"),
                Rule::Taut(_) => unreachable!("expanded above"),
            }
        };
        lifted.insert(s.index, entry);
    }
    let (term, idx) = lifted[&last_index].clone();
    let mut derivation = b.finish(idx);
    derivation.constants = d.constants.clone();
    Ok(Internalized {
        term,
        subscript,
        derivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::textio::{parse_derivation, parse_formula, parse_term};

    #[test]
    fn internalize_examples() {
        let d = parse_derivation("logic FOLPb\n1. (P -> (Q -> P)) ; AX A1.K\n").unwrap();
        let out = internalize(&d).unwrap();
        assert_eq!(out.term, Term::constant("c_k"));
        assert_eq!(out.derivation.conclusion().unwrap(), &parse_formula("[c_k]{} (P -> (Q -> P))").unwrap());

        let d = parse_derivation(
            "logic FOLPb\nhyp 1: [p]{x} (A -> B)\nhyp 2: [q]{y} A\n1. [p]{x} (A -> B) ; HYP 1\n2. [p]{x} (A -> B) -> (A -> B) ; AX B1\n3. A -> B ; MP 1 2\n4. [q]{y} A ; HYP 2\n5. [q]{y} A -> A ; AX B1\n6. A ; MP 4 5\n7. B ; MP 6 3\n",
        )
        .unwrap();
        let out = internalize(&d).unwrap();
        assert!(check(&out.derivation).accepted(), "{:?}", check(&out.derivation).verdict);
        assert_eq!(out.subscript.len(), 2);
        let Formula::Just(_, xs, body) = out.derivation.conclusion().unwrap() else { panic!() };
        assert_eq!(xs, &out.subscript);
        assert_eq!(**body, parse_formula("B").unwrap());

        let d = parse_derivation("logic FOLPb\n1. (P(y) -> (Q -> P(y))) ; AX A1.K\n2. forall y. (P(y) -> (Q -> P(y))) ; GEN 1 y\n").unwrap();
        let out = internalize(&d).unwrap();
        assert_eq!(out.term, parse_term("gen[y](c_k)").unwrap());
        assert!(check(&out.derivation).accepted());
    }
}

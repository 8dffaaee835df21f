//! Proof transformers and derived-term synthesizers. Every output is an
//! ordinary [`Derivation`] that the kernel re-checks.

mod barcan;
pub mod builder;
mod lift;
pub mod prop;
mod witness;

use std::collections::HashMap;

use thiserror::Error;

use crate::kernel::{check, Derivation, Reason, Rule};
use crate::syntax::{Formula, Term, Var};

pub use barcan::{converse_barcan, converse_buridan, jt45_barcan, query_lemma, Synthesis};
pub use builder::Builder;
pub use lift::{internalize, Internalized};
pub use witness::{generalize_witness, rename_var, replace_witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input rejected at step {step}: {reason}")]
    NotAccepted { step: usize, reason: Reason },
    #[error("no hypothesis {0}")]
    HypNotFound(usize),
    #[error("hypothesis {0} is not an assertion on its own justification variable")]
    HypShapeError(usize),
    #[error("constant specification must be schematic")]
    CsNotSchematic,
    #[error("propositional expansion exceeded its budget")]
    TautExpansionOverflow,
    #[error("`{0}` already occurs in the derivation")]
    VarNotFresh(Var),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("operation requires {0}")]
    WrongLogic(crate::axioms::Logic),
    #[error("internal construction error: {0}")]
    Internal(String),
}

pub(crate) fn require_accepted(d: &Derivation) -> Result<(), TransformError> {
    match check(d).rejection() {
        None => Ok(()),
        Some((step, reason)) => Err(TransformError::NotAccepted { step, reason }),
    }
}

pub(crate) fn require_theorem(d: &Derivation) -> Result<(), TransformError> {
    require_accepted(d)?;
    if !d.hypotheses.is_empty() {
        return Err(TransformError::PreconditionViolation("derivation has hypotheses".into()));
    }
    Ok(())
}

/// Copies `d` with every TAUT step replaced by an axiomatic proof.
pub fn expand_tauts(d: &Derivation) -> Result<Derivation, TransformError> {
    let mut b = Builder::with_hypotheses(d.logic, d.cs.clone(), d.hypotheses.clone());
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut last = 0;
    for s in &d.steps {
        let get = |i: &usize| map.get(i).copied().ok_or(TransformError::Internal(format!("dangling step {i}")));
        let idx = match &s.rule {
            Rule::Ax(a) => b.ax(*a, s.formula.clone())?,
            Rule::Cs(c) => {
                let Formula::Just(_, _, body) = &s.formula else {
                    return Err(TransformError::Internal("CS step shape".into()));
                };
                b.cs_step(c, (**body).clone())
            }
            Rule::Hyp(k) => b.hyp(*k),
            Rule::Mp(i, j) => b.mp(get(i)?, get(j)?)?,
            Rule::Gen(i, x) => b.gen(get(i)?, x),
            Rule::Taut(is) => {
                let premises: Vec<usize> = is.iter().map(get).collect::<Result<_, _>>()?;
                prop::prove(&mut b, &premises, &s.formula)?
            }
        };
        if let Some(note) = &s.note {
            b.note(idx, note.clone());
        }
        map.insert(s.index, idx);
        last = idx;
    }
    let mut out = b.finish(last);
    out.constants = d.constants.clone();
    Ok(out)
}

/// From a derivation of `psi` under hypotheses `G, phi` (with `phi` at label
/// `hyp`), a derivation of `phi -> psi` under `G`.
pub fn deduction(d: &Derivation, hyp: usize) -> Result<Derivation, TransformError> {
    require_accepted(d)?;
    let phi = d
        .hypotheses
        .get(hyp.wrapping_sub(1))
        .cloned()
        .ok_or(TransformError::HypNotFound(hyp))?;
    let remaining: Vec<Formula> = d
        .hypotheses
        .iter()
        .enumerate()
        .filter(|(k, _)| k + 1 != hyp)
        .map(|(_, h)| h.clone())
        .collect();
    let relabel = |k: usize| if k > hyp { k - 1 } else { k };
    let mut b = Builder::with_hypotheses(d.logic, d.cs.clone(), remaining);
    let mut map: HashMap<usize, usize> = HashMap::new();
    let imp = |a: &Formula| Formula::implies(phi.clone(), a.clone());
    let mut last = 0;
    for s in &d.steps {
        let get = |i: &usize| map[i];
        let psi = &s.formula;
        let idx = match &s.rule {
            Rule::Hyp(k) if *k == hyp => b.identity(&phi)?,
            Rule::Ax(_) | Rule::Cs(_) | Rule::Hyp(_) => {
                let plain = match &s.rule {
                    Rule::Ax(a) => b.ax(*a, psi.clone())?,
                    Rule::Cs(c) => {
                        let Formula::Just(_, _, body) = psi else { unreachable!("accepted CS step") };
                        b.cs_step(c, (**body).clone())
                    }
                    Rule::Hyp(k) => b.hyp(relabel(*k)),
                    _ => unreachable!(),
                };
                let k = b.ax(crate::axioms::SchemaId::K, Formula::implies(psi.clone(), imp(psi)))?;
                b.mp(plain, k)?
            }
            Rule::Mp(i, j) => {
                let a = d.step(*i).map(|s| s.formula.clone()).ok_or(TransformError::Internal("MP premise".into()))?;
                let s_ax = Formula::implies(
                    imp(&Formula::implies(a.clone(), psi.clone())),
                    Formula::implies(imp(&a), imp(psi)),
                );
                let s_ax = b.ax(crate::axioms::SchemaId::S, s_ax)?;
                let m = b.mp(get(j), s_ax)?;
                b.mp(get(i), m)?
            }
            Rule::Gen(i, x) => {
                let g = b.gen(get(i), x);
                let Formula::Forall(_, body) = psi else { unreachable!("accepted GEN step") };
                let ud = Formula::implies(
                    b.formula(g).clone(),
                    Formula::implies(phi.clone(), Formula::forall(x.clone(), (**body).clone())),
                );
                let ud = b.ax(crate::axioms::SchemaId::Ud, ud)?;
                b.mp(g, ud)?
            }
            Rule::Taut(is) => {
                let premises: Vec<usize> = is.iter().map(get).collect();
                b.taut(&premises, imp(psi))?
            }
        };
        map.insert(s.index, idx);
        last = idx;
    }
    let mut out = b.finish(last);
    out.constants = d.constants.clone();
    Ok(out)
}

/// Term shape helper: `(head . arg)`.
pub fn app(head: Term, arg: Term) -> Term {
    Term::app(head, arg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_with, CheckOptions};
    use crate::textio::{parse_derivation, parse_formula};

    #[test]
    fn deduction_examples() {
        let d = parse_derivation("logic FOLPb\nhyp 1: A\n1. A ; HYP 1\n").unwrap();
        let out = deduction(&d, 1).unwrap();
        assert!(check(&out).accepted());
        assert_eq!(out.conclusion().unwrap(), &parse_formula("A -> A").unwrap());

        let d = parse_derivation("logic FOLPb\nhyp 1: A\nhyp 2: A -> B\n1. A ; HYP 1\n2. A -> B ; HYP 2\n3. B ; MP 1 2\n").unwrap();
        let out = deduction(&d, 1).unwrap();
        assert!(check(&out).accepted(), "{:?}", check(&out).verdict);
        assert_eq!(out.hypotheses, vec![parse_formula("A -> B").unwrap()]);
        assert_eq!(out.conclusion().unwrap(), &parse_formula("A -> B").unwrap());

        let d = parse_derivation(
            "logic FOLPb\nhyp 1: Q\n1. Q ; HYP 1\n2. (Q -> (P(x) -> Q)) ; AX A1.K\n3. P(x) -> Q ; MP 1 2\n4. forall x. (P(x) -> Q) ; GEN 3 x\n",
        )
        .unwrap();
        let out = deduction(&d, 1).unwrap();
        assert!(out.steps.iter().any(|s| s.rule == Rule::Ax(crate::axioms::SchemaId::Ud)));
        assert!(check(&out).accepted());
    }

    #[test]
    fn expansion_removes_taut() {
        let d = parse_derivation("logic FOLPb\nhyp 1: A & B\n1. A & B ; HYP 1\n2. B | C ; TAUT 1\n").unwrap();
        let e = expand_tauts(&d).unwrap();
        assert!(check_with(&e, CheckOptions { allow_taut: false }).accepted());
        assert_eq!(e.conclusion(), d.conclusion());
    }
}

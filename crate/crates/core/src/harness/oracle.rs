//! Enumeration of instantiation sets over a finite term universe.

use std::collections::BTreeSet;

use crate::syntax::{Formula, Term};
use crate::templates::{wit, Template, TemplateError};

use super::HarnessError;

pub const MEMBER_BUDGET: usize = 200_000;

/// Terms over `p0`, `p1`, `c0` closed under `!` up to `depth` nestings.
pub fn term_universe(depth: usize) -> Vec<Term> {
    let mut level = vec![Term::var("p0"), Term::var("p1"), Term::constant("c0")];
    let mut all = level.clone();
    for _ in 0..depth {
        level = level.into_iter().map(Term::bang).collect();
        all.extend(level.iter().cloned());
    }
    all
}

/// Every member of the instantiation set of `template` over `phis` whose
/// justification terms lie in [`term_universe`]`(depth)`.
pub fn brute_member(template: &Template, phis: &[Formula], depth: usize) -> Result<BTreeSet<Formula>, HarnessError> {
    template.check_arity(phis.len())?;
    let terms = term_universe(depth);
    enumerate(template, phis, &terms)
}

fn enumerate(template: &Template, phis: &[Formula], terms: &[Term]) -> Result<BTreeSet<Formula>, HarnessError> {
    let out: BTreeSet<Formula> = match template {
        Template::Letter(i) => BTreeSet::from([phis
            .get(*i)
            .cloned()
            .ok_or(TemplateError::ArityMismatch { letter: *i, given: phis.len() })?]),
        Template::Not(a) => enumerate(a, phis, terms)?.into_iter().map(Formula::not).collect(),
        Template::And(a, b) | Template::Or(a, b) => {
            let left = enumerate(a, phis, terms)?;
            let right = enumerate(b, phis, terms)?;
            if left.len().saturating_mul(right.len()) > MEMBER_BUDGET {
                return Err(HarnessError::BudgetExceeded(MEMBER_BUDGET));
            }
            let mut out = BTreeSet::new();
            for l in &left {
                for r in &right {
                    out.insert(if matches!(template, Template::And(..)) {
                        Formula::and(l.clone(), r.clone())
                    } else {
                        Formula::or(l.clone(), r.clone())
                    });
                }
            }
            out
        }
        Template::Box(a) => {
            let inner = enumerate(a, phis, terms)?;
            if inner.len().saturating_mul(terms.len()) > MEMBER_BUDGET {
                return Err(HarnessError::BudgetExceeded(MEMBER_BUDGET));
            }
            let mut out = BTreeSet::new();
            for body in &inner {
                for t in terms {
                    out.insert(Formula::just(t.clone(), wit(body), body.clone()));
                }
            }
            out
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_formula;

    #[test]
    fn enumeration_examples() {
        let phi = parse_formula("P(@a)").unwrap();
        let letter = brute_member(&Template::letter(0), &[phi.clone()], 2).unwrap();
        assert_eq!(letter, BTreeSet::from([phi.clone()]));
        let boxed = brute_member(&Template::boxed(Template::letter(0)), &[phi.clone()], 1).unwrap();
        assert_eq!(boxed.len(), 6);
        assert!(boxed.contains(&parse_formula("[!c0]{@a} P(@a)").unwrap()));
        let atomic = brute_member(&Template::boxed(Template::letter(0)), &[phi], 0).unwrap();
        assert!(atomic.iter().all(|f| matches!(f, Formula::Just(t, _, _) if t.depth() == 0)));
    }
}

//! Explicit derivations of the converse Barcan and Buridan formulas, and of
//! the Barcan formula in FOJT45.

use crate::axioms::{ConstantSpec, Logic, SchemaId};
use crate::kernel::Derivation;
use crate::syntax::{Formula, Term, Var, VarSet};

use super::builder::Builder;
use super::{internalize, prop, TransformError};

/// A synthesized term together with a derivation of its defining formula.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub term: Term,
    pub derivation: Derivation,
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn with(xs: &VarSet, y: &Var) -> VarSet {
    let mut out = xs.clone();
    out.insert(y.clone());
    out
}

fn fresh_check(xs: &VarSet, y: &Var) -> Result<(), TransformError> {
    if xs.contains(y) || !y.is_basic() {
        return Err(TransformError::PreconditionViolation(format!("{y} must be a basic variable outside the subscript")));
    }
    Ok(())
}

fn key(b: &mut Builder, idx: usize, n: usize) {
    b.note(idx, format!("key {n}"));
}

/// `[t]{X} forall y. phi -> forall y. [(c_ui . t)]{X,y} phi`.
pub fn converse_barcan(logic: Logic, t: &Term, xs: &VarSet, y: &Var, phi: &Formula) -> Result<Synthesis, TransformError> {
    fresh_check(xs, y)?;
    let mut b = Builder::new(logic, ConstantSpec::schematic());
    let all = Formula::forall(y.clone(), phi.clone());
    let xy = with(xs, y);

    let s1 = b.ax(SchemaId::Ui, imp(&all, phi))?;
    key(&mut b, s1, 1);
    let (c, s2) = b.cs_axiom(SchemaId::Ui, imp(&all, phi))?;
    key(&mut b, s2, 2);
    let s3 = b.widen(s2, &xy)?;
    key(&mut b, s3, 3);
    let s4 = b.app_implication(s3, t)?;
    let s4_ax = s4 - 1;
    key(&mut b, s4_ax, 4);
    key(&mut b, s4, 5);
    let ct = Term::app(c, t.clone());
    let lhs = Formula::just(t.clone(), xs.clone(), all.clone());
    let s6 = b.ax(SchemaId::A3, imp(&lhs, &Formula::just(t.clone(), xy.clone(), all.clone())))?;
    key(&mut b, s6, 6);
    let body = Formula::just(ct.clone(), xy.clone(), phi.clone());
    let s7 = b.taut(&[s4, s6], imp(&lhs, &body))?;
    key(&mut b, s7, 7);
    let s8 = b.gen(s7, y);
    key(&mut b, s8, 8);
    let concl = imp(&lhs, &Formula::forall(y.clone(), body));
    let ud = b.ax(SchemaId::Ud, imp(b.formula(s8), &concl))?;
    let s9 = b.mp(s8, ud)?;
    key(&mut b, s9, 9);
    Ok(Synthesis {
        term: ct,
        derivation: b.finish(s9),
    })
}

/// `exists y. [t]{X,y} phi -> [((c_ui . r) . t)]{X} exists y. phi`, with `r`
/// internalizing `forall y. (phi -> exists y. phi)`.
pub fn converse_buridan(logic: Logic, t: &Term, xs: &VarSet, y: &Var, phi: &Formula) -> Result<Synthesis, TransformError> {
    fresh_check(xs, y)?;
    let mut b = Builder::new(logic, ConstantSpec::schematic());
    let ex = Formula::exists(y.clone(), phi.clone());
    let xy = with(xs, y);
    let phi_ex = imp(phi, &ex);

    let mut inner = Builder::new(logic, ConstantSpec::schematic());
    let ei = inner.ax(SchemaId::Ei, phi_ex.clone())?;
    let g = inner.gen(ei, y);
    let lifted = internalize(&inner.finish(g))?;
    let s1 = b.embed(&lifted.derivation)?;
    let s1_ei = s1[0];
    key(&mut b, s1_ei, 1);
    let s2 = *s1.last().expect("non-empty");
    key(&mut b, s2, 2);
    let r = lifted.term;
    let s3 = b.widen(s2, xs)?;
    key(&mut b, s3, 3);

    let cb = converse_barcan(logic, &r, xs, y, &phi_ex)?;
    let cb_steps = b.embed(&cb.derivation)?;
    let s4 = b.mp(s3, *cb_steps.last().expect("non-empty"))?;
    key(&mut b, s4, 4);
    let inst = b.formula(s4).clone();
    let Formula::Forall(_, inst_body) = &inst else {
        return Err(TransformError::Internal("converse Barcan shape".into()));
    };
    let s5 = b.apply(SchemaId::Ui, s4, (**inst_body).clone())?;
    key(&mut b, s5, 5);
    let s6 = b.app_implication(s5, t)?;
    key(&mut b, s6, 6);
    let u = Term::app(cb.term, t.clone());
    let s7 = b.ax(
        SchemaId::A2,
        imp(&Formula::just(u.clone(), xy.clone(), ex.clone()), &Formula::just(u.clone(), xs.clone(), ex.clone())),
    )?;
    key(&mut b, s7, 7);
    let hyp_side = Formula::just(t.clone(), xy, phi.clone());
    let goal = Formula::just(u.clone(), xs.clone(), ex.clone());
    let s8 = b.taut(&[s6, s7], imp(&hyp_side, &goal))?;
    key(&mut b, s8, 8);
    let s9 = b.gen(s8, y);
    key(&mut b, s9, 9);
    let ed = imp(
        b.formula(s9),
        &imp(&Formula::exists(y.clone(), hyp_side), &goal),
    );
    let ed = b.ax(SchemaId::Ed, ed)?;
    let s10 = b.mp(s9, ed)?;
    key(&mut b, s10, 10);
    Ok(Synthesis {
        term: u,
        derivation: b.finish(s10),
    })
}

/// Lemmas used by [`jt45_barcan`]: from B6 and B1, `~[?t]{X}~[t]{X}A -> A`.
pub fn query_lemma(t: &Term, xs: &VarSet, a: &Formula) -> Result<Derivation, TransformError> {
    let mut b = Builder::new(Logic::Fojt45, ConstantSpec::schematic());
    let idx = query_lemma_in(&mut b, t, xs, a)?;
    Ok(b.finish(idx))
}

fn query_lemma_in(b: &mut Builder, t: &Term, xs: &VarSet, a: &Formula) -> Result<usize, TransformError> {
    let tt = Formula::just(t.clone(), xs.clone(), a.clone());
    let not_t = Formula::not(tt.clone());
    let qt = Formula::just(Term::query(t.clone()), xs.clone(), not_t.clone());
    let b6 = b.ax(SchemaId::B6, imp(&not_t, &qt))?;
    let b1 = b.ax(SchemaId::B1, imp(&tt, a))?;
    b.taut(&[b6, b1], imp(&Formula::not(qt), a))
}

/// `forall y. [t]{X,y} phi -> [(r . ?((c2 . c1) . ?t))]{X} forall y. phi`
/// in FOJT45.
pub fn jt45_barcan(t: &Term, xs: &VarSet, y: &Var, phi: &Formula) -> Result<Synthesis, TransformError> {
    fresh_check(xs, y)?;
    let logic = Logic::Fojt45;
    let mut b = Builder::new(logic, ConstantSpec::schematic());
    let xy = with(xs, y);
    let tt = Formula::just(t.clone(), xy.clone(), phi.clone());
    let all_t = Formula::forall(y.clone(), tt.clone());
    let not = |f: &Formula| Formula::not(f.clone());

    let s1 = b.ax(SchemaId::Ui, imp(&all_t, &tt))?;
    key(&mut b, s1, 1);
    let (c1, s2) = b.cs_axiom(SchemaId::Ui, imp(&all_t, &tt))?;
    key(&mut b, s2, 2);
    let s3 = b.widen(s2, &xy)?;
    key(&mut b, s3, 3);
    let contra = imp(&imp(&all_t, &tt), &imp(&not(&tt), &not(&all_t)));
    let s4 = b.taut(&[], contra.clone())?;
    key(&mut b, s4, 4);

    let c2 = internalize(&prop::contraposition(logic, &all_t, &tt)?)?;
    let s5 = *b.embed(&c2.derivation)?.last().expect("non-empty");
    key(&mut b, s5, 5);
    let s6 = b.widen(s5, &xy)?;
    key(&mut b, s6, 6);
    let s7 = b.app(s6, s3)?;
    key(&mut b, s7, 7);
    let qt = Term::query(t.clone());
    let s8 = b.app_implication(s7, &qt)?;
    key(&mut b, s8, 8);
    let u = Term::app(Term::app(c2.term, c1), qt.clone());
    let u_xy = Formula::just(u.clone(), xy.clone(), not(&all_t));
    let q_xy = Formula::just(qt.clone(), xy.clone(), not(&tt));
    let s9 = b.taut(&[s8], imp(&not(&u_xy), &not(&q_xy)))?;
    key(&mut b, s9, 9);
    let s10 = query_lemma_in(&mut b, t, &xy, phi)?;
    key(&mut b, s10, 10);
    let s11 = b.taut(&[s9, s10], imp(&not(&u_xy), phi))?;
    key(&mut b, s11, 11);
    let u_x = Formula::just(u.clone(), xs.clone(), not(&all_t));
    let s12 = b.ax(SchemaId::A2, imp(&u_xy, &u_x))?;
    key(&mut b, s12, 12);
    let s13 = b.taut(&[s12], imp(&not(&u_x), &not(&u_xy)))?;
    key(&mut b, s13, 13);
    let s14 = b.taut(&[s11, s13], imp(&not(&u_x), phi))?;
    key(&mut b, s14, 14);
    let s15 = b.gen(s14, y);
    key(&mut b, s15, 15);
    let all_phi = Formula::forall(y.clone(), phi.clone());
    let ud = b.ax(SchemaId::Ud, imp(b.formula(s15), &imp(&not(&u_x), &all_phi)))?;
    let s16 = b.mp(s15, ud)?;
    key(&mut b, s16, 16);

    let r = internalize(&b.snapshot(s16))?;
    let s17 = *b.embed(&r.derivation)?.last().expect("non-empty");
    key(&mut b, s17, 17);
    let s18 = b.widen(s17, xs)?;
    key(&mut b, s18, 18);
    let qu = Term::query(u.clone());
    let s19 = b.app_implication(s18, &qu)?;
    key(&mut b, s19, 19);
    let qu_f = Formula::just(qu.clone(), xs.clone(), not(&u_x));
    let b6 = b.ax(SchemaId::B6, imp(&not(&u_x), &qu_f))?;
    let b1 = b.ax(SchemaId::B1, imp(&u_x, &not(&all_t)))?;
    let s20 = b.taut(&[b6, b1], imp(&all_t, &qu_f))?;
    key(&mut b, s20, 20);
    let term = Term::app(r.term, qu);
    let s21 = b.taut(&[s19, s20], imp(&all_t, &Formula::just(term.clone(), xs.clone(), all_phi)))?;
    key(&mut b, s21, 21);
    Ok(Synthesis {
        term,
        derivation: b.finish(s21),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::textio::{parse_formula, print_derivation};

    fn basics() -> (Term, VarSet, Var, Formula) {
        (Term::var("t"), VarSet::new(), Var::basic("y"), parse_formula("P(y)").unwrap())
    }

    #[test]
    fn converse_barcan_accepted() {
        let (t, xs, y, phi) = basics();
        let s = converse_barcan(Logic::Folpb, &t, &xs, &y, &phi).unwrap();
        let report = check(&s.derivation);
        assert!(report.accepted(), "{:?}\n{}", report.verdict, print_derivation(&s.derivation));
        assert_eq!(s.term.to_string(), "(c_ui . t)");
        assert_eq!(s.derivation.milestone_numbers(), (1..=9).collect::<Vec<_>>());
        let xs: VarSet = [Var::basic("x")].into_iter().collect();
        let s = converse_barcan(Logic::Fojt45, &t, &xs, &y, &parse_formula("R(x, y)").unwrap()).unwrap();
        assert!(check(&s.derivation).accepted());
        assert!(converse_barcan(Logic::Folpb, &t, &xs, &Var::basic("x"), &phi).is_err());
    }

    #[test]
    fn converse_buridan_accepted() {
        let (t, xs, y, phi) = basics();
        let s = converse_buridan(Logic::Folpb, &t, &xs, &y, &phi).unwrap();
        let report = check(&s.derivation);
        assert!(report.accepted(), "{:?}\n{}", report.verdict, print_derivation(&s.derivation));
        assert!(matches!(&s.term, Term::App(f, a) if **a == t && matches!(&**f, Term::App(..))));
        assert_eq!(s.derivation.milestone_numbers(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn jt45_barcan_accepted() {
        let (t, xs, y, phi) = basics();
        let s = jt45_barcan(&t, &xs, &y, &phi).unwrap();
        let report = check(&s.derivation);
        assert!(report.accepted(), "{:?}\n{}", report.verdict, print_derivation(&s.derivation));
        let Term::App(_, q) = &s.term else { panic!() };
        assert!(matches!(&**q, Term::Query(_)));
        assert_eq!(s.derivation.milestone_numbers(), (1..=21).collect::<Vec<_>>());
    }
}

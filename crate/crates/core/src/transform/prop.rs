//! Axiomatic proofs of tautological consequences.
//!
//! Proofs are built as trees under local hypotheses, refuted tableau style,
//! and the hypotheses are discharged by bracket abstraction over K and S.
//! Only the classical schemas and modus ponens appear in the output.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::rc::Rc;

use crate::axioms::{ConstantSpec, Logic, SchemaId};
use crate::kernel::Derivation;
use crate::syntax::Formula;

use super::builder::Builder;
use super::TransformError;

#[derive(Debug)]
enum Leaf {
    /// Local hypothesis, discharged before emission.
    Hyp(usize),
    Ax(SchemaId),
    /// A step already present in the builder.
    Step(usize),
}

#[derive(Debug)]
enum Node {
    Leaf(Leaf),
    Mp(Pf, Pf),
}

#[derive(Debug)]
struct Proof {
    node: Node,
    concl: Formula,
}

type Pf = Rc<Proof>;

fn ax(schema: SchemaId, f: Formula) -> Pf {
    Rc::new(Proof {
        node: Node::Leaf(Leaf::Ax(schema)),
        concl: f,
    })
}

fn hyp(id: usize, f: Formula) -> Pf {
    Rc::new(Proof {
        node: Node::Leaf(Leaf::Hyp(id)),
        concl: f,
    })
}

fn step(idx: usize, f: Formula) -> Pf {
    Rc::new(Proof {
        node: Node::Leaf(Leaf::Step(idx)),
        concl: f,
    })
}

fn mp(minor: &Pf, major: &Pf) -> Pf {
    let (l, r) = major.concl.as_implies().expect("major premise is an implication");
    debug_assert_eq!(*l, minor.concl);
    Rc::new(Proof {
        concl: r.clone(),
        node: Node::Mp(minor.clone(), major.clone()),
    })
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn not(a: &Formula) -> Formula {
    Formula::not(a.clone())
}

struct Engine {
    next_hyp: usize,
    /// Remaining tableau expansions before giving up.
    budget: usize,
}

impl Engine {
    fn fresh(&mut self) -> usize {
        self.next_hyp += 1;
        self.next_hyp
    }

    fn identity(&self, a: &Formula) -> Pf {
        let aa = imp(a, a);
        let k1 = ax(SchemaId::K, imp(a, &imp(&aa, a)));
        let s = ax(SchemaId::S, imp(&imp(a, &imp(&aa, a)), &imp(&imp(a, &aa), &aa)));
        let k2 = ax(SchemaId::K, imp(a, &aa));
        mp(&k2, &mp(&k1, &s))
    }

    /// Proof of `h -> concl(p)` with hypothesis `id` (stating `h`) discharged.
    fn discharge(&self, id: usize, h: &Formula, p: &Pf) -> Pf {
        let mut uses: HashMap<*const Proof, bool> = HashMap::default();
        let mut memo: HashMap<*const Proof, Pf> = HashMap::default();
        self.discharge_rec(id, h, p, &mut uses, &mut memo)
    }

    fn discharge_rec(
        &self,
        id: usize,
        h: &Formula,
        p: &Pf,
        uses: &mut HashMap<*const Proof, bool>,
        memo: &mut HashMap<*const Proof, Pf>,
    ) -> Pf {
        let key = Rc::as_ptr(p);
        if let Some(done) = memo.get(&key) {
            return done.clone();
        }
        let out = if !uses_hyp(id, p, uses) {
            mp(p, &ax(SchemaId::K, imp(&p.concl, &imp(h, &p.concl))))
        } else {
            match &p.node {
                Node::Leaf(Leaf::Hyp(_)) => self.identity(h),
                Node::Leaf(_) => unreachable!("only the hypothesis leaf uses it"),
                Node::Mp(minor, major) => {
                    let a = &minor.concl;
                    let b = &p.concl;
                    let ha = self.discharge_rec(id, h, minor, uses, memo);
                    let hab = self.discharge_rec(id, h, major, uses, memo);
                    let s = ax(
                        SchemaId::S,
                        imp(&imp(h, &imp(a, b)), &imp(&imp(h, a), &imp(h, b))),
                    );
                    mp(&ha, &mp(&hab, &s))
                }
            }
        };
        memo.insert(key, out.clone());
        out
    }

    /// From `~A` and `A`, any `C`.
    fn efq(&self, not_a: &Pf, a: &Pf, c: &Formula) -> Pf {
        let na = &not_a.concl;
        let af = &a.concl;
        let k = ax(SchemaId::K, imp(na, &imp(&not(c), na)));
        let neg = ax(SchemaId::Neg, imp(&imp(&not(c), na), &imp(af, c)));
        mp(a, &mp(&mp(not_a, &k), &neg))
    }

    /// `~~A -> A` as a proof.
    fn dne_imp(&self, a: &Formula) -> Pf {
        let na = not(a);
        let nna = not(&na);
        let nnna = not(&nna);
        let nnnna = not(&nnna);
        // ~~A -> (~~~~A -> ~~A)
        let k = ax(SchemaId::K, imp(&nna, &imp(&nnnna, &nna)));
        let neg1 = ax(SchemaId::Neg, imp(&imp(&nnnna, &nna), &imp(&na, &nnna)));
        let neg2 = ax(SchemaId::Neg, imp(&imp(&na, &nnna), &imp(&nna, a)));
        // Under hypothesis ~~A, then discharged.
        let id = usize::MAX;
        let h = hyp(id, nna.clone());
        let body = mp(&mp(&mp(&h, &k), &neg1), &neg2);
        let a_from_h = mp(&h, &body);
        self.discharge(id, &nna, &a_from_h)
    }

    fn dne(&self, p: &Pf) -> Pf {
        let Formula::Not(inner) = &p.concl else { unreachable!() };
        let Formula::Not(a) = &**inner else { unreachable!() };
        mp(p, &self.dne_imp(a))
    }

    /// `A` to `~~A`.
    fn dni(&self, p: &Pf) -> Pf {
        let a = &p.concl;
        let na = not(a);
        let nnna = not(&not(&na));
        // ~~~A -> ~A
        let dne = self.dne_imp(&na);
        let neg = ax(SchemaId::Neg, imp(&imp(&nnna, &na), &imp(a, &not(&na))));
        mp(p, &mp(&dne, &neg))
    }

    /// From `~A -> false`, `A`.
    fn classical(&mut self, p: &Pf, a: &Formula) -> Pf {
        let na = not(a);
        let aa = imp(a, a);
        let id = self.fresh();
        let h = hyp(id, na.clone());
        let bottom = mp(&h, p);
        let bot = ax(SchemaId::Bot, imp(&Formula::Bottom, &not(&aa)));
        let naa = mp(&bottom, &bot);
        let discharged = self.discharge(id, &na, &naa);
        let neg = ax(SchemaId::Neg, imp(&imp(&na, &not(&aa)), &imp(&aa, a)));
        mp(&self.identity(a), &mp(&discharged, &neg))
    }

    /// From `X -> Y`, `~Y -> ~X`.
    fn contrapose(&mut self, p: &Pf) -> Pf {
        let (x, y) = p.concl.as_implies().expect("implication");
        let (x, y) = (x.clone(), y.clone());
        let nnx = not(&not(&x));
        let id = self.fresh();
        let h = hyp(id, nnx.clone());
        let yy = mp(&self.dne(&h), p);
        let nny = self.dni(&yy);
        let d = self.discharge(id, &nnx, &nny);
        let neg = ax(SchemaId::Neg, imp(&imp(&nnx, &not(&not(&y))), &imp(&not(&y), &not(&x))));
        mp(&d, &neg)
    }

    /// Derives `false` from the facts, or reports that a branch stays open.
    fn refute(&mut self, facts: Vec<Pf>) -> Result<Option<Pf>, TransformError> {
        if self.budget == 0 {
            return Err(TransformError::TautExpansionOverflow);
        }
        self.budget -= 1;
        let mut facts = facts;
        let mut seen: HashSet<Formula> = facts.iter().map(|p| p.concl.clone()).collect();
        // Non-branching expansion to a fixpoint.
        let mut i = 0;
        while i < facts.len() {
            let p = facts[i].clone();
            i += 1;
            let mut add = |q: Pf, facts: &mut Vec<Pf>| {
                if seen.insert(q.concl.clone()) {
                    facts.push(q);
                }
            };
            match &p.concl {
                Formula::And(a, b) => {
                    add(mp(&p, &ax(SchemaId::And1, imp(&p.concl, a))), &mut facts);
                    add(mp(&p, &ax(SchemaId::And2, imp(&p.concl, b))), &mut facts);
                }
                Formula::Iff(a, b) => {
                    add(mp(&p, &ax(SchemaId::Iff1, imp(&p.concl, &imp(a, b)))), &mut facts);
                    add(mp(&p, &ax(SchemaId::Iff2, imp(&p.concl, &imp(b, a)))), &mut facts);
                }
                Formula::Not(inner) => match &**inner {
                    Formula::Not(_) => add(self.dne(&p), &mut facts),
                    Formula::Or(a, b) => {
                        let or1 = ax(SchemaId::Or1, imp(a, inner));
                        let or2 = ax(SchemaId::Or2, imp(b, inner));
                        add(mp(&p, &self.contrapose(&or1)), &mut facts);
                        add(mp(&p, &self.contrapose(&or2)), &mut facts);
                    }
                    Formula::Implies(a, b) => {
                        // ~(A -> B) gives ~B via B -> (A -> B), and A classically.
                        let k = ax(SchemaId::K, imp(b, inner));
                        add(mp(&p, &self.contrapose(&k)), &mut facts);
                        let id1 = self.fresh();
                        let id2 = self.fresh();
                        let h_na = hyp(id1, not(a));
                        let h_a = hyp(id2, (**a).clone());
                        let got_b = self.efq(&h_na, &h_a, b);
                        let a_b = self.discharge(id2, a, &got_b);
                        let bottom = self.efq(&p, &a_b, &Formula::Bottom);
                        let na_bot = self.discharge(id1, &not(a), &bottom);
                        add(self.classical(&na_bot, a), &mut facts);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        // Closure.
        let mut by_formula: HashMap<&Formula, &Pf> = HashMap::default();
        for p in &facts {
            by_formula.insert(&p.concl, p);
        }
        if let Some(p) = by_formula.get(&Formula::Bottom) {
            return Ok(Some((*p).clone()));
        }
        for p in &facts {
            if let Formula::Not(a) = &p.concl {
                if let Some(q) = by_formula.get(&**a) {
                    return Ok(Some(self.efq(p, q, &Formula::Bottom)));
                }
            }
        }
        // Modus ponens shortcut before branching.
        for p in &facts {
            if let Formula::Implies(a, b) = &p.concl {
                if !seen.contains(&**b) {
                    if let Some(q) = by_formula.get(&**a) {
                        let mut next = facts.clone();
                        next.push(mp(q, p));
                        return self.refute(next);
                    }
                }
            }
        }
        // Branching.
        for p in &facts {
            match &p.concl {
                Formula::Or(a, b) if !seen.contains(&**a) && !seen.contains(&**b) => {
                    let Some(left) = self.branch(&facts, a)? else { return Ok(None) };
                    let Some(right) = self.branch(&facts, b)? else { return Ok(None) };
                    let bot = Formula::Bottom;
                    let or3 = ax(
                        SchemaId::Or3,
                        imp(&imp(a, &bot), &imp(&imp(b, &bot), &imp(&p.concl, &bot))),
                    );
                    return Ok(Some(mp(p, &mp(&right, &mp(&left, &or3)))));
                }
                Formula::Implies(a, b) if !seen.contains(&**b) && !seen.contains(&not(a)) => {
                    let Some(refuted) = self.branch(&facts, &not(a))? else { return Ok(None) };
                    let got_a = self.classical(&refuted, a);
                    let mut next = facts.clone();
                    next.push(got_a);
                    return self.refute(next);
                }
                Formula::Not(inner) => match &**inner {
                    Formula::And(a, b) if !seen.contains(&not(a)) && !seen.contains(&not(b)) => {
                        let Some(ra) = self.branch(&facts, &not(a))? else { return Ok(None) };
                        let Some(rb) = self.branch(&facts, &not(b))? else { return Ok(None) };
                        let pa = self.classical(&ra, a);
                        let pb = self.classical(&rb, b);
                        let and3 = ax(SchemaId::And3, imp(a, &imp(b, inner)));
                        let conj = mp(&pb, &mp(&pa, &and3));
                        return Ok(Some(self.efq(p, &conj, &Formula::Bottom)));
                    }
                    Formula::Iff(a, b) if !seen.contains(&not(&imp(a, b))) && !seen.contains(&not(&imp(b, a))) => {
                        let ab = imp(a, b);
                        let ba = imp(b, a);
                        let Some(r1) = self.branch(&facts, &not(&ab))? else { return Ok(None) };
                        let Some(r2) = self.branch(&facts, &not(&ba))? else { return Ok(None) };
                        let p1 = self.classical(&r1, &ab);
                        let p2 = self.classical(&r2, &ba);
                        let iff3 = ax(SchemaId::Iff3, imp(&ab, &imp(&ba, inner)));
                        let both = mp(&p2, &mp(&p1, &iff3));
                        return Ok(Some(self.efq(p, &both, &Formula::Bottom)));
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        Ok(None)
    }

    /// Refutes `facts + extra`, returning `extra -> false`.
    fn branch(&mut self, facts: &[Pf], extra: &Formula) -> Result<Option<Pf>, TransformError> {
        let id = self.fresh();
        let mut next = facts.to_vec();
        next.push(hyp(id, extra.clone()));
        Ok(self.refute(next)?.map(|p| self.discharge(id, extra, &p)))
    }
}

fn uses_hyp(id: usize, p: &Pf, memo: &mut HashMap<*const Proof, bool>) -> bool {
    let key = Rc::as_ptr(p);
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let v = match &p.node {
        Node::Leaf(Leaf::Hyp(h)) => *h == id,
        Node::Leaf(_) => false,
        Node::Mp(a, b) => uses_hyp(id, a, memo) || uses_hyp(id, b, memo),
    };
    memo.insert(key, v);
    v
}

fn emit(b: &mut Builder, p: &Pf, memo: &mut HashMap<*const Proof, usize>) -> Result<usize, TransformError> {
    let key = Rc::as_ptr(p);
    if let Some(i) = memo.get(&key) {
        return Ok(*i);
    }
    let idx = match &p.node {
        Node::Leaf(Leaf::Step(i)) => *i,
        Node::Leaf(Leaf::Ax(s)) => b.ax(*s, p.concl.clone())?,
        Node::Leaf(Leaf::Hyp(_)) => return Err(TransformError::Internal("undischarged hypothesis".into())),
        Node::Mp(minor, major) => {
            let i = emit(b, minor, memo)?;
            let j = emit(b, major, memo)?;
            b.mp(i, j)?
        }
    };
    memo.insert(key, idx);
    Ok(idx)
}

pub const TABLEAU_BUDGET: usize = 20_000;

fn implication_parts(b: &Builder, idx: usize) -> Result<(Formula, Formula), TransformError> {
    b.formula(idx)
        .as_implies()
        .map(|(l, r)| (l.clone(), r.clone()))
        .ok_or_else(|| TransformError::Internal(format!("step {idx} is not an implication")))
}

/// `A -> C` from `A -> B` and `B -> C`.
fn chain(b: &mut Builder, first: usize, second: usize) -> Result<usize, TransformError> {
    let (a, _) = implication_parts(b, first)?;
    let (_, c) = implication_parts(b, second)?;
    let bc = b.formula(second).clone();
    let ab = b.formula(first).clone();
    let k = b.ax(SchemaId::K, imp(&bc, &imp(&a, &bc)))?;
    let lifted = b.mp(second, k)?;
    let s = b.ax(SchemaId::S, imp(&imp(&a, &bc), &imp(&ab, &imp(&a, &c))))?;
    let dist = b.mp(lifted, s)?;
    b.mp(first, dist)
}

/// `X -> Z` from `X -> (Y -> Z)` and `Y`.
fn feed(b: &mut Builder, fun: usize, arg: usize) -> Result<usize, TransformError> {
    let (x, yz) = implication_parts(b, fun)?;
    let y = b.formula(arg).clone();
    let k = b.ax(SchemaId::K, imp(&y, &imp(&x, &y)))?;
    let xy = b.mp(arg, k)?;
    let (_, z) = yz
        .as_implies()
        .map(|(l, r)| (l.clone(), r.clone()))
        .ok_or_else(|| TransformError::Internal("feed needs a curried implication".into()))?;
    let s = b.ax(SchemaId::S, imp(&imp(&x, &yz), &imp(&imp(&x, &y), &imp(&x, &z))))?;
    let dist = b.mp(fun, s)?;
    b.mp(xy, dist)
}

/// `A -> B` from `A -> (A -> B)`.
fn contract(b: &mut Builder, idx: usize) -> Result<usize, TransformError> {
    let (a, ab) = implication_parts(b, idx)?;
    let (_, bb) = ab
        .as_implies()
        .map(|(l, r)| (l.clone(), r.clone()))
        .ok_or_else(|| TransformError::Internal("contract needs a curried implication".into()))?;
    let s = b.ax(SchemaId::S, imp(&imp(&a, &ab), &imp(&imp(&a, &a), &imp(&a, &bb))))?;
    let dist = b.mp(idx, s)?;
    let id = b.identity(&a)?;
    b.mp(id, dist)
}

/// `~~x -> x`.
fn double_negation_out(b: &mut Builder, x: &Formula) -> Result<usize, TransformError> {
    let nx = not(x);
    let nnx = not(&nx);
    let nnnnx = not(&not(&nnx));
    let k = b.ax(SchemaId::K, imp(&nnx, &imp(&nnnnx, &nnx)))?;
    let n1 = b.ax(SchemaId::Neg, imp(&imp(&nnnnx, &nnx), &imp(&nx, &not(&nnx))))?;
    let n2 = b.ax(SchemaId::Neg, imp(&imp(&nx, &not(&nnx)), &imp(&nnx, x)))?;
    let m = chain(b, k, n1)?;
    let m = chain(b, m, n2)?;
    contract(b, m)
}

/// `x -> ~~x`.
fn double_negation_in(b: &mut Builder, x: &Formula) -> Result<usize, TransformError> {
    let nx = not(x);
    let nnx = not(&nx);
    let out = double_negation_out(b, &nx)?;
    let n = b.ax(SchemaId::Neg, imp(&imp(&not(&nnx), &nx), &imp(x, &nnx)))?;
    b.mp(out, n)
}

/// `(a -> b) -> (~b -> ~a)` in `b`, hypothesis-free.
pub fn contrapose_in(bld: &mut Builder, a: &Formula, b: &Formula) -> Result<usize, TransformError> {
    let (na, nb) = (not(a), not(b));
    let (nna, nnb) = (not(&na), not(&nb));
    let out = double_negation_out(bld, a)?;
    let into = double_negation_in(bld, b)?;
    // (a -> b) -> (a -> ~~b)
    let k = bld.ax(SchemaId::K, imp(&imp(b, &nnb), &imp(a, &imp(b, &nnb))))?;
    let lifted = bld.mp(into, k)?;
    let s = bld.ax(SchemaId::S, imp(&imp(a, &imp(b, &nnb)), &imp(&imp(a, b), &imp(a, &nnb))))?;
    let post = bld.mp(lifted, s)?;
    // (a -> ~~b) -> (~~a -> ~~b)
    let a_nnb = imp(a, &nnb);
    let k = bld.ax(SchemaId::K, imp(&a_nnb, &imp(&nna, &a_nnb)))?;
    let s = bld.ax(SchemaId::S, imp(&imp(&nna, &a_nnb), &imp(&imp(&nna, a), &imp(&nna, &nnb))))?;
    let pre = chain(bld, k, s)?;
    let pre = feed(bld, pre, out)?;
    let both = chain(bld, post, pre)?;
    let neg = bld.ax(SchemaId::Neg, imp(&imp(&nna, &nnb), &imp(&nb, &na)))?;
    chain(bld, both, neg)
}

/// A hypothesis-free derivation of `(a -> b) -> (~b -> ~a)`.
pub fn contraposition(logic: Logic, a: &Formula, b: &Formula) -> Result<Derivation, TransformError> {
    let mut bld = Builder::new(logic, ConstantSpec::schematic());
    let idx = contrapose_in(&mut bld, a, b)?;
    Ok(bld.finish(idx))
}

#[derive(Clone)]
enum Link {
    Premise(usize),
    Contrapositive(usize),
    DoubleNegation,
}

const CHAIN_DEPTH: usize = 4;

/// Short proofs of `L -> R` by chaining premises, their contrapositives and
/// double negation elimination. The tableau route proves these at great length.
fn shortcut(b: &mut Builder, premises: &[usize], goal: &Formula) -> Result<Option<usize>, TransformError> {
    let Some((left, right)) = goal.as_implies() else { return Ok(None) };
    let arrows: Vec<(usize, Formula, Formula)> = premises
        .iter()
        .filter_map(|i| b.formula(*i).as_implies().map(|(l, r)| (*i, l.clone(), r.clone())))
        .collect();
    let successors = |node: &Formula| {
        let mut out = Vec::new();
        for (i, l, r) in &arrows {
            if l == node {
                out.push((Link::Premise(*i), r.clone()));
            }
            if *node == not(r) {
                out.push((Link::Contrapositive(*i), not(l)));
            }
        }
        if let Formula::Not(inner) = node {
            if let Formula::Not(x) = &**inner {
                out.push((Link::DoubleNegation, (**x).clone()));
            }
        }
        out
    };
    let mut frontier = vec![(left.clone(), Vec::<(Link, Formula)>::new())];
    let mut path = None;
    'search: for _ in 0..CHAIN_DEPTH {
        let mut next = Vec::new();
        for (node, links) in frontier {
            for (link, to) in successors(&node) {
                let mut longer = links.clone();
                longer.push((link, to.clone()));
                if to == *right {
                    path = Some(longer);
                    break 'search;
                }
                next.push((to, longer));
            }
        }
        frontier = next;
    }
    let Some(path) = path else { return Ok(None) };
    let mut from = left.clone();
    let mut acc: Option<usize> = None;
    for (link, to) in path {
        let idx = match link {
            Link::Premise(i) => i,
            Link::Contrapositive(i) => {
                let (l, r) = implication_parts(b, i)?;
                let c = contrapose_in(b, &l, &r)?;
                b.mp(i, c)?
            }
            Link::DoubleNegation => double_negation_out(b, &to)?,
        };
        acc = Some(match acc {
            None => idx,
            Some(prev) => chain(b, prev, idx)?,
        });
        from = to;
    }
    debug_assert_eq!(&from, right);
    Ok(acc)
}

/// Proves `goal` from the given builder steps with classical axioms and modus
/// ponens only. Fails if `goal` is not a tautological consequence.
pub fn prove(b: &mut Builder, premises: &[usize], goal: &Formula) -> Result<usize, TransformError> {
    if let Some(i) = b.lookup(goal) {
        return Ok(i);
    }
    if let Some(i) = shortcut(b, premises, goal)? {
        return Ok(i);
    }
    let mut engine = Engine {
        next_hyp: 0,
        budget: TABLEAU_BUDGET,
    };
    let mut facts: Vec<Pf> = premises.iter().map(|i| step(*i, b.formula(*i).clone())).collect();
    let id = engine.fresh();
    facts.push(hyp(id, not(goal)));
    let refuted = engine
        .refute(facts)?
        .ok_or_else(|| TransformError::Internal(format!("{goal} is not a tautological consequence")))?;
    let discharged = engine.discharge(id, &not(goal), &refuted);
    let proof = engine.classical(&discharged, goal);
    emit(b, &proof, &mut HashMap::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{ConstantSpec, Logic};
    use crate::kernel::{check_with, CheckOptions};
    use crate::textio::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn proves(premises: &[&str], goal: &str) {
        let mut b = Builder::new(Logic::Folpb, ConstantSpec::schematic());
        let hyps: Vec<Formula> = premises.iter().map(|p| f(p)).collect();
        let mut b2 = Builder::with_hypotheses(Logic::Folpb, ConstantSpec::schematic(), hyps.clone());
        std::mem::swap(&mut b, &mut b2);
        let idx: Vec<usize> = (1..=hyps.len()).map(|k| b.hyp(k)).collect();
        let g = prove(&mut b, &idx, &f(goal)).unwrap();
        let d = b.finish(g);
        let report = check_with(&d, CheckOptions { allow_taut: false });
        assert!(report.accepted(), "{goal}: {:?}", report.verdict);
        assert_eq!(d.conclusion().unwrap(), &f(goal));
    }

    #[test]
    fn classic_tautologies() {
        proves(&[], "A -> A");
        proves(&[], "(A -> B) -> (~B -> ~A)");
        proves(&[], "A | ~A");
        proves(&[], "~~A -> A");
        proves(&[], "(A & B) -> (B & A)");
        proves(&[], "((A -> B) -> A) -> A");
        proves(&[], "(A <-> B) -> (B <-> A)");
        proves(&[], "false -> A");
        proves(&[], "~false");
        proves(&[], "~(A & ~A)");
        proves(&[], "(A | B) & ~A -> B");
    }

    #[test]
    fn consequences() {
        proves(&["A -> B", "B -> C"], "A -> C");
        proves(&["A", "~A"], "Q");
        proves(&["forall x. P(x) -> Q", "Q -> [t]{} R"], "forall x. P(x) -> [t]{} R");
        proves(&["~[t]{x} P(x) -> [s]{x} Q"], "~[s]{x} Q -> [t]{x} P(x)");
    }

    #[test]
    fn rejects_non_consequence() {
        let mut b = Builder::new(Logic::Folpb, ConstantSpec::schematic());
        assert!(prove(&mut b, &[], &f("A -> B")).is_err());
    }
}

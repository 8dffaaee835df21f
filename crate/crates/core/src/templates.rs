//! Templates: propositional modal shapes, their instantiation sets, and the
//! constructive transformers that move between members.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::axioms::{ConstantSpec, Logic, SchemaId};
use crate::kernel::Derivation;
use crate::syntax::{Formula, Term, Var, VarSet};
use crate::transform::{self, converse_buridan, internalize, jt45_barcan, Builder, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Template {
    /// Positional letter `p<i>`.
    Letter(usize),
    Not(Box<Template>),
    And(Box<Template>, Box<Template>),
    Or(Box<Template>, Box<Template>),
    Box(Box<Template>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template parse error: {0}")]
    Parse(String),
    #[error("letter p{0} occurs more than once")]
    RepeatedLetter(usize),
    #[error("template uses letter p{letter} but only {given} formulas were given")]
    ArityMismatch { letter: usize, given: usize },
    #[error("template is not positive")]
    NotPositive,
    #[error("template is not disjunctive")]
    NotDisjunctive,
    #[error("{0} is not a member of the instantiation set")]
    MemberCheckFailed(Formula),
    #[error("{var} is free in {formula}")]
    FreeVarViolation { var: Var, formula: Formula },
    #[error("at least one member is required")]
    NoMembers,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// A constructed member together with a derivation of the implication that
/// leads to it.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub theta: Formula,
    pub derivation: Derivation,
}

impl Template {
    pub fn letter(i: usize) -> Template {
        Template::Letter(i)
    }

    pub fn not(a: Template) -> Template {
        Template::Not(Box::new(a))
    }

    pub fn and(a: Template, b: Template) -> Template {
        Template::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Template, b: Template) -> Template {
        Template::Or(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Template) -> Template {
        Template::Box(Box::new(a))
    }

    /// Parses `pN | ~F | (F & F) | (F | F) | box F`, rejecting repeated letters.
    pub fn parse(text: &str) -> Result<Template, TemplateError> {
        let mut p = TemplateParser { src: text.as_bytes(), pos: 0 };
        let t = p.template()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(TemplateError::Parse(format!("trailing input at offset {}", p.pos)));
        }
        t.validate()?;
        Ok(t)
    }

    /// Every letter occurs at most once.
    pub fn validate(&self) -> Result<(), TemplateError> {
        let mut seen = BTreeSet::new();
        for l in self.letter_list() {
            if !seen.insert(l) {
                return Err(TemplateError::RepeatedLetter(l));
            }
        }
        Ok(())
    }

    fn letter_list(&self) -> Vec<usize> {
        match self {
            Template::Letter(i) => vec![*i],
            Template::Not(a) | Template::Box(a) => a.letter_list(),
            Template::And(a, b) | Template::Or(a, b) => {
                let mut v = a.letter_list();
                v.extend(b.letter_list());
                v
            }
        }
    }

    pub fn letters(&self) -> BTreeSet<usize> {
        self.letter_list().into_iter().collect()
    }

    pub fn contains_letter(&self, i: usize) -> bool {
        self.letter_list().contains(&i)
    }

    /// Number of connective and box nodes.
    pub fn degree(&self) -> usize {
        match self {
            Template::Letter(_) => 0,
            Template::Not(a) | Template::Box(a) => 1 + a.degree(),
            Template::And(a, b) | Template::Or(a, b) => 1 + a.degree() + b.degree(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Template::Letter(_) => true,
            Template::Not(_) => false,
            Template::Box(a) => a.is_positive(),
            Template::And(a, b) | Template::Or(a, b) => a.is_positive() && b.is_positive(),
        }
    }

    pub fn is_disjunctive(&self) -> bool {
        match self {
            Template::Letter(_) => true,
            Template::Not(_) | Template::And(..) => false,
            Template::Box(a) => a.is_disjunctive(),
            Template::Or(a, b) => a.is_disjunctive() && b.is_disjunctive(),
        }
    }

    pub fn check_arity(&self, given: usize) -> Result<(), TemplateError> {
        match self.letter_list().into_iter().find(|l| *l >= given) {
            Some(letter) => Err(TemplateError::ArityMismatch { letter, given }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::Letter(i) => write!(f, "p{i}"),
            Template::Not(a) => write!(f, "~{a}"),
            Template::And(a, b) => write!(f, "({a} & {b})"),
            Template::Or(a, b) => write!(f, "({a} | {b})"),
            Template::Box(a) => write!(f, "box {a}"),
        }
    }
}

struct TemplateParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TemplateParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, what: &str) -> Result<T, TemplateError> {
        Err(TemplateError::Parse(format!("expected {what} at offset {}", self.pos)))
    }

    fn template(&mut self) -> Result<Template, TemplateError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        match rest.first() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Template::not(self.template()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.template()?;
                self.skip_ws();
                let op = self.src.get(self.pos).copied();
                if !matches!(op, Some(b'&') | Some(b'|')) {
                    return self.err("`&` or `|`");
                }
                self.pos += 1;
                let b = self.template()?;
                self.skip_ws();
                if self.src.get(self.pos) != Some(&b')') {
                    return self.err("`)`");
                }
                self.pos += 1;
                Ok(if op == Some(b'&') { Template::and(a, b) } else { Template::or(a, b) })
            }
            Some(b'p') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match digits.parse() {
                    Ok(i) => Ok(Template::Letter(i)),
                    Err(_) => self.err("letter index"),
                }
            }
            _ if rest.starts_with(b"box") && !rest.get(3).is_some_and(|c| c.is_ascii_alphanumeric()) => {
                self.pos += 3;
                Ok(Template::boxed(self.template()?))
            }
            _ => self.err("template"),
        }
    }
}

/// Witness variables occurring in `f`.
pub fn wit(f: &Formula) -> VarSet {
    f.witness_vars()
}

/// Structural membership of `psi` in the instantiation set of `template`
/// over `phis`.
pub fn member(template: &Template, phis: &[Formula], psi: &Formula) -> Result<bool, TemplateError> {
    template.check_arity(phis.len())?;
    Ok(member_rec(template, phis, psi))
}

fn member_rec(template: &Template, phis: &[Formula], psi: &Formula) -> bool {
    match (template, psi) {
        (Template::Letter(i), _) => phis[*i] == *psi,
        (Template::Not(g), Formula::Not(a)) => member_rec(g, phis, a),
        (Template::And(g, h), Formula::And(a, b)) | (Template::Or(g, h), Formula::Or(a, b)) => {
            member_rec(g, phis, a) && member_rec(h, phis, b)
        }
        (Template::Box(g), Formula::Just(_, xs, body)) => *xs == wit(body) && member_rec(g, phis, body),
        _ => false,
    }
}

fn require_member(template: &Template, phis: &[Formula], psi: &Formula) -> Result<(), TemplateError> {
    if member(template, phis, psi)? {
        Ok(())
    } else {
        Err(TemplateError::MemberCheckFailed(psi.clone()))
    }
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn new_builder(logic: Logic) -> Builder {
    Builder::new(logic, ConstantSpec::schematic())
}

fn last_of(b: &mut Builder, d: &Derivation) -> Result<usize, TemplateError> {
    let idx = b.embed(d)?;
    idx.last()
        .copied()
        .ok_or_else(|| TransformError::Internal("empty sub-derivation".into()).into())
}

fn identity(logic: Logic, a: &Formula) -> Result<Derivation, TemplateError> {
    let mut b = new_builder(logic);
    let i = b.identity(a)?;
    Ok(b.finish(i))
}

/// Given `[t]{X} a` proved as `from` (an implication `lhs -> [t]{X} a`)
/// and a theorem `a -> theta'`, derives `lhs -> [(s . t)]{Y} theta'` with
/// `Y` the witnesses of `theta'`. Returns the new index and the term.
fn lift_through(
    b: &mut Builder,
    from: usize,
    inner: &Derivation,
) -> Result<(usize, Formula), TemplateError> {
    let (lhs, rhs) = b
        .formula(from)
        .as_implies()
        .map(|(l, r)| (l.clone(), r.clone()))
        .ok_or_else(|| TransformError::Internal("expected an implication".into()))?;
    let Formula::Just(t, xs, _) = &rhs else {
        return Err(TransformError::Internal("expected a justification assertion".into()).into());
    };
    let lifted = internalize(inner)?;
    let s_idx = last_of(b, &lifted.derivation)?;
    let s_idx = b.widen(s_idx, xs)?;
    let step = b.app_implication(s_idx, t)?;
    let Some((_, target)) = b.formula(step).as_implies().map(|(l, r)| (l.clone(), r.clone())) else {
        unreachable!("B2 gives an implication")
    };
    let Formula::Just(st, _, theta_inner) = &target else { unreachable!() };
    let y = wit(theta_inner);
    // Retarget through an auxiliary hypothesis-free chain: prove
    // `[st]{X} theta' -> [st]{Y} theta'` with A3/A2 steps and TAUT.
    let theta = Formula::just((**st).clone(), y.clone(), (**theta_inner).clone());
    let chain = retarget_implication(b, &target, &y)?;
    let out = b.taut(&[from, step, chain], imp(&lhs, &theta))?;
    Ok((out, theta))
}

/// `[t]{X} A -> [t]{Y} A` by A3 then A2 steps.
fn retarget_implication(b: &mut Builder, start: &Formula, target: &VarSet) -> Result<usize, TemplateError> {
    let Formula::Just(t, xs, a) = start else {
        return Err(TransformError::Internal("expected a justification assertion".into()).into());
    };
    let mut steps = Vec::new();
    let mut cur = xs.clone();
    for y in target.difference(xs) {
        let mut next = cur.clone();
        next.insert(y.clone());
        let f = imp(&Formula::just((**t).clone(), cur.clone(), (**a).clone()), &Formula::just((**t).clone(), next.clone(), (**a).clone()));
        steps.push(b.ax(SchemaId::A3, f)?);
        cur = next;
    }
    for y in xs.difference(target) {
        let mut next = cur.clone();
        next.remove(y);
        let f = imp(&Formula::just((**t).clone(), cur.clone(), (**a).clone()), &Formula::just((**t).clone(), next.clone(), (**a).clone()));
        steps.push(b.ax(SchemaId::A2, f)?);
        cur = next;
    }
    let goal = imp(start, &Formula::just((**t).clone(), target.clone(), (**a).clone()));
    if steps.is_empty() {
        return Ok(b.identity(start)?);
    }
    Ok(b.taut(&steps, goal)?)
}

/// From a theorem `chi -> psi` and a member `phi` of `F(phis, chi)`, a member
/// `theta` of `F(phis, psi)` with `phi -> theta` derived. The last letter
/// `p<phis.len()>` plays the role of the replaced formula.
pub fn semi_replacement(
    template: &Template,
    implication: &Derivation,
    phis: &[Formula],
    phi: &Formula,
) -> Result<Transformed, TemplateError> {
    if !template.is_positive() {
        return Err(TemplateError::NotPositive);
    }
    transform::require_theorem(implication)?;
    let (chi, psi) = implication
        .conclusion()
        .and_then(Formula::as_implies)
        .map(|(a, b)| (a.clone(), b.clone()))
        .ok_or_else(|| TransformError::PreconditionViolation("conclusion must be an implication".into()))?;
    let mut with_chi = phis.to_vec();
    with_chi.push(chi);
    require_member(template, &with_chi, phi)?;
    let mut with_psi = phis.to_vec();
    with_psi.push(psi);
    let q = phis.len();
    let out = semi_rec(template, q, implication, phi)?;
    debug_assert!(member(template, &with_psi, &out.theta)?);
    Ok(out)
}

fn semi_rec(template: &Template, q: usize, implication: &Derivation, phi: &Formula) -> Result<Transformed, TemplateError> {
    let logic = implication.logic;
    if !template.contains_letter(q) {
        return Ok(Transformed {
            theta: phi.clone(),
            derivation: identity(logic, phi)?,
        });
    }
    match (template, phi) {
        (Template::Letter(_), _) => {
            let theta = implication.conclusion().and_then(Formula::as_implies).expect("checked").1.clone();
            Ok(Transformed {
                theta,
                derivation: implication.clone(),
            })
        }
        (Template::Or(g, h), Formula::Or(a, c)) | (Template::And(g, h), Formula::And(a, c)) => {
            let left = semi_rec(g, q, implication, a)?;
            let right = semi_rec(h, q, implication, c)?;
            let theta = match template {
                Template::Or(..) => Formula::or(left.theta.clone(), right.theta.clone()),
                _ => Formula::and(left.theta.clone(), right.theta.clone()),
            };
            let mut b = new_builder(logic);
            let l = last_of(&mut b, &left.derivation)?;
            let r = last_of(&mut b, &right.derivation)?;
            let out = b.taut(&[l, r], imp(phi, &theta))?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        (Template::Box(g), Formula::Just(_, _, body)) => {
            let inner = semi_rec(g, q, implication, body)?;
            let mut b = new_builder(logic);
            let start = b.identity(phi)?;
            let (out, theta) = lift_through(&mut b, start, &inner.derivation)?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        _ => Err(TemplateError::MemberCheckFailed(phi.clone())),
    }
}

fn require_y_free(y: &Var, phis: &[Formula]) -> Result<(), TemplateError> {
    if !y.is_basic() {
        return Err(TransformError::PreconditionViolation(format!("{y} must be basic")).into());
    }
    match phis.iter().find(|f| f.free_vars().contains(y)) {
        Some(f) => Err(TemplateError::FreeVarViolation {
            var: y.clone(),
            formula: f.clone(),
        }),
        None => Ok(()),
    }
}

/// For a member `psi` of a disjunctive `F(phis)` with `y` not free in the
/// `phis`, a member `theta` with `exists y. psi -> theta` derived.
pub fn vacuous_quantification(
    logic: Logic,
    template: &Template,
    phis: &[Formula],
    psi: &Formula,
    y: &Var,
) -> Result<Transformed, TemplateError> {
    if !template.is_disjunctive() {
        return Err(TemplateError::NotDisjunctive);
    }
    require_y_free(y, phis)?;
    require_member(template, phis, psi)?;
    vacuous_rec(logic, template, psi, y)
}

fn vacuous_rec(logic: Logic, template: &Template, psi: &Formula, y: &Var) -> Result<Transformed, TemplateError> {
    let ex = Formula::exists(y.clone(), psi.clone());
    let mut b = new_builder(logic);
    match (template, psi) {
        (Template::Letter(_), _) => {
            let i = b.identity(psi)?;
            let g = b.gen(i, y);
            let ed = b.ax(SchemaId::Ed, imp(b.formula(g), &imp(&ex, psi)))?;
            let out = b.mp(g, ed)?;
            Ok(Transformed {
                theta: psi.clone(),
                derivation: b.finish(out),
            })
        }
        (Template::Or(g, h), Formula::Or(a, c)) => {
            let left = vacuous_rec(logic, g, a, y)?;
            let right = vacuous_rec(logic, h, c, y)?;
            let theta = Formula::or(left.theta.clone(), right.theta.clone());
            let l = last_of(&mut b, &left.derivation)?;
            let r = last_of(&mut b, &right.derivation)?;
            let ei_a = b.ax(SchemaId::Ei, imp(a, &Formula::exists(y.clone(), (**a).clone())))?;
            let ei_c = b.ax(SchemaId::Ei, imp(c, &Formula::exists(y.clone(), (**c).clone())))?;
            let body = b.taut(&[l, r, ei_a, ei_c], imp(psi, &theta))?;
            let gen = b.gen(body, y);
            let ed = b.ax(SchemaId::Ed, imp(b.formula(gen), &imp(&ex, &theta)))?;
            let out = b.mp(gen, ed)?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        (Template::Box(g), Formula::Just(t, xs, body)) => {
            let xy = {
                let mut s = xs.clone();
                s.insert(y.clone());
                s
            };
            let wide = Formula::just((**t).clone(), xy.clone(), (**body).clone());
            let a3 = b.ax(SchemaId::A3, imp(psi, &wide))?;
            let ex_wide = Formula::exists(y.clone(), wide.clone());
            let ei = b.ax(SchemaId::Ei, imp(&wide, &ex_wide))?;
            let chain = b.taut(&[a3, ei], imp(psi, &ex_wide))?;
            let gen = b.gen(chain, y);
            let ed = b.ax(SchemaId::Ed, imp(b.formula(gen), &imp(&ex, &ex_wide)))?;
            let lifted_ex = b.mp(gen, ed)?;
            let cb = converse_buridan(logic, t, xs, y, body)?;
            let cb_last = last_of(&mut b, &cb.derivation)?;
            let target = b.formula(cb_last).as_implies().expect("implication").1.clone();
            let start = b.taut(&[lifted_ex, cb_last], imp(&ex, &target))?;
            let inner = vacuous_rec(logic, g, body, y)?;
            let (out, theta) = lift_through(&mut b, start, &inner.derivation)?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        _ => Err(TemplateError::MemberCheckFailed(psi.clone())),
    }
}

/// For a member `psi` of a disjunctive `F(phis, phi(y))`, a member `theta`
/// of `F(phis, forall y. phi(y))` with `forall y. psi -> theta` derived.
pub fn generalized_barcan(
    logic: Logic,
    template: &Template,
    y: &Var,
    phi_y: &Formula,
    phis: &[Formula],
    psi: &Formula,
) -> Result<Transformed, TemplateError> {
    if !template.is_disjunctive() {
        return Err(TemplateError::NotDisjunctive);
    }
    require_y_free(y, phis)?;
    let mut all = phis.to_vec();
    all.push(phi_y.clone());
    require_member(template, &all, psi)?;
    genbarcan_rec(logic, template, phis.len(), y, psi)
}

fn genbarcan_rec(logic: Logic, template: &Template, q: usize, y: &Var, psi: &Formula) -> Result<Transformed, TemplateError> {
    let all = Formula::forall(y.clone(), psi.clone());
    let mut b = new_builder(logic);
    if !template.contains_letter(q) {
        let out = b.ax(SchemaId::Ui, imp(&all, psi))?;
        return Ok(Transformed {
            theta: psi.clone(),
            derivation: b.finish(out),
        });
    }
    match (template, psi) {
        (Template::Letter(_), _) => {
            let out = b.identity(&all)?;
            Ok(Transformed {
                theta: all,
                derivation: b.finish(out),
            })
        }
        (Template::Or(g, h), Formula::Or(a, c)) => {
            let q_left = g.contains_letter(q);
            let (with_q, without_q, qf, other) = if q_left { (g, h, a, c) } else { (h, g, c, a) };
            let general = genbarcan_rec(logic, with_q, q, y, qf)?;
            let vacuous = vacuous_rec(logic, without_q, other, y)?;
            let g_idx = last_of(&mut b, &general.derivation)?;
            let v_idx = last_of(&mut b, &vacuous.derivation)?;
            // forall y (A | B) -> (forall y A | exists y B), A the q side.
            let all_q = Formula::forall(y.clone(), (**qf).clone());
            let ex_other = Formula::exists(y.clone(), (**other).clone());
            let ui = b.ax(SchemaId::Ui, imp(&all, psi))?;
            let ei = b.ax(SchemaId::Ei, imp(other, &ex_other))?;
            let not_ex = Formula::not(ex_other.clone());
            let inner = b.taut(&[ui, ei], imp(&all, &imp(&not_ex, qf)))?;
            let gen = b.gen(inner, y);
            let ud1 = b.ax(
                SchemaId::Ud,
                imp(b.formula(gen), &imp(&all, &Formula::forall(y.clone(), imp(&not_ex, qf)))),
            )?;
            let step = b.mp(gen, ud1)?;
            let ud2 = b.ax(
                SchemaId::Ud,
                imp(&Formula::forall(y.clone(), imp(&not_ex, qf)), &imp(&not_ex, &all_q)),
            )?;
            let theta = if q_left {
                Formula::or(general.theta.clone(), vacuous.theta.clone())
            } else {
                Formula::or(vacuous.theta.clone(), general.theta.clone())
            };
            let out = b.taut(&[step, ud2, g_idx, v_idx], imp(&all, &theta))?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        (Template::Box(g), Formula::Just(t, xs, body)) => {
            let xy = {
                let mut s = xs.clone();
                s.insert(y.clone());
                s
            };
            let wide = Formula::just((**t).clone(), xy.clone(), (**body).clone());
            let all_wide = Formula::forall(y.clone(), wide.clone());
            let a3 = b.ax(SchemaId::A3, imp(psi, &wide))?;
            let ui = b.ax(SchemaId::Ui, imp(&all, psi))?;
            let chain = b.taut(&[a3, ui], imp(&all, &wide))?;
            let gen = b.gen(chain, y);
            let ud = b.ax(SchemaId::Ud, imp(b.formula(gen), &imp(&all, &all_wide)))?;
            let lifted_all = b.mp(gen, ud)?;
            let all_body = Formula::forall(y.clone(), (**body).clone());
            let barcan = match logic {
                Logic::Folpb => {
                    let bt = Term::bar((**t).clone());
                    b.ax(SchemaId::Bb, imp(&all_wide, &Formula::just(bt, xs.clone(), all_body.clone())))?
                }
                Logic::Fojt45 => {
                    let s = jt45_barcan(t, xs, y, body)?;
                    last_of(&mut b, &s.derivation)?
                }
            };
            let target = b.formula(barcan).as_implies().expect("implication").1.clone();
            let start = b.taut(&[lifted_all, barcan], imp(&all, &target))?;
            let inner = genbarcan_rec(logic, g, q, y, body)?;
            let (out, theta) = lift_through(&mut b, start, &inner.derivation)?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        _ => Err(TemplateError::MemberCheckFailed(psi.clone())),
    }
}

/// Left-nested disjunction `((a | b) | c)`.
pub fn disjunction(items: &[Formula]) -> Option<Formula> {
    let (first, rest) = items.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| Formula::or(acc, f.clone())))
}

/// For members `psis` of a disjunctive `F(phis)`, a member `theta` with
/// `(psi_1 | ... | psi_k) -> theta` derived (left-nested disjunction).
pub fn combine(logic: Logic, template: &Template, phis: &[Formula], psis: &[Formula]) -> Result<Transformed, TemplateError> {
    if !template.is_disjunctive() {
        return Err(TemplateError::NotDisjunctive);
    }
    if psis.is_empty() {
        return Err(TemplateError::NoMembers);
    }
    for psi in psis {
        require_member(template, phis, psi)?;
    }
    if psis.len() == 1 {
        return Ok(Transformed {
            theta: psis[0].clone(),
            derivation: identity(logic, &psis[0])?,
        });
    }
    combine_rec(logic, template, psis)
}

fn combine_rec(logic: Logic, template: &Template, psis: &[Formula]) -> Result<Transformed, TemplateError> {
    let disj = disjunction(psis).expect("non-empty");
    let mut b = new_builder(logic);
    match template {
        Template::Letter(_) => {
            let theta = psis[0].clone();
            let out = b.taut(&[], imp(&disj, &theta))?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        Template::Or(g, h) => {
            let (lefts, rights): (Vec<Formula>, Vec<Formula>) = psis
                .iter()
                .map(|p| match p {
                    Formula::Or(a, c) => ((**a).clone(), (**c).clone()),
                    _ => unreachable!("member checked"),
                })
                .unzip();
            let left = combine_rec(logic, g, &lefts)?;
            let right = combine_rec(logic, h, &rights)?;
            let theta = Formula::or(left.theta.clone(), right.theta.clone());
            let l = last_of(&mut b, &left.derivation)?;
            let r = last_of(&mut b, &right.derivation)?;
            let out = b.taut(&[l, r], imp(&disj, &theta))?;
            Ok(Transformed {
                theta,
                derivation: b.finish(out),
            })
        }
        Template::Box(g) => {
            let parts: Vec<(Term, VarSet, Formula)> = psis
                .iter()
                .map(|p| match p {
                    Formula::Just(t, xs, a) => ((**t).clone(), xs.clone(), (**a).clone()),
                    _ => unreachable!("member checked"),
                })
                .collect();
            let bodies: Vec<Formula> = parts.iter().map(|(_, _, a)| a.clone()).collect();
            let inner = combine_rec(logic, g, &bodies)?;
            let theta_inner = inner.theta.clone();
            let y = wit(&theta_inner);
            let mut applied = Vec::new();
            for (t, xs, a) in &parts {
                // a -> theta' on its own, then internalized.
                let mut sub = new_builder(logic);
                let ih = last_of(&mut sub, &inner.derivation)?;
                let each = sub.taut(&[ih], imp(a, &theta_inner))?;
                let lifted = internalize(&sub.finish(each))?;
                let s_idx = last_of(&mut b, &lifted.derivation)?;
                let s_idx = b.widen(s_idx, xs)?;
                let step = b.app_implication(s_idx, t)?;
                applied.push((Term::app(lifted.term.clone(), t.clone()), xs.clone(), step));
            }
            let sum = applied
                .iter()
                .map(|(u, _, _)| u.clone())
                .reduce(Term::sum)
                .expect("non-empty");
            let at_y = Formula::just(sum.clone(), y.clone(), theta_inner.clone());
            let mut per_member = Vec::new();
            for (i, (u, xs, step)) in applied.iter().enumerate() {
                let mut premises = vec![*step];
                // Climb from u_i to the full left-nested sum.
                let mut cur_term = u.clone();
                let mut prefix = applied[..=i].iter().map(|(u, _, _)| u.clone()).reduce(Term::sum).expect("non-empty");
                if i > 0 {
                    let f = imp(
                        &Formula::just(cur_term.clone(), xs.clone(), theta_inner.clone()),
                        &Formula::just(prefix.clone(), xs.clone(), theta_inner.clone()),
                    );
                    premises.push(b.ax(SchemaId::B3R, f)?);
                    cur_term = prefix.clone();
                }
                for (next, _, _) in &applied[i + 1..] {
                    prefix = Term::sum(prefix, next.clone());
                    let f = imp(
                        &Formula::just(cur_term.clone(), xs.clone(), theta_inner.clone()),
                        &Formula::just(prefix.clone(), xs.clone(), theta_inner.clone()),
                    );
                    premises.push(b.ax(SchemaId::B3L, f)?);
                    cur_term = prefix.clone();
                }
                let at_sum = Formula::just(sum.clone(), xs.clone(), theta_inner.clone());
                premises.push(retarget_implication(&mut b, &at_sum, &y)?);
                per_member.push(b.taut(&premises, imp(&psis[i], &at_y))?);
            }
            let out = b.taut(&per_member, imp(&disj, &at_y))?;
            Ok(Transformed {
                theta: at_y,
                derivation: b.finish(out),
            })
        }
        _ => Err(TemplateError::NotDisjunctive),
    }
}

/// `forall y. phi` for each `[t]{X} phi` in `gamma` that is closed Henkin
/// with `X` exactly the witnesses of `phi`; `y` ranges over the free basic
/// variables of `phi`.
pub fn sharp(gamma: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    gamma
        .iter()
        .filter(|f| f.is_closed_henkin())
        .filter_map(|f| match f {
            Formula::Just(_, xs, body) if *xs == wit(body) => Some(body.universal_closure()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::textio::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn accepted(d: &Derivation) {
        let r = check(d);
        assert!(r.accepted(), "{:?}\n{}", r.verdict, crate::textio::print_derivation(d));
    }

    #[test]
    fn classification() {
        let t = Template::parse("box (p0 | p1)").unwrap();
        assert_eq!(t.degree(), 2);
        assert!(t.is_positive() && t.is_disjunctive());
        let n = Template::parse("~p0").unwrap();
        assert!(!n.is_positive() && !n.is_disjunctive());
        let a = Template::parse("(p0 & box p1)").unwrap();
        assert!(a.is_positive() && !a.is_disjunctive());
        assert_eq!(Template::parse("p3").unwrap().degree(), 0);
        assert!(matches!(Template::parse("(p0 | p0)"), Err(TemplateError::RepeatedLetter(0))));
        assert!(Template::parse("(p0 | ").is_err());
        for s in ["box (p0 | ~p1)", "((p0 & p1) | box box p2)"] {
            assert_eq!(Template::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn membership_examples() {
        let phis = [f("P(@a)")];
        let bx = Template::parse("box p0").unwrap();
        assert!(member(&Template::Letter(0), &phis, &phis[0]).unwrap());
        assert!(member(&bx, &phis, &f("[t]{@a} P(@a)")).unwrap());
        assert!(member(&bx, &phis, &f("[(c1 . !x)]{@a} P(@a)")).unwrap());
        assert!(!member(&bx, &phis, &f("[t]{} P(@a)")).unwrap());
        assert!(!member(&bx, &phis, &f("P(@a)")).unwrap());
        assert!(matches!(member(&Template::Letter(1), &phis, &phis[0]), Err(TemplateError::ArityMismatch { .. })));
    }

    #[test]
    fn sharp_examples() {
        let g: BTreeSet<Formula> = [f("[t]{@a} P(@a, y)"), f("P(@a)"), f("[s]{} Q(@a)")].into_iter().collect();
        let out = sharp(&g);
        assert_eq!(out, [f("forall y. P(@a, y)")].into_iter().collect());
        assert!(sharp(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn semi_replacement_box() {
        let mut b = new_builder(Logic::Folpb);
        let i = b.ax(SchemaId::And1, f("(A & B) -> A")).unwrap();
        let implication = b.finish(i);
        let t = Template::parse("box (p0 | p1)").unwrap();
        let phis = [f("Q(@b)")];
        let out = semi_replacement(&t, &implication, &phis, &f("[t]{@b} (Q(@b) | (A & B))")).unwrap();
        accepted(&out.derivation);
        assert!(member(&t, &[f("Q(@b)"), f("A")], &out.theta).unwrap());
        let Formula::Just(term, _, _) = &out.theta else { panic!() };
        assert!(matches!(&**term, Term::App(_, a) if **a == Term::var("t")));
    }

    #[test]
    fn vacuous_cases() {
        let phis = [f("P(@a)"), f("Q")];
        let y = Var::basic("y");
        for (tpl, psi) in [
            ("p0", "P(@a)"),
            ("(p0 | p1)", "P(@a) | Q"),
            ("box p0", "[t]{@a} P(@a)"),
            ("box (p1 | box p0)", "[u]{@a} (Q | [t]{@a} P(@a))"),
        ] {
            let t = Template::parse(tpl).unwrap();
            let out = vacuous_quantification(Logic::Folpb, &t, &phis, &f(psi), &y).unwrap();
            accepted(&out.derivation);
            assert!(member(&t, &phis, &out.theta).unwrap(), "{tpl}");
            let expect = imp(&Formula::exists(y.clone(), f(psi)), &out.theta);
            assert_eq!(out.derivation.conclusion(), Some(&expect));
        }
        let bad = [f("P(y)")];
        assert!(matches!(
            vacuous_quantification(Logic::Folpb, &Template::Letter(0), &bad, &bad[0], &y),
            Err(TemplateError::FreeVarViolation { .. })
        ));
    }

    #[test]
    fn generalized_barcan_cases() {
        let y = Var::basic("y");
        let phi_y = f("R(y)");
        let phis = [f("Q")];
        for logic in [Logic::Folpb, Logic::Fojt45] {
            for (tpl, psi) in [("p1", "R(y)"), ("(p1 | p0)", "R(y) | Q"), ("(p0 | box p1)", "Q | [t]{} R(y)"), ("box p0", "[t]{} Q")] {
                let t = Template::parse(tpl).unwrap();
                let out = generalized_barcan(logic, &t, &y, &phi_y, &phis, &f(psi)).unwrap();
                accepted(&out.derivation);
                let mut target = phis.to_vec();
                target.push(Formula::forall(y.clone(), phi_y.clone()));
                assert!(member(&t, &target, &out.theta).unwrap(), "{tpl}: {}", out.theta);
            }
        }
    }

    #[test]
    fn combine_cases() {
        let phis = [f("P(@a)"), f("Q")];
        let t = Template::parse("box p0").unwrap();
        let out = combine(Logic::Folpb, &t, &phis, &[f("[t1]{@a} P(@a)"), f("[t2]{@a} P(@a)"), f("[t3]{@a} P(@a)")]).unwrap();
        accepted(&out.derivation);
        assert!(member(&t, &phis, &out.theta).unwrap());
        let one = combine(Logic::Folpb, &t, &phis, &[f("[t1]{@a} P(@a)")]).unwrap();
        assert_eq!(one.theta, f("[t1]{@a} P(@a)"));
        let l = combine(Logic::Folpb, &Template::Letter(0), &phis, &[phis[0].clone(), phis[0].clone(), phis[0].clone()]).unwrap();
        assert_eq!(l.theta, phis[0]);
        accepted(&l.derivation);
        let o = Template::parse("(box p0 | p1)").unwrap();
        let out = combine(Logic::Fojt45, &o, &phis, &[f("[a]{@a} P(@a) | Q"), f("[b]{@a} P(@a) | Q")]).unwrap();
        accepted(&out.derivation);
        assert!(member(&o, &phis, &out.theta).unwrap());
    }
}

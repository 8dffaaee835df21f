//! Axiom schemas and constant specifications.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{free_for, variable_variant, Formula, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Logic {
    Folpb,
    Fojt45,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Folpb => "FOLPb",
            Logic::Fojt45 => "FOJT45",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown name `{0}`")]
pub struct UnknownName(pub String);

impl FromStr for Logic {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "FOLPb" => Ok(Logic::Folpb),
            "FOJT45" => Ok(Logic::Fojt45),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

impl Logic {
    /// Whether every term in `f` uses only operators of this logic.
    pub fn admits(&self, f: &Formula) -> bool {
        match self {
            Logic::Folpb => !f.any_term(&mut |t| matches!(t, Term::Query(_))),
            Logic::Fojt45 => !f.any_term(&mut |t| matches!(t, Term::Bar(_))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaId {
    K,
    S,
    Neg,
    And1,
    And2,
    And3,
    Or1,
    Or2,
    Or3,
    Iff1,
    Iff2,
    Iff3,
    Bot,
    Ui,
    Ud,
    Ei,
    Ed,
    A2,
    A3,
    B1,
    B2,
    B3L,
    B3R,
    B4,
    B5,
    Bb,
    B6,
}

impl SchemaId {
    pub const ALL: [SchemaId; 27] = [
        SchemaId::K,
        SchemaId::S,
        SchemaId::Neg,
        SchemaId::And1,
        SchemaId::And2,
        SchemaId::And3,
        SchemaId::Or1,
        SchemaId::Or2,
        SchemaId::Or3,
        SchemaId::Iff1,
        SchemaId::Iff2,
        SchemaId::Iff3,
        SchemaId::Bot,
        SchemaId::Ui,
        SchemaId::Ud,
        SchemaId::Ei,
        SchemaId::Ed,
        SchemaId::A2,
        SchemaId::A3,
        SchemaId::B1,
        SchemaId::B2,
        SchemaId::B3L,
        SchemaId::B3R,
        SchemaId::B4,
        SchemaId::B5,
        SchemaId::Bb,
        SchemaId::B6,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemaId::K => "A1.K",
            SchemaId::S => "A1.S",
            SchemaId::Neg => "A1.NEG",
            SchemaId::And1 => "A1.AND1",
            SchemaId::And2 => "A1.AND2",
            SchemaId::And3 => "A1.AND3",
            SchemaId::Or1 => "A1.OR1",
            SchemaId::Or2 => "A1.OR2",
            SchemaId::Or3 => "A1.OR3",
            SchemaId::Iff1 => "A1.IFF1",
            SchemaId::Iff2 => "A1.IFF2",
            SchemaId::Iff3 => "A1.IFF3",
            SchemaId::Bot => "A1.BOT",
            SchemaId::Ui => "A1.UI",
            SchemaId::Ud => "A1.UD",
            SchemaId::Ei => "A1.EI",
            SchemaId::Ed => "A1.ED",
            SchemaId::A2 => "A2",
            SchemaId::A3 => "A3",
            SchemaId::B1 => "B1",
            SchemaId::B2 => "B2",
            SchemaId::B3L => "B3L",
            SchemaId::B3R => "B3R",
            SchemaId::B4 => "B4",
            SchemaId::B5 => "B5",
            SchemaId::Bb => "Bb",
            SchemaId::B6 => "B6",
        }
    }

    /// Default constant name used by the schematic specification.
    pub fn default_constant(&self) -> String {
        let short = self.name().trim_start_matches("A1.").to_ascii_lowercase();
        format!("c_{short}")
    }

    pub fn default_constants() -> BTreeMap<SchemaId, String> {
        SchemaId::ALL.iter().map(|s| (*s, s.default_constant())).collect()
    }

    pub fn admitted_in(&self, logic: Logic) -> bool {
        match self {
            SchemaId::Bb => logic == Logic::Folpb,
            SchemaId::B6 => logic == Logic::Fojt45,
            _ => true,
        }
    }

    pub fn for_logic(logic: Logic) -> impl Iterator<Item = SchemaId> {
        SchemaId::ALL.into_iter().filter(move |s| s.admitted_in(logic))
    }

    /// Purely propositional schemas of the classical basis.
    pub fn is_propositional(&self) -> bool {
        matches!(
            self,
            SchemaId::K
                | SchemaId::S
                | SchemaId::Neg
                | SchemaId::And1
                | SchemaId::And2
                | SchemaId::And3
                | SchemaId::Or1
                | SchemaId::Or2
                | SchemaId::Or3
                | SchemaId::Iff1
                | SchemaId::Iff2
                | SchemaId::Iff3
                | SchemaId::Bot
        )
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemaId {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// Names the instantiation found by [`match_axiom`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub schema: SchemaId,
    pub detail: String,
}

fn report(schema: SchemaId, detail: impl Into<String>) -> Option<MatchReport> {
    Some(MatchReport {
        schema,
        detail: detail.into(),
    })
}

fn imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    f.as_implies()
}

fn just(f: &Formula) -> Option<(&Term, &crate::syntax::VarSet, &Formula)> {
    f.as_just()
}

/// Finds `e` with `body[e/x] == target` and `e` free for `x` in `body`.
fn find_instance(body: &Formula, x: &Var, target: &Formula) -> Option<Var> {
    if !body.free_vars().contains(x) {
        return (body == target).then(|| x.clone());
    }
    let mut candidates = target.all_vars();
    candidates.insert(x.clone());
    candidates.into_iter().find(|e| {
        free_for(e, x, body)
            && body
                .substitute(&[(x.clone(), e.clone())])
                .is_ok_and(|g| &g == target)
    })
}

/// Structural match of `f` against `schema` with side conditions.
pub fn match_axiom(schema: SchemaId, f: &Formula, logic: Logic) -> Option<MatchReport> {
    if !schema.admitted_in(logic) || !logic.admits(f) {
        return None;
    }
    use Formula as F;
    match schema {
        SchemaId::K => {
            let (a, rest) = imp(f)?;
            let (b, a2) = imp(rest)?;
            (a == a2).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::S => {
            let (l, r) = imp(f)?;
            let (a, bc) = imp(l)?;
            let (b, c) = imp(bc)?;
            let (ab, ac) = imp(r)?;
            let (a2, b2) = imp(ab)?;
            let (a3, c3) = imp(ac)?;
            (a == a2 && a == a3 && b == b2 && c == c3).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}, chi={c}") })
        }
        SchemaId::Neg => {
            let (l, r) = imp(f)?;
            let (na, nb) = imp(l)?;
            let (F::Not(a), F::Not(b)) = (na, nb) else { return None };
            let (b2, a2) = imp(r)?;
            (**a == *a2 && **b == *b2).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::And1 | SchemaId::And2 => {
            let (l, r) = imp(f)?;
            let F::And(a, b) = l else { return None };
            let picked = if schema == SchemaId::And1 { a } else { b };
            (**picked == *r).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::And3 => {
            let (a, rest) = imp(f)?;
            let (b, conj) = imp(rest)?;
            let F::And(a2, b2) = conj else { return None };
            (**a2 == *a && **b2 == *b).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::Or1 | SchemaId::Or2 => {
            let (l, r) = imp(f)?;
            let F::Or(a, b) = r else { return None };
            let picked = if schema == SchemaId::Or1 { a } else { b };
            (**picked == *l).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::Or3 => {
            let (ac, rest) = imp(f)?;
            let (bc, last) = imp(rest)?;
            let (a, c) = imp(ac)?;
            let (b, c2) = imp(bc)?;
            let (disj, c3) = imp(last)?;
            let F::Or(a2, b2) = disj else { return None };
            (c == c2 && c == c3 && **a2 == *a && **b2 == *b).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}, chi={c}") })
        }
        SchemaId::Iff1 | SchemaId::Iff2 => {
            let (l, r) = imp(f)?;
            let F::Iff(a, b) = l else { return None };
            let (x, y) = imp(r)?;
            let ok = if schema == SchemaId::Iff1 { **a == *x && **b == *y } else { **b == *x && **a == *y };
            ok.then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::Iff3 => {
            let (ab, rest) = imp(f)?;
            let (ba, iff) = imp(rest)?;
            let (a, b) = imp(ab)?;
            let (b2, a2) = imp(ba)?;
            let F::Iff(a3, b3) = iff else { return None };
            (a == a2 && b == b2 && **a3 == *a && **b3 == *b).then(|| MatchReport { schema, detail: format!("phi={a}, psi={b}") })
        }
        SchemaId::Bot => {
            let (l, r) = imp(f)?;
            (*l == F::Bottom).then(|| MatchReport { schema, detail: format!("phi={r}") })
        }
        SchemaId::Ui => {
            let (l, r) = imp(f)?;
            let F::Forall(x, body) = l else { return None };
            let e = find_instance(body, x, r)?;
            report(schema, format!("x={x}, e={e}"))
        }
        SchemaId::Ei => {
            let (l, r) = imp(f)?;
            let F::Exists(x, body) = r else { return None };
            let e = find_instance(body, x, l)?;
            report(schema, format!("x={x}, e={e}"))
        }
        SchemaId::Ud => {
            let (l, r) = imp(f)?;
            let F::Forall(x, inner) = l else { return None };
            let (a, b) = imp(inner)?;
            let (a2, all) = imp(r)?;
            let F::Forall(x2, b2) = all else { return None };
            (a == a2 && x == x2 && **b2 == *b && !a.free_vars().contains(x))
                .then(|| MatchReport { schema, detail: format!("x={x}") })
        }
        SchemaId::Ed => {
            let (l, r) = imp(f)?;
            let F::Forall(x, inner) = l else { return None };
            let (a, b) = imp(inner)?;
            let (ex, b2) = imp(r)?;
            let F::Exists(x2, a2) = ex else { return None };
            (b == b2 && x == x2 && **a2 == *a && !b.free_vars().contains(x))
                .then(|| MatchReport { schema, detail: format!("x={x}") })
        }
        SchemaId::A2 | SchemaId::A3 => {
            let (l, r) = imp(f)?;
            let (t, xs, a) = just(l)?;
            let (t2, ys, a2) = just(r)?;
            if t != t2 || a != a2 {
                return None;
            }
            let (big, small) = if schema == SchemaId::A2 { (xs, ys) } else { (ys, xs) };
            if big.len() != small.len() + 1 || !small.is_subset(big) {
                return None;
            }
            let y = big.difference(small).next()?;
            if schema == SchemaId::A2 && a.free_vars().contains(y) {
                return None;
            }
            report(schema, format!("y={y}"))
        }
        SchemaId::B1 => {
            let (l, r) = imp(f)?;
            let (_, _, a) = just(l)?;
            (a == r).then(|| MatchReport { schema, detail: String::new() })
        }
        SchemaId::B2 => {
            let (l, r) = imp(f)?;
            let (t, xs, ab) = just(l)?;
            let (a, b) = imp(ab)?;
            let (sa, app) = imp(r)?;
            let (s, ys, a2) = just(sa)?;
            let (ts, zs, b2) = just(app)?;
            let Term::App(t3, s3) = ts else { return None };
            (xs == ys && xs == zs && a == a2 && b == b2 && **t3 == *t && **s3 == *s)
                .then(|| MatchReport { schema, detail: format!("t={t}, s={s}") })
        }
        SchemaId::B3L | SchemaId::B3R => {
            let (l, r) = imp(f)?;
            let (u, xs, a) = just(l)?;
            let (sum, ys, a2) = just(r)?;
            let Term::Sum(t, s) = sum else { return None };
            let picked = if schema == SchemaId::B3L { t } else { s };
            (xs == ys && a == a2 && **picked == *u).then(|| MatchReport { schema, detail: format!("t={t}, s={s}") })
        }
        SchemaId::B4 => {
            let (l, r) = imp(f)?;
            let (t, xs, _) = just(l)?;
            let (bang, ys, inner) = just(r)?;
            let Term::Bang(t2) = bang else { return None };
            (**t2 == *t && xs == ys && inner == l).then(|| MatchReport { schema, detail: format!("t={t}") })
        }
        SchemaId::B5 => {
            let (l, r) = imp(f)?;
            let (t, xs, a) = just(l)?;
            let (g, ys, all) = just(r)?;
            let Term::Gen(x, t2) = g else { return None };
            let F::Forall(x2, a2) = all else { return None };
            (**t2 == *t && xs == ys && x == x2 && **a2 == *a && !xs.contains(x))
                .then(|| MatchReport { schema, detail: format!("x={x}") })
        }
        SchemaId::Bb => {
            let (l, r) = imp(f)?;
            let F::Forall(y, inner) = l else { return None };
            let (t, xys, a) = just(inner)?;
            let (bt, xs, all) = just(r)?;
            let Term::Bar(t2) = bt else { return None };
            let F::Forall(y2, a2) = all else { return None };
            if **t2 != *t || y != y2 || **a2 != *a || xs.contains(y) {
                return None;
            }
            let mut expected = xs.clone();
            expected.insert(y.clone());
            (expected == *xys).then(|| MatchReport { schema, detail: format!("y={y}") })
        }
        SchemaId::B6 => {
            let (l, r) = imp(f)?;
            let F::Not(neg) = l else { return None };
            let (t, xs, _) = just(neg)?;
            let (q, ys, body) = just(r)?;
            let Term::Query(t2) = q else { return None };
            (**t2 == *t && xs == ys && body == l).then(|| MatchReport { schema, detail: format!("t={t}") })
        }
    }
}

/// The first admitted schema that `f` instantiates.
pub fn classify_axiom(f: &Formula, logic: Logic) -> Option<MatchReport> {
    SchemaId::for_logic(logic).find_map(|s| match_axiom(s, f, logic))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstantSpec {
    Schematic(BTreeMap<SchemaId, String>),
    Explicit(Vec<(String, Formula)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsError {
    #[error("constant `{0}` is not mapped to any schema")]
    UnknownConstant(String),
}

impl ConstantSpec {
    pub fn schematic() -> Self {
        ConstantSpec::Schematic(SchemaId::default_constants())
    }

    pub fn is_schematic(&self) -> bool {
        matches!(self, ConstantSpec::Schematic(_))
    }

    /// Schemas mapped to `c` in schematic mode.
    pub fn schemas_of(&self, c: &str) -> Vec<SchemaId> {
        match self {
            ConstantSpec::Schematic(map) => map.iter().filter(|(_, n)| n.as_str() == c).map(|(s, _)| *s).collect(),
            ConstantSpec::Explicit(_) => Vec::new(),
        }
    }

    /// Constant for a schema in schematic mode.
    pub fn constant_for(&self, schema: SchemaId) -> Option<&str> {
        match self {
            ConstantSpec::Schematic(map) => map.get(&schema).map(String::as_str),
            ConstantSpec::Explicit(_) => None,
        }
    }

    /// Some constant `c` with `c:f` in CS(V), if any.
    pub fn constant_covering(&self, f: &Formula, logic: Logic) -> Option<String> {
        match self {
            ConstantSpec::Schematic(map) => SchemaId::for_logic(logic)
                .find(|s| match_axiom(*s, f, logic).is_some())
                .and_then(|s| map.get(&s).cloned()),
            ConstantSpec::Explicit(entries) => entries
                .iter()
                .map(|(c, _)| c)
                .find(|c| csv_contains(self, c, f, logic).unwrap_or(false))
                .cloned(),
        }
    }

    /// Every constant name the specification mentions.
    pub fn constant_names(&self) -> Vec<String> {
        let mut names: Vec<String> = match self {
            ConstantSpec::Schematic(map) => map.values().cloned().collect(),
            ConstantSpec::Explicit(entries) => entries.iter().map(|(c, _)| c.clone()).collect(),
        };
        names.sort();
        names.dedup();
        names
    }
}

/// Membership of `c:f` in the specification proper (witness-free formulas).
pub fn cs_contains(cs: &ConstantSpec, c: &str, f: &Formula, logic: Logic) -> Result<bool, CsError> {
    match cs {
        ConstantSpec::Schematic(_) => {
            let schemas = cs.schemas_of(c);
            if schemas.is_empty() {
                return Err(CsError::UnknownConstant(c.to_string()));
            }
            Ok(!f.has_witness() && schemas.iter().any(|s| match_axiom(*s, f, logic).is_some()))
        }
        ConstantSpec::Explicit(entries) => Ok(entries.iter().any(|(d, g)| d == c && g == f)),
    }
}

/// Membership in the extension where free basic variables of an entry may be
/// replaced injectively by witness variables.
pub fn csv_contains(cs: &ConstantSpec, c: &str, f: &Formula, logic: Logic) -> Result<bool, CsError> {
    match cs {
        ConstantSpec::Schematic(_) => {
            let schemas = cs.schemas_of(c);
            if schemas.is_empty() {
                return Err(CsError::UnknownConstant(c.to_string()));
            }
            Ok(schemas.iter().any(|s| match_axiom(*s, f, logic).is_some()))
        }
        ConstantSpec::Explicit(entries) => Ok(entries.iter().filter(|(d, _)| d == c).any(|(_, g)| {
            if g == f {
                return true;
            }
            match variable_variant(g, f) {
                Some(sigma) => sigma
                    .iter()
                    .all(|(from, to)| from == to || (from.is_basic() && to.is_witness())),
                None => false,
            }
        })),
    }
}

/// Pairwise variant closure over an explicit entry list.
pub fn is_variant_closed(entries: &[(String, Formula)]) -> bool {
    for (c, f) in entries {
        for (_, g) in entries {
            if f != g && variable_variant(f, g).is_some() && !entries.iter().any(|(d, h)| d == c && h == g) {
                return false;
            }
        }
    }
    true
}

/// The first explicit entry whose formula is not an axiom instance.
pub fn inappropriate_entry(cs: &ConstantSpec, logic: Logic) -> Option<(String, Formula)> {
    match cs {
        ConstantSpec::Schematic(_) => None,
        ConstantSpec::Explicit(entries) => entries
            .iter()
            .find(|(_, f)| classify_axiom(f, logic).is_none())
            .cloned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn schema_names_round_trip() {
        for s in SchemaId::ALL {
            assert_eq!(s.name().parse::<SchemaId>().unwrap(), s);
        }
        assert_eq!(SchemaId::Ui.default_constant(), "c_ui");
        assert_eq!(SchemaId::B3L.default_constant(), "c_b3l");
    }

    #[test]
    fn side_conditions() {
        assert!(match_axiom(SchemaId::A2, &f("[t]{x,y} P(x) -> [t]{x} P(x)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::A2, &f("[t]{x,y} P(x,y) -> [t]{x} P(x,y)"), Logic::Folpb).is_none());
        assert!(match_axiom(SchemaId::Bb, &f("forall y. [t]{y} P(y) -> [b(t)]{} forall y. P(y)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::Bb, &f("forall y. [t]{y} P(y) -> [b(t)]{} forall y. P(y)"), Logic::Fojt45).is_none());
        assert!(match_axiom(SchemaId::B5, &f("[t]{x} P(x) -> [gen[x](t)]{x} forall x. P(x)"), Logic::Folpb).is_none());
        assert!(match_axiom(SchemaId::B5, &f("[t]{} P(x) -> [gen[x](t)]{} forall x. P(x)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::Ui, &f("forall x. P(x,y) -> P(y,y)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::Ui, &f("forall x. exists y. P(x,y) -> exists y. P(y,y)"), Logic::Folpb).is_none());
        assert!(match_axiom(SchemaId::Ui, &f("forall x. P(x) -> P(@a)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::Ud, &f("forall x. (Q -> P(x)) -> (Q -> forall x. P(x))"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::Ud, &f("forall x. (Q(x) -> P(x)) -> (Q(x) -> forall x. P(x))"), Logic::Folpb).is_none());
        assert!(match_axiom(SchemaId::B6, &f("~[t]{x} P(x) -> [?t]{x} ~[t]{x} P(x)"), Logic::Fojt45).is_some());
        assert!(match_axiom(SchemaId::B2, &f("[s]{x} (P -> Q) -> ([t]{x} P -> [(s . t)]{x} Q)"), Logic::Folpb).is_some());
        assert!(match_axiom(SchemaId::B2, &f("[s]{x} (P -> Q) -> ([t]{} P -> [(s . t)]{x} Q)"), Logic::Folpb).is_none());
    }

    #[test]
    fn membership() {
        let cs = ConstantSpec::schematic();
        assert!(cs_contains(&cs, "c_b1", &f("[t]{} P(x) -> P(x)"), Logic::Folpb).unwrap());
        assert!(!cs_contains(&cs, "c_b1", &f("P(x)"), Logic::Folpb).unwrap());
        assert!(cs_contains(&cs, "nope", &f("P(x)"), Logic::Folpb).is_err());
        assert!(csv_contains(&cs, "c_ui", &f("forall x. P(x) -> P(@a)"), Logic::Folpb).unwrap());
        assert!(csv_contains(&cs, "c_b1", &f("[t]{@a} P(@a) -> P(@a)"), Logic::Folpb).unwrap());
        let entry = f("P(x) -> (Q(y) -> P(x))");
        let ex = ConstantSpec::Explicit(vec![("c0".into(), entry.clone())]);
        assert!(cs_contains(&ex, "c0", &entry, Logic::Folpb).unwrap());
        assert!(csv_contains(&ex, "c0", &f("P(@a) -> (Q(y) -> P(@a))"), Logic::Folpb).unwrap());
        assert!(!csv_contains(&ex, "c0", &f("P(z) -> (Q(y) -> P(z))"), Logic::Folpb).unwrap());
    }

    #[test]
    fn variant_closure() {
        assert!(is_variant_closed(&[]));
        let a = f("P(x) -> (Q(y) -> P(x))");
        assert!(is_variant_closed(&[("c".into(), a)]));
        let b1x = f("[t]{x} P(x) -> P(x)");
        let b1y = f("[t]{y} P(y) -> P(y)");
        assert!(!is_variant_closed(&[("c".into(), b1x.clone()), ("d".into(), b1y.clone())]));
        assert!(is_variant_closed(&[
            ("c".into(), b1x.clone()),
            ("c".into(), b1y.clone()),
        ]));
    }
}

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::sample::subsequence;

use justlogic::axioms::{cs_contains, csv_contains};
use justlogic::harness::{run_soundness, EvidenceKind, GenConfig, Generator};
use justlogic::kernel::check;
use justlogic::semantics::{audit_with, AuditOptions, Evaluator, Evidence, Fault};
use justlogic::syntax::{free_for, variable_variant};
use justlogic::templates::{self, Template};
use justlogic::textio::{parse_formula, parse_term, print_formula, print_term};
use justlogic::transform::{self, Builder};
use justlogic::{ConstantSpec, Formula, Logic, Rule, SchemaId, Term, Var, VarSet};

const NAMES: [&str; 5] = ["x", "y", "z", "@a", "@b"];

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(&NAMES[..]).prop_map(Var::new)
}

fn basic() -> impl Strategy<Value = Var> {
    prop::sample::select(&NAMES[..3]).prop_map(Var::basic)
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(&["p0", "p1", "c0", "c1"][..]).prop_map(|n| {
        if n.starts_with('c') {
            Term::constant(n)
        } else {
            Term::var(n)
        }
    });
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sum(a, b)),
            inner.clone().prop_map(Term::bang),
            inner.clone().prop_map(Term::query),
            inner.clone().prop_map(Term::bar),
            (basic(), inner).prop_map(|(x, t)| Term::gen(x, t)),
        ]
    })
}

fn subscript() -> impl Strategy<Value = VarSet> {
    subsequence(NAMES.to_vec(), 0..=3).prop_map(|ns| ns.into_iter().map(Var::new).collect())
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        var().prop_map(|v| Formula::Atom("P".into(), vec![v])),
        (var(), var()).prop_map(|(a, b)| Formula::Atom("R".into(), vec![a, b])),
        Just(Formula::Atom("S".into(), vec![])),
        Just(Formula::Bottom),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (basic(), inner.clone()).prop_map(|(x, a)| Formula::forall(x, a)),
            (basic(), inner.clone()).prop_map(|(x, a)| Formula::exists(x, a)),
            (term(), subscript(), inner).prop_map(|(t, xs, a)| Formula::just(t, xs, a)),
        ]
    })
}

fn logic() -> impl Strategy<Value = Logic> {
    prop_oneof![Just(Logic::Folpb), Just(Logic::Fojt45)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn justification_free_vars_are_the_subscript(t in term(), xs in subscript(), a in formula()) {
        prop_assert_eq!(Formula::just(t, xs.clone(), a).free_vars(), xs);
    }

    #[test]
    fn identity_substitution(a in formula()) {
        let id: BTreeMap<Var, Var> = a.free_vars().into_iter().map(|v| (v.clone(), v)).collect();
        prop_assert_eq!(a.substitute_map(&id).unwrap(), a);
    }

    #[test]
    fn variants_invert(a in formula(), shift in 0usize..3) {
        let basics: Vec<Var> = a.free_vars().into_iter().filter(Var::is_basic).collect();
        let fresh: Vec<Var> = (0..basics.len()).map(|i| Var::basic(&format!("v{}", i + shift))).collect();
        let rename: BTreeMap<Var, Var> = basics.iter().cloned().zip(fresh).collect();
        let Ok(b) = a.substitute_map(&rename) else { return Ok(()) };
        let sigma = variable_variant(&a, &b).expect("renaming is a variant");
        prop_assert_eq!(a.substitute_map(&sigma).unwrap(), b.clone());
        let back = variable_variant(&b, &a).expect("variants are symmetric");
        for (from, to) in &sigma {
            prop_assert_eq!(back.get(to), Some(from));
        }
    }

    #[test]
    fn free_for_substitution(a in formula(), x in basic(), y in var()) {
        prop_assume!(a.free_vars().contains(&x) && free_for(&y, &x, &a));
        let b = a.substitute(&[(x.clone(), y.clone())]).unwrap();
        let mut expect = a.free_vars();
        expect.remove(&x);
        expect.insert(y);
        prop_assert_eq!(b.free_vars(), expect);
    }

    #[test]
    fn closure_binds_every_basic(a in formula()) {
        prop_assert!(a.universal_closure().free_vars().iter().all(Var::is_witness));
    }

    #[test]
    fn print_parse_round_trip(a in formula(), t in term()) {
        prop_assert_eq!(parse_formula(&print_formula(&a)).unwrap(), a);
        prop_assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
    }

    #[test]
    fn error_spans_stay_inside(a in formula(), cut in 0usize..200, junk in "[()\\[\\]{}.~&|>-]{0,2}") {
        let text = print_formula(&a);
        let cut = cut.min(text.len());
        let broken = format!("{}{}", &text[..cut], junk);
        if let Err(e) = parse_formula(&broken) {
            let lines: Vec<&str> = broken.split('\n').collect();
            prop_assert!(e.span.line >= 1 && e.span.line <= lines.len().max(1));
            let width = lines.get(e.span.line - 1).map_or(0, |l| l.len());
            prop_assert!(e.span.column >= 1 && e.span.column <= width + 1, "{:?} in {:?}", e.span, broken);
        }
    }

    #[test]
    fn schematic_specification_is_appropriate(seed in any::<u64>(), logic in logic()) {
        let mut g = Generator::new(GenConfig::new(logic, seed));
        let cs = ConstantSpec::schematic();
        for schema in SchemaId::for_logic(logic) {
            let f = g.axiom_instance(schema);
            let c = schema.default_constant();
            prop_assert!(csv_contains(&cs, &c, &f, logic).unwrap(), "{} : {}", c, f);
            if !f.has_witness() {
                prop_assert!(cs_contains(&cs, &c, &f, logic).unwrap());
            }
        }
    }

    #[test]
    fn check_is_deterministic(seed in any::<u64>(), kind in 0usize..24, logic in logic()) {
        let mut g = Generator::new(GenConfig::new(logic, seed));
        if let Some((_, d)) = g.derivation(kind) {
            prop_assert_eq!(check(&d), check(&d));
        }
    }

    #[test]
    fn deduction_round_trip(seed in any::<u64>()) {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, seed));
        let d = g.hypothesis_derivation();
        let k = d.hypotheses.len();
        let discharged = transform::deduction(&d, k).unwrap();
        prop_assert!(check(&discharged).accepted());
        let mut b = Builder::with_hypotheses(d.logic, d.cs.clone(), d.hypotheses.clone());
        let imp = *b.embed(&discharged).unwrap().last().unwrap();
        let h = b.hyp(k);
        let concl = b.mp(h, imp).unwrap();
        let again = b.finish(concl);
        prop_assert!(check(&again).accepted());
        prop_assert_eq!(again.conclusion(), d.conclusion());
    }

    #[test]
    fn internalized_subscript_is_the_union(seed in any::<u64>()) {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, seed));
        let d = g.hypothesis_derivation();
        let out = transform::internalize(&d).unwrap();
        prop_assert!(check(&out.derivation).accepted());
        let union: VarSet = d.hypotheses.iter().filter_map(Formula::as_just).flat_map(|(_, xs, _)| xs.clone()).collect();
        prop_assert_eq!(out.subscript, union);
    }

    #[test]
    fn witness_replacement_is_stepwise(seed in any::<u64>(), kind in 0usize..24) {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, seed));
        let Some((_, d)) = g.derivation(kind) else { return Ok(()) };
        let out = transform::replace_witness(&d, &Var::witness("d0"), &Var::basic("fresh")).unwrap();
        prop_assert_eq!(out.steps.len(), d.steps.len());
        let tags = |d: &justlogic::Derivation| d.steps.iter().map(|s| std::mem::discriminant(&s.rule)).collect::<Vec<_>>();
        prop_assert_eq!(tags(&out), tags(&d));
        let same_schemas = out.steps.iter().zip(&d.steps).all(|(a, b)| match (&a.rule, &b.rule) {
            (Rule::Ax(x), Rule::Ax(y)) => x == y,
            _ => true,
        });
        prop_assert!(same_schemas);
        prop_assert!(check(&out).accepted());
    }

    #[test]
    fn semi_replacement_by_identity_stays_put(seed in any::<u64>()) {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, seed));
        let template = loop {
            let t = g.template(2, true);
            if t.is_positive() {
                break t;
            }
        };
        let phis = vec![g.formula(1)];
        let chi = g.formula(1);
        let mut b = Builder::new(Logic::Folpb, ConstantSpec::schematic());
        let id = b.identity(&chi).unwrap();
        let implication = b.finish(id);
        let source = vec![phis[0].clone(), chi];
        let phi = g.member_of(&template, &source);
        let out = templates::semi_replacement(&template, &implication, &phis, &phi).unwrap();
        prop_assert!(templates::member(&template, &source, &out.theta).unwrap());
        prop_assert!(check(&out.derivation).accepted());
    }

    #[test]
    fn closure_evidence_is_monotone(seed in any::<u64>()) {
        let mut g = Generator::new(GenConfig::new(Logic::Folpb, seed));
        let targets: Vec<Formula> = (0..3).map(|_| g.just(2)).collect();
        let refs: Vec<&Formula> = targets.iter().collect();
        let m = g.model_on(3, [(0, 0), (1, 1), (2, 2), (0, 1)].into_iter().collect(), 2, &refs, &ConstantSpec::Explicit(vec![]), EvidenceKind::Closure);
        let Evidence::Closure(base) = &m.evidence else { unreachable!() };
        let mut bigger = m.clone();
        let mut extra = base.clone();
        extra.push((g.term(1), g.formula(1), 0));
        bigger.evidence = Evidence::Closure(extra);
        let (small, large) = (Evaluator::new(&m, Fault::None), Evaluator::new(&bigger, Fault::None));
        for f in &targets {
            let Formula::Just(t, _, a) = f else { continue };
            for w in 0..3 {
                if small.evidence(t, a, w).unwrap() {
                    prop_assert!(large.evidence(t, a, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn full_evidence_passes_audit_modulo_strong_evidence(seed in any::<u64>(), logic in logic()) {
        let mut g = Generator::new(GenConfig::new(logic, seed));
        let f = g.just(1);
        let m = g.model_on(2, justlogic::harness::frames(2, logic)[0].clone(), 2, &[&f], &ConstantSpec::Explicit(vec![]), EvidenceKind::Full);
        let report = audit_with(&m, AuditOptions { exempt_strong_evidence: true });
        prop_assert!(report.passed(), "{:?}", report.violations);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn soundness_reports_are_reproducible(seed in any::<u64>(), logic in logic()) {
        let mut cfg = GenConfig::new(logic, seed);
        cfg.trials = 40;
        let a = run_soundness(&cfg);
        let b = run_soundness(&cfg);
        prop_assert_eq!(a.summary(), b.summary());
        prop_assert!(a.passed(), "{}", a.summary());
    }
}

#[test]
fn template_degree_counts_nodes() {
    let t = Template::parse("box (p0 | ~p1)").unwrap();
    assert_eq!(t.degree(), 3);
}

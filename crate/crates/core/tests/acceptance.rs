//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use justlogic::axioms::{cs_contains, csv_contains};
use justlogic::harness::{
    brute_member, frames, mutants, reference_eval, run_soundness, EvidenceKind, GenConfig, Generator,
};
use justlogic::kernel::check;
use justlogic::semantics::{Evaluator, Fault};
use justlogic::syntax::fresh_basic;
use justlogic::templates::{self, Template};
use justlogic::textio::{parse_derivation_file, parse_formula, parse_term, print_derivation, print_formula, print_term};
use justlogic::transform::{self, Builder};
use justlogic::{ConstantSpec, Derivation, Formula, Logic, SchemaId, Term, Var, VarSet};

const SEED: u64 = 42;
const GOLDEN_CHECK_LIMIT: Duration = Duration::from_secs(1);
const MIN_MUTANTS: usize = 50;
const FUZZ_TRIALS: usize = 500;
const FUZZ_LIMIT: Duration = Duration::from_secs(60);
const CANARY_WINDOW: usize = 200;
const INTERNALIZE_CASES: usize = 40;
const MEMBER_QUERIES: usize = 10_000;
const MEMBER_TERM_DEPTH: usize = 2;
const MAX_TEMPLATE_DEGREE: usize = 3;
const TRANSFORMER_INPUTS: usize = 100;
const WITNESS_DERIVATIONS: usize = 100;
const CS_CASES: usize = 1_000;
const ROUND_TRIPS: usize = 10_000;
const EVAL_MAX_WORLDS: usize = 3;
const EVAL_MAX_DOMAIN: usize = 2;
const EVAL_DEPTH: usize = 4;

type Outcome = Result<String, String>;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn load(name: &str) -> Result<Derivation, String> {
    parse_derivation_file(&corpus(name)).map_err(|e| format!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn accepted(d: &Derivation, what: &str) -> Result<(), String> {
    let r = check(d);
    ensure(r.accepted(), || format!("{what}: {:?}", r.verdict))
}

struct Golden {
    file: &'static str,
    milestones: usize,
}

const GOLDEN: [Golden; 3] = [
    Golden { file: "converse_barcan.jd", milestones: 9 },
    Golden { file: "converse_buridan.jd", milestones: 10 },
    Golden { file: "jt45_barcan.jd", milestones: 21 },
];

fn golden_corpus() -> Outcome {
    let mut times = Vec::new();
    for g in &GOLDEN {
        let d = load(g.file)?;
        let start = Instant::now();
        let report = check(&d);
        let took = start.elapsed();
        ensure(report.accepted(), || format!("{}: {:?}", g.file, report.verdict))?;
        ensure(took < GOLDEN_CHECK_LIMIT, || format!("{} took {took:?}", g.file))?;
        ensure(d.milestone_numbers() == (1..=g.milestones).collect::<Vec<_>>(), || {
            format!("{}: milestones {:?}", g.file, d.milestone_numbers())
        })?;
        times.push(format!("{}={}ms", g.file, took.as_millis()));
    }
    for lemma in ["lemmas/query_lemma.jd", "lemmas/query_refutation.jd"] {
        accepted(&load(lemma)?, lemma)?;
    }

    let t = Term::var("t");
    let y = Var::basic("y");
    let phi = parse_formula("P(y)").map_err(|e| e.to_string())?;
    let none = VarSet::new();

    let cb = transform::converse_barcan(Logic::Folpb, &t, &none, &y, &phi).map_err(|e| e.to_string())?;
    ensure(cb.term.to_string() == "(c_ui . t)", || format!("converse Barcan term {}", cb.term))?;

    let cu = transform::converse_buridan(Logic::Folpb, &t, &none, &y, &phi).map_err(|e| e.to_string())?;
    let buridan_shape = matches!(&cu.term, Term::App(f, a) if **a == t && matches!(&**f, Term::App(..)));
    ensure(buridan_shape, || format!("converse Buridan term {}", cu.term))?;

    let jb = transform::jt45_barcan(&t, &none, &y, &phi).map_err(|e| e.to_string())?;
    let jt45_shape = match &jb.term {
        Term::App(_, q) => match &**q {
            Term::Query(inner) => match &**inner {
                Term::App(cc, qt) => {
                    **qt == Term::query(t.clone())
                        && matches!(&**cc, Term::App(_, c1) if **c1 == Term::constant("c_ui"))
                }
                _ => false,
            },
            _ => false,
        },
        _ => false,
    };
    ensure(jt45_shape, || "explicit Barcan term has the wrong shape".into())?;

    for (g, d) in GOLDEN.iter().zip([&cb.derivation, &cu.derivation, &jb.derivation]) {
        let on_disk = std::fs::read_to_string(corpus(g.file)).map_err(|e| e.to_string())?;
        ensure(print_derivation(d) == on_disk, || format!("{} differs from the synthesizer output", g.file))?;
    }
    Ok(format!("3 golden files accepted ({}), synthesizers reproduce them", times.join(", ")))
}

fn mutation_suite() -> Outcome {
    let mut summary = Vec::new();
    for g in &GOLDEN {
        let d = load(g.file)?;
        let all = mutants(&d);
        ensure(all.len() >= MIN_MUTANTS, || format!("{}: only {} mutants", g.file, all.len()))?;
        for m in &all {
            let report = check(&m.derivation);
            ensure(report.rejection().map(|(s, _)| s) == Some(m.step), || {
                format!("{} mutant {} at step {}: {:?}", g.file, m.operator, m.step, report.verdict)
            })?;
        }
        summary.push(format!("{} {}", g.file, all.len()));
    }
    Ok(format!("all mutants rejected at their step ({})", summary.join(", ")))
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for logic in [Logic::Folpb, Logic::Fojt45] {
        let mut cfg = GenConfig::new(logic, SEED);
        cfg.trials = FUZZ_TRIALS;
        let report = run_soundness(&cfg);
        ensure(cfg.max_worlds <= 4 && cfg.max_domain <= 3, || "bounds too large".into())?;
        ensure(report.checked == FUZZ_TRIALS, || report.summary())?;
        ensure(report.passed(), || {
            let first = &report.violations[0];
            format!("{}\n{}", report.summary(), first.replay())
        })?;
        lines.push(format!("{logic} {} trials", report.checked));
    }
    let took = start.elapsed();
    ensure(took <= FUZZ_LIMIT, || format!("fuzzing took {took:?}"))?;
    for (logic, fault) in [
        (Logic::Folpb, Fault::SkipRClosure),
        (Logic::Folpb, Fault::SkipBCondition),
        (Logic::Fojt45, Fault::SkipQueryCondition),
    ] {
        let mut cfg = GenConfig::new(logic, SEED);
        cfg.trials = CANARY_WINDOW;
        cfg.fault = fault;
        let report = run_soundness(&cfg);
        let first = report.violations.iter().map(|v| v.trial).min();
        ensure(first.is_some_and(|t| t < CANARY_WINDOW), || format!("canary {fault:?} did not trip"))?;
        lines.push(format!("{fault:?} trips at trial {}", first.unwrap_or_default()));
    }
    Ok(format!("0 violations in {took:.1?}; {}", lines.join(", ")))
}

fn internalization() -> Outcome {
    let mut g = Generator::new(GenConfig::new(Logic::Folpb, SEED));
    let mut with_hyps = 0;
    for i in 0..INTERNALIZE_CASES {
        let d = if i % 4 == 3 { g.small_theorem() } else { g.hypothesis_derivation() };
        if !d.hypotheses.is_empty() {
            with_hyps += 1;
        }
        let out = transform::internalize(&d).map_err(|e| format!("case {i}: {e}"))?;
        accepted(&out.derivation, &format!("internalization {i}"))?;
        let union: VarSet = d.hypotheses.iter().flat_map(|h| h.as_just().map(|(_, xs, _)| xs.clone())).flatten().collect();
        ensure(out.subscript == union, || format!("case {i}: subscript {:?} vs {union:?}", out.subscript))?;
        let expect = Formula::just(out.term.clone(), union, d.conclusion().cloned().unwrap_or(Formula::Bottom));
        ensure(out.derivation.conclusion() == Some(&expect), || format!("case {i}: wrong conclusion"))?;
    }
    Ok(format!("{INTERNALIZE_CASES} derivations ({with_hyps} with hypotheses), subscripts exact"))
}

fn template_membership() -> Outcome {
    let mut g = Generator::new(GenConfig::new(Logic::Folpb, SEED));
    let mut queries = 0;
    let mut positives = 0;
    let mut templates_seen = 0;
    while queries < MEMBER_QUERIES {
        let letters = g.rng().gen_range(1..=2);
        let template = g.template(letters, true);
        if template.degree() > MAX_TEMPLATE_DEGREE {
            continue;
        }
        let other = g.template(letters, true);
        let phis: Vec<Formula> = (0..letters).map(|_| g.formula(1)).collect();
        let Ok(members) = brute_member(&template, &phis, MEMBER_TERM_DEPTH) else { continue };
        let Ok(decoys) = brute_member(&other, &phis, MEMBER_TERM_DEPTH) else { continue };
        templates_seen += 1;
        let mut pool: Vec<&Formula> = members.iter().chain(decoys.iter()).collect();
        pool.shuffle(g.rng());
        for psi in pool.into_iter().take(200) {
            let fast = templates::member(&template, &phis, psi).map_err(|e| e.to_string())?;
            ensure(fast == members.contains(psi), || format!("member({template}, {psi}) = {fast}"))?;
            positives += usize::from(fast);
            queries += 1;
        }
    }
    Ok(format!("{queries} queries over {templates_seen} templates agree ({positives} members)"))
}

fn positive_template(g: &mut Generator, letters: usize) -> Template {
    loop {
        let t = g.template(letters, true);
        if t.is_positive() {
            return t;
        }
    }
}

/// Formulas without free occurrences of `y`.
fn formulas_avoiding(g: &mut Generator, n: usize, y: &Var) -> Vec<Formula> {
    (0..n)
        .map(|_| loop {
            let f = g.formula(1);
            if !f.free_vars().contains(y) {
                break f;
            }
        })
        .collect()
}

fn implication_theorem(g: &mut Generator, logic: Logic) -> Result<(Formula, Formula, Derivation), String> {
    let a = g.formula(1);
    let b = g.formula(1);
    let mut bld = Builder::new(logic, ConstantSpec::schematic());
    let (chi, psi, schema) = match g.rng().gen_range(0..3) {
        0 => (Formula::and(a.clone(), b), a, SchemaId::And1),
        1 => (a.clone(), Formula::or(a, b), SchemaId::Or1),
        _ => {
            let t = g.term(1);
            let xs = templates::wit(&a);
            (Formula::just(t, xs, a.clone()), a, SchemaId::B1)
        }
    };
    let idx = bld.ax(schema, Formula::implies(chi.clone(), psi.clone())).map_err(|e| e.to_string())?;
    Ok((chi, psi, bld.finish(idx)))
}

fn template_transformers() -> Outcome {
    let mut counts = BTreeMap::new();
    for logic in [Logic::Folpb, Logic::Fojt45] {
        let mut g = Generator::new(GenConfig::new(logic, SEED));
        for i in 0..TRANSFORMER_INPUTS / 2 {
            // semi-replacement
            let n = g.rng().gen_range(0..=1);
            let template = positive_template(&mut g, n + 1);
            let phis: Vec<Formula> = (0..n).map(|_| g.formula(1)).collect();
            let (chi, psi, implication) = implication_theorem(&mut g, logic)?;
            let source: Vec<Formula> = phis.iter().cloned().chain([chi]).collect();
            let phi = g.member_of(&template, &source);
            let out = templates::semi_replacement(&template, &implication, &phis, &phi)
                .map_err(|e| format!("semi_replacement {i}: {e}"))?;
            let target: Vec<Formula> = phis.iter().cloned().chain([psi]).collect();
            ensure(templates::member(&template, &target, &out.theta) == Ok(true), || {
                format!("semi_replacement {i}: {} not in {template}", out.theta)
            })?;
            accepted(&out.derivation, &format!("semi_replacement {i}"))?;
            *counts.entry("semi_replacement").or_insert(0) += 1;

            // vacuous quantification
            let y = g.basic();
            let n = g.rng().gen_range(1..=2);
            let (template, _) = g.disjunctive_instance(n);
            let phis = formulas_avoiding(&mut g, n, &y);
            let psi = g.member_of(&template, &phis);
            let out = templates::vacuous_quantification(logic, &template, &phis, &psi, &y)
                .map_err(|e| format!("vacuous_quantification {i}: {e}"))?;
            ensure(templates::member(&template, &phis, &out.theta) == Ok(true), || {
                format!("vacuous_quantification {i}: {} not in {template}", out.theta)
            })?;
            accepted(&out.derivation, &format!("vacuous_quantification {i}"))?;
            *counts.entry("vacuous_quantification").or_insert(0) += 1;

            // generalized Barcan
            let y = g.basic();
            let n = g.rng().gen_range(0..=1);
            let (template, _) = g.disjunctive_instance(n + 1);
            let phis = formulas_avoiding(&mut g, n, &y);
            let phi_y = g.formula(1);
            let source: Vec<Formula> = phis.iter().cloned().chain([phi_y.clone()]).collect();
            let psi = g.member_of(&template, &source);
            let out = templates::generalized_barcan(logic, &template, &y, &phi_y, &phis, &psi)
                .map_err(|e| format!("generalized_barcan {i}: {e}"))?;
            let target: Vec<Formula> = phis.iter().cloned().chain([Formula::forall(y.clone(), phi_y)]).collect();
            ensure(templates::member(&template, &target, &out.theta) == Ok(true), || {
                format!("generalized_barcan {i}: {} not in {template}", out.theta)
            })?;
            accepted(&out.derivation, &format!("generalized_barcan {i}"))?;
            *counts.entry("generalized_barcan").or_insert(0) += 1;

            // combine
            let n = g.rng().gen_range(1..=2);
            let (template, phis) = g.disjunctive_instance(n);
            let k = g.rng().gen_range(1..=3);
            let psis: Vec<Formula> = (0..k).map(|_| g.member_of(&template, &phis)).collect();
            let out = templates::combine(logic, &template, &phis, &psis).map_err(|e| format!("combine {i}: {e}"))?;
            ensure(templates::member(&template, &phis, &out.theta) == Ok(true), || {
                format!("combine {i}: {} not in {template}", out.theta)
            })?;
            accepted(&out.derivation, &format!("combine {i}"))?;
            *counts.entry("combine").or_insert(0) += 1;
        }
    }
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!("every theta is a member and every derivation is accepted ({})", parts.join(", ")))
}

fn derivation_vars(d: &Derivation) -> VarSet {
    d.steps.iter().flat_map(|s| s.formula.all_vars()).collect()
}

fn witness_transformers() -> Outcome {
    let mut done = 0;
    let mut with_witness = 0;
    let mut kind = 0;
    for logic in [Logic::Folpb, Logic::Fojt45] {
        let mut g = Generator::new(GenConfig::new(logic, SEED));
        while done < WITNESS_DERIVATIONS * (1 + usize::from(logic == Logic::Fojt45)) / 2 {
            kind += 1;
            let Some((source, d)) = g.derivation(kind) else { continue };
            let vars = derivation_vars(&d);
            let in_conclusion = d.conclusion().map(Formula::witness_vars).unwrap_or_default();
            let a = in_conclusion
                .iter()
                .next()
                .cloned()
                .or_else(|| vars.iter().find(|v| v.is_witness()).cloned())
                .unwrap_or_else(|| Var::witness("d0"));
            if vars.contains(&a) {
                with_witness += 1;
            }
            let y = fresh_basic("y", &vars);
            let replaced = transform::replace_witness(&d, &a, &y).map_err(|e| format!("{source}: {e}"))?;
            accepted(&replaced, &format!("replace_witness on {source}"))?;
            let (z, general) = transform::generalize_witness(&d, &a).map_err(|e| format!("{source}: {e}"))?;
            accepted(&general, &format!("generalize_witness on {source}"))?;
            ensure(matches!(general.conclusion(), Some(Formula::Forall(v, _)) if *v == z), || {
                format!("generalize_witness on {source}: conclusion not generalized")
            })?;
            done += 1;
        }
    }

    let schematic = ConstantSpec::schematic();
    let mut cases = 0;
    let mut hits = 0;
    let mut g = Generator::new(GenConfig::new(Logic::Folpb, SEED));
    let schemas: Vec<SchemaId> = SchemaId::for_logic(Logic::Folpb).collect();
    while cases < CS_CASES {
        let schema = *schemas.choose(g.rng()).expect("non-empty");
        let f = if g.rng().gen_bool(0.8) { g.axiom_instance(schema) } else { g.formula(2) };
        if f.has_witness() {
            continue;
        }
        let explicit = ConstantSpec::Explicit(vec![("c0".into(), f.clone()), ("c1".into(), g.formula(2))]);
        let probes = [
            (&schematic, schema.default_constant()),
            (&explicit, "c0".to_string()),
            (&explicit, "c1".to_string()),
        ];
        for (cs, c) in probes {
            let plain = cs_contains(cs, &c, &f, Logic::Folpb).map_err(|e| e.to_string())?;
            let extended = csv_contains(cs, &c, &f, Logic::Folpb).map_err(|e| e.to_string())?;
            ensure(plain == extended, || format!("{c} : {f}: cs={plain} csv={extended}"))?;
            hits += usize::from(plain);
        }
        cases += 1;
    }
    Ok(format!(
        "{done} derivations ({with_witness} with the witness present) transformed and accepted; \
         csv_contains = cs_contains on {cases} witness-free formulas ({hits} memberships)"
    ))
}

fn syntax_and_semantics() -> Outcome {
    let mut g = Generator::new(GenConfig::new(Logic::Folpb, SEED));
    for i in 0..ROUND_TRIPS {
        let depth = i % 5;
        let f = if i % 3 == 0 { g.just(depth) } else { g.formula(depth) };
        let back = parse_formula(&print_formula(&f)).map_err(|e| format!("{f}: {e}"))?;
        ensure(back == f, || format!("round trip changed {f} into {back}"))?;
        let t = g.term(depth.min(3));
        let back = parse_term(&print_term(&t)).map_err(|e| format!("{t}: {e}"))?;
        ensure(back == t, || format!("round trip changed {t} into {back}"))?;
        if let Formula::Just(_, xs, _) = &f {
            ensure(f.free_vars() == *xs, || format!("free variables of {f}"))?;
        }
    }

    let mut evaluations = 0;
    let mut models = 0;
    for logic in [Logic::Folpb, Logic::Fojt45] {
        for n in 1..=EVAL_MAX_WORLDS {
            for rel in frames(n, logic) {
                for size in 1..=EVAL_MAX_DOMAIN {
                    let mut cfg = GenConfig::new(logic, SEED ^ (n * 31 + size) as u64);
                    cfg.max_domain = size;
                    cfg.max_worlds = n;
                    let mut g = Generator::new(cfg);
                    for kind in [EvidenceKind::Full, EvidenceKind::Table, EvidenceKind::Closure] {
                        if kind == EvidenceKind::Full && logic == Logic::Fojt45 {
                            continue;
                        }
                        let targets: Vec<Formula> = (0..4)
                            .map(|k| {
                                let f = if k % 2 == 0 { g.just(EVAL_DEPTH - 1) } else { g.formula(EVAL_DEPTH) };
                                f.universal_closure()
                            })
                            .collect();
                        let refs: Vec<&Formula> = targets.iter().collect();
                        let cs = ConstantSpec::Explicit(vec![("c0".into(), g.formula(1))]);
                        let m = g.model_on(n, rel.clone(), size, &refs, &cs, kind);
                        models += 1;
                        let ev = Evaluator::new(&m, Fault::None);
                        for f in &targets {
                            for w in 0..n {
                                let Some(naive) = reference_eval(&m, w, f) else { continue };
                                let fast = ev.eval(w, f).map_err(|e| format!("{f}: {e}"))?;
                                ensure(fast == naive, || format!("eval disagrees at w{w} on {f}"))?;
                                evaluations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    ensure(evaluations > 0, || "no evaluations compared".into())?;
    Ok(format!(
        "{ROUND_TRIPS} formula and term round trips, fv of justifications, \
         {evaluations} evaluations on {models} models agree with the reference"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden corpus", golden_corpus),
        ("mutation suite", mutation_suite),
        ("soundness fuzz", soundness),
        ("internalization", internalization),
        ("template membership", template_membership),
        ("template transformers", template_transformers),
        ("witness transformers", witness_transformers),
        ("syntax and semantics", syntax_and_semantics),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{took:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

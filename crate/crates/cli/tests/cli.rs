use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const HYPOTHETICAL: &str = "logic FOLPb
cs schematic
hyp 1: [p1]{x} P(x)
hyp 2: [p2]{x} (P(x) -> Q(x))
1. [p1]{x} P(x) ; HYP 1
2. ([p1]{x} P(x) -> P(x)) ; AX B1
3. P(x) ; MP 1 2
4. [p2]{x} (P(x) -> Q(x)) ; HYP 2
5. ([p2]{x} (P(x) -> Q(x)) -> (P(x) -> Q(x))) ; AX B1
6. (P(x) -> Q(x)) ; MP 4 5
7. Q(x) ; MP 3 6
";

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn jl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jl")).args(args).output().expect("jl runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn check_file(path: &Path) -> Output {
    jl(&["check", path.to_str().unwrap()])
}

#[test]
fn golden_files_check() {
    for name in ["converse_barcan.jd", "converse_buridan.jd", "jt45_barcan.jd", "lemmas/query_lemma.jd", "lemmas/query_refutation.jd"] {
        let out = check_file(&corpus(name));
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        assert!(stdout(&out).contains("verdict=accepted"));
    }
}

#[test]
fn lemmas_need_taut() {
    let out = jl(&["check", corpus("lemmas/query_lemma.jd").to_str().unwrap(), "--no-taut"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("reason=TautNotAllowed"));
}

#[test]
fn mutants_report_their_step() {
    for (name, step, reason) in [
        ("m01.jd", 4, "MpMismatch"),
        ("m02.jd", 1, "BadAxiomInstance"),
        ("m03.jd", 2, "BadCsEntry"),
        ("m04.jd", 12, "GenShapeMismatch"),
        ("m05.jd", 3, "MpMismatch"),
    ] {
        let out = check_file(&corpus(&format!("mutants/{name}")));
        assert_eq!(out.status.code(), Some(1), "{name}");
        let text = stdout(&out);
        assert!(text.contains(&format!("step={step}\n")), "{name}: {text}");
        assert!(text.contains(&format!("reason={reason}\n")), "{name}: {text}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(jl(&["bogus"]).status.code(), Some(2));
    assert_eq!(jl(&["check"]).status.code(), Some(2));
    assert_eq!(jl(&["fuzz", "soundness", "--seed", "1", "--trials", "5", "--logic", "S5"]).status.code(), Some(2));
}

#[test]
fn unreadable_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jd");
    std::fs::write(&bad, "logic FOLPb\n1. (P ; AX A1.UI\n").unwrap();
    assert_eq!(check_file(&bad).status.code(), Some(2));
    assert_eq!(check_file(&dir.path().join("missing.jd")).status.code(), Some(2));
}

#[test]
fn fuzz_summary() {
    let out = jl(&["fuzz", "soundness", "--seed", "42", "--trials", "500", "--logic", "FOLPb"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("violations=0"), "{}", stdout(&out));
}

#[test]
fn fuzz_notices_a_fault() {
    let out = jl(&["fuzz", "soundness", "--seed", "42", "--trials", "500", "--logic", "FOLPb", "--fault", "skip-r-closure"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn derive_reproduces_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, logic, name) in [
        ("cbarcan", "FOLPb", "converse_barcan.jd"),
        ("cburidan", "FOLPb", "converse_buridan.jd"),
        ("jt45barcan", "FOJT45", "jt45_barcan.jd"),
    ] {
        let target = dir.path().join(name);
        let out = jl(&[
            "derive", kind, "--term", "t", "--subscript", "", "--var", "y", "--formula", "P(y)", "--logic", logic, "-o",
            target.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(std::fs::read_to_string(&target).unwrap(), std::fs::read_to_string(corpus(name)).unwrap(), "{kind}");
    }
}

#[test]
fn internalize_and_deduce_produce_checkable_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("hyp.jd");
    std::fs::write(&input, HYPOTHETICAL).unwrap();
    assert_eq!(check_file(&input).status.code(), Some(0));

    let lifted = dir.path().join("lifted.jd");
    let out = jl(&["internalize", input.to_str().unwrap(), "-o", lifted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&check_file(&lifted));
    assert!(text.contains("verdict=accepted"), "{text}");
    assert!(text.contains("]{x} Q(x)"), "{text}");

    let discharged = dir.path().join("discharged.jd");
    let out = jl(&["deduce", input.to_str().unwrap(), "--hyp", "2", "-o", discharged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&check_file(&discharged));
    assert!(text.contains("conclusion=([p2]{x} (P(x) -> Q(x)) -> Q(x))"), "{text}");
}

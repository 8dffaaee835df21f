//! `jl`: batch front end for the justlogic kernel, transformers and models.
//!
//! Exit status 0 means success or pass, 1 a rejection or violation, 2 a usage
//! or parse error. Reports go to stdout, one `key=value` record per line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use justlogic::harness::{run_soundness, GenConfig};
use justlogic::kernel::{check_with, CheckOptions, Verdict};
use justlogic::semantics::{audit, Evaluator, Fault};
use justlogic::templates::{self, Template, Transformed};
use justlogic::textio::{parse_derivation_file, parse_formula, parse_model, parse_term, print_derivation};
use justlogic::transform::{self, Synthesis};
use justlogic::{Derivation, Formula, Logic, Var, VarSet};

const GRAMMAR: &str = "\
grammar:
  jl check <file> [--no-taut]
  jl internalize <file> -o <out>
  jl deduce <file> --hyp <k> -o <out>
  jl derive cbarcan|cburidan|jt45barcan --term <t> --subscript <X> --var <y> --formula <A> [--logic <L>] -o <out>
  jl model eval <model> --world <w> --formula <A>
  jl model audit <model>
  jl template member --template <F> [--phi <A>]... --psi <A>
  jl template combine --template <F> [--phi <A>]... --psi <A>... [--logic <L>] -o <out>
  jl template semi --template <F> --implication <file> [--phi <A>]... --member <A> -o <out>
  jl template vacuous --template <F> [--phi <A>]... --psi <A> --var <y> [--logic <L>] -o <out>
  jl template genbarcan --template <F> [--phi <A>]... --var <y> --formula <A> --psi <A> [--logic <L>] -o <out>
  jl fuzz soundness --seed <n> --trials <k> --logic <L> [--fault <f>]
templates: F ::= pN | ~F | (F & F) | (F | F) | box F
subscripts: comma-separated variables, e.g. `x,@a`, or an empty string";

#[derive(Parser)]
#[command(name = "jl", version, about = "Proof checking and model tools for FOLPb and FOJT45")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a derivation file.
    Check {
        file: PathBuf,
        /// Reject TAUT steps.
        #[arg(long)]
        no_taut: bool,
    },
    /// Lift a derivation from justified hypotheses to a justified conclusion.
    Internalize {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Discharge hypothesis `k` of a derivation.
    Deduce {
        file: PathBuf,
        #[arg(long)]
        hyp: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Synthesize one of the explicit Barcan-style derivations.
    Derive(DeriveArgs),
    #[command(subcommand)]
    Model(ModelCommand),
    #[command(subcommand)]
    Template(TemplateCommand),
    #[command(subcommand)]
    Fuzz(FuzzCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Synth {
    Cbarcan,
    Cburidan,
    Jt45barcan,
}

#[derive(Args)]
struct DeriveArgs {
    kind: Synth,
    #[arg(long)]
    term: String,
    #[arg(long, allow_hyphen_values = true)]
    subscript: String,
    #[arg(long)]
    var: String,
    #[arg(long)]
    formula: String,
    /// Ignored by jt45barcan, which is always FOJT45.
    #[arg(long, default_value = "FOLPb")]
    logic: String,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Truth of a closed formula at a world.
    Eval {
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
    },
    /// Check the evidence conditions of a model.
    Audit { model: PathBuf },
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    template: String,
    #[arg(long = "phi")]
    phis: Vec<String>,
}

#[derive(Subcommand)]
enum TemplateCommand {
    Member {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        psi: String,
    },
    Combine {
        #[command(flatten)]
        shape: Shape,
        #[arg(long = "psi", required = true)]
        psis: Vec<String>,
        #[arg(long, default_value = "FOLPb")]
        logic: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    Semi {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        implication: PathBuf,
        #[arg(long)]
        member: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    Vacuous {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        psi: String,
        #[arg(long)]
        var: String,
        #[arg(long, default_value = "FOLPb")]
        logic: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    Genbarcan {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        var: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value = "FOLPb")]
        logic: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    SkipRClosure,
    SkipB,
    SkipQuery,
}

#[derive(Subcommand)]
enum FuzzCommand {
    Soundness {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        logic: String,
        /// Deliberate evaluator fault, for checking that the fuzzer notices.
        #[arg(long, value_enum, default_value = "none")]
        fault: FaultArg,
    },
}

/// A failure carrying its exit status.
enum Failure {
    Usage(String),
    Rejected,
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn logic(text: &str) -> Result<Logic, Failure> {
    text.parse().map_err(|e| usage(format!("--logic: {e}")))
}

fn formula(flag: &str, text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| usage(format!("{flag}: {e}")))
}

fn formulas(flag: &str, texts: &[String]) -> Result<Vec<Formula>, Failure> {
    texts.iter().map(|t| formula(flag, t)).collect()
}

fn variable(flag: &str, text: &str) -> Result<Var, Failure> {
    let name = text.trim();
    let bare = name.strip_prefix('@').unwrap_or(name);
    let ok = bare.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && bare.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok {
        return Err(usage(format!("{flag}: `{text}` is not a variable")));
    }
    Ok(Var::new(name))
}

fn subscript(text: &str) -> Result<VarSet, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| variable("--subscript", s))
        .collect()
}

fn template(text: &str) -> Result<Template, Failure> {
    Template::parse(text).map_err(|e| usage(format!("--template: {e}")))
}

fn read_derivation(path: &Path) -> Result<Derivation, Failure> {
    parse_derivation_file(path).map_err(usage)
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_derivation(path: &Path, d: &Derivation) -> Outcome {
    write(path, &print_derivation(d))?;
    println!("out={}", path.display());
    println!("steps={}", d.steps.len());
    Ok(())
}

fn run_check(file: &Path, no_taut: bool) -> Outcome {
    let d = read_derivation(file)?;
    let report = check_with(&d, CheckOptions { allow_taut: !no_taut });
    println!("file={}", file.display());
    println!("steps={}", report.steps);
    match report.verdict {
        Verdict::Accepted => {
            println!("verdict=accepted");
            if let Some(c) = d.conclusion() {
                println!("conclusion={c}");
            }
            Ok(())
        }
        Verdict::Rejected { step, reason, detail } => {
            println!("verdict=rejected");
            println!("step={step}");
            println!("reason={reason}");
            println!("detail={detail}");
            Err(Failure::Rejected)
        }
    }
}

fn run_derive(args: &DeriveArgs) -> Outcome {
    let t = parse_term(&args.term).map_err(|e| usage(format!("--term: {e}")))?;
    let xs = subscript(&args.subscript)?;
    let y = variable("--var", &args.var)?;
    let phi = formula("--formula", &args.formula)?;
    let synthesized: Result<Synthesis, _> = match args.kind {
        Synth::Cbarcan => transform::converse_barcan(logic(&args.logic)?, &t, &xs, &y, &phi),
        Synth::Cburidan => transform::converse_buridan(logic(&args.logic)?, &t, &xs, &y, &phi),
        Synth::Jt45barcan => transform::jt45_barcan(&t, &xs, &y, &phi),
    };
    let s = synthesized.map_err(usage)?;
    println!("term={}", s.term);
    println!("milestones={}", s.derivation.milestone_numbers().len());
    write_derivation(&args.out, &s.derivation)
}

fn report_transformed(out: &Path, result: Result<Transformed, templates::TemplateError>) -> Outcome {
    let t = result.map_err(usage)?;
    println!("theta={}", t.theta);
    write_derivation(out, &t.derivation)
}

fn run_template(cmd: &TemplateCommand) -> Outcome {
    match cmd {
        TemplateCommand::Member { shape, psi } => {
            let f = template(&shape.template)?;
            let phis = formulas("--phi", &shape.phis)?;
            let psi = formula("--psi", psi)?;
            let member = templates::member(&f, &phis, &psi).map_err(usage)?;
            println!("template={f}");
            println!("degree={}", f.degree());
            println!("member={member}");
            if member {
                Ok(())
            } else {
                Err(Failure::Rejected)
            }
        }
        TemplateCommand::Combine { shape, psis, logic: l, out } => {
            let f = template(&shape.template)?;
            let phis = formulas("--phi", &shape.phis)?;
            let psis = formulas("--psi", psis)?;
            report_transformed(out, templates::combine(logic(l)?, &f, &phis, &psis))
        }
        TemplateCommand::Semi { shape, implication, member, out } => {
            let f = template(&shape.template)?;
            let phis = formulas("--phi", &shape.phis)?;
            let d = read_derivation(implication)?;
            let member = formula("--member", member)?;
            report_transformed(out, templates::semi_replacement(&f, &d, &phis, &member))
        }
        TemplateCommand::Vacuous { shape, psi, var, logic: l, out } => {
            let f = template(&shape.template)?;
            let phis = formulas("--phi", &shape.phis)?;
            let psi = formula("--psi", psi)?;
            let y = variable("--var", var)?;
            report_transformed(out, templates::vacuous_quantification(logic(l)?, &f, &phis, &psi, &y))
        }
        TemplateCommand::Genbarcan { shape, var, formula: phi_y, psi, logic: l, out } => {
            let f = template(&shape.template)?;
            let phis = formulas("--phi", &shape.phis)?;
            let y = variable("--var", var)?;
            let phi_y = formula("--formula", phi_y)?;
            let psi = formula("--psi", psi)?;
            report_transformed(out, templates::generalized_barcan(logic(l)?, &f, &y, &phi_y, &phis, &psi))
        }
    }
}

fn run_model(cmd: &ModelCommand) -> Outcome {
    let path = match cmd {
        ModelCommand::Eval { model, .. } | ModelCommand::Audit { model } => model,
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let m = parse_model(&text).map_err(usage)?;
    match cmd {
        ModelCommand::Eval { world, formula: f, .. } => {
            let w = m.world_index(world).map_err(|e| usage(format!("--world: {e}")))?;
            let f = formula("--formula", f)?;
            let value = Evaluator::new(&m, Fault::None).eval(w, &f).map_err(usage)?;
            println!("world={world}");
            println!("value={value}");
            if value {
                Ok(())
            } else {
                Err(Failure::Rejected)
            }
        }
        ModelCommand::Audit { .. } => {
            let report = audit(&m);
            for v in &report.violations {
                println!("violation condition={} instance={}", v.condition, v.instance);
            }
            for n in &report.notes {
                println!("note={n}");
            }
            println!("violations={}", report.violations.len());
            println!("verdict={}", if report.passed() { "pass" } else { "fail" });
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Rejected)
            }
        }
    }
}

fn run_fuzz(cmd: &FuzzCommand) -> Outcome {
    let FuzzCommand::Soundness { seed, trials, logic: l, fault } = cmd;
    let mut cfg = GenConfig::new(logic(l)?, *seed);
    cfg.trials = *trials;
    cfg.fault = match fault {
        FaultArg::None => Fault::None,
        FaultArg::SkipRClosure => Fault::SkipRClosure,
        FaultArg::SkipB => Fault::SkipBCondition,
        FaultArg::SkipQuery => Fault::SkipQueryCondition,
    };
    let report = run_soundness(&cfg);
    for v in &report.violations {
        println!("violation trial={} source={} formula={} detail={}", v.trial, v.source, v.formula, v.detail);
    }
    println!("{}", report.summary());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { file, no_taut } => run_check(&file, no_taut),
        Command::Internalize { file, out } => {
            let d = read_derivation(&file)?;
            let lifted = transform::internalize(&d).map_err(usage)?;
            println!("term={}", lifted.term);
            let xs: Vec<String> = lifted.subscript.iter().map(|v| v.to_string()).collect();
            println!("subscript={}", xs.join(","));
            write_derivation(&out, &lifted.derivation)
        }
        Command::Deduce { file, hyp, out } => {
            let d = read_derivation(&file)?;
            let discharged = transform::deduction(&d, hyp).map_err(usage)?;
            if let Some(c) = discharged.conclusion() {
                println!("conclusion={c}");
            }
            write_derivation(&out, &discharged)
        }
        Command::Derive(args) => run_derive(&args),
        Command::Model(cmd) => run_model(&cmd),
        Command::Template(cmd) => run_template(&cmd),
        Command::Fuzz(cmd) => run_fuzz(&cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("{GRAMMAR}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{GRAMMAR}");
            ExitCode::from(2)
        }
    }
}

//! Batch command-line frontend.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 usage or input error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interpolation::interpolate;
use crate::proofsys::{
    bounded_lindenbaum, canonical_model, check_proof, closure, condition_check, CanonicalMode,
    Condition, ProofDocument, ProofSystem,
};
use crate::semantics::{evaluate, falsifying_valuation, relation_validates, Model, Relation};
use crate::sset::{
    enumerate_omega, falsify_sset_invariance, sample_equivalents, sset_member,
    undefinability_counterexample, MembershipVerdict, TargetCondition,
};
use crate::syntax::{parse, Formula, FormulaKind};
use crate::translation::{consequence_countermodel, countermodel, parse_cpl, translate};
use crate::witnesses;

#[derive(Parser, Debug)]
#[command(name = "epstein", version, about = "Relatedness logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Model (or relation) JSON file.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Formula text; an alternative to the positional argument.
    #[arg(long, global = true)]
    formula: Option<String>,
    /// Proof JSON file.
    #[arg(long, global = true)]
    proof: Option<PathBuf>,
    /// F, FS, FN or FSN.
    #[arg(long, global = true)]
    system: Option<String>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Accepted for scripting compatibility; every command runs on one thread.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Plain-text verdicts only.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the syntax tree as JSON.
    Parse { text: Option<String> },
    /// Print the formula with minimal parentheses.
    Print { text: Option<String> },
    /// Truth of a formula in the --model.
    Eval { text: Option<String> },
    /// Whether the relation of --model validates a formula.
    Validate { text: Option<String> },
    /// Classical translation.
    Translate { text: Option<String> },
    /// Membership in the base logic, with a countermodel if it fails.
    Theorem { text: Option<String> },
    /// Whether the premises entail --formula.
    Consequence { premises: Vec<String> },
    Proof {
        #[command(subcommand)]
        command: ProofCommand,
    },
    Omega {
        #[command(subcommand)]
        command: OmegaCommand,
    },
    Sset {
        #[command(subcommand)]
        command: SsetCommand,
    },
    Invariance {
        #[command(subcommand)]
        command: InvarianceCommand,
    },
    /// Interpolant for a valid implication.
    Interpolate {
        antecedent: String,
        consequent: String,
    },
    Demo {
        #[command(subcommand)]
        command: DemoCommand,
    },
    /// Bounded maximal consistent extension of the premises.
    Lindenbaum { premises: Vec<String> },
    /// Canonical model of the bounded extension of the premises.
    Canonical { premises: Vec<String> },
}

#[derive(Subcommand, Debug)]
enum ProofCommand {
    /// Check the --proof file.
    Check,
}

#[derive(Subcommand, Debug)]
enum OmegaCommand {
    /// First --samples pairs of the Ω-set of --model.
    List,
}

#[derive(Subcommand, Debug)]
enum SsetCommand {
    /// Whether OTHER lies in the S-set of --model.
    Member { other: PathBuf },
    /// --samples distinct members of the S-set of --model.
    Sample,
}

#[derive(Subcommand, Debug)]
enum InvarianceCommand {
    /// Search for an S-set pair that separates a classical formula over pair atoms.
    Fuzz { text: Option<String> },
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    /// S-equivalent relations differing on a frame condition.
    Undefinability {
        #[arg(long, default_value = "symmetry")]
        condition: String,
    },
    /// Models witnessing incompleteness and separation of extensions.
    Incompleteness {
        /// alpha, kt, lambda or all.
        #[arg(long, default_value = "all")]
        witness: String,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        v: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        s: Vec<usize>,
    },
    /// Exhaustive check that no small formula defines membership of ⟨⊤, ⊥⟩.
    Inexpressibility,
}

enum Outcome {
    Yes,
    No,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut ctx = Ctx {
        common: &cli.common,
        out,
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok(Outcome::Yes) => 0,
        Ok(Outcome::No) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

struct Ctx<'a> {
    common: &'a Common,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{s}")?;
        Ok(())
    }

    fn json(&mut self, v: &impl Serialize) -> Result<()> {
        let s = serde_json::to_string_pretty(v)?;
        self.line(s)
    }

    /// Verdict word, then the artifact unless `--quiet`.
    fn verdict(&mut self, word: &str, artifact: Option<&dyn erased::Json>) -> Result<()> {
        self.line(word)?;
        if let (false, Some(a)) = (self.common.quiet, artifact) {
            let s = a.to_pretty()?;
            self.line(s)?;
        }
        Ok(())
    }

    fn formula(&self, positional: &Option<String>) -> Result<Formula> {
        match (positional, &self.common.formula) {
            (Some(t), _) | (None, Some(t)) => parse(t),
            (None, None) => Err(Error::Invalid(
                "no formula given (positional or --formula)".into(),
            )),
        }
    }

    fn model(&self) -> Result<Model> {
        let path = self.require_model()?;
        read_json(path)
    }

    fn require_model(&self) -> Result<&Path> {
        self.common
            .model
            .as_deref()
            .ok_or_else(|| Error::Invalid("--model FILE is required".into()))
    }

    /// A relation file, or the relation of a model file.
    fn relation(&self) -> Result<Relation> {
        let path = self.require_model()?;
        let value: Value = read_json(path)?;
        if value.get("relation").is_some() {
            Ok(serde_json::from_value::<Model>(value)?.relation)
        } else {
            Ok(serde_json::from_value(value)?)
        }
    }

    fn system(&self) -> Result<ProofSystem> {
        self.common.system.as_deref().unwrap_or("F").parse()
    }

    fn samples(&self, default: usize) -> usize {
        self.common.samples.unwrap_or(default)
    }
}

// Lets `verdict` take any serializable artifact.
mod erased {
    pub trait Json {
        fn to_pretty(&self) -> serde_json::Result<String>;
    }

    impl<T: serde::Serialize> Json for T {
        fn to_pretty(&self) -> serde_json::Result<String> {
            serde_json::to_string_pretty(self)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_all(texts: &[String]) -> Result<Vec<Formula>> {
    texts.iter().map(|t| parse(t)).collect()
}

fn tree(phi: &Formula) -> Value {
    match phi.kind() {
        FormulaKind::Letter(_) => json!({ "letter": phi.to_string() }),
        FormulaKind::Neg(x) => json!({ "op": "neg", "arg": tree(x) }),
        FormulaKind::Bin(op, l, r) => {
            json!({ "op": op_name(*op), "left": tree(l), "right": tree(r) })
        }
    }
}

fn op_name(op: crate::syntax::Connective) -> &'static str {
    use crate::syntax::Connective::*;
    match op {
        And => "and",
        Or => "or",
        Imp => "imp",
        Iff => "iff",
        RelImp => "rel_imp",
        RelConj => "rel_conj",
    }
}

fn index_set(name: &str, xs: &[usize]) -> Result<BTreeSet<usize>> {
    let s: BTreeSet<usize> = xs.iter().copied().collect();
    if s.is_empty() {
        return Err(Error::Invalid(format!("--{name} needs at least one index")));
    }
    Ok(s)
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Parse { text } => {
            let phi = ctx.formula(text)?;
            if ctx.common.quiet {
                ctx.line(&phi)?;
            } else {
                ctx.json(&tree(&phi))?;
            }
            Ok(Outcome::Yes)
        }
        Command::Print { text } => {
            let phi = ctx.formula(text)?;
            ctx.line(&phi)?;
            Ok(Outcome::Yes)
        }
        Command::Eval { text } => {
            let phi = ctx.formula(text)?;
            let model = ctx.model()?;
            let value = evaluate(&model, &phi);
            ctx.line(value)?;
            Ok(if value { Outcome::Yes } else { Outcome::No })
        }
        Command::Validate { text } => {
            let phi = ctx.formula(text)?;
            let relation = ctx.relation()?;
            if relation_validates(&relation, &phi)? {
                ctx.verdict("valid", None)?;
                return Ok(Outcome::Yes);
            }
            let vars: Vec<u32> = phi.vars().into_iter().collect();
            let v = falsifying_valuation(&relation, &phi, &vars)
                .ok_or_else(|| Error::Invalid("no falsifying valuation found".into()))?;
            ctx.verdict("invalid", Some(&Model::new(v, relation)))?;
            Ok(Outcome::No)
        }
        Command::Translate { text } => {
            let phi = ctx.formula(text)?;
            let st = translate(&phi);
            if ctx.common.quiet {
                ctx.line(&st)?;
            } else {
                ctx.json(&json!({ "formula": phi, "translation": st, "atoms": st.atoms().iter().map(|a| a.to_string()).collect::<Vec<_>>() }))?;
            }
            Ok(Outcome::Yes)
        }
        Command::Theorem { text } => {
            let phi = ctx.formula(text)?;
            match countermodel(&phi) {
                None => {
                    ctx.verdict("valid", None)?;
                    Ok(Outcome::Yes)
                }
                Some(m) => {
                    ctx.verdict("invalid", Some(&m))?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::Consequence { premises } => {
            let phi = ctx.formula(&None)?;
            let sigma = parse_all(premises)?;
            match consequence_countermodel(&sigma, &phi) {
                None => {
                    ctx.verdict("follows", None)?;
                    Ok(Outcome::Yes)
                }
                Some(m) => {
                    ctx.verdict("does not follow", Some(&m))?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::Proof {
            command: ProofCommand::Check,
        } => {
            let path = ctx
                .common
                .proof
                .as_deref()
                .ok_or_else(|| Error::Invalid("--proof FILE is required".into()))?;
            let doc: ProofDocument = read_json(path)?;
            let sys = match &ctx.common.system {
                Some(_) => ctx.system()?,
                None => doc.system.to_system()?,
            };
            let report = check_proof(&sys, &doc.proof);
            let word = if report.ok { "accepted" } else { "rejected" };
            ctx.verdict(word, Some(&report))?;
            Ok(if report.ok { Outcome::Yes } else { Outcome::No })
        }
        Command::Omega {
            command: OmegaCommand::List,
        } => {
            let model = ctx.model()?;
            let pairs = enumerate_omega(&model, ctx.samples(20));
            if ctx.common.quiet {
                for p in &pairs {
                    ctx.line(p)?;
                }
            } else {
                ctx.json(&pairs)?;
            }
            Ok(Outcome::Yes)
        }
        Command::Sset {
            command: SsetCommand::Member { other },
        } => {
            let m = ctx.model()?;
            let n: Model = read_json(other)?;
            let verdict = sset_member(&m, &n);
            let word = match &verdict {
                MembershipVerdict::Yes => "yes",
                MembershipVerdict::No { .. } => "no",
                MembershipVerdict::Unknown { .. } => "unknown",
            };
            ctx.verdict(word, Some(&verdict))?;
            Ok(if verdict.is_yes() {
                Outcome::Yes
            } else {
                Outcome::No
            })
        }
        Command::Sset {
            command: SsetCommand::Sample,
        } => {
            let m = ctx.model()?;
            let models = sample_equivalents(&m, ctx.samples(10), ctx.common.seed);
            ctx.json(&models)?;
            Ok(Outcome::Yes)
        }
        Command::Invariance {
            command: InvarianceCommand::Fuzz { text },
        } => {
            let source = text
                .as_ref()
                .or(ctx.common.formula.as_ref())
                .ok_or_else(|| {
                    Error::Invalid("no formula given (positional or --formula)".into())
                })?;
            let a = parse_cpl(source)?;
            match falsify_sset_invariance(
                &a,
                ctx.samples(100),
                ctx.common.depth.unwrap_or(20),
                ctx.common.seed,
            ) {
                Some((m, n)) => {
                    ctx.verdict(
                        "not invariant",
                        Some(&json!({ "satisfying": m, "falsifying": n })),
                    )?;
                    Ok(Outcome::No)
                }
                None => {
                    ctx.verdict("no witness within budget", None)?;
                    Ok(Outcome::Yes)
                }
            }
        }
        Command::Interpolate {
            antecedent,
            consequent,
        } => {
            let phi = parse(antecedent)?;
            let psi = parse(consequent)?;
            match interpolate(&phi, &psi, ctx.common.depth.unwrap_or(3))? {
                Some(result) => {
                    if ctx.common.quiet {
                        ctx.line(&result.interpolant)?;
                    } else {
                        ctx.json(&result)?;
                    }
                    Ok(if result.verified() {
                        Outcome::Yes
                    } else {
                        Outcome::No
                    })
                }
                None => {
                    ctx.line("no interpolant within depth")?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::Demo { command } => demo(command, ctx),
        Command::Lindenbaum { premises } => {
            let sigma = parse_all(premises)?;
            let sys = ctx.system()?;
            match bounded_lindenbaum(&sys, &sigma, &closure(&sigma))? {
                Some(mcs) => {
                    ctx.verdict("consistent", Some(&mcs))?;
                    Ok(Outcome::Yes)
                }
                None => {
                    ctx.verdict("inconsistent", None)?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::Canonical { premises } => {
            let sigma = parse_all(premises)?;
            let sys = ctx.system()?;
            let universe = closure(&sigma);
            let Some(mcs) = bounded_lindenbaum(&sys, &sigma, &universe)? else {
                ctx.verdict("inconsistent", None)?;
                return Ok(Outcome::No);
            };
            let mode = sys.mode();
            let model = canonical_model(&mcs, mode);
            let exact = universe
                .iter()
                .all(|x| evaluate(&model, x) == mcs.contains(x));
            let mut conditions = serde_json::Map::new();
            let wanted: &[Condition] = match mode {
                CanonicalMode::Plain => &[],
                CanonicalMode::S => &[Condition::Symmetry],
                CanonicalMode::N => &[Condition::NCondition],
                CanonicalMode::SN => &[Condition::Symmetry, Condition::NCondition],
            };
            for &c in wanted {
                conditions.insert(
                    c.to_string(),
                    serde_json::to_value(condition_check(&model.relation, c))?,
                );
            }
            let report = json!({ "model": model, "members": mcs.members, "exact_on_universe": exact, "conditions": conditions });
            ctx.verdict(if exact { "exact" } else { "inexact" }, Some(&report))?;
            Ok(if exact { Outcome::Yes } else { Outcome::No })
        }
    }
}

fn demo(cmd: &DemoCommand, ctx: &mut Ctx) -> Result<Outcome> {
    let reports = match cmd {
        DemoCommand::Undefinability { condition } => {
            let condition: TargetCondition = condition.parse()?;
            let base = match ctx.common.model {
                Some(_) => ctx.relation()?,
                None => Relation::Empty,
            };
            let record = undefinability_counterexample(condition, &base)?;
            let ok = record.membership_checks.iter().all(|c| c.verdict.is_yes());
            ctx.verdict(if ok { "pass" } else { "fail" }, Some(&record))?;
            return Ok(if ok { Outcome::Yes } else { Outcome::No });
        }
        DemoCommand::Incompleteness { witness, t, v, s } => {
            let sample = ctx.samples(100);
            let seed = ctx.common.seed;
            let all = witness == "all";
            let mut reports = Vec::new();
            if !all && !matches!(witness.as_str(), "alpha" | "kt" | "lambda") {
                return Err(Error::Invalid(format!("unknown witness {witness:?}")));
            }
            if all || witness == "alpha" {
                reports.push(witnesses::alpha_nonderivability_model(sample, seed));
            }
            if all || witness == "kt" {
                reports.push(witnesses::kt_separation(
                    &index_set("t", t)?,
                    &index_set("v", v)?,
                    sample,
                    seed,
                )?);
            }
            if all || witness == "lambda" {
                reports.push(witnesses::lambda_incompleteness(
                    &index_set("s", s)?,
                    sample,
                    seed,
                )?);
            }
            reports
        }
        DemoCommand::Inexpressibility => vec![witnesses::inexpressibility_sweep(
            ctx.common.depth.unwrap_or(5),
        )?],
    };
    let ok = reports.iter().all(|r| r.passed());
    ctx.verdict(if ok { "pass" } else { "fail" }, Some(&reports))?;
    Ok(if ok { Outcome::Yes } else { Outcome::No })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("epstein").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn theorem_verdicts() {
        let (code, out, _) = run_str(&["theorem", "(p ~> q) -> (p -> q)"]);
        assert_eq!((code, out.as_str()), (0, "valid\n"));
        let (code, out, _) = run_str(&["theorem", "p ~> p"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("invalid\n"));
        let m: Model = serde_json::from_str(&out["invalid\n".len()..]).unwrap();
        assert!(!evaluate(&m, &parse("p ~> p").unwrap()));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["theorem", "p ~>"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["eval", "p"]).0, 2);
        assert_eq!(run_str(&["--jobs", "0", "print", "p"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn print_and_parse() {
        assert_eq!(run_str(&["print", "((p & q))"]).1, "p & q\n");
        assert_eq!(
            run_str(&["--quiet", "parse", "--formula", "p ~> p"]).1,
            "p ~> p\n"
        );
        let (_, out, _) = run_str(&["parse", "!p"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v, json!({"op": "neg", "arg": {"letter": "p"}}));
    }

    #[test]
    fn demos_pass() {
        let (code, out, _) = run_str(&[
            "demo",
            "undefinability",
            "--condition",
            "n-condition",
            "--quiet",
        ]);
        assert_eq!((code, out.as_str()), (0, "pass\n"));
        let (code, _, _) = run_str(&["demo", "incompleteness", "--samples", "20"]);
        assert_eq!(code, 0);
        assert_eq!(
            run_str(&["demo", "inexpressibility", "--depth", "2", "--quiet"]).1,
            "pass\n"
        );
    }
}

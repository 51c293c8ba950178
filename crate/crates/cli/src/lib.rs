//! Command-line adapter over the `sigmaterm` library.
//!
//! [`run`] parses an argument vector, calls the matching library operation
//! and returns an exit code with the report it would print. Exit codes:
//! 0 affirmative, 1 negative or refuted, 2 unknown or budget exhausted,
//! 64 usage error, 65 parse or validation error.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sigmaterm::deduction::{
    check_proof_with, closure_sample, CheckOptions, ClosureConfig, SideConditions,
};
use sigmaterm::essentiality::{position_sets, sigma_essential_positions, sigma_essential_vars, EssReport};
use sigmaterm::hyper::{default_pool, solidity_probe, stability_probe, ProbeConfig};
use sigmaterm::parse::parse_term_untyped;
use sigmaterm::{
    derive, enumerate_models, is_sigma_balanced, sigma_compose, Assignment, Balance, Derivation,
    Error, FiniteAlgebra, Hypersubstitution, Identity, Mode, Position, PositionStyle, Proof,
    Signature, System, Term, Theory, Witness,
};

pub const USAGE: i32 = 64;
pub const INVALID: i32 = 65;

#[derive(Parser, Debug)]
#[command(name = "sigmaterm", version, about = "Positions, Σ-composition, essentiality and deduction for equational theories")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Theory file.
    #[arg(long, global = true)]
    theory: Option<PathBuf>,
    /// Algebra JSON file.
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
    /// Signature such as "f/2, g/1", used when no theory is given.
    #[arg(long, global = true)]
    sig: Option<String>,
    /// Budget overrides such as term_size=10 (repeatable).
    #[arg(long, global = true)]
    budget: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Treat Unknown verdicts as errors (default).
    #[arg(long, global = true, conflicts_with = "permissive")]
    strict: bool,
    /// Drop Unknown verdicts with a warning.
    #[arg(long, global = true)]
    permissive: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Positions of a term in preorder.
    Positions { term: String },
    /// Subterm at a position.
    Subterm { term: String, position: String },
    /// Depth of a term.
    Depth { term: String },
    /// Positional composition t(p1,…;u1,…).
    ComposePos {
        term: String,
        /// Alternating positions and replacements.
        #[arg(required = true, num_args = 2..)]
        pairs: Vec<String>,
    },
    /// Inductive composition t(r1←s1,…).
    ComposeInd {
        term: String,
        /// Alternating patterns and replacements.
        #[arg(required = true, num_args = 2..)]
        pairs: Vec<String>,
    },
    /// Σ-composition t^Σ(r←s).
    SigmaCompose { term: String, r: String, s: String },
    /// Σ-essential and fictive variables.
    EssVars { term: String },
    /// Σ-essential and fictive positions.
    EssPos { term: String },
    /// ΣS, ΣP, P and EP of a probe in a term.
    PosSets { term: String, r: String },
    /// Σ-balance of an identity.
    Balanced { identity: String },
    /// Searches for a derivation of an identity.
    Prove {
        identity: String,
        #[arg(long, default_value = "d")]
        system: String,
    },
    /// Checks a proof script.
    CheckProof {
        file: PathBuf,
        /// Restrict the rules to one deductive system.
        #[arg(long)]
        system: Option<String>,
        /// Experimental: evaluate ΣR side conditions against earlier conclusions.
        #[arg(long)]
        derived_side_conditions: bool,
    },
    /// Identities derivable on terms up to a size cap.
    ClosureSample {
        #[arg(long, default_value = "d")]
        system: String,
        #[arg(long, default_value_t = 5)]
        cap: usize,
        /// List only identities with distinct sides.
        #[arg(long)]
        nontrivial: bool,
    },
    /// Finite models of the theory.
    Models {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long)]
        force: bool,
        /// Maximum number of models listed.
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Evaluates a term in an algebra.
    Eval {
        term: String,
        /// Assignment such as x1=0,x2=1 (repeatable).
        #[arg(long)]
        env: Vec<String>,
    },
    /// Applies a hypersubstitution to a term or identity.
    Hyper {
        input: String,
        /// Symbol image such as "f -> f(x2,x1)" (repeatable).
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
    },
    /// Looks for an identity whose hypersubstituted image fails.
    SolidProbe {
        /// Identities to probe; defaults to the axioms.
        identities: Vec<String>,
        #[arg(long = "map")]
        maps: Vec<String>,
        /// Depth of the default hypersubstitution pool.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2000)]
        pool_limit: usize,
    },
    /// Samples Σ-replacement instances and looks for a refuted one.
    StableProbe {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        vars: u32,
    },
}

impl Command {
    fn randomized(&self) -> bool {
        matches!(self, Command::StableProbe { .. })
    }
}

/// A finished command: exit code, text report and its JSON mirror.
#[derive(Debug)]
struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report { code: 0, text: text.into(), json }
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

#[derive(Debug)]
struct Fail {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Fail {
    Fail { code: USAGE, message: message.into() }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail { code: INVALID, message: e.to_string() }
    }
}

type Outcome = std::result::Result<Report, Fail>;

/// Runs one invocation. `args[0]` is the program name.
pub fn run<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            return (code, e.to_string().trim_end().to_string());
        }
    };
    let json = cli.common.format == Format::Json;
    if json && cli.command.randomized() && cli.common.seed.is_none() {
        return (USAGE, "error: --seed is required with --format json for randomized commands".into());
    }
    let ctx = Ctx { common: &cli.common };
    match execute(&ctx, &cli.command) {
        Ok(r) => {
            let body = if json {
                serde_json::to_string_pretty(&r.json).expect("json")
            } else {
                r.text
            };
            (r.code, body)
        }
        Err(f) => {
            let body = if json {
                serde_json::to_string_pretty(&json!({"error": f.message, "exit": f.code})).expect("json")
            } else {
                format!("error: {}", f.message)
            };
            (f.code, body)
        }
    }
}

struct Ctx<'a> {
    common: &'a Common,
}

impl Ctx<'_> {
    fn mode(&self) -> Mode {
        if self.common.permissive {
            Mode::Permissive
        } else {
            Mode::Strict
        }
    }

    fn theory_opt(&self) -> std::result::Result<Option<Theory>, Fail> {
        let Some(path) = &self.common.theory else { return Ok(None) };
        let th = Theory::load(path)?;
        let mut budget = th.budget();
        for line in &self.common.budget {
            budget.parse_line(line)?;
        }
        Ok(Some(th.with_budget(budget)))
    }

    fn theory(&self) -> std::result::Result<Theory, Fail> {
        self.theory_opt()?.ok_or_else(|| usage("this command needs --theory <file>"))
    }

    fn algebra_opt(&self, sig: Option<&Signature>) -> std::result::Result<Option<FiniteAlgebra>, Fail> {
        let Some(path) = &self.common.algebra else { return Ok(None) };
        let text = read(path)?;
        let alg = match sig {
            Some(sig) => FiniteAlgebra::from_json(&text, sig)?,
            None => FiniteAlgebra::from_json_inferred(&text)?,
        };
        Ok(Some(alg))
    }

    /// Signature from --theory, then --sig, then the given terms.
    fn signature(&self, texts: &[&str]) -> std::result::Result<Signature, Fail> {
        if let Some(th) = self.theory_opt()? {
            return Ok(th.sig().clone());
        }
        if let Some(s) = &self.common.sig {
            return Ok(Signature::parse(s)?);
        }
        let terms = texts.iter().map(|t| parse_term_untyped(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(Signature::infer(&terms.iter().collect::<Vec<_>>())?)
    }
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail {
        code: INVALID,
        message: format!("{}: {e}", path.display()),
    })
}

fn term(sig: &Signature, text: &str) -> std::result::Result<Term, Fail> {
    Ok(sigmaterm::parse_term(text, sig)?)
}

fn identity(sig: &Signature, text: &str) -> std::result::Result<Identity, Fail> {
    Ok(sigmaterm::parse_identity(text, sig)?)
}

fn var_name(x: u32) -> String {
    format!("x{x}")
}

fn braces<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn strings<T: Display>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn rendered(ps: &BTreeSet<Position>, style: PositionStyle) -> Vec<String> {
    ps.iter().map(|p| p.render(style)).collect()
}

fn assignment_json(env: &Assignment) -> Value {
    Value::Object(env.iter().map(|(x, v)| (var_name(*x), json!(v))).collect())
}

fn assignment_text(env: &Assignment) -> String {
    env.iter().map(|(x, v)| format!("x{x}={v}")).collect::<Vec<_>>().join(" ")
}

fn algebra_text(alg: &FiniteAlgebra) -> String {
    let ops: Vec<String> = alg
        .to_json()
        .get("ops")
        .and_then(Value::as_object)
        .map(|m| m.iter().map(|(k, v)| format!("{k} = {v}")).collect())
        .unwrap_or_default();
    format!("carrier {}, {}", alg.carrier(), ops.join(", "))
}

fn witness_text(w: &Witness) -> String {
    format!("witness: {}; {}", algebra_text(&w.algebra), assignment_text(&w.assignment))
}

fn witness_json(w: &Witness) -> Value {
    json!({"algebra": w.algebra.to_json(), "assignment": assignment_json(&w.assignment)})
}

fn execute(ctx: &Ctx, cmd: &Command) -> Outcome {
    match cmd {
        Command::Positions { term: t } => {
            let sig = ctx.signature(&[t])?;
            let t = term(&sig, t)?;
            let style = sig.position_style();
            let ps: Vec<String> = t.positions().iter().map(|p| p.render(style)).collect();
            Ok(Report::ok(ps.join(" "), json!({"positions": ps})))
        }
        Command::Subterm { term: t, position } => {
            let sig = ctx.signature(&[t])?;
            let t = term(&sig, t)?;
            let p = Position::parse(position, sig.position_style())?;
            let sub = t.subterm_at(&p)?;
            Ok(Report::ok(sub.to_string(), json!({"subterm": sub.to_string()})))
        }
        Command::Depth { term: t } => {
            let sig = ctx.signature(&[t])?;
            let d = term(&sig, t)?.depth();
            Ok(Report::ok(d.to_string(), json!({"depth": d})))
        }
        Command::ComposePos { term: t, pairs } => {
            if pairs.len() % 2 != 0 {
                return Err(usage("compose-pos takes position/term pairs"));
            }
            let reps: Vec<&str> = pairs.iter().skip(1).step_by(2).map(String::as_str).collect();
            let mut texts = vec![t.as_str()];
            texts.extend(&reps);
            let sig = ctx.signature(&texts)?;
            let t = term(&sig, t)?;
            let style = sig.position_style();
            let ps = pairs.iter().step_by(2).map(|p| Position::parse(p, style)).collect::<Result<Vec<_>, _>>()?;
            let us = reps.iter().map(|u| term(&sig, u)).collect::<Result<Vec<_>, _>>()?;
            let out = t.replace_many(&ps, &us)?;
            Ok(Report::ok(out.to_string(), json!({"result": out.to_string()})))
        }
        Command::ComposeInd { term: t, pairs } => {
            if pairs.len() % 2 != 0 {
                return Err(usage("compose-ind takes pattern/term pairs"));
            }
            let mut texts = vec![t.as_str()];
            texts.extend(pairs.iter().map(String::as_str));
            let sig = ctx.signature(&texts)?;
            let t = term(&sig, t)?;
            let pairs = pairs
                .chunks(2)
                .map(|c| Ok((term(&sig, &c[0])?, term(&sig, &c[1])?)))
                .collect::<Result<Vec<_>, Fail>>()?;
            let out = t.replace_terms(&pairs)?;
            Ok(Report::ok(out.to_string(), json!({"result": out.to_string()})))
        }
        Command::SigmaCompose { term: t, r, s } => {
            let th = ctx.theory()?;
            let (t, r, s) = (th.term(t)?, th.term(r)?, th.term(s)?);
            let out = sigma_compose(&th, &t, &r, &s, ctx.mode())?;
            Ok(Report::ok(out.to_string(), json!({"result": out.to_string()})))
        }
        Command::EssVars { term: t } => ess_vars(ctx, t),
        Command::EssPos { term: t } => ess_pos(ctx, t),
        Command::PosSets { term: t, r } => {
            let th = ctx.theory()?;
            let (t, r) = (th.term(t)?, th.term(r)?);
            let style = th.sig().position_style();
            let sets = position_sets(&th, &t, &r, ctx.mode())?;
            let mut text = format!(
                "ΣS: {}\nΣP: {}\nP: {}\nEP: {}",
                braces(&sets.sigma_s),
                braces(rendered(&sets.sigma_p, style)),
                braces(rendered(&sets.minimal, style)),
                braces(rendered(&sets.essential_minimal, style)),
            );
            for w in &sets.warnings {
                text.push_str(&format!("\nwarning: {w}"));
            }
            Ok(Report::ok(
                text,
                json!({
                    "sigma_s": strings(&sets.sigma_s),
                    "sigma_p": rendered(&sets.sigma_p, style),
                    "minimal": rendered(&sets.minimal, style),
                    "essential_minimal": rendered(&sets.essential_minimal, style),
                    "warnings": sets.warnings,
                }),
            ))
        }
        Command::Balanced { identity: e } => {
            let th = ctx.theory()?;
            let e = th.identity(e)?;
            let b = is_sigma_balanced(&th, &e)?;
            let (code, j) = match &b {
                Balance::Balanced => (0, json!({"verdict": "balanced"})),
                Balance::Unbalanced { q, lhs, rhs } => {
                    (1, json!({"verdict": "unbalanced", "q": q.to_string(), "lhs": lhs, "rhs": rhs}))
                }
                Balance::Unknown => (2, json!({"verdict": "unknown"})),
            };
            Ok(Report::ok(b.to_string(), j).with_code(code))
        }
        Command::Prove { identity: e, system } => {
            let th = ctx.theory()?;
            let system = System::parse(system).ok_or_else(|| usage(format!("unknown system `{system}`")))?;
            let e = th.identity(e)?;
            let style = th.sig().position_style();
            Ok(match derive(&th, &e, system, th.budget()) {
                Derivation::Proof(p) => {
                    let script = p.render(style);
                    Report::ok(
                        format!("proved ({} steps)\n{}", p.len(), script.trim_end()),
                        json!({"verdict": "proved", "system": system.name(), "steps": p.len(), "proof": script}),
                    )
                }
                Derivation::Refuted(w) => Report::ok(
                    format!("refuted\n{}", witness_text(&w)),
                    json!({"verdict": "refuted", "system": system.name(), "witness": witness_json(&w)}),
                )
                .with_code(1),
                Derivation::NotFound => Report::ok(
                    "unknown: no derivation within budget",
                    json!({"verdict": "unknown", "system": system.name()}),
                )
                .with_code(2),
            })
        }
        Command::CheckProof { file, system, derived_side_conditions } => {
            let th = ctx.theory()?;
            let proof = Proof::parse(&read(file)?, th.sig())?;
            let rules = match system {
                Some(s) => Some(System::parse(s).ok_or_else(|| usage(format!("unknown system `{s}`")))?.rules()),
                None => None,
            };
            let opts = CheckOptions {
                rules,
                side_conditions: if *derived_side_conditions {
                    SideConditions::DerivedSet
                } else {
                    SideConditions::BaseTheory
                },
            };
            Ok(match check_proof_with(&th, &proof, &opts) {
                Ok(()) => {
                    let concl = proof.conclusion().map(ToString::to_string).unwrap_or_default();
                    Report::ok(
                        format!("valid ({} steps): {concl}", proof.len()),
                        json!({"verdict": "valid", "steps": proof.len(), "conclusion": concl}),
                    )
                }
                Err(f) => Report::ok(
                    format!("invalid: {f}"),
                    json!({"verdict": "invalid", "step": f.step + 1, "reason": f.reason}),
                )
                .with_code(1),
            })
        }
        Command::ClosureSample { system, cap, nontrivial } => {
            let th = ctx.theory()?;
            let system = System::parse(system).ok_or_else(|| usage(format!("unknown system `{system}`")))?;
            let mut cfg = ClosureConfig::new(system, *cap);
            cfg.max_steps = th.budget().max_steps;
            let Some(sample) = closure_sample(&th, &cfg) else {
                return Ok(Report::ok(
                    "unknown: term universe exceeds budget",
                    json!({"verdict": "unknown", "system": system.name(), "cap": cap}),
                )
                .with_code(2));
            };
            let ids: Vec<String> = sample
                .identities
                .iter()
                .filter(|e| !nontrivial || !e.is_trivial())
                .map(ToString::to_string)
                .collect();
            let status = if sample.saturated { "saturated" } else { "budget exhausted" };
            let text = format!(
                "{} identities over {} terms ({status})\n{}",
                ids.len(),
                sample.universe,
                ids.join("\n")
            );
            let code = if sample.saturated { 0 } else { 2 };
            Ok(Report::ok(
                text.trim_end(),
                json!({
                    "system": system.name(),
                    "cap": cap,
                    "universe": sample.universe,
                    "saturated": sample.saturated,
                    "identities": ids,
                }),
            )
            .with_code(code))
        }
        Command::Models { max_size, force, limit } => {
            let (sig, axioms) = match ctx.theory_opt()? {
                Some(th) => (th.sig().clone(), th.axioms().to_vec()),
                None => match &ctx.common.sig {
                    Some(s) => (Signature::parse(s)?, Vec::new()),
                    None => return Err(usage("models needs --theory or --sig")),
                },
            };
            if *max_size >= 4 && sig.max_arity() >= 2 && !force {
                return Err(usage(format!(
                    "refusing to enumerate carriers up to {max_size} with a binary symbol; pass --force"
                )));
            }
            let mut listed = Vec::new();
            let mut total = 0usize;
            for alg in enumerate_models(&sig, &axioms, *max_size) {
                total += 1;
                if listed.len() < *limit {
                    listed.push(alg);
                }
            }
            let mut text = format!("{total} models up to size {max_size}");
            for alg in &listed {
                text.push_str(&format!("\n{}", algebra_text(alg)));
            }
            if total > listed.len() {
                text.push_str(&format!("\n... {} more", total - listed.len()));
            }
            Ok(Report::ok(
                text,
                json!({"count": total, "models": listed.iter().map(FiniteAlgebra::to_json).collect::<Vec<_>>()}),
            ))
        }
        Command::Eval { term: t, env } => {
            let sig = match ctx.theory_opt()? {
                Some(th) => Some(th.sig().clone()),
                None => ctx.common.sig.as_deref().map(Signature::parse).transpose()?,
            };
            let alg = ctx.algebra_opt(sig.as_ref())?.ok_or_else(|| usage("eval needs --algebra <file>"))?;
            let t = match &sig {
                Some(sig) => term(sig, t)?,
                None => parse_term_untyped(t)?,
            };
            let env = parse_env(env)?;
            let v = alg.evaluate(&t, &env)?;
            Ok(Report::ok(v.to_string(), json!({"value": v})))
        }
        Command::Hyper { input, maps } => {
            let (lhs, rhs) = match input.split_once('=') {
                Some((l, r)) => (l, Some(r)),
                None => (input.as_str(), None),
            };
            let mut texts = vec![lhs];
            texts.extend(rhs);
            let sig = ctx.signature(&texts)?;
            let sigma = Hypersubstitution::parse(&sig, maps)?;
            if rhs.is_some() {
                let e = identity(&sig, input)?;
                let img = sigma.apply_identity(&e);
                Ok(Report::ok(img.to_string(), json!({"lhs": img.lhs.to_string(), "rhs": img.rhs.to_string()})))
            } else {
                let img = sigma.apply(&term(&sig, input)?);
                Ok(Report::ok(img.to_string(), json!({"result": img.to_string()})))
            }
        }
        Command::SolidProbe { identities, maps, depth, pool_limit } => {
            let th = ctx.theory()?;
            let ids = if identities.is_empty() {
                th.axioms().to_vec()
            } else {
                identities.iter().map(|e| th.identity(e)).collect::<Result<Vec<_>, _>>()?
            };
            let hyps = if maps.is_empty() {
                default_pool(th.sig(), *depth, *pool_limit)
            } else {
                vec![Hypersubstitution::parse(th.sig(), maps)?]
            };
            Ok(match solidity_probe(&th, &ids, &hyps)? {
                Some(cx) => {
                    let hyper = cx.hyper.to_string();
                    Report::ok(
                        format!(
                            "counterexample\nidentity: {}\nhypersubstitution: {hyper}\nimage: {}\n{}",
                            cx.identity,
                            cx.image,
                            witness_text(&cx.witness)
                        ),
                        json!({
                            "verdict": "counterexample",
                            "identity": cx.identity.to_string(),
                            "hypersubstitution": hyper,
                            "image": {"lhs": cx.image.lhs.to_string(), "rhs": cx.image.rhs.to_string()},
                            "witness": witness_json(&cx.witness),
                        }),
                    )
                    .with_code(1)
                }
                None => Report::ok(
                    "no counterexample within budget",
                    json!({"verdict": "none", "identities": ids.len(), "hypersubstitutions": hyps.len()}),
                ),
            })
        }
        Command::StableProbe { samples, max_size, vars } => {
            let th = ctx.theory()?;
            let cfg = ProbeConfig {
                samples: *samples,
                max_size: *max_size,
                vars: *vars,
                seed: ctx.common.seed.unwrap_or(0),
            };
            let out = stability_probe(&th, &cfg);
            Ok(match out.counterexample {
                Some(cx) => Report::ok(
                    format!(
                        "counterexample\nt = {}\ns = {}\nr = {}\nv = {}\nu = {}\nw = {}\nconclusion: {}\n{}",
                        cx.t,
                        cx.s,
                        cx.r,
                        cx.v,
                        cx.u,
                        cx.w,
                        cx.conclusion,
                        witness_text(&cx.witness)
                    ),
                    json!({
                        "verdict": "counterexample",
                        "seed": cfg.seed,
                        "tested": out.tested,
                        "premises": {"t": cx.t.to_string(), "s": cx.s.to_string(), "r": cx.r.to_string(),
                                     "v": cx.v.to_string(), "u": cx.u.to_string(), "w": cx.w.to_string()},
                        "conclusion": {"lhs": cx.conclusion.lhs.to_string(), "rhs": cx.conclusion.rhs.to_string()},
                        "witness": witness_json(&cx.witness),
                    }),
                )
                .with_code(1),
                None => Report::ok(
                    format!("no counterexample within budget ({} samples tested)", out.tested),
                    json!({"verdict": "none", "seed": cfg.seed, "tested": out.tested}),
                ),
            })
        }
    }
}

fn report_json<T: Ord + Display>(rep: &EssReport<T>, name: impl Fn(&T) -> String) -> Value {
    json!({
        "essential": rep.essential.iter().map(&name).collect::<Vec<_>>(),
        "fictive": rep.fictive.iter().map(&name).collect::<Vec<_>>(),
        "unknown": rep.unknown.iter().map(&name).collect::<Vec<_>>(),
    })
}

fn report_text<T: Ord>(rep: &EssReport<T>, name: impl Fn(&T) -> String) -> String {
    let set = |s: &BTreeSet<T>| braces(s.iter().map(&name));
    format!(
        "essential: {}\nfictive: {}\nunknown: {}",
        set(&rep.essential),
        set(&rep.fictive),
        set(&rep.unknown)
    )
}

/// Answers from an algebra are always definite.
fn algebra_report<T: Ord + Clone>(all: BTreeSet<T>, essential: BTreeSet<T>) -> EssReport<T> {
    EssReport {
        fictive: all.difference(&essential).cloned().collect(),
        essential,
        unknown: BTreeSet::new(),
    }
}

fn unknown_code<T: Ord>(rep: &EssReport<T>) -> i32 {
    if rep.unknown.is_empty() {
        0
    } else {
        2
    }
}

fn ess_vars(ctx: &Ctx, text: &str) -> Outcome {
    let rep = match ctx.theory_opt()? {
        Some(th) if ctx.common.algebra.is_none() => sigma_essential_vars(&th, &th.term(text)?)?,
        th => {
            let sig = th.map(|th| th.sig().clone());
            let alg = ctx.algebra_opt(sig.as_ref())?.ok_or_else(|| usage("ess-vars needs --theory or --algebra"))?;
            let t = match &sig {
                Some(sig) => term(sig, text)?,
                None => parse_term_untyped(text)?,
            };
            algebra_report(t.vars(), alg.essential_vars(&t))
        }
    };
    let name = |x: &u32| var_name(*x);
    Ok(Report::ok(report_text(&rep, name), report_json(&rep, name)).with_code(unknown_code(&rep)))
}

fn ess_pos(ctx: &Ctx, text: &str) -> Outcome {
    let (rep, style) = match ctx.theory_opt()? {
        Some(th) if ctx.common.algebra.is_none() => {
            (sigma_essential_positions(&th, &th.term(text)?)?, th.sig().position_style())
        }
        th => {
            let sig = th.map(|th| th.sig().clone());
            let alg = ctx.algebra_opt(sig.as_ref())?.ok_or_else(|| usage("ess-pos needs --theory or --algebra"))?;
            let t = match &sig {
                Some(sig) => term(sig, text)?,
                None => parse_term_untyped(text)?,
            };
            let style = Signature::infer(&[&t])?.position_style();
            (algebra_report(t.position_set(), alg.essential_positions(&t)), style)
        }
    };
    let name = |p: &Position| p.render(style);
    Ok(Report::ok(report_text(&rep, name), report_json(&rep, name)).with_code(unknown_code(&rep)))
}

fn parse_env(items: &[String]) -> std::result::Result<Assignment, Fail> {
    let mut env = Assignment::new();
    for item in items.iter().flat_map(|s| s.split([',', ' '])).filter(|s| !s.is_empty()) {
        let bad = || Fail { code: INVALID, message: format!("bad assignment `{item}`, expected x1=0") };
        let (x, v) = item.split_once('=').ok_or_else(bad)?;
        let x: u32 = x.trim().strip_prefix('x').and_then(|n| n.parse().ok()).filter(|&n| n > 0).ok_or_else(bad)?;
        let v: usize = v.trim().parse().map_err(|_| bad())?;
        env.insert(x, v);
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_parsing() {
        let env = parse_env(&["x1=0,x2=1".into(), "x3=2".into()]).unwrap();
        assert_eq!(env.len(), 3);
        assert_eq!(env[&2], 1);
        assert!(parse_env(&["y=1".into()]).is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["sigmaterm", "bogus"]).0, USAGE);
        assert_eq!(run(["sigmaterm", "sigma-compose", "x1", "x1", "x1"]).0, USAGE);
        assert_eq!(run(["sigmaterm", "positions", "f(x1"]).0, INVALID);
    }
}

//! Mechanical proof checking.

use std::collections::BTreeSet;
use std::fmt;

use crate::deduction::proof::{Instantiation, Proof, ProofStep, Rule};
use crate::essentiality::{in_sess, position_status, var_status, Mode, Status};
use crate::sigma::sigma_compose;
use crate::term::Identity;
use crate::theory::Theory;

/// Where essentiality side conditions are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SideConditions {
    /// Against the base theory's oracle.
    #[default]
    BaseTheory,
    /// Experimental: against the axioms plus every earlier conclusion,
    /// decided by bounded search.
    DerivedSet,
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    /// Rules allowed in the proof; `None` allows all.
    pub rules: Option<BTreeSet<Rule>>,
    pub side_conditions: SideConditions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    /// 0-based index of the first failing step.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step + 1, self.reason)
    }
}

pub fn check_proof(th: &Theory, proof: &Proof) -> Result<(), CheckFailure> {
    check_proof_with(th, proof, &CheckOptions::default())
}

pub fn check_proof_with(th: &Theory, proof: &Proof, opts: &CheckOptions) -> Result<(), CheckFailure> {
    if proof.is_empty() {
        return Err(CheckFailure {
            step: 0,
            reason: "empty proof".into(),
        });
    }
    for (i, step) in proof.steps.iter().enumerate() {
        let fail = |reason: String| CheckFailure { step: i, reason };
        if let Some(rules) = &opts.rules {
            if !rules.contains(&step.rule) {
                return Err(fail(format!("rule {} is not allowed here", step.rule)));
            }
        }
        if let Some(&p) = step.premises.iter().find(|&&p| p >= i) {
            return Err(fail(format!("premise {} does not precede this step", p + 1)));
        }
        for t in [&step.conclusion.lhs, &step.conclusion.rhs] {
            th.sig().check(t).map_err(|e| fail(e.to_string()))?;
        }
        let side = match opts.side_conditions {
            SideConditions::BaseTheory => None,
            SideConditions::DerivedSet => {
                let earlier: Vec<Identity> =
                    proof.steps[..i].iter().map(|s| s.conclusion.clone()).collect();
                Some(th.extended(&earlier))
            }
        };
        let side_th = side.as_ref().unwrap_or(th);
        check_step(th, side_th, proof, step).map_err(fail)?;
    }
    Ok(())
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn want_status(got: crate::error::Result<Status>, want: Status, what: String) -> Result<(), String> {
    match got {
        Ok(s) if s == want => Ok(()),
        Ok(Status::Unknown) => Err(format!("side condition undecided: {what}")),
        Ok(_) => Err(format!("side condition fails: {what}")),
        Err(e) => Err(format!("side condition error ({what}): {e}")),
    }
}

fn check_step(th: &Theory, side: &Theory, proof: &Proof, step: &ProofStep) -> Result<(), String> {
    let premise = |k: usize| -> Result<&Identity, String> {
        step.premises
            .get(k)
            .map(|&p| &proof.steps[p].conclusion)
            .ok_or_else(|| format!("{} needs premise {}", step.rule, k + 1))
    };
    let arity = match step.rule {
        Rule::Axiom | Rule::D1 | Rule::D5f => 0,
        Rule::D3 => 2,
        Rule::SigmaR1 => 3,
        _ => 1,
    };
    require(step.premises.len() == arity, || {
        format!("{} takes {arity} premise(s), found {}", step.rule, step.premises.len())
    })?;
    let c = &step.conclusion;
    match (step.rule, &step.inst) {
        (Rule::Axiom, Instantiation::None) => {
            require(th.has_axiom(c), || format!("{c} is not an axiom"))
        }
        (Rule::D1, Instantiation::None) => require(c.is_trivial(), || format!("{c} is not reflexive")),
        (Rule::D2, Instantiation::None) => {
            let a = premise(0)?;
            require(*c == a.mirror(), || format!("{c} is not the mirror of {a}"))
        }
        (Rule::D3, Instantiation::None) => {
            let (a, b) = (premise(0)?, premise(1)?);
            require(a.rhs == b.lhs, || format!("{a} and {b} do not chain"))?;
            require(c.lhs == a.lhs && c.rhs == b.rhs, || {
                format!("{c} does not follow from {a} and {b}")
            })
        }
        (Rule::D4 | Rule::D4e | Rule::D4f, Instantiation::Subst { var, term }) => {
            let a = premise(0)?;
            th.sig().check(term).map_err(|e| e.to_string())?;
            let lhs = a.lhs.substitute_var(*var, term);
            let rhs = if step.rule == Rule::D4f {
                a.rhs.clone()
            } else {
                a.rhs.substitute_var(*var, term)
            };
            require(c.lhs == lhs && c.rhs == rhs, || {
                format!("{c} is not {a} with x{var} <- {term}")
            })?;
            match step.rule {
                Rule::D4e => want_status(
                    var_status(side, &a.lhs, *var),
                    Status::Essential,
                    format!("x{var} essential for {}", a.lhs),
                ),
                Rule::D4f => want_status(
                    var_status(side, &a.lhs, *var),
                    Status::Fictive,
                    format!("x{var} fictive for {}", a.lhs),
                ),
                _ => Ok(()),
            }
        }
        (Rule::D5 | Rule::D5e | Rule::D5f, Instantiation::Replace { host, pos }) => {
            th.sig().check(host).map_err(|e| e.to_string())?;
            require(c.rhs == *host, || format!("right side of {c} is not the host {host}"))?;
            let filler = if step.rule == Rule::D5f {
                c.lhs.get(pos).ok_or_else(|| format!("{pos} is not a position of {}", c.lhs))?
            } else {
                let a = premise(0)?;
                let at = host
                    .get(pos)
                    .ok_or_else(|| format!("{pos} is not a position of {host}"))?;
                require(*at == a.lhs, || {
                    format!("subterm of {host} at {pos} is {at}, not {}", a.lhs)
                })?;
                &a.rhs
            };
            let lhs = host.replace_at(pos, filler).map_err(|e| e.to_string())?;
            require(c.lhs == lhs, || format!("{c} is not a replacement in {host} at {pos}"))?;
            match step.rule {
                Rule::D5e => want_status(
                    position_status(side, host, pos),
                    Status::Essential,
                    format!("{pos} essential for {host}"),
                ),
                Rule::D5f => want_status(
                    position_status(side, host, pos),
                    Status::Fictive,
                    format!("{pos} fictive for {host}"),
                ),
                _ => Ok(()),
            }
        }
        (Rule::SigmaR1, Instantiation::Sigma { r, v, u, w }) => {
            let (ts, rv, uw) = (premise(0)?, premise(1)?, premise(2)?);
            require(rv.lhs == *r && rv.rhs == *v, || format!("second premise is not {r} = {v}"))?;
            require(uw.lhs == *u && uw.rhs == *w, || format!("third premise is not {u} = {w}"))?;
            want_status(
                in_sess(side, &ts.lhs, r),
                Status::Essential,
                format!("{r} in SEss({})", ts.lhs),
            )?;
            want_status(
                in_sess(side, &ts.rhs, v),
                Status::Essential,
                format!("{v} in SEss({})", ts.rhs),
            )?;
            let lhs = sigma_compose(side, &ts.lhs, r, u, Mode::Strict).map_err(|e| e.to_string())?;
            let rhs = sigma_compose(side, &ts.rhs, v, w, Mode::Strict).map_err(|e| e.to_string())?;
            require(c.lhs == lhs && c.rhs == rhs, || {
                format!("Σ-replacement gives {lhs} = {rhs}, not {c}")
            })
        }
        (Rule::H1, Instantiation::Hyper(h)) => {
            let a = premise(0)?;
            require(*c == h.apply_identity(a), || format!("{c} is not the image of {a}"))
        }
        (rule, _) => Err(format!("{rule} has the wrong instantiation data")),
    }
}

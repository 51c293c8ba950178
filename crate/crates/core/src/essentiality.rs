//! Σ-essential and Σ-fictive variables, positions and subterms.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::term::{minimal_positions, Position, Term};
use crate::theory::{Theory, Verdict};

/// What to do with an Unknown verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Unknown verdicts are errors wherever a definite answer is needed.
    #[default]
    Strict,
    /// Unknown verdicts are dropped with a warning.
    Permissive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Essential,
    Fictive,
    Unknown,
}

impl Status {
    fn of(v: &Verdict) -> Status {
        match v {
            Verdict::Distinct(_) => Status::Essential,
            Verdict::Equal { .. } => Status::Fictive,
            Verdict::Unknown => Status::Unknown,
        }
    }
}

/// A partition of the queried domain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EssReport<T: Ord> {
    pub essential: BTreeSet<T>,
    pub fictive: BTreeSet<T>,
    pub unknown: BTreeSet<T>,
}

impl<T: Ord> EssReport<T> {
    fn new() -> Self {
        EssReport {
            essential: BTreeSet::new(),
            fictive: BTreeSet::new(),
            unknown: BTreeSet::new(),
        }
    }

    fn insert(&mut self, item: T, status: Status) {
        match status {
            Status::Essential => self.essential.insert(item),
            Status::Fictive => self.fictive.insert(item),
            Status::Unknown => self.unknown.insert(item),
        };
    }

    pub fn status(&self, item: &T) -> Option<Status> {
        if self.essential.contains(item) {
            Some(Status::Essential)
        } else if self.fictive.contains(item) {
            Some(Status::Fictive)
        } else if self.unknown.contains(item) {
            Some(Status::Unknown)
        } else {
            None
        }
    }
}

/// Status of one variable: compares `t` with `t(x ← fresh)`. Variables not
/// in `var(t)` are fictive without an oracle call.
pub fn var_status(th: &Theory, t: &Term, x: u32) -> Result<Status> {
    if !t.contains_var(x) {
        return Ok(Status::Fictive);
    }
    let renamed = t.substitute_var(x, &Term::Var(t.fresh_var()));
    Ok(Status::of(&th.sigma_equal(t, &renamed)?))
}

pub fn sigma_essential_vars(th: &Theory, t: &Term) -> Result<EssReport<u32>> {
    let mut out = EssReport::new();
    for x in t.vars() {
        out.insert(x, var_status(th, t, x)?);
    }
    Ok(out)
}

/// Status of one position: compares `t(p; z1)` with `t(p; z2)` for the two
/// smallest fresh variables. Depends only on the context around `p`.
pub fn position_status(th: &Theory, t: &Term, p: &Position) -> Result<Status> {
    let z1 = t.fresh_var();
    let a = t.replace_at(p, &Term::Var(z1))?;
    let b = t.replace_at(p, &Term::Var(z1 + 1))?;
    Ok(Status::of(&th.sigma_equal(&a, &b)?))
}

pub fn sigma_essential_positions(th: &Theory, t: &Term) -> Result<EssReport<Position>> {
    let mut out = EssReport::new();
    for p in t.positions() {
        let status = position_status(th, t, &p)?;
        out.insert(p, status);
    }
    Ok(out)
}

/// SEss / SFic, plus subterms whose classification hinges on positions
/// that could not be decided.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubtermSets {
    pub essential: BTreeSet<Term>,
    pub fictive: BTreeSet<Term>,
    pub unknown: BTreeSet<Term>,
}

pub fn sigma_subterm_sets(th: &Theory, t: &Term) -> Result<SubtermSets> {
    let report = sigma_essential_positions(th, t)?;
    Ok(subterm_sets_from(t, &report))
}

pub(crate) fn subterm_sets_from(t: &Term, report: &EssReport<Position>) -> SubtermSets {
    let sub = |ps: &BTreeSet<Position>| -> BTreeSet<Term> {
        ps.iter().map(|p| t.get(p).expect("own position").clone()).collect()
    };
    let essential = sub(&report.essential);
    let unknown: BTreeSet<Term> = sub(&report.unknown)
        .into_iter()
        .filter(|u| !essential.contains(u))
        .collect();
    let fictive = t
        .subterms()
        .into_iter()
        .filter(|u| !essential.contains(u) && !unknown.contains(u))
        .collect();
    SubtermSets {
        essential,
        fictive,
        unknown,
    }
}

/// `r ∈ SEss(t, Σ)`; Unknown when only undecided positions carry `r`.
pub fn in_sess(th: &Theory, t: &Term, r: &Term) -> Result<Status> {
    let mut status = Status::Fictive;
    for p in t.occurrences(r) {
        match position_status(th, t, &p)? {
            Status::Essential => return Ok(Status::Essential),
            Status::Unknown => status = Status::Unknown,
            Status::Fictive => {}
        }
    }
    Ok(status)
}

/// ΣS, ΣP, P and EP for a term and a probe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionSets {
    pub sigma_s: BTreeSet<Term>,
    pub sigma_p: BTreeSet<Position>,
    pub minimal: BTreeSet<Position>,
    pub essential_minimal: BTreeSet<Position>,
    pub warnings: Vec<String>,
}

/// Subterms of `t` Σ-equal to `r`, with warnings for dropped Unknowns.
pub(crate) fn sigma_equal_subterms(
    th: &Theory,
    t: &Term,
    r: &Term,
    mode: Mode,
) -> Result<(BTreeSet<Term>, Vec<String>)> {
    let mut set = BTreeSet::new();
    let mut warnings = Vec::new();
    for v in t.subterms() {
        match th.sigma_equal(r, &v)? {
            Verdict::Equal { .. } => {
                set.insert(v);
            }
            Verdict::Distinct(_) => {}
            Verdict::Unknown => match mode {
                Mode::Strict => return Err(Error::UnknownVerdict(format!("{r} = {v}"))),
                Mode::Permissive => warnings.push(format!("excluded {v}: {r} = {v} is unknown")),
            },
        }
    }
    Ok((set, warnings))
}

/// `P_r^t`: the ⪯-minimal positions of subterms Σ-equal to `r`.
pub fn minimal_positions_of(th: &Theory, t: &Term, r: &Term, mode: Mode) -> Result<BTreeSet<Position>> {
    let (set, _) = sigma_equal_subterms(th, t, r, mode)?;
    Ok(minimal_positions(&positions_of(t, &set)))
}

fn positions_of(t: &Term, set: &BTreeSet<Term>) -> BTreeSet<Position> {
    t.positions()
        .into_iter()
        .filter(|p| set.contains(t.get(p).expect("own position")))
        .collect()
}

pub fn position_sets(th: &Theory, t: &Term, r: &Term, mode: Mode) -> Result<PositionSets> {
    let (sigma_s, mut warnings) = sigma_equal_subterms(th, t, r, mode)?;
    let sigma_p = positions_of(t, &sigma_s);
    let minimal = minimal_positions(&sigma_p);
    let mut essential_minimal = BTreeSet::new();
    for p in &minimal {
        match position_status(th, t, p)? {
            Status::Essential => {
                essential_minimal.insert(p.clone());
            }
            Status::Fictive => {}
            Status::Unknown => match mode {
                Mode::Strict => {
                    return Err(Error::UnknownVerdict(format!("essentiality of {p} in {t}")))
                }
                Mode::Permissive => warnings.push(format!("excluded {p}: essentiality unknown")),
            },
        }
    }
    Ok(PositionSets {
        sigma_s,
        sigma_p,
        minimal,
        essential_minimal,
        warnings,
    })
}

//! Σ-balanced identities.
//!
//! `EP^t_q` is nonempty only if some subterm of `t` is Σ-equal to `q`, so it
//! suffices to probe one representative per Σ-class of `Sub(lhs) ∪ Sub(rhs)`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::essentiality::{position_sets, Mode};
use crate::term::{Identity, Position, Term};
use crate::theory::{Theory, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Balanced,
    Unbalanced { q: Term, lhs: usize, rhs: usize },
    Unknown,
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Balance::Balanced => "balanced",
            Balance::Unbalanced { .. } => "unbalanced",
            Balance::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Balance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Balance::Unbalanced { q, lhs, rhs } => {
                write!(f, "unbalanced at q={q} (|EP_lhs|={lhs}, |EP_rhs|={rhs})")
            }
            other => f.write_str(other.label()),
        }
    }
}

/// `EP^t_q`: Σ-essential positions among the minimal positions of
/// subterms Σ-equal to `q`.
pub fn ep(th: &Theory, t: &Term, q: &Term) -> Result<BTreeSet<Position>> {
    Ok(position_sets(th, t, q, Mode::Strict)?.essential_minimal)
}

/// The smallest member of each Σ-class of `Sub(lhs) ∪ Sub(rhs)`, in term
/// order. `None` if some class membership is undecided.
pub fn representatives(th: &Theory, e: &Identity) -> Result<Option<Vec<Term>>> {
    let mut all = e.lhs.subterms();
    all.extend(e.rhs.subterms());
    let mut reps: Vec<Term> = Vec::new();
    for t in all {
        let mut placed = false;
        for q in &reps {
            match th.sigma_equal(q, &t)? {
                Verdict::Equal { .. } => {
                    placed = true;
                    break;
                }
                Verdict::Distinct(_) => {}
                Verdict::Unknown => return Ok(None),
            }
        }
        if !placed {
            reps.push(t);
        }
    }
    Ok(Some(reps))
}

/// `(q, |EP^lhs_q|, |EP^rhs_q|)` for every representative, or `None` if
/// some verdict is unknown.
pub fn ep_counts(th: &Theory, e: &Identity) -> Result<Option<Vec<(Term, usize, usize)>>> {
    let Some(reps) = representatives(th, e)? else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for q in reps {
        let (a, b) = match (ep(th, &e.lhs, &q), ep(th, &e.rhs, &q)) {
            (Ok(a), Ok(b)) => (a.len(), b.len()),
            (Err(Error::UnknownVerdict(_)), _) | (_, Err(Error::UnknownVerdict(_))) => return Ok(None),
            (Err(err), _) | (_, Err(err)) => return Err(err),
        };
        out.push((q, a, b));
    }
    Ok(Some(out))
}

/// Checks `|EP^lhs_q| = |EP^rhs_q|` for every probe `q`, reporting the
/// first mismatch in representative order.
pub fn is_sigma_balanced(th: &Theory, e: &Identity) -> Result<Balance> {
    let Some(counts) = ep_counts(th, e)? else {
        return Ok(Balance::Unknown);
    };
    Ok(counts
        .into_iter()
        .find(|(_, a, b)| a != b)
        .map_or(Balance::Balanced, |(q, lhs, rhs)| Balance::Unbalanced { q, lhs, rhs }))
}

/// Same variables on both sides.
pub fn is_regular(e: &Identity) -> bool {
    e.is_regular()
}

/// Every variable occurs equally often on both sides.
pub fn is_balanced(e: &Identity) -> bool {
    e.is_balanced()
}

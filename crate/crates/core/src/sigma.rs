//! Σ-composition `t^Σ(r ← s)`.

use crate::error::{Error, Result};
use crate::essentiality::{minimal_positions_of, sigma_equal_subterms, Mode};
use crate::term::Term;
use crate::theory::{Theory, Verdict};

/// Replaces `s` at the minimal positions of subterms Σ-equal to `r`.
pub fn sigma_compose(th: &Theory, t: &Term, r: &Term, s: &Term, mode: Mode) -> Result<Term> {
    let p = minimal_positions_of(th, t, r, mode)?;
    t.replace_all_at(&p, s)
}

/// The clause-by-clause recursive definition, kept as a cross-check for
/// [`sigma_compose`].
pub fn sigma_compose_recursive(
    th: &Theory,
    t: &Term,
    r: &Term,
    s: &Term,
    mode: Mode,
) -> Result<Term> {
    let (class, _) = sigma_equal_subterms(th, t, r, mode)?;
    if class.is_empty() {
        return Ok(t.clone());
    }
    match th.sigma_equal(t, r)? {
        Verdict::Equal { .. } => return Ok(s.clone()),
        Verdict::Unknown if mode == Mode::Strict => {
            return Err(Error::UnknownVerdict(format!("{t} = {r}")))
        }
        _ => {}
    }
    match t {
        Term::Var(_) => Ok(t.clone()),
        Term::App(f, args) => {
            let args = args
                .iter()
                .map(|a| sigma_compose_recursive(th, a, r, s, mode))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::App(f.clone(), args))
        }
    }
}

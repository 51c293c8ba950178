//! Random terms and random Σ-equal pairs.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::deduction::rewrite::{oriented_axioms, successors};
use crate::term::{Position, Signature, Term};
use crate::theory::{OracleKind, Theory};

/// A random term of size at most `max_size` over `x1..x{nvars}` and the
/// constants of `sig`.
pub fn random_term<R: Rng + ?Sized>(sig: &Signature, rng: &mut R, max_size: usize, nvars: u32) -> Term {
    let n = rng.random_range(1..=max_size.max(1));
    build(sig, rng, n, nvars.max(1))
}

fn leaf<R: Rng + ?Sized>(sig: &Signature, rng: &mut R, nvars: u32) -> Term {
    let consts: Vec<_> = sig.symbols().filter(|(_, a)| *a == 0).map(|(f, _)| f.clone()).collect();
    let k = rng.random_range(0..nvars as usize + consts.len());
    if k < nvars as usize {
        Term::Var(k as u32 + 1)
    } else {
        Term::App(consts[k - nvars as usize].clone(), Vec::new())
    }
}

fn build<R: Rng + ?Sized>(sig: &Signature, rng: &mut R, n: usize, nvars: u32) -> Term {
    let ops: Vec<_> = sig
        .symbols()
        .filter(|(_, a)| *a > 0 && *a < n)
        .map(|(f, a)| (f.clone(), a))
        .collect();
    let Some((f, a)) = ops.choose(rng).cloned() else {
        return leaf(sig, rng, nvars);
    };
    // split n-1 nodes into a positive parts
    let mut parts = vec![1usize; a];
    for _ in 0..(n - 1 - a) {
        let i = rng.random_range(0..a);
        parts[i] += 1;
    }
    Term::App(f, parts.into_iter().map(|k| build(sig, rng, k, nvars)).collect())
}

fn end_position(t: &Term, leftmost: bool) -> Position {
    let mut steps = Vec::new();
    let mut cur = t;
    while let Term::App(_, args) = cur {
        let Some(next) = (if leftmost { args.first() } else { args.last() }) else {
            break;
        };
        steps.push(if leftmost { 1 } else { args.len() as u32 });
        cur = next;
    }
    Position::new(steps)
}

fn set_end(t: &Term, leftmost: bool, to: &Term) -> Term {
    t.replace_at(&end_position(t, leftmost), to).expect("own position")
}

fn end_leaf(t: &Term, leftmost: bool) -> Term {
    t.get(&end_position(t, leftmost)).expect("own position").clone()
}

/// Random binary bracketing of a nonempty word.
fn bracket<R: Rng + ?Sized>(f: &crate::term::Symbol, word: &[Term], rng: &mut R) -> Term {
    if word.len() == 1 {
        return word[0].clone();
    }
    let k = rng.random_range(1..word.len());
    Term::App(f.clone(), vec![bracket(f, &word[..k], rng), bracket(f, &word[k..], rng)])
}

fn leaves(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::App(_, args) if !args.is_empty() => args.iter().for_each(|a| leaves(a, out)),
        _ => out.push(t.clone()),
    }
}

/// A candidate partner for `t` that the oracle is likely to call equal.
fn partner<R: Rng + ?Sized>(th: &Theory, t: &Term, rng: &mut R, max_size: usize, nvars: u32) -> Term {
    let sig = th.sig();
    match th.oracle() {
        OracleKind::Empty => t.clone(),
        OracleKind::Trivial => random_term(sig, rng, max_size, nvars),
        OracleKind::Lz | OracleKind::Rz | OracleKind::Rb => {
            let mut s = random_term(sig, rng, max_size, nvars);
            let kind = th.oracle();
            if s.is_var() {
                return if kind == OracleKind::Rb || s.size() == 1 { end_leaf(t, true) } else { s };
            }
            if kind != OracleKind::Rz {
                s = set_end(&s, true, &end_leaf(t, true));
            }
            if kind != OracleKind::Lz {
                s = set_end(&s, false, &end_leaf(t, false));
            }
            s
        }
        OracleKind::Sg => match sig.single_binary() {
            Some(f) => {
                let mut word = Vec::new();
                leaves(t, &mut word);
                bracket(&f, &word, rng)
            }
            None => t.clone(),
        },
        OracleKind::Generic => {
            let rules = oriented_axioms(th);
            let pool: Vec<u32> = (1..=nvars).collect();
            let mut cur = t.clone();
            for _ in 0..rng.random_range(0..=6) {
                let next = successors(&rules, &cur, &pool, max_size + 2);
                match next.choose(rng) {
                    Some((n, _)) => cur = n.clone(),
                    None => break,
                }
            }
            cur
        }
    }
}

/// A random pair the oracle decides as Σ-equal, or `None` after a few
/// failed attempts.
pub fn equal_pair<R: Rng + ?Sized>(th: &Theory, rng: &mut R, max_size: usize, nvars: u32) -> Option<(Term, Term)> {
    for _ in 0..16 {
        let t = random_term(th.sig(), rng, max_size, nvars);
        let s = partner(th, &t, rng, max_size, nvars);
        if th.sigma_equal(&t, &s).is_ok_and(|v| v.is_equal()) {
            return Some((t, s));
        }
    }
    None
}

/// Like [`equal_pair`] with both sides of size at most `size`.
pub fn equal_pair_of_size<R: Rng + ?Sized>(
    th: &Theory,
    rng: &mut R,
    size: usize,
    nvars: u32,
) -> Option<(Term, Term)> {
    for _ in 0..16 {
        if let Some((t, s)) = equal_pair(th, rng, size, nvars) {
            if s.size() <= size.max(1) {
                return Some((t, s));
            }
        }
    }
    None
}

//! Countermodels for the exact oracles. Every algebra built here is a model
//! of the corresponding axiom set; callers still re-check the assignment.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::algebra::{Assignment, FiniteAlgebra, OpTable};
use crate::term::{Identity, Signature, Term};

/// A model together with an assignment on which two terms differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub algebra: FiniteAlgebra,
    pub assignment: Assignment,
}

impl Witness {
    /// Re-evaluates both sides; true when they really differ.
    pub fn separates(&self, t: &Term, s: &Term) -> bool {
        match (
            self.algebra.evaluate(t, &self.assignment),
            self.algebra.evaluate(s, &self.assignment),
        ) {
            (Ok(a), Ok(b)) => a != b,
            _ => false,
        }
    }
}

/// Tries `candidates` in order with the mixed-radix assignment search.
pub(crate) fn first_separating<I>(candidates: I, t: &Term, s: &Term) -> Option<Witness>
where
    I: IntoIterator<Item = FiniteAlgebra>,
{
    let e = Identity::new(t.clone(), s.clone());
    let k = e.vars().len() as u32;
    candidates.into_iter().find_map(|alg| {
        if (alg.carrier() as u64).checked_pow(k).is_none_or(|n| n > 1 << 20) {
            return None;
        }
        alg.counterexample(&e).map(|assignment| Witness {
            algebra: alg,
            assignment,
        })
    })
}

fn binary(sig: &Signature, n: usize, op: impl Fn(usize, usize) -> usize) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(n, sig, |_, a| op(a[0], a[1])).expect("binary table")
}

pub(crate) fn left_zero(sig: &Signature) -> FiniteAlgebra {
    binary(sig, 2, |a, _| a)
}

pub(crate) fn right_zero(sig: &Signature) -> FiniteAlgebra {
    binary(sig, 2, |_, b| b)
}

pub(crate) fn rb(sig: &Signature, t: &Term, s: &Term) -> Option<Witness> {
    first_separating([left_zero(sig), right_zero(sig)], t, s)
}

pub(crate) fn lz(sig: &Signature, t: &Term, s: &Term) -> Option<Witness> {
    first_separating([left_zero(sig)], t, s)
}

pub(crate) fn rz(sig: &Signature, t: &Term, s: &Term) -> Option<Witness> {
    first_separating([right_zero(sig)], t, s)
}

/// Semigroup countermodel for two different leaf words.
pub(crate) fn sg(sig: &Signature, t: &Term, s: &Term) -> Option<Witness> {
    let small = [
        binary(sig, 2, |a, b| (a + b) % 2),
        left_zero(sig),
        right_zero(sig),
    ];
    if let Some(w) = first_separating(small, t, s) {
        return Some(w);
    }
    let (w1, w2) = (t.leaf_vars(), s.leaf_vars());
    if w1 == w2 {
        return None;
    }
    counting(sig, &w1, &w2).or_else(|| word_automaton(sig, &w1, &w2))
}

/// Z_m under addition, sending one variable with differing occurrence
/// counts to 1 and everything else to 0.
fn counting(sig: &Signature, w1: &[u32], w2: &[u32]) -> Option<Witness> {
    let vars: BTreeSet<u32> = w1.iter().chain(w2).copied().collect();
    let count = |w: &[u32], x: u32| w.iter().filter(|&&y| y == x).count();
    let x = vars.iter().copied().find(|&x| count(w1, x) != count(w2, x))?;
    let m = count(w1, x).max(count(w2, x)) + 1;
    let algebra = binary(sig, m, |a, b| (a + b) % m);
    let assignment = vars.iter().map(|&y| (y, usize::from(y == x))).collect();
    Some(Witness {
        algebra,
        assignment,
    })
}

/// The transition semigroup of the automaton accepting only `w1`. Each
/// variable acts as its letter; `w1` reaches the accepting state and no
/// other word does.
fn word_automaton(sig: &Signature, w1: &[u32], w2: &[u32]) -> Option<Witness> {
    let len = w1.len();
    let sink = len + 1;
    let states = len + 2;
    let letter = |x: u32| -> Vec<usize> {
        (0..states)
            .map(|q| if q < len && w1[q] == x { q + 1 } else { sink })
            .collect()
    };
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().map(|&q| b[q]).collect() };

    let vars: BTreeSet<u32> = w1.iter().chain(w2).copied().collect();
    let gens: Vec<Vec<usize>> = vars.iter().map(|&x| letter(x)).collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut elems: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for g in &gens {
        if !index.contains_key(g) {
            index.insert(g.clone(), elems.len());
            elems.push(g.clone());
            queue.push_back(g.clone());
        }
    }
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let next = compose(&e, g);
            if !index.contains_key(&next) {
                index.insert(next.clone(), elems.len());
                elems.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    let n = elems.len();
    let mut entries = Vec::with_capacity(n * n);
    for a in &elems {
        for b in &elems {
            // closed: products of generated elements are generated
            entries.push(*index.get(&compose(a, b))?);
        }
    }
    let name = sig.single_binary()?;
    let mut ops = BTreeMap::new();
    ops.insert(name.to_string(), OpTable { arity: 2, entries });
    let algebra = FiniteAlgebra::new(n, ops).ok()?;
    let assignment = vars
        .iter()
        .zip(&gens)
        .map(|(&x, g)| (x, index[g]))
        .collect();
    Some(Witness {
        algebra,
        assignment,
    })
}

/// The absolutely free algebra truncated to `Sub(t) ∪ Sub(s)` plus an
/// absorbing element. With no axioms every algebra is a model.
pub(crate) fn term_algebra(sig: &Signature, t: &Term, s: &Term) -> Option<Witness> {
    if t == s {
        return None;
    }
    let mut elems: Vec<Term> = t.subterms().into_iter().collect();
    for u in s.subterms() {
        if !elems.contains(&u) {
            elems.push(u);
        }
    }
    elems.sort();
    let bottom = elems.len();
    let n = elems.len() + 1;
    let lookup: HashMap<&Term, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let algebra = FiniteAlgebra::from_fn(n, sig, |name, args| {
        if args.contains(&bottom) {
            return bottom;
        }
        let term = Term::app(
            sig.symbol(name).expect("own symbol"),
            args.iter().map(|&a| elems[a].clone()).collect(),
        );
        lookup.get(&term).copied().unwrap_or(bottom)
    })
    .ok()?;
    let assignment = t
        .vars()
        .union(&s.vars())
        .map(|&x| (x, lookup[&Term::Var(x)]))
        .collect();
    let w = Witness {
        algebra,
        assignment,
    };
    w.separates(t, s).then_some(w)
}

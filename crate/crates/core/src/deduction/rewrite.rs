//! Axiom rewriting: one-step replacement graphs, hint normalization,
//! bidirectional search, and conversion of rewrite paths into D-proofs.
//! This is the engine behind the generic oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::deduction::check::check_proof;
use crate::deduction::proof::{Proof, ProofBuilder};
use crate::term::{Identity, Position, Term};
use crate::theory::{Theory, Verdict};
use crate::witness;

/// Extends `sigma` so that `pattern` instantiates to `t`.
pub fn match_term(pattern: &Term, t: &Term, sigma: &mut BTreeMap<u32, Term>) -> bool {
    match (pattern, t) {
        (Term::Var(v), _) => match sigma.get(v) {
            Some(bound) => bound == t,
            None => {
                sigma.insert(*v, t.clone());
                true
            }
        },
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, a)| match_term(p, a, sigma))
        }
        _ => false,
    }
}

/// One rewrite: the instance of an oriented axiom applied at a position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub from: Identity,
    pub pos: Position,
    pub sigma: BTreeMap<u32, Term>,
}

impl Step {
    pub fn apply(&self, t: &Term) -> Term {
        t.replace_at(&self.pos, &self.from.rhs.substitute(&self.sigma))
            .expect("rewrite position")
    }
}

/// Both orientations of every axiom, in axiom order.
pub fn oriented_axioms(th: &Theory) -> Vec<Identity> {
    let mut out = Vec::new();
    for e in th.axioms() {
        out.push(e.clone());
        if !e.is_trivial() {
            out.push(e.mirror());
        }
    }
    out
}

/// All one-step rewrites of `t` of size ≤ `max_size`. Variables on the
/// right of a rule that are unbound by the match range over `pool`.
pub fn successors(rules: &[Identity], t: &Term, pool: &[u32], max_size: usize) -> Vec<(Term, Step)> {
    let mut out = Vec::new();
    for pos in t.positions() {
        let sub = t.get(&pos).expect("own position");
        for rule in rules {
            let mut sigma = BTreeMap::new();
            if !match_term(&rule.lhs, sub, &mut sigma) {
                continue;
            }
            let extra: Vec<u32> = rule
                .rhs
                .vars()
                .into_iter()
                .filter(|v| !sigma.contains_key(v))
                .collect();
            let mut idx = vec![0usize; extra.len()];
            loop {
                let mut full = sigma.clone();
                for (v, &i) in extra.iter().zip(&idx) {
                    full.insert(*v, Term::Var(pool[i]));
                }
                let step = Step {
                    from: rule.clone(),
                    pos: pos.clone(),
                    sigma: full,
                };
                let next = step.apply(t);
                if next.size() <= max_size && next != *t {
                    out.push((next, step));
                }
                if !advance(&mut idx, pool.len()) {
                    break;
                }
            }
        }
    }
    out
}

fn advance(idx: &mut [usize], radix: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Innermost normalization with the theory's hints. Returns the rewrite
/// sequence, or `None` if `limit` steps do not reach a normal form.
pub fn normalize(hints: &[(Term, Term)], t: &Term, limit: usize) -> Option<(Term, Vec<Step>)> {
    let rules: Vec<Identity> = hints
        .iter()
        .map(|(l, r)| Identity::new(l.clone(), r.clone()))
        .filter(|e| e.rhs.vars().is_subset(&e.lhs.vars()))
        .collect();
    let mut cur = t.clone();
    let mut steps = Vec::new();
    'outer: for _ in 0..=limit {
        // postorder puts children before parents
        let mut positions = cur.positions();
        positions.reverse();
        positions.sort_by_key(|p| std::cmp::Reverse(p.len()));
        for pos in positions {
            let sub = cur.get(&pos).expect("own position");
            for rule in &rules {
                let mut sigma = BTreeMap::new();
                if match_term(&rule.lhs, sub, &mut sigma) {
                    let step = Step {
                        from: rule.clone(),
                        pos,
                        sigma,
                    };
                    cur = step.apply(&cur);
                    steps.push(step);
                    continue 'outer;
                }
            }
        }
        return Some((cur, steps));
    }
    None
}

/// Emits a ≈ step(a), built from an axiom, D4 instantiation, D5 and D2.
pub fn step_proof(b: &mut ProofBuilder, a: &Term, step: &Step) -> usize {
    let ax = b.axiom(step.from.clone());
    let inst = b.instantiate(ax, &step.sigma);
    if step.pos.is_root() {
        return inst;
    }
    let replaced = b.replace(inst, a, &step.pos);
    b.symm(replaced)
}

/// Emits t0 ≈ tn for a rewrite path t0 → t1 → … → tn.
pub fn path_proof(b: &mut ProofBuilder, start: &Term, steps: &[Step]) -> usize {
    let mut cur = start.clone();
    let mut acc = b.refl(start);
    for s in steps {
        let next = s.apply(&cur);
        let e = step_proof(b, &cur, s);
        let e = b.oriented(e, &cur);
        acc = b.trans(acc, e);
        cur = next;
    }
    acc
}

/// Proof of t ≈ s from t →* m ←* s.
pub fn meeting_proof(t: &Term, left: &[Step], s: &Term, right: &[Step]) -> Proof {
    let mut b = ProofBuilder::new();
    let l = path_proof(&mut b, t, left);
    let r = path_proof(&mut b, s, right);
    let r = b.symm(r);
    let last = b.trans(l, r);
    b.finish_at(last)
}

/// Outcome of a bounded bidirectional rewrite search.
pub enum Search {
    Met(Proof),
    Exhausted,
    Running,
}

/// Breadth-first search from both ends, one frontier level per call to
/// [`Bidirectional::expand`].
pub struct Bidirectional {
    rules: Vec<Identity>,
    pool: Vec<u32>,
    max_size: usize,
    max_nodes: usize,
    sides: [Side; 2],
}

struct Side {
    root: Term,
    parent: HashMap<Term, Option<(Term, Step)>>,
    frontier: VecDeque<Term>,
}

impl Side {
    fn new(root: &Term) -> Side {
        let mut parent = HashMap::new();
        parent.insert(root.clone(), None);
        Side {
            root: root.clone(),
            parent,
            frontier: VecDeque::from([root.clone()]),
        }
    }

    fn path_to(&self, node: &Term) -> Vec<Step> {
        let mut steps = Vec::new();
        let mut cur = node.clone();
        while let Some(Some((prev, step))) = self.parent.get(&cur) {
            steps.push(step.clone());
            cur = prev.clone();
        }
        steps.reverse();
        steps
    }
}

impl Bidirectional {
    pub fn new(th: &Theory, t: &Term, s: &Term) -> Bidirectional {
        let mut pool: BTreeSet<u32> = t.vars();
        pool.extend(s.vars());
        let fresh = t.fresh_var().max(s.fresh_var());
        pool.insert(fresh);
        let budget = th.budget();
        Bidirectional {
            rules: oriented_axioms(th),
            pool: pool.into_iter().collect(),
            max_size: budget.max_term_size.max(t.size()).max(s.size()),
            max_nodes: budget.max_steps,
            sides: [Side::new(t), Side::new(s)],
        }
    }

    fn nodes(&self) -> usize {
        self.sides[0].parent.len() + self.sides[1].parent.len()
    }

    fn meet(&self, node: &Term, from: usize) -> Option<Proof> {
        let other = &self.sides[1 - from];
        if !other.parent.contains_key(node) {
            return None;
        }
        let mine = &self.sides[from];
        let (l, r) = if from == 0 { (mine, other) } else { (other, mine) };
        Some(meeting_proof(&l.root, &l.path_to(node), &r.root, &r.path_to(node)))
    }

    /// Expands one whole level of the smaller frontier.
    pub fn expand(&mut self) -> Search {
        if let Some(p) = self.meet(&self.sides[0].root.clone(), 0) {
            return Search::Met(p);
        }
        let live: Vec<usize> = (0..2).filter(|&i| !self.sides[i].frontier.is_empty()).collect();
        let Some(&side) = live.iter().min_by_key(|&&i| self.sides[i].frontier.len()) else {
            return Search::Exhausted;
        };
        let level: Vec<Term> = self.sides[side].frontier.drain(..).collect();
        for node in level {
            for (next, step) in successors(&self.rules, &node, &self.pool, self.max_size) {
                if self.sides[side].parent.contains_key(&next) {
                    continue;
                }
                self.sides[side]
                    .parent
                    .insert(next.clone(), Some((node.clone(), step)));
                if let Some(p) = self.meet(&next, side) {
                    return Search::Met(p);
                }
                if self.nodes() >= self.max_nodes {
                    return Search::Exhausted;
                }
                self.sides[side].frontier.push_back(next);
            }
        }
        if self.sides.iter().all(|s| s.frontier.is_empty()) {
            Search::Exhausted
        } else {
            Search::Running
        }
    }
}

const MODEL_BATCH: usize = 256;

fn certified(th: &Theory, proof: Proof) -> Option<Verdict> {
    check_proof(th, &proof).ok()?;
    Some(Verdict::Equal {
        certificate: Some(Arc::new(proof)),
    })
}

/// Decision procedure of the generic oracle: witnesses, hint
/// normalization, then rewrite search interleaved with model batches.
pub fn generic_verdict(th: &Theory, t: &Term, s: &Term) -> Verdict {
    if t == s {
        let mut b = ProofBuilder::new();
        let i = b.refl(t);
        if let Some(v) = certified(th, b.finish_at(i)) {
            return v;
        }
    }
    if let Some(w) = witness::first_separating(th.witnesses().iter().cloned(), t, s) {
        return Verdict::Distinct(w);
    }
    if !th.hints().is_empty() {
        let limit = th.budget().max_steps;
        if let (Some((nt, lt)), Some((ns, ls))) =
            (normalize(th.hints(), t, limit), normalize(th.hints(), s, limit))
        {
            if nt == ns {
                if let Some(v) = certified(th, meeting_proof(t, &lt, s, &ls)) {
                    return v;
                }
            }
        }
    }
    let models = th.models();
    let mut batches = models.chunks(MODEL_BATCH);
    let mut search = Bidirectional::new(th, t, s);
    let mut search_done = false;
    let mut models_done = false;
    while !(search_done && models_done) {
        if !search_done {
            match search.expand() {
                Search::Met(proof) => {
                    if let Some(v) = certified(th, proof) {
                        return v;
                    }
                    search_done = true;
                }
                Search::Exhausted => search_done = true,
                Search::Running => {}
            }
        }
        if !models_done {
            match batches.next() {
                Some(batch) => {
                    if let Some(w) = witness::first_separating(batch.iter().cloned(), t, s) {
                        return Verdict::Distinct(w);
                    }
                }
                None => models_done = true,
            }
        }
    }
    Verdict::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_identity;
    use crate::term::Signature;

    fn la() -> Theory {
        let sig = Signature::parse("f/2").unwrap();
        let ax = parse_identity("f(f(x1,x2),x1) = f(x1,x1)", &sig).unwrap();
        Theory::generic(sig, vec![ax]).unwrap()
    }

    #[test]
    fn matching() {
        let th = la();
        let pat = th.term("f(f(x1,x2),x1)").unwrap();
        let mut sigma = BTreeMap::new();
        assert!(match_term(&pat, &th.term("f(f(x3,x3),x3)").unwrap(), &mut sigma));
        assert_eq!(sigma[&1], Term::Var(3));
        let mut sigma = BTreeMap::new();
        assert!(!match_term(&pat, &th.term("f(f(x3,x3),x1)").unwrap(), &mut sigma));
    }

    #[test]
    fn rewrite_search_certifies() {
        let th = la();
        let t = th.term("f(f(f(x1,x2),x1),f(x1,x2))").unwrap();
        let s = th.term("f(f(x1,x1),f(x1,x2))").unwrap();
        let Verdict::Equal { certificate: Some(p) } = th.sigma_equal(&t, &s).unwrap() else {
            panic!("expected a certified equality");
        };
        assert_eq!(p.conclusion(), Some(&Identity::new(t, s)));
        assert!(check_proof(&th, &p).is_ok());
    }

    #[test]
    fn models_refute() {
        let th = la();
        let t = th.term("f(x1,f(x2,x1))").unwrap();
        let s = th.term("f(x1,x1)").unwrap();
        let Verdict::Distinct(w) = th.sigma_equal(&t, &s).unwrap() else {
            panic!("expected distinct");
        };
        assert!(w.separates(&t, &s));
        assert!(th.axioms().iter().all(|e| w.algebra.satisfies(e)));
    }

    #[test]
    fn normalization_with_hints() {
        let th = la();
        let l = th.term("f(f(x1,x2),x1)").unwrap();
        let r = th.term("f(x1,x1)").unwrap();
        let th = th.with_hint(l, r).unwrap();
        let t = th.term("f(f(f(x1,x2),x1),f(x1,x2))").unwrap();
        let (nf, steps) = normalize(th.hints(), &t, 10).unwrap();
        assert_eq!(nf, th.term("f(f(x1,x1),f(x1,x2))").unwrap());
        assert_eq!(steps.len(), 1);
    }
}

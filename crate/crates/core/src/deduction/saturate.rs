//! Forward saturation over the finite universe of terms up to a size cap.
//!
//! The derived relation is kept as a union-find partition of the universe.
//! Every merge records an edge in a proof forest (an undirected spanning
//! forest of the merge graph); the path between two connected terms never
//! changes once they are connected, so each edge can be explained from
//! edges that are strictly older.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::deduction::check::{check_proof_with, CheckOptions};
use crate::deduction::proof::{Instantiation, Proof, ProofBuilder, Rule};
use crate::deduction::rewrite::{Bidirectional, Search};
use crate::essentiality::{in_sess, minimal_positions_of, position_status, var_status, Mode, Status};
use crate::term::{Identity, Position, Signature, Term};
use crate::theory::{Budget, Theory};
use crate::witness::Witness;

/// Which rule set drives the saturation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// D1–D5.
    D,
    /// D1–D3 with the essential/fictive split D4e, D4f, D5e, D5f.
    DRefined,
    /// D1–D4 with Σ-replacement.
    SigmaR,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::D => "d",
            System::DRefined => "d-refined",
            System::SigmaR => "sigma-r",
        }
    }

    pub fn parse(s: &str) -> Option<System> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Some(System::D),
            "d-refined" | "drefined" | "refined" => Some(System::DRefined),
            "sigma-r" | "sigmar" | "sr" | "σr" => Some(System::SigmaR),
            _ => None,
        }
    }

    pub fn rules(self) -> BTreeSet<Rule> {
        let base = [Rule::Axiom, Rule::D1, Rule::D2, Rule::D3];
        let extra: &[Rule] = match self {
            System::D => &[Rule::D4, Rule::D5],
            System::DRefined => &[Rule::D4e, Rule::D4f, Rule::D5e, Rule::D5f],
            System::SigmaR => &[Rule::D4, Rule::SigmaR1],
        };
        base.iter().chain(extra).copied().collect()
    }
}

#[derive(Clone, Debug)]
pub struct ClosureConfig {
    pub system: System,
    /// Largest term size in the universe.
    pub cap: usize,
    /// Largest number of merges.
    pub max_steps: usize,
    /// Variables of the universe; defaults to the axiom variables plus one
    /// fresh variable.
    pub var_pool: Option<Vec<u32>>,
    /// Refuse universes larger than this.
    pub max_universe: usize,
}

impl ClosureConfig {
    pub fn new(system: System, cap: usize) -> Self {
        ClosureConfig {
            system,
            cap,
            max_steps: 5000,
            var_pool: None,
            max_universe: 4000,
        }
    }

    pub fn with_pool(mut self, pool: Vec<u32>) -> Self {
        self.var_pool = Some(pool);
        self
    }
}

pub(crate) fn default_pool(th: &Theory, extra: &[&Term]) -> Vec<u32> {
    let mut vars = BTreeSet::new();
    for e in th.axioms() {
        vars.extend(e.vars());
    }
    for t in extra {
        vars.extend(t.vars());
    }
    let fresh = vars.iter().max().copied().unwrap_or(1) + 1;
    vars.insert(fresh);
    if vars.len() < 2 {
        vars.insert(1);
    }
    vars.into_iter().collect()
}

/// Number of terms of each size up to `cap`, saturating at u128::MAX.
fn count_terms(sig: &Signature, nvars: usize, cap: usize) -> u128 {
    let mut count = vec![0u128; cap + 1];
    if cap == 0 {
        return 0;
    }
    count[1] = nvars as u128 + sig.symbols().filter(|(_, a)| *a == 0).count() as u128;
    for n in 2..=cap {
        let mut total: u128 = 0;
        for (_, a) in sig.symbols().filter(|(_, a)| *a > 0) {
            // ways to split n-1 nodes among a children, each at least 1
            let mut ways = vec![0u128; n];
            ways[0] = 1;
            for _ in 0..a {
                let mut next = vec![0u128; n];
                for (used, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for k in 1..n - used {
                        next[used + k] = next[used + k].saturating_add(w.saturating_mul(count[k]));
                    }
                }
                ways = next;
            }
            total = total.saturating_add(ways[n - 1]);
        }
        count[n] = total;
    }
    count.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// All terms of size ≤ cap, sorted by size and then term order.
fn generate(sig: &Signature, pool: &[u32], cap: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); cap + 1];
    if cap == 0 {
        return Vec::new();
    }
    by_size[1] = pool.iter().map(|&v| Term::Var(v)).collect();
    by_size[1].extend(
        sig.symbols()
            .filter(|(_, a)| *a == 0)
            .map(|(f, _)| Term::App(f.clone(), Vec::new())),
    );
    by_size[1].sort();
    for n in 2..=cap {
        let mut out = Vec::new();
        for (f, a) in sig.symbols().filter(|(_, a)| *a > 0) {
            let mut parts = Vec::new();
            splits(n - 1, a, &mut Vec::new(), &mut parts);
            for sizes in parts {
                let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
                for &k in &sizes {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for t in &by_size[k] {
                            let mut p = prefix.clone();
                            p.push(t.clone());
                            next.push(p);
                        }
                    }
                    acc = next;
                }
                out.extend(acc.into_iter().map(|args| Term::App(f.clone(), args)));
            }
        }
        out.sort();
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}

fn splits(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for k in 1..=total.saturating_sub(parts - 1) {
        cur.push(k);
        splits(total - k, parts - 1, cur, out);
        cur.pop();
    }
}

type Id = u32;

#[derive(Clone, Debug)]
enum Just {
    Axiom(Identity),
    Seed,
    /// l = a[x←r], r = b[x←r] from a ≈ b.
    Subst {
        prem: (Id, Id),
        var: u32,
        term: Id,
        rule: Rule,
    },
    /// l = host[x←r], r = host, x fictive for host.
    FictiveSubst { host: Id, var: u32, term: Id },
    /// l = host(pos; s), r = host from host|pos ≈ s.
    Replace {
        prem: (Id, Id),
        host: Id,
        pos: Position,
        rule: Rule,
    },
    /// l = host(pos; s), r = host, pos fictive for host.
    FictiveReplace { host: Id, pos: Position },
    /// l = t^Σ(r←u), r = s^Σ(v←w).
    Sigma {
        t: (Id, Id),
        r: (Id, Id),
        u: (Id, Id),
    },
}

#[derive(Clone, Debug)]
struct Edge {
    l: Id,
    r: Id,
    just: Just,
}

const HOLE: Term = Term::Var(0);

/// The saturated (or budget-limited) relation on a term universe.
pub struct Closure<'a> {
    th: &'a Theory,
    system: System,
    cap: usize,
    max_steps: usize,
    pool: Vec<u32>,
    terms: Vec<Term>,
    sizes: Vec<usize>,
    index: HashMap<Term, Id>,
    uf: Vec<Id>,
    pf: Vec<Option<(Id, usize)>>,
    edges: Vec<Edge>,
    merges: usize,
    saturated: bool,
    var_cache: HashMap<(Id, u32), Status>,
    ctx_cache: HashMap<Term, Status>,
    sess_cache: HashMap<(Id, Id), Option<BTreeSet<Position>>>,
}

impl<'a> Closure<'a> {
    /// Builds the universe, or `None` if it exceeds the configured size.
    pub fn new(th: &'a Theory, cfg: &ClosureConfig) -> Option<Closure<'a>> {
        let pool = cfg.var_pool.clone().unwrap_or_else(|| default_pool(th, &[]));
        if count_terms(th.sig(), pool.len(), cfg.cap) > cfg.max_universe as u128 {
            return None;
        }
        let terms = generate(th.sig(), &pool, cfg.cap);
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as Id))
            .collect();
        let n = terms.len();
        Some(Closure {
            th,
            system: cfg.system,
            cap: cfg.cap,
            max_steps: cfg.max_steps,
            pool,
            sizes: terms.iter().map(Term::size).collect(),
            terms,
            index,
            uf: (0..n as Id).collect(),
            pf: vec![None; n],
            edges: Vec::new(),
            merges: 0,
            saturated: false,
            var_cache: HashMap::new(),
            ctx_cache: HashMap::new(),
            sess_cache: HashMap::new(),
        })
    }

    pub fn universe(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn merges(&self) -> usize {
        self.merges
    }

    pub fn id(&self, t: &Term) -> Option<Id> {
        self.index.get(t).copied()
    }

    fn find(&mut self, mut a: Id) -> Id {
        while self.uf[a as usize] != a {
            let up = self.uf[self.uf[a as usize] as usize];
            self.uf[a as usize] = up;
            a = up;
        }
        a
    }

    fn find_ro(&self, mut a: Id) -> Id {
        while self.uf[a as usize] != a {
            a = self.uf[a as usize];
        }
        a
    }

    pub fn connected(&self, a: &Term, b: &Term) -> bool {
        match (self.id(a), self.id(b)) {
            (Some(x), Some(y)) => self.find_ro(x) == self.find_ro(y),
            _ => false,
        }
    }

    fn budget_left(&self) -> bool {
        self.merges < self.max_steps
    }

    /// Records `terms[l] ≈ terms[r]`; false if already connected.
    fn union(&mut self, l: Id, r: Id, just: Just) -> bool {
        let (a, b) = (self.find(l), self.find(r));
        if a == b || !self.budget_left() {
            return false;
        }
        // make `l` the root of its proof tree, then hang it below `r`
        let mut prev: Option<(Id, usize)> = None;
        let mut cur = l;
        loop {
            let next = self.pf[cur as usize];
            self.pf[cur as usize] = prev;
            match next {
                Some((parent, e)) => {
                    prev = Some((cur, e));
                    cur = parent;
                }
                None => break,
            }
        }
        let e = self.edges.len();
        self.edges.push(Edge { l, r, just });
        self.pf[l as usize] = Some((r, e));
        if a < b {
            self.uf[b as usize] = a;
        } else {
            self.uf[a as usize] = b;
        }
        self.merges += 1;
        true
    }

    fn classes(&mut self) -> Vec<Vec<Id>> {
        let mut map: BTreeMap<Id, Vec<Id>> = BTreeMap::new();
        for i in 0..self.terms.len() as Id {
            let root = self.find(i);
            map.entry(root).or_default().push(i);
        }
        map.into_values().collect()
    }

    fn lookup(&self, t: &Term) -> Option<Id> {
        self.index.get(t).copied()
    }

    fn var_status(&mut self, t: Id, x: u32) -> Status {
        if let Some(&s) = self.var_cache.get(&(t, x)) {
            return s;
        }
        let s = var_status(self.th, &self.terms[t as usize], x).unwrap_or(Status::Unknown);
        self.var_cache.insert((t, x), s);
        s
    }

    /// Status of `pos` in `host`, cached by the context around it.
    fn pos_status(&mut self, host: Id, pos: &Position, ctx: &Term) -> Status {
        if let Some(&s) = self.ctx_cache.get(ctx) {
            return s;
        }
        let s = position_status(self.th, &self.terms[host as usize], pos).unwrap_or(Status::Unknown);
        self.ctx_cache.insert(ctx.clone(), s);
        s
    }

    /// `P_r^t` when `r ∈ SEss(t)` is definite, else `None`.
    fn sess_positions(&mut self, t: Id, r: Id) -> Option<BTreeSet<Position>> {
        if let Some(v) = self.sess_cache.get(&(t, r)) {
            return v.clone();
        }
        let (tt, rt) = (&self.terms[t as usize], &self.terms[r as usize]);
        let v = match in_sess(self.th, tt, rt) {
            Ok(Status::Essential) => minimal_positions_of(self.th, tt, rt, Mode::Strict).ok(),
            _ => None,
        };
        self.sess_cache.insert((t, r), v.clone());
        v
    }

    fn image_size(&self, a: Id, x: u32, r: Id) -> usize {
        let occ = self.terms[a as usize].var_occurrences(x);
        self.sizes[a as usize] + occ * (self.sizes[r as usize] - 1)
    }

    fn image(&self, a: Id, x: u32, r: Id) -> Option<Id> {
        if self.image_size(a, x, r) > self.cap {
            return None;
        }
        let t = self.terms[a as usize].substitute_var(x, &self.terms[r as usize]);
        self.lookup(&t)
    }

    fn apply_axioms(&mut self) {
        for e in self.th.axioms().to_vec() {
            self.seed(&e, Just::Axiom(e.clone()));
        }
    }

    fn seed(&mut self, e: &Identity, just: Just) -> bool {
        match (self.lookup(&e.lhs), self.lookup(&e.rhs)) {
            (Some(l), Some(r)) => self.union(l, r, just),
            _ => false,
        }
    }

    /// D4 (or D4e when `refined`), grouped per class: members of one class
    /// have pairwise-connected images.
    fn apply_subst(&mut self, refined: bool) -> bool {
        let mut changed = false;
        let n = self.terms.len() as Id;
        for class in self.classes() {
            if class.len() < 2 {
                continue;
            }
            for x in self.pool.clone() {
                if !class.iter().any(|&a| self.terms[a as usize].contains_var(x)) {
                    continue;
                }
                let essential: Vec<Id> = if refined {
                    class
                        .iter()
                        .copied()
                        .filter(|&a| self.var_status(a, x) == Status::Essential)
                        .collect()
                } else {
                    class.clone()
                };
                if essential.is_empty() {
                    continue;
                }
                for r in 0..n {
                    if Term::Var(x) == self.terms[r as usize] {
                        continue;
                    }
                    let Some((anchor, img)) = essential
                        .iter()
                        .find_map(|&a| self.image(a, x, r).map(|i| (a, i)))
                    else {
                        continue;
                    };
                    let rule = if refined { Rule::D4e } else { Rule::D4 };
                    for &b in &class {
                        if b == anchor {
                            continue;
                        }
                        if let Some(ib) = self.image(b, x, r) {
                            let just = Just::Subst {
                                prem: (anchor, b),
                                var: x,
                                term: r,
                                rule,
                            };
                            changed |= self.union(img, ib, just);
                        }
                    }
                    if !self.budget_left() {
                        return changed;
                    }
                }
            }
        }
        changed
    }

    /// D4f: t(x←r) ≈ t whenever x is fictive for t. Class independent.
    fn apply_fictive_subst(&mut self) -> bool {
        let mut changed = false;
        let n = self.terms.len() as Id;
        for t in 0..n {
            for x in self.terms[t as usize].vars() {
                if self.var_status(t, x) != Status::Fictive {
                    continue;
                }
                for r in 0..n {
                    if let Some(img) = self.image(t, x, r) {
                        if img != t {
                            changed |= self.union(img, t, Just::FictiveSubst { host: t, var: x, term: r });
                        }
                    }
                }
                if !self.budget_left() {
                    return changed;
                }
            }
        }
        changed
    }

    fn contexts(&self, h: Id) -> Vec<(Position, Term, Id)> {
        let t = &self.terms[h as usize];
        t.positions()
            .into_iter()
            .map(|p| {
                let ctx = t.replace_at(&p, &HOLE).expect("own position");
                let sub = self.lookup(t.get(&p).expect("own position")).expect("subterm in universe");
                (p, ctx, sub)
            })
            .collect()
    }

    /// D5 (or D5e when `refined`): terms that share a context and whose
    /// fillers are connected become connected.
    fn apply_replace(&mut self, refined: bool) -> bool {
        let mut changed = false;
        let n = self.terms.len() as Id;
        let mut size_of_class: HashMap<Id, usize> = HashMap::new();
        for i in 0..n {
            let root = self.find(i);
            *size_of_class.entry(root).or_default() += 1;
        }
        let mut groups: HashMap<(Term, Id), (Id, Position)> = HashMap::new();
        for h in 0..n {
            for (p, ctx, sub) in self.contexts(h) {
                if p.is_root() {
                    continue;
                }
                let root = self.find(sub);
                if size_of_class[&root] < 2 {
                    continue;
                }
                if refined && self.pos_status(h, &p, &ctx) != Status::Essential {
                    continue;
                }
                let rule = if refined { Rule::D5e } else { Rule::D5 };
                match groups.get(&(ctx.clone(), root)) {
                    None => {
                        groups.insert((ctx, root), (h, p));
                    }
                    Some((h0, _)) => {
                        let h0 = *h0;
                        let s0 = self.lookup(self.terms[h0 as usize].get(&p).expect("same context")).expect("in universe");
                        let just = Just::Replace {
                            prem: (s0, sub),
                            host: h0,
                            pos: p,
                            rule,
                        };
                        changed |= self.union(h, h0, just);
                    }
                }
            }
            if !self.budget_left() {
                break;
            }
        }
        changed
    }

    /// D5f: any filler at a fictive position. Class independent.
    fn apply_fictive_replace(&mut self) -> bool {
        let mut changed = false;
        let n = self.terms.len() as Id;
        let mut groups: HashMap<Term, Id> = HashMap::new();
        for h in 0..n {
            for (p, ctx, _) in self.contexts(h) {
                if self.pos_status(h, &p, &ctx) != Status::Fictive {
                    continue;
                }
                match groups.get(&ctx) {
                    None => {
                        groups.insert(ctx, h);
                    }
                    Some(&h0) => {
                        changed |= self.union(h, h0, Just::FictiveReplace { host: h0, pos: p });
                    }
                }
            }
            if !self.budget_left() {
                break;
            }
        }
        changed
    }

    /// Σ-replacement, grouped by the classes of t, r and u.
    fn apply_sigma(&mut self) -> bool {
        let mut changed = false;
        let n = self.terms.len() as Id;
        for class in self.classes() {
            let mut groups: HashMap<(Id, Id), (Id, Id, Id, Id)> = HashMap::new();
            for &t in &class {
                let subs: Vec<Id> = self.terms[t as usize]
                    .subterms()
                    .iter()
                    .map(|s| self.lookup(s).expect("subterm in universe"))
                    .collect();
                for r in subs {
                    let Some(ps) = self.sess_positions(t, r) else {
                        continue;
                    };
                    let tt = self.terms[t as usize].clone();
                    let removed: usize = ps.iter().map(|p| tt.get(p).expect("own position").size()).sum();
                    let kept = self.sizes[t as usize] - removed;
                    let rr = self.find(r);
                    for u in 0..n {
                        let size = kept + ps.len() * self.sizes[u as usize];
                        if size > self.cap {
                            // the universe is sorted by size
                            break;
                        }
                        let result = tt.replace_all_at(&ps, &self.terms[u as usize]).expect("antichain");
                        let Some(res) = self.lookup(&result) else {
                            continue;
                        };
                        let key = (rr, self.find(u));
                        match groups.get(&key) {
                            None => {
                                groups.insert(key, (t, r, u, res));
                            }
                            Some(&(t0, r0, u0, res0)) => {
                                let just = Just::Sigma {
                                    t: (t0, t),
                                    r: (r0, r),
                                    u: (u0, u),
                                };
                                changed |= self.union(res0, res, just);
                            }
                        }
                    }
                    if !self.budget_left() {
                        return changed;
                    }
                }
            }
        }
        changed
    }

    /// Saturates, stopping early once `goal` (if given) is connected.
    pub fn run(&mut self, goal: Option<&Identity>) {
        let done = |c: &Closure| goal.is_some_and(|g| c.connected(&g.lhs, &g.rhs));
        self.apply_axioms();
        if self.system == System::DRefined {
            self.apply_fictive_subst();
            self.apply_fictive_replace();
        }
        loop {
            if done(self) || !self.budget_left() {
                return;
            }
            let changed = match self.system {
                System::D => {
                    let a = self.apply_subst(false);
                    let b = !done(self) && self.apply_replace(false);
                    a | b
                }
                System::DRefined => {
                    let a = self.apply_subst(true);
                    let b = !done(self) && self.apply_replace(true);
                    a | b
                }
                System::SigmaR => {
                    let a = self.apply_subst(false);
                    let b = !done(self) && self.apply_sigma();
                    a | b
                }
            };
            if !changed {
                self.saturated = self.budget_left();
                return;
            }
        }
    }

    /// Adds identities as unexplained premises.
    pub fn add_seeds(&mut self, seeds: &[Identity]) {
        for e in seeds {
            self.seed(e, Just::Seed);
        }
    }

    /// Every identity between connected universe terms, reflexive ones
    /// included, in term order.
    pub fn identities(&mut self) -> BTreeSet<Identity> {
        let mut out = BTreeSet::new();
        for class in self.classes() {
            for &a in &class {
                for &b in &class {
                    out.insert(Identity::new(
                        self.terms[a as usize].clone(),
                        self.terms[b as usize].clone(),
                    ));
                }
            }
        }
        out
    }

    /// Tree path a → b as (edge, traversed from edge.l to edge.r) pairs.
    fn path(&self, a: Id, b: Id) -> Vec<(usize, bool)> {
        let mut up_a = Vec::new();
        let mut seen: HashMap<Id, usize> = HashMap::new();
        let mut cur = a;
        seen.insert(cur, 0);
        while let Some((next, e)) = self.pf[cur as usize] {
            up_a.push((cur, e));
            cur = next;
            seen.insert(cur, up_a.len());
        }
        let mut up_b = Vec::new();
        let mut cur = b;
        while !seen.contains_key(&cur) {
            let (next, e) = self.pf[cur as usize].expect("connected terms share a tree");
            up_b.push((cur, e));
            cur = next;
        }
        let meet = seen[&cur];
        let mut out: Vec<(usize, bool)> = up_a[..meet]
            .iter()
            .map(|&(node, e)| (e, self.edges[e].l == node))
            .collect();
        for &(node, e) in up_b.iter().rev() {
            // walking down towards `node`
            out.push((e, self.edges[e].r == node));
        }
        out
    }

    fn premises(&self, e: usize) -> Vec<(Id, Id)> {
        match &self.edges[e].just {
            Just::Subst { prem, .. } | Just::Replace { prem, .. } => vec![*prem],
            Just::Sigma { t, r, u } => vec![*t, *r, *u],
            _ => Vec::new(),
        }
    }

    /// Extracts a proof of `goal`, or `None` if the two sides are not
    /// connected or the connection rests on seeds.
    pub fn explain(&self, goal: &Identity) -> Option<Proof> {
        let (a, b) = (self.id(&goal.lhs)?, self.id(&goal.rhs)?);
        if self.find_ro(a) != self.find_ro(b) {
            return None;
        }
        let mut needed: BTreeSet<usize> = BTreeSet::new();
        let mut work: Vec<(Id, Id)> = vec![(a, b)];
        let mut seen_pairs: HashSet<(Id, Id)> = HashSet::new();
        while let Some((x, y)) = work.pop() {
            if !seen_pairs.insert((x, y)) {
                continue;
            }
            for (e, _) in self.path(x, y) {
                if needed.insert(e) {
                    work.extend(self.premises(e));
                }
            }
        }
        let mut bld = ProofBuilder::new();
        let mut step_of: HashMap<usize, usize> = HashMap::new();
        let mut chains: HashMap<(Id, Id), usize> = HashMap::new();
        for &e in &needed {
            let s = self.edge_step(&mut bld, e, &step_of, &mut chains)?;
            step_of.insert(e, s);
        }
        let last = self.chain(&mut bld, a, b, &step_of, &mut chains);
        Some(bld.finish_at(last))
    }

    fn chain(
        &self,
        bld: &mut ProofBuilder,
        a: Id,
        b: Id,
        step_of: &HashMap<usize, usize>,
        chains: &mut HashMap<(Id, Id), usize>,
    ) -> usize {
        if let Some(&i) = chains.get(&(a, b)) {
            return i;
        }
        let mut acc = bld.refl(&self.terms[a as usize]);
        for (e, forward) in self.path(a, b) {
            let s = step_of[&e];
            let s = if forward { s } else { bld.symm(s) };
            acc = bld.trans(acc, s);
        }
        chains.insert((a, b), acc);
        acc
    }

    fn edge_step(
        &self,
        bld: &mut ProofBuilder,
        e: usize,
        step_of: &HashMap<usize, usize>,
        chains: &mut HashMap<(Id, Id), usize>,
    ) -> Option<usize> {
        let edge = &self.edges[e];
        let term = |i: Id| self.terms[i as usize].clone();
        let conclusion = Identity::new(term(edge.l), term(edge.r));
        let step = match &edge.just {
            Just::Axiom(ax) => {
                let i = bld.axiom(ax.clone());
                bld.oriented(i, &conclusion.lhs)
            }
            Just::Seed => return None,
            Just::Subst { prem, var, term: r, rule } => {
                let p = self.chain(bld, prem.0, prem.1, step_of, chains);
                bld.push(
                    conclusion,
                    *rule,
                    vec![p],
                    Instantiation::Subst {
                        var: *var,
                        term: term(*r),
                    },
                )
            }
            Just::FictiveSubst { host, var, term: r } => {
                let p = bld.refl(&term(*host));
                bld.push(
                    conclusion,
                    Rule::D4f,
                    vec![p],
                    Instantiation::Subst {
                        var: *var,
                        term: term(*r),
                    },
                )
            }
            Just::Replace { prem, host, pos, rule } => {
                let p = self.chain(bld, prem.0, prem.1, step_of, chains);
                bld.push(
                    conclusion,
                    *rule,
                    vec![p],
                    Instantiation::Replace {
                        host: term(*host),
                        pos: pos.clone(),
                    },
                )
            }
            Just::FictiveReplace { host, pos } => bld.push(
                conclusion,
                Rule::D5f,
                Vec::new(),
                Instantiation::Replace {
                    host: term(*host),
                    pos: pos.clone(),
                },
            ),
            Just::Sigma { t, r, u } => {
                let pt = self.chain(bld, t.0, t.1, step_of, chains);
                let pr = self.chain(bld, r.0, r.1, step_of, chains);
                let pu = self.chain(bld, u.0, u.1, step_of, chains);
                bld.push(
                    conclusion,
                    Rule::SigmaR1,
                    vec![pt, pr, pu],
                    Instantiation::Sigma {
                        r: term(r.0),
                        v: term(r.1),
                        u: term(u.0),
                        w: term(u.1),
                    },
                )
            }
        };
        Some(step)
    }
}

/// Result of [`closure_sample`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureSample {
    pub identities: BTreeSet<Identity>,
    /// False when the step budget ran out before a fixed point.
    pub saturated: bool,
    pub universe: usize,
}

/// The derivable identities among terms of size ≤ cap.
pub fn closure_sample(th: &Theory, cfg: &ClosureConfig) -> Option<ClosureSample> {
    closure_from_seeds(th, &[], cfg)
}

/// Like [`closure_sample`], with extra starting identities.
pub fn closure_from_seeds(th: &Theory, seeds: &[Identity], cfg: &ClosureConfig) -> Option<ClosureSample> {
    let mut c = Closure::new(th, cfg)?;
    c.add_seeds(seeds);
    c.run(None);
    Some(ClosureSample {
        saturated: c.is_saturated(),
        universe: c.universe().len(),
        identities: c.identities(),
    })
}

/// Outcome of [`derive`].
#[derive(Clone, Debug)]
pub enum Derivation {
    /// A checked proof of the goal.
    Proof(Proof),
    /// The goal fails in a finite model of the axioms.
    Refuted(Witness),
    /// Neither found within the budget.
    NotFound,
}

/// Searches for a proof of `goal` in `system`. Every returned proof passes
/// [`check_proof_with`] restricted to the rules of `system`.
pub fn derive(th: &Theory, goal: &Identity, system: System, budget: Budget) -> Derivation {
    let opts = CheckOptions {
        rules: Some(system.rules()),
        ..CheckOptions::default()
    };
    let accept = |p: Proof| -> Option<Proof> {
        (p.conclusion() == Some(goal) && check_proof_with(th, &p, &opts).is_ok()).then_some(p)
    };
    if goal.is_trivial() {
        let mut b = ProofBuilder::new();
        let i = b.refl(&goal.lhs);
        return Derivation::Proof(b.finish_at(i));
    }
    if system != System::SigmaR {
        if let Some(w) = th.refute(&goal.lhs, &goal.rhs) {
            return Derivation::Refuted(w);
        }
    }
    if system == System::D {
        let mut search = Bidirectional::new(&th.clone().with_budget(budget), &goal.lhs, &goal.rhs);
        loop {
            match search.expand() {
                Search::Met(p) => {
                    if let Some(p) = accept(p) {
                        return Derivation::Proof(p);
                    }
                    break;
                }
                Search::Exhausted => break,
                Search::Running => {}
            }
        }
    }
    let pool = default_pool(th, &[&goal.lhs, &goal.rhs]);
    let start = goal.lhs.size().max(goal.rhs.size());
    for cap in start..=budget.max_term_size.max(start) {
        let cfg = ClosureConfig {
            system,
            cap,
            max_steps: budget.max_steps,
            var_pool: Some(pool.clone()),
            max_universe: ClosureConfig::new(system, cap).max_universe,
        };
        let Some(mut c) = Closure::new(th, &cfg) else {
            break;
        };
        c.run(Some(goal));
        if let Some(p) = c.explain(goal).and_then(accept) {
            return Derivation::Proof(p);
        }
    }
    Derivation::NotFound
}

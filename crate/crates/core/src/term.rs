//! Terms over a finite signature, their positions, and the two basic
//! replacement operators (inductive and positional composition).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Operation symbol name. Shared so that cloning terms stays cheap.
pub type Symbol = Arc<str>;

/// A type: operation symbols with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` pairs, rejecting duplicate
    /// names and names that look like variables.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    /// Parses `f/2, g/1, c/0` (commas or whitespace between entries).
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = Signature::new();
        for entry in text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|e| !e.is_empty())
        {
            let (name, arity) = entry
                .split_once('/')
                .ok_or_else(|| Error::Signature(format!("expected name/arity, found `{entry}`")))?;
            let arity: usize = arity
                .parse()
                .map_err(|_| Error::Signature(format!("bad arity in `{entry}`")))?;
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<()> {
        if !is_symbol_name(name) {
            return Err(Error::Signature(format!("`{name}` is not a valid symbol name")));
        }
        if is_variable_lexeme(name) {
            return Err(Error::Signature(format!(
                "`{name}` collides with the variable syntax"
            )));
        }
        if self.symbols.contains_key(name) {
            return Err(Error::Signature(format!("duplicate symbol `{name}`")));
        }
        self.symbols.insert(Arc::from(name), arity);
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    /// Interned handle for a symbol of this signature.
    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbols.get_key_value(name).map(|(k, _)| k.clone())
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, usize)> + '_ {
        self.symbols.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }

    /// The only symbol, when the signature consists of exactly one binary
    /// operation.
    pub fn single_binary(&self) -> Option<Symbol> {
        match self.symbols.iter().next() {
            Some((name, 2)) if self.symbols.len() == 1 => Some(name.clone()),
            _ => None,
        }
    }

    pub fn position_style(&self) -> PositionStyle {
        if self.max_arity() <= 9 {
            PositionStyle::Compact
        } else {
            PositionStyle::Dotted
        }
    }

    /// Checks that every application in `t` uses a known symbol with the
    /// declared arity.
    pub fn check(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(0) => Err(Error::Syntax {
                offset: 0,
                message: "variable indices start at 1".into(),
            }),
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity = self
                    .arity(f)
                    .ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.to_string(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }

    /// Smallest signature in which `t` is well formed. Fails when a symbol is
    /// used with two different arities.
    pub fn infer(terms: &[&Term]) -> Result<Self> {
        fn walk(t: &Term, out: &mut BTreeMap<Symbol, usize>) -> Result<()> {
            if let Term::App(f, args) = t {
                match out.get(f) {
                    Some(&a) if a != args.len() => {
                        return Err(Error::ArityMismatch {
                            symbol: f.to_string(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    _ => {
                        out.insert(f.clone(), args.len());
                    }
                }
                for a in args {
                    walk(a, out)?;
                }
            }
            Ok(())
        }
        let mut symbols = BTreeMap::new();
        for t in terms {
            walk(t, &mut symbols)?;
        }
        Ok(Signature { symbols })
    }

    /// Rebuilds `t` with this signature's shared symbol handles.
    pub(crate) fn intern(&self, t: &Term) -> Term {
        match t {
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => Term::App(
                self.symbol(f).unwrap_or_else(|| f.clone()),
                args.iter().map(|a| self.intern(a)).collect(),
            ),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, arity) in &self.symbols {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{name}/{arity}")?;
        }
        Ok(())
    }
}

pub(crate) fn is_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `x` followed by a positive decimal integer.
pub(crate) fn is_variable_lexeme(name: &str) -> bool {
    name.strip_prefix('x')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// A term: a variable `x<i>` (i ≥ 1) or an operation symbol applied to
/// its arguments. Constants are applications with no arguments.
///
/// The derived ordering puts variables before applications, orders
/// variables by index and applications by symbol name and then
/// lexicographically by their argument lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(index: u32) -> Term {
        Term::Var(index)
    }

    pub fn app(symbol: impl Into<Symbol>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<u32> {
        match self {
            Term::Var(i) => Some(*i),
            Term::App(..) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn root_symbol(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, x: u32) -> bool {
        match self {
            Term::Var(i) => *i == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Largest variable index occurring in the term, 0 for ground terms.
    pub fn max_var(&self) -> u32 {
        match self {
            Term::Var(i) => *i,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// The fresh variable for this term: one past the largest index.
    pub fn fresh_var(&self) -> u32 {
        self.max_var() + 1
    }

    /// Variables in left-to-right leaf order, with repetitions.
    pub fn leaf_vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        fn walk(t: &Term, out: &mut Vec<u32>) {
            match t {
                Term::Var(i) => out.push(*i),
                Term::App(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn leftmost_var(&self) -> Option<u32> {
        match self {
            Term::Var(i) => Some(*i),
            Term::App(_, args) => args.iter().find_map(Term::leftmost_var),
        }
    }

    pub fn rightmost_var(&self) -> Option<u32> {
        match self {
            Term::Var(i) => Some(*i),
            Term::App(_, args) => args.iter().rev().find_map(Term::rightmost_var),
        }
    }

    /// All positions in preorder (which is also their sorted order).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.size());
        let mut path = Vec::new();
        fn walk(t: &Term, path: &mut Vec<u32>, out: &mut Vec<Position>) {
            out.push(Position(path.clone()));
            for (i, a) in t.args().iter().enumerate() {
                path.push(i as u32 + 1);
                walk(a, path, out);
                path.pop();
            }
        }
        walk(self, &mut path, &mut out);
        out
    }

    pub fn position_set(&self) -> BTreeSet<Position> {
        self.positions().into_iter().collect()
    }

    pub fn get(&self, p: &Position) -> Option<&Term> {
        let mut cur = self;
        for &step in p.steps() {
            cur = cur.args().get((step as usize).checked_sub(1)?)?;
        }
        Some(cur)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term> {
        self.get(p)
            .ok_or_else(|| Error::InvalidPosition(p.to_string()))
    }

    /// Sub(t) as a duplicate-free set.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        fn walk(t: &Term, out: &mut BTreeSet<Term>) {
            if out.insert(t.clone()) {
                t.args().iter().for_each(|a| walk(a, out));
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn has_subterm(&self, r: &Term) -> bool {
        self == r || self.args().iter().any(|a| a.has_subterm(r))
    }

    /// Positions whose subterm is syntactically `r`.
    pub fn occurrences(&self, r: &Term) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| self.get(p) == Some(r))
            .collect()
    }

    /// Positional composition `t(p; r)`.
    pub fn replace_at(&self, p: &Position, r: &Term) -> Result<Term> {
        fn go(t: &Term, steps: &[u32], r: &Term) -> Option<Term> {
            match steps.split_first() {
                None => Some(r.clone()),
                Some((&i, rest)) => match t {
                    Term::App(f, args) if i >= 1 && (i as usize) <= args.len() => {
                        let mut args = args.clone();
                        let k = i as usize - 1;
                        args[k] = go(&args[k], rest, r)?;
                        Some(Term::App(f.clone(), args))
                    }
                    _ => None,
                },
            }
        }
        go(self, p.steps(), r).ok_or_else(|| Error::InvalidPosition(p.to_string()))
    }

    /// Multi-position composition `t(p1,…,pm; u1,…,um)`; the positions must
    /// be pairwise incomparable.
    pub fn replace_many(&self, positions: &[Position], replacements: &[Term]) -> Result<Term> {
        assert_eq!(
            positions.len(),
            replacements.len(),
            "one replacement per position"
        );
        check_antichain(positions)?;
        let mut out = self.clone();
        for (p, r) in positions.iter().zip(replacements) {
            out = out.replace_at(p, r)?;
        }
        Ok(out)
    }

    /// `t(P; s)`: the same replacement at every position of an antichain.
    pub fn replace_all_at<'a, I>(&self, positions: I, r: &Term) -> Result<Term>
    where
        I: IntoIterator<Item = &'a Position>,
    {
        let positions: Vec<Position> = positions.into_iter().cloned().collect();
        let reps = vec![r.clone(); positions.len()];
        self.replace_many(&positions, &reps)
    }

    /// Inductive composition `t(r ← s)`.
    pub fn replace_term(&self, r: &Term, s: &Term) -> Term {
        if self == r {
            return s.clone();
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.replace_term(r, s)).collect())
            }
        }
    }

    /// `t(r1 ← s1, …, rm ← sm)`; no pattern may be a subterm of another.
    pub fn replace_terms(&self, pairs: &[(Term, Term)]) -> Result<Term> {
        for (i, (ri, _)) in pairs.iter().enumerate() {
            for (j, (rj, _)) in pairs.iter().enumerate() {
                if i != j && rj.has_subterm(ri) {
                    return Err(Error::NestedPatterns(ri.to_string(), rj.to_string()));
                }
            }
        }
        fn go(t: &Term, pairs: &[(Term, Term)]) -> Term {
            if let Some((_, s)) = pairs.iter().find(|(r, _)| r == t) {
                return s.clone();
            }
            match t {
                Term::Var(_) => t.clone(),
                Term::App(f, args) => {
                    Term::App(f.clone(), args.iter().map(|a| go(a, pairs)).collect())
                }
            }
        }
        Ok(go(self, pairs))
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, map: &BTreeMap<u32, Term>) -> Term {
        match self {
            Term::Var(i) => map.get(i).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }

    /// `t(x ← r)` for a single variable.
    pub fn substitute_var(&self, x: u32, r: &Term) -> Term {
        match self {
            Term::Var(i) if *i == x => r.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute_var(x, r)).collect())
            }
        }
    }

    /// Number of occurrences of variable `x`.
    pub fn var_occurrences(&self, x: u32) -> usize {
        match self {
            Term::Var(i) => usize::from(*i == x),
            Term::App(_, args) => args.iter().map(|a| a.var_occurrences(x)).sum(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// How positions are written: `121` when every arity fits in one digit,
/// `1.2.1` otherwise. The root is always `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionStyle {
    Compact,
    Dotted,
}

/// Address of a node: the sequence of 1-based child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<u32>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn new(steps: Vec<u32>) -> Self {
        Position(steps)
    }

    pub fn steps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Self {
        let mut steps = self.0.clone();
        steps.push(i);
        Position(steps)
    }

    pub fn concat(&self, other: &Position) -> Self {
        let mut steps = self.0.clone();
        steps.extend_from_slice(&other.0);
        Position(steps)
    }

    /// `self ⪯ other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    pub fn comparable(&self, other: &Position) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The part of `other` below `self`, if `self ⪯ other`.
    pub fn strip_prefix_of(&self, other: &Position) -> Option<Position> {
        other
            .0
            .strip_prefix(self.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    pub fn render(&self, style: PositionStyle) -> String {
        if self.0.is_empty() {
            return "e".to_string();
        }
        let sep = match style {
            PositionStyle::Compact if self.0.iter().all(|&s| s <= 9) => "",
            _ => ".",
        };
        self.0
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Parses `e`/`ε`, `121` (compact style) or `1.2.1`.
    pub fn parse(text: &str, style: PositionStyle) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidPosition(text.to_string());
        if text == "e" || text == "ε" || text.is_empty() {
            return Ok(Position::root());
        }
        let steps: Vec<u32> = if text.contains('.') || style == PositionStyle::Dotted {
            text.split('.')
                .map(|s| s.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if steps.contains(&0) {
            return Err(bad());
        }
        Ok(Position(steps))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(PositionStyle::Compact))
    }
}

pub fn check_antichain(positions: &[Position]) -> Result<()> {
    for (i, p) in positions.iter().enumerate() {
        for q in &positions[i + 1..] {
            if p.comparable(q) {
                return Err(Error::ComparablePositions(p.to_string(), q.to_string()));
            }
        }
    }
    Ok(())
}

/// The ⪯-minimal elements of a set of positions.
pub fn minimal_positions(set: &BTreeSet<Position>) -> BTreeSet<Position> {
    set.iter()
        .filter(|p| !set.iter().any(|q| q.is_proper_prefix_of(p)))
        .cloned()
        .collect()
}

/// An identity `lhs ≈ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Identity { lhs, rhs }
    }

    pub fn mirror(&self) -> Identity {
        Identity::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn max_var(&self) -> u32 {
        self.lhs.max_var().max(self.rhs.max_var())
    }

    /// Same variables on both sides.
    pub fn is_regular(&self) -> bool {
        self.lhs.vars() == self.rhs.vars()
    }

    /// Every variable occurs equally often on both sides.
    pub fn is_balanced(&self) -> bool {
        self.vars()
            .into_iter()
            .all(|x| self.lhs.var_occurrences(x) == self.rhs.var_occurrences(x))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

//! Proof objects and their line-oriented text form
//! `<idx>: <lhs> = <rhs> ; <rule> [premises=i,j] [key=value...]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hyper::Hypersubstitution;
use crate::parse::{parse_identity, parse_term};
use crate::term::{Identity, Position, PositionStyle, Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Axiom,
    D1,
    D2,
    D3,
    D4,
    D4e,
    D4f,
    D5,
    D5e,
    D5f,
    SigmaR1,
    H1,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Axiom,
        Rule::D1,
        Rule::D2,
        Rule::D3,
        Rule::D4,
        Rule::D4e,
        Rule::D4f,
        Rule::D5,
        Rule::D5e,
        Rule::D5f,
        Rule::SigmaR1,
        Rule::H1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Axiom => "Axiom",
            Rule::D1 => "D1",
            Rule::D2 => "D2",
            Rule::D3 => "D3",
            Rule::D4 => "D4",
            Rule::D4e => "D4e",
            Rule::D4f => "D4f",
            Rule::D5 => "D5",
            Rule::D5e => "D5e",
            Rule::D5f => "D5f",
            Rule::SigmaR1 => "SigmaR1",
            Rule::H1 => "H1",
        }
    }

    fn premise_count(self) -> usize {
        match self {
            Rule::Axiom | Rule::D1 | Rule::D5f => 0,
            Rule::D3 => 2,
            Rule::SigmaR1 => 3,
            _ => 1,
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        let alias = match s {
            "D4'" => "D4e",
            "D4''" => "D4f",
            "D5'" => "D5e",
            "D5''" => "D5f",
            "ΣR1" | "SR1" => "SigmaR1",
            other => other,
        };
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == alias)
            .ok_or_else(|| Error::ProofSyntax(format!("unknown rule `{s}`")))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rule-specific data needed to recompute a conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instantiation {
    None,
    /// D4 family: substitute `term` for variable `var`.
    Subst { var: u32, term: Term },
    /// D5 family: replace inside `host` at `pos`.
    Replace { host: Term, pos: Position },
    /// ΣR1: the patterns and replacements of both sides.
    Sigma { r: Term, v: Term, u: Term, w: Term },
    Hyper(Hypersubstitution),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub conclusion: Identity,
    pub rule: Rule,
    /// 0-based indices of earlier steps.
    pub premises: Vec<usize>,
    pub inst: Instantiation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn conclusion(&self) -> Option<&Identity> {
        self.steps.last().map(|s| &s.conclusion)
    }

    pub fn rules_used(&self) -> std::collections::BTreeSet<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    /// Renders the script with 1-based step numbers.
    pub fn render(&self, style: PositionStyle) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{}: {} ; {}",
                i + 1,
                step.conclusion,
                step.rule
            ));
            if !step.premises.is_empty() {
                let ps: Vec<String> = step.premises.iter().map(|p| (p + 1).to_string()).collect();
                out.push_str(&format!(" premises={}", ps.join(",")));
            }
            match &step.inst {
                Instantiation::None => {}
                Instantiation::Subst { var, term } => {
                    out.push_str(&format!(" var=x{var} term={term}"))
                }
                Instantiation::Replace { host, pos } => {
                    out.push_str(&format!(" host={host} pos={}", pos.render(style)))
                }
                Instantiation::Sigma { r, v, u, w } => {
                    out.push_str(&format!(" r={r} v={v} u={u} w={w}"))
                }
                Instantiation::Hyper(h) => {
                    for (f, image) in h.entries() {
                        out.push_str(&format!(" map.{f}={image}"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses a script. Blank lines and `#` comments are ignored; step
    /// numbers must run 1, 2, 3, …
    pub fn parse(text: &str, sig: &Signature) -> Result<Proof> {
        let style = sig.position_style();
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::ProofSyntax(format!("line {}: {m}", lineno + 1));
            let (num, rest) = line
                .split_once(':')
                .ok_or_else(|| bad("expected `<idx>: ...`".into()))?;
            let num: usize = num
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad step number `{}`", num.trim())))?;
            if num != steps.len() + 1 {
                return Err(bad(format!("expected step {}, found {num}", steps.len() + 1)));
            }
            let (ident, just) = rest
                .split_once(';')
                .ok_or_else(|| bad("expected `; <rule>`".into()))?;
            let conclusion = parse_identity(ident, sig).map_err(|e| bad(e.to_string()))?;
            let mut tokens = just.split_whitespace();
            let rule: Rule = tokens
                .next()
                .ok_or_else(|| bad("missing rule".into()))?
                .parse()
                .map_err(|e: Error| bad(e.to_string()))?;
            let mut premises = Vec::new();
            let mut kv: BTreeMap<String, String> = BTreeMap::new();
            let mut hyper = BTreeMap::new();
            for tok in tokens {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, found `{tok}`")))?;
                if k == "premises" {
                    for p in v.split(',').filter(|p| !p.is_empty()) {
                        let p: usize = p
                            .parse()
                            .map_err(|_| bad(format!("bad premise `{p}`")))?;
                        if p == 0 || p > steps.len() {
                            return Err(bad(format!("premise {p} does not precede step {num}")));
                        }
                        premises.push(p - 1);
                    }
                } else if let Some(f) = k.strip_prefix("map.") {
                    let image = parse_term(v, sig).map_err(|e| bad(e.to_string()))?;
                    hyper.insert(f.to_string(), image);
                } else if kv.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(bad(format!("duplicate key `{k}`")));
                }
            }
            if premises.len() != rule.premise_count() {
                return Err(bad(format!(
                    "{rule} takes {} premise(s), found {}",
                    rule.premise_count(),
                    premises.len()
                )));
            }
            let mut take_term = |key: &str| -> Result<Term> {
                let v = kv
                    .remove(key)
                    .ok_or_else(|| bad(format!("{rule} needs `{key}=`")))?;
                parse_term(&v, sig).map_err(|e| bad(e.to_string()))
            };
            let inst = match rule {
                Rule::Axiom | Rule::D1 | Rule::D2 | Rule::D3 => Instantiation::None,
                Rule::D4 | Rule::D4e | Rule::D4f => {
                    let var = take_term("var")?
                        .as_var()
                        .ok_or_else(|| bad("`var=` must be a variable".into()))?;
                    let term = take_term("term")?;
                    Instantiation::Subst { var, term }
                }
                Rule::D5 | Rule::D5e | Rule::D5f => {
                    let host = take_term("host")?;
                    let pos = kv
                        .remove("pos")
                        .ok_or_else(|| bad(format!("{rule} needs `pos=`")))?;
                    let pos = Position::parse(&pos, style).map_err(|e| bad(e.to_string()))?;
                    Instantiation::Replace { host, pos }
                }
                Rule::SigmaR1 => Instantiation::Sigma {
                    r: take_term("r")?,
                    v: take_term("v")?,
                    u: take_term("u")?,
                    w: take_term("w")?,
                },
                Rule::H1 => Instantiation::Hyper(
                    Hypersubstitution::new(sig, std::mem::take(&mut hyper))
                        .map_err(|e| bad(e.to_string()))?,
                ),
            };
            if let Some(k) = kv.keys().next() {
                return Err(bad(format!("unexpected key `{k}` for {rule}")));
            }
            if !hyper.is_empty() {
                return Err(bad(format!("`map.` keys only apply to H1, not {rule}")));
            }
            steps.push(ProofStep {
                conclusion,
                rule,
                premises,
                inst,
            });
        }
        Ok(Proof { steps })
    }
}

/// Appends steps while reusing any step that already concludes the same
/// identity.
#[derive(Default)]
pub struct ProofBuilder {
    proof: Proof,
    known: HashMap<Identity, usize>,
}

impl ProofBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn conclusion(&self, i: usize) -> &Identity {
        &self.proof.steps[i].conclusion
    }

    pub fn push(&mut self, conclusion: Identity, rule: Rule, premises: Vec<usize>, inst: Instantiation) -> usize {
        if let Some(&i) = self.known.get(&conclusion) {
            return i;
        }
        let i = self.proof.steps.len();
        self.known.insert(conclusion.clone(), i);
        self.proof.steps.push(ProofStep {
            conclusion,
            rule,
            premises,
            inst,
        });
        i
    }

    pub fn axiom(&mut self, e: Identity) -> usize {
        self.push(e, Rule::Axiom, Vec::new(), Instantiation::None)
    }

    pub fn refl(&mut self, t: &Term) -> usize {
        self.push(Identity::new(t.clone(), t.clone()), Rule::D1, Vec::new(), Instantiation::None)
    }

    pub fn symm(&mut self, i: usize) -> usize {
        let e = self.conclusion(i).mirror();
        if e.is_trivial() {
            return i;
        }
        self.push(e, Rule::D2, vec![i], Instantiation::None)
    }

    pub fn trans(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = (self.conclusion(i).clone(), self.conclusion(j).clone());
        assert_eq!(a.rhs, b.lhs, "transitivity needs matching middle terms");
        if a.is_trivial() {
            return j;
        }
        if b.is_trivial() {
            return i;
        }
        self.push(Identity::new(a.lhs, b.rhs), Rule::D3, vec![i, j], Instantiation::None)
    }

    /// Step `i` oriented so that its left side is `lhs`.
    pub fn oriented(&mut self, i: usize, lhs: &Term) -> usize {
        if &self.conclusion(i).lhs == lhs {
            i
        } else {
            debug_assert_eq!(&self.conclusion(i).rhs, lhs);
            self.symm(i)
        }
    }

    /// Chains steps whose sides meet end to end.
    pub fn chain(&mut self, steps: &[usize]) -> usize {
        let mut acc = steps[0];
        for &s in &steps[1..] {
            acc = self.trans(acc, s);
        }
        acc
    }

    pub fn subst(&mut self, i: usize, var: u32, term: &Term, rule: Rule) -> usize {
        let e = self.conclusion(i).clone();
        let conclusion = match rule {
            Rule::D4f => Identity::new(e.lhs.substitute_var(var, term), e.rhs.clone()),
            _ => Identity::new(e.lhs.substitute_var(var, term), e.rhs.substitute_var(var, term)),
        };
        if conclusion == e && rule != Rule::D4f {
            return i;
        }
        self.push(
            conclusion,
            rule,
            vec![i],
            Instantiation::Subst {
                var,
                term: term.clone(),
            },
        )
    }

    /// Instantiates step `i` with a simultaneous substitution using
    /// single-variable D4 steps, renaming through fresh variables when
    /// the images mention substituted variables.
    pub fn instantiate(&mut self, i: usize, sigma: &BTreeMap<u32, Term>) -> usize {
        let e = self.conclusion(i).clone();
        let moved: Vec<(u32, Term)> = e
            .vars()
            .into_iter()
            .filter_map(|v| sigma.get(&v).filter(|t| **t != Term::Var(v)).map(|t| (v, t.clone())))
            .collect();
        let clash = moved
            .iter()
            .any(|(_, t)| moved.iter().any(|(v, _)| t.contains_var(*v)));
        let mut acc = i;
        if !clash {
            for (v, t) in &moved {
                acc = self.subst(acc, *v, t, Rule::D4);
            }
            return acc;
        }
        let mut fresh = moved
            .iter()
            .map(|(v, t)| (*v).max(t.max_var()))
            .chain(std::iter::once(e.max_var()))
            .max()
            .unwrap_or(0)
            + 1;
        let mut renamed = Vec::new();
        for (v, t) in &moved {
            acc = self.subst(acc, *v, &Term::Var(fresh), Rule::D4);
            renamed.push((fresh, t.clone()));
            fresh += 1;
        }
        for (y, t) in &renamed {
            acc = self.subst(acc, *y, t, Rule::D4);
        }
        acc
    }

    /// D5 from step `i` (t ≈ s) inside `host` at `pos`: host(pos; s) ≈ host.
    pub fn replace(&mut self, i: usize, host: &Term, pos: &crate::term::Position) -> usize {
        let e = self.conclusion(i).clone();
        let conclusion = Identity::new(host.replace_at(pos, &e.rhs).expect("valid position"), host.clone());
        self.push(
            conclusion,
            Rule::D5,
            vec![i],
            Instantiation::Replace {
                host: host.clone(),
                pos: pos.clone(),
            },
        )
    }

    pub fn finish(self) -> Proof {
        self.proof
    }

    /// Truncates to the steps the last one depends on, renumbering.
    pub fn finish_at(self, last: usize) -> Proof {
        prune(&self.proof, last)
    }
}

/// Keeps only the steps needed for step `last`, which becomes the final
/// step.
pub fn prune(proof: &Proof, last: usize) -> Proof {
    let mut needed = vec![false; proof.steps.len()];
    let mut stack = vec![last];
    while let Some(i) = stack.pop() {
        if !needed[i] {
            needed[i] = true;
            stack.extend(proof.steps[i].premises.iter().copied());
        }
    }
    let mut map = vec![usize::MAX; proof.steps.len()];
    let mut steps = Vec::new();
    for (i, step) in proof.steps.iter().enumerate().take(last + 1) {
        if needed[i] {
            map[i] = steps.len();
            let mut s = step.clone();
            s.premises = s.premises.iter().map(|&p| map[p]).collect();
            steps.push(s);
        }
    }
    Proof { steps }
}

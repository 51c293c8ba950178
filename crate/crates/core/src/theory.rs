//! Equational theories and the Σ-equality oracle.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{table_space, FiniteAlgebra};
use crate::deduction::proof::Proof;
use crate::deduction::rewrite;
use crate::error::{Error, Result};
use crate::parse::{parse_identity, parse_term};
use crate::term::{Identity, Signature, Term};
use crate::witness::{self, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleKind {
    /// Rectangular bands.
    Rb,
    /// Semigroups.
    Sg,
    /// Left-zero bands.
    Lz,
    /// Right-zero bands.
    Rz,
    Trivial,
    Empty,
    Generic,
}

impl OracleKind {
    pub const ALL: [OracleKind; 7] = [
        OracleKind::Rb,
        OracleKind::Sg,
        OracleKind::Lz,
        OracleKind::Rz,
        OracleKind::Trivial,
        OracleKind::Empty,
        OracleKind::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Rb => "rb",
            OracleKind::Sg => "sg",
            OracleKind::Lz => "lz",
            OracleKind::Rz => "rz",
            OracleKind::Trivial => "trivial",
            OracleKind::Empty => "empty",
            OracleKind::Generic => "generic",
        }
    }

    /// Oracles that decide equality exactly.
    pub fn is_exact(self) -> bool {
        self != OracleKind::Generic
    }

    fn needs_single_binary(self) -> bool {
        matches!(
            self,
            OracleKind::Rb | OracleKind::Sg | OracleKind::Lz | OracleKind::Rz
        )
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OracleKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Theory(format!("unknown oracle `{s}`")))
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Budget {
    pub max_term_size: usize,
    pub max_steps: usize,
    pub max_model_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_term_size: 12,
            max_steps: 5000,
            max_model_size: 3,
        }
    }
}

impl Budget {
    /// Applies `key=value` settings; keys are `term_size`, `steps` and
    /// `model_size` (the `max_` prefix is optional).
    pub fn apply(&mut self, setting: &str) -> Result<()> {
        let (key, value) = setting
            .split_once('=')
            .ok_or_else(|| Error::Theory(format!("expected key=value, found `{setting}`")))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| Error::Theory(format!("bad budget value in `{setting}`")))?;
        match key.trim().trim_start_matches("max_") {
            "term_size" => self.max_term_size = value,
            "steps" => self.max_steps = value,
            "model_size" => self.max_model_size = value,
            other => return Err(Error::Theory(format!("unknown budget key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse_line(&mut self, line: &str) -> Result<()> {
        line.split_whitespace().try_for_each(|s| self.apply(s))
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "term_size={} steps={} model_size={}",
            self.max_term_size, self.max_steps, self.max_model_size
        )
    }
}

/// Answer of the Σ-equality oracle.
#[derive(Clone, Debug)]
pub enum Verdict {
    Equal { certificate: Option<Arc<Proof>> },
    Distinct(Witness),
    Unknown,
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }

    pub fn is_distinct(&self) -> bool {
        matches!(self, Verdict::Distinct(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equal { .. } => "equal",
            Verdict::Distinct(_) => "distinct",
            Verdict::Unknown => "unknown",
        }
    }

    fn equal() -> Self {
        Verdict::Equal { certificate: None }
    }
}

/// Largest table space enumerated when looking for models of one size.
const MODEL_SPACE_LIMIT: u128 = 1 << 21;

/// A signature, axioms, an oracle selector and search budgets.
#[derive(Clone)]
pub struct Theory {
    sig: Signature,
    axioms: Vec<Identity>,
    oracle: OracleKind,
    budget: Budget,
    witnesses: Vec<FiniteAlgebra>,
    hints: Vec<(Term, Term)>,
    models: Arc<OnceLock<Vec<FiniteAlgebra>>>,
    memo: Arc<Mutex<HashMap<(Term, Term), Verdict>>>,
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Theory")
            .field("sig", &self.sig.to_string())
            .field("oracle", &self.oracle)
            .field("axioms", &self.axioms.len())
            .field("budget", &self.budget)
            .finish()
    }
}

/// The fixed axioms of a built-in oracle over `sig`.
pub fn canonical_axioms(kind: OracleKind, sig: &Signature) -> Result<Vec<Identity>> {
    let text: &[&str] = match kind {
        OracleKind::Rb => &[
            "f(x1,f(x2,x3)) = f(f(x1,x2),x3)",
            "f(f(x1,x2),x3) = f(x1,x3)",
            "f(x1,f(x2,x3)) = f(x1,x3)",
            "f(x1,x1) = x1",
        ],
        OracleKind::Sg => &["f(x1,f(x2,x3)) = f(f(x1,x2),x3)"],
        OracleKind::Lz => &["f(x1,x2) = x1"],
        OracleKind::Rz => &["f(x1,x2) = x2"],
        OracleKind::Trivial => return Ok(vec![Identity::new(Term::Var(1), Term::Var(2))]),
        OracleKind::Empty | OracleKind::Generic => return Ok(Vec::new()),
    };
    let f = sig.single_binary().ok_or_else(|| {
        Error::Theory(format!(
            "oracle {kind} needs exactly one binary symbol, signature is `{sig}`"
        ))
    })?;
    let base = Signature::parse("f/2").expect("fixed signature");
    text.iter()
        .map(|line| {
            let e = parse_identity(line, &base)?;
            Ok(Identity::new(rename(&e.lhs, &f), rename(&e.rhs, &f)))
        })
        .collect()
}

fn rename(t: &Term, f: &crate::term::Symbol) -> Term {
    match t {
        Term::Var(i) => Term::Var(*i),
        Term::App(_, args) => Term::App(f.clone(), args.iter().map(|a| rename(a, f)).collect()),
    }
}

impl Theory {
    /// A theory for one of the exact oracles, with its fixed axioms.
    pub fn builtin(kind: OracleKind, sig: Signature) -> Result<Theory> {
        if kind == OracleKind::Generic {
            return Err(Error::Theory("generic theories need explicit axioms".into()));
        }
        if kind.needs_single_binary() && sig.single_binary().is_none() {
            return Err(Error::Theory(format!(
                "oracle {kind} needs exactly one binary symbol, signature is `{sig}`"
            )));
        }
        let axioms = canonical_axioms(kind, &sig)?;
        Ok(Theory::assemble(sig, axioms, kind, Budget::default()))
    }

    /// RB, SG, LZ or RZ over the signature `f/2`.
    pub fn standard(kind: OracleKind) -> Theory {
        Theory::builtin(kind, Signature::parse("f/2").expect("fixed signature"))
            .expect("standard theory")
    }

    /// A finitely axiomatized theory decided by bounded search.
    pub fn generic(sig: Signature, axioms: Vec<Identity>) -> Result<Theory> {
        for e in &axioms {
            sig.check(&e.lhs)?;
            sig.check(&e.rhs)?;
        }
        let axioms = axioms
            .iter()
            .map(|e| Identity::new(sig.intern(&e.lhs), sig.intern(&e.rhs)))
            .collect();
        Ok(Theory::assemble(sig, axioms, OracleKind::Generic, Budget::default()))
    }

    fn assemble(sig: Signature, axioms: Vec<Identity>, oracle: OracleKind, budget: Budget) -> Theory {
        Theory {
            sig,
            axioms,
            oracle,
            budget,
            witnesses: Vec::new(),
            hints: Vec::new(),
            models: Arc::new(OnceLock::new()),
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    fn fresh_caches(mut self) -> Theory {
        self.models = Arc::new(OnceLock::new());
        self.memo = Arc::new(Mutex::new(HashMap::new()));
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Theory {
        self.budget = budget;
        self.fresh_caches()
    }

    /// Registers a witness algebra; it must be a model of the axioms.
    pub fn with_witness(mut self, alg: FiniteAlgebra) -> Result<Theory> {
        alg.check_signature(&self.sig)?;
        if let Some(e) = self.axioms.iter().find(|e| !alg.satisfies(e)) {
            return Err(Error::Theory(format!("witness algebra fails axiom {e}")));
        }
        self.witnesses.push(alg);
        Ok(self.fresh_caches())
    }

    /// Registers an oriented axiom `lhs -> rhs` used for normalization.
    pub fn with_hint(mut self, lhs: Term, rhs: Term) -> Result<Theory> {
        let e = Identity::new(lhs, rhs);
        if !self.has_axiom(&e) {
            return Err(Error::Theory(format!("hint {e} is not an axiom")));
        }
        self.hints.push((e.lhs, e.rhs));
        Ok(self.fresh_caches())
    }

    /// The same theory with some axioms added, decided by bounded search.
    pub fn extended(&self, extra: &[Identity]) -> Theory {
        let mut axioms = self.axioms.clone();
        for e in extra {
            if !axioms.contains(e) && !e.is_trivial() {
                axioms.push(e.clone());
            }
        }
        let mut out = Theory::assemble(self.sig.clone(), axioms, OracleKind::Generic, self.budget);
        out.witnesses = self
            .witnesses
            .iter()
            .filter(|a| out.axioms.iter().all(|e| a.satisfies(e)))
            .cloned()
            .collect();
        out
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn axioms(&self) -> &[Identity] {
        &self.axioms
    }

    pub fn oracle(&self) -> OracleKind {
        self.oracle
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn witnesses(&self) -> &[FiniteAlgebra] {
        &self.witnesses
    }

    pub fn hints(&self) -> &[(Term, Term)] {
        &self.hints
    }

    /// `e` or its mirror is an axiom.
    pub fn has_axiom(&self, e: &Identity) -> bool {
        self.axioms.iter().any(|a| a == e || a.mirror() == *e)
    }

    /// Parses a term against this theory's signature.
    pub fn term(&self, text: &str) -> Result<Term> {
        parse_term(text, &self.sig)
    }

    pub fn identity(&self, text: &str) -> Result<Identity> {
        parse_identity(text, &self.sig)
    }

    fn check_term(&self, t: &Term) -> Result<()> {
        self.sig
            .check(t)
            .map_err(|e| Error::SignatureMismatch(format!("{t}: {e}")))
    }

    /// Models of the axioms up to the budget's model size, skipping sizes
    /// whose table space is out of reach. Computed once per theory value.
    pub fn models(&self) -> &[FiniteAlgebra] {
        self.models.get_or_init(|| {
            let mut out = Vec::new();
            for size in 1..=self.budget.max_model_size {
                if table_space(&self.sig, size).is_none_or(|n| n > MODEL_SPACE_LIMIT) {
                    break;
                }
                out.extend(
                    crate::algebra::enumerate_models(&self.sig, &self.axioms, size)
                        .filter(|m| m.carrier() == size),
                );
            }
            out
        })
    }

    /// A model of the axioms separating `t` and `s`, if one is at hand:
    /// exact-oracle countermodels, registered witnesses, then small models.
    pub fn refute(&self, t: &Term, s: &Term) -> Option<Witness> {
        if self.oracle.is_exact() {
            return match self.decide_exact(t, s) {
                Verdict::Distinct(w) => Some(w),
                _ => None,
            };
        }
        witness::first_separating(self.witnesses.iter().cloned(), t, s)
            .or_else(|| witness::first_separating(self.models().iter().cloned(), t, s))
    }

    /// Decides (or semi-decides) Σ ⊨ t ≈ s.
    pub fn sigma_equal(&self, t: &Term, s: &Term) -> Result<Verdict> {
        self.check_term(t)?;
        self.check_term(s)?;
        if self.oracle.is_exact() {
            return Ok(self.decide_exact(t, s));
        }
        let key = (t.clone(), s.clone());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let v = rewrite::generic_verdict(self, t, s);
        self.memo
            .lock()
            .expect("memo lock")
            .insert(key, v.clone());
        Ok(v)
    }

    fn decide_exact(&self, t: &Term, s: &Term) -> Verdict {
        let equal = match self.oracle {
            OracleKind::Rb => {
                t.leftmost_var() == s.leftmost_var() && t.rightmost_var() == s.rightmost_var()
            }
            OracleKind::Sg => t.leaf_vars() == s.leaf_vars(),
            OracleKind::Lz => t.leftmost_var() == s.leftmost_var(),
            OracleKind::Rz => t.rightmost_var() == s.rightmost_var(),
            OracleKind::Trivial => true,
            OracleKind::Empty => t == s,
            OracleKind::Generic => unreachable!("generic is not exact"),
        };
        if equal {
            return Verdict::equal();
        }
        let w = match self.oracle {
            OracleKind::Rb => witness::rb(&self.sig, t, s),
            OracleKind::Sg => witness::sg(&self.sig, t, s),
            OracleKind::Lz => witness::lz(&self.sig, t, s),
            OracleKind::Rz => witness::rz(&self.sig, t, s),
            _ => witness::term_algebra(&self.sig, t, s),
        };
        match w {
            Some(w) => Verdict::Distinct(w),
            // ground terms in a one-symbol band theory have no variables to
            // assign; nothing else reaches here
            None => Verdict::Unknown,
        }
    }

    /// Reads a theory file. Witness paths are relative to the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Theory> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Theory::parse_with_base(&text, path.parent())
    }

    pub fn parse(text: &str) -> Result<Theory> {
        Theory::parse_with_base(text, None)
    }

    fn parse_with_base(text: &str, base: Option<&Path>) -> Result<Theory> {
        let mut sig = None;
        let mut oracle = None;
        let mut axioms = Vec::new();
        let mut witnesses = Vec::new();
        let mut hints = Vec::new();
        let mut budget = Budget::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| Error::Theory(format!("line {}: {e}", lineno + 1));
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| at(Error::Theory(format!("expected `key: value`, found `{line}`"))))?;
            let value = value.trim();
            match key.trim() {
                "signature" => sig = Some(Signature::parse(value).map_err(at)?),
                "oracle" => oracle = Some(value.parse::<OracleKind>().map_err(at)?),
                "budget" => budget.parse_line(value).map_err(at)?,
                "axiom" => axioms.push((lineno + 1, value.to_string())),
                "hint" => hints.push((lineno + 1, value.to_string())),
                "witness" => witnesses.push((lineno + 1, value.to_string())),
                other => return Err(at(Error::Theory(format!("unknown key `{other}`")))),
            }
        }
        let sig = sig.ok_or_else(|| Error::Theory("missing `signature:` line".into()))?;
        let oracle = oracle.ok_or_else(|| Error::Theory("missing `oracle:` line".into()))?;
        let mut parsed = Vec::new();
        for (lineno, text) in &axioms {
            let e = parse_identity(text, &sig)
                .map_err(|e| Error::Theory(format!("line {lineno}: {e}")))?;
            parsed.push((*lineno, e));
        }
        let mut theory = if oracle == OracleKind::Generic {
            if parsed.is_empty() {
                return Err(Error::Theory("a generic theory needs at least one axiom".into()));
            }
            Theory::generic(sig.clone(), parsed.into_iter().map(|(_, e)| e).collect())?
        } else {
            if !witnesses.is_empty() || !hints.is_empty() {
                return Err(Error::Theory(format!(
                    "witness and hint lines are only allowed for generic theories, oracle is {oracle}"
                )));
            }
            let theory = Theory::builtin(oracle, sig.clone())?;
            for (lineno, e) in &parsed {
                if !theory.has_axiom(e) {
                    return Err(Error::Theory(format!(
                        "line {lineno}: {e} is not one of the fixed {oracle} axioms"
                    )));
                }
            }
            theory
        };
        theory.budget = budget;
        for (lineno, file) in witnesses {
            let full = match base {
                Some(dir) => dir.join(&file),
                None => Path::new(&file).to_path_buf(),
            };
            let json = std::fs::read_to_string(&full).map_err(|e| Error::Io {
                path: full.display().to_string(),
                message: e.to_string(),
            })?;
            let alg = FiniteAlgebra::from_json(&json, &sig)
                .map_err(|e| Error::Theory(format!("line {lineno}: {e}")))?;
            theory = theory
                .with_witness(alg)
                .map_err(|e| Error::Theory(format!("line {lineno}: {e}")))?;
        }
        for (lineno, text) in hints {
            let (l, r) = text.split_once("->").ok_or_else(|| {
                Error::Theory(format!("line {lineno}: expected `lhs -> rhs`"))
            })?;
            let (l, r) = (parse_term(l, &sig)?, parse_term(r, &sig)?);
            theory = theory
                .with_hint(l, r)
                .map_err(|e| Error::Theory(format!("line {lineno}: {e}")))?;
        }
        Ok(theory.fresh_caches())
    }
}

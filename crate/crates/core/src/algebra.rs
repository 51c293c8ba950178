//! Finite algebras: interpretation of terms, satisfaction of identities,
//! essentiality with respect to a concrete algebra, and brute-force model
//! enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{Identity, Position, Signature, Term};

/// Values for variables, keyed by variable index.
pub type Assignment = BTreeMap<u32, usize>;

/// One operation table, flattened row-major (last argument varies fastest).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpTable {
    pub arity: usize,
    pub entries: Vec<usize>,
}

/// An algebra on the carrier `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    carrier: usize,
    ops: BTreeMap<String, OpTable>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    carrier: usize,
    ops: BTreeMap<String, Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(carrier: usize, ops: BTreeMap<String, OpTable>) -> Result<Self> {
        if carrier == 0 {
            return Err(Error::Algebra("carrier must be non-empty".into()));
        }
        for (name, op) in &ops {
            let want = checked_pow(carrier, op.arity)
                .ok_or_else(|| Error::Algebra(format!("table for `{name}` is too large")))?;
            if op.entries.len() != want {
                return Err(Error::Algebra(format!(
                    "table for `{name}` has {} entries, expected {want}",
                    op.entries.len()
                )));
            }
            if let Some(bad) = op.entries.iter().find(|&&v| v >= carrier) {
                return Err(Error::Algebra(format!(
                    "table for `{name}` contains {bad}, outside the carrier"
                )));
            }
        }
        Ok(FiniteAlgebra { carrier, ops })
    }

    /// Builds an algebra whose tables are given by closures.
    pub fn from_fn<F>(carrier: usize, sig: &Signature, mut op: F) -> Result<Self>
    where
        F: FnMut(&str, &[usize]) -> usize,
    {
        let mut ops = BTreeMap::new();
        for (name, arity) in sig.symbols() {
            let mut entries = Vec::new();
            let mut args = vec![0; arity];
            let total = checked_pow(carrier, arity)
                .ok_or_else(|| Error::Algebra(format!("table for `{name}` is too large")))?;
            for _ in 0..total {
                entries.push(op(name, &args));
                increment(&mut args, carrier);
            }
            ops.insert(name.to_string(), OpTable { arity, entries });
        }
        FiniteAlgebra::new(carrier, ops)
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn ops(&self) -> &BTreeMap<String, OpTable> {
        &self.ops
    }

    pub fn table(&self, name: &str) -> Option<&OpTable> {
        self.ops.get(name)
    }

    /// Checks that every symbol of `sig` has a table of the right arity.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        for (name, arity) in sig.symbols() {
            match self.ops.get(&**name) {
                None => return Err(Error::MissingTable(name.to_string())),
                Some(op) if op.arity != arity => {
                    return Err(Error::Algebra(format!(
                        "table for `{name}` has arity {}, signature says {arity}",
                        op.arity
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Reads the JSON form `{"carrier": n, "ops": {"f": [...]}}`, taking
    /// arities from `sig`.
    pub fn from_json(text: &str, sig: &Signature) -> Result<Self> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| Error::Algebra(e.to_string()))?;
        let mut ops = BTreeMap::new();
        for (name, entries) in file.ops {
            let arity = sig
                .arity(&name)
                .ok_or_else(|| Error::Algebra(format!("`{name}` is not in the signature")))?;
            ops.insert(name, OpTable { arity, entries });
        }
        let alg = FiniteAlgebra::new(file.carrier, ops)?;
        alg.check_signature(sig)?;
        Ok(alg)
    }

    /// Reads the JSON form, inferring each arity from the table length.
    /// A one-element carrier makes the arity ambiguous; those tables are
    /// taken to be binary.
    pub fn from_json_inferred(text: &str) -> Result<Self> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| Error::Algebra(e.to_string()))?;
        let mut ops = BTreeMap::new();
        for (name, entries) in file.ops {
            let arity = infer_arity(file.carrier, entries.len()).ok_or_else(|| {
                Error::Algebra(format!(
                    "table for `{name}` has {} entries, not a power of {}",
                    entries.len(),
                    file.carrier
                ))
            })?;
            ops.insert(name, OpTable { arity, entries });
        }
        FiniteAlgebra::new(file.carrier, ops)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = AlgebraFile {
            carrier: self.carrier,
            ops: self
                .ops
                .iter()
                .map(|(k, v)| (k.clone(), v.entries.clone()))
                .collect(),
        };
        serde_json::to_value(file).expect("algebra serializes")
    }

    pub fn apply(&self, name: &str, args: &[usize]) -> Result<usize> {
        let op = self
            .ops
            .get(name)
            .ok_or_else(|| Error::MissingTable(name.to_string()))?;
        if op.arity != args.len() {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: op.arity,
                found: args.len(),
            });
        }
        let index = args.iter().fold(0, |acc, &a| acc * self.carrier + a);
        Ok(op.entries[index])
    }

    /// Bottom-up value of `t` under `env`.
    pub fn evaluate(&self, t: &Term, env: &Assignment) -> Result<usize> {
        match t {
            Term::Var(i) => env.get(i).copied().ok_or(Error::UnboundVariable(*i)),
            Term::App(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.evaluate(a, env)?);
                }
                self.apply(f, &vals)
            }
        }
    }

    /// First assignment (mixed-radix order over the sorted variables, last
    /// variable fastest) on which the two sides differ.
    pub fn counterexample(&self, e: &Identity) -> Option<Assignment> {
        let vars: Vec<u32> = e.vars().into_iter().collect();
        Assignments::new(&vars, self.carrier).find(|env| {
            match (self.evaluate(&e.lhs, env), self.evaluate(&e.rhs, env)) {
                (Ok(a), Ok(b)) => a != b,
                _ => true,
            }
        })
    }

    pub fn satisfies(&self, e: &Identity) -> bool {
        self.counterexample(e).is_none()
    }

    pub fn satisfies_all<'a, I>(&self, axioms: I) -> bool
    where
        I: IntoIterator<Item = &'a Identity>,
    {
        axioms.into_iter().all(|e| self.satisfies(e))
    }

    /// Ess(t, A): variables on which the term operation actually depends.
    pub fn essential_vars(&self, t: &Term) -> BTreeSet<u32> {
        let vars: Vec<u32> = t.vars().into_iter().collect();
        let mut out = BTreeSet::new();
        for &x in &vars {
            let depends = Assignments::new(&vars, self.carrier).any(|env| {
                let base = self.evaluate(t, &env);
                (0..self.carrier).any(|b| {
                    if b == env[&x] {
                        return false;
                    }
                    let mut alt = env.clone();
                    alt.insert(x, b);
                    self.evaluate(t, &alt) != base
                })
            });
            if depends {
                out.insert(x);
            }
        }
        out
    }

    /// Fic(t, A) = var(t) \ Ess(t, A).
    pub fn fictive_vars(&self, t: &Term) -> BTreeSet<u32> {
        let ess = self.essential_vars(t);
        t.vars().difference(&ess).copied().collect()
    }

    /// PEss(t, A): positions p for which the fresh variable is essential in
    /// t(p; x_fresh).
    pub fn essential_positions(&self, t: &Term) -> BTreeSet<Position> {
        let fresh = t.fresh_var();
        t.positions()
            .into_iter()
            .filter(|p| {
                let probe = t.replace_at(p, &Term::Var(fresh)).expect("own position");
                self.essential_vars(&probe).contains(&fresh)
            })
            .collect()
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn infer_arity(carrier: usize, len: usize) -> Option<usize> {
    if carrier == 1 {
        return (len == 1).then_some(2);
    }
    let mut arity = 0;
    let mut acc = 1;
    while acc < len {
        acc *= carrier;
        arity += 1;
    }
    (acc == len).then_some(arity)
}

/// Odometer step, last digit fastest. Returns false on wrap-around.
fn increment(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// All assignments of `{0..n-1}` to a variable list in mixed-radix order.
pub struct Assignments {
    vars: Vec<u32>,
    digits: Vec<usize>,
    radix: usize,
    done: bool,
}

impl Assignments {
    pub fn new(vars: &[u32], radix: usize) -> Self {
        Assignments {
            vars: vars.to_vec(),
            digits: vec![0; vars.len()],
            radix,
            done: radix == 0,
        }
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        let env = self
            .vars
            .iter()
            .copied()
            .zip(self.digits.iter().copied())
            .collect();
        self.done = !increment(&mut self.digits, self.radix);
        Some(env)
    }
}

/// Every algebra of carrier size 1..=max_size over `sig` that satisfies all
/// `axioms`, in lexicographic order of the concatenated tables (symbols by
/// name, last entry fastest).
pub fn enumerate_models(sig: &Signature, axioms: &[Identity], max_size: usize) -> ModelIter {
    ModelIter {
        symbols: sig.symbols().map(|(n, a)| (n.to_string(), a)).collect(),
        axioms: axioms.to_vec(),
        max_size,
        size: 0,
        digits: Vec::new(),
        exhausted: true,
    }
}

pub struct ModelIter {
    symbols: Vec<(String, usize)>,
    axioms: Vec<Identity>,
    max_size: usize,
    size: usize,
    digits: Vec<usize>,
    exhausted: bool,
}

impl ModelIter {
    fn current(&self) -> FiniteAlgebra {
        let mut ops = BTreeMap::new();
        let mut offset = 0;
        for (name, arity) in &self.symbols {
            let len = checked_pow(self.size, *arity).expect("table size checked");
            ops.insert(
                name.clone(),
                OpTable {
                    arity: *arity,
                    entries: self.digits[offset..offset + len].to_vec(),
                },
            );
            offset += len;
        }
        FiniteAlgebra {
            carrier: self.size,
            ops,
        }
    }
}

impl Iterator for ModelIter {
    type Item = FiniteAlgebra;

    fn next(&mut self) -> Option<FiniteAlgebra> {
        loop {
            if self.exhausted {
                if self.size >= self.max_size {
                    return None;
                }
                self.size += 1;
                let total: usize = self
                    .symbols
                    .iter()
                    .map(|(_, a)| checked_pow(self.size, *a).expect("table size fits"))
                    .sum();
                self.digits = vec![0; total];
                self.exhausted = false;
            }
            let alg = self.current();
            self.exhausted = !increment(&mut self.digits, self.size);
            if alg.satisfies_all(&self.axioms) {
                return Some(alg);
            }
        }
    }
}

/// Number of candidate table assignments for a given carrier size.
pub fn table_space(sig: &Signature, size: usize) -> Option<u128> {
    let mut exp: u128 = 0;
    for (_, arity) in sig.symbols() {
        exp += checked_pow(size, arity)? as u128;
    }
    (size as u128).checked_pow(u32::try_from(exp).ok()?)
}

//! Hypersubstitutions and the solidity / stability probes.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::essentiality::{in_sess, Mode, Status};
use crate::parse::parse_term;
use crate::sample;
use crate::sigma::sigma_compose;
use crate::term::{Identity, Signature, Term};
use crate::theory::{Theory, Verdict};
use crate::witness::Witness;

/// Sends each operation symbol of arity n to a term over x1..xn.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypersubstitution {
    map: BTreeMap<String, Term>,
}

fn standard_image(sig: &Signature, name: &str) -> Term {
    let arity = sig.arity(name).expect("symbol in signature");
    Term::app(
        sig.symbol(name).expect("symbol in signature"),
        (1..=arity as u32).map(Term::Var).collect(),
    )
}

impl Hypersubstitution {
    pub fn identity(sig: &Signature) -> Self {
        Hypersubstitution {
            map: sig
                .symbols()
                .map(|(f, _)| (f.to_string(), standard_image(sig, f)))
                .collect(),
        }
    }

    /// Symbols missing from `map` keep their standard image f(x1,…,xn).
    pub fn new(sig: &Signature, map: BTreeMap<String, Term>) -> Result<Self> {
        for (f, image) in &map {
            let arity = sig
                .arity(f)
                .ok_or_else(|| Error::Hyper(format!("`{f}` is not in the signature")))?;
            sig.check(image)
                .map_err(|e| Error::Hyper(format!("image of `{f}`: {e}")))?;
            if image.max_var() as usize > arity {
                return Err(Error::Hyper(format!(
                    "image of `{f}` uses variables beyond x{arity}"
                )));
            }
        }
        let mut out = Hypersubstitution::identity(sig);
        for (f, image) in map {
            out.map.insert(f, sig.intern(&image));
        }
        Ok(out)
    }

    /// Parses entries of the form `f -> f(x2,x1)`.
    pub fn parse(sig: &Signature, entries: &[impl AsRef<str>]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for entry in entries {
            let entry = entry.as_ref();
            let (f, image) = entry
                .split_once("->")
                .ok_or_else(|| Error::Hyper(format!("expected `f -> term`, found `{entry}`")))?;
            let f = f.trim().to_string();
            if map.contains_key(&f) {
                return Err(Error::Hyper(format!("`{f}` mapped twice")));
            }
            map.insert(f, parse_term(image, sig)?);
        }
        Hypersubstitution::new(sig, map)
    }

    pub fn image(&self, f: &str) -> Option<&Term> {
        self.map.get(f)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// σ̂[t].
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => {
                let images: BTreeMap<u32, Term> = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (i as u32 + 1, self.apply(a)))
                    .collect();
                match self.map.get(&**f) {
                    Some(image) => image.substitute(&images),
                    None => Term::App(f.clone(), images.into_values().collect()),
                }
            }
        }
    }

    pub fn apply_identity(&self, e: &Identity) -> Identity {
        Identity::new(self.apply(&e.lhs), self.apply(&e.rhs))
    }

    /// `(self ∘ other)(f) = self^[other(f)]`.
    pub fn compose(&self, other: &Hypersubstitution) -> Hypersubstitution {
        Hypersubstitution {
            map: other
                .map
                .iter()
                .map(|(f, image)| (f.clone(), self.apply(image)))
                .collect(),
        }
    }
}

impl fmt::Display for Hypersubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Every term of depth ≤ `depth` over the symbols of `sig` and the
/// variables x1..x`arity`, ordered by depth and then term order.
pub fn terms_up_to_depth(sig: &Signature, arity: usize, depth: usize) -> Vec<Term> {
    let mut levels: Vec<Vec<Term>> = vec![(1..=arity as u32).map(Term::Var).collect()];
    levels[0].extend(
        sig.symbols()
            .filter(|(_, a)| *a == 0)
            .map(|(f, _)| Term::App(f.clone(), Vec::new())),
    );
    let mut all: Vec<Term> = levels[0].clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (f, a) in sig.symbols().filter(|(_, a)| *a > 0) {
            let mut idx = vec![0usize; a];
            loop {
                let args: Vec<Term> = idx.iter().map(|&i| all[i].clone()).collect();
                let t = Term::App(f.clone(), args);
                // keep only terms not already present at a smaller depth
                if t.depth() == levels.len() {
                    next.push(t);
                }
                let mut k = a;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < all.len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        levels.push(next);
    }
    all
}

/// All hypersubstitutions whose images have depth ≤ `depth`, truncated to
/// `limit` in lexicographic order of images by symbol name.
pub fn default_pool(sig: &Signature, depth: usize, limit: usize) -> Vec<Hypersubstitution> {
    let symbols: Vec<(String, usize)> = sig.symbols().map(|(f, a)| (f.to_string(), a)).collect();
    let choices: Vec<Vec<Term>> = symbols
        .iter()
        .map(|(_, a)| terms_up_to_depth(sig, *a, depth))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; symbols.len()];
    'outer: while out.len() < limit {
        let map = symbols
            .iter()
            .zip(&idx)
            .zip(&choices)
            .map(|(((f, _), &i), c)| (f.clone(), c[i].clone()))
            .collect();
        out.push(Hypersubstitution { map });
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    out
}

/// A hyperidentity failure: an identity of the theory whose image under a
/// hypersubstitution is refuted.
#[derive(Clone, Debug)]
pub struct SolidityCounterexample {
    pub identity: Identity,
    pub hyper: Hypersubstitution,
    pub image: Identity,
    pub witness: Witness,
}

/// Searches `ids × hyps` for an image identity with a Distinct verdict.
pub fn solidity_probe(
    th: &Theory,
    ids: &[Identity],
    hyps: &[Hypersubstitution],
) -> Result<Option<SolidityCounterexample>> {
    for e in ids {
        match th.sigma_equal(&e.lhs, &e.rhs)? {
            Verdict::Equal { .. } => {}
            _ => {
                return Err(Error::Hyper(format!(
                    "{e} is not known to hold in the theory"
                )))
            }
        }
    }
    for e in ids {
        for h in hyps {
            let image = h.apply_identity(e);
            if image.is_trivial() {
                continue;
            }
            if let Verdict::Distinct(witness) = th.sigma_equal(&image.lhs, &image.rhs)? {
                return Ok(Some(SolidityCounterexample {
                    identity: e.clone(),
                    hyper: h.clone(),
                    image,
                    witness,
                }));
            }
        }
    }
    Ok(None)
}

/// Sampling parameters for [`stability_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub samples: usize,
    pub max_size: usize,
    pub vars: u32,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            samples: 200,
            max_size: 7,
            vars: 3,
            seed: 0,
        }
    }
}

/// Premises t ≈ s, r ≈ v, u ≈ w and a refuted conclusion
/// t^Σ(r ← u) ≈ s^Σ(v ← w).
#[derive(Clone, Debug)]
pub struct StabilityCounterexample {
    pub t: Term,
    pub s: Term,
    pub r: Term,
    pub v: Term,
    pub u: Term,
    pub w: Term,
    pub conclusion: Identity,
    pub witness: Witness,
}

#[derive(Clone, Debug)]
pub struct StabilityOutcome {
    pub counterexample: Option<StabilityCounterexample>,
    /// Samples whose premises and side conditions were all definite.
    pub tested: usize,
}

fn definitely_essential(th: &Theory, t: &Term, r: &Term) -> bool {
    matches!(in_sess(th, t, r), Ok(Status::Essential))
}

/// Samples Σ-valid premises and looks for a model refuting the Σ-replacement
/// conclusion. Finding nothing is evidence, not proof.
pub fn stability_probe(th: &Theory, cfg: &ProbeConfig) -> StabilityOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tested = 0;
    for _ in 0..cfg.samples {
        let Some((t, s)) = sample::equal_pair(th, &mut rng, cfg.max_size, cfg.vars) else {
            continue;
        };
        let sess_t: Vec<Term> = t
            .subterms()
            .into_iter()
            .filter(|r| definitely_essential(th, &t, r))
            .collect();
        let Some(r) = sess_t.choose(&mut rng).cloned() else {
            continue;
        };
        let partners: Vec<Term> = s
            .subterms()
            .into_iter()
            .filter(|v| th.sigma_equal(&r, v).is_ok_and(|x| x.is_equal()))
            .filter(|v| definitely_essential(th, &s, v))
            .collect();
        let Some(v) = partners.choose(&mut rng).cloned() else {
            continue;
        };
        let u_size = rng.random_range(1..=cfg.max_size.min(5));
        let Some((u, w)) = sample::equal_pair_of_size(th, &mut rng, u_size, cfg.vars) else {
            continue;
        };
        let (Ok(left), Ok(right)) = (
            sigma_compose(th, &t, &r, &u, Mode::Strict),
            sigma_compose(th, &s, &v, &w, Mode::Strict),
        ) else {
            continue;
        };
        tested += 1;
        if let Some(witness) = th.refute(&left, &right) {
            return StabilityOutcome {
                counterexample: Some(StabilityCounterexample {
                    conclusion: Identity::new(left, right),
                    t,
                    s,
                    r,
                    v,
                    u,
                    w,
                    witness,
                }),
                tested,
            };
        }
    }
    StabilityOutcome {
        counterexample: None,
        tested,
    }
}

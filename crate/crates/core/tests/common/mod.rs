#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigmaterm::deduction::proof::{Instantiation, ProofBuilder};
use sigmaterm::essentiality::{in_sess, Status};
use sigmaterm::sample::random_term;
use sigmaterm::{check_proof, is_sigma_balanced, sigma_compose, Identity, Mode, Proof, Rule, Term, Theory};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load(name: &str) -> Theory {
    Theory::load(fixture(name)).unwrap()
}

fn essential_subterms(th: &Theory, t: &Term) -> Vec<Term> {
    t.subterms()
        .into_iter()
        .filter(|r| matches!(in_sess(th, t, r), Ok(Status::Essential)))
        .collect()
}

/// A random checked ΣR-derivation, every step kept, grown from `seed_axiom` by D1–D4 and
/// Σ-replacement, with terms of size at most 13.
pub fn random_sigma_derivation(th: &Theory, seed_axiom: &Identity, seed: u64, steps: usize) -> Proof {
    const MAX_SIZE: usize = 13;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ProofBuilder::new();
    let mut known = vec![b.axiom(seed_axiom.clone())];
    for _ in 0..steps * 20 {
        if known.len() > steps {
            break;
        }
        let pick = *known.choose(&mut rng).unwrap();
        let e = b.conclusion(pick).clone();
        let next = match rng.random_range(0..10) {
            0 => Some(b.symm(pick)),
            1 => {
                let partner = known
                    .iter()
                    .copied()
                    .find(|&j| b.conclusion(j).lhs == e.rhs && !b.conclusion(j).is_trivial());
                partner.map(|j| b.trans(pick, j))
            }
            2..=4 => {
                let vars: Vec<u32> = e.vars().into_iter().collect();
                let r = random_term(th.sig(), &mut rng, 3, 3);
                vars.choose(&mut rng)
                    .copied()
                    .filter(|&x| {
                        e.lhs.substitute_var(x, &r).size() <= MAX_SIZE
                            && e.rhs.substitute_var(x, &r).size() <= MAX_SIZE
                    })
                    .map(|x| b.subst(pick, x, &r, Rule::D4))
            }
            _ => sigma_step(th, &mut b, &known, pick, &mut rng, MAX_SIZE),
        };
        if let Some(i) = next.filter(|&i| !b.conclusion(i).is_trivial()) {
            if !known.contains(&i) {
                known.push(i);
            }
        }
    }
    let proof = b.finish();
    check_proof(th, &proof).expect("generated derivation checks");
    proof
}

fn sigma_step(
    th: &Theory,
    b: &mut ProofBuilder,
    known: &[usize],
    ts: usize,
    rng: &mut ChaCha8Rng,
    max_size: usize,
) -> Option<usize> {
    let e = b.conclusion(ts).clone();
    let sess_t = essential_subterms(th, &e.lhs);
    let sess_s = essential_subterms(th, &e.rhs);
    // r ≈ v: an earlier conclusion joining the two sides, or reflexivity
    let mut joins: Vec<usize> = known
        .iter()
        .copied()
        .filter(|&j| {
            let c = b.conclusion(j);
            sess_t.contains(&c.lhs) && sess_s.contains(&c.rhs)
        })
        .collect();
    let shared: Vec<Term> = sess_t.iter().filter(|r| sess_s.contains(r)).cloned().collect();
    if let Some(r) = shared.choose(rng) {
        joins.push(b.refl(r));
    }
    let rv = *joins.choose(rng)?;
    let uw = if rng.random_bool(0.5) {
        *known.choose(rng)?
    } else {
        let u = random_term(th.sig(), rng, 3, 3);
        b.refl(&u)
    };
    let (rv_e, uw_e) = (b.conclusion(rv).clone(), b.conclusion(uw).clone());
    let lhs = sigma_compose(th, &e.lhs, &rv_e.lhs, &uw_e.lhs, Mode::Strict).ok()?;
    let rhs = sigma_compose(th, &e.rhs, &rv_e.rhs, &uw_e.rhs, Mode::Strict).ok()?;
    if lhs.size() > max_size || rhs.size() > max_size {
        return None;
    }
    Some(b.push(
        Identity::new(lhs, rhs),
        Rule::SigmaR1,
        vec![ts, rv, uw],
        Instantiation::Sigma {
            r: rv_e.lhs,
            v: rv_e.rhs,
            u: uw_e.lhs,
            w: uw_e.rhs,
        },
    ))
}

/// Per-step balance audit of a proof.
#[derive(Debug, Default)]
pub struct BalanceAudit {
    /// Steps whose premises are balanced but whose conclusion is not.
    pub violations: Vec<(usize, Identity)>,
    /// Every step balanced.
    pub all_balanced: bool,
    pub conclusion_balanced: bool,
}

pub fn audit(th: &Theory, proof: &Proof) -> BalanceAudit {
    let balanced: Vec<bool> = proof
        .steps
        .iter()
        .map(|s| is_sigma_balanced(th, &s.conclusion).unwrap().is_balanced())
        .collect();
    let mut violations = Vec::new();
    for (i, step) in proof.steps.iter().enumerate() {
        if step.premises.iter().all(|&p| balanced[p]) && !balanced[i] && step.rule != sigmaterm::Rule::Axiom {
            violations.push((i, step.conclusion.clone()));
        }
    }
    BalanceAudit {
        violations,
        all_balanced: balanced.iter().all(|&b| b),
        conclusion_balanced: *balanced.last().unwrap(),
    }
}

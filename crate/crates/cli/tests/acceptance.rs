//! Acceptance run: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines are always printed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigmaterm::balanced::ep;
use sigmaterm::deduction::{closure_sample, ClosureConfig};
use sigmaterm::essentiality::{
    minimal_positions_of, position_sets, sigma_essential_positions, sigma_essential_vars, sigma_subterm_sets,
    var_status,
};
use sigmaterm::hyper::solidity_probe;
use sigmaterm::sample::{equal_pair, random_term};
use sigmaterm::sigma::sigma_compose_recursive;
use sigmaterm::{
    is_sigma_balanced, sigma_compose, Balance, Hypersubstitution, Identity, Mode, OracleKind, Position,
    PositionStyle, Status, System, Term, Theory,
};

type Check = Result<String, String>;

fn fixture(name: &str) -> String {
    common::fixture(name).to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["sigmaterm"];
    argv.extend_from_slice(args);
    sigmaterm_cli::run(argv)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pos_set(items: &[&str]) -> BTreeSet<Position> {
    items.iter().map(|p| Position::parse(p, PositionStyle::Compact).unwrap()).collect()
}

fn term_set(th: &Theory, items: &[&str]) -> BTreeSet<Term> {
    items.iter().map(|t| th.term(t).unwrap()).collect()
}

const EX1: &str = "f(f(x1,f(f(f(x1,x2),x2),x3)),x4)";
const EX1_COMPOSED: &str = "f(f(x1,f(f(x4,x1),x3)),x4)";

fn criterion_1() -> Check {
    let th = Theory::standard(OracleKind::Rb);
    let t = th.term(EX1).unwrap();
    let labels = "e 1 11 12 121 1211 12111 12112 1212 122 2";
    let got: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
    ensure(got.join(" ") == labels, || format!("positions {got:?}"))?;
    ensure(cli(&["positions", EX1]) == (0, labels.into()), || "positions subcommand".into())?;
    let p = Position::parse("121", PositionStyle::Compact).unwrap();
    let sub = t.subterm_at(&p).unwrap().to_string();
    ensure(sub == "f(f(x1,x2),x2)", || format!("subterm {sub}"))?;
    let composed = t.replace_at(&p, &th.term("f(x4,x1)").unwrap()).unwrap().to_string();
    ensure(composed == EX1_COMPOSED, || format!("t(121;u) = {composed}"))?;
    ensure(cli(&["compose-pos", EX1, "121", "f(x4,x1)"]).1 == EX1_COMPOSED, || "compose-pos".into())?;
    Ok(format!("11 positions, sub_t(121) = {sub}, t(121;u) = {composed}"))
}

fn criterion_2() -> Check {
    let th = common::load("rb.eq");
    let t = th.term("f(f(x1,x2),f(f(x1,x2),x3))").unwrap();
    let rep = sigma_essential_positions(&th, &t).map_err(|e| e.to_string())?;
    ensure(rep.essential == pos_set(&["e", "1", "11", "2", "22"]), || format!("PEss {:?}", rep.essential))?;
    ensure(rep.fictive == pos_set(&["12", "21", "211", "212"]), || format!("PFic {:?}", rep.fictive))?;
    let subs = sigma_subterm_sets(&th, &t).map_err(|e| e.to_string())?;
    let sess = term_set(&th, &["f(f(x1,x2),f(f(x1,x2),x3))", "f(x1,x2)", "x1", "f(f(x1,x2),x3)", "x3"]);
    ensure(subs.essential == sess, || format!("SEss {:?}", subs.essential))?;
    ensure(subs.fictive == term_set(&th, &["x2"]), || format!("SFic {:?}", subs.fictive))?;
    Ok("PEss = {e,1,11,2,22}, PFic = {12,21,211,212}, SEss has 5 terms, SFic = {x2}".into())
}

fn criterion_3() -> Check {
    let th = common::load("rb.eq");
    let t = th.term(EX1).unwrap();
    let r = th.term("f(x1,x2)").unwrap();
    let u = th.term("f(x4,x1)").unwrap();
    let sets = position_sets(&th, &t, &r, Mode::Strict).map_err(|e| e.to_string())?;
    ensure(sets.sigma_s == term_set(&th, &["f(x1,x2)", "f(f(x1,x2),x2)"]), || format!("ΣS {:?}", sets.sigma_s))?;
    ensure(sets.sigma_p == pos_set(&["1211", "121"]), || format!("ΣP {:?}", sets.sigma_p))?;
    ensure(sets.minimal == pos_set(&["121"]), || format!("P {:?}", sets.minimal))?;
    let out = sigma_compose(&th, &t, &r, &u, Mode::Strict).map_err(|e| e.to_string())?;
    ensure(out.to_string() == EX1_COMPOSED, || format!("composition {out}"))?;
    let (code, text) = cli(&["sigma-compose", "--theory", &fixture("rb.eq"), EX1, "f(x1,x2)", "f(x4,x1)"]);
    ensure((code, text.as_str()) == (0, EX1_COMPOSED), || format!("sigma-compose printed {text}"))?;
    Ok("ΣP = {1211,121}, P = {121}, t^Σ(r←u) = t(121;u)".into())
}

fn criterion_4() -> Check {
    let th = common::load("sg.eq");
    let sg = fixture("sg.eq");
    let t = th.term("f(f(f(x1,x2),x1),x2)").unwrap();
    let s = th.term("f(f(x1,x2),f(x1,x2))").unwrap();
    ensure(th.sigma_equal(&t, &s).unwrap().is_equal(), || "SG does not equate t and s".into())?;
    let lhs = cli(&["sigma-compose", "--theory", &sg, &t.to_string(), "f(x1,x2)", "x1"]);
    let rhs = cli(&["sigma-compose", "--theory", &sg, &s.to_string(), "f(x1,x2)", "x1"]);
    ensure(lhs == (0, "f(f(x1,x1),x2)".into()), || format!("lhs {lhs:?}"))?;
    ensure(rhs == (0, "f(x1,x1)".into()), || format!("rhs {rhs:?}"))?;
    let (code, out) = cli(&["prove", "--theory", &sg, "--system", "d", "f(f(x1,x1),x2) = f(x1,x1)", "--format", "json"]);
    ensure(code == 1, || format!("prove exit {code}"))?;
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let carrier = v["witness"]["algebra"]["carrier"].as_u64().unwrap_or(u64::MAX);
    ensure(carrier <= 2, || format!("witness carrier {carrier}"))?;
    let (code, out) = cli(&["check-proof", "--theory", &sg, &fixture("sg_sigmar.proof")]);
    ensure(code == 0, || out.clone())?;
    Ok(format!("Equal; composed sides f(f(x1,x1),x2), f(x1,x1); D refutes with carrier {carrier}; certificate {out}"))
}

fn criterion_5() -> Check {
    let th = common::load("rb.eq");
    let term = |s: &str| th.term(s).unwrap();
    let t = term("f(f(x1,x2),f(x1,x3))");
    let s = term("f(x1,f(f(x1,x2),x3))");
    let r = term("f(f(f(x1,f(x3,x2)),x3),f(x1,x3))");
    let cases: [(&Term, &str, &[&str]); 14] = [
        (&t, "x1", &["11"]),
        (&t, "x3", &["22"]),
        (&t, "f(x1,x2)", &["1"]),
        (&t, "f(x1,x3)", &["e"]),
        (&t, "f(f(x1,x2),f(x1,x3))", &["e"]),
        (&s, "x1", &["1"]),
        (&s, "x3", &["22"]),
        (&s, "f(x1,x3)", &["e"]),
        (&s, "f(x1,f(f(x1,x2),x3))", &["e"]),
        (&r, "x1", &["111"]),
        (&r, "x3", &["22"]),
        (&r, "f(x1,x2)", &["11"]),
        (&r, "f(x1,x3)", &["e"]),
        (&r, "f(f(f(x1,f(x3,x2)),x3),f(x1,x3))", &["e"]),
    ];
    for (host, q, want) in cases {
        let got = ep(&th, host, &term(q)).map_err(|e| e.to_string())?;
        ensure(got == pos_set(want), || format!("EP of {q} in {host}: {got:?}"))?;
    }
    let tr = is_sigma_balanced(&th, &Identity::new(t.clone(), r)).unwrap();
    ensure(tr == Balance::Balanced, || format!("t≈r: {tr}"))?;
    let ts = is_sigma_balanced(&th, &Identity::new(t, s)).unwrap();
    let want = Balance::Unbalanced { q: term("f(x1,x2)"), lhs: 1, rhs: 0 };
    ensure(ts == want, || format!("t≈s: {ts}"))?;
    Ok(format!("14 EP sets reproduced; t≈r balanced; t≈s {ts}"))
}

fn criterion_6() -> Check {
    let th = common::load("la.eq");
    let swap = Hypersubstitution::parse(th.sig(), &["f -> f(x2,x1)"]).unwrap();
    let y = th.term("f(f(x1,x2),x1)").unwrap();
    let z = th.term("f(x1,x1)").unwrap();
    let e = Identity::new(y.clone(), z.clone());
    ensure(th.sigma_equal(&y, &z).unwrap().is_equal(), || "y ≈ z is not an identity".into())?;
    let cx = solidity_probe(&th, &[e], &[swap])
        .map_err(|e| e.to_string())?
        .ok_or("no counterexample")?;
    ensure(cx.image.lhs.to_string() == "f(x1,f(x2,x1))", || format!("σ̂[y] = {}", cx.image.lhs))?;
    ensure(cx.image.rhs.to_string() == "f(x1,x1)", || format!("σ̂[z] = {}", cx.image.rhs))?;
    ensure(cx.witness.algebra.satisfies_all(th.axioms()), || "witness violates the axiom".into())?;
    ensure(cx.witness.separates(&cx.image.lhs, &cx.image.rhs), || "witness does not separate".into())?;
    Ok(format!("σ̂[y] = {}, σ̂[z] = {}, witness carrier {}", cx.image.lhs, cx.image.rhs, cx.witness.algebra.carrier()))
}

fn criterion_7() -> Check {
    let th = common::load("bool.eq");
    let text = "and(x1,or(x2,not(x2)))";
    let t = th.term(text).unwrap();
    let x1 = th.term("x1").unwrap();
    let (code, out) = cli(&["ess-pos", "--theory", &fixture("bool.eq"), text, "--format", "json"]);
    ensure(code == 0, || out.clone())?;
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let essential = v["essential"].as_array().map_or(0, Vec::len);
    ensure(essential == t.positions().len(), || format!("{essential} essential positions"))?;
    ensure(th.sigma_equal(&t, &x1).unwrap().is_equal(), || "t ≈ x1 not Equal".into())?;
    let e = Identity::new(t.clone(), x1);
    for alg in th.witnesses() {
        ensure(alg.satisfies_all(th.axioms()), || "witness violates the axioms".into())?;
        ensure(alg.satisfies(&e), || "a witness model separates t and x1".into())?;
    }
    Ok(format!("all {essential} positions essential; t ≈ x1 Equal on {} witness model(s)", th.witnesses().len()))
}

const CASES: usize = 256;

/// Runs `prop` on `CASES` seeded generators.
fn suite(name: &str, seed: u64, mut prop: impl FnMut(&mut ChaCha8Rng) -> Result<(), String>) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..CASES {
        prop(&mut rng).map_err(|e| format!("{name} case {case}: {e}"))?;
    }
    Ok(())
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())].clone()
}

fn eq(th: &Theory, a: &Term, b: &Term) -> bool {
    th.sigma_equal(a, b).unwrap().is_equal()
}

fn criterion_8() -> Check {
    let rb = Theory::standard(OracleKind::Rb);
    let sg = Theory::standard(OracleKind::Sg);
    let bands = [OracleKind::Rb, OracleKind::Sg, OracleKind::Lz, OracleKind::Rz].map(Theory::standard);
    let sig = rb.sig().clone();
    let gen = |rng: &mut ChaCha8Rng, n: u32| random_term(&sig, rng, 11, n);

    suite("law 1", 1, |rng| {
        let (t, a, b) = (gen(rng, 3), gen(rng, 3), gen(rng, 3));
        let pos = t.positions();
        let (p, q) = (pick(rng, &pos), pick(rng, &pos));
        if p.comparable(&q) {
            return Ok(());
        }
        let x = t.replace_at(&p, &a).unwrap().replace_at(&q, &b).unwrap();
        let y = t.replace_at(&q, &b).unwrap().replace_at(&p, &a).unwrap();
        ensure(x == y, || format!("{t} at {p}, {q}"))
    })?;
    suite("law 2", 2, |rng| {
        let t = gen(rng, 3);
        let mut chosen: Vec<Position> = Vec::new();
        for _ in 0..5 {
            let p = pick(rng, &t.positions());
            if chosen.iter().all(|q| !q.comparable(&p)) {
                chosen.push(p);
            }
        }
        let reps: Vec<Term> = chosen.iter().map(|_| gen(rng, 2)).collect();
        let (mut rp, mut rr) = (chosen.clone(), reps.clone());
        rp.reverse();
        rr.reverse();
        ensure(t.replace_many(&chosen, &reps).unwrap() == t.replace_many(&rp, &rr).unwrap(), || t.to_string())
    })?;
    suite("law 3", 3, |rng| {
        let (t, s, r) = (gen(rng, 3), gen(rng, 3), gen(rng, 3));
        let p = pick(rng, &t.positions());
        let q = pick(rng, &s.positions());
        let left = t.replace_at(&p, &s.replace_at(&q, &r).unwrap()).unwrap();
        let right = t.replace_at(&p, &s).unwrap().replace_at(&p.concat(&q), &r).unwrap();
        ensure(left == right, || format!("{t} {p} {s} {q}"))
    })?;
    suite("law 4", 4, |rng| {
        let (t, s) = (gen(rng, 3), gen(rng, 3));
        let r = t.get(&pick(rng, &t.positions())).unwrap().clone();
        let mut seq = t.clone();
        for p in t.occurrences(&r) {
            seq = seq.replace_at(&p, &s).unwrap();
        }
        ensure(seq == t.replace_term(&r, &s), || format!("{t} {r}"))
    })?;
    suite("essential prefixes, fictive suffixes", 5, |rng| {
        let t = gen(rng, 3);
        for th in &bands {
            let rep = sigma_essential_positions(th, &t).map_err(|e| e.to_string())?;
            ensure(rep.unknown.is_empty(), || "unknown position".into())?;
            for p in &rep.essential {
                for q in t.positions().iter().filter(|q| q.is_prefix_of(p)) {
                    ensure(rep.essential.contains(q), || format!("{}: {q} above {p} in {t}", th.oracle()))?;
                }
            }
            for q in &rep.fictive {
                for p in t.positions().iter().filter(|p| q.is_prefix_of(p)) {
                    ensure(rep.fictive.contains(p), || format!("{}: {p} below {q} in {t}", th.oracle()))?;
                }
            }
        }
        Ok(())
    })?;
    suite("fictive replacement", 6, |rng| {
        let (t, v) = (gen(rng, 3), gen(rng, 4));
        for p in sigma_essential_positions(&rb, &t).unwrap().fictive {
            ensure(eq(&rb, &t, &t.replace_at(&p, &v).unwrap()), || format!("{t} at {p}"))?;
        }
        Ok(())
    })?;
    suite("Σ-composition laws", 7, |rng| {
        for th in [&rb, &sg] {
            let (host, u, w) = (gen(rng, 3), gen(rng, 3), gen(rng, 3));
            let tu = sigma_compose(th, &host, &u, &u, Mode::Strict).unwrap();
            ensure(eq(th, &tu, &host), || format!("(i) {host} {u}"))?;
            let Some((r, v)) = equal_pair(th, rng, 5, 3) else { continue };
            let p = pick(rng, &host.positions());
            let t = host.replace_at(&p, &r).unwrap();
            let (pr, pv) = (
                minimal_positions_of(th, &t, &r, Mode::Strict).unwrap(),
                minimal_positions_of(th, &t, &v, Mode::Strict).unwrap(),
            );
            ensure(pr == pv, || format!("(ii) {t} {r} {v}"))?;
            let a = sigma_compose(th, &t, &r, &w, Mode::Strict).unwrap();
            let b = sigma_compose(th, &t, &v, &w, Mode::Strict).unwrap();
            ensure(eq(th, &a, &b), || format!("(iii) {t} {r} {v} {w}"))?;
            ensure(a == sigma_compose_recursive(th, &t, &r, &w, Mode::Strict).unwrap(), || "recursive form".into())?;
            // after self composition Σ-composition is inductive
            let t1 = sigma_compose(th, &t, &u, &u, Mode::Strict).unwrap();
            let c = sigma_compose(th, &t1, &u, &w, Mode::Strict).unwrap();
            ensure(c == t1.replace_term(&u, &w), || format!("self composition {t} {u}"))?;
        }
        Ok(())
    })?;
    suite("monotone essentiality", 8, |rng| {
        let t = gen(rng, 4);
        let in_rb = sigma_essential_vars(&rb, &t).unwrap().essential;
        let in_sg = sigma_essential_vars(&sg, &t).unwrap().essential;
        ensure(in_rb.is_subset(&in_sg), || t.to_string())
    })?;
    suite("fictive variables", 9, |rng| {
        let Some((t, s)) = equal_pair(&rb, rng, 9, 4) else { return Ok(()) };
        let r = gen(rng, 4);
        for x in t.vars() {
            if var_status(&rb, &t, x).unwrap() == Status::Fictive {
                ensure(eq(&rb, &t.substitute_var(x, &r), &s), || format!("{t} x{x}"))?;
                for alg in rb.models() {
                    ensure(!alg.essential_vars(&s).contains(&x), || format!("x{x} in {s}"))?;
                }
            }
        }
        Ok(())
    })?;
    Ok(format!("9 suites × {CASES} cases, seeds 1..=9, zero failures"))
}

fn criterion_9() -> Check {
    for kind in [OracleKind::Rb, OracleKind::Sg, OracleKind::Lz, OracleKind::Rz] {
        let th = Theory::standard(kind);
        let sample = closure_sample(&th, &ClosureConfig::new(System::D, 5)).ok_or("universe too large")?;
        ensure(sample.saturated, || format!("{kind}: not saturated"))?;
        for e in &sample.identities {
            ensure(eq(&th, &e.lhs, &e.rhs), || format!("{kind}: {e}"))?;
        }
    }
    let rb = common::load("rb.eq");
    let d5 = closure_sample(&rb, &ClosureConfig::new(System::D, 5)).unwrap();
    let refined = closure_sample(&rb, &ClosureConfig::new(System::DRefined, 5)).unwrap();
    ensure(d5.identities == refined.identities, || "refined sample differs".into())?;
    let d4 = closure_sample(&rb, &ClosureConfig::new(System::D, 4)).unwrap();
    let sr = closure_sample(&rb, &ClosureConfig::new(System::SigmaR, 4)).unwrap();
    let missing = d4.identities.difference(&sr.identities).count();
    ensure(missing == 0, || format!("{missing} identities missing from the ΣR closure at cap 4"))?;
    // sizes over a binary symbol are odd, so cap 4 is cap 3; cap 5 is checked too
    let sr5 = closure_sample(&rb, &ClosureConfig::new(System::SigmaR, 5)).unwrap();
    let missing = d5.identities.difference(&sr5.identities).count();
    ensure(missing == 0, || format!("{missing} identities missing from the ΣR closure at cap 5"))?;
    Ok(format!(
        "cap 5 samples all Equal; refined = D on {} RB identities; ΣR ⊇ D on {} identities at cap 4 and {} at cap 5",
        d5.identities.len(),
        d4.identities.len(),
        d5.identities.len()
    ))
}

fn criterion_10() -> Check {
    let th = common::load("rb.eq");
    let seed = th.identity("f(x1,x1) = x1").unwrap();
    let (mut all_balanced, mut violations) = (0, 0);
    for k in 0..100 {
        let proof = common::random_sigma_derivation(&th, &seed, 1000 + k, 20);
        let audit = common::audit(&th, &proof);
        violations += audit.violations.len();
        if audit.all_balanced {
            all_balanced += 1;
            ensure(audit.conclusion_balanced, || format!("derivation {k}"))?;
        }
    }
    ensure(violations == 0, || format!("{violations} steps with balanced premises and unbalanced conclusion"))?;
    Ok(format!(
        "100 derivations, {all_balanced} balanced throughout, 0 unbalanced conclusions from balanced premises"
    ))
}

fn criterion_11() -> Check {
    let (code, out) = cli(&["stable-probe", "--theory", &fixture("sg.eq")]);
    ensure(code == 1 && out.starts_with("counterexample"), || format!("SG: {code} {out}"))?;
    for name in ["rb.eq", "lz.eq", "rz.eq", "la.eq"] {
        let (code, out) = cli(&["stable-probe", "--theory", &fixture(name)]);
        ensure(code == 0 && out.starts_with("no counterexample within budget"), || format!("{name}: {code} {out}"))?;
    }
    Ok("SG counterexample; RB, LZ, RZ, LA: no counterexample within budget (200 samples, size ≤ 7, seed 0)".into())
}

fn main() {
    let criteria: [(usize, fn() -> Check); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS ({secs:.1}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("criterion {n:>2} FAIL ({secs:.1}s): {reason}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

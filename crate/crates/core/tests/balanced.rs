mod common;

use common::{audit, load, random_sigma_derivation};
use proptest::prelude::*;
use sigmaterm::balanced::{ep, ep_counts};
use sigmaterm::sample::equal_pair;
use sigmaterm::{is_sigma_balanced, Balance, Identity, Position, PositionStyle, Term, Theory};

fn positions(items: &[&str]) -> Vec<Position> {
    items.iter().map(|p| Position::parse(p, PositionStyle::Compact).unwrap()).collect()
}

#[test]
fn example_sets() {
    let th = load("rb.eq");
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
        let got: Vec<Position> = ep(&th, host, &term(q)).unwrap().into_iter().collect();
        assert_eq!(got, positions(want), "EP of {q} in {host}");
    }
    assert!(ep(&th, &s, &term("f(x1,x2)")).unwrap().is_empty());
    assert_eq!(is_sigma_balanced(&th, &Identity::new(t.clone(), r)).unwrap(), Balance::Balanced);
    assert_eq!(
        is_sigma_balanced(&th, &Identity::new(t, s)).unwrap(),
        Balance::Unbalanced {
            q: term("f(x1,x2)"),
            lhs: 1,
            rhs: 0
        }
    );
}

#[test]
fn stored_axioms() {
    // only idempotence is balanced among the stored rectangular band axioms
    let th = load("rb.eq");
    let status: Vec<bool> = th
        .axioms()
        .iter()
        .map(|e| is_sigma_balanced(&th, e).unwrap().is_balanced())
        .collect();
    assert_eq!(status, vec![false, false, false, true]);
    let counts = ep_counts(&th, &th.axioms()[1]).unwrap().unwrap();
    assert!(counts.iter().any(|(q, a, b)| q.to_string() == "f(x1,x2)" && (*a, *b) == (1, 0)));
}

#[test]
fn sigma_derivations_preserve_balance() {
    let th = load("rb.eq");
    let seed = th.identity("f(x1,x1) = x1").unwrap();
    let mut all_balanced = 0;
    for k in 0..100 {
        let proof = random_sigma_derivation(&th, &seed, 1000 + k, 20);
        let report = audit(&th, &proof);
        assert!(report.violations.is_empty(), "seed {k}: {:?}", report.violations);
        if report.all_balanced {
            all_balanced += 1;
            assert!(report.conclusion_balanced);
        }
    }
    assert!(all_balanced > 50, "{all_balanced}");
}

fn rb() -> Theory {
    Theory::standard(sigmaterm::OracleKind::Rb)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

    #[test]
    fn symmetric(seed in any::<u64>()) {
        use rand::SeedableRng;
        let th = rb();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = sigmaterm::sample::random_term(th.sig(), &mut rng, 9, 3);
        let s = sigmaterm::sample::random_term(th.sig(), &mut rng, 9, 3);
        let e = Identity::new(t, s);
        let a = is_sigma_balanced(&th, &e).unwrap().is_balanced();
        let b = is_sigma_balanced(&th, &e.mirror()).unwrap().is_balanced();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn transitive_on_equal_triples(seed in any::<u64>()) {
        use rand::SeedableRng;
        let th = rb();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let Some((t, s)) = equal_pair(&th, &mut rng, 9, 3) else { return Ok(()) };
        let Some((_, r)) = equal_pair(&th, &mut rng, 9, 3) else { return Ok(()) };
        // force r into the class of t by fixing its ends
        let f = th.sig().single_binary().unwrap();
        let ends = (Term::Var(t.leftmost_var().unwrap()), Term::Var(t.rightmost_var().unwrap()));
        let r = Term::app(f.clone(), vec![Term::app(f, vec![ends.0, r]), ends.1]);
        prop_assume!(th.sigma_equal(&t, &r).unwrap().is_equal());
        let bal = |a: &Term, b: &Term| is_sigma_balanced(&th, &Identity::new(a.clone(), b.clone())).unwrap().is_balanced();
        if bal(&t, &s) && bal(&s, &r) {
            prop_assert!(bal(&t, &r));
        }
    }

    #[test]
    fn probe_choice_within_class(seed in any::<u64>()) {
        use rand::SeedableRng;
        let th = rb();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let host = sigmaterm::sample::random_term(th.sig(), &mut rng, 11, 3);
        let Some((q, q2)) = equal_pair(&th, &mut rng, 5, 3) else { return Ok(()) };
        prop_assert_eq!(ep(&th, &host, &q).unwrap().len(), ep(&th, &host, &q2).unwrap().len());
    }
}

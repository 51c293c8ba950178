//! Algebraic laws over random terms. Every suite runs 256 cases from a
//! fixed seed.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmaterm::essentiality::{minimal_positions_of, sigma_essential_positions, sigma_essential_vars, var_status};
use sigmaterm::sample::equal_pair;
use sigmaterm::sigma::sigma_compose_recursive;
use sigmaterm::{sigma_compose, Mode, OracleKind, Position, Status, Term, Theory};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn arb_term(nvars: u32) -> impl Strategy<Value = Term> {
    let leaf = (1..=nvars).prop_map(Term::Var);
    leaf.prop_recursive(4, 24, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Term::app("f", vec![a, b]))
    })
}

fn pick<T: Clone>(items: &[T], i: &Index) -> T {
    items[i.index(items.len())].clone()
}

fn equal(th: &Theory, a: &Term, b: &Term) -> bool {
    th.sigma_equal(a, b).unwrap().is_equal()
}

fn bands() -> [Theory; 4] {
    [OracleKind::Rb, OracleKind::Sg, OracleKind::Lz, OracleKind::Rz].map(Theory::standard)
}

/// A term containing `r` at a random position of `host`.
fn graft(host: &Term, i: &Index, r: &Term) -> Term {
    let p = pick(&host.positions(), i);
    host.replace_at(&p, r).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn law1_incomparable_replacements_commute(
        t in arb_term(3), t1 in arb_term(3), t2 in arb_term(3), i in any::<Index>(), j in any::<Index>()
    ) {
        let pos = t.positions();
        let (p1, p2) = (pick(&pos, &i), pick(&pos, &j));
        prop_assume!(!p1.comparable(&p2));
        let both = t.replace_many(&[p1.clone(), p2.clone()], &[t1.clone(), t2.clone()]).unwrap();
        let a = t.replace_at(&p1, &t1).unwrap().replace_at(&p2, &t2).unwrap();
        let b = t.replace_at(&p2, &t2).unwrap().replace_at(&p1, &t1).unwrap();
        prop_assert_eq!(&both, &a);
        prop_assert_eq!(&both, &b);
    }

    #[test]
    fn law2_antichain_order_is_irrelevant(
        t in arb_term(3),
        fillers in prop::collection::vec(arb_term(2), 6),
        order in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        picks in prop::collection::vec(any::<Index>(), 6),
    ) {
        let pos = t.positions();
        let mut chosen: Vec<Position> = Vec::new();
        for i in &picks {
            let p = pick(&pos, i);
            if chosen.iter().all(|q| !q.comparable(&p)) {
                chosen.push(p);
            }
        }
        let reps: Vec<Term> = fillers[..chosen.len()].to_vec();
        let perm: Vec<usize> = order.into_iter().filter(|&k| k < chosen.len()).collect();
        let permuted_pos: Vec<Position> = perm.iter().map(|&k| chosen[k].clone()).collect();
        let permuted_rep: Vec<Term> = perm.iter().map(|&k| reps[k].clone()).collect();
        prop_assert_eq!(
            t.replace_many(&chosen, &reps).unwrap(),
            t.replace_many(&permuted_pos, &permuted_rep).unwrap()
        );
    }

    #[test]
    fn law3_nested_replacement(
        t in arb_term(3), s in arb_term(3), r in arb_term(3), i in any::<Index>(), j in any::<Index>()
    ) {
        let p = pick(&t.positions(), &i);
        let q = pick(&s.positions(), &j);
        let left = t.replace_at(&p, &s.replace_at(&q, &r).unwrap()).unwrap();
        let right = t.replace_at(&p, &s).unwrap().replace_at(&p.concat(&q), &r).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn law4_all_occurrences_is_inductive(t in arb_term(3), s in arb_term(3), i in any::<Index>()) {
        let r = t.get(&pick(&t.positions(), &i)).unwrap().clone();
        let occ: Vec<Position> = t.positions().into_iter().filter(|p| t.get(p) == Some(&r)).collect();
        let mut seq = t.clone();
        for p in &occ {
            seq = seq.replace_at(p, &s).unwrap();
        }
        prop_assert_eq!(&seq, &t.replace_term(&r, &s));
        prop_assert_eq!(t.replace_many(&occ, &vec![s.clone(); occ.len()]).unwrap(), seq);
    }

    #[test]
    fn essential_positions_closed_upward_fictive_downward(t in arb_term(3)) {
        for th in bands() {
            let rep = sigma_essential_positions(&th, &t).unwrap();
            prop_assert!(rep.unknown.is_empty());
            for p in &rep.essential {
                for q in rep.essential.iter().chain(&rep.fictive) {
                    if q.is_prefix_of(p) {
                        prop_assert!(rep.essential.contains(q), "{}: {} above {} in {}", th.oracle(), q, p, t);
                    }
                }
            }
            for q in &rep.fictive {
                for p in t.positions() {
                    if q.is_prefix_of(&p) {
                        prop_assert!(rep.fictive.contains(&p), "{}: {} below {} in {}", th.oracle(), p, q, t);
                    }
                }
            }
        }
    }

    #[test]
    fn fictive_positions_absorb_any_filler(t in arb_term(3), v in arb_term(4)) {
        let th = Theory::standard(OracleKind::Rb);
        let rep = sigma_essential_positions(&th, &t).unwrap();
        for p in &rep.fictive {
            prop_assert!(equal(&th, &t, &t.replace_at(p, &v).unwrap()));
        }
    }

    #[test]
    fn self_composition_and_equal_patterns(
        host in arb_term(3), u in arb_term(3), seed in any::<u64>(), i in any::<Index>(), w in arb_term(3)
    ) {
        for kind in [OracleKind::Rb, OracleKind::Sg] {
            let th = Theory::standard(kind);
            // (i)
            let tu = sigma_compose(&th, &host, &u, &u, Mode::Strict).unwrap();
            prop_assert!(equal(&th, &tu, &host));
            // (ii), (iii) with r ≈ v and r grafted into the host
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Some((r, v)) = equal_pair(&th, &mut rng, 5, 3) else { continue };
            let t = graft(&host, &i, &r);
            let pr = minimal_positions_of(&th, &t, &r, Mode::Strict).unwrap();
            let pv = minimal_positions_of(&th, &t, &v, Mode::Strict).unwrap();
            prop_assert_eq!(pr, pv);
            let a = sigma_compose(&th, &t, &r, &w, Mode::Strict).unwrap();
            let b = sigma_compose(&th, &t, &v, &w, Mode::Strict).unwrap();
            prop_assert!(equal(&th, &a, &b));
            // the multi-position form agrees with the recursive definition
            let rec = sigma_compose_recursive(&th, &t, &r, &w, Mode::Strict).unwrap();
            prop_assert_eq!(a, rec);
        }
    }

    #[test]
    fn after_self_composition_sigma_is_inductive(t in arb_term(3), u in arb_term(3), v in arb_term(3), i in any::<Index>()) {
        for kind in [OracleKind::Rb, OracleKind::Sg] {
            let th = Theory::standard(kind);
            let t = graft(&t, &i, &u);
            let t1 = sigma_compose(&th, &t, &u, &u, Mode::Strict).unwrap();
            prop_assert_eq!(
                sigma_compose(&th, &t1, &u, &v, Mode::Strict).unwrap(),
                t1.replace_term(&u, &v)
            );
            // the minimal Σ-positions of u in t1 are its literal occurrences
            let literal: BTreeSet<Position> =
                t1.positions().into_iter().filter(|p| t1.get(p) == Some(&u)).collect();
            prop_assert_eq!(minimal_positions_of(&th, &t1, &u, Mode::Strict).unwrap(), literal);
        }
    }

    #[test]
    fn essential_variables_shrink_with_more_axioms(t in arb_term(4)) {
        let sg = Theory::standard(OracleKind::Sg);
        let rb = Theory::standard(OracleKind::Rb);
        let in_rb = sigma_essential_vars(&rb, &t).unwrap().essential;
        let in_sg = sigma_essential_vars(&sg, &t).unwrap().essential;
        prop_assert!(in_rb.is_subset(&in_sg), "{}: {:?} vs {:?}", t, in_rb, in_sg);
    }

    #[test]
    fn fictive_variable_substitution(seed in any::<u64>(), r in arb_term(4)) {
        let th = Theory::standard(OracleKind::Rb);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some((t, s)) = equal_pair(&th, &mut rng, 9, 4) else { return Ok(()) };
        for x in t.vars() {
            if var_status(&th, &t, x).unwrap() == Status::Fictive {
                prop_assert!(equal(&th, &t.substitute_var(x, &r), &s));
                for alg in th.models() {
                    prop_assert!(!alg.essential_vars(&s).contains(&x), "x{} in {} under {:?}", x, s, alg);
                }
            }
        }
    }
}

#[test]
fn literal_reading_of_first_corollary_part_fails() {
    // all Σ-equal positions need not be minimal after self composition
    let th = Theory::standard(OracleKind::Rb);
    let t = th.term("f(x2,x1)").unwrap();
    let u = th.term("f(x1,x1)").unwrap();
    let t1 = sigma_compose(&th, &t, &u, &u, Mode::Strict).unwrap();
    assert_eq!(t1.to_string(), "f(x2,f(x1,x1))");
    let sets = sigmaterm::essentiality::position_sets(&th, &t1, &u, Mode::Strict).unwrap();
    assert_eq!(sets.sigma_p.len(), 3);
    assert_eq!(sets.minimal.len(), 1);
}

#[test]
fn model_cache_has_models() {
    let th = Theory::standard(OracleKind::Rb);
    assert!(th.models().iter().any(|a| a.carrier() == 3));
}

use proptest::prelude::*;
use twoway_helper::markov::catalog::{proof_chains, future_x_as_printed, two_block_example};
use twoway_helper::markov::{verify_chain, FactorizationSpec, SeparationQuery, Verdict};
use twoway_helper::oracle::{catalog_check, exhaustive_markov_scan};

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Factor scopes as index lists plus an assignment of each variable to
/// g1/g2/g3/none.
fn instance() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<usize>)> {
    (
        proptest::collection::vec(proptest::collection::btree_set(0usize..6, 1..4), 1..7),
        proptest::collection::vec(0usize..4, 6),
    )
        .prop_map(|(f, g)| (f.into_iter().map(|s| s.into_iter().collect()).collect(), g))
        .prop_filter("groups nonempty", |(_, g)| (0..3).all(|k| g.contains(&k)))
}

fn build(factors: &[Vec<usize>], rename: impl Fn(usize) -> String) -> FactorizationSpec {
    let mut f: Vec<Vec<String>> = factors.iter().map(|s| s.iter().map(|&i| rename(i)).collect()).collect();
    for i in 0..6 {
        if !factors.iter().any(|s| s.contains(&i)) {
            f.push(vec![rename(i)]);
        }
    }
    FactorizationSpec::from_factors(&f).unwrap()
}

fn group(g: &[usize], k: usize, rename: &impl Fn(usize) -> String) -> Vec<String> {
    (0..6).filter(|&i| g[i] == k).map(rename).collect()
}

fn established(factors: &[Vec<usize>], g: &[usize], order: [usize; 3], rename: impl Fn(usize) -> String) -> bool {
    let spec = build(factors, &rename);
    let q = SeparationQuery::new(
        &group(g, order[0], &rename),
        &group(g, order[1], &rename),
        &group(g, order[2], &rename),
    )
    .unwrap();
    verify_chain(&spec, &q).unwrap().is_established()
}

proptest! {
    #[test]
    fn verdict_is_symmetric((f, g) in instance()) {
        let plain = |i: usize| NAMES[i].to_string();
        prop_assert_eq!(established(&f, &g, [0, 1, 2], plain), established(&f, &g, [2, 1, 0], plain));
    }

    #[test]
    fn verdict_ignores_names((f, g) in instance()) {
        let plain = |i: usize| NAMES[i].to_string();
        let other = |i: usize| format!("v{}", 5 - i);
        prop_assert_eq!(established(&f, &g, [0, 1, 2], plain), established(&f, &g, [0, 1, 2], other));
    }

    #[test]
    fn larger_separator_keeps_separation((f, mut g) in instance()) {
        let plain = |i: usize| NAMES[i].to_string();
        let before = established(&f, &g, [0, 1, 2], plain);
        // Move every unassigned variable into the separator.
        for k in g.iter_mut() {
            if *k == 3 {
                *k = 1;
            }
        }
        let after = established(&f, &g, [0, 1, 2], plain);
        prop_assert!(!before || after);
    }
}

#[test]
fn example_one() {
    let spec = two_block_example();
    let q = SeparationQuery::parse("x1 | x2 | z2").unwrap();
    assert_eq!(verify_chain(&spec, &q).unwrap(), Verdict::Established);
    let q = SeparationQuery::parse("x1 | z1 | z2").unwrap();
    match verify_chain(&spec, &q).unwrap() {
        Verdict::NotEstablished { witness } => assert_eq!(witness, ["x1", "x2", "y1", "z2"]),
        v => panic!("unexpected {v:?}"),
    }
}

#[test]
fn every_catalog_chain_is_established_and_holds() {
    let entries = proof_chains();
    assert_eq!(entries.len(), 11);
    for c in catalog_check(&entries, 5, 11, 1e-9).unwrap() {
        assert!(c.established, "{} not established", c.name);
        assert!(c.confirmed, "{} fails numerically: {}", c.name, c.max_cmi);
    }
}

#[test]
fn future_x_chain_as_printed_is_not_established() {
    let e = future_x_as_printed();
    assert!(!verify_chain(&e.spec, &e.query).unwrap().is_established());
}

#[test]
fn random_scan_has_no_false_positives() {
    let r = exhaustive_markov_scan(6, 1000, 2024, 1e-9).unwrap();
    assert_eq!(r.trials, 1000);
    assert!(r.sound(), "{:?}", r.violations);
    assert!(r.established > 0);
}

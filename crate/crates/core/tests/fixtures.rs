use std::path::PathBuf;

use ebcrn::analysis::{find_potential, reaction_feedforward_order, BoundednessCertificate};
use ebcrn::format::{parse_crn, print_crn, CrnDocument};
use ebcrn::verifier::{explore, explore_with, Limits, Reduction};

fn load(name: &str) -> CrnDocument {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_crn(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixtures_round_trip_through_the_printer() {
    for name in [
        "intro_min.crn",
        "potential_example.crn",
        "reversible.crn",
        "collapsing_majority.crn",
        "collapsing_parity.crn",
        "parity_two_reaction.crn",
    ] {
        let doc = load(name);
        assert_eq!(parse_crn(&print_crn(&doc)).unwrap(), doc, "{name}");
    }
}

#[test]
fn intro_network_is_min_without_x3() {
    let doc = load("intro_min.crn");
    let crn = doc.crn();
    let y = crn.species_id("Y").unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let init = crn.config(&[("X1", a), ("X2", b)]).unwrap();
            let r = explore(crn, &init, Limits::default());
            assert!(r.is_complete());
            // Each terminal holds max(a - b, 0) copies of Y.
            for t in r.terminal_configs() {
                assert_eq!(t.get(y), a.saturating_sub(b));
            }
        }
    }
    let init = crn.config(&[("X1", 1), ("X2", 1), ("X3", 1)]).unwrap();
    for reduction in [Reduction::None, Reduction::Stubborn] {
        let w = explore_with(crn, &init, Limits::default(), reduction).self_covering.unwrap();
        assert!(w.validate(crn));
    }
    assert!(!find_potential(crn).is_bounded());
}

#[test]
fn collapsing_deciders_reach_size_one() {
    let CrnDocument::Crd(crd) = load("collapsing_majority.crn") else {
        panic!("decider");
    };
    for n in 1..6 {
        let init = crd.initial_configuration(&[n, n]).unwrap();
        let r = explore(crd.crn(), &init, Limits::default());
        assert!(r.terminal_configs().any(|t| t.total() == 1));
    }
    assert!(matches!(find_potential(crd.crn()), BoundednessCertificate::Bounded(_)));
}

#[test]
fn collapsing_parity_executes_exactly_n_minus_one_reactions() {
    let CrnDocument::Crd(crd) = load("collapsing_parity.crn") else {
        panic!("decider");
    };
    for n in 1..10 {
        let init = crd.initial_configuration(&[n]).unwrap();
        let r = explore(crd.crn(), &init, Limits::default());
        assert_eq!(r.longest_path, Some(n as usize - 1));
        assert!(r.terminal_configs().all(|t| t.total() == 1));
    }
}

#[test]
fn two_reaction_parity_is_not_feedforward() {
    let doc = load("parity_two_reaction.crn");
    assert_eq!(reaction_feedforward_order(doc.crn()), None);
}

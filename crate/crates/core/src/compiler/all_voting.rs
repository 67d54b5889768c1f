//! Conversion of a single-voting decider into one where every species votes.
//!
//! Each non-voter `S` splits into `S^0` and `S^1`, carrying the vote of the
//! last leader it met. Voters propagate their vote with
//! `V + S^{1-b} -> V + S^b`, so once the leader settles every molecule
//! eventually agrees with it.

use super::{CompileError, CompiledCrd, VoterKind};
use crate::crn::{Configuration, Crd, CrnBuilder, CrnError, Multiset, Reaction, SpeciesId};

/// All ways of splitting `k` copies of a non-voter between `^0` and `^1`,
/// as the number taking `^1`, for each reactant in turn.
fn splits(counts: &[u64]) -> Vec<Vec<u64>> {
    counts.iter().fold(vec![Vec::new()], |acc, &k| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..=k).map(move |ones| {
                    let mut next = prefix.clone();
                    next.push(ones);
                    next
                })
            })
            .collect()
    })
}

pub fn make_all_voting(c: &CompiledCrd) -> Result<CompiledCrd, CompileError> {
    if c.voter_kind != VoterKind::SingleVoting {
        return Err(CompileError::NotSingleVoting);
    }
    let crd = &c.crd;
    let crn = crd.crn();
    let mut b = CrnBuilder::new();
    let declare = |b: &mut CrnBuilder, name: String| match b.declare(&name) {
        Err(CrnError::DuplicateSpecies(n)) => Err(CompileError::NameClash(n)),
        other => Ok(other?),
    };
    // image[s] = [S^0, S^1] for non-voters, [V, V] for voters.
    let mut image = Vec::with_capacity(crn.num_species());
    for (i, sp) in crn.species().iter().enumerate() {
        if crd.is_voter(SpeciesId(i)) {
            let v = declare(&mut b, sp.name().to_string())?;
            image.push([v, v]);
        } else {
            let s0 = declare(&mut b, format!("{}^0", sp.name()))?;
            let s1 = declare(&mut b, format!("{}^1", sp.name()))?;
            image.push([s0, s1]);
        }
    }

    for r in crn.reactions() {
        let non_voters: Vec<(SpeciesId, u64)> = r.reactants().iter().filter(|&(s, _)| !crd.is_voter(s)).collect();
        let voter_votes: Vec<bool> = r
            .reactants()
            .iter()
            .filter_map(|(s, _)| crd.vote(s))
            .collect();
        let counts: Vec<u64> = non_voters.iter().map(|&(_, k)| k).collect();
        for split in splits(&counts) {
            let mut reactants = Vec::new();
            let mut votes = voter_votes.clone();
            for (&(s, k), &ones) in non_voters.iter().zip(&split) {
                if ones > 0 {
                    reactants.push((image[s.0][1], ones));
                    votes.push(true);
                }
                if k > ones {
                    reactants.push((image[s.0][0], k - ones));
                    votes.push(false);
                }
            }
            for (s, k) in r.reactants().iter().filter(|&(s, _)| crd.is_voter(s)) {
                reactants.push((image[s.0][0], k));
            }
            // Products inherit a unanimous reactant vote, otherwise vote no.
            let vote = !votes.is_empty() && votes.iter().all(|&v| v == votes[0]) && votes[0];
            let products: Vec<(SpeciesId, u64)> = r
                .products()
                .iter()
                .map(|(s, k)| (image[s.0][vote as usize], k))
                .collect();
            match Reaction::new(Multiset::new(reactants), Multiset::new(products)) {
                Ok(rxn) => b.push(rxn),
                Err(CrnError::NoOpReaction) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }

    let voters: Vec<SpeciesId> = crd.yes_voters().iter().chain(crd.no_voters()).copied().collect();
    for &v in &voters {
        let vote = crd.vote(v).expect("voter") as usize;
        for s in (0..crn.num_species()).map(SpeciesId).filter(|&s| !crd.is_voter(s)) {
            b.push(Reaction::new(
                Multiset::new([(image[v.0][0], 1), (image[s.0][1 - vote], 1)]),
                Multiset::new([(image[v.0][0], 1), (image[s.0][vote], 1)]),
            )?);
        }
    }

    let mut context = Configuration::zeros(b.num_species());
    for s in crd.context().support() {
        context.add(image[s.0][0], crd.context().get(s))?;
    }
    let inputs = crd.inputs().iter().map(|s| image[s.0][0]).collect();
    let mut yes: Vec<SpeciesId> = crd.yes_voters().iter().map(|s| image[s.0][1]).collect();
    let mut no: Vec<SpeciesId> = crd.no_voters().iter().map(|s| image[s.0][0]).collect();
    for s in (0..crn.num_species()).map(SpeciesId).filter(|&s| !crd.is_voter(s)) {
        yes.push(image[s.0][1]);
        no.push(image[s.0][0]);
    }
    let new = Crd::new(b.build(), inputs, yes, no, context)?;
    Ok(CompiledCrd {
        crd: new,
        voter_kind: VoterKind::AllVoting,
        namespace: c.namespace.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::oracle::terminals;
    use crate::compiler::{compile_mod, compile_predicate, compile_threshold};
    use crate::semilinear::{grid, ModAtom, Predicate, PredicateExpr, ThresholdAtom};
    use std::collections::BTreeSet;

    fn outputs(crd: &Crd, x: &[u64]) -> BTreeSet<Option<bool>> {
        let init = crd.initial_configuration(x).unwrap();
        terminals(crd.crn(), &init).iter().map(|t| crd.global_output(t)).collect()
    }

    #[test]
    fn splits_enumerate_every_combination() {
        assert_eq!(splits(&[]), vec![Vec::<u64>::new()]);
        assert_eq!(splits(&[2]), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(splits(&[1, 1]).len(), 4);
    }

    #[test]
    fn parity_all_voting() {
        let single = compile_mod(&["X".into()], &ModAtom::new(vec![1], 1, 2).unwrap()).unwrap();
        let all = make_all_voting(&single).unwrap();
        assert!(all.crd.is_all_voting());
        let crn = all.crd.crn();
        assert_eq!(crn.num_species(), 4);
        let init = all.crd.initial_configuration(&[4]).unwrap();
        for t in terminals(crn, &init) {
            assert!(t.support().all(|s| all.crd.vote(s) == Some(false)), "{}", crn.describe(&t));
        }
        for x in 0..=10 {
            assert_eq!(outputs(&all.crd, &[x]), outputs(&single.crd, &[x]));
        }
    }

    #[test]
    fn conflicting_reactants_produce_no_votes() {
        let single = compile_threshold(&["A".into(), "B".into()], &ThresholdAtom::ge(vec![1, -1], 0)).unwrap();
        let all = make_all_voting(&single).unwrap();
        let crn = all.crd.crn();
        let shown: Vec<String> = crn.reactions().iter().map(|r| crn.describe_reaction(r)).collect();
        // L_Y votes yes, so a no-voting N^0 reactant yields a no-voting product.
        assert!(shown.contains(&"N^0 + L_Y -> L_N".to_string()), "{shown:?}");
        assert!(shown.contains(&"P^0 + L_Y -> P^1 + L_Y".to_string()), "{shown:?}");
        assert_eq!(crn.num_species(), 2 * 4 + 2);
        for x in grid(2, 4) {
            assert_eq!(outputs(&all.crd, &x), outputs(&single.crd, &x), "{x:?}");
        }
    }

    #[test]
    fn composed_all_voting() {
        let p = Predicate::new(
            vec!["X".into()],
            PredicateExpr::or(
                PredicateExpr::Mod(ModAtom::new(vec![1], 0, 3).unwrap()),
                PredicateExpr::Threshold(ThresholdAtom::ge(vec![1], 4)),
            ),
        )
        .unwrap();
        let all = make_all_voting(&compile_predicate(&p).unwrap()).unwrap();
        for x in 0..=5 {
            assert_eq!(outputs(&all.crd, &[x]), BTreeSet::from([Some(p.eval(&[x]).unwrap())]), "{x}");
        }
        assert_eq!(make_all_voting(&all), Err(CompileError::NotSingleVoting));
    }
}

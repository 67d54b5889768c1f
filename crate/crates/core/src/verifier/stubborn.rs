//! Stubborn-set partial-order reduction for reaction networks.
//!
//! A stubborn set at configuration `c` is a set of reactions `T` such that
//!
//! - for an enabled `t ∈ T`, every reaction that could disable `t` or be
//!   disabled by `t` is in `T`;
//! - for a disabled `t ∈ T`, every reaction producing some species that `t`
//!   lacks is in `T`.
//!
//! Exploring only the enabled members of a stubborn set (containing at least
//! one enabled reaction) reaches every terminal configuration, and the reduced
//! graph has an infinite path whenever the full one does. Reduced exploration
//! is therefore sound both for terminal outputs and for boundedness.

use crate::crn::{Configuration, Crn};

pub(crate) struct Stubborn {
    reactants: Vec<Vec<(usize, u64)>>,
    conflicts: Vec<Vec<usize>>,
    /// Per species, reactions with positive net production.
    producers: Vec<Vec<usize>>,
}

impl Stubborn {
    pub(crate) fn new(crn: &Crn) -> Self {
        let n = crn.num_species();
        let rxns = crn.reactions();
        let mut consumers = vec![Vec::new(); n];
        let mut needers = vec![Vec::new(); n];
        let mut producers = vec![Vec::new(); n];
        let mut reactants = Vec::with_capacity(rxns.len());
        for (j, r) in rxns.iter().enumerate() {
            reactants.push(r.reactants().iter().map(|(s, k)| (s.0, k)).collect());
            for (s, _) in r.reactants().iter() {
                needers[s.0].push(j);
            }
            for s in (0..n).map(crate::crn::SpeciesId) {
                match r.net(s) {
                    d if d < 0 => consumers[s.0].push(j),
                    d if d > 0 => producers[s.0].push(j),
                    _ => {}
                }
            }
        }
        let conflicts = rxns
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let mut out: Vec<usize> = Vec::new();
                for (s, _) in r.reactants().iter() {
                    out.extend(&consumers[s.0]);
                }
                for s in (0..n).map(crate::crn::SpeciesId) {
                    if r.net(s) < 0 {
                        out.extend(&needers[s.0]);
                    }
                }
                out.sort_unstable();
                out.dedup();
                out.retain(|&u| u != t);
                out
            })
            .collect();
        Stubborn {
            reactants,
            conflicts,
            producers,
        }
    }

    fn enabled(&self, t: usize, c: &Configuration) -> bool {
        self.reactants[t].iter().all(|&(s, k)| c.counts()[s] >= k)
    }

    /// The missing species of a disabled reaction with the fewest producers.
    fn scapegoat(&self, t: usize, c: &Configuration) -> usize {
        self.reactants[t]
            .iter()
            .filter(|&&(s, k)| c.counts()[s] < k)
            .min_by_key(|&&(s, _)| (self.producers[s].len(), s))
            .map(|&(s, _)| s)
            .expect("reaction is disabled")
    }

    /// Enabled members of the closure of `seed`, or `None` once the count
    /// exceeds `bound`.
    fn closure(&self, seed: usize, c: &Configuration, enabled: &[bool], bound: usize) -> Option<Vec<usize>> {
        let mut in_set = vec![false; self.reactants.len()];
        let mut work = vec![seed];
        in_set[seed] = true;
        let mut members = Vec::new();
        while let Some(t) = work.pop() {
            let next: &[usize] = if enabled[t] {
                members.push(t);
                if members.len() > bound {
                    return None;
                }
                &self.conflicts[t]
            } else {
                &self.producers[self.scapegoat(t, c)]
            };
            for &u in next {
                if !in_set[u] {
                    in_set[u] = true;
                    work.push(u);
                }
            }
        }
        members.sort_unstable();
        Some(members)
    }

    /// Enabled reactions to explore from `c`: the smallest stubborn set over
    /// all enabled seeds, ties broken by lowest seed index. Empty iff `c` is
    /// terminal.
    pub(crate) fn select(&self, c: &Configuration) -> Vec<usize> {
        let enabled: Vec<bool> = (0..self.reactants.len()).map(|t| self.enabled(t, c)).collect();
        let count = enabled.iter().filter(|&&e| e).count();
        let mut best: Option<Vec<usize>> = None;
        for seed in (0..enabled.len()).filter(|&t| enabled[t]) {
            let bound = best.as_ref().map_or(count, |b| b.len() - 1);
            if let Some(set) = self.closure(seed, c, &enabled, bound) {
                let done = set.len() == 1;
                best = Some(set);
                if done {
                    break;
                }
            }
        }
        best.unwrap_or_default()
    }
}

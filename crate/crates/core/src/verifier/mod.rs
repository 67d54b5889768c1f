//! Exhaustive reachability exploration with self-covering detection, and
//! stable-computation verdicts checked against the semilinear oracles.

mod stubborn;
mod verdict;

use indexmap::IndexSet;

use crate::crn::{Configuration, Crn, CrnError};
use stubborn::Stubborn;

pub use verdict::{
    check_stably_computes, check_stably_decides, verify_computer, verify_decider, Counterexample, Expected, InputRecord,
    Observed, Status, Verdict, VerifyError, VerifyOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_configs: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_configs: 2_000_000,
            max_depth: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitHit {
    Configs,
    Depth,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    /// Every applicable reaction is explored.
    #[default]
    None,
    /// Only the enabled reactions of a stubborn set are explored. Preserves
    /// terminal configurations and the existence of infinite executions.
    Stubborn,
}

/// A path `x_0 ⇒ ... ⇒ x_j` from `init` with `x_i ≤ x_j`, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfCoveringWitness {
    pub init: Configuration,
    pub reactions: Vec<usize>,
    pub i: usize,
    pub j: usize,
}

impl SelfCoveringWitness {
    /// The configurations `x_0, ..., x_j` along the path.
    pub fn configurations(&self, crn: &Crn) -> Result<Vec<Configuration>, CrnError> {
        replay(crn, &self.init, &self.reactions)
    }

    /// Replays the path and checks the covering condition.
    pub fn validate(&self, crn: &Crn) -> bool {
        match self.configurations(crn) {
            Ok(path) => self.i < self.j && self.j < path.len() && path[self.j].covers(&path[self.i]),
            Err(_) => false,
        }
    }
}

/// Applies `reactions` in order, returning every configuration visited.
pub fn replay(crn: &Crn, init: &Configuration, reactions: &[usize]) -> Result<Vec<Configuration>, CrnError> {
    let mut path = vec![init.clone()];
    for &j in reactions {
        let next = crn.apply(path.last().expect("non-empty"), j)?;
        path.push(next);
    }
    Ok(path)
}

#[derive(Clone, Debug)]
pub struct ExploreReport {
    /// Every configuration discovered, in discovery order; index 0 is the
    /// initial configuration.
    pub reached: IndexSet<Configuration>,
    /// Indices into `reached` of terminal configurations, in discovery order.
    pub terminals: Vec<usize>,
    pub self_covering: Option<SelfCoveringWitness>,
    pub truncated: Option<LimitHit>,
    /// Length of the longest execution in the explored graph, known when the
    /// exploration finished without a witness or truncation. Under reduction
    /// it is the longest path of the reduced graph.
    pub longest_path: Option<usize>,
    parents: Vec<Option<(usize, usize)>>,
}

impl ExploreReport {
    pub fn is_complete(&self) -> bool {
        self.self_covering.is_none() && self.truncated.is_none()
    }

    pub fn terminal_configs(&self) -> impl Iterator<Item = &Configuration> {
        self.terminals.iter().map(|&i| &self.reached[i])
    }

    /// Reactions along the discovery tree from the initial configuration to
    /// the configuration with index `idx`.
    pub fn path_to(&self, mut idx: usize) -> Vec<usize> {
        let mut rev = Vec::new();
        while let Some((parent, rxn)) = self.parents[idx] {
            rev.push(rxn);
            idx = parent;
        }
        rev.reverse();
        rev
    }
}

/// Quick rejection data for componentwise comparison.
struct Summary {
    total: u128,
    support: u64,
}

impl Summary {
    fn of(c: &Configuration) -> Self {
        let mut support = 0u64;
        for s in c.support() {
            support |= 1 << (s.0 % 64);
        }
        Summary {
            total: c.total(),
            support,
        }
    }

    /// Necessary condition for `y ≥ z`.
    fn may_cover(&self, z: &Summary) -> bool {
        self.total >= z.total && z.support & !self.support == 0
    }
}

struct Frame {
    id: usize,
    succ: Vec<usize>,
    next: usize,
    summary: Summary,
}

/// Depth-first exploration of every configuration reachable from `init`.
///
/// Each successor is compared with the configurations on the current DFS
/// path; the first one it covers yields a self-covering witness and stops
/// the search. Because every cycle of a finite graph closes on the DFS path,
/// an exploration that completes without a witness proves the CRN execution
/// bounded from `init`.
pub fn explore(crn: &Crn, init: &Configuration, limits: Limits) -> ExploreReport {
    explore_with(crn, init, limits, Reduction::None)
}

pub fn explore_with(crn: &Crn, init: &Configuration, limits: Limits, reduction: Reduction) -> ExploreReport {
    let stubborn = match reduction {
        Reduction::None => None,
        Reduction::Stubborn => Some(Stubborn::new(crn)),
    };
    let mut report = ExploreReport {
        reached: IndexSet::new(),
        terminals: Vec::new(),
        self_covering: None,
        truncated: None,
        longest_path: None,
        parents: vec![None],
    };
    report.reached.insert(init.clone());
    // longest[id] = Some(length) once id is fully explored.
    let mut longest: Vec<Option<usize>> = vec![None];
    let mut stack: Vec<Frame> = Vec::new();
    let mut pending = Some(0usize);

    loop {
        if let Some(id) = pending.take() {
            if stack.len() >= limits.max_depth {
                report.truncated = Some(LimitHit::Depth);
                return report;
            }
            let x = report.reached[id].clone();
            let moves: Vec<usize> = match &stubborn {
                Some(s) => s.select(&x),
                None => crn.applicable(&x).collect(),
            };
            if moves.is_empty() {
                report.terminals.push(id);
            }
            let summary = Summary::of(&x);
            let mut succ = Vec::with_capacity(moves.len());
            for j in moves {
                let y = match crn.apply(&x, j) {
                    Ok(y) => y,
                    Err(_) => {
                        // Only overflow can fail here; treat it as unbounded growth.
                        report.truncated = Some(LimitHit::Configs);
                        return report;
                    }
                };
                let ys = Summary::of(&y);
                let path_ids = stack.iter().map(|f| (f.id, &f.summary)).chain([(id, &summary)]);
                for (pos, (zid, zs)) in path_ids.enumerate() {
                    if ys.may_cover(zs) && y.covers(&report.reached[zid]) {
                        let mut reactions: Vec<usize> = stack.iter().skip(1).map(|f| report.parents[f.id].expect("non-root").1).collect();
                        if !stack.is_empty() {
                            reactions.push(report.parents[id].expect("non-root").1);
                        }
                        reactions.push(j);
                        let depth = stack.len() + 1;
                        report.self_covering = Some(SelfCoveringWitness {
                            init: init.clone(),
                            reactions,
                            i: pos,
                            j: depth,
                        });
                        return report;
                    }
                }
                let (yid, fresh) = report.reached.insert_full(y);
                if fresh {
                    if report.reached.len() > limits.max_configs {
                        report.truncated = Some(LimitHit::Configs);
                        return report;
                    }
                    report.parents.push(Some((id, j)));
                    longest.push(None);
                }
                succ.push(yid);
            }
            stack.push(Frame {
                id,
                succ,
                next: 0,
                summary,
            });
        }
        let Some(top) = stack.last_mut() else {
            break;
        };
        if top.next < top.succ.len() {
            let y = top.succ[top.next];
            top.next += 1;
            if longest[y].is_none() {
                pending = Some(y);
            }
            continue;
        }
        let frame = stack.pop().expect("non-empty");
        let len = frame
            .succ
            .iter()
            .map(|&y| longest[y].expect("finished successor") + 1)
            .max()
            .unwrap_or(0);
        longest[frame.id] = Some(len);
    }
    report.longest_path = longest[0];
    report
}

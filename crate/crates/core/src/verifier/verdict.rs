use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use super::{explore_with, replay, Limits, LimitHit, Reduction};
use crate::crn::{Configuration, Crc, Crd, Crn, CrnError};
use crate::semilinear::{PiecewiseFn, Predicate, SpecError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub limits: Limits,
    pub reduction: Reduction,
    /// Require exactly one voter in every reachable configuration.
    pub single_voting: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            limits: Limits::default(),
            reduction: Reduction::Stubborn,
            single_voting: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Bool(bool),
    Int(u64),
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Bool(b) => write!(f, "{b}"),
            Expected::Int(n) => write!(f, "{n}"),
        }
    }
}

/// Output read off a terminal configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Observed {
    Vote(Option<bool>),
    Value(i128),
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Vote(Some(b)) => write!(f, "{b}"),
            Observed::Vote(None) => f.write_str("undefined"),
            Observed::Value(v) => write!(f, "{v}"),
        }
    }
}

/// An execution from `init` ending in a configuration that violates the
/// checked property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub init: Configuration,
    pub reactions: Vec<usize>,
}

impl Counterexample {
    pub fn configurations(&self, crn: &Crn) -> Result<Vec<Configuration>, CrnError> {
        replay(crn, &self.init, &self.reactions)
    }

    pub fn last(&self, crn: &Crn) -> Result<Configuration, CrnError> {
        Ok(self.configurations(crn)?.pop().expect("non-empty"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputRecord {
    pub input: Vec<u64>,
    pub expected: Expected,
    /// Distinct outputs of the terminal configurations found, sorted.
    pub observed: Vec<Observed>,
    pub status: Status,
    pub reason: Option<String>,
    pub counterexample: Option<Counterexample>,
    pub explored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub records: Vec<InputRecord>,
}

impl Verdict {
    pub fn from_records(records: Vec<InputRecord>) -> Self {
        let status = records.iter().map(|r| r.status).max().unwrap_or(Status::Pass);
        Verdict { status, records }
    }

    pub fn failures(&self) -> impl Iterator<Item = &InputRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }
}

enum Output<'a> {
    Decider(&'a Crd),
    Computer(&'a Crc),
}

impl Output<'_> {
    fn crn(&self) -> &Crn {
        match self {
            Output::Decider(d) => d.crn(),
            Output::Computer(c) => c.crn(),
        }
    }

    fn read(&self, c: &Configuration) -> Observed {
        match self {
            Output::Decider(d) => Observed::Vote(d.global_output(c)),
            Output::Computer(f) => Observed::Value(f.output_value(c)),
        }
    }

    fn matches(&self, o: Observed, e: Expected) -> bool {
        match (o, e) {
            (Observed::Vote(v), Expected::Bool(b)) => v == Some(b),
            (Observed::Value(v), Expected::Int(n)) => v == n as i128,
            _ => false,
        }
    }
}

/// Whether `crd` keeps exactly one voter in every configuration reachable
/// from its context: the context holds one voter and every reaction
/// consumes as many voters as it produces.
fn statically_single_voting(crd: &Crd) -> bool {
    let voters = |m: &crate::crn::Multiset| m.iter().filter(|&(s, _)| crd.is_voter(s)).map(|(_, k)| k).sum::<u64>();
    crd.voter_count(crd.context()) == 1 && crd.crn().reactions().iter().all(|r| voters(r.reactants()) == voters(r.products()))
}

fn check(
    out: Output<'_>,
    input: &[u64],
    init: Configuration,
    expected: Expected,
    opts: &VerifyOptions,
) -> InputRecord {
    let crn = out.crn();
    let report = explore_with(crn, &init, opts.limits, opts.reduction);
    let mut record = InputRecord {
        input: input.to_vec(),
        expected,
        observed: Vec::new(),
        status: Status::Pass,
        reason: None,
        counterexample: None,
        explored: report.reached.len(),
    };
    let observed: BTreeSet<Observed> = report.terminal_configs().map(|t| out.read(t)).collect();
    record.observed = observed.into_iter().collect();

    if let Some(w) = &report.self_covering {
        record.status = Status::Fail;
        record.reason = Some(format!(
            "self-covering execution: configuration {} covers configuration {}",
            w.j, w.i
        ));
        record.counterexample = Some(Counterexample {
            init: w.init.clone(),
            reactions: w.reactions.clone(),
        });
        return record;
    }
    if let Output::Decider(crd) = &out {
        if opts.single_voting {
            if let Some(idx) = report.reached.iter().position(|c| crd.voter_count(c) != 1) {
                record.status = Status::Fail;
                record.reason = Some(format!(
                    "configuration with {} voters reachable",
                    crd.voter_count(&report.reached[idx])
                ));
                record.counterexample = Some(Counterexample {
                    init,
                    reactions: report.path_to(idx),
                });
                return record;
            }
        }
    }
    if let Some(&idx) = report.terminals.iter().find(|&&i| !out.matches(out.read(&report.reached[i]), expected)) {
        record.status = Status::Fail;
        record.reason = Some(format!(
            "terminal configuration outputs {}, expected {expected}",
            out.read(&report.reached[idx])
        ));
        record.counterexample = Some(Counterexample {
            init,
            reactions: report.path_to(idx),
        });
        return record;
    }
    if let Some(hit) = report.truncated {
        record.status = Status::Inconclusive;
        record.reason = Some(match hit {
            LimitHit::Configs => format!("configuration limit {} reached", opts.limits.max_configs),
            LimitHit::Depth => format!("depth limit {} reached", opts.limits.max_depth),
        });
    }
    record
}

/// Checks that from input `x` every execution of `crd` is finite and every
/// terminal configuration outputs `pred(x)`.
pub fn check_stably_decides(
    crd: &Crd,
    pred: &Predicate,
    x: &[u64],
    opts: &VerifyOptions,
) -> Result<InputRecord, VerifyError> {
    let expected = Expected::Bool(pred.eval(x)?);
    let init = crd.initial_configuration(x)?;
    if opts.single_voting && !statically_single_voting(crd) {
        return Ok(InputRecord {
            input: x.to_vec(),
            expected,
            observed: Vec::new(),
            status: Status::Fail,
            reason: Some("not single-voting: the context or some reaction changes the voter count".into()),
            counterexample: None,
            explored: 0,
        });
    }
    Ok(check(Output::Decider(crd), x, init, expected, opts))
}

/// Checks that from input `x` every execution of `crc` is finite and every
/// terminal configuration outputs `f(x)`.
pub fn check_stably_computes(
    crc: &Crc,
    f: &PiecewiseFn,
    x: &[u64],
    opts: &VerifyOptions,
) -> Result<InputRecord, VerifyError> {
    let expected = Expected::Int(f.eval(x)?);
    let init = crc.initial_configuration(x)?;
    Ok(check(Output::Computer(crc), x, init, expected, opts))
}

/// Runs [`check_stably_decides`] on every input in parallel. Records keep
/// the order of `inputs`.
pub fn verify_decider(
    crd: &Crd,
    pred: &Predicate,
    inputs: &[Vec<u64>],
    opts: &VerifyOptions,
) -> Result<Verdict, VerifyError> {
    let records = inputs
        .par_iter()
        .map(|x| check_stably_decides(crd, pred, x, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Verdict::from_records(records))
}

/// Runs [`check_stably_computes`] on every input in parallel. Records keep
/// the order of `inputs`.
pub fn verify_computer(
    crc: &Crc,
    f: &PiecewiseFn,
    inputs: &[Vec<u64>],
    opts: &VerifyOptions,
) -> Result<Verdict, VerifyError> {
    let records = inputs
        .par_iter()
        .map(|x| check_stably_computes(crc, f, x, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Verdict::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile_function, compile_mod, compile_predicate};
    use crate::crn::{CrnBuilder, OutputSpec};
    use crate::format::{parse_spec, SpecDocument};
    use crate::semilinear::{grid, AffinePiece, ModAtom, PredicateExpr, ThresholdAtom};

    fn predicate(src: &str) -> Predicate {
        match parse_spec(src).unwrap() {
            SpecDocument::Predicate(p) => p,
            other => panic!("{other:?}"),
        }
    }

    fn min_crc() -> Crc {
        let mut b = CrnBuilder::new();
        b.reaction(&[("X1", 1), ("X2", 1)], &[("Y", 1)]).unwrap();
        let x1 = b.lookup("X1").unwrap();
        let x2 = b.lookup("X2").unwrap();
        let y = b.lookup("Y").unwrap();
        let crn = b.build();
        let ctx = crn.zero_config();
        Crc::new(crn, vec![x1, x2], OutputSpec::Single(y), ctx).unwrap()
    }

    fn min_fn(swap: bool) -> PiecewiseFn {
        let le = ThresholdAtom::le(vec![1, -1], 0);
        let (a, b) = (
            AffinePiece::new(PredicateExpr::Threshold(le.clone()), 0, 1, vec![1, 0], vec![0, 0]).unwrap(),
            AffinePiece::new(PredicateExpr::not(PredicateExpr::Threshold(le)), 0, 1, vec![0, 1], vec![0, 0]).unwrap(),
        );
        let pieces = if swap { vec![a.clone(), b.clone()] } else { vec![a, b] };
        PiecewiseFn::new(vec!["X1".into(), "X2".into()], pieces).unwrap()
    }

    #[test]
    fn min_crc_passes_and_wrong_function_fails() {
        let crc = min_crc();
        let inputs: Vec<Vec<u64>> = grid(2, 4).collect();
        let v = verify_computer(&crc, &min_fn(false), &inputs, &VerifyOptions::default()).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.records.len(), 25);
        assert_eq!(v.records[7].input, vec![1, 2]);

        let max = PiecewiseFn::new(
            vec!["X1".into(), "X2".into()],
            vec![AffinePiece::new(PredicateExpr::Threshold(ThresholdAtom::ge(vec![0, 0], 0)), 0, 1, vec![1, 1], vec![0, 0]).unwrap()],
        )
        .unwrap();
        let v = verify_computer(&crc, &max, &inputs, &VerifyOptions::default()).unwrap();
        assert_eq!(v.status, Status::Fail);
        let bad = v.failures().next().unwrap();
        assert_eq!(bad.input, vec![0, 1]);
        let last = bad.counterexample.as_ref().unwrap().last(crc.crn()).unwrap();
        assert!(crc.crn().is_terminal(&last));
        assert_eq!(crc.output_value(&last), 0);
    }

    #[test]
    fn compiled_predicate_verifies_with_and_without_reduction() {
        let p = predicate("(vars A B) (or (ge ((1 A) (-1 B)) 1) (mod ((1 A) (1 B)) 0 2))");
        let crd = compile_predicate(&p).unwrap().crd;
        let inputs: Vec<Vec<u64>> = grid(2, 3).collect();
        for reduction in [Reduction::None, Reduction::Stubborn] {
            let opts = VerifyOptions {
                reduction,
                single_voting: true,
                ..Default::default()
            };
            let v = verify_decider(&crd, &p, &inputs, &opts).unwrap();
            assert_eq!(v.status, Status::Pass, "{:?}", v.failures().next());
        }
    }

    #[test]
    fn mismatched_predicate_yields_counterexample() {
        let crd = compile_mod(&["X".into()], &ModAtom::new(vec![1], 0, 2).unwrap()).unwrap().crd;
        let odd = predicate("(vars X) (mod ((1 X)) 1 2)");
        let v = verify_decider(&crd, &odd, &[vec![2], vec![3]], &VerifyOptions::default()).unwrap();
        assert_eq!(v.status, Status::Fail);
        for r in &v.records {
            assert_eq!(r.status, Status::Fail);
            let last = r.counterexample.as_ref().unwrap().last(crd.crn()).unwrap();
            assert_eq!(Some(!odd.eval(&r.input).unwrap()), crd.global_output(&last));
        }
    }

    #[test]
    fn vote_swapped_parity_fails() {
        let crd = compile_mod(&["X".into()], &ModAtom::new(vec![1], 1, 2).unwrap()).unwrap().crd;
        let p = predicate("(vars X) (mod ((1 X)) 1 2)");
        let good = check_stably_decides(&crd, &p, &[4], &VerifyOptions::default()).unwrap();
        assert_eq!(good.status, Status::Pass);
        assert_eq!(good.observed, vec![Observed::Vote(Some(false))]);
        let swapped = crd.negated();
        let bad = check_stably_decides(&swapped, &p, &[4], &VerifyOptions::default()).unwrap();
        assert_eq!(bad.status, Status::Fail);
        assert_eq!(bad.observed, vec![Observed::Vote(Some(true))]);
    }

    #[test]
    fn unbounded_network_fails_with_witness() {
        let mut b = CrnBuilder::new();
        b.reaction(&[("X", 1), ("L", 1)], &[("X", 2), ("L", 1)]).unwrap();
        let x = b.lookup("X").unwrap();
        let l = b.lookup("L").unwrap();
        let crn = b.build();
        let ctx = crn.config(&[("L", 1)]).unwrap();
        let crd = Crd::new(crn, vec![x], vec![l], vec![], ctx).unwrap();
        let p = predicate("(vars X) (ge () 0)");
        let r = check_stably_decides(&crd, &p, &[1], &VerifyOptions::default()).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.reason.unwrap().contains("self-covering"));
        // Zero input is terminal immediately.
        let r = check_stably_decides(&crd, &p, &[0], &VerifyOptions::default()).unwrap();
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn single_voting_violations_are_reported() {
        let mut b = CrnBuilder::new();
        b.reaction(&[("X", 1)], &[("Y", 1)]).unwrap();
        let x = b.lookup("X").unwrap();
        let y = b.lookup("Y").unwrap();
        let crn = b.build();
        let ctx = crn.zero_config();
        let crd = Crd::new(crn, vec![x], vec![y], vec![], ctx).unwrap();
        let p = predicate("(vars X) (ge ((1 X)) 1)");
        let opts = VerifyOptions {
            single_voting: true,
            ..Default::default()
        };
        let r = check_stably_decides(&crd, &p, &[2], &opts).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.reason.unwrap().contains("single-voting"));
    }

    #[test]
    fn truncation_is_inconclusive() {
        let crd = compile_mod(&["X".into()], &ModAtom::new(vec![1], 0, 2).unwrap()).unwrap().crd;
        let p = predicate("(vars X) (mod ((1 X)) 0 2)");
        let opts = VerifyOptions {
            limits: Limits {
                max_configs: 3,
                max_depth: 100,
            },
            reduction: Reduction::None,
            single_voting: false,
        };
        let r = check_stably_decides(&crd, &p, &[6], &opts).unwrap();
        assert_eq!(r.status, Status::Inconclusive);
    }

    #[test]
    fn compiled_min_function_verifies_on_small_grid() {
        let f = min_fn(false);
        let crc = compile_function(&f, 4).unwrap().crc;
        let inputs: Vec<Vec<u64>> = grid(2, 2).collect();
        let v = verify_computer(&crc, &f, &inputs, &VerifyOptions::default()).unwrap();
        assert_eq!(v.status, Status::Pass, "{:?}", v.failures().next());
    }
}

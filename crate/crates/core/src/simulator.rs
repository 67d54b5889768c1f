//! Exact stochastic simulation with Gillespie's direct method.
//!
//! Each trial draws from its own ChaCha8 stream seeded by
//! [`trial_seed`]`(master, n, trial)`, so trials can run in parallel and any
//! single trial can be reproduced from its recorded seed.

use std::fmt::Write as _;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use thiserror::Error;

use crate::crn::{Configuration, Crn, CrnError, Reaction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("reaction {reaction} has {order} reactants; only uni- and bimolecular reactions are simulated")]
    UnsupportedOrder { reaction: usize, order: u64 },
    #[error("no terminal configuration after {0} steps")]
    StepLimit(u64),
    #[error("volume must be positive and finite, got {0}")]
    InvalidVolume(f64),
    #[error(transparent)]
    Crn(#[from] CrnError),
}

/// Rate of `rxn` in `config` at volume `v`.
pub fn propensity(config: &Configuration, rxn: &Reaction, volume: f64) -> Result<f64, SimError> {
    let r: Vec<_> = rxn.reactants().iter().collect();
    let c = |s| config.get(s) as f64;
    match r.as_slice() {
        [(x, 1)] => Ok(c(*x)),
        [(x, 2)] => Ok(0.5 * c(*x) * (c(*x) - 1.0).max(0.0) / volume),
        [(x, 1), (y, 1)] => Ok(c(*x) * c(*y) / volume),
        _ => Err(SimError::UnsupportedOrder {
            reaction: 0,
            order: rxn.order(),
        }),
    }
}

fn check_orders(crn: &Crn) -> Result<(), SimError> {
    for (j, r) in crn.reactions().iter().enumerate() {
        if !(1..=2).contains(&r.order()) {
            return Err(SimError::UnsupportedOrder {
                reaction: j,
                order: r.order(),
            });
        }
    }
    Ok(())
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at size `n` under `master`.
pub fn trial_seed(master: u64, n: u64, trial: u64) -> u64 {
    mix(mix(mix(master) ^ n) ^ trial)
}

/// Initial molecular count, at least 1.
pub fn default_volume(init: &Configuration) -> f64 {
    init.total().max(1) as f64
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub config: Configuration,
    pub time: f64,
    pub steps: u64,
    pub volume: f64,
    pub seed: u64,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn new(config: Configuration, volume: f64, seed: u64) -> Result<Self, SimError> {
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(SimError::InvalidVolume(volume));
        }
        Ok(SimState {
            config,
            time: 0.0,
            steps: 0,
            volume,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Fired(usize),
    Terminal,
}

/// Advances `state` by one reaction, or reports that none can fire.
pub fn step(crn: &Crn, state: &mut SimState) -> Result<Step, SimError> {
    let rates = crn
        .reactions()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            propensity(&state.config, r, state.volume).map_err(|e| match e {
                SimError::UnsupportedOrder { order, .. } => SimError::UnsupportedOrder { reaction: j, order },
                e => e,
            })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let total: f64 = rates.iter().sum();
    if total <= 0.0 {
        return Ok(Step::Terminal);
    }
    let dt = Exp::new(total).expect("positive rate").sample(&mut state.rng);
    let target = state.rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (j, &rate) in rates.iter().enumerate() {
        if rate > 0.0 {
            chosen = Some(j);
            acc += rate;
            if target < acc {
                break;
            }
        }
    }
    let j = chosen.expect("some positive rate");
    state.config = crn.apply(&state.config, j)?;
    state.time += dt;
    state.steps += 1;
    Ok(Step::Fired(j))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub n: u64,
    pub seed: u64,
    pub time: f64,
    pub steps: u64,
    pub terminal: Configuration,
}

/// Simulates from `init` until no reaction can fire.
pub fn run_to_terminal(
    crn: &Crn,
    init: &Configuration,
    volume: f64,
    seed: u64,
    max_steps: u64,
) -> Result<TrialRecord, SimError> {
    check_orders(crn)?;
    let mut state = SimState::new(init.clone(), volume, seed)?;
    loop {
        if step(crn, &mut state)? == Step::Terminal {
            return Ok(TrialRecord {
                n: 0,
                seed,
                time: state.time,
                steps: state.steps,
                terminal: state.config,
            });
        }
        if state.steps >= max_steps {
            return Err(SimError::StepLimit(max_steps));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub max_steps: u64,
    /// Fixed volume; by default each trial uses its initial molecular count.
    pub volume: Option<f64>,
}

/// Runs `trials` independent simulations for each size, from `shape(n)`.
/// Records are sorted by `(n, seed)`.
pub fn bench_stabilization<F>(
    crn: &Crn,
    sizes: &[u64],
    config: &BenchConfig,
    shape: F,
) -> Result<Vec<TrialRecord>, SimError>
where
    F: Fn(u64) -> Result<Configuration, CrnError> + Sync,
{
    check_orders(crn)?;
    let jobs: Vec<(u64, u64)> = sizes
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(n, t)| {
            let init = shape(n)?;
            let volume = config.volume.unwrap_or_else(|| default_volume(&init));
            let seed = trial_seed(config.master_seed, n, t);
            let mut r = run_to_terminal(crn, &init, volume, seed, config.max_steps)?;
            r.n = n;
            Ok(r)
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    records.sort_by_key(|r| (r.n, r.seed));
    Ok(records)
}

pub const CSV_HEADER: &str = "n,seed,time,steps";

pub fn write_csv<W: io::Write>(records: &[TrialRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.n, r.seed, r.time, r.steps)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: u64,
    pub trials: usize,
    pub mean_time: f64,
    /// `mean_time / (n ln n)`; NaN for `n ≤ 1`.
    pub normalized: f64,
}

/// Per-size means, in order of first appearance.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<(u64, Vec<f64>)> = Vec::new();
    for r in records {
        match rows.iter_mut().find(|(n, _)| *n == r.n) {
            Some((_, times)) => times.push(r.time),
            None => rows.push((r.n, vec![r.time])),
        }
    }
    rows.into_iter()
        .map(|(n, times)| {
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            let nf = n as f64;
            let normalized = if n > 1 { mean / (nf * nf.ln()) } else { f64::NAN };
            SummaryRow {
                n,
                trials: times.len(),
                mean_time: mean,
                normalized,
            }
        })
        .collect()
}

pub fn summary_markdown(rows: &[SummaryRow]) -> String {
    let mut out = String::from("| n | trials | mean_time | mean_time/(n ln n) |\n|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(out, "| {} | {} | {:.4} | {:.4} |", r.n, r.trials, r.mean_time, r.normalized);
    }
    out
}

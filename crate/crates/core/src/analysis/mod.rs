//! Entire execution boundedness via linear potential functions.
//!
//! A CRN is entirely execution bounded iff some `v ≥ 0` decreases by at
//! least 1 with every reaction (`Mᵀv ≤ -1`). When no such `v` exists, Farkas'
//! lemma gives `u ≥ 0`, `u ≠ 0` with `M u ≥ 0`: a multiset of reactions that
//! can be repeated forever. Both certificates are computed exactly.

mod simplex;

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::crn::{Configuration, Crn, CrnError, SpeciesId};
use simplex::{solve, LpOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialFunction {
    weights: Vec<BigUint>,
}

impl PotentialFunction {
    pub fn new(weights: Vec<BigUint>) -> Self {
        PotentialFunction { weights }
    }

    pub fn from_u64(weights: &[u64]) -> Self {
        PotentialFunction::new(weights.iter().map(|&w| BigUint::from(w)).collect())
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    /// Whether every reaction lowers the potential by at least 1.
    pub fn validate(&self, crn: &Crn) -> bool {
        self.weights.len() == crn.num_species()
            && crn.reactions().iter().all(|r| {
                let change: BigInt = (0..crn.num_species())
                    .map(|s| BigInt::from(r.net(SpeciesId(s))) * BigInt::from(self.weights[s].clone()))
                    .sum();
                change <= BigInt::from(-1)
            })
    }

    /// `Φ(x) = Σ v_S · x(S)`.
    pub fn eval(&self, x: &Configuration) -> BigUint {
        self.weights.iter().zip(x.counts()).map(|(v, &c)| v * BigUint::from(c)).sum()
    }

    /// One `species: weight` line per species.
    pub fn to_text(&self, crn: &Crn) -> String {
        let mut out = String::new();
        for (s, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "{}: {w}", crn.name(SpeciesId(s)));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasWitness {
    multiplicities: Vec<BigUint>,
}

impl FarkasWitness {
    pub fn new(multiplicities: Vec<BigUint>) -> Self {
        FarkasWitness { multiplicities }
    }

    pub fn multiplicities(&self) -> &[BigUint] {
        &self.multiplicities
    }

    /// Whether `u ≠ 0` and `M u ≥ 0`.
    pub fn validate(&self, crn: &Crn) -> bool {
        self.multiplicities.len() == crn.reactions().len()
            && self.multiplicities.iter().any(|u| !u.is_zero())
            && (0..crn.num_species()).all(|s| {
                let net: BigInt = crn
                    .reactions()
                    .iter()
                    .zip(&self.multiplicities)
                    .map(|(r, u)| BigInt::from(r.net(SpeciesId(s))) * BigInt::from(u.clone()))
                    .sum();
                net >= BigInt::zero()
            })
    }

    /// `Σ_j u_j · reactants(r_j)`: enough molecules to fire every reaction
    /// of the multiset once in sequence.
    pub fn start_configuration(&self, crn: &Crn) -> Result<Configuration, CrnError> {
        let mut x = crn.zero_config();
        for (r, u) in crn.reactions().iter().zip(&self.multiplicities) {
            let u = u.to_u64().ok_or(CrnError::Overflow)?;
            for (s, k) in r.reactants().iter() {
                x.add(s, k.checked_mul(u).ok_or(CrnError::Overflow)?)?;
            }
        }
        Ok(x)
    }

    /// Each reaction index repeated by its multiplicity, in index order.
    /// From [`Self::start_configuration`] this ends in a configuration
    /// covering the start.
    pub fn execution(&self) -> Result<Vec<usize>, CrnError> {
        let mut out = Vec::new();
        for (j, u) in self.multiplicities.iter().enumerate() {
            let u = u.to_usize().ok_or(CrnError::Overflow)?;
            out.extend(std::iter::repeat_n(j, u));
        }
        Ok(out)
    }

    /// One `reaction-index: multiplicity` line per reaction.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (j, u) in self.multiplicities.iter().enumerate() {
            let _ = writeln!(out, "{j}: {u}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundednessCertificate {
    Bounded(PotentialFunction),
    Unbounded(FarkasWitness),
}

impl BoundednessCertificate {
    pub fn validate(&self, crn: &Crn) -> bool {
        match self {
            BoundednessCertificate::Bounded(p) => p.validate(crn),
            BoundednessCertificate::Unbounded(w) => w.validate(crn),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, BoundednessCertificate::Bounded(_))
    }
}

/// Clears denominators and divides by the gcd. Entries must be nonnegative.
fn to_integers(xs: &[BigRational]) -> Vec<BigUint> {
    let lcm = xs.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = xs.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter()
        .map(|x| {
            let x = if gcd.is_zero() { x } else { x / &gcd };
            x.to_biguint().expect("nonnegative")
        })
        .collect()
}

/// Decides entire execution boundedness, returning a validated certificate.
pub fn find_potential(crn: &Crn) -> BoundednessCertificate {
    let n = crn.num_species();
    // One row per reaction: -Δ_j · v ≥ 1.
    let a: Vec<Vec<BigRational>> = crn
        .reactions()
        .iter()
        .map(|r| {
            (0..n)
                .map(|s| BigRational::from_integer(BigInt::from(-r.net(SpeciesId(s)))))
                .collect()
        })
        .collect();
    let cert = match solve(&a, n) {
        LpOutcome::Feasible(v) => BoundednessCertificate::Bounded(PotentialFunction::new(to_integers(&v))),
        LpOutcome::Infeasible(y) => BoundednessCertificate::Unbounded(FarkasWitness::new(to_integers(&y))),
    };
    debug_assert!(cert.validate(crn));
    cert
}

/// `Φ(x)`: no execution from `x` is longer than this.
pub fn execution_length_bound(pot: &PotentialFunction, x: &Configuration) -> BigUint {
    pot.eval(x)
}

/// An ordering `r_1, ..., r_n` where no reactant of `r_k` appears in any
/// `r_l` with `k < l`, or `None`.
pub fn reaction_feedforward_order(crn: &Crn) -> Option<Vec<usize>> {
    let rxns = crn.reactions();
    let mut remaining: Vec<usize> = (0..rxns.len()).collect();
    let mut order = Vec::with_capacity(rxns.len());
    while !remaining.is_empty() {
        let pos = remaining.iter().position(|&k| {
            rxns[k]
                .reactants()
                .species()
                .all(|s| remaining.iter().all(|&l| l == k || !rxns[l].mentions(s)))
        })?;
        order.push(remaining.remove(pos));
    }
    Some(order)
}

/// An ordering of species where every reaction with net production of
/// `S_l` has net consumption of some `S_k`, `k < l`, or `None`.
pub fn species_feedforward_order(crn: &Crn) -> Option<Vec<SpeciesId>> {
    let n = crn.num_species();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).map(SpeciesId).find(|&s| {
            !placed[s.0]
                && crn.reactions().iter().filter(|r| r.net(s) > 0).all(|r| {
                    (0..n).any(|k| placed[k] && r.net(SpeciesId(k)) < 0)
                })
        })?;
        placed[next.0] = true;
        order.push(next);
    }
    Some(order)
}

/// Whether `order` satisfies the reaction-feedforward condition.
pub fn is_reaction_feedforward(crn: &Crn, order: &[usize]) -> bool {
    let rxns = crn.reactions();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    sorted == (0..rxns.len()).collect::<Vec<_>>()
        && order.iter().enumerate().all(|(i, &k)| {
            order[i + 1..]
                .iter()
                .all(|&l| rxns[k].reactants().species().all(|s| !rxns[l].mentions(s)))
        })
}

/// Whether `order` satisfies the species-feedforward condition.
pub fn is_species_feedforward(crn: &Crn, order: &[SpeciesId]) -> bool {
    let n = crn.num_species();
    let mut rank = vec![usize::MAX; n];
    for (i, s) in order.iter().enumerate() {
        if s.0 >= n || rank[s.0] != usize::MAX {
            return false;
        }
        rank[s.0] = i;
    }
    order.len() == n
        && crn.reactions().iter().all(|r| {
            (0..n).filter(|&l| r.net(SpeciesId(l)) > 0).all(|l| {
                (0..n).any(|k| rank[k] < rank[l] && r.net(SpeciesId(k)) < 0)
            })
        })
}

//! Core data model: species, reactions, configurations, deciders and
//! computers, plus the stoichiometric linear algebra the other modules use.
//!
//! Species and reactions are indexed by declaration order. Every matrix,
//! certificate and configuration in the crate uses that order, so two runs
//! over the same source produce identical output.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrnError {
    #[error("reaction is not applicable: needs {needed} {species}, have {available}")]
    NotApplicable {
        species: String,
        needed: u64,
        available: u64,
    },
    #[error("species count overflow")]
    Overflow,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid species name `{0}`")]
    InvalidSpeciesName(String),
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("reaction has identical reactants and products")]
    NoOpReaction,
    #[error("species `{0}` is both a yes voter and a no voter")]
    OverlappingVoters(String),
    #[error("input species `{0}` appears in the initial context")]
    InputInContext(String),
    #[error("output species `{0}` is an input species")]
    OutputIsInput(String),
}

/// Index of a species within its owning [`Crn`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpeciesId(pub usize);

impl SpeciesId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Species {
    name: String,
}

impl Species {
    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Species identifiers: `[A-Za-z][A-Za-z0-9_'^.]*`. The dot separates
/// namespace segments in compiled artifacts.
pub fn is_valid_species_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '^' | '.'))
}

/// A multiset over species, kept sorted by species index with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Multiset(Vec<(SpeciesId, u64)>);

impl Multiset {
    pub fn new(pairs: impl IntoIterator<Item = (SpeciesId, u64)>) -> Self {
        let mut merged: BTreeMap<SpeciesId, u64> = BTreeMap::new();
        for (s, k) in pairs {
            *merged.entry(s).or_default() += k;
        }
        Multiset(merged.into_iter().filter(|&(_, k)| k > 0).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpeciesId, u64)> + '_ {
        self.0.iter().copied()
    }

    pub fn count(&self, s: SpeciesId) -> u64 {
        self.0
            .binary_search_by_key(&s, |&(id, _)| id)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Total number of molecules in the multiset.
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&(_, k)| k).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn species(&self) -> impl Iterator<Item = SpeciesId> + '_ {
        self.0.iter().map(|&(s, _)| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reaction {
    reactants: Multiset,
    products: Multiset,
}

impl Reaction {
    pub fn new(reactants: Multiset, products: Multiset) -> Result<Self, CrnError> {
        if reactants == products {
            return Err(CrnError::NoOpReaction);
        }
        Ok(Reaction {
            reactants,
            products,
        })
    }

    pub fn reactants(&self) -> &Multiset {
        &self.reactants
    }

    pub fn products(&self) -> &Multiset {
        &self.products
    }

    /// Net production `p(S) - r(S)`.
    pub fn net(&self, s: SpeciesId) -> i64 {
        self.products.count(s) as i64 - self.reactants.count(s) as i64
    }

    /// Number of reactant molecules (1 = unimolecular, 2 = bimolecular).
    pub fn order(&self) -> u64 {
        self.reactants.size()
    }

    pub fn is_applicable(&self, config: &Configuration) -> bool {
        self.reactants.iter().all(|(s, k)| config.get(s) >= k)
    }

    /// Species touched by the reaction, as reactant or product.
    pub fn mentions(&self, s: SpeciesId) -> bool {
        self.reactants.count(s) > 0 || self.products.count(s) > 0
    }
}

/// Applies `rxn` to `config`, returning `c - r + p`.
pub fn apply(config: &Configuration, rxn: &Reaction) -> Result<Configuration, CrnError> {
    let mut next = config.clone();
    for (s, k) in rxn.reactants.iter() {
        let have = next.get(s);
        if have < k {
            return Err(CrnError::NotApplicable {
                species: format!("#{}", s.0),
                needed: k,
                available: have,
            });
        }
        next.0[s.0] = have - k;
    }
    for (s, k) in rxn.products.iter() {
        next.0[s.0] = next.0[s.0].checked_add(k).ok_or(CrnError::Overflow)?;
    }
    Ok(next)
}

/// Molecular counts, indexed by the owning CRN's species order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<u64>);

impl Configuration {
    pub fn zeros(len: usize) -> Self {
        Configuration(vec![0; len])
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        Configuration(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, s: SpeciesId) -> u64 {
        self.0[s.0]
    }

    pub fn set(&mut self, s: SpeciesId, count: u64) {
        self.0[s.0] = count;
    }

    pub fn add(&mut self, s: SpeciesId, count: u64) -> Result<(), CrnError> {
        self.0[s.0] = self.0[s.0].checked_add(count).ok_or(CrnError::Overflow)?;
        Ok(())
    }

    pub fn total(&self) -> u128 {
        self.0.iter().map(|&c| c as u128).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `self >= other` componentwise.
    pub fn covers(&self, other: &Configuration) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn checked_sum(&self, other: &Configuration) -> Result<Configuration, CrnError> {
        if self.0.len() != other.0.len() {
            return Err(CrnError::DimensionMismatch {
                expected: self.0.len(),
                found: other.0.len(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(CrnError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(Configuration)
    }

    /// Species with positive count.
    pub fn support(&self) -> impl Iterator<Item = SpeciesId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, _)| SpeciesId(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crn {
    species: Vec<Species>,
    index: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
}

impl Crn {
    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn species_id(&self, name: &str) -> Option<SpeciesId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, s: SpeciesId) -> &str {
        &self.species[s.0].name
    }

    pub fn zero_config(&self) -> Configuration {
        Configuration::zeros(self.species.len())
    }

    /// Builds a configuration from `(name, count)` pairs.
    pub fn config(&self, pairs: &[(&str, u64)]) -> Result<Configuration, CrnError> {
        let mut c = self.zero_config();
        for &(name, k) in pairs {
            let id = self
                .species_id(name)
                .ok_or_else(|| CrnError::UnknownSpecies(name.to_string()))?;
            c.add(id, k)?;
        }
        Ok(c)
    }

    pub fn apply(&self, config: &Configuration, reaction: usize) -> Result<Configuration, CrnError> {
        apply(config, &self.reactions[reaction]).map_err(|e| match e {
            CrnError::NotApplicable {
                species,
                needed,
                available,
            } => {
                let idx: usize = species[1..].parse().unwrap_or(0);
                CrnError::NotApplicable {
                    species: self.species[idx].name.clone(),
                    needed,
                    available,
                }
            }
            other => other,
        })
    }

    /// True iff no reaction is applicable at `config`.
    pub fn is_terminal(&self, config: &Configuration) -> bool {
        !self.reactions.iter().any(|r| r.is_applicable(config))
    }

    pub fn applicable(&self, config: &Configuration) -> impl Iterator<Item = usize> + '_ {
        let config = config.clone();
        self.reactions
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.is_applicable(&config))
            .map(|(i, _)| i)
    }

    pub fn stoichiometric_matrix(&self) -> StoichMatrix {
        let rows = self.species.len();
        let cols = self.reactions.len();
        let mut entries = vec![0i64; rows * cols];
        for (j, r) in self.reactions.iter().enumerate() {
            for (s, k) in r.products.iter() {
                entries[s.0 * cols + j] += k as i64;
            }
            for (s, k) in r.reactants.iter() {
                entries[s.0 * cols + j] -= k as i64;
            }
        }
        StoichMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// `M·u`: the net change in species counts from running reaction `j`
    /// `u[j]` times.
    pub fn displacement(&self, u: &[u64]) -> Result<Vec<i128>, CrnError> {
        if u.len() != self.reactions.len() {
            return Err(CrnError::DimensionMismatch {
                expected: self.reactions.len(),
                found: u.len(),
            });
        }
        let mut out = vec![0i128; self.species.len()];
        for (r, &times) in self.reactions.iter().zip(u) {
            for (s, k) in r.products.iter() {
                out[s.0] += k as i128 * times as i128;
            }
            for (s, k) in r.reactants.iter() {
                out[s.0] -= k as i128 * times as i128;
            }
        }
        Ok(out)
    }

    /// `{A:1, C:2}`, listing positive counts in species order.
    pub fn describe(&self, config: &Configuration) -> String {
        let parts: Vec<String> = config
            .support()
            .map(|s| format!("{}:{}", self.name(s), config.get(s)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn describe_multiset(&self, m: &Multiset) -> String {
        if m.is_empty() {
            return "0".to_string();
        }
        m.iter()
            .map(|(s, k)| {
                if k == 1 {
                    self.name(s).to_string()
                } else {
                    format!("{k} {}", self.name(s))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn describe_reaction(&self, r: &Reaction) -> String {
        format!(
            "{} -> {}",
            self.describe_multiset(&r.reactants),
            self.describe_multiset(&r.products)
        )
    }
}

/// Incrementally assembles a [`Crn`], interning species by name in first-use order.
#[derive(Clone, Debug, Default)]
pub struct CrnBuilder {
    species: Vec<Species>,
    index: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
}

impl CrnBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name`, returning its id (existing or fresh).
    pub fn species(&mut self, name: &str) -> Result<SpeciesId, CrnError> {
        if let Some(&id) = self.index.get(name) {
            return Ok(id);
        }
        if !is_valid_species_name(name) {
            return Err(CrnError::InvalidSpeciesName(name.to_string()));
        }
        let id = SpeciesId(self.species.len());
        self.species.push(Species {
            name: name.to_string(),
        });
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Declares a species that must not exist yet.
    pub fn declare(&mut self, name: &str) -> Result<SpeciesId, CrnError> {
        if self.index.contains_key(name) {
            return Err(CrnError::DuplicateSpecies(name.to_string()));
        }
        self.species(name)
    }

    pub fn lookup(&self, name: &str) -> Option<SpeciesId> {
        self.index.get(name).copied()
    }

    pub fn multiset(&mut self, side: &[(&str, u64)]) -> Result<Multiset, CrnError> {
        let mut pairs = Vec::with_capacity(side.len());
        for &(name, k) in side {
            pairs.push((self.species(name)?, k));
        }
        Ok(Multiset::new(pairs))
    }

    pub fn reaction(&mut self, reactants: &[(&str, u64)], products: &[(&str, u64)]) -> Result<(), CrnError> {
        let r = self.multiset(reactants)?;
        let p = self.multiset(products)?;
        self.reactions.push(Reaction::new(r, p)?);
        Ok(())
    }

    pub fn push(&mut self, reaction: Reaction) {
        self.reactions.push(reaction);
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn build(self) -> Crn {
        Crn {
            species: self.species,
            index: self.index,
            reactions: self.reactions,
        }
    }
}

/// `M[i][j] = p_j(S_i) - r_j(S_i)`, species by reactions, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoichMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl StoichMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, species: usize, reaction: usize) -> i64 {
        self.entries[species * self.cols + reaction]
    }

    pub fn column(&self, reaction: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, reaction)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }
}

impl fmt::Display for StoichMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A chemical reaction decider: a CRN with input species, yes/no voters and
/// an initial context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crd {
    crn: Crn,
    inputs: Vec<SpeciesId>,
    yes: Vec<SpeciesId>,
    no: Vec<SpeciesId>,
    context: Configuration,
    votes: Vec<Option<bool>>,
}

fn check_inputs(crn: &Crn, inputs: &[SpeciesId], context: &Configuration) -> Result<(), CrnError> {
    if context.len() != crn.num_species() {
        return Err(CrnError::DimensionMismatch {
            expected: crn.num_species(),
            found: context.len(),
        });
    }
    let mut seen = vec![false; crn.num_species()];
    for &s in inputs {
        if std::mem::replace(&mut seen[s.0], true) {
            return Err(CrnError::DuplicateSpecies(crn.name(s).to_string()));
        }
        if context.get(s) > 0 {
            return Err(CrnError::InputInContext(crn.name(s).to_string()));
        }
    }
    Ok(())
}

impl Crd {
    pub fn new(
        crn: Crn,
        inputs: Vec<SpeciesId>,
        yes: Vec<SpeciesId>,
        no: Vec<SpeciesId>,
        context: Configuration,
    ) -> Result<Self, CrnError> {
        check_inputs(&crn, &inputs, &context)?;
        let mut votes = vec![None; crn.num_species()];
        for &s in &yes {
            votes[s.0] = Some(true);
        }
        for &s in &no {
            if votes[s.0] == Some(true) {
                return Err(CrnError::OverlappingVoters(crn.name(s).to_string()));
            }
            votes[s.0] = Some(false);
        }
        Ok(Crd {
            crn,
            inputs,
            yes,
            no,
            context,
            votes,
        })
    }

    pub fn crn(&self) -> &Crn {
        &self.crn
    }

    pub fn inputs(&self) -> &[SpeciesId] {
        &self.inputs
    }

    pub fn yes_voters(&self) -> &[SpeciesId] {
        &self.yes
    }

    pub fn no_voters(&self) -> &[SpeciesId] {
        &self.no
    }

    pub fn context(&self) -> &Configuration {
        &self.context
    }

    pub fn vote(&self, s: SpeciesId) -> Option<bool> {
        self.votes[s.0]
    }

    pub fn is_voter(&self, s: SpeciesId) -> bool {
        self.votes[s.0].is_some()
    }

    pub fn is_all_voting(&self) -> bool {
        self.votes.iter().all(Option::is_some)
    }

    /// Context plus `input[k]` copies of the k-th input species.
    pub fn initial_configuration(&self, input: &[u64]) -> Result<Configuration, CrnError> {
        initial(&self.context, &self.inputs, input)
    }

    /// The unanimous vote of the present voters, or `None` when the
    /// configuration is empty, mixed, or has no voter at all.
    pub fn global_output(&self, config: &Configuration) -> Option<bool> {
        let mut seen = None;
        for s in config.support() {
            if let Some(v) = self.votes[s.0] {
                match seen {
                    None => seen = Some(v),
                    Some(prev) if prev != v => return None,
                    _ => {}
                }
            }
        }
        seen
    }

    /// Total count of voter molecules.
    pub fn voter_count(&self, config: &Configuration) -> u128 {
        config
            .support()
            .filter(|&s| self.is_voter(s))
            .map(|s| config.get(s) as u128)
            .sum()
    }

    /// A copy with yes and no voters exchanged.
    pub fn negated(&self) -> Crd {
        Crd::new(
            self.crn.clone(),
            self.inputs.clone(),
            self.no.clone(),
            self.yes.clone(),
            self.context.clone(),
        )
        .expect("swapping voters preserves validity")
    }
}

fn initial(context: &Configuration, inputs: &[SpeciesId], input: &[u64]) -> Result<Configuration, CrnError> {
    if input.len() != inputs.len() {
        return Err(CrnError::DimensionMismatch {
            expected: inputs.len(),
            found: input.len(),
        });
    }
    let mut c = context.clone();
    for (&s, &k) in inputs.iter().zip(input) {
        c.add(s, k)?;
    }
    Ok(c)
}

/// How a computer's output is read off a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputSpec {
    /// `#Y`.
    Single(SpeciesId),
    /// `#positive - #negative`.
    Diff {
        positive: SpeciesId,
        negative: SpeciesId,
    },
}

/// A chemical reaction computer: a CRN with input species, an output and an
/// initial context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crc {
    crn: Crn,
    inputs: Vec<SpeciesId>,
    output: OutputSpec,
    context: Configuration,
}

impl Crc {
    pub fn new(
        crn: Crn,
        inputs: Vec<SpeciesId>,
        output: OutputSpec,
        context: Configuration,
    ) -> Result<Self, CrnError> {
        check_inputs(&crn, &inputs, &context)?;
        let outs = match output {
            OutputSpec::Single(y) => vec![y],
            OutputSpec::Diff { positive, negative } => vec![positive, negative],
        };
        for y in outs {
            if inputs.contains(&y) {
                return Err(CrnError::OutputIsInput(crn.name(y).to_string()));
            }
        }
        Ok(Crc {
            crn,
            inputs,
            output,
            context,
        })
    }

    pub fn crn(&self) -> &Crn {
        &self.crn
    }

    pub fn inputs(&self) -> &[SpeciesId] {
        &self.inputs
    }

    pub fn output(&self) -> OutputSpec {
        self.output
    }

    pub fn context(&self) -> &Configuration {
        &self.context
    }

    pub fn initial_configuration(&self, input: &[u64]) -> Result<Configuration, CrnError> {
        initial(&self.context, &self.inputs, input)
    }

    pub fn output_value(&self, config: &Configuration) -> i128 {
        match self.output {
            OutputSpec::Single(y) => config.get(y) as i128,
            OutputSpec::Diff { positive, negative } => {
                config.get(positive) as i128 - config.get(negative) as i128
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn crn(reactions: &[(&[(&str, u64)], &[(&str, u64)])]) -> Crn {
        let mut b = CrnBuilder::new();
        for (r, p) in reactions {
            b.reaction(r, p).unwrap();
        }
        b.build()
    }

    #[test]
    fn apply_examples() {
        let net = crn(&[(&[("A", 1), ("B", 1)], &[("C", 1)])]);
        let c = net.config(&[("A", 1), ("B", 1)]).unwrap();
        let next = net.apply(&c, 0).unwrap();
        assert_eq!(next, net.config(&[("C", 1)]).unwrap());
        assert_eq!(c, net.config(&[("A", 1), ("B", 1)]).unwrap());

        let missing = net.config(&[("B", 1)]).unwrap();
        assert!(matches!(
            net.apply(&missing, 0),
            Err(CrnError::NotApplicable { ref species, needed: 1, available: 0 }) if species == "A"
        ));

        let min = crn(&[(&[("X1", 1), ("X2", 1)], &[("Y", 1)])]);
        let c = min.config(&[("X1", 1), ("X2", 1)]).unwrap();
        assert_eq!(min.apply(&c, 0).unwrap(), min.config(&[("Y", 1)]).unwrap());
    }

    #[test]
    fn stoichiometric_matrix_examples() {
        let net = crn(&[
            (&[("S1", 1)], &[("S2", 1), ("S3", 2)]),
            (&[("S2", 3), ("S3", 1)], &[("S1", 1), ("S2", 1), ("S3", 1)]),
        ]);
        assert_eq!(
            net.stoichiometric_matrix().to_rows(),
            vec![vec![-1, 1], vec![1, -2], vec![2, 0]]
        );
        assert_eq!(net.displacement(&[2, 1]).unwrap(), vec![-1, 0, 4]);
        assert_eq!(net.displacement(&[0, 0]).unwrap(), vec![0, 0, 0]);
        assert!(matches!(
            net.displacement(&[1]),
            Err(CrnError::DimensionMismatch { expected: 2, found: 1 })
        ));

        let abc = crn(&[(&[("A", 1), ("B", 1)], &[("C", 1)])]);
        assert_eq!(abc.stoichiometric_matrix().column(0), vec![-1, -1, 1]);

        let ab = crn(&[(&[("A", 1)], &[("B", 1)])]);
        assert_eq!(ab.displacement(&[3]).unwrap(), vec![-3, 3]);

        let mut b = CrnBuilder::new();
        b.species("A").unwrap();
        b.species("B").unwrap();
        let empty = b.build().stoichiometric_matrix();
        assert_eq!((empty.rows(), empty.cols()), (2, 0));
    }

    #[test]
    fn no_op_reaction_rejected() {
        let mut b = CrnBuilder::new();
        assert_eq!(b.reaction(&[("A", 1)], &[("A", 1)]), Err(CrnError::NoOpReaction));
        assert_eq!(b.reaction(&[], &[]), Err(CrnError::NoOpReaction));
    }

    #[test]
    fn species_names() {
        for ok in ["A", "Y^P", "L_Y", "X1'", "L.R.X_1"] {
            assert!(is_valid_species_name(ok), "{ok}");
        }
        for bad in ["", "1X", "_a", "a b", "a-b", "0"] {
            assert!(!is_valid_species_name(bad), "{bad}");
        }
    }

    fn parity_crd() -> Crd {
        let net = crn(&[
            (&[("X1", 2)], &[("X0", 1)]),
            (&[("X1", 1), ("X0", 1)], &[("X1", 1)]),
            (&[("X0", 2)], &[("X0", 1)]),
        ]);
        let x1 = net.species_id("X1").unwrap();
        let x0 = net.species_id("X0").unwrap();
        let ctx = net.zero_config();
        Crd::new(net, vec![x1], vec![x1], vec![x0], ctx).unwrap()
    }

    #[test]
    fn global_output_examples() {
        let crd = parity_crd();
        let net = crd.crn();
        assert_eq!(crd.global_output(&net.config(&[("X1", 2)]).unwrap()), Some(true));
        assert_eq!(
            crd.global_output(&net.config(&[("X1", 1), ("X0", 1)]).unwrap()),
            None
        );
        assert_eq!(crd.global_output(&net.zero_config()), None);
        assert_eq!(crd.global_output(&net.config(&[("X0", 3)]).unwrap()), Some(false));
    }

    #[test]
    fn global_output_requires_a_voter() {
        let net = crn(&[(&[("A", 1)], &[("B", 1)])]);
        let a = net.species_id("A").unwrap();
        let ctx = net.zero_config();
        let crd = Crd::new(net, vec![], vec![a], vec![], ctx).unwrap();
        let only_b = crd.crn().config(&[("B", 4)]).unwrap();
        assert_eq!(crd.global_output(&only_b), None);
    }

    #[test]
    fn crd_invariants() {
        let net = crn(&[(&[("A", 1)], &[("B", 1)])]);
        let a = net.species_id("A").unwrap();
        let b = net.species_id("B").unwrap();
        let ctx = net.zero_config();
        assert!(matches!(
            Crd::new(net.clone(), vec![], vec![a], vec![a], ctx.clone()),
            Err(CrnError::OverlappingVoters(_))
        ));
        let mut with_a = ctx.clone();
        with_a.set(a, 1);
        assert!(matches!(
            Crd::new(net.clone(), vec![a], vec![b], vec![], with_a),
            Err(CrnError::InputInContext(_))
        ));
        assert!(matches!(
            Crc::new(net, vec![a], OutputSpec::Single(a), ctx),
            Err(CrnError::OutputIsInput(_))
        ));
    }

    #[test]
    fn terminal_examples() {
        let min = crn(&[(&[("X1", 1), ("X2", 1)], &[("Y", 1)])]);
        assert!(min.is_terminal(&min.config(&[("X1", 3)]).unwrap()));
        assert!(!min.is_terminal(&min.config(&[("X1", 1), ("X2", 1)]).unwrap()));

        let intro = crn(&[
            (&[("X1", 1)], &[("Y", 1)]),
            (&[("X2", 1), ("Y", 1)], &[]),
            (&[("Y", 1), ("X3", 1)], &[("Z", 1)]),
            (&[("Z", 1), ("X2", 1)], &[("X2", 1), ("X3", 1), ("Y", 1)]),
        ]);
        let c = intro.config(&[("Y", 1), ("X2", 1), ("X3", 1)]).unwrap();
        assert!(!intro.is_terminal(&c));
        assert!(intro.reactions()[2].is_applicable(&c));
    }

    fn small_crn() -> impl Strategy<Value = Crn> {
        let side = proptest::collection::vec(0u64..3, 3);
        proptest::collection::vec((side.clone(), side), 1..4).prop_filter_map(
            "no-op reactions",
            |rxns| {
                let names = ["A", "B", "C"];
                let mut b = CrnBuilder::new();
                for n in names {
                    b.species(n).unwrap();
                }
                for (r, p) in rxns {
                    let rs: Vec<(&str, u64)> = names.iter().copied().zip(r).collect();
                    let ps: Vec<(&str, u64)> = names.iter().copied().zip(p).collect();
                    b.reaction(&rs, &ps).ok()?;
                }
                Some(b.build())
            },
        )
    }

    proptest! {
        #[test]
        fn reachability_is_additive(
            net in small_crn(),
            start in proptest::collection::vec(0u64..4, 3),
            extra in proptest::collection::vec(0u64..4, 3),
            choices in proptest::collection::vec(0usize..8, 0..12),
        ) {
            let x = Configuration::from_counts(start);
            let c = Configuration::from_counts(extra);
            let mut y = x.clone();
            let mut y_plus = x.checked_sum(&c).unwrap();
            for pick in choices {
                let enabled: Vec<usize> = net.applicable(&y).collect();
                if enabled.is_empty() {
                    break;
                }
                let j = enabled[pick % enabled.len()];
                y = net.apply(&y, j).unwrap();
                y_plus = net.apply(&y_plus, j).unwrap();
            }
            prop_assert_eq!(y.checked_sum(&c).unwrap(), y_plus);
        }

        #[test]
        fn apply_matches_displacement(net in small_crn(), start in proptest::collection::vec(0u64..5, 3), j in 0usize..4) {
            let j = j % net.reactions().len();
            let x = Configuration::from_counts(start);
            if let Ok(y) = net.apply(&x, j) {
                let mut u = vec![0; net.reactions().len()];
                u[j] = 1;
                let d = net.displacement(&u).unwrap();
                for i in 0..3 {
                    prop_assert_eq!(y.counts()[i] as i128, x.counts()[i] as i128 + d[i]);
                }
            } else {
                prop_assert!(!net.reactions()[j].is_applicable(&x));
            }
        }

        #[test]
        fn displacement_is_linear(net in small_crn(), u1 in proptest::collection::vec(0u64..5, 3), u2 in proptest::collection::vec(0u64..5, 3)) {
            let m = net.reactions().len();
            let (u1, u2) = (&u1[..m], &u2[..m]);
            let sum: Vec<u64> = u1.iter().zip(u2).map(|(a, b)| a + b).collect();
            let lhs = net.displacement(&sum).unwrap();
            let a = net.displacement(u1).unwrap();
            let b = net.displacement(u2).unwrap();
            let rhs: Vec<i128> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn global_output_ignores_permutation_within_a_vote(a in 0u64..4, b in 0u64..4, c in 0u64..4) {
            // X1 and x1 both vote yes; swapping their counts never changes the output.
            let net = crn(&[(&[("X1", 1), ("X2", 1)], &[("x1", 1), ("x2", 1)])]);
            let id = |n: &str| net.species_id(n).unwrap();
            let ctx = net.zero_config();
            let crd = Crd::new(net.clone(), vec![], vec![id("X1"), id("x1")], vec![id("X2"), id("x2")], ctx).unwrap();
            let one = net.config(&[("X1", a), ("x1", b), ("X2", c)]).unwrap();
            let other = net.config(&[("X1", b), ("x1", a), ("X2", c)]).unwrap();
            prop_assert_eq!(crd.global_output(&one), crd.global_output(&other));
        }
    }
}

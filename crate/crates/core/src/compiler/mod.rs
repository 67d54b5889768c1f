//! Constructions turning semilinear predicates and piecewise-affine functions
//! into execution-bounded deciders and computers.
//!
//! Every internal species of a sub-network carries a dotted namespace prefix
//! derived from its position in the expression tree (`L.R.P`), so sibling
//! sub-networks never share species. Input species keep the variable names.

mod all_voting;
mod function;
mod predicate;

use std::fmt;

use thiserror::Error;

use crate::crn::{Configuration, Crc, Crd, CrnBuilder, CrnError, Multiset, OutputSpec, Reaction, SpeciesId};
use crate::semilinear::{SpecError, Violation};

pub use all_voting::make_all_voting;
pub use function::{compile_affine, compile_function};
pub use predicate::{compile_mod, compile_predicate, compile_threshold};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("generated species `{0}` clashes with another species of the same name")]
    NameClash(String),
    #[error("all-voting conversion needs a single-voting decider")]
    NotSingleVoting,
    #[error("{} decomposition violation(s), first: {}", .0.len(), .0[0])]
    InvalidDecomposition(Vec<Violation>),
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoterKind {
    /// Exactly one voter molecule in every reachable configuration.
    SingleVoting,
    /// Every species votes.
    AllVoting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    /// `#Y^P - #Y^C`.
    Diff,
    /// `#Y`.
    Single,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledCrd {
    pub crd: Crd,
    pub voter_kind: VoterKind,
    pub namespace: Namespace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledCrc {
    pub crc: Crc,
    pub namespace: Namespace,
}

impl CompiledCrc {
    pub fn mode(&self) -> OutputMode {
        match self.crc.output() {
            OutputSpec::Single(_) => OutputMode::Single,
            OutputSpec::Diff { .. } => OutputMode::Diff,
        }
    }
}

/// Dotted path of a sub-network; the root is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Namespace(Vec<String>);

impl Namespace {
    pub fn root() -> Self {
        Namespace::default()
    }

    pub fn child(&self, segment: &str) -> Self {
        let mut path = self.0.clone();
        path.push(segment.to_string());
        Namespace(path)
    }

    pub fn qualify(&self, local: &str) -> String {
        if self.0.is_empty() {
            local.to_string()
        } else {
            format!("{}.{local}", self.0.join("."))
        }
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

/// Shared state while emitting one network: species interning, the initial
/// context and the top-level input species.
pub(crate) struct NetBuilder {
    b: CrnBuilder,
    vars: Vec<String>,
    inputs: Vec<SpeciesId>,
    context: Vec<(SpeciesId, u64)>,
}

impl NetBuilder {
    pub(crate) fn new(vars: &[String]) -> Result<Self, CompileError> {
        let mut nb = NetBuilder {
            b: CrnBuilder::new(),
            vars: vars.to_vec(),
            inputs: Vec::new(),
            context: Vec::new(),
        };
        for v in vars {
            let id = nb.fresh(v)?;
            nb.inputs.push(id);
        }
        Ok(nb)
    }

    fn fresh(&mut self, name: &str) -> Result<SpeciesId, CompileError> {
        match self.b.declare(name) {
            Err(CrnError::DuplicateSpecies(n)) => Err(CompileError::NameClash(n)),
            other => Ok(other?),
        }
    }

    /// Declares the species `local` inside `ns`. Every generated name must
    /// be new; a collision means a variable name shadows a generated one.
    pub(crate) fn internal(&mut self, ns: &Namespace, local: &str) -> Result<SpeciesId, CompileError> {
        self.fresh(&ns.qualify(local))
    }

    pub(crate) fn vars(&self) -> &[String] {
        &self.vars
    }

    pub(crate) fn inputs(&self) -> Vec<SpeciesId> {
        self.inputs.clone()
    }

    /// Per-variable copies of the inputs inside `ns`.
    pub(crate) fn input_copies(&mut self, ns: &Namespace) -> Result<Vec<SpeciesId>, CompileError> {
        let vars = self.vars.clone();
        vars.iter().map(|v| self.internal(ns, v)).collect()
    }

    pub(crate) fn rxn(&mut self, reactants: &[(SpeciesId, u64)], products: &[(SpeciesId, u64)]) -> Result<(), CompileError> {
        let r = Reaction::new(
            Multiset::new(reactants.iter().copied()),
            Multiset::new(products.iter().copied()),
        )?;
        self.b.push(r);
        Ok(())
    }

    pub(crate) fn context(&mut self, s: SpeciesId, k: u64) {
        if k > 0 {
            self.context.push((s, k));
        }
    }

    fn context_config(&self, n: usize) -> Result<Configuration, CompileError> {
        let mut c = Configuration::zeros(n);
        for &(s, k) in &self.context {
            c.add(s, k)?;
        }
        Ok(c)
    }

    pub(crate) fn finish_crd(self, yes: Vec<SpeciesId>, no: Vec<SpeciesId>) -> Result<Crd, CompileError> {
        let context = self.context_config(self.b.num_species())?;
        Ok(Crd::new(self.b.build(), self.inputs, yes, no, context)?)
    }

    pub(crate) fn finish_crc(self, output: OutputSpec) -> Result<Crc, CompileError> {
        let context = self.context_config(self.b.num_species())?;
        Ok(Crc::new(self.b.build(), self.inputs, output, context)?)
    }
}

/// Brute-force terminal enumeration used as an independent oracle by the
/// construction tests.
#[cfg(test)]
pub(crate) mod oracle {
    use std::collections::{BTreeSet, HashSet};

    use crate::crn::{Configuration, Crn};

    pub(crate) fn terminals(crn: &Crn, init: &Configuration) -> BTreeSet<Configuration> {
        let mut seen: HashSet<Configuration> = HashSet::new();
        let mut todo = vec![init.clone()];
        let mut out = BTreeSet::new();
        seen.insert(init.clone());
        while let Some(c) = todo.pop() {
            assert!(seen.len() < 2_000_000, "oracle state space too large");
            let mut terminal = true;
            for (j, r) in crn.reactions().iter().enumerate() {
                if r.is_applicable(&c) {
                    terminal = false;
                    let next = crn.apply(&c, j).unwrap();
                    if seen.insert(next.clone()) {
                        todo.push(next);
                    }
                }
            }
            if terminal {
                out.insert(c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn namespaces_qualify() {
        let root = Namespace::root();
        assert_eq!(root.qualify("P"), "P");
        let lr = root.child("L").child("R");
        assert_eq!(lr.qualify("X_1"), "L.R.X_1");
        assert_eq!(lr.to_string(), "L.R");
    }

    #[test]
    fn internal_names_must_be_fresh() {
        let mut nb = NetBuilder::new(&["P".to_string()]).unwrap();
        assert_eq!(
            nb.internal(&Namespace::root(), "P"),
            Err(CompileError::NameClash("P".into()))
        );
        assert!(nb.internal(&Namespace::root().child("L"), "P").is_ok());
    }
}

//! Single-voting deciders for mod atoms, threshold atoms and their Boolean
//! combinations.

use super::{CompileError, CompiledCrd, Namespace, NetBuilder, VoterKind};
use crate::crn::SpeciesId;
use crate::semilinear::{ModAtom, Predicate, PredicateExpr, ThresholdAtom};

/// Voters of a sub-decider and the vote of its initial leader.
pub(crate) struct Voters {
    pub yes: Vec<SpeciesId>,
    pub no: Vec<SpeciesId>,
    pub initial: bool,
}

/// `X_i + L_j -> L_{(j + w_i) mod m}` with the leader starting at `L_0`.
fn mod_atom(nb: &mut NetBuilder, ns: &Namespace, a: &ModAtom, inputs: &[SpeciesId]) -> Result<Voters, CompileError> {
    let m = a.modulus();
    let leaders = (0..m)
        .map(|j| nb.internal(ns, &format!("L_{j}")))
        .collect::<Result<Vec<_>, _>>()?;
    for (&x, &w) in inputs.iter().zip(a.weights()) {
        if w == 0 {
            nb.rxn(&[(x, 1)], &[])?;
            continue;
        }
        for j in 0..m {
            nb.rxn(&[(x, 1), (leaders[j as usize], 1)], &[(leaders[((j + w) % m) as usize], 1)])?;
        }
    }
    nb.context(leaders[0], 1);
    let c = a.residue() as usize;
    Ok(Voters {
        yes: vec![leaders[c]],
        no: (0..m as usize).filter(|&j| j != c).map(|j| leaders[j]).collect(),
        initial: c == 0,
    })
}

/// Inputs turn into positive (`P`) and negative (`N`) units which a single
/// leader consumes alternately. The final leader is `L_Y` iff `#P >= #N`.
fn threshold_atom(
    nb: &mut NetBuilder,
    ns: &Namespace,
    a: &ThresholdAtom,
    inputs: &[SpeciesId],
) -> Result<Voters, CompileError> {
    let (w, t) = a.ge_form();
    let p = nb.internal(ns, "P")?;
    let n = nb.internal(ns, "N")?;
    let ly = nb.internal(ns, "L_Y")?;
    let ln = nb.internal(ns, "L_N")?;
    for (&x, &wi) in inputs.iter().zip(&w) {
        match wi {
            0 => nb.rxn(&[(x, 1)], &[])?,
            k if k > 0 => nb.rxn(&[(x, 1)], &[(p, k as u64)])?,
            k => nb.rxn(&[(x, 1)], &[(n, k.unsigned_abs())])?,
        }
    }
    nb.rxn(&[(ly, 1), (n, 1)], &[(ln, 1)])?;
    nb.rxn(&[(ln, 1), (p, 1)], &[(ly, 1)])?;
    nb.context(ly, 1);
    if t > 0 {
        nb.context(n, t as u64);
    } else if t < 0 {
        nb.context(p, t.unsigned_abs());
    }
    Ok(Voters {
        yes: vec![ly],
        no: vec![ln],
        initial: true,
    })
}

#[derive(Clone, Copy)]
enum Op {
    And,
    Or,
}

/// Runs both operands on split copies of the input and records their
/// current votes in one of four recorder species `V_ab`.
fn binary(
    nb: &mut NetBuilder,
    ns: &Namespace,
    op: Op,
    a: &PredicateExpr,
    b: &PredicateExpr,
    inputs: &[SpeciesId],
) -> Result<Voters, CompileError> {
    let (ns_l, ns_r) = (ns.child("L"), ns.child("R"));
    let left_in = nb.input_copies(&ns_l)?;
    let right_in = nb.input_copies(&ns_r)?;
    for ((&x, &l), &r) in inputs.iter().zip(&left_in).zip(&right_in) {
        nb.rxn(&[(x, 1)], &[(l, 1), (r, 1)])?;
    }
    let left = expr(nb, &ns_l, a, &left_in)?;
    let right = expr(nb, &ns_r, b, &right_in)?;

    let letter = |v: bool| if v { 'Y' } else { 'N' };
    // v[l][r] is the recorder for left vote l and right vote r.
    let mut v = [[SpeciesId(0); 2]; 2];
    for l in [false, true] {
        for r in [false, true] {
            v[l as usize][r as usize] = nb.internal(ns, &format!("V_{}{}", letter(l), letter(r)))?;
        }
    }
    for (voters, vote) in [(&left.yes, true), (&left.no, false)] {
        for &s in voters.iter() {
            for q in 0..2 {
                nb.rxn(
                    &[(s, 1), (v[!vote as usize][q], 1)],
                    &[(s, 1), (v[vote as usize][q], 1)],
                )?;
            }
        }
    }
    for (voters, vote) in [(&right.yes, true), (&right.no, false)] {
        for &s in voters.iter() {
            for q in 0..2 {
                nb.rxn(
                    &[(s, 1), (v[q][!vote as usize], 1)],
                    &[(s, 1), (v[q][vote as usize], 1)],
                )?;
            }
        }
    }
    nb.context(v[left.initial as usize][right.initial as usize], 1);
    let decide = |l: bool, r: bool| match op {
        Op::And => l && r,
        Op::Or => l || r,
    };
    let (mut yes, mut no) = (Vec::new(), Vec::new());
    for l in [false, true] {
        for r in [false, true] {
            let s = v[l as usize][r as usize];
            if decide(l, r) {
                yes.push(s);
            } else {
                no.push(s);
            }
        }
    }
    Ok(Voters {
        yes,
        no,
        initial: decide(left.initial, right.initial),
    })
}

pub(crate) fn expr(
    nb: &mut NetBuilder,
    ns: &Namespace,
    e: &PredicateExpr,
    inputs: &[SpeciesId],
) -> Result<Voters, CompileError> {
    match e {
        PredicateExpr::Mod(a) => mod_atom(nb, ns, a, inputs),
        PredicateExpr::Threshold(a) => threshold_atom(nb, ns, a, inputs),
        PredicateExpr::Not(inner) => {
            let v = expr(nb, ns, inner, inputs)?;
            Ok(Voters {
                yes: v.no,
                no: v.yes,
                initial: !v.initial,
            })
        }
        PredicateExpr::And(a, b) => binary(nb, ns, Op::And, a, b, inputs),
        PredicateExpr::Or(a, b) => binary(nb, ns, Op::Or, a, b, inputs),
    }
}

/// Compiles a predicate into a single-voting decider.
pub fn compile_predicate(p: &Predicate) -> Result<CompiledCrd, CompileError> {
    let mut nb = NetBuilder::new(p.vars())?;
    let inputs = nb.inputs();
    let v = expr(&mut nb, &Namespace::root(), p.expr(), &inputs)?;
    Ok(CompiledCrd {
        crd: nb.finish_crd(v.yes, v.no)?,
        voter_kind: VoterKind::SingleVoting,
        namespace: Namespace::root(),
    })
}

pub fn compile_mod(vars: &[String], atom: &ModAtom) -> Result<CompiledCrd, CompileError> {
    compile_predicate(&Predicate::new(vars.to_vec(), PredicateExpr::Mod(atom.clone()))?)
}

pub fn compile_threshold(vars: &[String], atom: &ThresholdAtom) -> Result<CompiledCrd, CompileError> {
    compile_predicate(&Predicate::new(vars.to_vec(), PredicateExpr::Threshold(atom.clone()))?)
}

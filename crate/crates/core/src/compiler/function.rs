//! Computers for affine pieces (diff-representation) and for piecewise
//! functions assembled from them.

use super::predicate::expr;
use super::{CompileError, CompiledCrc, Namespace, NetBuilder};
use crate::crn::{OutputSpec, SpeciesId};
use crate::semilinear::{AffinePiece, PiecewiseFn};

/// `D_1 .. D_{d-1}` with the given superscript; `D_m` holds `m` units.
fn ladder(nb: &mut NetBuilder, ns: &Namespace, d: u64, sup: char) -> Result<Vec<SpeciesId>, CompileError> {
    (1..d).map(|m| nb.internal(ns, &format!("D_{m}^{sup}"))).collect()
}

/// Two rungs combine; every `d` units leave as one output molecule.
fn division(nb: &mut NetBuilder, rungs: &[SpeciesId], d: u64, out: SpeciesId) -> Result<(), CompileError> {
    let rung = |m: u64| rungs[(m - 1) as usize];
    for m in 1..d {
        for p in m..d {
            let s = m + p;
            let reactants = [(rung(m), 1), (rung(p), 1)];
            if s < d {
                nb.rxn(&reactants, &[(rung(s), 1)])?;
            } else if s == d {
                nb.rxn(&reactants, &[(out, 1)])?;
            } else {
                nb.rxn(&reactants, &[(rung(s - d), 1), (out, 1)])?;
            }
        }
    }
    Ok(())
}

/// Emits the diff-representation network of `piece` inside `ns` and
/// returns its `(Y^P, Y^C)` species.
pub(crate) fn affine(
    nb: &mut NetBuilder,
    ns: &Namespace,
    piece: &AffinePiece,
    inputs: &[SpeciesId],
) -> Result<(SpeciesId, SpeciesId), CompileError> {
    let yp = nb.internal(ns, "Y^P")?;
    let yc = nb.internal(ns, "Y^C")?;
    nb.context(yp, piece.offset());
    let d = piece.divisor();
    let ns_has = |pos: bool| piece.numerators().iter().any(|&n| if pos { n > 0 } else { n < 0 });
    let dp = if d > 1 && ns_has(true) { ladder(nb, ns, d, 'P')? } else { Vec::new() };
    let dc = if d > 1 && ns_has(false) { ladder(nb, ns, d, 'C')? } else { Vec::new() };
    let vars = nb.vars().to_vec();
    for (i, &x) in inputs.iter().enumerate() {
        let var = &vars[i];
        let c = piece.shifts()[i];
        let xp = nb.internal(ns, &format!("{var}'"))?;
        if c == 0 {
            nb.rxn(&[(x, 1)], &[(xp, 1)])?;
        } else {
            // xs[m - 1] holds m copies of the input; the input itself is the first.
            let mut xs = vec![x];
            for m in 2..=c {
                xs.push(nb.internal(ns, &format!("{var}_{m}"))?);
            }
            let at = |m: u64| xs[(m - 1) as usize];
            for m in 1..=c {
                for p in m..=c {
                    let reactants = [(at(m), 1), (at(p), 1)];
                    if m + p <= c {
                        nb.rxn(&reactants, &[(at(m + p), 1)])?;
                    } else {
                        nb.rxn(&reactants, &[(at(c), 1), (xp, m + p - c)])?;
                    }
                }
            }
        }
        let n = piece.numerators()[i];
        let target = |pos: bool| match (d, pos) {
            (1, true) => yp,
            (1, false) => yc,
            (_, true) => dp[0],
            (_, false) => dc[0],
        };
        match n {
            0 => nb.rxn(&[(xp, 1)], &[])?,
            k if k > 0 => nb.rxn(&[(xp, 1)], &[(target(true), k as u64)])?,
            k => nb.rxn(&[(xp, 1)], &[(target(false), k.unsigned_abs())])?,
        }
    }
    if !dp.is_empty() {
        division(nb, &dp, d, yp)?;
    }
    if !dc.is_empty() {
        division(nb, &dc, d, yc)?;
    }
    Ok((yp, yc))
}

/// Compiles one affine piece into a computer whose output is `#Y^P - #Y^C`.
/// Only inputs inside the piece's domain are meaningful.
pub fn compile_affine(vars: &[String], piece: &AffinePiece) -> Result<CompiledCrc, CompileError> {
    let mut nb = NetBuilder::new(vars)?;
    let inputs = nb.inputs();
    let (yp, yc) = affine(&mut nb, &Namespace::root(), piece, &inputs)?;
    Ok(CompiledCrc {
        crc: nb.finish_crc(OutputSpec::Diff {
            positive: yp,
            negative: yc,
        })?,
        namespace: Namespace::root(),
    })
}

/// Compiles a piecewise function. Each piece runs its affine network (in
/// namespace `f<i>`) and its domain decider (in `d<i>`) on a private copy
/// of the input; the domain's vote gates whether the piece's output is
/// released as `Y` or withdrawn.
///
/// The decomposition is validated on `{0..=grid_bound}^d` first.
pub fn compile_function(f: &PiecewiseFn, grid_bound: u64) -> Result<CompiledCrc, CompileError> {
    let violations = f.validate(grid_bound);
    if !violations.is_empty() {
        return Err(CompileError::InvalidDecomposition(violations));
    }
    let mut nb = NetBuilder::new(f.vars())?;
    let root = Namespace::root();
    let inputs = nb.inputs();
    let mut copies = Vec::new();
    for i in 0..f.pieces().len() {
        let fi = nb.input_copies(&root.child(&format!("f{i}")))?;
        let di = nb.input_copies(&root.child(&format!("d{i}")))?;
        copies.push((fi, di));
    }
    for (j, &x) in inputs.iter().enumerate() {
        let products: Vec<(SpeciesId, u64)> = copies
            .iter()
            .flat_map(|(fi, di)| [(fi[j], 1), (di[j], 1)])
            .collect();
        nb.rxn(&[(x, 1)], &products)?;
    }
    let y = nb.internal(&root, "Y")?;
    let k = nb.internal(&root, "K")?;
    for (i, (piece, (fi, di))) in f.pieces().iter().zip(&copies).enumerate() {
        let (hat_p, hat_c) = affine(&mut nb, &root.child(&format!("f{i}")), piece, fi)?;
        let voters = expr(&mut nb, &root.child(&format!("d{i}")), piece.domain(), di)?;
        let yip = nb.internal(&root, &format!("Y_{i}^P"))?;
        let yic = nb.internal(&root, &format!("Y_{i}^C"))?;
        let mi = nb.internal(&root, &format!("M_{i}"))?;
        for &l in &voters.yes {
            nb.rxn(&[(l, 1), (hat_p, 1)], &[(l, 1), (yip, 1), (y, 1)])?;
        }
        for &l in &voters.no {
            nb.rxn(&[(l, 1), (yip, 1)], &[(l, 1), (mi, 1)])?;
        }
        nb.rxn(&[(mi, 1), (y, 1)], &[(hat_p, 1)])?;
        for &l in &voters.yes {
            nb.rxn(&[(l, 1), (hat_c, 1)], &[(l, 1), (yic, 1)])?;
        }
        for &l in &voters.no {
            nb.rxn(&[(l, 1), (yic, 1)], &[(l, 1), (hat_c, 1)])?;
        }
        nb.rxn(&[(yip, 1), (yic, 1)], &[(k, 1)])?;
    }
    nb.rxn(&[(k, 1), (y, 1)], &[])?;
    Ok(CompiledCrc {
        crc: nb.finish_crc(OutputSpec::Single(y))?,
        namespace: root,
    })
}

//! Semilinear predicates and piecewise-affine functions, with direct
//! evaluators used as ground truth by the verifier.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("expected {expected} input values, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(i64),
    #[error("divisor must be positive, got {0}")]
    InvalidDivisor(i64),
    #[error("negative offset {0}")]
    NegativeOffset(i64),
    #[error("negative shift {shift} for `{var}`")]
    NegativeShift { var: String, shift: i64 },
    #[error("at least one variable must be declared")]
    NoVariables,
    #[error("function has no pieces")]
    NoPieces,
    #[error("no piece covers {0:?}")]
    NoPiece(Vec<u64>),
    #[error("pieces {pieces:?} all cover {point:?}")]
    MultiplePieces { point: Vec<u64>, pieces: Vec<usize> },
    #[error("piece value at {0:?} is not an integer")]
    NonIntegerResult(Vec<u64>),
    #[error("piece value at {0:?} is negative")]
    NegativeResult(Vec<u64>),
    #[error("input {point:?} lies below the shift of variable {var}")]
    BelowShift { point: Vec<u64>, var: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

/// `w·x ≤ c`, remembering whether it was written as `≥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdAtom {
    weights: Vec<i64>,
    bound: i64,
    sense: Sense,
}

impl ThresholdAtom {
    /// `w·x ≤ c`.
    pub fn le(weights: Vec<i64>, c: i64) -> Self {
        ThresholdAtom {
            weights,
            bound: c,
            sense: Sense::Le,
        }
    }

    /// `w·x ≥ t`, stored as `(-w)·x ≤ -t`.
    pub fn ge(weights: Vec<i64>, t: i64) -> Self {
        ThresholdAtom {
            weights: weights.iter().map(|w| -w).collect(),
            bound: -t,
            sense: Sense::Ge,
        }
    }

    /// Normalized weights and bound of `w·x ≤ c`.
    pub fn le_form(&self) -> (&[i64], i64) {
        (&self.weights, self.bound)
    }

    /// Equivalent `w·x ≥ t`.
    pub fn ge_form(&self) -> (Vec<i64>, i64) {
        (self.weights.iter().map(|w| -w).collect(), -self.bound)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, x: &[u64]) -> bool {
        dot(&self.weights, x) <= self.bound as i128
    }
}

/// `w·x ≡ c (mod m)` with weights and residue reduced mod `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModAtom {
    weights: Vec<u64>,
    residue: u64,
    modulus: u64,
}

impl ModAtom {
    pub fn new(weights: Vec<i64>, residue: i64, modulus: i64) -> Result<Self, SpecError> {
        if modulus < 2 {
            return Err(SpecError::InvalidModulus(modulus));
        }
        Ok(ModAtom {
            weights: weights.iter().map(|w| w.rem_euclid(modulus) as u64).collect(),
            residue: residue.rem_euclid(modulus) as u64,
            modulus: modulus as u64,
        })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, x: &[u64]) -> bool {
        let m = self.modulus as u128;
        let sum = self
            .weights
            .iter()
            .zip(x)
            .fold(0u128, |acc, (&w, &xi)| (acc + (w as u128) * (xi as u128 % m)) % m);
        sum == self.residue as u128
    }
}

fn dot(w: &[i64], x: &[u64]) -> i128 {
    w.iter().zip(x).map(|(&w, &x)| w as i128 * x as i128).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredicateExpr {
    Threshold(ThresholdAtom),
    Mod(ModAtom),
    Not(Box<PredicateExpr>),
    And(Box<PredicateExpr>, Box<PredicateExpr>),
    Or(Box<PredicateExpr>, Box<PredicateExpr>),
}

impl PredicateExpr {
    pub fn not(e: PredicateExpr) -> Self {
        PredicateExpr::Not(Box::new(e))
    }

    pub fn and(a: PredicateExpr, b: PredicateExpr) -> Self {
        PredicateExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PredicateExpr, b: PredicateExpr) -> Self {
        PredicateExpr::Or(Box::new(a), Box::new(b))
    }

    /// Evaluates against a vector already checked for dimension.
    pub fn eval(&self, x: &[u64]) -> bool {
        match self {
            PredicateExpr::Threshold(a) => a.eval(x),
            PredicateExpr::Mod(a) => a.eval(x),
            PredicateExpr::Not(e) => !e.eval(x),
            PredicateExpr::And(a, b) => a.eval(x) && b.eval(x),
            PredicateExpr::Or(a, b) => a.eval(x) || b.eval(x),
        }
    }

    fn check_dim(&self, d: usize) -> Result<(), SpecError> {
        let found = match self {
            PredicateExpr::Threshold(a) => a.dim(),
            PredicateExpr::Mod(a) => a.dim(),
            PredicateExpr::Not(e) => return e.check_dim(d),
            PredicateExpr::And(a, b) | PredicateExpr::Or(a, b) => {
                a.check_dim(d)?;
                return b.check_dim(d);
            }
        };
        if found != d {
            return Err(SpecError::DimensionMismatch { expected: d, found });
        }
        Ok(())
    }
}

fn check_input(vars: &[String], x: &[u64]) -> Result<(), SpecError> {
    if x.len() != vars.len() {
        return Err(SpecError::DimensionMismatch {
            expected: vars.len(),
            found: x.len(),
        });
    }
    Ok(())
}

/// A predicate over named, ordered input variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    vars: Vec<String>,
    expr: PredicateExpr,
}

impl Predicate {
    pub fn new(vars: Vec<String>, expr: PredicateExpr) -> Result<Self, SpecError> {
        if vars.is_empty() {
            return Err(SpecError::NoVariables);
        }
        expr.check_dim(vars.len())?;
        Ok(Predicate { vars, expr })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn expr(&self) -> &PredicateExpr {
        &self.expr
    }

    pub fn eval(&self, x: &[u64]) -> Result<bool, SpecError> {
        check_input(&self.vars, x)?;
        Ok(self.expr.eval(x))
    }

    /// The same predicate with the expression replaced.
    pub fn with_expr(&self, expr: PredicateExpr) -> Result<Self, SpecError> {
        Predicate::new(self.vars.clone(), expr)
    }
}

/// `f(x) = b + (1/d) Σ n_i (x_i - c_i)` on `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    domain: PredicateExpr,
    offset: u64,
    divisor: u64,
    numerators: Vec<i64>,
    shifts: Vec<u64>,
}

impl AffinePiece {
    pub fn new(
        domain: PredicateExpr,
        offset: u64,
        divisor: u64,
        numerators: Vec<i64>,
        shifts: Vec<u64>,
    ) -> Result<Self, SpecError> {
        if divisor == 0 {
            return Err(SpecError::InvalidDivisor(0));
        }
        if numerators.len() != shifts.len() {
            return Err(SpecError::DimensionMismatch {
                expected: numerators.len(),
                found: shifts.len(),
            });
        }
        domain.check_dim(numerators.len())?;
        Ok(AffinePiece {
            domain,
            offset,
            divisor,
            numerators,
            shifts,
        })
    }

    pub fn domain(&self) -> &PredicateExpr {
        &self.domain
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn divisor(&self) -> u64 {
        self.divisor
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.domain.eval(x)
    }

    /// Positive and negative unit totals `(Σ n_i⁺ (x_i - c_i), Σ n_i⁻ (x_i - c_i))`.
    fn units(&self, x: &[u64]) -> Result<(i128, i128), SpecError> {
        let (mut pos, mut neg) = (0i128, 0i128);
        for (i, ((&n, &c), &xi)) in self.numerators.iter().zip(&self.shifts).zip(x).enumerate() {
            if xi < c {
                return Err(SpecError::BelowShift {
                    point: x.to_vec(),
                    var: i,
                });
            }
            let t = n as i128 * (xi - c) as i128;
            if n > 0 {
                pos += t;
            } else {
                neg -= t;
            }
        }
        Ok((pos, neg))
    }

    /// The piece value, ignoring the domain.
    ///
    /// When `d` does not divide the unit total but all numerators are
    /// nonnegative, the value is `b + ⌊P/d⌋`, which is what the division
    /// ladder of the compiled network produces.
    pub fn value(&self, x: &[u64]) -> Result<u64, SpecError> {
        let (pos, neg) = self.units(x)?;
        let d = self.divisor as i128;
        let b = self.offset as i128;
        let diff = pos - neg;
        let v = if diff.rem_euclid(d) == 0 {
            b + diff / d
        } else if neg == 0 {
            b + pos / d
        } else {
            return Err(SpecError::NonIntegerResult(x.to_vec()));
        };
        u64::try_from(v).map_err(|_| SpecError::NegativeResult(x.to_vec()))
    }
}

/// A piece of `f` covering a point it should not, or a point no piece covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Uncovered(Vec<u64>),
    Overlap { point: Vec<u64>, pieces: Vec<usize> },
    BadValue(SpecError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseFn {
    vars: Vec<String>,
    pieces: Vec<AffinePiece>,
}

impl PiecewiseFn {
    pub fn new(vars: Vec<String>, pieces: Vec<AffinePiece>) -> Result<Self, SpecError> {
        if vars.is_empty() {
            return Err(SpecError::NoVariables);
        }
        if pieces.is_empty() {
            return Err(SpecError::NoPieces);
        }
        for p in &pieces {
            if p.dim() != vars.len() {
                return Err(SpecError::DimensionMismatch {
                    expected: vars.len(),
                    found: p.dim(),
                });
            }
        }
        Ok(PiecewiseFn { vars, pieces })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn covering(&self, x: &[u64]) -> Vec<usize> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(x))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn eval(&self, x: &[u64]) -> Result<u64, SpecError> {
        check_input(&self.vars, x)?;
        let covering = self.covering(x);
        match covering.as_slice() {
            [] => Err(SpecError::NoPiece(x.to_vec())),
            [i] => self.pieces[*i].value(x),
            _ => Err(SpecError::MultiplePieces {
                point: x.to_vec(),
                pieces: covering,
            }),
        }
    }

    /// Every point of `{0..=bound}^d` covered by zero or several pieces.
    pub fn check_disjoint(&self, bound: u64) -> Vec<Violation> {
        grid(self.vars.len(), bound)
            .filter_map(|x| {
                let covering = self.covering(&x);
                match covering.len() {
                    0 => Some(Violation::Uncovered(x)),
                    1 => None,
                    _ => Some(Violation::Overlap {
                        point: x,
                        pieces: covering,
                    }),
                }
            })
            .collect()
    }

    /// Coverage violations plus piece values that are negative, non-integer
    /// or evaluated below a shift, over `{0..=bound}^d`.
    pub fn validate(&self, bound: u64) -> Vec<Violation> {
        let mut out = self.check_disjoint(bound);
        for x in grid(self.vars.len(), bound) {
            for p in self.pieces.iter().filter(|p| p.contains(&x)) {
                if let Err(e) = p.value(&x) {
                    out.push(Violation::BadValue(e));
                }
            }
        }
        out
    }
}

/// All points of `{0..=bound}^d` in lexicographic order.
pub fn grid(d: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut next = Some(vec![0u64; d]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for i in (0..d).rev() {
            if succ[i] < bound {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncovered(x) => write!(f, "{x:?} is not covered by any piece"),
            Violation::Overlap { point, pieces } => write!(f, "{point:?} is covered by pieces {pieces:?}"),
            Violation::BadValue(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn parity() -> PredicateExpr {
        PredicateExpr::Mod(ModAtom::new(vec![1], 1, 2).unwrap())
    }

    fn min_fn() -> PiecewiseFn {
        let le = PredicateExpr::Threshold(ThresholdAtom::le(vec![1, -1], 0));
        let gt = PredicateExpr::Threshold(ThresholdAtom::ge(vec![1, -1], 1));
        PiecewiseFn::new(
            vars(&["X1", "X2"]),
            vec![
                AffinePiece::new(le, 0, 1, vec![1, 0], vec![0, 0]).unwrap(),
                AffinePiece::new(gt, 0, 1, vec![0, 1], vec![0, 0]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn predicate_examples() {
        let p = Predicate::new(vars(&["X"]), parity()).unwrap();
        assert_eq!(p.eval(&[5]), Ok(true));
        let maj = Predicate::new(
            vars(&["X1", "X2"]),
            PredicateExpr::Threshold(ThresholdAtom::ge(vec![1, -1], 0)),
        )
        .unwrap();
        assert_eq!(maj.eval(&[2, 3]), Ok(false));
        let both = Predicate::new(
            vars(&["X"]),
            PredicateExpr::and(parity(), PredicateExpr::Threshold(ThresholdAtom::ge(vec![1], 4))),
        )
        .unwrap();
        assert_eq!(both.eval(&[5]), Ok(true));
        assert!(matches!(p.eval(&[1, 2]), Err(SpecError::DimensionMismatch { .. })));
    }

    #[test]
    fn threshold_normal_form() {
        let a = ThresholdAtom::ge(vec![2, -3], 4);
        assert_eq!(a.le_form(), (&[-2i64, 3][..], -4));
        assert_eq!(a.ge_form(), (vec![2, -3], 4));
        assert!(a.eval(&[2, 0]));
        assert!(!a.eval(&[1, 0]));
    }

    #[test]
    fn mod_atom_reduces() {
        let a = ModAtom::new(vec![5, -1], 7, 3).unwrap();
        assert_eq!(a.weights(), &[2, 2]);
        assert_eq!(a.residue(), 1);
        assert!(matches!(ModAtom::new(vec![1], 0, 1), Err(SpecError::InvalidModulus(1))));
    }

    #[test]
    fn function_examples() {
        assert_eq!(min_fn().eval(&[3, 5]), Ok(3));
        assert_eq!(min_fn().eval(&[6, 2]), Ok(2));

        let all = PredicateExpr::Threshold(ThresholdAtom::ge(vec![1], 0));
        let half = PiecewiseFn::new(
            vars(&["X"]),
            vec![AffinePiece::new(all.clone(), 0, 2, vec![1], vec![0]).unwrap()],
        )
        .unwrap();
        assert_eq!(half.eval(&[7]), Ok(3));

        let overlap = PiecewiseFn::new(
            vars(&["X"]),
            vec![
                AffinePiece::new(all.clone(), 0, 1, vec![1], vec![0]).unwrap(),
                AffinePiece::new(all, 1, 1, vec![0], vec![0]).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(overlap.eval(&[2]), Err(SpecError::MultiplePieces { .. })));
    }

    #[test]
    fn value_errors() {
        let all = PredicateExpr::Threshold(ThresholdAtom::ge(vec![1, 0], 0));
        let p = AffinePiece::new(all.clone(), 0, 2, vec![1, -1], vec![0, 0]).unwrap();
        assert_eq!(p.value(&[3, 1]), Ok(1));
        assert_eq!(p.value(&[3, 0]), Ok(1));
        assert!(matches!(p.value(&[4, 1]), Err(SpecError::NonIntegerResult(_))));
        assert!(matches!(p.value(&[0, 2]), Err(SpecError::NegativeResult(_))));
        let shifted = AffinePiece::new(all, 0, 1, vec![1, 0], vec![1, 0]).unwrap();
        assert!(matches!(shifted.value(&[0, 0]), Err(SpecError::BelowShift { var: 0, .. })));
    }

    fn one_var(pieces: Vec<(PredicateExpr, u64)>) -> PiecewiseFn {
        PiecewiseFn::new(
            vars(&["X"]),
            pieces
                .into_iter()
                .map(|(d, b)| AffinePiece::new(d, b, 1, vec![0], vec![0]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn check_disjoint_examples() {
        // Brute-force oracle for min: count covering pieces directly from the inequalities.
        let min = min_fn();
        for x1 in 0..=10u64 {
            for x2 in 0..=10u64 {
                let hits = usize::from(x1 <= x2) + usize::from(x1 > x2);
                assert_eq!(hits, 1);
            }
        }
        assert!(min.check_disjoint(10).is_empty());

        let le5 = PredicateExpr::Threshold(ThresholdAtom::le(vec![1], 5));
        let ge5 = PredicateExpr::Threshold(ThresholdAtom::ge(vec![1], 5));
        let f = one_var(vec![(le5, 0), (ge5, 1)]);
        assert_eq!(
            f.check_disjoint(10),
            vec![Violation::Overlap {
                point: vec![5],
                pieces: vec![0, 1]
            }]
        );

        let le3 = PredicateExpr::Threshold(ThresholdAtom::le(vec![1], 3));
        let g = one_var(vec![(le3, 0)]);
        let expected: Vec<Violation> = (4..=10).map(|x| Violation::Uncovered(vec![x])).collect();
        assert_eq!(g.check_disjoint(10), expected);
    }

    #[test]
    fn grid_enumerates_lexicographically() {
        let pts: Vec<Vec<u64>> = grid(2, 1).collect();
        assert_eq!(pts, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(grid(3, 4).count(), 125);
        assert_eq!(grid(0, 4).count(), 1);
    }

    fn atom() -> impl Strategy<Value = PredicateExpr> {
        prop_oneof![
            (proptest::collection::vec(-3i64..4, 2), -5i64..6, any::<bool>()).prop_map(|(w, c, ge)| {
                PredicateExpr::Threshold(if ge {
                    ThresholdAtom::ge(w, c)
                } else {
                    ThresholdAtom::le(w, c)
                })
            }),
            (proptest::collection::vec(0i64..5, 2), 0i64..5, 2i64..5)
                .prop_map(|(w, c, m)| PredicateExpr::Mod(ModAtom::new(w, c, m).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn de_morgan(a in atom(), b in atom(), x in proptest::collection::vec(0u64..12, 2)) {
            let lhs = PredicateExpr::not(PredicateExpr::and(a.clone(), b.clone()));
            let rhs = PredicateExpr::or(PredicateExpr::not(a), PredicateExpr::not(b));
            prop_assert_eq!(lhs.eval(&x), rhs.eval(&x));
        }

        #[test]
        fn mod_atoms_are_periodic(w in proptest::collection::vec(-6i64..7, 2), c in 0i64..9, m in 2i64..7,
                                  x in proptest::collection::vec(0u64..20, 2), i in 0usize..2) {
            let a = ModAtom::new(w, c, m).unwrap();
            let mut y = x.clone();
            y[i] += m as u64;
            prop_assert_eq!(a.eval(&x), a.eval(&y));
        }

        #[test]
        fn integer_and_rational_evaluation_agree(b in 0u64..10, d in 1u64..5, n in proptest::collection::vec(-4i64..5, 2),
                                                 c in proptest::collection::vec(0u64..3, 2),
                                                 x in proptest::collection::vec(0u64..15, 2)) {
            let all = PredicateExpr::Threshold(ThresholdAtom::ge(vec![0, 0], 0));
            let p = AffinePiece::new(all, b, d, n.clone(), c.clone()).unwrap();
            let mut exact = BigRational::from_integer(b.into());
            for i in 0..2 {
                if x[i] < c[i] {
                    return Ok(());
                }
                exact += BigRational::new((n[i] * (x[i] - c[i]) as i64).into(), (d as i64).into());
            }
            match p.value(&x) {
                Ok(v) if exact.is_integer() => prop_assert_eq!(Some(v), exact.to_integer().to_u64()),
                Ok(_) => prop_assert!((0..2).all(|i| n[i] >= 0 || x[i] == c[i])),
                Err(SpecError::NegativeResult(_)) => prop_assert!(exact < BigRational::from_integer(0.into())),
                Err(SpecError::NonIntegerResult(_)) => prop_assert!(!exact.is_integer()),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}

//! S-expression specifications of predicates and piecewise-affine functions.
//!
//! ```text
//! (vars X1 X2)
//! (and (mod ((1 X1)) 1 2) (ge ((1 X1) (-1 X2)) 0))
//! ```
//!
//! Atoms are `(ge WEIGHTS t)`, `(le WEIGHTS c)`, `(gt ..)`, `(lt ..)` and
//! `(mod WEIGHTS c m)` where `WEIGHTS` is a list of `(w X)` pairs. Functions
//! are `(fn PIECE ...)` with `PIECE = (piece DOMAIN (offset b) (divisor d)
//! (coef (n X) ...) (shift (c X) ...))`; offset defaults to 0, divisor to 1.
//! Without a `(vars ..)` header variables are ordered by first appearance.
//! `;` starts a comment.

use super::ParseError;
use crate::semilinear::{AffinePiece, ModAtom, PiecewiseFn, Predicate, PredicateExpr, Sense, ThresholdAtom};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecDocument {
    Predicate(Predicate),
    Function(PiecewiseFn),
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.pos();
        ParseError::new(line, col, message)
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    fn list(&self) -> Result<&[Sexp], ParseError> {
        match self {
            Sexp::List { items, .. } => Ok(items),
            Sexp::Atom { text, .. } => Err(self.err(format!("expected a list, found `{text}`"))),
        }
    }

    /// The head symbol and arguments of `(head args...)`.
    fn form(&self) -> Result<(&str, &[Sexp]), ParseError> {
        let items = self.list()?;
        match items.split_first() {
            Some((head, rest)) => match head.atom() {
                Some(h) => Ok((h, rest)),
                None => Err(head.err("expected a keyword")),
            },
            None => Err(self.err("empty form")),
        }
    }

    fn int(&self) -> Result<i64, ParseError> {
        let text = self.atom().ok_or_else(|| self.err("expected an integer"))?;
        text.parse()
            .map_err(|_| self.err(format!("expected an integer, found `{text}`")))
    }
}

fn tokenize(text: &str) -> Result<Vec<Sexp>, ParseError> {
    // Each stack entry is an open list with its starting position.
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = vec![(Vec::new(), 0, 0)];
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let content = raw.split(';').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '(' => stack.push((Vec::new(), line, i + 1)),
                ')' => {
                    if stack.len() == 1 {
                        return Err(ParseError::new(line, i + 1, "unbalanced `)`"));
                    }
                    let (items, l, col) = stack.pop().expect("non-empty");
                    stack
                        .last_mut()
                        .expect("root")
                        .0
                        .push(Sexp::List { items, line: l, col });
                }
                c if c.is_whitespace() => {}
                _ => {
                    let start = i;
                    while i + 1 < chars.len() && !chars[i + 1].is_whitespace() && !matches!(chars[i + 1], '(' | ')') {
                        i += 1;
                    }
                    let text: String = chars[start..=i].iter().collect();
                    stack.last_mut().expect("root").0.push(Sexp::Atom {
                        text,
                        line,
                        col: start + 1,
                    });
                }
            }
            i += 1;
        }
    }
    if stack.len() > 1 {
        let (_, line, col) = stack.pop().expect("non-empty");
        return Err(ParseError::new(line, col, "unclosed `(`"));
    }
    Ok(stack.pop().expect("root").0)
}

fn is_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\''))
}

fn var_name(e: &Sexp) -> Result<&str, ParseError> {
    match e.atom() {
        Some(name) if is_var_name(name) => Ok(name),
        _ => Err(e.err("expected a variable name")),
    }
}

struct Vars {
    names: Vec<String>,
    declared: bool,
}

impl Vars {
    fn index(&mut self, e: &Sexp) -> Result<usize, ParseError> {
        let name = var_name(e)?;
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(i);
        }
        if self.declared {
            return Err(e.err(format!("undeclared variable `{name}`")));
        }
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }

    /// Parses `((k X) ...)` into sparse `(index, k)` pairs.
    fn pairs(&mut self, e: &Sexp) -> Result<Vec<(usize, i64)>, ParseError> {
        let mut out = Vec::new();
        for pair in e.list()? {
            match pair.list()? {
                [k, x] => out.push((self.index(x)?, k.int()?)),
                _ => return Err(pair.err("expected `(coefficient variable)`")),
            }
        }
        Ok(out)
    }
}

fn dense(pairs: &[(usize, i64)], d: usize) -> Vec<i64> {
    let mut out = vec![0; d];
    for &(i, k) in pairs {
        out[i] += k;
    }
    out
}

/// Intermediate predicate whose atoms still hold sparse weights, so that
/// variables may be discovered while parsing.
enum Raw {
    Threshold { pairs: Vec<(usize, i64)>, bound: i64, ge: bool },
    Mod { pairs: Vec<(usize, i64)>, residue: i64, modulus: i64, at: Sexp },
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
}

fn raw_pred(e: &Sexp, vars: &mut Vars) -> Result<Raw, ParseError> {
    let (head, args) = e.form()?;
    let arity = |n: usize| -> Result<(), ParseError> {
        if args.len() != n {
            return Err(e.err(format!("`{head}` takes {n} arguments, found {}", args.len())));
        }
        Ok(())
    };
    match head {
        "ge" | "le" | "gt" | "lt" => {
            arity(2)?;
            let pairs = vars.pairs(&args[0])?;
            let t = args[1].int()?;
            let (bound, ge) = match head {
                "ge" => (t, true),
                "le" => (t, false),
                "gt" => (t.checked_add(1).ok_or_else(|| args[1].err("bound out of range"))?, true),
                _ => (t.checked_sub(1).ok_or_else(|| args[1].err("bound out of range"))?, false),
            };
            Ok(Raw::Threshold { pairs, bound, ge })
        }
        "mod" => {
            arity(3)?;
            Ok(Raw::Mod {
                pairs: vars.pairs(&args[0])?,
                residue: args[1].int()?,
                modulus: args[2].int()?,
                at: args[2].clone(),
            })
        }
        "not" => {
            arity(1)?;
            Ok(Raw::Not(Box::new(raw_pred(&args[0], vars)?)))
        }
        "and" | "or" => {
            if args.is_empty() {
                return Err(e.err(format!("`{head}` needs at least one argument")));
            }
            let mut acc = raw_pred(&args[0], vars)?;
            for a in &args[1..] {
                let next = Box::new(raw_pred(a, vars)?);
                acc = if head == "and" {
                    Raw::And(Box::new(acc), next)
                } else {
                    Raw::Or(Box::new(acc), next)
                };
            }
            Ok(acc)
        }
        other => Err(e.err(format!("unknown form `{other}`"))),
    }
}

fn lower(raw: Raw, d: usize) -> Result<PredicateExpr, ParseError> {
    Ok(match raw {
        Raw::Threshold { pairs, bound, ge } => {
            let w = dense(&pairs, d);
            PredicateExpr::Threshold(if ge {
                ThresholdAtom::ge(w, bound)
            } else {
                ThresholdAtom::le(w, bound)
            })
        }
        Raw::Mod {
            pairs,
            residue,
            modulus,
            at,
        } => PredicateExpr::Mod(ModAtom::new(dense(&pairs, d), residue, modulus).map_err(|e| at.err(e.to_string()))?),
        Raw::Not(a) => PredicateExpr::not(lower(*a, d)?),
        Raw::And(a, b) => PredicateExpr::and(lower(*a, d)?, lower(*b, d)?),
        Raw::Or(a, b) => PredicateExpr::or(lower(*a, d)?, lower(*b, d)?),
    })
}

struct RawPiece {
    domain: Raw,
    offset: i64,
    divisor: i64,
    coef: Vec<(usize, i64)>,
    shift: Vec<(usize, i64)>,
    at: Sexp,
}

fn raw_piece(e: &Sexp, vars: &mut Vars) -> Result<RawPiece, ParseError> {
    let (head, args) = e.form()?;
    if head != "piece" {
        return Err(e.err(format!("expected `piece`, found `{head}`")));
    }
    let Some((domain, fields)) = args.split_first() else {
        return Err(e.err("`piece` needs a domain"));
    };
    let mut piece = RawPiece {
        domain: raw_pred(domain, vars)?,
        offset: 0,
        divisor: 1,
        coef: Vec::new(),
        shift: Vec::new(),
        at: e.clone(),
    };
    for field in fields {
        let (key, vals) = field.form()?;
        let single = || match vals {
            [v] => v.int(),
            _ => Err(field.err(format!("`{key}` takes one integer"))),
        };
        match key {
            "offset" => piece.offset = single()?,
            "divisor" => piece.divisor = single()?,
            "coef" | "shift" => {
                let mut pairs = Vec::new();
                for pair in vals {
                    match pair.list()? {
                        [k, x] => pairs.push((vars.index(x)?, k.int()?)),
                        _ => return Err(pair.err("expected `(coefficient variable)`")),
                    }
                }
                if key == "coef" {
                    piece.coef.extend(pairs);
                } else {
                    piece.shift.extend(pairs);
                }
            }
            other => return Err(field.err(format!("unknown piece field `{other}`"))),
        }
    }
    Ok(piece)
}

fn lower_piece(p: RawPiece, d: usize) -> Result<AffinePiece, ParseError> {
    let err = |m: String| p.at.err(m);
    if p.offset < 0 {
        return Err(err(format!("negative offset {}", p.offset)));
    }
    if p.divisor < 1 {
        return Err(err(format!("divisor must be positive, got {}", p.divisor)));
    }
    let shifts = dense(&p.shift, d);
    if let Some(s) = shifts.iter().find(|&&s| s < 0) {
        return Err(err(format!("negative shift {s}")));
    }
    AffinePiece::new(
        lower(p.domain, d)?,
        p.offset as u64,
        p.divisor as u64,
        dense(&p.coef, d),
        shifts.iter().map(|&s| s as u64).collect(),
    )
    .map_err(|e| err(e.to_string()))
}

/// Parses a predicate or piecewise function.
pub fn parse_spec(text: &str) -> Result<SpecDocument, ParseError> {
    let forms = tokenize(text)?;
    let mut rest = &forms[..];
    let mut vars = Vars {
        names: Vec::new(),
        declared: false,
    };
    if let Some(first) = rest.first() {
        if let Ok(("vars", names)) = first.form() {
            for n in names {
                let name = var_name(n)?;
                if vars.names.iter().any(|v| v == name) {
                    return Err(n.err(format!("variable `{name}` declared twice")));
                }
                vars.names.push(name.to_string());
            }
            vars.declared = true;
            rest = &rest[1..];
        }
    }
    let body = match rest {
        [one] => one,
        [] => return Err(ParseError::new(1, 1, "empty specification")),
        [_, extra, ..] => return Err(extra.err("expected a single expression")),
    };
    if let Ok(("fn", pieces)) = body.form() {
        let raws = pieces
            .iter()
            .map(|p| raw_piece(p, &mut vars))
            .collect::<Result<Vec<_>, _>>()?;
        let d = vars.names.len();
        let pieces = raws
            .into_iter()
            .map(|p| lower_piece(p, d))
            .collect::<Result<Vec<_>, _>>()?;
        return PiecewiseFn::new(vars.names, pieces)
            .map(SpecDocument::Function)
            .map_err(|e| body.err(e.to_string()));
    }
    let raw = raw_pred(body, &mut vars)?;
    let expr = lower(raw, vars.names.len())?;
    Predicate::new(vars.names, expr)
        .map(SpecDocument::Predicate)
        .map_err(|e| body.err(e.to_string()))
}

fn weights<T: Copy + Into<i128>>(vars: &[String], w: &[T]) -> String {
    let items: Vec<String> = vars
        .iter()
        .zip(w)
        .filter(|(_, &k)| k.into() != 0)
        .map(|(x, &k)| format!("({} {x})", k.into()))
        .collect();
    format!("({})", items.join(" "))
}

fn expr_text(vars: &[String], e: &PredicateExpr) -> String {
    match e {
        PredicateExpr::Threshold(a) => match a.sense() {
            Sense::Ge => {
                let (w, t) = a.ge_form();
                format!("(ge {} {t})", weights(vars, &w))
            }
            Sense::Le => {
                let (w, c) = a.le_form();
                format!("(le {} {c})", weights(vars, w))
            }
        },
        PredicateExpr::Mod(a) => format!(
            "(mod {} {} {})",
            weights(vars, a.weights()),
            a.residue(),
            a.modulus()
        ),
        PredicateExpr::Not(a) => format!("(not {})", expr_text(vars, a)),
        PredicateExpr::And(a, b) => format!("(and {} {})", expr_text(vars, a), expr_text(vars, b)),
        PredicateExpr::Or(a, b) => format!("(or {} {})", expr_text(vars, a), expr_text(vars, b)),
    }
}

fn header(vars: &[String]) -> String {
    format!("(vars {})\n", vars.join(" "))
}

pub fn print_predicate(p: &Predicate) -> String {
    format!("{}{}\n", header(p.vars()), expr_text(p.vars(), p.expr()))
}

pub fn print_function(f: &PiecewiseFn) -> String {
    let mut out = header(f.vars());
    out.push_str("(fn\n");
    for p in f.pieces() {
        let pairs = |w: Vec<i128>| -> String {
            f.vars()
                .iter()
                .zip(w)
                .filter(|(_, k)| *k != 0)
                .map(|(x, k)| format!(" ({k} {x})"))
                .collect()
        };
        out.push_str(&format!(
            "  (piece {} (offset {}) (divisor {}) (coef{}) (shift{}))\n",
            expr_text(f.vars(), p.domain()),
            p.offset(),
            p.divisor(),
            pairs(p.numerators().iter().map(|&k| k as i128).collect()),
            pairs(p.shifts().iter().map(|&k| k as i128).collect()),
        ));
    }
    out.push_str(")\n");
    out
}

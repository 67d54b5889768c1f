//! The `.crn` network format.
//!
//! ```text
//! # parity, leader-driven
//! species: X, L_0, L_1
//! input: X
//! context: L_0
//! yes: L_1
//! no: L_0
//! rxn: X + L_0 -> L_1
//! rxn: X + L_1 -> L_0
//! ```
//!
//! `yes:`/`no:` make the file a decider, `output: Y` (or `output: Y^P - Y^C`)
//! a computer; with neither it is a bare network. Species are indexed in
//! order of first appearance. An empty reaction side is written `0` or `∅`.

use super::ParseError;
use crate::crn::{Configuration, Crc, Crd, Crn, CrnBuilder, CrnError, Multiset, OutputSpec, Reaction, SpeciesId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrnDocument {
    Crn(Crn),
    Crd(Crd),
    Crc(Crc),
}

impl CrnDocument {
    pub fn crn(&self) -> &Crn {
        match self {
            CrnDocument::Crn(c) => c,
            CrnDocument::Crd(d) => d.crn(),
            CrnDocument::Crc(c) => c.crn(),
        }
    }
}

fn col_of(line: &str, sub: &str) -> usize {
    let offset = (sub.as_ptr() as usize).saturating_sub(line.as_ptr() as usize);
    line[..offset.min(line.len())].chars().count() + 1
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, at: &str, message: impl Into<String>) -> ParseError {
        ParseError::new(self.no, col_of(self.text, at), message)
    }

    fn crn_err(&self, at: &str, e: CrnError) -> ParseError {
        self.err(at, e.to_string())
    }
}

#[derive(Default)]
struct Directives {
    species: bool,
    inputs: Option<(usize, Vec<SpeciesId>)>,
    context: Option<(usize, Vec<(SpeciesId, u64)>)>,
    yes: Option<(usize, Vec<SpeciesId>)>,
    no: Option<(usize, Vec<SpeciesId>)>,
    output: Option<(usize, OutputSpec)>,
}

/// Non-empty comma-separated items; a blank list is empty.
fn items(rest: &str) -> Vec<&str> {
    if rest.trim().is_empty() {
        return Vec::new();
    }
    rest.split(',').map(str::trim).collect()
}

fn name(line: &Line, b: &mut CrnBuilder, item: &str) -> Result<SpeciesId, ParseError> {
    if item.is_empty() {
        return Err(line.err(item, "expected a species name"));
    }
    b.species(item).map_err(|e| line.crn_err(item, e))
}

fn names(line: &Line, b: &mut CrnBuilder, rest: &str) -> Result<Vec<SpeciesId>, ParseError> {
    let mut out: Vec<SpeciesId> = Vec::new();
    for item in items(rest) {
        let id = name(line, b, item)?;
        if out.contains(&id) {
            return Err(line.err(item, format!("species `{item}` listed twice")));
        }
        out.push(id);
    }
    Ok(out)
}

/// `k S`, `kS` or `S`.
fn term(line: &Line, b: &mut CrnBuilder, item: &str) -> Result<(SpeciesId, u64), ParseError> {
    let digits = item.chars().take_while(char::is_ascii_digit).count();
    let (k, species) = if digits == 0 {
        (1, item)
    } else {
        let k: u64 = item[..digits]
            .parse()
            .map_err(|_| line.err(item, "coefficient out of range"))?;
        if k == 0 {
            return Err(line.err(item, "coefficient must be positive"));
        }
        (k, item[digits..].trim_start())
    };
    Ok((name(line, b, species)?, k))
}

fn side(line: &Line, b: &mut CrnBuilder, text: &str) -> Result<Multiset, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(line.err(text, "empty reaction side; write `0` for no species"));
    }
    if text == "0" || text == "∅" {
        return Ok(Multiset::default());
    }
    let mut pairs = Vec::new();
    for item in text.split('+').map(str::trim) {
        pairs.push(term(line, b, item)?);
    }
    Ok(Multiset::new(pairs))
}

fn reaction(line: &Line, b: &mut CrnBuilder, rest: &str) -> Result<Reaction, ParseError> {
    let arrows: Vec<(usize, &str)> = rest
        .match_indices("->")
        .chain(rest.match_indices('→'))
        .collect();
    let (at, arrow) = match arrows.as_slice() {
        [one] => *one,
        [] => return Err(line.err(rest, "expected `->`")),
        _ => return Err(line.err(arrows[1].1, "more than one arrow")),
    };
    let lhs = side(line, b, &rest[..at])?;
    let rhs = side(line, b, &rest[at + arrow.len()..])?;
    Reaction::new(lhs, rhs).map_err(|e| line.crn_err(rest.trim(), e))
}

fn once<T>(line: &Line, slot: &Option<T>, key: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(line.err(key, format!("`{key}` given twice")));
    }
    Ok(())
}

/// Parses a `.crn` document.
pub fn parse_crn(text: &str) -> Result<CrnDocument, ParseError> {
    let mut b = CrnBuilder::new();
    let mut d = Directives::default();
    for (i, raw) in text.lines().enumerate() {
        let line = Line { no: i + 1, text: raw };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, rest)) = content.split_once(':') else {
            return Err(line.err(content, "expected `directive: ...`"));
        };
        let key = key.trim();
        match key {
            "species" => {
                if d.species {
                    return Err(line.err(key, "`species` given twice"));
                }
                d.species = true;
                for item in items(rest) {
                    if item.is_empty() {
                        return Err(line.err(item, "expected a species name"));
                    }
                    b.declare(item).map_err(|e| line.crn_err(item, e))?;
                }
            }
            "input" => {
                once(&line, &d.inputs, key)?;
                d.inputs = Some((line.no, names(&line, &mut b, rest)?));
            }
            "yes" => {
                once(&line, &d.yes, key)?;
                d.yes = Some((line.no, names(&line, &mut b, rest)?));
            }
            "no" => {
                once(&line, &d.no, key)?;
                d.no = Some((line.no, names(&line, &mut b, rest)?));
            }
            "context" => {
                once(&line, &d.context, key)?;
                let mut terms = Vec::new();
                for item in items(rest) {
                    terms.push(term(&line, &mut b, item)?);
                }
                d.context = Some((line.no, terms));
            }
            "output" => {
                once(&line, &d.output, key)?;
                let spec = match rest.split_once('-') {
                    Some((p, n)) => OutputSpec::Diff {
                        positive: name(&line, &mut b, p.trim())?,
                        negative: name(&line, &mut b, n.trim())?,
                    },
                    None => OutputSpec::Single(name(&line, &mut b, rest.trim())?),
                };
                d.output = Some((line.no, spec));
            }
            "rxn" => {
                let r = reaction(&line, &mut b, rest)?;
                b.push(r);
            }
            other => return Err(line.err(key, format!("unknown directive `{other}`"))),
        }
    }
    assemble(b, d)
}

fn assemble(b: CrnBuilder, d: Directives) -> Result<CrnDocument, ParseError> {
    let crn = b.build();
    let at = |no: usize, e: CrnError| ParseError::new(no, 1, e.to_string());
    let voters = d.yes.is_some() || d.no.is_some();
    if voters {
        if let Some((no, _)) = d.output {
            return Err(ParseError::new(no, 1, "a file declares either voters or an output, not both"));
        }
    }
    if !voters && d.output.is_none() {
        if let Some((no, _)) = d.inputs.as_ref().map(|x| (x.0, ())).or(d.context.as_ref().map(|x| (x.0, ()))) {
            return Err(ParseError::new(no, 1, "`input`/`context` need `yes`/`no` voters or an `output`"));
        }
        return Ok(CrnDocument::Crn(crn));
    }
    let mut context = Configuration::zeros(crn.num_species());
    let context_line = d.context.as_ref().map_or(1, |c| c.0);
    for &(s, k) in d.context.as_ref().map_or(&[][..], |c| &c.1[..]) {
        context.add(s, k).map_err(|e| at(context_line, e))?;
    }
    let inputs = d.inputs.map(|x| x.1).unwrap_or_default();
    if voters {
        let line = d.no.as_ref().or(d.yes.as_ref()).map_or(1, |x| x.0);
        let yes = d.yes.map(|x| x.1).unwrap_or_default();
        let no = d.no.map(|x| x.1).unwrap_or_default();
        Crd::new(crn, inputs, yes, no, context)
            .map(CrnDocument::Crd)
            .map_err(|e| at(line, e))
    } else {
        let (line, output) = d.output.expect("checked above");
        Crc::new(crn, inputs, output, context)
            .map(CrnDocument::Crc)
            .map_err(|e| at(line, e))
    }
}

fn list(crn: &Crn, ids: &[SpeciesId]) -> String {
    ids.iter().map(|&s| crn.name(s)).collect::<Vec<_>>().join(", ")
}

fn context_line(crn: &Crn, c: &Configuration) -> String {
    c.support()
        .map(|s| match c.get(s) {
            1 => crn.name(s).to_string(),
            k => format!("{k} {}", crn.name(s)),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn push_line(out: &mut String, key: &str, value: &str) {
    out.push_str(key);
    out.push(':');
    if !value.is_empty() {
        out.push(' ');
        out.push_str(value);
    }
    out.push('\n');
}

/// Prints a document so that [`parse_crn`] reproduces it exactly.
pub fn print_crn(doc: &CrnDocument) -> String {
    let crn = doc.crn();
    let mut out = String::new();
    let all: Vec<SpeciesId> = (0..crn.num_species()).map(SpeciesId).collect();
    push_line(&mut out, "species", &list(crn, &all));
    match doc {
        CrnDocument::Crn(_) => {}
        CrnDocument::Crd(d) => {
            push_line(&mut out, "input", &list(crn, d.inputs()));
            push_line(&mut out, "context", &context_line(crn, d.context()));
            push_line(&mut out, "yes", &list(crn, d.yes_voters()));
            push_line(&mut out, "no", &list(crn, d.no_voters()));
        }
        CrnDocument::Crc(c) => {
            push_line(&mut out, "input", &list(crn, c.inputs()));
            push_line(&mut out, "context", &context_line(crn, c.context()));
            let output = match c.output() {
                OutputSpec::Single(y) => crn.name(y).to_string(),
                OutputSpec::Diff { positive, negative } => {
                    format!("{} - {}", crn.name(positive), crn.name(negative))
                }
            };
            push_line(&mut out, "output", &output);
        }
    }
    for r in crn.reactions() {
        push_line(&mut out, "rxn", &crn.describe_reaction(r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(text: &str) -> Crn {
        match parse_crn(text).unwrap() {
            CrnDocument::Crn(c) => c,
            other => panic!("expected a bare network, got {other:?}"),
        }
    }

    #[test]
    fn parse_examples() {
        let c = bare("rxn: X1 + X2 -> Y");
        assert_eq!(c.reactions().len(), 1);
        assert_eq!(c.num_species(), 3);

        let c = bare("rxn: 2 X -> Y");
        let x = c.species_id("X").unwrap();
        assert_eq!(c.reactions()[0].reactants().count(x), 2);

        let c = bare("rxn: Z + X2 -> X2 + X3 + Y");
        assert_eq!(c.describe_reaction(&c.reactions()[0]), "Z + X2 -> X2 + X3 + Y");
    }

    #[test]
    fn empty_sides_and_unicode() {
        let c = bare("rxn: X2 + Y → ∅\nrxn: 0 -> 2A");
        assert!(c.reactions()[0].products().is_empty());
        assert!(c.reactions()[1].reactants().is_empty());
        assert_eq!(c.describe_reaction(&c.reactions()[1]), "0 -> 2 A");
    }

    #[test]
    fn species_order_is_first_appearance() {
        let c = bare("species: C\nrxn: A + B -> C");
        let names: Vec<&str> = c.species().iter().map(|s| s.name()).collect();
        assert_eq!(names, ["C", "A", "B"]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_crn("# header\nrxn: A -> A").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("identical"));

        let e = parse_crn("rxn: A + 1B -> C\nrxn: A + -> C").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));

        let e = parse_crn("species: A, B, A").unwrap_err();
        assert_eq!((e.line, e.col), (1, 16));

        assert!(parse_crn("rxn: 0 -> 0").is_err());
        assert!(parse_crn("rxn: A -> B -> C").is_err());
        assert!(parse_crn("bogus: A").is_err());
        assert!(parse_crn("rxn A -> B").is_err());
        assert!(parse_crn("rxn: 0 A -> B").is_err());
        assert!(parse_crn("rxn: 1A -> B\nyes: A\noutput: B").is_err());
        assert!(parse_crn("rxn: A -> B\nyes: A\nno: A").is_err());
        assert!(parse_crn("rxn: A -> B\ninput: A\ncontext: A\nyes: B").is_err());
        assert!(parse_crn("rxn: A -> B\ninput: A").is_err());
        assert!(parse_crn("rxn: 1x -> _B").is_err());
    }

    #[test]
    fn decider_and_computer_round_trip() {
        let crd = "species: X, L_0, L_1\ninput: X\ncontext: L_0\nyes: L_1\nno: L_0\nrxn: X + L_0 -> L_1\nrxn: X + L_1 -> L_0\n";
        let doc = parse_crn(crd).unwrap();
        assert!(matches!(doc, CrnDocument::Crd(_)));
        assert_eq!(print_crn(&doc), crd);

        let crc = "input: X\ncontext: 3 Y^P\noutput: Y^P - Y^C\nrxn: X -> X'\nrxn: X' -> 2 Y^C\n";
        let doc = parse_crn(crc).unwrap();
        let CrnDocument::Crc(c) = &doc else { panic!() };
        assert!(matches!(c.output(), OutputSpec::Diff { .. }));
        assert_eq!(parse_crn(&print_crn(&doc)).unwrap(), doc);
    }
}

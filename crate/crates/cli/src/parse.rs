//! Small argument grammars: input ranges, molecule lists, weight lists.

use anyhow::{bail, Context, Result};

/// `0..8` (inclusive) or a single number, per dimension, separated by commas.
/// A single range applies to every dimension.
pub fn ranges(text: &str, dims: usize) -> Result<Vec<(u64, u64)>> {
    let parts: Vec<(u64, u64)> = text
        .split(',')
        .map(|p| {
            let p = p.trim();
            match p.split_once("..") {
                Some((lo, hi)) => {
                    let hi = hi.strip_prefix('=').unwrap_or(hi);
                    let lo: u64 = lo.trim().parse().with_context(|| format!("bad range start in `{p}`"))?;
                    let hi: u64 = hi.trim().parse().with_context(|| format!("bad range end in `{p}`"))?;
                    if lo > hi {
                        bail!("empty range `{p}`");
                    }
                    Ok((lo, hi))
                }
                None => {
                    let v: u64 = p.parse().with_context(|| format!("bad range `{p}`"))?;
                    Ok((v, v))
                }
            }
        })
        .collect::<Result<_>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; dims]),
        n if n == dims => Ok(parts),
        n => bail!("{n} ranges given for {dims} input variables"),
    }
}

/// Every point of the box, in lexicographic order.
pub fn points(ranges: &[(u64, u64)]) -> Vec<Vec<u64>> {
    ranges.iter().fold(vec![Vec::new()], |acc, &(lo, hi)| {
        acc.into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// `3 X1, 5 X2` or `X1` (count 1).
pub fn molecules(text: &str) -> Result<Vec<(String, u64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|term| {
            let mut words = term.split_whitespace();
            let first = words.next().expect("non-empty term");
            let (count, name) = match (first.parse::<u64>(), words.next()) {
                (Ok(k), Some(name)) => (k, name),
                (Err(_), None) => (1, first),
                _ => bail!("expected `COUNT SPECIES` or `SPECIES`, got `{term}`"),
            };
            if words.next().is_some() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
                bail!("expected `COUNT SPECIES` or `SPECIES`, got `{term}`");
            }
            Ok((name.to_string(), count))
        })
        .collect()
}

/// `A=1,B=1,C=0`.
pub fn weights(text: &str) -> Result<Vec<(String, u64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|term| {
            let (name, w) = term.split_once('=').with_context(|| format!("expected `SPECIES=WEIGHT`, got `{term}`"))?;
            let w: u64 = w.trim().parse().with_context(|| format!("bad weight in `{term}`"))?;
            Ok((name.trim().to_string(), w))
        })
        .collect()
}

/// Comma-separated unsigned integers.
pub fn sizes(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad size `{s}`")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_forms() {
        assert_eq!(ranges("0..8", 2).unwrap(), vec![(0, 8), (0, 8)]);
        assert_eq!(ranges("0..=2, 3", 2).unwrap(), vec![(0, 2), (3, 3)]);
        assert!(ranges("0..2,0..2,0..2", 2).is_err());
        assert!(ranges("3..1", 1).is_err());
        assert_eq!(points(&[(0, 1), (2, 3)]), vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn molecule_lists() {
        assert_eq!(
            molecules("3 X1, 5 X2, L").unwrap(),
            vec![("X1".into(), 3), ("X2".into(), 5), ("L".into(), 1)]
        );
        assert!(molecules("3 4").is_err());
        assert!(molecules("3 X Y").is_err());
    }

    #[test]
    fn weight_lists() {
        assert_eq!(weights("A=1, B=0").unwrap(), vec![("A".into(), 1), ("B".into(), 0)]);
        assert!(weights("A").is_err());
        assert_eq!(sizes("256,1024").unwrap(), vec![256, 1024]);
    }
}

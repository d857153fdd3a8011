//! Plain-text matrix input and CSV output.
//!
//! Input: one matrix row per line, entries separated by commas and/or
//! whitespace; integers, decimals and `p/q` are accepted. Blank lines and
//! lines starting with `#` are skipped.

use crate::cone::PairIndexer;
use crate::error::{Error, Result};
use crate::metric::{pair_count, validate_dissimilarity, validate_symmetric, DissimilarityMap};
use crate::rational::{self, Rational};

/// Splits on commas and whitespace, dropping empty fields.
fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = fields(line)
            .map(|f| {
                rational::parse(f).ok_or_else(|| Error::Parse {
                    line: k + 1,
                    msg: format!("`{f}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    Ok(rows)
}

/// Parses and validates a dissimilarity matrix.
pub fn parse_dissimilarity(text: &str) -> Result<DissimilarityMap> {
    validate_dissimilarity(&parse_matrix(text)?)
}

/// Parses a candidate on `n` items: either a full symmetric matrix or a
/// single line of `n(n−1)/2` values in lexicographic pair order. Zero and
/// negative entries are allowed.
pub fn parse_candidate(text: &str, n: usize) -> Result<DissimilarityMap> {
    let rows = parse_matrix(text)?;
    if rows.len() == 1 && n != 1 {
        let values = rows.into_iter().next().expect("one row");
        return DissimilarityMap::from_pairs(n, values);
    }
    let map = validate_symmetric(&rows)?;
    if map.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: map.n(),
        });
    }
    Ok(map)
}

/// Square matrix as CSV without a header.
pub fn matrix_to_csv(d: &DissimilarityMap) -> String {
    let mut out = String::new();
    for row in d.to_rows() {
        let cells: Vec<String> = row.iter().map(rational::fmt).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Rays as columns, pairs as rows: `pair,ray_1,ray_2,…`.
pub fn rays_to_csv(n: usize, rays: &[&DissimilarityMap], names: &[String]) -> String {
    let ix = PairIndexer::new(n);
    let mut out = String::from("pair");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for p in 0..pair_count(n) {
        out.push_str(&ix.label(p + 1));
        for r in rays {
            out.push(',');
            out.push_str(&rational::fmt(&r.values()[p]));
        }
        out.push('\n');
    }
    out
}

/// Reads a ray CSV produced by [`rays_to_csv`] back into maps.
pub fn parse_rays_csv(text: &str, n: usize) -> Result<Vec<DissimilarityMap>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::EmptyMatrix)?;
    let width = header.split(',').count() - 1;
    let mut columns: Vec<Vec<Rational>> = vec![Vec::new(); width];
    for (k, line) in lines {
        let mut cells = line.split(',');
        cells.next();
        for (c, cell) in cells.enumerate() {
            let v = rational::parse(cell).ok_or_else(|| Error::Parse {
                line: k + 1,
                msg: format!("`{cell}` is not a number"),
            })?;
            columns
                .get_mut(c)
                .ok_or_else(|| Error::Parse {
                    line: k + 1,
                    msg: "more cells than header columns".into(),
                })?
                .push(v);
        }
    }
    columns
        .into_iter()
        .map(|c| DissimilarityMap::from_pairs(n, c))
        .collect()
}

//! Reading and writing parity-check matrices in the alist interchange format.
//!
//! Layout: line 1 is `n m` (bit count, then check count); line 2 is
//! `max_col_degree max_row_degree`; line 3 lists the n column degrees;
//! line 4 the m row degrees; then n lines of 1-based check indices per
//! column and m lines of 1-based bit indices per row. Some writers pad
//! adjacency lines with zeros up to the maximum degree; zeros are ignored
//! on parse. Serialization always emits the canonical unpadded form with
//! LF line endings, except that a degree-0 node serializes as a lone `0`
//! so its line survives blank-line filtering.

use super::{ParityError, ParityMatrix};
use thiserror::Error;

/// Errors from alist parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlistError {
    #[error("line {line}: expected {expected}, found {found}")]
    Malformed {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("file truncated: expected {expected} lines of {section}")]
    Truncated {
        section: &'static str,
        expected: usize,
    },
    #[error("declared {kind} degree {declared} does not match {actual} listed indices (line {line})")]
    DegreeMismatch {
        kind: &'static str,
        declared: usize,
        actual: usize,
        line: usize,
    },
    #[error("column section lists H({row},{col})=1 but row section disagrees")]
    SectionDisagreement { row: usize, col: usize },
    #[error("declared max {kind} degree {declared} but section contains degree {actual}")]
    MaxDegreeMismatch {
        kind: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error(transparent)]
    Matrix(#[from] ParityError),
}

/// Parses alist text into a matrix, rejecting rows of degree < 2.
pub fn parse_alist(text: &str) -> Result<ParityMatrix, AlistError> {
    parse(text, true)
}

/// As [`parse_alist`] but admits degenerate rows (degree 0 or 1), for
/// inspecting files that the decoders would refuse.
pub fn parse_alist_lenient(text: &str) -> Result<ParityMatrix, AlistError> {
    parse(text, false)
}

fn parse(text: &str, enforce_degree: bool) -> Result<ParityMatrix, AlistError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line))
        .filter(|(_, line)| !line.trim().is_empty());

    let (n, m) = {
        let (line, raw) = lines.next().ok_or(AlistError::Truncated {
            section: "header",
            expected: 1,
        })?;
        parse_pair(line, raw, "bit and check counts")?
    };
    if n == 0 || m == 0 {
        return Err(ParityError::InvalidDimensions { checks: m, bits: n }.into());
    }
    let (max_col_deg, max_row_deg) = {
        let (line, raw) = lines.next().ok_or(AlistError::Truncated {
            section: "degree header",
            expected: 1,
        })?;
        parse_pair(line, raw, "maximum column and row degrees")?
    };

    let col_degrees = parse_degree_line(lines.next(), n, "column degrees")?;
    let row_degrees = parse_degree_line(lines.next(), m, "row degrees")?;
    check_max("column", max_col_deg, &col_degrees)?;
    check_max("row", max_row_deg, &row_degrees)?;

    let col_section = parse_adjacency(&mut lines, n, m, &col_degrees, "column adjacency")?;
    let row_section = parse_adjacency(&mut lines, m, n, &row_degrees, "row adjacency")?;

    // Cross-check: an entry listed under a column must be listed under the
    // matching row and vice versa.
    let mut from_cols = vec![Vec::new(); m];
    for (col, checks) in col_section.iter().enumerate() {
        for &row in checks {
            from_cols[row].push(col);
        }
    }
    for rows in from_cols.iter_mut() {
        rows.sort_unstable();
    }
    let mut sorted_rows = row_section.clone();
    for cols in sorted_rows.iter_mut() {
        cols.sort_unstable();
    }
    for (row, (a, b)) in from_cols.iter().zip(sorted_rows.iter()).enumerate() {
        if a != b {
            let col = a
                .iter()
                .find(|j| !b.contains(j))
                .or_else(|| b.iter().find(|j| !a.contains(j)))
                .copied()
                .unwrap_or(0);
            return Err(AlistError::SectionDisagreement {
                row: row + 1,
                col: col + 1,
            });
        }
    }

    let matrix = if enforce_degree {
        ParityMatrix::from_row_supports(row_section, n)?
    } else {
        ParityMatrix::from_row_supports_any_degree(row_section, n)?
    };
    Ok(matrix)
}

fn parse_pair(
    line: usize,
    raw: &str,
    expected: &'static str,
) -> Result<(usize, usize), AlistError> {
    let fields: Vec<_> = raw.split_whitespace().collect();
    let parsed: Option<(usize, usize)> = match fields.as_slice() {
        [a, b] => a.parse().ok().zip(b.parse().ok()),
        _ => None,
    };
    parsed.ok_or_else(|| AlistError::Malformed {
        line,
        expected,
        found: raw.trim().to_string(),
    })
}

fn parse_degree_line(
    entry: Option<(usize, &str)>,
    count: usize,
    section: &'static str,
) -> Result<Vec<usize>, AlistError> {
    let (line, raw) = entry.ok_or(AlistError::Truncated {
        section,
        expected: 1,
    })?;
    let degrees: Option<Vec<usize>> = raw
        .split_whitespace()
        .map(|f| f.parse().ok())
        .collect();
    match degrees {
        Some(d) if d.len() == count => Ok(d),
        _ => Err(AlistError::Malformed {
            line,
            expected: section,
            found: raw.trim().to_string(),
        }),
    }
}

fn check_max(kind: &'static str, declared: usize, degrees: &[usize]) -> Result<(), AlistError> {
    let actual = degrees.iter().copied().max().unwrap_or(0);
    if actual != declared {
        return Err(AlistError::MaxDegreeMismatch {
            kind,
            declared,
            actual,
        });
    }
    Ok(())
}

/// Parses `count` adjacency lines of 1-based indices in `1..=range`,
/// ignoring zero padding, and returns 0-based index lists.
fn parse_adjacency<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    count: usize,
    range: usize,
    degrees: &[usize],
    section: &'static str,
) -> Result<Vec<Vec<usize>>, AlistError> {
    let mut out = Vec::with_capacity(count);
    for &degree in &degrees[..count] {
        let (line, raw) = lines.next().ok_or(AlistError::Truncated {
            section,
            expected: count,
        })?;
        let mut indices = Vec::with_capacity(degree);
        for field in raw.split_whitespace() {
            let value: usize = field.parse().map_err(|_| AlistError::Malformed {
                line,
                expected: section,
                found: raw.trim().to_string(),
            })?;
            if value == 0 {
                continue; // padding
            }
            if value > range {
                return Err(AlistError::Malformed {
                    line,
                    expected: "index within declared dimensions",
                    found: field.to_string(),
                });
            }
            indices.push(value - 1);
        }
        if indices.len() != degree {
            return Err(AlistError::DegreeMismatch {
                kind: if section.starts_with("column") {
                    "column"
                } else {
                    "row"
                },
                declared: degree,
                actual: indices.len(),
                line,
            });
        }
        out.push(indices);
    }
    Ok(out)
}

/// Serializes a matrix to canonical alist text: unpadded adjacency lines,
/// single-space separators, LF endings, trailing newline.
pub fn serialize_alist(h: &ParityMatrix) -> String {
    let n = h.num_bits();
    let m = h.num_checks();
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", n, m));
    out.push_str(&format!("{} {}\n", h.max_col_degree(), h.max_row_degree()));
    push_numbers(&mut out, (0..n).map(|j| h.col_support(j).len()));
    push_numbers(&mut out, (0..m).map(|i| h.row_support(i).len()));
    for j in 0..n {
        push_numbers(&mut out, h.col_support(j).iter().map(|&i| i + 1));
    }
    for i in 0..m {
        push_numbers(&mut out, h.row_support(i).iter().map(|&j| j + 1));
    }
    out
}

fn push_numbers(out: &mut String, values: impl Iterator<Item = usize>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        out.push_str(&v.to_string());
        first = false;
    }
    if first {
        // A degree-0 node gets a lone zero pad; a blank line would be
        // dropped by the parser's blank-line tolerance.
        out.push('0');
    }
    out.push('\n');
}

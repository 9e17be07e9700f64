//! alist text format for sparse parity-check matrices.
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! col weights (n values)
//! row weights (m values)
//! n lines: 1-based row indices per column, padded with 0
//! m lines: 1-based column indices per row, padded with 0
//! ```

use crate::error::CodeError;
use crate::gf2::{Gf2Matrix, MatrixRole};

fn join_padded(indices: &[usize], width: usize) -> String {
    let mut parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    parts.resize(width, "0".to_string());
    parts.join(" ")
}

pub fn write_alist(h: &Gf2Matrix) -> String {
    let sparse = h.to_sparse();
    let t = sparse.transpose().to_sparse();
    let (m, n) = (h.rows(), h.cols());
    let rows: Vec<Vec<usize>> = (0..m).map(|r| sparse.row_support(r)).collect();
    let cols: Vec<Vec<usize>> = (0..n).map(|c| t.row_support(c)).collect();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let weights = |v: &[Vec<usize>]| {
        v.iter().map(|x| x.len().to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    out.push_str(&weights(&cols));
    out.push('\n');
    out.push_str(&weights(&rows));
    out.push('\n');
    for c in &cols {
        out.push_str(&join_padded(c, max_col));
        out.push('\n');
    }
    for r in &rows {
        out.push_str(&join_padded(r, max_row));
        out.push('\n');
    }
    out
}

struct Tokens<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Tokens<'a> {
    fn line(&mut self, what: &str) -> Result<(usize, Vec<usize>), CodeError> {
        loop {
            let Some((no, text)) = self.lines.next() else {
                return Err(CodeError::Alist(format!("unexpected end of input reading {what}")));
            };
            if text.trim().is_empty() {
                continue;
            }
            let vals = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| CodeError::Alist(format!("line {}: bad integer {t:?}", no + 1)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((no + 1, vals));
        }
    }
}

/// Parses an alist file, cross-checking the column and row sections.
pub fn parse_alist(text: &str) -> Result<Gf2Matrix, CodeError> {
    let mut tok = Tokens {
        lines: text.lines().enumerate().peekable(),
    };
    let bad = |line: usize, msg: &str| CodeError::Alist(format!("line {line}: {msg}"));

    let (l, dims) = tok.line("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(bad(l, "expected `n m`"));
    };
    let (l, maxes) = tok.line("maximum weights")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(bad(l, "expected `max_col max_row`"));
    };
    let (l, col_w) = tok.line("column weights")?;
    if col_w.len() != n {
        return Err(bad(l, "column weight count differs from n"));
    }
    let (l, row_w) = tok.line("row weights")?;
    if row_w.len() != m {
        return Err(bad(l, "row weight count differs from m"));
    }

    let mut from_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (c, &w) in col_w.iter().enumerate() {
        let (l, idx) = tok.line("column entries")?;
        let nz: Vec<usize> = idx.into_iter().filter(|&i| i != 0).collect();
        if nz.len() != w || w > max_col {
            return Err(bad(l, &format!("column {} lists {} entries, weight {w}", c + 1, nz.len())));
        }
        for r in nz {
            if r > m {
                return Err(bad(l, &format!("row index {r} exceeds m = {m}")));
            }
            from_cols[r - 1].push(c);
        }
    }
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(m);
    for (r, &w) in row_w.iter().enumerate() {
        let (l, idx) = tok.line("row entries")?;
        let mut nz: Vec<usize> = idx.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
        if nz.len() != w || w > max_row {
            return Err(bad(l, &format!("row {} lists {} entries, weight {w}", r + 1, nz.len())));
        }
        if nz.iter().any(|&c| c >= n) {
            return Err(bad(l, "column index exceeds n"));
        }
        nz.sort_unstable();
        let mut check = from_cols[r].clone();
        check.sort_unstable();
        if nz != check {
            return Err(bad(l, &format!("row {} disagrees with the column section", r + 1)));
        }
        rows.push(nz);
    }
    Ok(Gf2Matrix::from_sparse_rows(n, rows)?.with_role(MatrixRole::ParityCheck))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "4 2\n2 3\n1 2 2 1\n3 3\n1 0\n1 2\n1 2\n2 0\n1 2 3\n2 3 4\n";

    #[test]
    fn parses_and_writes_bit_exact() {
        let h = parse_alist(SMALL).unwrap();
        assert_eq!(h.rows(), 2);
        assert_eq!(h.row_support(0), vec![0, 1, 2]);
        assert_eq!(h.row_support(1), vec![1, 2, 3]);
        assert_eq!(write_alist(&h), SMALL);
    }

    #[test]
    fn rejects_inconsistent_sections() {
        let broken = SMALL.replace("2 3 4\n", "1 3 4\n");
        assert!(matches!(parse_alist(&broken), Err(CodeError::Alist(_))));
        assert!(parse_alist("4 2\n2 3\n").is_err());
        assert!(parse_alist("4 x\n").is_err());
    }

    #[test]
    fn round_trip_peg_matrix() {
        use crate::codes::{DegreeProfile, LdpcCode};
        let p = DegreeProfile::with_average(200, 100, 3, 3.4).unwrap();
        let code = LdpcCode::peg(200, 100, &p, 11).unwrap();
        let text = write_alist(code.parity_check());
        let back = parse_alist(&text).unwrap();
        assert_eq!(&back, code.parity_check());
        assert_eq!(write_alist(&back), text);
    }
}
